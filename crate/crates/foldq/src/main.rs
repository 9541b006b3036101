use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use foldq::action::ActionModel;
use foldq::armodel::{ArModel, Layer};
use foldq::chebrings::{FoldingType, RingElt};
use foldq::cli_io::{self, CliError, Golden, RunConfig};
use foldq::quiver::{build_doubled, build_folding};
use foldq::tilting::TiltingModel;
use foldq::tropical::TropicalModel;

// a closed pipe (e.g. `| head`) is not an error
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! out_raw {
    ($($t:tt)*) => {{
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "foldq", version, about = "Folded cluster combinatorics of I2(2n)")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayerArg {
    Module,
    Derived,
    Cluster,
}

impl From<LayerArg> for Layer {
    fn from(l: LayerArg) -> Self {
        match l {
            LayerArg::Module => Layer::Module,
            LayerArg::Derived => Layer::Derived,
            LayerArg::Cluster => Layer::Cluster,
        }
    }
}

#[derive(Args)]
struct TypeArg {
    /// folding type, e.g. A7, D5, E6
    #[arg(long = "type", short = 't')]
    ty: FoldingType,
}

#[derive(Subcommand)]
enum Command {
    /// Print the unfolding (or its double) as JSON.
    Info {
        #[command(flatten)]
        ty: TypeArg,
        #[arg(long)]
        doubled: bool,
    },
    /// Mutate along a composite word and report the origami check.
    Mutate {
        #[command(flatten)]
        ty: TypeArg,
        #[arg(long, value_delimiter = ',')]
        word: Vec<usize>,
        #[arg(long)]
        doubled: bool,
    },
    /// Auslander-Reiten quiver listing and projection figure.
    Ar {
        #[command(subcommand)]
        cmd: ArCmd,
    },
    /// Act by a ring element on an object.
    Act {
        #[command(flatten)]
        ty: TypeArg,
        #[arg(long)]
        elem: String,
        /// e.g. "I(1),tau=2", "P(6)", "SigmaP(6)"
        #[arg(long)]
        object: String,
        #[arg(long, value_enum, default_value = "module")]
        layer: LayerArg,
    },
    /// List the generator sets and their checks.
    Generators {
        #[command(flatten)]
        ty: TypeArg,
        #[arg(long, value_enum, default_value = "module")]
        layer: LayerArg,
    },
    /// Tilting objects over a generator set of the cluster category.
    Tilting {
        #[command(subcommand)]
        cmd: TiltingCmd,
    },
    /// C-/G-matrices, the tesseract check and folded g-vectors.
    Tropical {
        #[command(subcommand)]
        cmd: TropicalCmd,
    },
    /// Run the verification suite; exit code 0 iff every check passes.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum ArCmd {
    List {
        #[command(flatten)]
        ty: TypeArg,
        #[arg(long, value_enum, default_value = "module")]
        layer: LayerArg,
    },
    Project {
        #[command(flatten)]
        ty: TypeArg,
        #[arg(long, value_enum, default_value = "module")]
        layer: LayerArg,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GammaArg {
    /// generator set: an index, a full name, or plus/minus for the D family
    #[arg(long, default_value = "0")]
    gamma: String,
}

#[derive(Subcommand)]
enum TiltingCmd {
    Enumerate {
        #[command(flatten)]
        ty: TypeArg,
        #[command(flatten)]
        gamma: GammaArg,
    },
    Complements {
        #[command(flatten)]
        ty: TypeArg,
        #[command(flatten)]
        gamma: GammaArg,
        /// list complements of this member only
        #[arg(long)]
        object: Option<String>,
    },
}

#[derive(Subcommand)]
enum TropicalCmd {
    Walk {
        #[command(flatten)]
        ty: TypeArg,
        #[arg(long, value_delimiter = ',')]
        word: Vec<usize>,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    Gvectors {
        #[command(flatten)]
        ty: TypeArg,
    },
    Tesseract {
        #[command(flatten)]
        ty: TypeArg,
        #[arg(long, value_delimiter = ',')]
        word: Vec<usize>,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    all: bool,
    #[arg(long = "type", short = 't')]
    types: Vec<FoldingType>,
    #[arg(long, default_value_t = 10)]
    depth: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    words: usize,
    #[arg(long, value_enum)]
    golden: Option<GoldenArg>,
    /// write the JSON report here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GoldenArg {
    Appendix,
}

fn pick_gamma(act: &ActionModel, sel: &str) -> Result<foldq::action::GammaSet, CliError> {
    let mut sets = act.gamma_sets(Layer::Cluster);
    let idx = match sel {
        "plus" => sets.iter().position(|g| g.name.contains('+')).or(Some(0)),
        "minus" => sets.iter().position(|g| g.name.contains('-')),
        s => s.parse::<usize>().ok().filter(|&i| i < sets.len()).or_else(|| sets.iter().position(|g| g.name == s)),
    };
    let i = idx.ok_or_else(|| CliError::Compute(format!("unknown generator set {sel}")))?;
    Ok(sets.swap_remove(i))
}

fn print_json(v: &serde_json::Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.cmd {
        Command::Info { ty, doubled } => {
            let f = if doubled { build_doubled(ty.ty) } else { build_folding(ty.ty) }.map_err(err)?;
            print_json(&serde_json::to_value(f.to_json())?);
        }
        Command::Mutate { ty, word, doubled } => {
            let f = if doubled { build_doubled(ty.ty) } else { build_folding(ty.ty) }.map_err(err)?;
            let (b, t) = f.mutate_word(&word).map_err(err)?;
            print_json(&json!({
                "type": ty.ty,
                "word": word,
                "matrix": b.to_rows(),
                "target": t.to_rows(),
                "origami": f.is_origami_at(&b, &t),
            }));
        }
        Command::Ar { cmd } => match cmd {
            ArCmd::List { ty, layer } => {
                let ar = ArModel::new(ty.ty).map_err(err)?;
                for x in ar.enumerate(layer.into()) {
                    let p = ar.dimproj(&x).map_err(err)?;
                    out!(
                        "{}\t{}\tcolumn {}\t({}, {})",
                        ar.name(&x),
                        ar.dims_name(&x),
                        ar.column(&x),
                        cli_io::format_value(&p.0),
                        cli_io::format_value(&p.1)
                    );
                }
            }
            ArCmd::Project { ty, layer, svg } => {
                let ar = ArModel::new(ty.ty).map_err(err)?;
                match svg {
                    Some(path) => cli_io::write_svg(&ar, layer.into(), &path)?,
                    None => out_raw!("{}", cli_io::render_svg(&ar, layer.into())?),
                }
            }
        },
        Command::Act { ty, elem, object, layer } => {
            let act = ActionModel::new(ty.ty).map_err(err)?;
            let r = RingElt::parse(ty.ty, &elem).map_err(err)?;
            let x = act.ar.parse_object(&object, layer.into()).map_err(err)?;
            let out = act.act(&r, &x).map_err(err)?;
            let parts: Vec<String> = out
                .iter()
                .map(|(y, &k)| if k == 1 { act.ar.name(y) } else { format!("{k}·{}", act.ar.name(y)) })
                .collect();
            out!("{} · {} = {}", r, act.ar.name(&x), parts.join(" ⊕ "));
        }
        Command::Generators { ty, layer } => {
            let act = ActionModel::new(ty.ty).map_err(err)?;
            for g in act.gamma_sets(layer.into()) {
                let r = act.verify_gamma(&g).map_err(err)?;
                let names: Vec<String> = g.members.iter().map(|x| act.ar.name(x)).collect();
                print_json(&json!({ "name": g.name, "members": names, "report": r }));
            }
        }
        Command::Tilting { cmd } => match cmd {
            TiltingCmd::Enumerate { ty, gamma } => {
                let act = ActionModel::new(ty.ty).map_err(err)?;
                let tm = TiltingModel::new(&act, pick_gamma(&act, &gamma.gamma)?).map_err(err)?;
                for t in tm.enumerate_tilting().map_err(err)? {
                    let names: Vec<String> = t.summands.iter().map(|x| act.ar.name(x)).collect();
                    out!("{}", names.join(" ⊕ "));
                }
            }
            TiltingCmd::Complements { ty, gamma, object } => {
                let act = ActionModel::new(ty.ty).map_err(err)?;
                let tm = TiltingModel::new(&act, pick_gamma(&act, &gamma.gamma)?).map_err(err)?;
                let members = match object {
                    Some(o) => vec![act.ar.parse_object(&o, Layer::Cluster).map_err(err)?],
                    None => tm.gamma.members.clone(),
                };
                for x in members {
                    let c: Vec<String> = tm.complements(&x).map_err(err)?.iter().map(|y| act.ar.name(y)).collect();
                    out!("{}: {}", act.ar.name(&x), c.join(", "));
                }
            }
        },
        Command::Tropical { cmd } => match cmd {
            TropicalCmd::Walk { ty, word, emit } => {
                let t = TropicalModel::new(ty.ty).map_err(err)?;
                let nodes = t.walk(&word).map_err(err)?;
                let report = t.tesseract_check(&word).map_err(err)?;
                let v = json!({ "type": ty.ty, "word": word, "nodes": nodes, "report": report });
                match emit {
                    Some(p) => cli_io::write_json(&v, &p)?,
                    None => print_json(&v),
                }
                if !report.passed() {
                    return Ok(ExitCode::FAILURE);
                }
            }
            TropicalCmd::Gvectors { ty } => {
                let t = TropicalModel::new(ty.ty).map_err(err)?;
                match cli_io::appendix_text(&t) {
                    Ok(s) => out_raw!("{s}"),
                    Err(CliError::NoGolden(_)) => {
                        for (x, (a, b)) in cli_io::gvector_table(&t).map_err(err)? {
                            out!("g^{} = ({}, {})", t.act.ar.dims_name(&x), a, b);
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
            TropicalCmd::Tesseract { ty, word, emit } => {
                let t = TropicalModel::new(ty.ty).map_err(err)?;
                let report = t.tesseract_check(&word).map_err(err)?;
                match emit {
                    Some(p) => cli_io::write_json(&report, &p)?,
                    None => print_json(&serde_json::to_value(&report)?),
                }
                if !report.passed() {
                    return Ok(ExitCode::FAILURE);
                }
            }
        },
        Command::Verify(v) => {
            let cfg = RunConfig {
                types: if v.all { FoldingType::catalogue() } else { v.types },
                depth: v.depth,
                seed: v.seed,
                random_words: v.words,
                golden: v.golden.map(|GoldenArg::Appendix| Golden::Appendix),
                ..Default::default()
            };
            let report = cli_io::run_verify(&cfg)?;
            if cfg.golden.is_some() {
                for ty in &cfg.types {
                    let t = TropicalModel::new(*ty).map_err(err)?;
                    out_raw!("{}", cli_io::appendix_text(&t)?);
                }
            }
            match v.report {
                Some(p) => cli_io::write_json(&report, &p)?,
                None if cfg.golden.is_none() => print_json(&serde_json::to_value(&report)?),
                None => {}
            }
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {} {}", c.ty, c.name);
            }
            return Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::EmptyConfig) => {
            eprintln!("error: {}", CliError::EmptyConfig);
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
