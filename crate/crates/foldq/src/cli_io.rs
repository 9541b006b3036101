//! Verification runner, JSON reports, SVG figures and golden g-vector tables.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::action::ActionModel;
use crate::armodel::{ArModel, Indec, Layer};
use crate::chebrings::FoldingType;
use crate::quiver::{build_doubled, build_folding, verify_unfolding};
use crate::tilting::TiltingModel;
use crate::tropical::{random_words, TropicalError, TropicalModel};
use crate::Cyc;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("nothing to verify: pass --all or at least one --type")]
    EmptyConfig,
    #[error("no worked example for {0}")]
    NoGolden(FoldingType),
    #[error("the {0} layer has no projection figure")]
    NoFigure(Layer),
    #[error("{0}")]
    Compute(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Golden {
    Appendix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub types: Vec<FoldingType>,
    /// word length bound for the exhaustive unfolding check
    pub depth: usize,
    pub seed: u64,
    pub random_words: usize,
    pub max_word_len: usize,
    /// only compare the golden tables
    pub golden: Option<Golden>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { types: Vec::new(), depth: 10, seed: 2024, random_words: 500, max_word_len: 10, golden: None }
    }
}

impl RunConfig {
    pub fn all() -> Self {
        RunConfig { types: FoldingType::catalogue(), ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub passed: bool,
    /// data reproducing a failure (or a short summary when passing)
    pub witness: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

/// Number of generator sets listed for each type.
pub fn expected_gamma_count(ty: FoldingType) -> usize {
    match ty {
        FoldingType::A(2) => 2,
        FoldingType::A(_) | FoldingType::E6 => 4,
        FoldingType::D(3) => 3,
        FoldingType::D(_) => 2,
        FoldingType::E7 | FoldingType::E8 => 1,
    }
}

fn has_worked_example(ty: FoldingType) -> bool {
    matches!(ty, FoldingType::A(4) | FoldingType::D(4))
}

fn check(name: &str, ty: FoldingType, passed: bool, witness: Value) -> CheckResult {
    CheckResult { name: name.to_string(), ty: ty.to_string(), passed, witness }
}

fn type_checks(ty: FoldingType, cfg: &RunConfig) -> Result<Vec<CheckResult>, CliError> {
    let mut out = Vec::new();

    let f = build_folding(ty).map_err(compute)?;
    let d = build_doubled(ty).map_err(compute)?;
    let (u, ud) = (verify_unfolding(&f, cfg.depth), verify_unfolding(&d, cfg.depth));
    out.push(check(
        "unfolding",
        ty,
        u.failures.is_empty() && ud.failures.is_empty(),
        json!({ "words": u.checked + ud.checked, "failures": u.failures, "doubled_failures": ud.failures }),
    ));

    let trop = TropicalModel::new(ty).map_err(compute)?;
    let act = &trop.act;
    let ring = act.ring.integrity();
    out.push(check("ring_integrity", ty, ring.passed(ty), serde_json::to_value(&ring)?));

    for layer in [Layer::Module, Layer::Derived] {
        let r = act.ar.projection_report(layer).map_err(compute)?;
        out.push(check(&format!("projection_{layer}"), ty, r.passed(), serde_json::to_value(&r)?));
    }

    let bad = act.integrity().map_err(compute)?;
    out.push(check("action_integrity", ty, bad.is_empty(), json!({ "failures": bad })));

    let gammas = act.gamma_sets(Layer::Module);
    let mut ok = gammas.len() == expected_gamma_count(ty);
    let mut reports = Vec::new();
    for g in &gammas {
        let r = act.verify_gamma(g).map_err(compute)?;
        ok &= r.generates_all && r.basic && r.tau_closed && r.collinear_bijection;
        for h in &gammas {
            ok &= act.equivalent(g, h).map_err(compute)?;
        }
        reports.push(r);
    }
    if ty == FoldingType::A(4) {
        ok &= a7_generating_pair(act);
    }
    out.push(check("generators", ty, ok, json!({ "count": gammas.len(), "sets": reports })));

    let mut ok = true;
    let mut reports = Vec::new();
    for g in act.gamma_sets(Layer::Cluster) {
        let tm = TiltingModel::new(act, g).map_err(compute)?;
        let r = tm.report().map_err(compute)?;
        ok &= r.passed() && r.tilting_objects == 2 * act.ar.n() + 2;
        reports.push(r);
    }
    out.push(check("tilting", ty, ok, serde_json::to_value(&reports)?));

    let mut failures = Vec::new();
    for w in random_words(cfg.seed, cfg.random_words, cfg.max_word_len) {
        let r = trop.tesseract_check(&w).map_err(compute)?;
        failures.extend(r.failures);
        if failures.len() > 10 {
            break;
        }
    }
    out.push(check(
        "tesseract",
        ty,
        failures.is_empty(),
        json!({ "words": cfg.random_words, "failures": failures }),
    ));

    let p = trop.pattern_report().map_err(compute)?;
    let ok = p.distinct_seeds == 2 * act.ar.n() + 2 && p.c_vectors_are_roots && p.rescaled_unit_length && p.sign_coherent;
    out.push(check("exchange_pattern", ty, ok, serde_json::to_value(&p)?));

    if has_worked_example(ty) {
        out.push(golden_check(&trop)?);
    }
    Ok(out)
}

/// The generating pair (ω2, 1) of [2+ 2-/3] from [0+ 2+/1+] in A7.
pub fn a7_generating_pair(act: &ActionModel) -> bool {
    let find = |names: &[&str]| {
        let mut d = vec![0; act.ar.nv()];
        for v in names {
            d[act.ar.vertex_by_name(v).expect("A7 vertex")] += 1;
        }
        act.ar.find_by_dims(&d)
    };
    let (Some(m), Some(n)) = (find(&["0+", "2+", "1+"]), find(&["2+", "2-", "3"])) else {
        return false;
    };
    match act.generation_pair(&m, &n) {
        Some((r, r2)) => r.to_string() == "w2" && r2.to_string() == "1",
        None => false,
    }
}

fn golden_check(t: &TropicalModel) -> Result<CheckResult, CliError> {
    let got = appendix_text(t)?;
    let want = expected_appendix(t.ty()).ok_or(CliError::NoGolden(t.ty()))?;
    Ok(check("appendix_golden", t.ty(), got == want, json!({ "computed": got })))
}

/// Runs every check for the configured types.
pub fn run_verify(cfg: &RunConfig) -> Result<VerifyReport, CliError> {
    if cfg.types.is_empty() {
        return Err(CliError::EmptyConfig);
    }
    let mut checks = Vec::new();
    for &ty in &cfg.types {
        match cfg.golden {
            Some(Golden::Appendix) => {
                if !has_worked_example(ty) {
                    return Err(CliError::NoGolden(ty));
                }
                checks.push(golden_check(&TropicalModel::new(ty).map_err(compute)?)?);
            }
            None => checks.extend(type_checks(ty, cfg)?),
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { schema_version: REPORT_SCHEMA_VERSION, config: cfg.clone(), checks, passed })
}

/// Renders a + b√2 for elements of Q(2cos π/8) lying in Q(√2).
pub fn format_value(x: &Cyc) -> String {
    use num_traits::{One, Signed, Zero};
    let c = x.coeffs();
    let n = x.context().map_or(0, |ctx| ctx.n());
    let get = |i: usize| c.get(i).cloned().unwrap_or_else(num_rational::BigRational::zero);
    if n != 4 || !get(1).is_zero() || !get(3).is_zero() {
        return x.to_string();
    }
    let b = get(2);
    let a = get(0) + &b + &b;
    let surd = |k: &num_rational::BigRational| {
        if k.is_one() {
            "√2".to_string()
        } else if (-k).is_one() {
            "-√2".to_string()
        } else {
            format!("{k}√2")
        }
    };
    match (a.is_zero(), b.is_zero()) {
        (_, true) => a.to_string(),
        (true, false) => surd(&b),
        (false, false) => {
            let tail = surd(&b.abs());
            format!("{a}{}{tail}", if b.is_negative() { "-" } else { "+" })
        }
    }
}

/// The table of folded g-vectors of the worked example, one line per object.
pub fn appendix_text(t: &TropicalModel) -> Result<String, CliError> {
    let objs = t.appendix_objects().map_err(|_| CliError::NoGolden(t.ty()))?;
    let mut s = format!("folded g-vectors, {}\n", t.ty());
    for x in objs {
        let (a, b) = t.folded_g_vector(&x).map_err(compute)?;
        writeln!(s, "g^{} = ({}, {})", t.act.ar.dims_name(&x), format_value(&a), format_value(&b)).expect("string");
    }
    Ok(s)
}

pub fn expected_appendix(ty: FoldingType) -> Option<&'static str> {
    match ty {
        FoldingType::A(4) => Some(include_str!("../golden/appendix_A7.txt")),
        FoldingType::D(4) => Some(include_str!("../golden/appendix_D5.txt")),
        _ => None,
    }
}

/// Folded g-vectors of the members of the first generator set lying in rows of weight 1.
pub fn gvector_table(t: &TropicalModel) -> Result<Vec<(Indec, (Cyc, Cyc))>, TropicalError> {
    let g = t.act.gamma_sets(Layer::Cluster).remove(0);
    let mut out = Vec::new();
    for x in g.members {
        match t.folded_g_vector(&x) {
            Ok(v) => out.push((x, v)),
            Err(TropicalError::WeightNotOne(..)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Decimal with at most 12 significant digits, no trailing zeros.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

const SCALE: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Projection of the AR quiver: one arc per row at radius w(i), a labelled
/// point per object and the irreducible morphisms as arrows.
pub fn render_svg(ar: &ArModel, layer: Layer) -> Result<String, CliError> {
    if layer == Layer::Cluster {
        return Err(CliError::NoFigure(layer));
    }
    let objs = ar.enumerate(layer);
    let pos = |x: &Indec| -> Result<(f64, f64), CliError> {
        let (px, py) = ar.embed(&ar.dimproj(x).map_err(compute)?);
        Ok((px * SCALE, -py * SCALE))
    };
    let mut pts = Vec::with_capacity(objs.len());
    for x in &objs {
        pts.push((*x, pos(x)?));
    }
    let (mut x0, mut y0, mut x1, mut y1) = (0f64, 0f64, 0f64, 0f64);
    for (_, (x, y)) in &pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    let pad = 50.0;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        fmt_num(x0 - pad),
        fmt_num(y0 - pad),
        fmt_num(x1 - x0 + 2.0 * pad),
        fmt_num(y1 - y0 + 2.0 * pad)
    )
    .expect("string");
    s.push_str(concat!(
        r#"<defs><marker id="head" markerWidth="6" markerHeight="6" refX="6" refY="3" orient="auto">"#,
        r##"<path d="M0,0 L6,3 L0,6 z" fill="#555"/></marker></defs>"##,
        "\n"
    ));
    writeln!(s, "<title>{} {layer}</title>", ar.ty()).expect("string");

    let mut arcs: Vec<String> = Vec::new();
    for i in 0..ar.nv() {
        for shift in [0, 1] {
            let mut row: Vec<&(Indec, (f64, f64))> =
                pts.iter().filter(|(x, _)| x.vertex == i && x.shift == shift).collect();
            if row.is_empty() {
                continue;
            }
            row.sort_by_key(|(x, _)| ar.column(x));
            let path: Vec<String> = row.iter().map(|(_, (x, y))| format!("{},{}", fmt_num(*x), fmt_num(*y))).collect();
            let line = format!(
                r##"<polyline class="arc" data-radius="{}" points="{}" fill="none" stroke="#bbb"/>"##,
                fmt_num(ar.folding.weights[i].to_f64()),
                path.join(" ")
            );
            if !arcs.contains(&line) {
                arcs.push(line);
            }
        }
    }
    for a in &arcs {
        writeln!(s, "{a}").expect("string");
    }

    for shift in 0..=i64::from(layer == Layer::Derived) {
        for (a, b) in ar.ar_arrows() {
            let a = Indec { layer, shift, ..a };
            let b = Indec { layer, shift, ..b };
            let ((ax, ay), (bx, by)) = (pos(&a)?, pos(&b)?);
            // stop short of the target point
            let (dx, dy) = (bx - ax, by - ay);
            let len = (dx * dx + dy * dy).sqrt().max(1e-9);
            let k = (len - 6.0).max(0.0) / len;
            writeln!(
                s,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#555" marker-end="url(#head)"/>"##,
                fmt_num(ax),
                fmt_num(ay),
                fmt_num(ax + k * dx),
                fmt_num(ay + k * dy)
            )
            .expect("string");
        }
    }
    for (x, (px, py)) in &pts {
        writeln!(s, r#"<circle cx="{}" cy="{}" r="3"/>"#, fmt_num(*px), fmt_num(*py)).expect("string");
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="9">{}</text>"#,
            fmt_num(px + 4.0),
            fmt_num(py - 4.0),
            escape(&ar.dims_name(x))
        )
        .expect("string");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg(ar: &ArModel, layer: Layer, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, render_svg(ar, layer)?)?;
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(s: &str) -> TropicalModel {
        TropicalModel::new(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn number_rendering() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.5), "1.5");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_num(-123.456789012345), "-123.456789012");
    }

    #[test]
    fn appendix_tables_match() {
        for s in ["A7", "D5"] {
            let t = model(s);
            assert_eq!(appendix_text(&t).unwrap(), expected_appendix(t.ty()).unwrap(), "{s}");
        }
        assert!(matches!(appendix_text(&model("A5")), Err(CliError::NoGolden(_))));
    }

    #[test]
    fn surd_rendering() {
        let t = model("A7");
        let rendered: Vec<String> = t
            .appendix_objects()
            .unwrap()
            .iter()
            .map(|x| {
                let (a, b) = t.folded_g_vector(x).unwrap();
                format!("{},{}", format_value(&a), format_value(&b))
            })
            .collect();
        assert_eq!(rendered[4], "-1-√2,2+2√2");
        assert_eq!(rendered[5], "-√2,1+√2");
    }

    #[test]
    fn empty_config_is_rejected() {
        assert!(matches!(run_verify(&RunConfig::default()), Err(CliError::EmptyConfig)));
    }

    #[test]
    fn golden_only_run() {
        let cfg = RunConfig { types: vec!["A7".parse().unwrap()], golden: Some(Golden::Appendix), ..Default::default() };
        let r = run_verify(&cfg).unwrap();
        assert!(r.passed);
        assert_eq!(r.checks.len(), 1);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<VerifyReport>(&s).unwrap(), r);
    }

    #[test]
    fn small_full_run() {
        let cfg = RunConfig { types: vec!["A3".parse().unwrap()], random_words: 20, depth: 6, ..Default::default() };
        let r = run_verify(&cfg).unwrap();
        let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert!(r.passed, "{failed:?}");
    }

    #[test]
    fn svg_is_deterministic() {
        let ar = ArModel::new("D5".parse().unwrap()).unwrap();
        let a = render_svg(&ar, Layer::Module).unwrap();
        assert_eq!(a, render_svg(&ar, Layer::Module).unwrap());
        // rows 0, 1, 2 and the fork pair give four distinct radii
        let radii: std::collections::BTreeSet<&str> = a
            .lines()
            .filter_map(|l| l.split("data-radius=\"").nth(1))
            .map(|r| r.split('"').next().unwrap())
            .collect();
        assert_eq!(radii.len(), 4);
        assert!(render_svg(&ar, Layer::Cluster).is_err());
    }
}
