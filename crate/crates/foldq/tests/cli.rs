use std::process::{Command, Output};

fn foldq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foldq")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn golden_appendix_a7() {
    let o = foldq(&["verify", "--type", "A7", "--golden", "appendix"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("folded g-vectors, A7\n"));
    assert!(s.contains("g^[2+ 2-/1+ 3] = (-1-√2, 2+2√2)"), "{s}");
    assert_eq!(s.lines().count(), 11);
}

#[test]
fn golden_needs_a_worked_example() {
    let o = foldq(&["verify", "--type", "E8", "--golden", "appendix"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn empty_verify_is_a_usage_error() {
    assert_eq!(foldq(&["verify"]).status.code(), Some(2));
    assert_eq!(foldq(&["verify", "--type", "B3"]).status.code(), Some(2));
}

#[test]
fn verify_writes_a_passing_report() {
    let dir = std::env::temp_dir().join(format!("foldq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let o = foldq(&["verify", "--type", "A3", "--type", "D4", "--words", "20", "--report", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 18);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn act_on_a_tau_shifted_injective() {
    let o = foldq(&["act", "--type", "A7", "--elem", "w2", "--object", "I(1),tau=2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "w2 · τ^2I(1) = τ^2I(1) ⊕ τ^2I(3)");
}

#[test]
fn first_mutation_walk() {
    let o = foldq(&["tropical", "walk", "--type", "A7", "--word", "0"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 2);
    assert!(v["report"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn svg_is_written() {
    let o = foldq(&["ar", "project", "--type", "D5", "--layer", "derived"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
    assert_eq!(s, stdout(&foldq(&["ar", "project", "--type", "D5", "--layer", "derived"])));
    assert_eq!(foldq(&["ar", "project", "--type", "D5", "--layer", "cluster"]).status.code(), Some(1));
}

#[test]
fn tilting_complements_come_in_pairs() {
    let o = foldq(&["tilting", "complements", "--type", "A3"]);
    assert!(o.status.success());
    for line in stdout(&o).lines() {
        let (_, rest) = line.split_once(": ").unwrap();
        assert_eq!(rest.split(", ").count(), 2, "{line}");
    }
}
