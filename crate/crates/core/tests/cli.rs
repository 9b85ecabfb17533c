use std::path::Path;
use std::process::{Command, Output};

use sewerbench::classifiers::{Algorithm, ClassifierSpec};
use sewerbench::harness::BenchConfig;
use sewerbench::learner::NamedLearner;

fn sewerbench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sewerbench"))
        .current_dir(dir)
        .env_remove("SEWERBENCH_JOBS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn synth_writes_the_default_grid_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let a = sewerbench(dir.path(), &["synth", "--out", "a.csv"]);
    let b = sewerbench(dir.path(), &["synth", "--out", "b.csv"]);
    assert!(a.status.success() && b.status.success());
    assert!(stdout(&a).contains("16384 rows"));
    let text = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(text.iter().filter(|&&c| c == b'\n').count(), 16385);
    assert_eq!(text, std::fs::read(dir.path().join("b.csv")).unwrap());

    let other = sewerbench(dir.path(), &["synth", "--seed", "7", "--out", "c.csv"]);
    assert!(other.status.success());
    assert_ne!(text, std::fs::read(dir.path().join("c.csv")).unwrap());
}

#[test]
fn usage_and_config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sewerbench(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(sewerbench(dir.path(), &["frobnicate"]).status.code(), Some(1));

    std::fs::write(dir.path().join("bad.json"), r#"{"k": 1}"#).unwrap();
    let o = sewerbench(dir.path(), &["bench", "--config", "bad.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());

    std::fs::write(dir.path().join("synth.json"), r#"{"gas_specs": []}"#).unwrap();
    let o = sewerbench(dir.path(), &["synth", "--config", "synth.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_ks_export_detect_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = BenchConfig::fast();
    c.repeats = 1;
    c.roster = vec![
        NamedLearner::new("NB", None, ClassifierSpec::new(Algorithm::NaiveBayes)),
        NamedLearner::new("ZeroR", None, ClassifierSpec::new(Algorithm::ZeroR)),
    ];
    std::fs::write(dir.path().join("cfg.json"), serde_json::to_string(&c).unwrap()).unwrap();

    let o = sewerbench(
        dir.path(),
        &["bench", "--config", "cfg.json", "--out", "run", "--jobs", "2"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("run/table4.md").is_file());

    let o = sewerbench(dir.path(), &["ks", "run/eval.json", "NB", "ZeroR"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("NB ≻ ZeroR"));
    assert_eq!(
        sewerbench(dir.path(), &["ks", "run/eval.json", "NB", "missing"])
            .status
            .code(),
        Some(1)
    );

    let o = sewerbench(
        dir.path(),
        &["export", "NB", "--config", "cfg.json", "--out", "nb.json"],
    );
    assert_eq!(o.status.code(), Some(0));

    let o = sewerbench(dir.path(), &["synth", "--fast", "--out", "rows.csv"]);
    assert!(o.status.success());
    let o = sewerbench(dir.path(), &["detect", "--model", "nb.json", "rows.csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().next().unwrap().starts_with("line 2: "));
    assert!(out.contains("summary: 2048 rows"));

    let header = std::fs::read_to_string(dir.path().join("rows.csv")).unwrap();
    let header = header.lines().next().unwrap();
    std::fs::write(dir.path().join("bad.csv"), format!("{header}\n1,2,3\n")).unwrap();
    let o = sewerbench(dir.path(), &["detect", "--model", "nb.json", "bad.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("line 2: error"));

    std::fs::write(dir.path().join("empty.csv"), "").unwrap();
    let o = sewerbench(dir.path(), &["detect", "--model", "nb.json", "empty.csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("summary: 0 rows"));
}
