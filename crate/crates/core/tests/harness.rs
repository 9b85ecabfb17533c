mod common;

use std::io::Cursor;

use sewerbench::classifiers::{Algorithm, ClassifierSpec, Payload};
use sewerbench::dataset::{majority_class, write_csv_to};
use sewerbench::gasdata::{enumerate_mixtures, synthesize_dataset, SynthConfig};
use sewerbench::harness::{cmd_bench, cmd_detect, cmd_export, cmd_ks, load_eval, BenchConfig, Status};
use sewerbench::learner::{LearnedModel, ModelEnvelope, NamedLearner};
use sewerbench::stats::{build_ks_matrix, cv_plans, mean_std, Relation};
use sewerbench::Error;

fn config(dir: &std::path::Path, roster: Vec<NamedLearner>, repeats: usize) -> BenchConfig {
    let mut c = BenchConfig::fast();
    c.roster = roster;
    c.repeats = repeats;
    c.out_dir = dir.to_path_buf();
    c
}

fn named(name: &str, a: Algorithm) -> NamedLearner {
    NamedLearner::new(name, None, ClassifierSpec::new(a))
}

#[test]
fn zeror_table_row_is_the_fold_majority_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(dir.path(), vec![named("ZeroR", Algorithm::ZeroR)], 1);
    let out = cmd_bench(&c, 1).unwrap();
    assert!(out.failures.is_empty());

    let data = c.load_dataset().unwrap();
    let plan = &cv_plans(&data, 10, 1, c.root_seed).unwrap()[0];
    let fractions: Vec<f64> = (0..10)
        .map(|f| {
            let (label, _) = majority_class(&data.subset(&plan.train_indices(f)).instances).unwrap();
            let test = plan.test_indices(f);
            test.iter().filter(|&&i| data.instances[i].label == label).count() as f64 / test.len() as f64
        })
        .collect();
    let (mean, std) = mean_std(&fractions);
    let s = &out.samples[0];
    assert!((s.test_mean - mean).abs() < 1e-12 && (s.test_std - std).abs() < 1e-12);
    assert!(s.test_std > 0.0);

    let table = std::fs::read_to_string(dir.path().join("table3.csv")).unwrap();
    assert!(table.lines().nth(1).unwrap().contains("ZeroR"));
    for f in [
        "config.json",
        "eval.json",
        "manifest.json",
        "table3.md",
        "table4.md",
        "table5.md",
        "table5.csv",
    ] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
}

#[test]
fn repeated_runs_write_identical_tables() {
    let roster = vec![
        named("NB", Algorithm::NaiveBayes),
        named("Stump", Algorithm::Stump),
        named("ZeroR", Algorithm::ZeroR),
    ];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    cmd_bench(&config(a.path(), roster.clone(), 1), 1).unwrap();
    cmd_bench(&config(b.path(), roster, 1), 2).unwrap();
    for f in [
        "eval.json",
        "table3.md",
        "table3.csv",
        "table4.md",
        "table4.csv",
        "table5.md",
        "table5.csv",
    ] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn ks_command_matches_the_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let roster = vec![named("NB", Algorithm::NaiveBayes), named("ZeroR", Algorithm::ZeroR)];
    let out = cmd_bench(&config(dir.path(), roster, 1), 1).unwrap();
    let eval = load_eval(dir.path().join("eval.json")).unwrap();
    let m = build_ks_matrix(&out.samples, 0.05).unwrap();
    for a in ["NB", "ZeroR"] {
        for b in ["NB", "ZeroR"] {
            assert_eq!(&cmd_ks(&eval, a, b, None).unwrap(), m.get(a, b).unwrap());
        }
    }
    assert_eq!(cmd_ks(&eval, "NB", "NB", None).unwrap().relation, Relation::Equal);
    assert_eq!(
        cmd_ks(&eval, "NB", "ZeroR", None).unwrap().relation,
        Relation::Dominates
    );
    assert!(matches!(cmd_ks(&eval, "NB", "nope", None), Err(Error::Config(_))));
}

#[test]
fn invalid_configs_are_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path(), vec![named("ZeroR", Algorithm::ZeroR)], 1);
    c.k = 1;
    assert!(matches!(cmd_bench(&c, 1), Err(Error::Config(_))));
    let c = config(
        dir.path(),
        vec![named("Z", Algorithm::ZeroR), named("Z", Algorithm::Ibk)],
        1,
    );
    assert!(cmd_bench(&c, 1).is_err());
    assert!(BenchConfig::from_json(r#"{"k": 10, "unknown_field": 1}"#).is_err());
}

fn export(name: &str) -> (LearnedModel, sewerbench::harness::ExportSummary, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let c = BenchConfig::fast();
    let path = dir.path().join("model.json");
    let summary = cmd_export(&c, name, &path).unwrap();
    let model = ModelEnvelope::from_json(&std::fs::read_to_string(&path).unwrap())
        .unwrap()
        .model;
    (model, summary, dir)
}

#[test]
fn exported_svm_keeps_only_support_vectors() {
    let (model, summary, _dir) = export("SVM");
    let LearnedModel::Classifier(m) = &model else {
        panic!("not a classifier")
    };
    let Payload::Svm(s) = &m.payload else {
        panic!("not an SVM")
    };
    assert_eq!(s.support.len(), s.n_support() * s.dim);
    assert!(s.coef.iter().all(|c| c.abs() > 1e-8));
    assert!(s.n_support() < summary.training_rows);
    assert_eq!(model.parameter_count(), summary.parameter_count);
}

#[test]
fn exported_ibk_stores_the_whole_dataset_and_round_trips() {
    let (model, summary, dir) = export("IBK");
    let LearnedModel::Classifier(m) = &model else {
        panic!("not a classifier")
    };
    let Payload::Ibk(ibk) = &m.payload else {
        panic!("not IBK")
    };
    assert_eq!(ibk.labels.len(), summary.training_rows);
    assert_eq!(ibk.points.len(), summary.training_rows * m.dim);

    // refit in memory and compare on 1,000 probes
    let c = BenchConfig::fast();
    let fresh = cmd_export(&c, "IBK", dir.path().join("again.json")).unwrap();
    assert_eq!(fresh.payload_bytes, summary.payload_bytes);
    let data = synthesize_dataset(&SynthConfig::fast()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("again.json")).unwrap();
    let again = ModelEnvelope::from_json(&text).unwrap().model;
    for (i, inst) in data.instances.iter().cycle().take(1000).enumerate() {
        let probe: Vec<f64> = inst.features.iter().map(|v| v + (i % 7) as f64 * 0.01).collect();
        assert_eq!(model.predict_dist(&probe).unwrap(), again.predict_dist(&probe).unwrap());
    }
}

#[test]
fn detect_reports_indicator_states() {
    let (model, _, _dir) = export("IBK");
    let mut quiet = SynthConfig::fast();
    for s in &mut quiet.sensor_specs {
        s.noise_sigma = 0.0;
    }
    let mixtures = enumerate_mixtures(&quiet).unwrap();
    let data = synthesize_dataset(&quiet).unwrap();
    let lowest = |g: &str| quiet.gas_specs.iter().find(|s| s.name == g).unwrap().levels[0];
    let highest = |g: &str| {
        *quiet
            .gas_specs
            .iter()
            .find(|s| s.name == g)
            .unwrap()
            .levels
            .last()
            .unwrap()
    };
    let pick = |nh3: f64| {
        mixtures
            .iter()
            .position(|m| {
                m.concentrations
                    .iter()
                    .all(|(g, &c)| c == if g == "nh3" { nh3 } else { lowest(g) })
            })
            .unwrap()
    };
    let minimal = pick(lowest("nh3"));
    let ammonia = pick(highest("nh3"));
    assert_eq!(mixtures[ammonia].label, 1);

    let rows = data.subset(&[minimal, minimal, ammonia]);
    let mut csv = Vec::new();
    write_csv_to(&rows, &mut csv).unwrap();
    let mut sink = Vec::new();
    let report = cmd_detect(&model, Cursor::new(csv), &mut sink).unwrap();
    let statuses: Vec<Option<Status>> = report.records.iter().map(|r| r.status).collect();
    assert_eq!(statuses, [Some(Status::Safe), Some(Status::Safe), Some(Status::Unsafe)]);
    assert_eq!((report.safe, report.unsafe_count, report.errors), (2, 1, 0));
    let text = String::from_utf8(sink).unwrap();
    assert_eq!(text.lines().next().unwrap(), "line 2: safe GREEN");
    assert_eq!(text.lines().nth(2).unwrap(), "line 4: unsafe RED BUZZER");
    assert_eq!(report.accuracy(), Some(1.0));
}

#[test]
fn detect_survives_bad_rows_and_empty_input() {
    let (model, _, _dir) = export("ZeroR");
    let header = "humidity,temperature,in_no2,in_co,in_h2s,in_nh3,in_ch4,class\n";
    let input = format!("{header}60,30,1,1,1,1,1,0\n60,30,1,1\n60,30,1,1,1,1,1,1\n");
    let mut sink = Vec::new();
    let report = cmd_detect(&model, Cursor::new(input), &mut sink).unwrap();
    assert_eq!(report.records.len(), 3);
    assert_eq!(report.errors, 1);
    assert_eq!(report.records[1].line, 3);
    assert!(report.records[1].error.is_some());
    assert_eq!(report.safe + report.unsafe_count, 2);

    let empty = cmd_detect(&model, Cursor::new(Vec::new()), Vec::new()).unwrap();
    assert!(empty.records.is_empty());

    let narrow = "a,b,class\n1,2,0\n";
    assert!(cmd_detect(&model, Cursor::new(narrow), Vec::new()).is_err());
}
