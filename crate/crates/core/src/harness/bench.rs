use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{sha256_hex, BenchConfig};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::numerics::rng::{derive_seed, tags};
use crate::stats::{
    accuracy_table_csv, accuracy_table_markdown, build_ks_matrix, build_rank_table, ks_two_sample, run_cv_roster,
    EvalSample, KsOutcome,
};

const MANIFEST_FORMAT: &str = "sewerbench-manifest";
const EVAL_FORMAT: &str = "sewerbench-eval";

/// Contents of `eval.json`: every successful learner's accuracy samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalFile {
    pub format: String,
    pub config_hash: String,
    pub k: usize,
    pub repeats: usize,
    pub root_seed: u64,
    pub alpha: f64,
    pub samples: Vec<EvalSample>,
}

/// One learner's status in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerRun {
    pub name: String,
    pub seconds: f64,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactEntry {
    pub file: String,
    pub sha256: String,
    pub config_hash: String,
}

/// Provenance record written next to the artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub tool_version: String,
    pub config_hash: String,
    pub root_seed: u64,
    /// Fold-plan seed of every repeat.
    pub repeat_seeds: Vec<u64>,
    /// Noise seed of the synthesized dataset; absent for CSV input.
    pub synth_seed: Option<u64>,
    pub dataset_rows: usize,
    pub dataset_hash: String,
    pub jobs: usize,
    pub total_seconds: f64,
    pub learners: Vec<LearnerRun>,
    pub artifacts: Vec<ArtifactEntry>,
    pub failures: Vec<String>,
}

/// Result of a benchmark run. `failures` is non-empty when some learner
/// failed; artifacts then cover only the learners that succeeded.
#[derive(Debug)]
pub struct BenchOutcome {
    pub out_dir: PathBuf,
    pub samples: Vec<EvalSample>,
    pub manifest: Manifest,
    pub failures: Vec<Error>,
}

fn dataset_hash(data: &Dataset) -> String {
    format!("{:016x}", data.content_hash())
}

/// Runs cross-validation for the whole roster and writes `eval.json`, the
/// three report tables (Markdown and CSV), `config.json` and
/// `manifest.json` into `config.out_dir`.
pub fn cmd_bench(config: &BenchConfig, jobs: usize) -> Result<BenchOutcome> {
    config.validate()?;
    let start = Instant::now();
    let config_hash = config.config_hash()?;
    let data = config.load_dataset()?;
    let report = run_cv_roster(&config.roster, &data, config.k, config.repeats, config.root_seed, jobs)?;

    let mut samples = Vec::new();
    let mut failures = Vec::new();
    let mut learners = Vec::new();
    for ((l, result), seconds) in config.roster.iter().zip(report.samples).zip(report.seconds) {
        match result {
            Ok(s) => {
                learners.push(LearnerRun {
                    name: l.name.clone(),
                    seconds,
                    ok: true,
                    error: None,
                });
                samples.push(s);
            }
            Err(e) => {
                learners.push(LearnerRun {
                    name: l.name.clone(),
                    seconds,
                    ok: false,
                    error: Some(e.to_string()),
                });
                failures.push(e);
            }
        }
    }

    let out = &config.out_dir;
    std::fs::create_dir_all(out)?;
    let mut artifacts = Vec::new();
    let mut write = |name: &str, contents: &str| -> Result<()> {
        std::fs::write(out.join(name), contents)?;
        artifacts.push(ArtifactEntry {
            file: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
            config_hash: config_hash.clone(),
        });
        Ok(())
    };
    let eval = EvalFile {
        format: EVAL_FORMAT.to_string(),
        config_hash: config_hash.clone(),
        k: config.k,
        repeats: config.repeats,
        root_seed: config.root_seed,
        alpha: config.alpha,
        samples: samples.clone(),
    };
    write("config.json", &(serde_json::to_string_pretty(config)? + "\n"))?;
    write("eval.json", &(serde_json::to_string_pretty(&eval)? + "\n"))?;
    write("table3.md", &accuracy_table_markdown(&samples))?;
    write("table3.csv", &accuracy_table_csv(&samples))?;
    let ranks = build_rank_table(&samples);
    write("table4.md", &ranks.to_markdown())?;
    write("table4.csv", &ranks.to_csv())?;
    if !samples.is_empty() {
        let ks = build_ks_matrix(&samples, config.alpha)?;
        write("table5.md", &ks.to_markdown())?;
        write("table5.csv", &ks.to_csv())?;
    }

    let manifest = Manifest {
        format: MANIFEST_FORMAT.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash,
        root_seed: config.root_seed,
        repeat_seeds: (0..config.repeats)
            .map(|r| derive_seed(config.root_seed, &[tags::CV_REPEAT, r as u64]))
            .collect(),
        synth_seed: config.dataset_path.is_none().then_some(config.synth.seed),
        dataset_rows: data.len(),
        dataset_hash: dataset_hash(&data),
        jobs,
        total_seconds: start.elapsed().as_secs_f64(),
        learners,
        artifacts,
        failures: failures.iter().map(|e| e.to_string()).collect(),
    };
    std::fs::write(
        out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(BenchOutcome {
        out_dir: out.clone(),
        samples,
        manifest,
        failures,
    })
}

pub fn load_eval(path: impl AsRef<Path>) -> Result<EvalFile> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let eval: EvalFile = serde_json::from_str(&text)?;
    if eval.format != EVAL_FORMAT {
        return Err(Error::data(format!("unrecognized evaluation format {:?}", eval.format)));
    }
    Ok(eval)
}

/// KS comparison of two learners' test accuracies from an evaluation file.
pub fn cmd_ks(eval: &EvalFile, a: &str, b: &str, alpha: Option<f64>) -> Result<KsOutcome> {
    let find = |name: &str| {
        eval.samples
            .iter()
            .find(|s| s.classifier_id == name)
            .ok_or_else(|| Error::config(format!("no learner named {name:?} in the evaluation")))
    };
    let (sa, sb) = (find(a)?, find(b)?);
    ks_two_sample(&sa.test_accuracies, &sb.test_accuracies, alpha.unwrap_or(eval.alpha))
}
