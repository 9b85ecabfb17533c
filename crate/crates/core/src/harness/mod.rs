//! Command-line orchestration: data synthesis, the benchmark run and its
//! report artifacts, model export and the detection pipeline.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{read_csv, write_csv, Dataset};
use crate::error::{Error, Result};
use crate::gasdata::{synthesize_dataset, SynthConfig};
use crate::learner::NamedLearner;

mod bench;
mod detect;
mod export;
mod roster;

pub use bench::{cmd_bench, cmd_ks, load_eval, ArtifactEntry, BenchOutcome, EvalFile, LearnerRun, Manifest};
pub use detect::{cmd_detect, status_tokens, DetectRecord, DetectReport, Status};
pub use export::{cmd_export, ExportSummary};
pub use roster::default_roster;

/// Environment variable that overrides the worker count.
pub const JOBS_ENV: &str = "SEWERBENCH_JOBS";

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const DATA: i32 = 2;
    pub const CLASSIFIER: i32 = 3;
}

/// Exit code for an error: usage and configuration problems give 1, bad
/// input data 2, and training or prediction failures 3.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidParams { .. } => exit::USAGE,
        Error::Parse { .. } | Error::Data(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => exit::DATA,
        Error::Numeric(_) | Error::Classifier { .. } => exit::CLASSIFIER,
    }
}

/// Full benchmark configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    /// Labeled CSV to benchmark on; when absent the dataset is synthesized
    /// from `synth`.
    pub dataset_path: Option<PathBuf>,
    pub synth: SynthConfig,
    pub roster: Vec<NamedLearner>,
    pub k: usize,
    pub repeats: usize,
    pub root_seed: u64,
    /// Significance level of the pairwise KS tests.
    pub alpha: f64,
    pub out_dir: PathBuf,
    /// Worker threads; `None` uses every available core.
    pub jobs: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            dataset_path: None,
            synth: SynthConfig::default(),
            roster: default_roster(),
            k: 10,
            repeats: 10,
            root_seed: 42,
            alpha: 0.05,
            out_dir: PathBuf::from("bench-out"),
            jobs: None,
        }
    }
}

/// The part of the configuration that determines results; worker count and
/// output location are excluded.
#[derive(Serialize)]
struct Experiment<'a> {
    dataset_path: &'a Option<PathBuf>,
    synth: &'a SynthConfig,
    roster: &'a [NamedLearner],
    k: usize,
    repeats: usize,
    root_seed: u64,
    alpha: f64,
}

impl BenchConfig {
    /// Reduced profile: the 2,048-row dataset and three repeats.
    pub fn fast() -> Self {
        let mut c = BenchConfig::default();
        c.apply_fast();
        c
    }

    pub fn apply_fast(&mut self) {
        self.synth = SynthConfig::fast();
        self.repeats = 3;
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(format!("invalid bench config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.as_ref().display())))?;
        BenchConfig::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.roster.is_empty() {
            return Err(Error::config("the roster is empty"));
        }
        if self.k < 2 {
            return Err(Error::config(format!("k must be at least 2, got {}", self.k)));
        }
        if self.repeats == 0 {
            return Err(Error::config("repeats must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.jobs == Some(0) {
            return Err(Error::config("jobs must be at least 1"));
        }
        for (i, l) in self.roster.iter().enumerate() {
            if l.name.is_empty() {
                return Err(Error::config("roster entries need a name"));
            }
            if self.roster[..i].iter().any(|o| o.name == l.name) {
                return Err(Error::config(format!("duplicate roster name {:?}", l.name)));
            }
        }
        if self.dataset_path.is_none() {
            self.synth.validate()?;
        }
        Ok(())
    }

    /// SHA-256 (hex) of the result-determining configuration.
    pub fn config_hash(&self) -> Result<String> {
        let exp = Experiment {
            dataset_path: &self.dataset_path,
            synth: &self.synth,
            roster: &self.roster,
            k: self.k,
            repeats: self.repeats,
            root_seed: self.root_seed,
            alpha: self.alpha,
        };
        Ok(sha256_hex(serde_json::to_string(&exp)?.as_bytes()))
    }

    /// Reads `dataset_path` or synthesizes the dataset.
    pub fn load_dataset(&self) -> Result<Dataset> {
        match &self.dataset_path {
            Some(p) => read_csv(p),
            None => synthesize_dataset(&self.synth),
        }
    }

    pub fn learner(&self, name: &str) -> Result<&NamedLearner> {
        self.roster
            .iter()
            .find(|l| l.name == name)
            .ok_or_else(|| Error::config(format!("no learner named {name:?} in the roster")))
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Worker count: `SEWERBENCH_JOBS` if set, else the flag, else the
/// configuration, else the number of available cores.
pub fn resolve_jobs(flag: Option<usize>, env: Option<&str>, config: Option<usize>) -> Result<usize> {
    let jobs = match env.map(str::trim).filter(|s| !s.is_empty()) {
        Some(v) => v
            .parse::<usize>()
            .map_err(|_| Error::config(format!("{JOBS_ENV} must be a positive integer, got {v:?}")))?,
        None => match flag.or(config) {
            Some(j) => j,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if jobs == 0 {
        return Err(Error::config("jobs must be at least 1"));
    }
    Ok(jobs)
}

/// Synthesizes the dataset described by `config` and writes it as CSV.
pub fn cmd_synth(config: &SynthConfig, out: impl AsRef<Path>) -> Result<Dataset> {
    let data = synthesize_dataset(config)?;
    write_csv(&data, out)?;
    Ok(data)
}
