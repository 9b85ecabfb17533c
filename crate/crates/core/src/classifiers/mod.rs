//! Base classifiers behind a uniform fit / predict contract.
//!
//! Every model exposes a two-class distribution; the hard label is its argmax
//! with ties resolved to label 0 (safe).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{fit_scaler, Dataset, Instance, Scaler};
use crate::error::{Error, Result};
use crate::numerics::rng::RngStream;

mod decision_table;
mod ibk;
mod kstar;
mod lmt;
mod lwl;
mod mlp;
mod naive_bayes;
mod nbtree;
mod params;
mod part;
mod rbf;
mod rep_tree;
mod samples;
mod stump;
mod svm;
pub mod tree;
mod zeror;

pub use decision_table::{discretize, loo_accuracy, DecisionTable};
pub use ibk::Ibk;
pub use kstar::{kstar_scale, KStar};
pub use lmt::{Lmt, LmtLeaf};
pub use lwl::Lwl;
pub use mlp::{Mlp, MlpWeights};
pub use naive_bayes::NaiveBayes;
pub use nbtree::NbTree;
pub use part::{Condition, Part, Rule};
pub use rbf::Rbf;
pub use rep_tree::{RandomTree, RepTree};
pub use stump::Stump;
pub use svm::Svm;
pub use zeror::ZeroR;

pub(crate) use samples::Samples;

/// Identifier of a base learning algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "MLP")]
    Mlp,
    #[serde(rename = "RBF")]
    Rbf,
    #[serde(rename = "SVM")]
    Svm,
    #[serde(rename = "REP_TREE")]
    RepTree,
    #[serde(rename = "NB_TREE")]
    NbTree,
    #[serde(rename = "LMT")]
    Lmt,
    #[serde(rename = "DT")]
    DecisionTable,
    #[serde(rename = "PART")]
    Part,
    #[serde(rename = "ZERO_R")]
    ZeroR,
    #[serde(rename = "IBK")]
    Ibk,
    #[serde(rename = "KSTAR")]
    KStar,
    #[serde(rename = "LWL")]
    Lwl,
    #[serde(rename = "STUMP")]
    Stump,
    #[serde(rename = "RANDOM_TREE")]
    RandomTree,
    #[serde(rename = "NAIVE_BAYES")]
    NaiveBayes,
}

impl Algorithm {
    pub const ALL: [Algorithm; 15] = [
        Algorithm::Mlp,
        Algorithm::Rbf,
        Algorithm::Svm,
        Algorithm::RepTree,
        Algorithm::NbTree,
        Algorithm::Lmt,
        Algorithm::DecisionTable,
        Algorithm::Part,
        Algorithm::ZeroR,
        Algorithm::Ibk,
        Algorithm::KStar,
        Algorithm::Lwl,
        Algorithm::Stump,
        Algorithm::RandomTree,
        Algorithm::NaiveBayes,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Mlp => "MLP",
            Algorithm::Rbf => "RBF",
            Algorithm::Svm => "SVM",
            Algorithm::RepTree => "REP_TREE",
            Algorithm::NbTree => "NB_TREE",
            Algorithm::Lmt => "LMT",
            Algorithm::DecisionTable => "DT",
            Algorithm::Part => "PART",
            Algorithm::ZeroR => "ZERO_R",
            Algorithm::Ibk => "IBK",
            Algorithm::KStar => "KSTAR",
            Algorithm::Lwl => "LWL",
            Algorithm::Stump => "STUMP",
            Algorithm::RandomTree => "RANDOM_TREE",
            Algorithm::NaiveBayes => "NAIVE_BAYES",
        }
    }

    /// Whether the algorithm fits on min-max scaled features.
    pub fn is_scaled(self) -> bool {
        matches!(
            self,
            Algorithm::Mlp
                | Algorithm::Rbf
                | Algorithm::Svm
                | Algorithm::Ibk
                | Algorithm::KStar
                | Algorithm::Lwl
                | Algorithm::Lmt
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace(['-', ' '], "_");
        let alg = match key.as_str() {
            "MLP" => Algorithm::Mlp,
            "RBF" => Algorithm::Rbf,
            "SVM" => Algorithm::Svm,
            "REP_TREE" | "REPTREE" => Algorithm::RepTree,
            "NB_TREE" | "NBTREE" => Algorithm::NbTree,
            "LMT" => Algorithm::Lmt,
            "DT" | "DECISION_TABLE" => Algorithm::DecisionTable,
            "PART" => Algorithm::Part,
            "ZERO_R" | "ZEROR" => Algorithm::ZeroR,
            "IBK" => Algorithm::Ibk,
            "KSTAR" | "K_STAR" => Algorithm::KStar,
            "LWL" => Algorithm::Lwl,
            "STUMP" | "DECISION_STUMP" => Algorithm::Stump,
            "RANDOM_TREE" | "RANDOMTREE" => Algorithm::RandomTree,
            "NAIVE_BAYES" | "NAIVEBAYES" => Algorithm::NaiveBayes,
            _ => return Err(Error::config(format!("unknown algorithm {s:?}"))),
        };
        Ok(alg)
    }
}

/// Algorithm identifier, hyperparameter overrides and random-stream address.
///
/// Parameters not listed in `params` take their documented defaults. The
/// model's random stream is derived from `(seed, seed_path)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub algorithm: Algorithm,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub seed_path: Vec<u64>,
}

impl ClassifierSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        ClassifierSpec {
            algorithm,
            params: BTreeMap::new(),
            seed: 0,
            seed_path: Vec::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_seed(mut self, seed: u64, seed_path: Vec<u64>) -> Self {
        self.seed = seed;
        self.seed_path = seed_path;
        self
    }

    pub fn stream(&self) -> RngStream {
        RngStream::new(self.seed, self.seed_path.clone())
    }

    /// Checks the overrides without fitting anything.
    pub fn validate(&self, dim: usize) -> Result<()> {
        params::validate(self, dim)
    }
}

/// Posterior over the two classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub p_safe: f64,
    pub p_unsafe: f64,
}

impl ClassDistribution {
    pub const UNIFORM: ClassDistribution = ClassDistribution {
        p_safe: 0.5,
        p_unsafe: 0.5,
    };

    pub fn certain(label: u8) -> Self {
        if label == 0 {
            ClassDistribution {
                p_safe: 1.0,
                p_unsafe: 0.0,
            }
        } else {
            ClassDistribution {
                p_safe: 0.0,
                p_unsafe: 1.0,
            }
        }
    }

    /// Normalizes non-negative class scores; all-zero scores give the
    /// uniform distribution.
    pub fn from_scores(safe: f64, unsafe_: f64) -> Self {
        let total = safe + unsafe_;
        if total > 0.0 && total.is_finite() {
            let p_unsafe = unsafe_ / total;
            ClassDistribution {
                p_safe: 1.0 - p_unsafe,
                p_unsafe,
            }
        } else {
            ClassDistribution::UNIFORM
        }
    }

    pub fn from_unsafe(p_unsafe: f64) -> Self {
        let p = p_unsafe.clamp(0.0, 1.0);
        ClassDistribution {
            p_safe: 1.0 - p,
            p_unsafe: p,
        }
    }

    /// Argmax with ties going to label 0.
    #[inline]
    pub fn label(&self) -> u8 {
        u8::from(self.p_unsafe > self.p_safe)
    }

    pub fn get(&self, label: u8) -> f64 {
        if label == 0 {
            self.p_safe
        } else {
            self.p_unsafe
        }
    }
}

/// Averages distributions with equal weight.
pub fn average_distributions(dists: &[ClassDistribution]) -> ClassDistribution {
    if dists.is_empty() {
        return ClassDistribution::UNIFORM;
    }
    let (s, u) = dists
        .iter()
        .fold((0.0, 0.0), |(s, u), d| (s + d.p_safe, u + d.p_unsafe));
    ClassDistribution::from_scores(s, u)
}

/// Algorithm-specific trained state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Payload {
    ZeroR(ZeroR),
    Ibk(Ibk),
    KStar(KStar),
    Lwl(Lwl),
    Stump(Stump),
    RepTree(RepTree),
    RandomTree(RandomTree),
    NaiveBayes(NaiveBayes),
    NbTree(NbTree),
    Lmt(Lmt),
    DecisionTable(DecisionTable),
    Part(Part),
    Mlp(Mlp),
    Rbf(Rbf),
    Svm(Svm),
}

impl Payload {
    fn dist(&self, x: &[f64]) -> ClassDistribution {
        match self {
            Payload::ZeroR(m) => m.dist(),
            Payload::Ibk(m) => m.dist(x),
            Payload::KStar(m) => m.dist(x),
            Payload::Lwl(m) => m.dist(x),
            Payload::Stump(m) => m.dist(x),
            Payload::RepTree(m) => m.dist(x),
            Payload::RandomTree(m) => m.dist(x),
            Payload::NaiveBayes(m) => m.dist(x),
            Payload::NbTree(m) => m.dist(x),
            Payload::Lmt(m) => m.dist(x),
            Payload::DecisionTable(m) => m.dist(x),
            Payload::Part(m) => m.dist(x),
            Payload::Mlp(m) => m.dist(x),
            Payload::Rbf(m) => m.dist(x),
            Payload::Svm(m) => m.dist(x),
        }
    }

    /// Number of stored real-valued parameters (weights, thresholds, stored
    /// feature values, table cells).
    pub fn parameter_count(&self) -> usize {
        match self {
            Payload::ZeroR(_) => 2,
            Payload::Ibk(m) => m.parameter_count(),
            Payload::KStar(m) => m.parameter_count(),
            Payload::Lwl(m) => m.parameter_count(),
            Payload::Stump(_) => 6,
            Payload::RepTree(m) => m.tree.parameter_count(),
            Payload::RandomTree(m) => m.tree.parameter_count(),
            Payload::NaiveBayes(m) => m.parameter_count(),
            Payload::NbTree(m) => m.parameter_count(),
            Payload::Lmt(m) => m.parameter_count(),
            Payload::DecisionTable(m) => m.parameter_count(),
            Payload::Part(m) => m.parameter_count(),
            Payload::Mlp(m) => m.weights.parameter_count(),
            Payload::Rbf(m) => m.parameter_count(),
            Payload::Svm(m) => m.parameter_count(),
        }
    }
}

/// A trained, serializable predictor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Model {
    pub spec: ClassifierSpec,
    pub dim: usize,
    pub scaler: Option<Scaler>,
    pub payload: Payload,
}

impl Model {
    fn check_arity(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::data(format!(
                "instance has {} features, model expects {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }

    fn dist_unchecked(&self, x: &[f64], buf: &mut Vec<f64>) -> ClassDistribution {
        match &self.scaler {
            Some(s) => {
                buf.resize(x.len(), 0.0);
                s.transform_into(x, buf);
                self.payload.dist(buf)
            }
            None => self.payload.dist(x),
        }
    }

    pub fn predict_dist(&self, x: &[f64]) -> Result<ClassDistribution> {
        self.check_arity(x)?;
        Ok(self.dist_unchecked(x, &mut Vec::new()))
    }

    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        Ok(self.predict_dist(x)?.label())
    }

    pub fn predict_dist_batch(&self, rows: &[Instance]) -> Result<Vec<ClassDistribution>> {
        let mut buf = Vec::with_capacity(self.dim);
        rows.iter()
            .map(|r| {
                self.check_arity(&r.features)?;
                Ok(self.dist_unchecked(&r.features, &mut buf))
            })
            .collect()
    }

    pub fn predict_batch(&self, rows: &[Instance]) -> Result<Vec<u8>> {
        Ok(self
            .predict_dist_batch(rows)?
            .iter()
            .map(ClassDistribution::label)
            .collect())
    }

    pub fn parameter_count(&self) -> usize {
        self.payload.parameter_count() + self.scaler.as_ref().map_or(0, |s| 2 * s.dim())
    }
}

/// Trains `spec` on `train`.
pub fn fit(spec: &ClassifierSpec, train: &Dataset) -> Result<Model> {
    if train.is_empty() {
        return Err(Error::data(format!(
            "cannot fit {} on an empty training set",
            spec.algorithm
        )));
    }
    let dim = train.dim();
    let p = params::resolve(spec, dim)?;
    let scaler = if spec.algorithm.is_scaled() {
        Some(fit_scaler(&train.instances)?)
    } else {
        None
    };
    let samples = Samples::from_instances(&train.instances, dim, scaler.as_ref());
    let mut rng = spec.stream();
    let payload = match p {
        params::Resolved::ZeroR => Payload::ZeroR(ZeroR::fit(&samples)),
        params::Resolved::Ibk { k } => Payload::Ibk(Ibk::fit(samples, k)),
        params::Resolved::KStar { blend } => Payload::KStar(KStar::fit(samples, blend)),
        params::Resolved::Lwl { neighbors } => Payload::Lwl(Lwl::fit(samples, neighbors)),
        params::Resolved::Stump => {
            let w = vec![1.0; samples.n()];
            Payload::Stump(Stump::fit(&samples, &w)?)
        }
        params::Resolved::RepTree(c) => Payload::RepTree(RepTree::fit(&samples, &c, &mut rng)?),
        params::Resolved::RandomTree(c) => Payload::RandomTree(RandomTree::fit(&samples, &c, &mut rng)?),
        params::Resolved::NaiveBayes { variance_floor } => {
            Payload::NaiveBayes(NaiveBayes::fit_all(&samples, variance_floor))
        }
        params::Resolved::NbTree(c) => Payload::NbTree(NbTree::fit(&samples, &c, &mut rng)?),
        params::Resolved::Lmt(c) => Payload::Lmt(Lmt::fit(&samples, &c)?),
        params::Resolved::DecisionTable(c) => Payload::DecisionTable(DecisionTable::fit(&samples, &c)),
        params::Resolved::Part(c) => Payload::Part(Part::fit(&samples, &c)?),
        params::Resolved::Mlp(c) => Payload::Mlp(Mlp::fit(&samples, &c, &mut rng)?),
        params::Resolved::Rbf(c) => Payload::Rbf(Rbf::fit(&samples, &c, &mut rng)?),
        params::Resolved::Svm(c) => Payload::Svm(Svm::fit(&samples, &c)?),
    };
    Ok(Model {
        spec: spec.clone(),
        dim,
        scaler,
        payload,
    })
}

/// Fits a decision stump under per-instance weights.
pub fn stump_fit(train: &Dataset, weights: &[f64]) -> Result<Model> {
    if train.is_empty() {
        return Err(Error::data("cannot fit a stump on an empty training set"));
    }
    if weights.len() != train.len() {
        return Err(Error::data("one weight per instance is required"));
    }
    let samples = Samples::from_instances(&train.instances, train.dim(), None);
    Ok(Model {
        spec: ClassifierSpec::new(Algorithm::Stump),
        dim: train.dim(),
        scaler: None,
        payload: Payload::Stump(Stump::fit(&samples, weights)?),
    })
}

pub fn predict(model: &Model, x: &[f64]) -> Result<u8> {
    model.predict(x)
}

pub fn predict_dist(model: &Model, x: &[f64]) -> Result<ClassDistribution> {
    model.predict_dist(x)
}
