//! Hyperparameter defaults and validation.

use std::collections::BTreeMap;

use super::{Algorithm, ClassifierSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RepTreeConfig {
    pub min_leaf: usize,
    pub split_fraction: f64,
    pub prune_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RandomTreeConfig {
    pub features_per_split: usize,
    pub min_leaf: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct NbTreeConfig {
    pub min_split: usize,
    pub folds: usize,
    pub min_improvement: f64,
    pub variance_floor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LmtConfig {
    pub min_split: usize,
    pub ridge: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DecisionTableConfig {
    pub bins: usize,
    pub stale_limit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PartConfig {
    pub confidence: f64,
    pub min_leaf: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct MlpConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RbfConfig {
    pub centers: usize,
    pub kmeans_iterations: usize,
    pub ridge: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SvmConfig {
    pub c: f64,
    pub gamma: f64,
    pub tolerance: f64,
}

/// Fully typed parameters for one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Resolved {
    ZeroR,
    Ibk { k: usize },
    KStar { blend: f64 },
    Lwl { neighbors: usize },
    Stump,
    RepTree(RepTreeConfig),
    RandomTree(RandomTreeConfig),
    NaiveBayes { variance_floor: f64 },
    NbTree(NbTreeConfig),
    Lmt(LmtConfig),
    DecisionTable(DecisionTableConfig),
    Part(PartConfig),
    Mlp(MlpConfig),
    Rbf(RbfConfig),
    Svm(SvmConfig),
}

struct Reader<'a> {
    algorithm: Algorithm,
    map: &'a BTreeMap<String, f64>,
    known: Vec<&'static str>,
}

impl<'a> Reader<'a> {
    fn new(spec: &'a ClassifierSpec) -> Self {
        Reader {
            algorithm: spec.algorithm,
            map: &spec.params,
            known: Vec::new(),
        }
    }

    fn err(&self, msg: String) -> Error {
        Error::params(self.algorithm.as_str(), msg)
    }

    fn real(&mut self, key: &'static str, default: f64, ok: impl Fn(f64) -> bool, rule: &str) -> Result<f64> {
        self.known.push(key);
        let v = self.map.get(key).copied().unwrap_or(default);
        if !v.is_finite() || !ok(v) {
            return Err(self.err(format!("{key} = {v} violates {rule}")));
        }
        Ok(v)
    }

    fn count(&mut self, key: &'static str, default: usize, min: usize) -> Result<usize> {
        self.known.push(key);
        let v = match self.map.get(key) {
            None => return Ok(default),
            Some(&v) => v,
        };
        if !v.is_finite() || v.fract() != 0.0 || v < min as f64 || v > u32::MAX as f64 {
            return Err(self.err(format!("{key} = {v} must be an integer >= {min}")));
        }
        Ok(v as usize)
    }

    fn finish(self) -> Result<()> {
        if let Some(k) = self.map.keys().find(|k| !self.known.contains(&k.as_str())) {
            return Err(self.err(format!("unknown parameter {k:?}")));
        }
        Ok(())
    }
}

pub(crate) fn resolve(spec: &ClassifierSpec, dim: usize) -> Result<Resolved> {
    let mut r = Reader::new(spec);
    let resolved = match spec.algorithm {
        Algorithm::ZeroR => Resolved::ZeroR,
        Algorithm::Stump => Resolved::Stump,
        Algorithm::Ibk => Resolved::Ibk { k: r.count("k", 1, 1)? },
        Algorithm::KStar => Resolved::KStar {
            blend: r.real("blend", 0.2, |b| b > 0.0 && b <= 1.0, "0 < blend <= 1")?,
        },
        Algorithm::Lwl => Resolved::Lwl {
            neighbors: r.count("neighbors", 0, 0)?,
        },
        Algorithm::RepTree => Resolved::RepTree(RepTreeConfig {
            min_leaf: r.count("min_leaf", 2, 1)?,
            split_fraction: r.real("split_fraction", 0.001, |v| v >= 0.0, "split_fraction >= 0")?,
            prune_fraction: r.real("prune_fraction", 0.25, |v| v > 0.0 && v < 1.0, "0 < prune_fraction < 1")?,
        }),
        Algorithm::RandomTree => {
            let default_k = (dim as f64).sqrt().ceil() as usize;
            let k = r.count("features_per_split", default_k.max(1), 1)?;
            Resolved::RandomTree(RandomTreeConfig {
                features_per_split: k.min(dim.max(1)),
                min_leaf: r.count("min_leaf", 1, 1)?,
            })
        }
        Algorithm::NaiveBayes => Resolved::NaiveBayes {
            variance_floor: r.real("variance_floor", 1e-6, |v| v > 0.0, "variance_floor > 0")?,
        },
        Algorithm::NbTree => Resolved::NbTree(NbTreeConfig {
            min_split: r.count("min_split", 30, 2)?,
            folds: r.count("folds", 5, 2)?,
            min_improvement: r.real(
                "min_improvement",
                0.05,
                |v| (0.0..1.0).contains(&v),
                "0 <= min_improvement < 1",
            )?,
            variance_floor: r.real("variance_floor", 1e-6, |v| v > 0.0, "variance_floor > 0")?,
        }),
        Algorithm::Lmt => Resolved::Lmt(LmtConfig {
            min_split: r.count("min_split", 15, 2)?,
            ridge: r.real("ridge", 0.01, |v| v >= 0.0, "ridge >= 0")?,
            max_iter: r.count("max_iter", 200, 1)?,
        }),
        Algorithm::DecisionTable => Resolved::DecisionTable(DecisionTableConfig {
            bins: r.count("bins", 10, 1)?,
            stale_limit: r.count("stale_limit", 5, 1)?,
        }),
        Algorithm::Part => Resolved::Part(PartConfig {
            confidence: r.real("confidence", 0.25, |v| v > 0.0 && v < 0.5, "0 < confidence < 0.5")?,
            min_leaf: r.count("min_leaf", 2, 1)?,
        }),
        Algorithm::Mlp => Resolved::Mlp(MlpConfig {
            hidden: r.count("hidden", 100, 1)?,
            learning_rate: r.real("learning_rate", 0.3, |v| v > 0.0, "learning_rate > 0")?,
            momentum: r.real("momentum", 0.2, |v| (0.0..1.0).contains(&v), "0 <= momentum < 1")?,
            epochs: r.count("epochs", 500, 1)?,
        }),
        Algorithm::Rbf => Resolved::Rbf(RbfConfig {
            centers: r.count("centers", 10, 1)?,
            kmeans_iterations: r.count("kmeans_iterations", 50, 1)?,
            ridge: r.real("ridge", 1e-3, |v| v >= 0.0, "ridge >= 0")?,
        }),
        Algorithm::Svm => {
            let default_gamma = 1.0 / dim.max(1) as f64;
            Resolved::Svm(SvmConfig {
                c: r.real("c", 1.0, |v| v > 0.0, "c > 0")?,
                gamma: r.real("gamma", default_gamma, |v| v > 0.0, "gamma > 0")?,
                tolerance: r.real("tolerance", 1e-3, |v| v > 0.0, "tolerance > 0")?,
            })
        }
    };
    r.finish()?;
    Ok(resolved)
}

pub(crate) fn validate(spec: &ClassifierSpec, dim: usize) -> Result<()> {
    resolve(spec, dim).map(|_| ())
}
