//! The nine ensemble schemes: six homogeneous ensembles over one base
//! learner and three heterogeneous ensembles over the twelve base
//! classifiers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classifiers::{Algorithm, ClassDistribution, ClassifierSpec, Model};
use crate::dataset::{Dataset, Instance};
use crate::error::{Error, Result};
use crate::learner::FitContext;
use crate::numerics::pca::Pca;
use crate::numerics::rng::{derive_stream, RngStream};
use crate::numerics::Matrix;

mod adaboost;
mod combine;
mod heterogeneous;
mod homogeneous;

pub use adaboost::{adaboost_trace, AdaBoostTrace};
pub use combine::{argmax_scores, plurality, vote_distribution, vote_predict, WeightedVote, TIE_RESOLUTION};

/// Ensemble scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Bagging,
    #[serde(rename = "ADABOOST_M1")]
    AdaBoostM1,
    RandomSubspace,
    RandomCommittee,
    RotationForest,
    EnsembleSelection,
    Vote,
    MultiScheme,
    Wpe,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Bagging,
        Method::AdaBoostM1,
        Method::RandomSubspace,
        Method::RandomCommittee,
        Method::RotationForest,
        Method::EnsembleSelection,
        Method::Vote,
        Method::MultiScheme,
        Method::Wpe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Bagging => "BAGGING",
            Method::AdaBoostM1 => "ADABOOST_M1",
            Method::RandomSubspace => "RANDOM_SUBSPACE",
            Method::RandomCommittee => "RANDOM_COMMITTEE",
            Method::RotationForest => "ROTATION_FOREST",
            Method::EnsembleSelection => "ENSEMBLE_SELECTION",
            Method::Vote => "VOTE",
            Method::MultiScheme => "MULTI_SCHEME",
            Method::Wpe => "WPE",
        }
    }

    /// Vote, multi-scheme and WPE combine different algorithms.
    pub fn is_heterogeneous(self) -> bool {
        matches!(self, Method::Vote | Method::MultiScheme | Method::Wpe)
    }

    /// Default base learner of a homogeneous method.
    pub fn default_base(self) -> Option<Algorithm> {
        match self {
            Method::Bagging | Method::RandomSubspace | Method::EnsembleSelection => Some(Algorithm::RepTree),
            Method::AdaBoostM1 => Some(Algorithm::Stump),
            Method::RandomCommittee | Method::RotationForest => Some(Algorithm::RandomTree),
            Method::Vote | Method::MultiScheme | Method::Wpe => None,
        }
    }

    fn allowed_params(self) -> &'static [&'static str] {
        match self {
            Method::RandomSubspace => &["subspace_fraction"],
            Method::RotationForest => &["groups", "class_sample"],
            Method::EnsembleSelection | Method::Wpe => &["holdout_folds"],
            Method::MultiScheme => &["cv_folds"],
            _ => &[],
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_uppercase())
            .collect();
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().replace('_', "") == norm)
            .ok_or_else(|| Error::config(format!("unknown ensemble method {s:?}")))
    }
}

/// The twelve base classifiers combined by the heterogeneous ensembles, in
/// category order.
pub fn base_members() -> Vec<ClassifierSpec> {
    [
        Algorithm::Mlp,
        Algorithm::Rbf,
        Algorithm::Svm,
        Algorithm::RepTree,
        Algorithm::NbTree,
        Algorithm::Lmt,
        Algorithm::Ibk,
        Algorithm::KStar,
        Algorithm::Lwl,
        Algorithm::DecisionTable,
        Algorithm::Part,
        Algorithm::ZeroR,
    ]
    .into_iter()
    .map(ClassifierSpec::new)
    .collect()
}

/// Ensemble method, size, member specs and random-stream address.
///
/// Homogeneous methods take exactly one member spec (the base learner) and
/// derive member `j`'s stream at `seed_path ++ [j]`. Heterogeneous methods
/// take an explicit member list whose length equals `size`; members inherit
/// the ensemble's own stream address, so a member fitted on the same data as
/// a standalone classifier with the same spec is the same model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub method: Method,
    pub size: usize,
    pub members: Vec<ClassifierSpec>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub seed_path: Vec<u64>,
}

/// Resolved ensemble parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EnsembleParams {
    pub subspace_fraction: f64,
    pub groups: usize,
    pub class_sample: f64,
    pub holdout_folds: usize,
    pub cv_folds: usize,
}

impl EnsembleSpec {
    /// Default configuration: ten members over the method's base learner, or
    /// the twelve base classifiers for heterogeneous methods.
    pub fn new(method: Method) -> Self {
        let (size, members) = match method.default_base() {
            Some(base) => (10, vec![ClassifierSpec::new(base)]),
            None => (12, base_members()),
        };
        EnsembleSpec {
            method,
            size,
            members,
            params: BTreeMap::new(),
            seed: 0,
            seed_path: Vec::new(),
        }
    }

    pub fn with_size(mut self, size: usize) -> Self {
        self.size = size;
        self
    }

    pub fn with_members(mut self, members: Vec<ClassifierSpec>) -> Self {
        if self.method.is_heterogeneous() {
            self.size = members.len();
        }
        self.members = members;
        self
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

    pub(crate) fn sub_stream(&self, tags: &[u64]) -> RngStream {
        let mut path = self.seed_path.clone();
        path.extend_from_slice(tags);
        derive_stream(self.seed, &path)
    }

    /// Spec of member `j` with its stream address filled in.
    pub fn member_spec(&self, j: usize) -> ClassifierSpec {
        if self.method.is_heterogeneous() {
            self.members[j].clone().with_seed(self.seed, self.seed_path.clone())
        } else {
            let base = &self.members[j.min(self.members.len() - 1)];
            let mut path = self.seed_path.clone();
            path.push(j as u64);
            base.clone().with_seed(self.seed, path)
        }
    }

    pub(crate) fn resolve(&self, dim: usize) -> Result<EnsembleParams> {
        let fail = |msg: String| Error::params(self.method.as_str(), msg);
        if self.size == 0 {
            return Err(fail("ensemble size must be at least 1".into()));
        }
        if self.members.is_empty() {
            return Err(fail("at least one member spec is required".into()));
        }
        if self.method.is_heterogeneous() {
            if self.members.len() != self.size {
                return Err(fail(format!(
                    "size {} does not match the {} listed members",
                    self.size,
                    self.members.len()
                )));
            }
        } else if self.members.len() != 1 {
            return Err(fail(format!(
                "a homogeneous ensemble takes one base spec, got {}",
                self.members.len()
            )));
        }
        if self.method == Method::AdaBoostM1 && self.members[0].algorithm != Algorithm::Stump {
            return Err(fail("AdaBoost.M1 requires a decision-stump base".into()));
        }
        for m in &self.members {
            m.validate(dim)?;
        }
        let allowed = self.method.allowed_params();
        if let Some(k) = self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(fail(format!("unknown parameter {k:?}")));
        }
        let get = |k: &str, d: f64| self.params.get(k).copied().unwrap_or(d);
        let integer = |k: &str, d: f64, lo: f64| -> Result<usize> {
            let v = get(k, d);
            if !(v.fract() == 0.0 && v >= lo) {
                return Err(fail(format!("{k} must be an integer >= {lo}, got {v}")));
            }
            Ok(v as usize)
        };
        let fraction = |k: &str, d: f64| -> Result<f64> {
            let v = get(k, d);
            if !(v > 0.0 && v <= 1.0) {
                return Err(fail(format!("{k} must be in (0, 1], got {v}")));
            }
            Ok(v)
        };
        let p = EnsembleParams {
            subspace_fraction: fraction("subspace_fraction", 0.5)?,
            groups: integer("groups", 3.0, 1.0)?,
            class_sample: fraction("class_sample", 0.75)?,
            holdout_folds: integer("holdout_folds", 5.0, 2.0)?,
            cv_folds: integer("cv_folds", 5.0, 2.0)?,
        };
        if self.method == Method::RotationForest && p.groups > dim.max(1) {
            return Err(fail(format!("{} groups exceed {dim} features", p.groups)));
        }
        Ok(p)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        self.resolve(dim).map(|_| ())
    }
}

/// A member trained on a feature subset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceMember {
    pub features: Vec<usize>,
    pub model: Arc<Model>,
}

/// A member trained on block-rotated features.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RotationMember {
    /// Feature indices of each block, in block order.
    pub groups: Vec<Vec<usize>>,
    /// Principal axes of each block.
    pub rotations: Vec<Pca>,
    pub model: Arc<Model>,
}

impl RotationMember {
    /// Rotated feature vector: each block's principal-axis projection,
    /// concatenated in block order.
    pub fn rotate(&self, x: &[f64]) -> Vec<f64> {
        rotate_row(&self.groups, &self.rotations, x)
    }

    /// The `d x d` block-diagonal rotation: entry `(i, c)` maps original
    /// feature `i` to rotated feature `c`.
    pub fn rotation_matrix(&self, dim: usize) -> Matrix {
        let mut r = Matrix::zeros(dim, dim);
        let mut offset = 0;
        for (g, p) in self.groups.iter().zip(&self.rotations) {
            for (a, &i) in g.iter().enumerate() {
                for c in 0..p.rotation.cols() {
                    r[(i, offset + c)] = p.rotation[(a, c)];
                }
            }
            offset += p.rotation.cols();
        }
        r
    }
}

pub(crate) fn rotate_row(groups: &[Vec<usize>], rotations: &[Pca], x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    for (g, p) in groups.iter().zip(rotations) {
        let sub: Vec<f64> = g.iter().map(|&i| x[i]).collect();
        out.extend(p.project(&sub));
    }
    out
}

/// Method-specific trained state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum EnsemblePayload {
    Bagging {
        members: Vec<Arc<Model>>,
    },
    AdaBoost {
        members: Vec<Arc<Model>>,
        vote: WeightedVote,
        /// Weighted training error of each accepted member.
        errors: Vec<f64>,
        /// Majority label used when no member was accepted.
        fallback: Option<u8>,
    },
    RandomSubspace {
        members: Vec<SubspaceMember>,
    },
    RandomCommittee {
        members: Vec<Arc<Model>>,
    },
    RotationForest {
        members: Vec<RotationMember>,
    },
    EnsembleSelection {
        library: Vec<Arc<Model>>,
        /// Library indices in the order they were added (repeats allowed).
        bag: Vec<usize>,
        /// Selection-slice accuracy after each accepted addition.
        selection_accuracy: Vec<f64>,
    },
    Vote {
        members: Vec<Arc<Model>>,
    },
    MultiScheme {
        /// Mean internal cross-validation accuracy per member (empty when
        /// there was a single candidate).
        cv_accuracy: Vec<f64>,
        selected: usize,
        model: Arc<Model>,
    },
    Wpe {
        members: Vec<Arc<Model>>,
        vote: WeightedVote,
    },
}

/// A trained ensemble.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub spec: EnsembleSpec,
    pub dim: usize,
    pub payload: EnsemblePayload,
}

/// Trains the ensemble described by `spec`.
pub fn fit(spec: &EnsembleSpec, train: &Dataset, ctx: &FitContext) -> Result<EnsembleModel> {
    if train.is_empty() {
        return Err(Error::data(format!(
            "cannot fit {} on an empty training set",
            spec.method
        )));
    }
    let p = spec.resolve(train.dim())?;
    let payload = match spec.method {
        Method::Bagging => homogeneous::bagging(spec, train)?,
        Method::AdaBoostM1 => adaboost::fit(spec, train)?.0,
        Method::RandomSubspace => homogeneous::random_subspace(spec, train, &p)?,
        Method::RandomCommittee => homogeneous::random_committee(spec, train)?,
        Method::RotationForest => homogeneous::rotation_forest(spec, train, &p)?,
        Method::EnsembleSelection => homogeneous::ensemble_selection(spec, train, &p)?,
        Method::Vote => heterogeneous::vote(spec, train, ctx)?,
        Method::MultiScheme => heterogeneous::multi_scheme(spec, train, &p, ctx)?,
        Method::Wpe => heterogeneous::wpe(spec, train, &p, ctx)?,
    };
    Ok(EnsembleModel {
        spec: spec.clone(),
        dim: train.dim(),
        payload,
    })
}

impl EnsembleModel {
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

    /// Member distributions on one instance, in the order [`combine`] expects.
    ///
    /// [`combine`]: EnsembleModel::combine
    fn member_dists(&self, x: &[f64]) -> Result<Vec<ClassDistribution>> {
        match &self.payload {
            EnsemblePayload::Bagging { members }
            | EnsemblePayload::AdaBoost { members, .. }
            | EnsemblePayload::RandomCommittee { members }
            | EnsemblePayload::EnsembleSelection { library: members, .. }
            | EnsemblePayload::Vote { members }
            | EnsemblePayload::Wpe { members, .. } => members.iter().map(|m| m.predict_dist(x)).collect(),
            EnsemblePayload::RandomSubspace { members } => members
                .iter()
                .map(|m| {
                    let sub: Vec<f64> = m.features.iter().map(|&i| x[i]).collect();
                    m.model.predict_dist(&sub)
                })
                .collect(),
            EnsemblePayload::RotationForest { members } => {
                members.iter().map(|m| m.model.predict_dist(&m.rotate(x))).collect()
            }
            EnsemblePayload::MultiScheme { model, .. } => Ok(vec![model.predict_dist(x)?]),
        }
    }

    /// Folds member distributions into the ensemble's distribution.
    fn combine(&self, dists: &[ClassDistribution]) -> Result<ClassDistribution> {
        let labels = || dists.iter().map(ClassDistribution::label).collect::<Vec<u8>>();
        match &self.payload {
            EnsemblePayload::Bagging { .. } | EnsemblePayload::RandomSubspace { .. } => {
                Ok(vote_distribution(&labels()))
            }
            EnsemblePayload::AdaBoost { vote, fallback, .. } => match fallback {
                Some(label) => Ok(ClassDistribution::certain(*label)),
                None => vote.distribution(&labels()),
            },
            EnsemblePayload::RandomCommittee { .. }
            | EnsemblePayload::RotationForest { .. }
            | EnsemblePayload::Vote { .. } => Ok(crate::classifiers::average_distributions(dists)),
            EnsemblePayload::EnsembleSelection { bag, .. } => {
                let votes: Vec<u8> = bag.iter().map(|&j| dists[j].label()).collect();
                Ok(vote_distribution(&votes))
            }
            EnsemblePayload::MultiScheme { .. } => Ok(dists[0]),
            EnsemblePayload::Wpe { vote, .. } => vote.distribution(&labels()),
        }
    }

    pub fn predict_dist(&self, x: &[f64]) -> Result<ClassDistribution> {
        self.check_arity(x)?;
        self.combine(&self.member_dists(x)?)
    }

    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        Ok(self.predict_dist(x)?.label())
    }

    /// Distributions for every row of `rows`; member predictions go through
    /// `ctx` so cached members reuse memoized results.
    pub fn predict_rows(&self, rows: &Dataset, ctx: &FitContext) -> Result<Vec<ClassDistribution>> {
        for r in &rows.instances {
            self.check_arity(&r.features)?;
        }
        let per_member: Vec<Arc<Vec<ClassDistribution>>> = match &self.payload {
            EnsemblePayload::Bagging { members }
            | EnsemblePayload::AdaBoost { members, .. }
            | EnsemblePayload::RandomCommittee { members }
            | EnsemblePayload::Vote { members }
            | EnsemblePayload::Wpe { members, .. } => {
                members.iter().map(|m| ctx.predict(m, rows)).collect::<Result<_>>()?
            }
            EnsemblePayload::EnsembleSelection { library, bag, .. } => library
                .iter()
                .enumerate()
                .map(|(j, m)| {
                    if bag.contains(&j) {
                        ctx.predict(m, rows)
                    } else {
                        Ok(Arc::new(vec![ClassDistribution::UNIFORM; rows.len()]))
                    }
                })
                .collect::<Result<_>>()?,
            EnsemblePayload::RandomSubspace { members } => members
                .iter()
                .map(|m| ctx.predict(&m.model, &rows.project(&m.features)))
                .collect::<Result<_>>()?,
            EnsemblePayload::RotationForest { members } => members
                .iter()
                .map(|m| {
                    let rotated: Vec<Instance> = rows
                        .instances
                        .iter()
                        .map(|r| Instance {
                            features: m.rotate(&r.features),
                            label: r.label,
                        })
                        .collect();
                    ctx.predict_instances(&m.model, &rotated)
                })
                .collect::<Result<_>>()?,
            EnsemblePayload::MultiScheme { model, .. } => vec![ctx.predict(model, rows)?],
        };
        let mut buf = Vec::with_capacity(per_member.len());
        (0..rows.len())
            .map(|i| {
                buf.clear();
                buf.extend(per_member.iter().map(|p| p[i]));
                self.combine(&buf)
            })
            .collect()
    }

    pub fn predict_batch(&self, rows: &Dataset) -> Result<Vec<u8>> {
        Ok(self
            .predict_rows(rows, &FitContext::uncached())?
            .iter()
            .map(ClassDistribution::label)
            .collect())
    }

    /// Stored real-valued parameters over all members plus combination
    /// metadata.
    pub fn parameter_count(&self) -> usize {
        match &self.payload {
            EnsemblePayload::Bagging { members }
            | EnsemblePayload::RandomCommittee { members }
            | EnsemblePayload::Vote { members } => members.iter().map(|m| m.parameter_count()).sum(),
            EnsemblePayload::AdaBoost { members, vote, .. } | EnsemblePayload::Wpe { members, vote } => {
                members.iter().map(|m| m.parameter_count()).sum::<usize>() + vote.weights.len()
            }
            EnsemblePayload::RandomSubspace { members } => members
                .iter()
                .map(|m| m.model.parameter_count() + m.features.len())
                .sum(),
            EnsemblePayload::RotationForest { members } => members
                .iter()
                .map(|m| {
                    m.model.parameter_count()
                        + m.rotations
                            .iter()
                            .map(|p| p.mean.len() + p.rotation.rows() * p.rotation.cols())
                            .sum::<usize>()
                })
                .sum(),
            EnsemblePayload::EnsembleSelection { library, bag, .. } => {
                let mut used: Vec<usize> = bag.clone();
                used.sort_unstable();
                used.dedup();
                used.iter().map(|&j| library[j].parameter_count()).sum::<usize>() + bag.len()
            }
            EnsemblePayload::MultiScheme { model, .. } => model.parameter_count(),
        }
    }
}

/// Internal fold assignment of `labels` into `k` folds (fewer when the data
/// is small). Stratified when every present class can fill every fold.
/// Returns `None` when fewer than two instances are available.
pub(crate) fn internal_folds(labels: &[u8], k: usize, rng: &mut RngStream) -> Option<(usize, Vec<usize>)> {
    let n = labels.len();
    if n < 2 {
        return None;
    }
    let k = k.min(n);
    let mut counts = [0usize; 2];
    for &l in labels {
        counts[usize::from(l)] += 1;
    }
    let stratified = counts.iter().all(|&c| c == 0 || c >= k);
    Some((k, crate::dataset::assign_folds(labels, k, rng, stratified)))
}

/// Indices with and without fold `fold`.
pub(crate) fn split_by_fold(assignments: &[usize], fold: usize) -> (Vec<usize>, Vec<usize>) {
    let (test, train): (Vec<usize>, Vec<usize>) = (0..assignments.len()).partition(|&i| assignments[i] == fold);
    (train, test)
}

pub(crate) fn label_accuracy(dists: &[ClassDistribution], rows: &Dataset) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let hits = dists
        .iter()
        .zip(&rows.instances)
        .filter(|(d, r)| d.label() == r.label)
        .count();
    hits as f64 / rows.len() as f64
}
