//! Uniform handle over base classifiers and ensembles, the per-cell fit cache
//! and the versioned model envelope.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::classifiers::{self, ClassDistribution, ClassifierSpec, Model};
use crate::dataset::{content_hash, Dataset, Instance};
use crate::ensembles::{self, EnsembleModel, EnsembleSpec};
use crate::error::{Error, Result};

/// Either a base classifier or an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerSpec {
    Classifier(ClassifierSpec),
    Ensemble(EnsembleSpec),
}

impl LearnerSpec {
    pub fn seed(&self) -> u64 {
        match self {
            LearnerSpec::Classifier(s) => s.seed,
            LearnerSpec::Ensemble(s) => s.seed,
        }
    }

    pub fn seed_path(&self) -> &[u64] {
        match self {
            LearnerSpec::Classifier(s) => &s.seed_path,
            LearnerSpec::Ensemble(s) => &s.seed_path,
        }
    }

    /// Same learner with its stream re-addressed to `(seed, path)`.
    pub fn with_seed(&self, seed: u64, seed_path: Vec<u64>) -> LearnerSpec {
        match self {
            LearnerSpec::Classifier(s) => LearnerSpec::Classifier(s.clone().with_seed(seed, seed_path)),
            LearnerSpec::Ensemble(s) => LearnerSpec::Ensemble(s.clone().with_seed(seed, seed_path)),
        }
    }

    /// Checks parameters against a feature count without fitting.
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            LearnerSpec::Classifier(s) => s.validate(dim),
            LearnerSpec::Ensemble(s) => s.validate(dim),
        }
    }

    pub fn fit(&self, train: &Dataset, ctx: &FitContext) -> Result<LearnedModel> {
        match self {
            LearnerSpec::Classifier(s) => Ok(LearnedModel::Classifier(ctx.fit(s, train)?)),
            LearnerSpec::Ensemble(s) => Ok(LearnedModel::Ensemble(ensembles::fit(s, train, ctx)?)),
        }
    }
}

impl From<ClassifierSpec> for LearnerSpec {
    fn from(s: ClassifierSpec) -> Self {
        LearnerSpec::Classifier(s)
    }
}

impl From<EnsembleSpec> for LearnerSpec {
    fn from(s: EnsembleSpec) -> Self {
        LearnerSpec::Ensemble(s)
    }
}

/// Classifier family used to group result tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    F1,
    F2,
    F3,
    F4,
    E1,
    E2,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::F1 => "F1",
            Category::F2 => "F2",
            Category::F3 => "F3",
            Category::F4 => "F4",
            Category::E1 => "E1",
            Category::E2 => "E2",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Category::F1 => "Network-based",
            Category::F2 => "Tree-based",
            Category::F3 => "Instance-based",
            Category::F4 => "Rule-based",
            Category::E1 => "Homogeneous ensembles",
            Category::E2 => "Heterogeneous ensembles",
        }
    }
}

/// A learner with its display name and category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedLearner {
    pub name: String,
    #[serde(default)]
    pub category: Option<Category>,
    pub learner: LearnerSpec,
}

impl NamedLearner {
    pub fn new(name: impl Into<String>, category: Option<Category>, learner: impl Into<LearnerSpec>) -> Self {
        NamedLearner {
            name: name.into(),
            category,
            learner: learner.into(),
        }
    }
}

/// A trained base classifier or ensemble.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "model", rename_all = "snake_case")]
pub enum LearnedModel {
    Classifier(Arc<Model>),
    Ensemble(EnsembleModel),
}

impl LearnedModel {
    pub fn dim(&self) -> usize {
        match self {
            LearnedModel::Classifier(m) => m.dim,
            LearnedModel::Ensemble(m) => m.dim,
        }
    }

    pub fn predict_dist(&self, x: &[f64]) -> Result<ClassDistribution> {
        match self {
            LearnedModel::Classifier(m) => m.predict_dist(x),
            LearnedModel::Ensemble(m) => m.predict_dist(x),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        Ok(self.predict_dist(x)?.label())
    }

    /// Distributions for every row, reusing memoized member predictions from
    /// `ctx` where possible.
    pub fn predict_rows(&self, rows: &Dataset, ctx: &FitContext) -> Result<Arc<Vec<ClassDistribution>>> {
        match self {
            LearnedModel::Classifier(m) => ctx.predict(m, rows),
            LearnedModel::Ensemble(m) => Ok(Arc::new(m.predict_rows(rows, ctx)?)),
        }
    }

    pub fn parameter_count(&self) -> usize {
        match self {
            LearnedModel::Classifier(m) => m.parameter_count(),
            LearnedModel::Ensemble(m) => m.parameter_count(),
        }
    }
}

/// Version written into every model envelope.
pub const MODEL_FORMAT_VERSION: u32 = 1;
const MODEL_FORMAT_NAME: &str = "sewerbench-model";

/// Self-describing serialized model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelEnvelope {
    pub format: String,
    pub version: u32,
    #[serde(flatten)]
    pub model: LearnedModel,
}

impl ModelEnvelope {
    pub fn new(model: LearnedModel) -> Self {
        ModelEnvelope {
            format: MODEL_FORMAT_NAME.to_string(),
            version: MODEL_FORMAT_VERSION,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Parses an envelope and rejects unknown formats or versions.
    pub fn from_json(text: &str) -> Result<Self> {
        let env: ModelEnvelope = serde_json::from_str(text)?;
        if env.format != MODEL_FORMAT_NAME {
            return Err(Error::data(format!("unrecognized model format {:?}", env.format)));
        }
        if env.version != MODEL_FORMAT_VERSION {
            return Err(Error::data(format!(
                "model format version {} is not supported (expected {MODEL_FORMAT_VERSION})",
                env.version
            )));
        }
        Ok(env)
    }
}

type FitKey = (String, u64);

/// Cache of base-classifier fits and their predictions, shared by every
/// learner evaluated on the same cross-validation cell.
///
/// Fits are keyed by the serialized spec and the training data's content
/// hash, so an ensemble member with the same spec and data as a standalone
/// learner reuses its model. Prediction vectors are memoized per cached model
/// and row set. A disabled context fits and predicts directly.
#[derive(Debug, Default)]
pub struct FitContext {
    disabled: bool,
    models: Mutex<HashMap<FitKey, Arc<Model>>>,
    owned: Mutex<HashSet<usize>>,
    predictions: Mutex<HashMap<PredictionKey, Arc<Vec<ClassDistribution>>>>,
}

/// Model address and row-set content hash.
type PredictionKey = (usize, u64);

impl FitContext {
    pub fn new() -> Self {
        FitContext::default()
    }

    /// A context that never caches.
    pub fn uncached() -> Self {
        FitContext {
            disabled: true,
            ..FitContext::default()
        }
    }

    pub fn cached_models(&self) -> usize {
        self.models.lock().expect("fit cache poisoned").len()
    }

    /// Fits `spec` on `train`, or returns the cached model for the same pair.
    pub fn fit(&self, spec: &ClassifierSpec, train: &Dataset) -> Result<Arc<Model>> {
        if self.disabled {
            return Ok(Arc::new(classifiers::fit(spec, train)?));
        }
        let key = (serde_json::to_string(spec)?, train.content_hash());
        if let Some(m) = self.models.lock().expect("fit cache poisoned").get(&key) {
            return Ok(Arc::clone(m));
        }
        let model = Arc::new(classifiers::fit(spec, train)?);
        let mut models = self.models.lock().expect("fit cache poisoned");
        let entry = models.entry(key).or_insert_with(|| Arc::clone(&model));
        self.owned
            .lock()
            .expect("fit cache poisoned")
            .insert(Arc::as_ptr(entry) as usize);
        Ok(Arc::clone(entry))
    }

    /// Distributions of `model` on `rows`. Results for models produced by
    /// this context are memoized.
    pub fn predict(&self, model: &Arc<Model>, rows: &Dataset) -> Result<Arc<Vec<ClassDistribution>>> {
        self.predict_instances(model, &rows.instances)
    }

    pub fn predict_instances(&self, model: &Arc<Model>, rows: &[Instance]) -> Result<Arc<Vec<ClassDistribution>>> {
        let ptr = Arc::as_ptr(model) as usize;
        let memo = !self.disabled && self.owned.lock().expect("fit cache poisoned").contains(&ptr);
        if !memo {
            return Ok(Arc::new(model.predict_dist_batch(rows)?));
        }
        let key = (ptr, content_hash(rows));
        if let Some(p) = self.predictions.lock().expect("prediction memo poisoned").get(&key) {
            return Ok(Arc::clone(p));
        }
        let preds = Arc::new(model.predict_dist_batch(rows)?);
        self.predictions
            .lock()
            .expect("prediction memo poisoned")
            .insert(key, Arc::clone(&preds));
        Ok(preds)
    }
}
