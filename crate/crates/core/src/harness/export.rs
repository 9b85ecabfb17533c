use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::BenchConfig;
use crate::error::Result;
use crate::learner::{FitContext, ModelEnvelope};

/// What `cmd_export` wrote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportSummary {
    pub name: String,
    pub path: PathBuf,
    pub parameter_count: usize,
    pub payload_bytes: usize,
    /// Rows of the dataset the model was refit on.
    pub training_rows: usize,
}

/// Refits the roster learner `name` on the full dataset of `config` and
/// writes it as a model envelope to `out`.
pub fn cmd_export(config: &BenchConfig, name: &str, out: impl AsRef<Path>) -> Result<ExportSummary> {
    config.validate()?;
    let named = config.learner(name)?;
    let data = config.load_dataset()?;
    let spec = named
        .learner
        .with_seed(config.root_seed, named.learner.seed_path().to_vec());
    spec.validate(data.dim())?;
    let model = spec.fit(&data, &FitContext::uncached())?;
    let parameter_count = model.parameter_count();
    let text = ModelEnvelope::new(model).to_json()?;
    std::fs::write(out.as_ref(), &text)?;
    Ok(ExportSummary {
        name: name.to_string(),
        path: out.as_ref().to_path_buf(),
        parameter_count,
        payload_bytes: text.len(),
        training_rows: data.len(),
    })
}
