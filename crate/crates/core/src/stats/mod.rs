//! Accuracy bookkeeping, the repeated stratified k-fold protocol and the
//! pairwise two-sample Kolmogorov–Smirnov analysis.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{make_folds, Dataset, FoldPlan};
use crate::error::{Error, Result};
use crate::learner::{Category, FitContext, LearnerSpec, NamedLearner};
use crate::numerics::rng::{derive_seed, tags};

mod ks;
mod rank;

pub use ks::{
    build_ks_matrix, critical_value, ks_statistic, ks_two_sample, KsMatrix, KsOutcome, Relation, KS_C_ALPHA_005,
};
pub use rank::{accuracy_table_csv, accuracy_table_markdown, build_rank_table, rank_order, RankRow, RankTable};

/// Fraction of predictions equal to their labels.
pub fn accuracy(predictions: &[u8], labels: &[u8]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::data(format!(
            "{} predictions for {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::data("accuracy of an empty prediction set"));
    }
    let hits = predictions.iter().zip(labels).filter(|(p, l)| p == l).count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Mean and sample standard deviation (`n - 1` denominator; 0 for a single
/// value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Train and test accuracies of one learner over every (repeat, fold) cell,
/// in repeat-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSample {
    pub classifier_id: String,
    #[serde(default)]
    pub category: Option<Category>,
    pub k: usize,
    pub repeats: usize,
    pub train_accuracies: Vec<f64>,
    pub test_accuracies: Vec<f64>,
    pub train_mean: f64,
    pub train_std: f64,
    pub test_mean: f64,
    pub test_std: f64,
}

impl EvalSample {
    pub fn new(
        classifier_id: impl Into<String>,
        category: Option<Category>,
        k: usize,
        repeats: usize,
        train_accuracies: Vec<f64>,
        test_accuracies: Vec<f64>,
    ) -> Result<Self> {
        let cells = k * repeats;
        if train_accuracies.len() != cells || test_accuracies.len() != cells {
            return Err(Error::data(format!(
                "expected {cells} accuracies per side, got {} train and {} test",
                train_accuracies.len(),
                test_accuracies.len()
            )));
        }
        let (train_mean, train_std) = mean_std(&train_accuracies);
        let (test_mean, test_std) = mean_std(&test_accuracies);
        Ok(EvalSample {
            classifier_id: classifier_id.into(),
            category,
            k,
            repeats,
            train_accuracies,
            test_accuracies,
            train_mean,
            train_std,
            test_mean,
            test_std,
        })
    }
}

/// The stratified fold plan of every repeat; repeat `r` is seeded from
/// `(root_seed, r)`.
pub fn cv_plans(dataset: &Dataset, k: usize, repeats: usize, root_seed: u64) -> Result<Vec<FoldPlan>> {
    if repeats == 0 {
        return Err(Error::config("repeats must be at least 1"));
    }
    (0..repeats)
        .map(|r| make_folds(dataset, k, derive_seed(root_seed, &[tags::CV_REPEAT, r as u64]), true))
        .collect()
}

/// The learner as trained in cell `(repeat, fold)`: its stream is addressed
/// at `(root_seed, seed_path ++ [repeat, fold])`.
pub fn cell_learner(spec: &LearnerSpec, root_seed: u64, repeat: usize, fold: usize) -> LearnerSpec {
    let mut path = spec.seed_path().to_vec();
    path.extend([repeat as u64, fold as u64]);
    spec.with_seed(root_seed, path)
}

/// Result of one learner on one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellOutcome {
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub seconds: f64,
}

fn cell_error(name: &str, repeat: usize, fold: usize, e: Error) -> Error {
    Error::Classifier {
        name: name.to_string(),
        message: format!("repeat {repeat}, fold {fold}: {e}"),
    }
}

/// Fits every learner on the training folds of one cell and scores it on
/// the training and held-out rows. All learners share one fit cache.
pub fn evaluate_cell(
    learners: &[NamedLearner],
    dataset: &Dataset,
    plan: &FoldPlan,
    repeat: usize,
    fold: usize,
    root_seed: u64,
) -> Vec<Result<CellOutcome>> {
    let train = dataset.subset(&plan.train_indices(fold));
    let test = dataset.subset(&plan.test_indices(fold));
    let train_labels = train.labels();
    let test_labels = test.labels();
    let ctx = FitContext::new();
    learners
        .iter()
        .map(|l| {
            let start = Instant::now();
            let run = || -> Result<CellOutcome> {
                let model = cell_learner(&l.learner, root_seed, repeat, fold).fit(&train, &ctx)?;
                let score = |rows: &Dataset, labels: &[u8]| -> Result<f64> {
                    let preds: Vec<u8> = model.predict_rows(rows, &ctx)?.iter().map(|d| d.label()).collect();
                    accuracy(&preds, labels)
                };
                Ok(CellOutcome {
                    train_accuracy: score(&train, &train_labels)?,
                    test_accuracy: score(&test, &test_labels)?,
                    seconds: 0.0,
                })
            };
            run()
                .map(|o| CellOutcome {
                    seconds: start.elapsed().as_secs_f64(),
                    ..o
                })
                .map_err(|e| cell_error(&l.name, repeat, fold, e))
        })
        .collect()
}

/// Cross-validation results of a roster: one sample (or the first failure)
/// per learner, plus summed wall time per learner.
#[derive(Debug)]
pub struct CvReport {
    pub samples: Vec<Result<EvalSample>>,
    pub seconds: Vec<f64>,
}

/// Runs repeated stratified k-fold cross-validation for every learner.
///
/// Cells run on `jobs` worker threads; results are reduced in (repeat, fold)
/// order, so the output does not depend on `jobs`.
pub fn run_cv_roster(
    learners: &[NamedLearner],
    dataset: &Dataset,
    k: usize,
    repeats: usize,
    root_seed: u64,
    jobs: usize,
) -> Result<CvReport> {
    if learners.is_empty() {
        return Err(Error::config("the roster is empty"));
    }
    for l in learners {
        l.learner.validate(dataset.dim())?;
    }
    let plans = cv_plans(dataset, k, repeats, root_seed)?;
    let cells: Vec<(usize, usize)> = (0..repeats).flat_map(|r| (0..k).map(move |f| (r, f))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Vec<Result<CellOutcome>>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(r, f)| evaluate_cell(learners, dataset, &plans[r], r, f, root_seed))
            .collect()
    });
    let mut per_learner: Vec<Vec<Result<CellOutcome>>> = learners.iter().map(|_| Vec::new()).collect();
    for cell in results {
        for (slot, outcome) in per_learner.iter_mut().zip(cell) {
            slot.push(outcome);
        }
    }
    let mut samples = Vec::with_capacity(learners.len());
    let mut seconds = Vec::with_capacity(learners.len());
    for (l, outcomes) in learners.iter().zip(per_learner) {
        seconds.push(outcomes.iter().flatten().map(|o| o.seconds).sum());
        let collected: Result<Vec<CellOutcome>> = outcomes.into_iter().collect();
        samples.push(collected.and_then(|os| {
            EvalSample::new(
                l.name.clone(),
                l.category,
                k,
                repeats,
                os.iter().map(|o| o.train_accuracy).collect(),
                os.iter().map(|o| o.test_accuracy).collect(),
            )
        }));
    }
    Ok(CvReport { samples, seconds })
}

/// Repeated stratified k-fold cross-validation of a single learner on one
/// thread. Any fit failure aborts the run.
pub fn run_cv(spec: &LearnerSpec, dataset: &Dataset, k: usize, repeats: usize, root_seed: u64) -> Result<EvalSample> {
    let named = NamedLearner::new(learner_id(spec), None, spec.clone());
    let mut report = run_cv_roster(std::slice::from_ref(&named), dataset, k, repeats, root_seed, 1)?;
    report.samples.remove(0)
}

fn learner_id(spec: &LearnerSpec) -> String {
    match spec {
        LearnerSpec::Classifier(s) => s.algorithm.as_str().to_string(),
        LearnerSpec::Ensemble(s) => s.method.as_str().to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_basics() {
        assert_eq!(accuracy(&[1, 0, 1, 1], &[1, 0, 0, 1]).unwrap(), 0.75);
        assert_eq!(accuracy(&[0, 0], &[0, 0]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 1], &[0, 0]).unwrap(), 0.0);
        assert!(accuracy(&[], &[]).is_err());
        assert!(accuracy(&[1], &[1, 0]).is_err());
    }

    #[test]
    fn mean_std_uses_sample_denominator() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[0.7]), (0.7, 0.0));
    }

    #[test]
    fn eval_sample_checks_lengths() {
        assert!(EvalSample::new("x", None, 2, 2, vec![1.0; 4], vec![1.0; 3]).is_err());
        let s = EvalSample::new("x", None, 2, 1, vec![1.0, 0.5], vec![0.5, 0.5]).unwrap();
        assert_eq!(s.test_std, 0.0);
        assert_eq!(s.train_mean, 0.75);
    }
}
