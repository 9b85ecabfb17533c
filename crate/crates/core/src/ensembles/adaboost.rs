use std::sync::Arc;

use super::{EnsemblePayload, EnsembleSpec, WeightedVote};
use crate::classifiers::stump_fit;
use crate::dataset::{majority_class, Dataset};
use crate::error::Result;

/// Per-round bookkeeping of an AdaBoost.M1 run.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaBoostTrace {
    /// Normalized instance weights at the start of each round, plus the
    /// weights after the last accepted update.
    pub instance_weights: Vec<Vec<f64>>,
    /// Weighted error of each fitted stump, including a rejected last one.
    pub errors: Vec<f64>,
    /// Vote weight `ln((1 - e) / e)` of each accepted stump.
    pub member_weights: Vec<f64>,
}

/// AdaBoost.M1 over decision stumps by reweighting.
///
/// A stump with weighted error `e >= 0.5` stops boosting without being
/// added; if it was the first, the ensemble falls back to the training
/// majority. A stump with `e = 0` replaces the ensemble outright, since its
/// vote weight would be unbounded.
pub(super) fn fit(spec: &EnsembleSpec, train: &Dataset) -> Result<(EnsemblePayload, AdaBoostTrace)> {
    let n = train.len();
    let labels = train.labels();
    let mut w = vec![1.0 / n as f64; n];
    let mut members = Vec::new();
    let mut alphas = Vec::new();
    let mut errors = Vec::new();
    let mut trace = AdaBoostTrace {
        instance_weights: vec![w.clone()],
        errors: Vec::new(),
        member_weights: Vec::new(),
    };
    for _ in 0..spec.size {
        let stump = stump_fit(train, &w)?;
        let preds = stump.predict_batch(&train.instances)?;
        let total: f64 = w.iter().sum();
        let wrong: f64 = w
            .iter()
            .zip(preds.iter().zip(&labels))
            .filter(|(_, (p, y))| p != y)
            .map(|(wi, _)| wi)
            .sum();
        let eps = wrong / total;
        trace.errors.push(eps);
        if eps >= 0.5 {
            break;
        }
        if eps == 0.0 {
            members = vec![Arc::new(stump)];
            alphas = vec![1.0];
            errors = vec![0.0];
            break;
        }
        let alpha = ((1.0 - eps) / eps).ln();
        members.push(Arc::new(stump));
        alphas.push(alpha);
        errors.push(eps);
        let beta = eps / (1.0 - eps);
        for (wi, (p, y)) in w.iter_mut().zip(preds.iter().zip(&labels)) {
            if p == y {
                *wi *= beta;
            }
        }
        let sum: f64 = w.iter().sum();
        w.iter_mut().for_each(|wi| *wi /= sum);
        trace.instance_weights.push(w.clone());
    }
    trace.member_weights = alphas.clone();
    let fallback = if members.is_empty() {
        Some(majority_class(&train.instances)?.0)
    } else {
        None
    };
    let payload = EnsemblePayload::AdaBoost {
        members,
        vote: WeightedVote::new(alphas)?,
        errors,
        fallback,
    };
    Ok((payload, trace))
}

/// Runs AdaBoost.M1 and returns its per-round bookkeeping.
pub fn adaboost_trace(spec: &EnsembleSpec, train: &Dataset) -> Result<AdaBoostTrace> {
    spec.resolve(train.dim())?;
    Ok(fit(spec, train)?.1)
}
