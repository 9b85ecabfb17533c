use serde::{Deserialize, Serialize};

use super::naive_bayes::NaiveBayes;
use super::params::NbTreeConfig;
use super::samples::Samples;
use super::tree::{best_split, grow, SplitScratch, Tree};
use super::ClassDistribution;
use crate::dataset::assign_folds;
use crate::error::Result;
use crate::numerics::rng::{tags, RngStream};

/// Entropy tree whose leaves hold naive Bayes models. A node is split only
/// when internal cross-validation shows the split with naive Bayes children
/// cuts the error of a single naive Bayes model by the required fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbTree {
    pub tree: Tree<NaiveBayes>,
}

impl NbTree {
    pub(crate) fn fit(s: &Samples, cfg: &NbTreeConfig, rng: &mut RngStream) -> Result<Self> {
        let mut cv_rng = rng.child(tags::INTERNAL_CV);
        let features: Vec<usize> = (0..s.d).collect();
        let mut scratch = SplitScratch::default();
        let tree = grow(
            s,
            (0..s.n()).collect(),
            |node, counts, _| {
                if node.len() < cfg.min_split || counts[0] == 0.0 || counts[1] == 0.0 {
                    return Ok(None);
                }
                let Some(split) = best_split(s, node, &features, 2, &mut scratch).filter(|b| b.gain > 0.0) else {
                    return Ok(None);
                };
                let labels: Vec<u8> = node.iter().map(|&i| s.y[i]).collect();
                let k = cfg.folds.min(node.len());
                let assign = assign_folds(&labels, k, &mut cv_rng, true);
                let (e_nb, e_split) =
                    cv_errors(s, node, &assign, k, split.feature, split.threshold, cfg.variance_floor);
                let worth = e_nb > 0.0 && (e_nb - e_split) / e_nb >= cfg.min_improvement;
                Ok(worth.then_some((split.feature, split.threshold)))
            },
            |idx, _| Ok(NaiveBayes::fit(s, idx, cfg.variance_floor)),
        )?;
        Ok(NbTree { tree })
    }

    pub(crate) fn dist(&self, x: &[f64]) -> ClassDistribution {
        self.tree.leaf(x).dist(x)
    }

    pub(crate) fn parameter_count(&self) -> usize {
        self.tree
            .nodes
            .iter()
            .map(|n| match &n.kind {
                super::tree::NodeKind::Leaf(nb) => nb.parameter_count(),
                super::tree::NodeKind::Split { .. } => 2,
            })
            .sum()
    }
}

/// Cross-validated error counts of (naive Bayes at the node, split with naive
/// Bayes children).
fn cv_errors(
    s: &Samples,
    node: &[usize],
    assign: &[usize],
    k: usize,
    feature: usize,
    threshold: f64,
    floor: f64,
) -> (f64, f64) {
    let mut e_nb = 0.0;
    let mut e_split = 0.0;
    for fold in 0..k {
        let train: Vec<usize> = node
            .iter()
            .zip(assign)
            .filter(|(_, &a)| a != fold)
            .map(|(&i, _)| i)
            .collect();
        if train.is_empty() {
            continue;
        }
        let whole = NaiveBayes::fit(s, &train, floor);
        let (tl, tr): (Vec<usize>, Vec<usize>) = train.iter().partition(|&&i| s.value(i, feature) <= threshold);
        let left = (!tl.is_empty()).then(|| NaiveBayes::fit(s, &tl, floor));
        let right = (!tr.is_empty()).then(|| NaiveBayes::fit(s, &tr, floor));
        for (&i, &a) in node.iter().zip(assign) {
            if a != fold {
                continue;
            }
            let x = s.row(i);
            if whole.dist(x).label() != s.y[i] {
                e_nb += 1.0;
            }
            let side = if x[feature] <= threshold { &left } else { &right };
            let model = side.as_ref().unwrap_or(&whole);
            if model.dist(x).label() != s.y[i] {
                e_split += 1.0;
            }
        }
    }
    (e_nb, e_split)
}
