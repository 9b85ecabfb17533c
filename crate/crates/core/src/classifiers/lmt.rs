use serde::{Deserialize, Serialize};

use super::params::LmtConfig;
use super::samples::{majority, Samples};
use super::tree::{best_split, grow, NodeKind, SplitScratch, Tree};
use super::ClassDistribution;
use crate::error::Result;
use crate::numerics::{fit_logistic, LogisticFit, Matrix};

const LOGISTIC_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LmtLeaf {
    /// Single-class leaf.
    Constant(u8),
    Logistic(LogisticFit),
}

/// Entropy tree with a logistic regression model in every leaf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lmt {
    pub tree: Tree<LmtLeaf>,
}

impl Lmt {
    pub(crate) fn fit(s: &Samples, cfg: &LmtConfig) -> Result<Self> {
        let features: Vec<usize> = (0..s.d).collect();
        let mut scratch = SplitScratch::default();
        let tree = grow(
            s,
            (0..s.n()).collect(),
            |node, counts, _| {
                if node.len() < cfg.min_split || counts[0] == 0.0 || counts[1] == 0.0 {
                    return Ok(None);
                }
                Ok(best_split(s, node, &features, 1, &mut scratch)
                    .filter(|b| b.gain > 0.0)
                    .map(|b| (b.feature, b.threshold)))
            },
            |idx, counts| leaf_model(s, idx, counts, cfg),
        )?;
        Ok(Lmt { tree })
    }

    pub(crate) fn dist(&self, x: &[f64]) -> ClassDistribution {
        match self.tree.leaf(x) {
            LmtLeaf::Constant(l) => ClassDistribution::certain(*l),
            LmtLeaf::Logistic(fit) => ClassDistribution::from_unsafe(fit.probability(x)),
        }
    }

    pub(crate) fn parameter_count(&self) -> usize {
        self.tree
            .nodes
            .iter()
            .map(|n| match &n.kind {
                NodeKind::Leaf(LmtLeaf::Constant(_)) => 1,
                NodeKind::Leaf(LmtLeaf::Logistic(f)) => f.weights.len(),
                NodeKind::Split { .. } => 2,
            })
            .sum()
    }
}

fn leaf_model(s: &Samples, idx: &[usize], counts: [f64; 2], cfg: &LmtConfig) -> Result<LmtLeaf> {
    if counts[0] == 0.0 || counts[1] == 0.0 {
        return Ok(LmtLeaf::Constant(majority(counts)));
    }
    let sub = s.subset(idx);
    let x = Matrix::from_vec(sub.n(), sub.d, sub.x)?;
    Ok(LmtLeaf::Logistic(fit_logistic(
        &x,
        &sub.y,
        cfg.ridge,
        cfg.max_iter,
        LOGISTIC_TOL,
    )?))
}
