use serde::{Deserialize, Serialize};

use super::params::{RandomTreeConfig, RepTreeConfig};
use super::samples::{majority, Samples};
use super::tree::{best_split, entropy, grow, NodeKind, SplitScratch, Tree};
use super::ClassDistribution;
use crate::dataset::assign_folds;
use crate::error::Result;
use crate::numerics::rng::{tags, RngStream};

impl Tree<ClassDistribution> {
    pub(crate) fn parameter_count(&self) -> usize {
        2 * self.nodes.len()
    }
}

fn leaf_dist(counts: [f64; 2]) -> ClassDistribution {
    ClassDistribution::from_scores(counts[0], counts[1])
}

/// Entropy tree pruned by reduced-error pruning against a held-out slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepTree {
    pub tree: Tree<ClassDistribution>,
    /// False when the training set was too small to hold out a prune slice.
    pub pruned: bool,
}

impl RepTree {
    pub(crate) fn fit(s: &Samples, cfg: &RepTreeConfig, rng: &mut RngStream) -> Result<Self> {
        let n = s.n();
        let folds = (1.0 / cfg.prune_fraction).round().max(2.0) as usize;
        let (grow_idx, prune_idx) = if n >= folds {
            let mut split_rng = rng.child(tags::PRUNE_SPLIT);
            let assign = assign_folds(&s.y, folds, &mut split_rng, true);
            let (prune, grow): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| assign[i] == 0);
            (grow, prune)
        } else {
            ((0..n).collect(), Vec::new())
        };
        let tree = grow_rep(s, grow_idx, cfg)?;
        if prune_idx.is_empty() {
            return Ok(RepTree { tree, pruned: false });
        }
        Ok(RepTree {
            tree: reduced_error_prune(tree, s, &prune_idx),
            pruned: true,
        })
    }

    pub(crate) fn dist(&self, x: &[f64]) -> ClassDistribution {
        *self.tree.leaf(x)
    }
}

fn grow_rep(s: &Samples, idx: Vec<usize>, cfg: &RepTreeConfig) -> Result<Tree<ClassDistribution>> {
    let min_gain = cfg.split_fraction * entropy(s.counts(&idx));
    let features: Vec<usize> = (0..s.d).collect();
    let mut scratch = SplitScratch::default();
    grow(
        s,
        idx,
        |node, counts, _| {
            if counts[0] == 0.0 || counts[1] == 0.0 {
                return Ok(None);
            }
            Ok(best_split(s, node, &features, cfg.min_leaf, &mut scratch)
                .filter(|b| b.gain > 0.0 && b.gain >= min_gain)
                .map(|b| (b.feature, b.threshold)))
        },
        |_, counts| Ok(leaf_dist(counts)),
    )
}

/// Bottom-up: a subtree becomes a leaf when the leaf's errors on the prune
/// slice do not exceed the subtree's.
pub(crate) fn reduced_error_prune(
    mut tree: Tree<ClassDistribution>,
    s: &Samples,
    prune_idx: &[usize],
) -> Tree<ClassDistribution> {
    let m = tree.nodes.len();
    let mut reach = vec![[0.0f64; 2]; m];
    for &i in prune_idx {
        let x = s.row(i);
        let mut node = 0;
        loop {
            reach[node][s.y[i] as usize] += 1.0;
            match tree.nodes[node].kind {
                NodeKind::Leaf(_) => break,
                NodeKind::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[feature] <= threshold { left } else { right },
            }
        }
    }
    // preorder numbering puts children after parents
    let mut subtree_err = vec![0.0; m];
    for node in (0..m).rev() {
        let as_leaf = reach[node][1 - majority(tree.nodes[node].counts) as usize];
        match tree.nodes[node].kind {
            NodeKind::Leaf(ref d) => {
                subtree_err[node] = reach[node][1 - d.label() as usize];
            }
            NodeKind::Split { left, right, .. } => {
                let below = subtree_err[left] + subtree_err[right];
                if as_leaf <= below {
                    tree.nodes[node].kind = NodeKind::Leaf(leaf_dist(tree.nodes[node].counts));
                    subtree_err[node] = as_leaf;
                } else {
                    subtree_err[node] = below;
                }
            }
        }
    }
    tree.compact()
}

/// Unpruned entropy tree choosing among a random feature subset at each node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomTree {
    pub tree: Tree<ClassDistribution>,
}

impl RandomTree {
    pub(crate) fn fit(s: &Samples, cfg: &RandomTreeConfig, rng: &mut RngStream) -> Result<Self> {
        let mut feature_rng = rng.child(tags::SPLIT_FEATURES);
        let mut scratch = SplitScratch::default();
        let k = cfg.features_per_split.clamp(1, s.d.max(1));
        let tree = grow(
            s,
            (0..s.n()).collect(),
            |node, counts, _| {
                if counts[0] == 0.0 || counts[1] == 0.0 || s.d == 0 {
                    return Ok(None);
                }
                let mut order: Vec<usize> = (0..s.d).collect();
                feature_rng.shuffle(&mut order);
                let first = best_split(s, node, &order[..k], cfg.min_leaf, &mut scratch).filter(|b| b.gain > 1e-12);
                if let Some(b) = first {
                    return Ok(Some((b.feature, b.threshold)));
                }
                for &f in &order[k..] {
                    if let Some(b) = best_split(s, node, &[f], cfg.min_leaf, &mut scratch).filter(|b| b.gain > 1e-12) {
                        return Ok(Some((b.feature, b.threshold)));
                    }
                }
                Ok(None)
            },
            |_, counts| Ok(leaf_dist(counts)),
        )?;
        Ok(RandomTree { tree })
    }

    pub(crate) fn dist(&self, x: &[f64]) -> ClassDistribution {
        *self.tree.leaf(x)
    }
}
