use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::params::PartConfig;
use super::samples::Samples;
use super::tree::{best_split, grow, NodeKind, SplitScratch, Tree};
use super::ClassDistribution;
use crate::error::Result;

/// `x[feature] <= threshold` when `le`, otherwise `x[feature] > threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub feature: usize,
    pub threshold: f64,
    pub le: bool,
}

impl Condition {
    #[inline]
    pub fn holds(&self, x: &[f64]) -> bool {
        (x[self.feature] <= self.threshold) == self.le
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub dist: ClassDistribution,
    /// Training instances removed by this rule.
    pub coverage: usize,
}

impl Rule {
    pub fn matches(&self, x: &[f64]) -> bool {
        self.conditions.iter().all(|c| c.holds(x))
    }
}

/// Ordered rule list built by repeatedly growing a pruned entropy tree on the
/// uncovered instances and keeping its largest leaf as a rule. The last rule
/// has no conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub rules: Vec<Rule>,
}

/// Upper-confidence extra errors for a leaf with `n` instances and `e`
/// errors, as used by C4.5 pessimistic pruning.
pub(crate) fn added_errors(n: f64, e: f64, cf: f64, z: f64) -> f64 {
    if e < 1.0 {
        let base = n * (1.0 - cf.powf(1.0 / n));
        if e == 0.0 {
            return base;
        }
        return base + e * (added_errors(n, 1.0, cf, z) - base);
    }
    if e + 0.5 >= n {
        return (n - e).max(0.0);
    }
    let f = (e + 0.5) / n;
    let z2 = z * z;
    let r = (f + z2 / (2.0 * n) + z * (f / n - f * f / n + z2 / (4.0 * n * n)).sqrt()) / (1.0 + z2 / n);
    r * n - e
}

fn leaf_estimate(counts: [f64; 2], cf: f64, z: f64) -> f64 {
    let n = counts[0] + counts[1];
    let e = counts[0].min(counts[1]);
    e + added_errors(n, e, cf, z)
}

/// Subtree replacement wherever the leaf estimate is within 0.1 of the
/// subtree estimate.
fn pessimistic_prune(mut tree: Tree<()>, cf: f64, z: f64) -> Tree<()> {
    let m = tree.nodes.len();
    let mut est = vec![0.0; m];
    for node in (0..m).rev() {
        let as_leaf = leaf_estimate(tree.nodes[node].counts, cf, z);
        match tree.nodes[node].kind {
            NodeKind::Leaf(()) => est[node] = as_leaf,
            NodeKind::Split { left, right, .. } => {
                let below = est[left] + est[right];
                if as_leaf <= below + 0.1 {
                    tree.nodes[node].kind = NodeKind::Leaf(());
                    est[node] = as_leaf;
                } else {
                    est[node] = below;
                }
            }
        }
    }
    tree.compact()
}

impl Part {
    pub(crate) fn fit(s: &Samples, cfg: &PartConfig) -> Result<Self> {
        let z = Normal::standard().inverse_cdf(1.0 - cfg.confidence);
        let features: Vec<usize> = (0..s.d).collect();
        let mut scratch = SplitScratch::default();
        let mut remaining: Vec<usize> = (0..s.n()).collect();
        let mut rules = Vec::new();
        while !remaining.is_empty() {
            let tree = grow(
                s,
                remaining.clone(),
                |node, counts, _| {
                    if counts[0] == 0.0 || counts[1] == 0.0 {
                        return Ok(None);
                    }
                    Ok(best_split(s, node, &features, cfg.min_leaf, &mut scratch)
                        .filter(|b| b.gain > 0.0)
                        .map(|b| (b.feature, b.threshold)))
                },
                |_, _| Ok(()),
            )?;
            let tree = pessimistic_prune(tree, cfg.confidence, z);
            let root = tree.nodes[0].counts;
            if matches!(tree.nodes[0].kind, NodeKind::Leaf(())) {
                rules.push(Rule {
                    conditions: Vec::new(),
                    dist: ClassDistribution::from_scores(root[0], root[1]),
                    coverage: remaining.len(),
                });
                return Ok(Part { rules });
            }
            let (conditions, counts) = largest_leaf(&tree);
            let rule = Rule {
                conditions,
                dist: ClassDistribution::from_scores(counts[0], counts[1]),
                coverage: 0,
            };
            let before = remaining.len();
            remaining.retain(|&i| !rule.matches(s.row(i)));
            rules.push(Rule {
                coverage: before - remaining.len(),
                ..rule
            });
        }
        let total = s.all_counts();
        rules.push(Rule {
            conditions: Vec::new(),
            dist: ClassDistribution::from_scores(total[0], total[1]),
            coverage: 0,
        });
        Ok(Part { rules })
    }

    pub(crate) fn dist(&self, x: &[f64]) -> ClassDistribution {
        self.rules
            .iter()
            .find(|r| r.matches(x))
            .map_or(ClassDistribution::UNIFORM, |r| r.dist)
    }

    pub(crate) fn parameter_count(&self) -> usize {
        self.rules.iter().map(|r| 2 * r.conditions.len() + 2).sum()
    }
}

/// Path conditions and counts of the leaf with the most training instances;
/// ties keep the first leaf in preorder.
fn largest_leaf(tree: &Tree<()>) -> (Vec<Condition>, [f64; 2]) {
    let mut best: Option<(f64, Vec<Condition>, [f64; 2])> = None;
    let mut stack: Vec<(usize, Vec<Condition>)> = vec![(0, Vec::new())];
    while let Some((i, path)) = stack.pop() {
        let node = &tree.nodes[i];
        match node.kind {
            NodeKind::Leaf(()) => {
                let n = node.counts[0] + node.counts[1];
                if best.as_ref().is_none_or(|b| n > b.0) {
                    best = Some((n, path, node.counts));
                }
            }
            NodeKind::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                let mut rp = path.clone();
                rp.push(Condition {
                    feature,
                    threshold,
                    le: false,
                });
                let mut lp = path;
                lp.push(Condition {
                    feature,
                    threshold,
                    le: true,
                });
                stack.push((right, rp));
                stack.push((left, lp));
            }
        }
    }
    let (_, path, counts) = best.expect("a tree has at least one leaf");
    (path, counts)
}
