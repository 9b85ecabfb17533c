//! Binary decision trees over numeric features, shared by the tree learners.

use serde::{Deserialize, Serialize};

use super::samples::Samples;
use super::stump::midpoint;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeKind<L> {
    Leaf(L),
    /// Instances with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node<L> {
    /// Training class counts that reached this node.
    pub counts: [f64; 2],
    pub kind: NodeKind<L>,
}

/// Flat tree with the root at index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree<L> {
    pub nodes: Vec<Node<L>>,
}

impl<L> Tree<L> {
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i].kind {
                NodeKind::Leaf(_) => return i,
                NodeKind::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn leaf(&self, x: &[f64]) -> &L {
        match &self.nodes[self.leaf_index(x)].kind {
            NodeKind::Leaf(l) => l,
            NodeKind::Split { .. } => unreachable!("leaf_index stops at a leaf"),
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Leaf(_)))
            .count()
    }

    pub fn n_splits(&self) -> usize {
        self.nodes.len() - self.n_leaves()
    }

    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, d)) = stack.pop() {
            best = best.max(d);
            if let NodeKind::Split { left, right, .. } = self.nodes[i].kind {
                stack.push((left, d + 1));
                stack.push((right, d + 1));
            }
        }
        best
    }

    /// `(feature, threshold)` of every split in preorder.
    pub fn split_sequence(&self) -> Vec<(usize, f64)> {
        self.preorder()
            .into_iter()
            .filter_map(|i| match self.nodes[i].kind {
                NodeKind::Split { feature, threshold, .. } => Some((feature, threshold)),
                NodeKind::Leaf(_) => None,
            })
            .collect()
    }

    /// Reachable node indices in preorder (left before right).
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            out.push(i);
            if let NodeKind::Split { left, right, .. } = self.nodes[i].kind {
                stack.push(right);
                stack.push(left);
            }
        }
        out
    }

    /// Drops unreachable nodes and renumbers the rest in preorder.
    pub(crate) fn compact(self) -> Tree<L> {
        let order = self.preorder();
        let mut new_id = vec![usize::MAX; self.nodes.len()];
        for (k, &i) in order.iter().enumerate() {
            new_id[i] = k;
        }
        let mut slots: Vec<Option<Node<L>>> = self.nodes.into_iter().map(Some).collect();
        let nodes = order
            .iter()
            .map(|&i| {
                let mut node = slots[i].take().expect("each node is visited once");
                if let NodeKind::Split { left, right, .. } = &mut node.kind {
                    *left = new_id[*left];
                    *right = new_id[*right];
                }
                node
            })
            .collect();
        Tree { nodes }
    }
}

/// Binary entropy in bits of class counts.
#[inline]
pub fn entropy(c: [f64; 2]) -> f64 {
    let n = c[0] + c[1];
    if n <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &k in &c {
        if k > 0.0 {
            let p = k / n;
            h -= p * p.log2();
        }
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Reusable buffer for [`best_split`].
#[derive(Default)]
pub(crate) struct SplitScratch {
    pairs: Vec<(f64, u8)>,
}

/// Highest information-gain midpoint split over `features`, requiring at least
/// `min_leaf` instances per side. Ties keep the earlier feature in `features`
/// and then the lower threshold.
pub(crate) fn best_split(
    s: &Samples,
    idx: &[usize],
    features: &[usize],
    min_leaf: usize,
    scratch: &mut SplitScratch,
) -> Option<Split> {
    let n = idx.len();
    if n < 2 * min_leaf.max(1) {
        return None;
    }
    let parent = s.counts(idx);
    let h_parent = entropy(parent);
    let nf = n as f64;
    let mut best: Option<Split> = None;
    for &f in features {
        let pairs = &mut scratch.pairs;
        pairs.clear();
        pairs.extend(idx.iter().map(|&i| (s.value(i, f), s.y[i])));
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut left = [0.0; 2];
        for p in 0..n - 1 {
            left[pairs[p].1 as usize] += 1.0;
            if p + 1 < min_leaf || n - p - 1 < min_leaf || pairs[p].0 >= pairs[p + 1].0 {
                continue;
            }
            let right = [parent[0] - left[0], parent[1] - left[1]];
            let nl = (p + 1) as f64;
            let gain = h_parent - (nl * entropy(left) + (nf - nl) * entropy(right)) / nf;
            if best.is_none_or(|b| gain > b.gain + 1e-12) {
                best = Some(Split {
                    feature: f,
                    threshold: midpoint(pairs[p].0, pairs[p + 1].0),
                    gain,
                });
            }
        }
    }
    best
}

/// Splits `idx` by a threshold rule.
pub(crate) fn partition(s: &Samples, idx: &[usize], feature: usize, threshold: f64) -> (Vec<usize>, Vec<usize>) {
    idx.iter().partition(|&&i| s.value(i, feature) <= threshold)
}

/// Grows a tree top-down. `choose` decides the split for a node (or `None`
/// for a leaf); `make_leaf` builds the leaf payload.
pub(crate) fn grow<L>(
    s: &Samples,
    root: Vec<usize>,
    mut choose: impl FnMut(&[usize], [f64; 2], usize) -> Result<Option<(usize, f64)>>,
    mut make_leaf: impl FnMut(&[usize], [f64; 2]) -> Result<L>,
) -> Result<Tree<L>> {
    let mut slots: Vec<Option<Node<L>>> = vec![None];
    let mut stack = vec![(0usize, root, 0usize)];
    while let Some((slot, idx, depth)) = stack.pop() {
        let counts = s.counts(&idx);
        let decision = choose(&idx, counts, depth)?;
        let split = decision.and_then(|(f, thr)| {
            let (l, r) = partition(s, &idx, f, thr);
            (!l.is_empty() && !r.is_empty()).then_some((f, thr, l, r))
        });
        match split {
            Some((feature, threshold, l, r)) => {
                let left = slots.len();
                let right = left + 1;
                slots.push(None);
                slots.push(None);
                slots[slot] = Some(Node {
                    counts,
                    kind: NodeKind::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    },
                });
                stack.push((right, r, depth + 1));
                stack.push((left, l, depth + 1));
            }
            None => {
                slots[slot] = Some(Node {
                    counts,
                    kind: NodeKind::Leaf(make_leaf(&idx, counts)?),
                });
            }
        }
    }
    let nodes = slots
        .into_iter()
        .map(|n| n.expect("every allocated slot is filled"))
        .collect();
    Ok(Tree { nodes }.compact())
}
