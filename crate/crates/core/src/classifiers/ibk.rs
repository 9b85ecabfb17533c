use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::samples::Samples;
use super::ClassDistribution;

const BUCKET: usize = 12;

/// k-nearest-neighbor classifier over stored scaled instances. Distance ties
/// resolve to the earliest stored index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ibk {
    pub k: usize,
    pub dim: usize,
    pub points: Vec<f64>,
    pub labels: Vec<u8>,
    #[serde(skip)]
    index: OnceLock<KdTree>,
}

impl Ibk {
    pub(crate) fn fit(s: Samples, k: usize) -> Self {
        Ibk {
            k,
            dim: s.d,
            points: s.x,
            labels: s.y,
            index: OnceLock::new(),
        }
    }

    pub(crate) fn parameter_count(&self) -> usize {
        self.points.len() + self.labels.len()
    }

    fn tree(&self) -> &KdTree {
        self.index.get_or_init(|| KdTree::build(&self.points, self.dim))
    }

    /// Indices of the `k` nearest stored instances ordered by (distance, index).
    pub fn neighbors(&self, x: &[f64]) -> Vec<usize> {
        let n = self.labels.len();
        let mut best = Best::new(self.k.min(n));
        self.tree().search(&self.points, self.dim, x, &mut best);
        best.items.into_iter().map(|(_, i)| i).collect()
    }

    pub(crate) fn dist(&self, x: &[f64]) -> ClassDistribution {
        let nb = self.neighbors(x);
        let mut votes = [0.0; 2];
        for i in nb {
            votes[self.labels[i] as usize] += 1.0;
        }
        ClassDistribution::from_scores(votes[0], votes[1])
    }
}

/// Sorted list of the best `(squared distance, index)` pairs.
struct Best {
    cap: usize,
    items: Vec<(f64, usize)>,
}

impl Best {
    fn new(cap: usize) -> Self {
        Best {
            cap,
            items: Vec::with_capacity(cap + 1),
        }
    }

    #[inline]
    fn bound(&self) -> f64 {
        if self.items.len() < self.cap {
            f64::INFINITY
        } else {
            self.items[self.items.len() - 1].0
        }
    }

    #[inline]
    fn offer(&mut self, d2: f64, i: usize) {
        if self.items.len() == self.cap {
            let (wd, wi) = self.items[self.cap - 1];
            if d2 > wd || (d2 == wd && i > wi) {
                return;
            }
        }
        let pos = self.items.partition_point(|&(d, j)| d < d2 || (d == d2 && j < i));
        self.items.insert(pos, (d2, i));
        self.items.truncate(self.cap);
    }
}

#[derive(Debug, Clone)]
enum KdNode {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
struct KdTree {
    nodes: Vec<KdNode>,
    order: Vec<usize>,
}

impl KdTree {
    fn build(points: &[f64], dim: usize) -> KdTree {
        let n = points.len().checked_div(dim).unwrap_or(0);
        let mut tree = KdTree {
            nodes: Vec::new(),
            order: (0..n).collect(),
        };
        if n > 0 {
            tree.build_node(points, dim, 0, n);
        }
        tree
    }

    fn build_node(&mut self, points: &[f64], dim: usize, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(KdNode::Leaf { start, end });
        if end - start <= BUCKET || dim == 0 {
            return id;
        }
        // split on the widest axis at the median
        let slice = &mut self.order[start..end];
        let mut axis = 0;
        let mut widest = -1.0;
        for a in 0..dim {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &i in slice.iter() {
                let v = points[i * dim + a];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi - lo > widest {
                widest = hi - lo;
                axis = a;
            }
        }
        if widest <= 0.0 {
            return id;
        }
        let mid = slice.len() / 2;
        slice.select_nth_unstable_by(mid, |&a, &b| points[a * dim + axis].total_cmp(&points[b * dim + axis]));
        let value = points[slice[mid] * dim + axis];
        let left = self.build_node(points, dim, start, start + mid);
        let right = self.build_node(points, dim, start + mid, end);
        self.nodes[id] = KdNode::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    fn search(&self, points: &[f64], dim: usize, q: &[f64], best: &mut Best) {
        if self.nodes.is_empty() || best.cap == 0 {
            return;
        }
        self.visit(0, points, dim, q, best);
    }

    fn visit(&self, node: usize, points: &[f64], dim: usize, q: &[f64], best: &mut Best) {
        match self.nodes[node] {
            KdNode::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let p = &points[i * dim..(i + 1) * dim];
                    let d2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                    best.offer(d2, i);
                }
            }
            KdNode::Split {
                axis,
                value,
                left,
                right,
            } => {
                // left holds values <= value, right holds values >= value
                let diff = q[axis] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.visit(near, points, dim, q, best);
                if diff * diff <= best.bound() {
                    self.visit(far, points, dim, q, best);
                }
            }
        }
    }
}
