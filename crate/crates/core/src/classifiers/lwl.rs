use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::samples::Samples;
use super::stump::{best_stump, SortedColumns};
use super::ClassDistribution;

/// Locally weighted learning with a decision stump as the local model.
///
/// Each query weights the stored instances by `max(0, 1 - d / d_max)`, where
/// `d_max` is the distance to the `neighbors`-th nearest instance (all
/// instances when `neighbors` is 0), then fits a weighted stump.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lwl {
    pub neighbors: usize,
    pub dim: usize,
    pub points: Vec<f64>,
    pub labels: Vec<u8>,
    #[serde(skip)]
    cache: OnceLock<Prepared>,
}

#[derive(Debug, Clone)]
struct Prepared {
    cols: Vec<Vec<f64>>,
    sorted: SortedColumns,
}

impl Lwl {
    pub(crate) fn fit(s: Samples, neighbors: usize) -> Self {
        Lwl {
            neighbors,
            dim: s.d,
            points: s.x,
            labels: s.y,
            cache: OnceLock::new(),
        }
    }

    pub(crate) fn parameter_count(&self) -> usize {
        self.points.len() + self.labels.len()
    }

    fn prepared(&self) -> &Prepared {
        self.cache.get_or_init(|| {
            let s = Samples {
                x: self.points.clone(),
                y: self.labels.clone(),
                d: self.dim,
            };
            Prepared {
                cols: (0..self.dim).map(|a| s.column(a)).collect(),
                sorted: SortedColumns::new(&s),
            }
        })
    }

    /// Instance weights for a query.
    pub fn weights(&self, x: &[f64]) -> Vec<f64> {
        let n = self.labels.len();
        let p = self.prepared();
        let mut dist = vec![0.0; n];
        for (a, col) in p.cols.iter().enumerate() {
            let q = x[a];
            for (t, v) in dist.iter_mut().zip(col) {
                *t += (v - q) * (v - q);
            }
        }
        dist.iter_mut().for_each(|t| *t = t.sqrt());
        let d_max = if self.neighbors == 0 || self.neighbors >= n {
            dist.iter().copied().fold(0.0, f64::max)
        } else {
            let mut tmp = dist.clone();
            let (_, kth, _) = tmp.select_nth_unstable_by(self.neighbors - 1, f64::total_cmp);
            *kth
        };
        if d_max > 0.0 {
            let inv = 1.0 / d_max;
            dist.iter_mut().for_each(|t| *t = (1.0 - *t * inv).max(0.0));
        } else {
            dist.iter_mut().for_each(|t| *t = 1.0);
        }
        dist
    }

    pub(crate) fn dist(&self, x: &[f64]) -> ClassDistribution {
        if self.labels.is_empty() {
            return ClassDistribution::UNIFORM;
        }
        let w = self.weights(x);
        if !w.iter().any(|&v| v > 0.0) {
            let mut c = [0.0; 2];
            for &l in &self.labels {
                c[l as usize] += 1.0;
            }
            return ClassDistribution::from_scores(c[0], c[1]);
        }
        let pairs: Vec<[f64; 2]> = w
            .iter()
            .zip(&self.labels)
            .map(|(&w, &y)| if y == 0 { [w, 0.0] } else { [0.0, w] })
            .collect();
        best_stump(&self.prepared().sorted, &pairs).dist(x)
    }
}
