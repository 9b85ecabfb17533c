use serde::{Deserialize, Serialize};

use super::params::RbfConfig;
use super::samples::Samples;
use super::ClassDistribution;
use crate::error::Result;
use crate::numerics::rng::{tags, RngStream};
use crate::numerics::{fit_logistic, LogisticFit, Matrix};

const OUTPUT_MAX_ITER: usize = 500;
const OUTPUT_TOL: f64 = 1e-6;

/// Gaussian radial-basis network: k-means centers, per-center widths and a
/// logistic output layer over the activations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rbf {
    pub centers: Vec<Vec<f64>>,
    pub widths: Vec<f64>,
    pub output: LogisticFit,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd iterations from seeded distinct starting rows. An empty cluster is
/// re-seeded at the point farthest from its current center.
pub(crate) fn kmeans(s: &Samples, k: usize, iterations: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    let n = s.n();
    let k = k.min(n);
    let mut centers: Vec<Vec<f64>> = rng
        .sample_indices(n, k)
        .into_iter()
        .map(|i| s.row(i).to_vec())
        .collect();
    let mut assign = vec![usize::MAX; n];
    for _ in 0..iterations {
        let mut changed = false;
        let mut dist = vec![0.0; n];
        for i in 0..n {
            let x = s.row(i);
            let (mut best, mut bd) = (0, f64::INFINITY);
            for (c, center) in centers.iter().enumerate() {
                let d = sq_dist(x, center);
                if d < bd {
                    bd = d;
                    best = c;
                }
            }
            dist[i] = bd;
            if assign[i] != best {
                assign[i] = best;
                changed = true;
            }
        }
        let mut sums = vec![vec![0.0; s.d]; k];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[assign[i]] += 1;
            for (acc, v) in sums[assign[i]].iter_mut().zip(s.row(i)) {
                *acc += v;
            }
        }
        let mut taken = vec![false; n];
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|v| v / counts[c] as f64).collect();
            } else {
                let far = (0..n)
                    .filter(|&i| !taken[i])
                    .fold(None, |acc: Option<usize>, i| match acc {
                        Some(j) if dist[j] >= dist[i] => Some(j),
                        _ => Some(i),
                    });
                if let Some(i) = far {
                    taken[i] = true;
                    centers[c] = s.row(i).to_vec();
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    centers
}

impl Rbf {
    pub(crate) fn fit(s: &Samples, cfg: &RbfConfig, rng: &mut RngStream) -> Result<Self> {
        let mut km_rng = rng.child(tags::KMEANS);
        let centers = kmeans(s, cfg.centers, cfg.kmeans_iterations, &mut km_rng);
        let widths = center_widths(&centers);
        let mut model = Rbf {
            centers,
            widths,
            output: LogisticFit {
                weights: Vec::new(),
                loss: 0.0,
                iterations: 0,
                converged: false,
            },
        };
        let k = model.centers.len();
        let mut phi = Vec::with_capacity(s.n() * k);
        for i in 0..s.n() {
            phi.extend(model.activations(s.row(i)));
        }
        let phi = Matrix::from_vec(s.n(), k, phi)?;
        model.output = fit_logistic(&phi, &s.y, cfg.ridge, OUTPUT_MAX_ITER, OUTPUT_TOL)?;
        Ok(model)
    }

    /// `exp(-|x - c|^2 / (2 w_c^2))` for every center.
    pub fn activations(&self, x: &[f64]) -> Vec<f64> {
        self.centers
            .iter()
            .zip(&self.widths)
            .map(|(c, w)| (-sq_dist(x, c) / (2.0 * w * w)).exp())
            .collect()
    }

    pub(crate) fn dist(&self, x: &[f64]) -> ClassDistribution {
        ClassDistribution::from_unsafe(self.output.probability(&self.activations(x)))
    }

    pub(crate) fn parameter_count(&self) -> usize {
        self.centers.iter().map(Vec::len).sum::<usize>() + self.widths.len() + self.output.weights.len()
    }
}

/// Mean distance from each center to the others; 1.0 for a lone center or a
/// zero mean.
fn center_widths(centers: &[Vec<f64>]) -> Vec<f64> {
    let k = centers.len();
    (0..k)
        .map(|c| {
            if k < 2 {
                return 1.0;
            }
            let mean = (0..k)
                .filter(|&o| o != c)
                .map(|o| sq_dist(&centers[c], &centers[o]).sqrt())
                .sum::<f64>()
                / (k - 1) as f64;
            if mean > 0.0 {
                mean
            } else {
                1.0
            }
        })
        .collect()
}
