use serde::{Deserialize, Serialize};

use super::samples::Samples;
use super::ClassDistribution;

/// Gaussian naive Bayes with Laplace-smoothed priors and a variance floor.
/// A class absent from training receives posterior 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    pub priors: [f64; 2],
    pub present: [bool; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
}

impl NaiveBayes {
    pub(crate) fn fit_all(s: &Samples, floor: f64) -> Self {
        let idx: Vec<usize> = (0..s.n()).collect();
        NaiveBayes::fit(s, &idx, floor)
    }

    /// Maximum-likelihood estimates on the rows `idx`.
    pub(crate) fn fit(s: &Samples, idx: &[usize], floor: f64) -> Self {
        let d = s.d;
        let mut count = [0.0f64; 2];
        let mut sum = [vec![0.0; d], vec![0.0; d]];
        for &i in idx {
            let c = s.y[i] as usize;
            count[c] += 1.0;
            for (acc, v) in sum[c].iter_mut().zip(s.row(i)) {
                *acc += v;
            }
        }
        let means: [Vec<f64>; 2] = [0, 1].map(|c| {
            sum[c]
                .iter()
                .map(|v| if count[c] > 0.0 { v / count[c] } else { 0.0 })
                .collect()
        });
        let mut sq = [vec![0.0; d], vec![0.0; d]];
        for &i in idx {
            let c = s.y[i] as usize;
            for ((acc, v), m) in sq[c].iter_mut().zip(s.row(i)).zip(&means[c]) {
                *acc += (v - m) * (v - m);
            }
        }
        let variances: [Vec<f64>; 2] = [0, 1].map(|c| {
            sq[c]
                .iter()
                .map(|v| {
                    if count[c] > 0.0 {
                        (v / count[c]).max(floor)
                    } else {
                        floor
                    }
                })
                .collect()
        });
        let n = count[0] + count[1];
        NaiveBayes {
            priors: [(count[0] + 1.0) / (n + 2.0), (count[1] + 1.0) / (n + 2.0)],
            present: [count[0] > 0.0, count[1] > 0.0],
            means,
            variances,
        }
    }

    /// Unnormalized log joint density of `x` and class `c`.
    pub fn log_joint(&self, x: &[f64], c: usize) -> f64 {
        let mut lp = self.priors[c].ln();
        for ((v, m), var) in x.iter().zip(&self.means[c]).zip(&self.variances[c]) {
            let z = v - m;
            lp -= 0.5 * (std::f64::consts::TAU * var).ln() + z * z / (2.0 * var);
        }
        lp
    }

    pub(crate) fn dist(&self, x: &[f64]) -> ClassDistribution {
        match self.present {
            [true, false] => ClassDistribution::certain(0),
            [false, true] => ClassDistribution::certain(1),
            [false, false] => ClassDistribution::UNIFORM,
            [true, true] => {
                let l0 = self.log_joint(x, 0);
                let l1 = self.log_joint(x, 1);
                // p1 = 1 / (1 + exp(l0 - l1))
                ClassDistribution::from_unsafe(crate::numerics::sigmoid(l1 - l0))
            }
        }
    }

    pub(crate) fn parameter_count(&self) -> usize {
        2 + 2 * (self.means[0].len() + self.variances[0].len())
    }
}
