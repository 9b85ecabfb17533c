use serde::{Deserialize, Serialize};

use super::params::SvmConfig;
use super::samples::Samples;
use super::ClassDistribution;
use crate::error::Result;
use crate::numerics::fastexp;
use crate::numerics::smo::{smo_solve, RbfKernelCache, SmoConfig};

/// Solver budget is `MAX_PASSES * n` working-set updates.
const MAX_PASSES: usize = 100;
const KERNEL_CACHE_BYTES: usize = 256 << 20;
/// Multipliers at or below this are not support vectors.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;
/// Slope of the logistic link from decision value to probability.
const LINK_SLOPE: f64 = 2.0;

/// RBF-kernel C-SVM. Only support vectors are stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Svm {
    pub gamma: f64,
    pub dim: usize,
    /// Row-major support vectors.
    pub support: Vec<f64>,
    /// `alpha_i * y_i` per support vector.
    pub coef: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
}

impl Svm {
    pub(crate) fn fit(s: &Samples, cfg: &SvmConfig) -> Result<Self> {
        let y: Vec<f64> = s.y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
        let mut kernel = RbfKernelCache::new(&s.x, s.d, cfg.gamma, KERNEL_CACHE_BYTES);
        let sol = smo_solve(
            &mut kernel,
            &y,
            SmoConfig {
                c: cfg.c,
                tol: cfg.tolerance,
                max_passes: MAX_PASSES,
            },
        )?;
        let mut support = Vec::new();
        let mut coef = Vec::new();
        for (i, &a) in sol.alphas.iter().enumerate() {
            if a > SUPPORT_THRESHOLD {
                support.extend_from_slice(s.row(i));
                coef.push(a * y[i]);
            }
        }
        Ok(Svm {
            gamma: cfg.gamma,
            dim: s.d,
            support,
            coef,
            bias: sol.bias,
            converged: sol.converged,
        })
    }

    pub fn n_support(&self) -> usize {
        self.coef.len()
    }

    /// `sum_i coef_i K(sv_i, x) + bias`.
    pub fn decision(&self, x: &[f64]) -> f64 {
        let mut f = self.bias;
        for (sv, c) in self.support.chunks_exact(self.dim.max(1)).zip(&self.coef) {
            let d2: f64 = sv.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            f += c * fastexp::exp(-self.gamma * d2);
        }
        f
    }

    pub(crate) fn dist(&self, x: &[f64]) -> ClassDistribution {
        ClassDistribution::from_unsafe(crate::numerics::sigmoid(LINK_SLOPE * self.decision(x)))
    }

    pub(crate) fn parameter_count(&self) -> usize {
        self.support.len() + self.coef.len() + 2
    }
}
