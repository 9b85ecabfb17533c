//! Sequential minimal optimization for the C-SVM dual.
//!
//! Solves `min 1/2 a'Qa - e'a` subject to `0 <= a_i <= C` and `y'a = 0`, with
//! `Q_ij = y_i y_j K_ij`. Each iteration updates a two-element working set:
//! the maximal violating index `i` and the partner `j` that maximizes the
//! second-order decrease of the objective.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Matrix;

const TAU: f64 = 1e-12;

/// Source of kernel values for the solver.
pub trait KernelSource {
    fn size(&self) -> usize;
    fn diag(&self, i: usize) -> f64;
    /// Full kernel row `K(i, .)`.
    fn row(&mut self, i: usize) -> &[f64];
}

/// A precomputed Gram matrix.
pub struct PrecomputedKernel<'a>(pub &'a Matrix);

impl KernelSource for PrecomputedKernel<'_> {
    fn size(&self) -> usize {
        self.0.rows()
    }

    fn diag(&self, i: usize) -> f64 {
        self.0[(i, i)]
    }

    fn row(&mut self, i: usize) -> &[f64] {
        self.0.row(i)
    }
}

/// Gaussian RBF kernel over row-major points with an LRU row cache.
pub struct RbfKernelCache<'a> {
    points: &'a [f64],
    dim: usize,
    n: usize,
    gamma: f64,
    rows: Vec<Option<Box<[f64]>>>,
    last_used: Vec<u64>,
    cached: Vec<usize>,
    capacity: usize,
    clock: u64,
}

impl<'a> RbfKernelCache<'a> {
    pub fn new(points: &'a [f64], dim: usize, gamma: f64, cache_bytes: usize) -> Self {
        let n = points.len().checked_div(dim).unwrap_or(0);
        let per_row = (n * std::mem::size_of::<f64>()).max(1);
        RbfKernelCache {
            points,
            dim,
            n,
            gamma,
            rows: vec![None; n],
            last_used: vec![0; n],
            cached: Vec::new(),
            capacity: (cache_bytes / per_row).max(2),
            clock: 0,
        }
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }
}

/// `exp(-gamma * |a - b|^2)`.
#[inline]
pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

impl KernelSource for RbfKernelCache<'_> {
    fn size(&self) -> usize {
        self.n
    }

    fn diag(&self, _i: usize) -> f64 {
        1.0
    }

    fn row(&mut self, i: usize) -> &[f64] {
        self.clock += 1;
        self.last_used[i] = self.clock;
        if self.rows[i].is_none() {
            if self.cached.len() >= self.capacity {
                let (pos, _) = self
                    .cached
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &r)| self.last_used[r])
                    .expect("cache is non-empty");
                let victim = self.cached.swap_remove(pos);
                self.rows[victim] = None;
            }
            let xi = self.point(i);
            let row: Box<[f64]> = (0..self.n).map(|t| rbf(xi, self.point(t), self.gamma)).collect();
            self.rows[i] = Some(row);
            self.cached.push(i);
        }
        self.rows[i].as_deref().expect("row was just filled")
    }
}

/// Solution of the dual problem. The decision function is
/// `f(x) = sum_i alphas[i] * y[i] * K(x_i, x) + bias`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoSolution {
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SmoConfig {
    pub c: f64,
    pub tol: f64,
    /// Iteration budget is `max_passes * n`.
    pub max_passes: usize,
}

impl Default for SmoConfig {
    fn default() -> Self {
        SmoConfig {
            c: 1.0,
            tol: 1e-3,
            max_passes: 100,
        }
    }
}

/// Trains on a precomputed Gram matrix.
pub fn smo_train(kernel_gram: &Matrix, y: &[f64], c: f64, tol: f64, max_passes: usize) -> Result<SmoSolution> {
    if !kernel_gram.is_symmetric(1e-9) {
        return Err(Error::numeric("Gram matrix is not symmetric"));
    }
    smo_solve(&mut PrecomputedKernel(kernel_gram), y, SmoConfig { c, tol, max_passes })
}

/// Trains against any kernel source.
pub fn smo_solve<K: KernelSource>(kernel: &mut K, y: &[f64], cfg: SmoConfig) -> Result<SmoSolution> {
    let n = kernel.size();
    if y.len() != n {
        return Err(Error::numeric(format!("{} labels for {n} kernel rows", y.len())));
    }
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::numeric("SMO labels must be +1 or -1"));
    }
    if !(cfg.c > 0.0) || !(cfg.tol > 0.0) {
        return Err(Error::numeric("SMO needs C > 0 and tol > 0"));
    }
    let c = cfg.c;
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let qd: Vec<f64> = (0..n).map(|i| kernel.diag(i)).collect();

    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;
    let max_iter = cfg.max_passes.saturating_mul(n.max(1));
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        // maximal violating i in I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let in_up = if y[t] > 0.0 { !upper(alpha[t]) } else { !lower(alpha[t]) };
            if in_up && v >= gmax {
                gmax = v;
                i_sel = t;
            }
        }
        if i_sel == usize::MAX {
            converged = true;
            break;
        }
        let i = i_sel;
        let (j, gmax2) = {
            let ki = kernel.row(i);
            let mut gmax2 = f64::NEG_INFINITY;
            let mut best = f64::INFINITY;
            let mut j_sel = usize::MAX;
            for t in 0..n {
                let in_low = if y[t] > 0.0 { !lower(alpha[t]) } else { !upper(alpha[t]) };
                if !in_low {
                    continue;
                }
                let v = y[t] * grad[t];
                if v >= gmax2 {
                    gmax2 = v;
                }
                let grad_diff = gmax + v;
                if grad_diff > 0.0 {
                    let mut quad = qd[i] + qd[t] - 2.0 * ki[t];
                    if quad <= 0.0 {
                        quad = TAU;
                    }
                    let obj = -(grad_diff * grad_diff) / quad;
                    if obj <= best {
                        best = obj;
                        j_sel = t;
                    }
                }
            }
            (j_sel, gmax2)
        };
        if gmax + gmax2 < cfg.tol || j == usize::MAX {
            converged = true;
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        {
            let ki = kernel.row(i);
            let kij = ki[j];
            if y[i] != y[j] {
                let mut quad = qd[i] + qd[j] - 2.0 * kij;
                if quad <= 0.0 {
                    quad = TAU;
                }
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = alpha[i] - alpha[j];
                alpha[i] += delta;
                alpha[j] += delta;
                if diff > 0.0 {
                    if alpha[j] < 0.0 {
                        alpha[j] = 0.0;
                        alpha[i] = diff;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
                if diff > 0.0 {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = c - diff;
                    }
                } else if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            } else {
                let mut quad = qd[i] + qd[j] - 2.0 * kij;
                if quad <= 0.0 {
                    quad = TAU;
                }
                let delta = (grad[i] - grad[j]) / quad;
                let sum = alpha[i] + alpha[j];
                alpha[i] -= delta;
                alpha[j] += delta;
                if sum > c {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = sum - c;
                    }
                } else if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if sum > c {
                    if alpha[j] > c {
                        alpha[j] = c;
                        alpha[i] = sum - c;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
            let dai = alpha[i] - old_i;
            if dai != 0.0 {
                let s = y[i] * dai;
                for (t, g) in grad.iter_mut().enumerate() {
                    *g += y[t] * s * ki[t];
                }
            }
        }
        let daj = alpha[j] - old_j;
        if daj != 0.0 {
            let kj = kernel.row(j);
            let s = y[j] * daj;
            for (t, g) in grad.iter_mut().enumerate() {
                *g += y[t] * s * kj[t];
            }
        }
    }

    let bias = -compute_rho(&alpha, &grad, y, c);
    Ok(SmoSolution {
        alphas: alpha,
        bias,
        iterations,
        converged,
    })
}

fn compute_rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free = 0usize;
    let mut sum_free = 0.0;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    if free > 0 {
        sum_free / free as f64
    } else {
        match (ub.is_finite(), lb.is_finite()) {
            (true, true) => 0.5 * (ub + lb),
            (true, false) => ub,
            (false, true) => lb,
            (false, false) => 0.0,
        }
    }
}

/// Dual objective `sum a - 1/2 a'Qa` (the maximization form).
pub fn dual_objective(gram: &Matrix, y: &[f64], alphas: &[f64]) -> f64 {
    let n = alphas.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alphas[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            quad += alphas[i] * alphas[j] * y[i] * y[j] * gram[(i, j)];
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

/// Largest KKT violation of a solution on its training Gram matrix.
pub fn kkt_violation(gram: &Matrix, y: &[f64], sol: &SmoSolution, c: f64) -> f64 {
    let n = y.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let f: f64 = (0..n).map(|j| sol.alphas[j] * y[j] * gram[(i, j)]).sum::<f64>() + sol.bias;
        let margin = y[i] * f;
        let a = sol.alphas[i];
        let v = if a <= 0.0 {
            (1.0 - margin).max(0.0)
        } else if a >= c {
            (margin - 1.0).max(0.0)
        } else {
            (margin - 1.0).abs()
        };
        worst = worst.max(v);
    }
    worst
}
