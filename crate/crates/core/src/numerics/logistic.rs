use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Result of [`fit_logistic`]. `weights` holds one coefficient per column
/// followed by the intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub weights: Vec<f64>,
    pub loss: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl LogisticFit {
    pub fn probability(&self, row: &[f64]) -> f64 {
        logistic_probability(&self.weights, row)
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
#[inline]
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[inline]
fn linear(weights: &[f64], row: &[f64]) -> f64 {
    let d = row.len();
    weights[d] + row.iter().zip(&weights[..d]).map(|(x, w)| x * w).sum::<f64>()
}

/// P(y = 1 | row) under the given weights (intercept last).
#[inline]
pub fn logistic_probability(weights: &[f64], row: &[f64]) -> f64 {
    sigmoid(linear(weights, row))
}

/// Mean negative log-likelihood plus `l2/2 * |w|^2` (intercept excluded).
pub fn logistic_loss(x: &Matrix, y: &[u8], weights: &[f64], l2: f64) -> f64 {
    let n = x.rows() as f64;
    let mut nll = 0.0;
    for (i, &yi) in y.iter().enumerate().take(x.rows()) {
        let z = linear(weights, x.row(i));
        nll += softplus(z) - f64::from(yi) * z;
    }
    let d = x.cols();
    let penalty: f64 = weights[..d].iter().map(|w| w * w).sum();
    nll / n + 0.5 * l2 * penalty
}

/// Loss and its analytic gradient.
pub fn logistic_loss_grad(x: &Matrix, y: &[u8], weights: &[f64], l2: f64) -> (f64, Vec<f64>) {
    let (n, d) = (x.rows(), x.cols());
    let mut grad = vec![0.0; d + 1];
    let mut nll = 0.0;
    for (i, &label) in y.iter().enumerate().take(n) {
        let row = x.row(i);
        let z = linear(weights, row);
        let yi = f64::from(label);
        nll += softplus(z) - yi * z;
        let r = sigmoid(z) - yi;
        for (g, xv) in grad[..d].iter_mut().zip(row) {
            *g += r * xv;
        }
        grad[d] += r;
    }
    let inv_n = 1.0 / n as f64;
    grad.iter_mut().for_each(|g| *g *= inv_n);
    let mut penalty = 0.0;
    for j in 0..d {
        grad[j] += l2 * weights[j];
        penalty += weights[j] * weights[j];
    }
    (nll * inv_n + 0.5 * l2 * penalty, grad)
}

/// L2-regularized logistic regression by gradient descent with step halving.
///
/// Starts from zero weights. Each iteration halves the step until the loss
/// satisfies an Armijo decrease (so accepted losses never increase), then
/// doubles it for the next iteration. Stops when `|grad|_inf <= tol` or after
/// `max_iter` iterations.
pub fn fit_logistic(x: &Matrix, y: &[u8], l2: f64, max_iter: usize, tol: f64) -> Result<LogisticFit> {
    if x.rows() == 0 {
        return Err(Error::numeric("logistic fit on empty data"));
    }
    if y.len() != x.rows() {
        return Err(Error::numeric("label count does not match rows"));
    }
    let d = x.cols();
    let mut w = vec![0.0; d + 1];
    let (mut loss, mut grad) = logistic_loss_grad(x, y, &w, l2);
    if !loss.is_finite() {
        return Err(Error::numeric("non-finite logistic loss"));
    }
    let mut step = 1.0;
    let mut trial = vec![0.0; d + 1];
    for it in 0..max_iter {
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax <= tol {
            return Ok(LogisticFit {
                weights: w,
                loss,
                iterations: it,
                converged: true,
            });
        }
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        let mut accepted = false;
        for _ in 0..60 {
            for ((t, wv), g) in trial.iter_mut().zip(&w).zip(&grad) {
                *t = wv - step * g;
            }
            let l = logistic_loss(x, y, &trial, l2);
            if l.is_finite() && l <= loss - 1e-4 * step * gnorm2 {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // step underflowed: we are at numerical precision
            return Ok(LogisticFit {
                weights: w,
                loss,
                iterations: it,
                converged: false,
            });
        }
        std::mem::swap(&mut w, &mut trial);
        let (l, g) = logistic_loss_grad(x, y, &w, l2);
        if !l.is_finite() {
            return Err(Error::numeric("non-finite logistic loss"));
        }
        loss = l;
        grad = g;
        step = (step * 2.0).min(1e4);
    }
    let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    Ok(LogisticFit {
        weights: w,
        loss,
        iterations: max_iter,
        converged: gmax <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_data_gives_half() {
        let x = Matrix::from_rows(&[[-1.0], [1.0], [-1.0], [1.0]]).unwrap();
        let fit = fit_logistic(&x, &[0, 0, 1, 1], 0.0, 100, 1e-9).unwrap();
        assert!(fit.converged);
        assert_eq!(fit.weights, vec![0.0, 0.0]);
        assert_eq!(fit.probability(&[3.0]), 0.5);
    }

    #[test]
    fn separable_data_is_fit_with_finite_weights() {
        let x = Matrix::from_rows(&[[0.0], [0.1], [0.2], [0.8], [0.9], [1.0]]).unwrap();
        let y = [0, 0, 0, 1, 1, 1];
        let fit = fit_logistic(&x, &y, 0.1, 5000, 1e-8).unwrap();
        assert!(fit.weights.iter().all(|w| w.is_finite()));
        let correct = (0..6)
            .filter(|&i| u8::from(fit.probability(x.row(i)) > 0.5) == y[i])
            .count();
        assert_eq!(correct, 6);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(fit_logistic(&Matrix::zeros(0, 2), &[], 0.0, 10, 1e-6).is_err());
    }

    #[test]
    fn non_finite_input_is_an_error() {
        let x = Matrix::from_rows(&[[f64::NAN], [1.0]]).unwrap();
        assert!(fit_logistic(&x, &[0, 1], 0.0, 10, 1e-6).is_err());
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert!((softplus(-800.0)).abs() < 1e-300);
        assert_eq!(softplus(800.0), 800.0);
    }
}
