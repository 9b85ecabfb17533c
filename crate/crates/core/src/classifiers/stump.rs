use serde::{Deserialize, Serialize};

use super::samples::Samples;
use super::ClassDistribution;
use crate::error::{Error, Result};

/// One-split tree minimizing weighted misclassification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    /// `None` when no feature has two distinct values.
    pub feature: Option<usize>,
    pub threshold: f64,
    pub left: ClassDistribution,
    pub right: ClassDistribution,
    /// Weighted training error of the chosen split.
    pub error: f64,
}

impl Stump {
    pub(crate) fn fit(s: &Samples, weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::data("stump weights must be finite and non-negative"));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::data("stump weights are all zero"));
        }
        let sorted = SortedColumns::new(s);
        let pairs: Vec<[f64; 2]> = weights
            .iter()
            .zip(&s.y)
            .map(|(&w, &y)| if y == 0 { [w, 0.0] } else { [0.0, w] })
            .collect();
        Ok(best_stump(&sorted, &pairs))
    }

    #[inline]
    pub fn goes_left(&self, x: &[f64]) -> bool {
        match self.feature {
            Some(f) => x[f] <= self.threshold,
            None => true,
        }
    }

    pub(crate) fn dist(&self, x: &[f64]) -> ClassDistribution {
        if self.goes_left(x) {
            self.left
        } else {
            self.right
        }
    }
}

/// Per-feature sort orders and sorted values of a sample.
#[derive(Debug, Clone)]
pub(crate) struct SortedColumns {
    pub orders: Vec<Vec<u32>>,
    pub values: Vec<Vec<f64>>,
}

impl SortedColumns {
    pub fn new(s: &Samples) -> Self {
        let n = s.n();
        let mut orders = Vec::with_capacity(s.d);
        let mut values = Vec::with_capacity(s.d);
        for j in 0..s.d {
            let mut ord: Vec<u32> = (0..n as u32).collect();
            ord.sort_by(|&a, &b| {
                s.value(a as usize, j)
                    .total_cmp(&s.value(b as usize, j))
                    .then(a.cmp(&b))
            });
            values.push(ord.iter().map(|&i| s.value(i as usize, j)).collect());
            orders.push(ord);
        }
        SortedColumns { orders, values }
    }
}

/// Midpoint that stays strictly below `hi`.
#[inline]
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = 0.5 * (lo + hi);
    if m < hi {
        m
    } else {
        lo
    }
}

fn side_error(c: [f64; 2]) -> f64 {
    c[0].min(c[1])
}

/// Best split given per-instance class weights `pairs[i] = [w_i if y_i = 0,
/// w_i if y_i = 1]`. Candidates are visited in (feature, threshold) order and
/// only a strictly smaller error (beyond a relative tolerance) replaces the
/// incumbent, so ties keep the lowest feature and threshold.
pub(crate) fn best_stump(sorted: &SortedColumns, pairs: &[[f64; 2]]) -> Stump {
    let mut total = [0.0; 2];
    for p in pairs {
        total[0] += p[0];
        total[1] += p[1];
    }
    let eps = 1e-10 * (total[0] + total[1]);
    let overall = ClassDistribution::from_scores(total[0], total[1]);
    let mut best: Option<(usize, f64, [f64; 2], f64)> = None;
    let n = pairs.len();
    for (f, (ord, vals)) in sorted.orders.iter().zip(&sorted.values).enumerate() {
        let mut left = [0.0; 2];
        for p in 0..n.saturating_sub(1) {
            let w = pairs[ord[p] as usize];
            left[0] += w[0];
            left[1] += w[1];
            if vals[p] < vals[p + 1] {
                let right = [total[0] - left[0], total[1] - left[1]];
                let err = side_error(left) + side_error(right);
                if best.is_none_or(|b| err < b.3 - eps) {
                    let thr = midpoint(vals[p], vals[p + 1]);
                    best = Some((f, thr, left, err));
                }
            }
        }
    }
    match best {
        None => Stump {
            feature: None,
            threshold: 0.0,
            left: overall,
            right: overall,
            error: side_error(total),
        },
        Some((f, thr, left, err)) => {
            let right = [total[0] - left[0], total[1] - left[1]];
            let side = |c: [f64; 2]| {
                if c[0] + c[1] > 0.0 {
                    ClassDistribution::from_scores(c[0], c[1])
                } else {
                    overall
                }
            };
            Stump {
                feature: Some(f),
                threshold: thr,
                left: side(left),
                right: side(right),
                error: err,
            }
        }
    }
}
