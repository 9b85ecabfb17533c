use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::samples::Samples;
use super::ClassDistribution;
use crate::numerics::fastexp::exp;

/// Attributes with more stored values than this are summarized by equal-count
/// chunks when solving for the per-query scale.
const SKETCH_SIZE: usize = 128;
const MAX_SCALE_ITERS: usize = 64;

/// Entropic-distance lazy learner.
///
/// For each query and attribute a Laplace kernel `exp(-|v - q| / s)` is used,
/// with `s` chosen so that the kernel mass over the stored values equals
/// `max(blend * n, 1)`. Class scores sum the product kernels over the stored
/// instances of each class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KStar {
    pub blend: f64,
    pub dim: usize,
    pub points: Vec<f64>,
    pub labels: Vec<u8>,
    #[serde(skip)]
    cache: OnceLock<Columns>,
}

#[derive(Debug, Clone)]
struct Columns {
    cols: Vec<Vec<f64>>,
    spread: Vec<f64>,
    sketch: Vec<(Vec<f64>, Vec<f64>)>,
}

impl KStar {
    pub(crate) fn fit(s: Samples, blend: f64) -> Self {
        KStar {
            blend,
            dim: s.d,
            points: s.x,
            labels: s.y,
            cache: OnceLock::new(),
        }
    }

    pub(crate) fn parameter_count(&self) -> usize {
        self.points.len() + self.labels.len()
    }

    fn columns(&self) -> &Columns {
        self.cache.get_or_init(|| {
            let n = self.labels.len();
            let cols: Vec<Vec<f64>> = (0..self.dim)
                .map(|a| (0..n).map(|i| self.points[i * self.dim + a]).collect())
                .collect();
            let spread = cols
                .iter()
                .map(|c| {
                    let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    hi - lo
                })
                .collect();
            let sketch = cols.iter().map(|c| sketch(c)).collect();
            Columns { cols, spread, sketch }
        })
    }

    /// Per-attribute scales for a query; `None` marks a skipped attribute.
    pub fn scales(&self, x: &[f64]) -> Vec<Option<f64>> {
        let c = self.columns();
        let target = (self.blend * self.labels.len() as f64).max(1.0);
        (0..self.dim)
            .map(|a| {
                if c.spread[a] > 0.0 {
                    let (v, w) = &c.sketch[a];
                    Some(kstar_scale(v, w, x[a], target, c.spread[a]))
                } else {
                    None
                }
            })
            .collect()
    }

    pub(crate) fn dist(&self, x: &[f64]) -> ClassDistribution {
        let n = self.labels.len();
        if n == 0 {
            return ClassDistribution::UNIFORM;
        }
        let c = self.columns();
        let scales = self.scales(x);
        let mut acc = vec![0.0; n];
        for (a, s) in scales.iter().enumerate() {
            if let Some(s) = s {
                let inv = 1.0 / s;
                let q = x[a];
                for (t, v) in acc.iter_mut().zip(&c.cols[a]) {
                    *t += (v - q).abs() * inv;
                }
            }
        }
        let m = acc.iter().copied().fold(f64::INFINITY, f64::min);
        let mut score = [0.0; 2];
        for (t, &l) in acc.iter().zip(&self.labels) {
            let p = exp(m - t);
            if l == 0 {
                score[0] += p;
            } else {
                score[1] += p;
            }
        }
        ClassDistribution::from_scores(score[0], score[1])
    }
}

/// Representative values with multiplicities summarizing a column.
fn sketch(col: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = col.len();
    if n <= SKETCH_SIZE {
        return (col.to_vec(), vec![1.0; n]);
    }
    let mut sorted = col.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut values = Vec::with_capacity(SKETCH_SIZE);
    let mut weights = Vec::with_capacity(SKETCH_SIZE);
    for c in 0..SKETCH_SIZE {
        let lo = c * n / SKETCH_SIZE;
        let hi = (c + 1) * n / SKETCH_SIZE;
        let chunk = &sorted[lo..hi];
        values.push(chunk.iter().sum::<f64>() / chunk.len() as f64);
        weights.push(chunk.len() as f64);
    }
    (values, weights)
}

/// Solves `sum_j w_j exp(-|v_j - q| / s) = target` for the scale `s`.
///
/// The search runs over `ln s` within `spread * [1e-12, 1e12]` using Newton
/// steps safeguarded by bisection. If exact matches alone reach the target
/// the lower bound is returned.
pub fn kstar_scale(values: &[f64], weights: &[f64], q: f64, target: f64, spread: f64) -> f64 {
    let mut lo = (spread * 1e-12).ln();
    let mut hi = (spread * 1e12).ln();
    let deltas: Vec<f64> = values.iter().map(|v| (v - q).abs()).collect();
    let eval = |u: f64| -> (f64, f64) {
        let inv = (-u).exp();
        let mut g = 0.0;
        let mut dg = 0.0;
        for (d, w) in deltas.iter().zip(weights) {
            let z = d * inv;
            let p = w * exp(-z);
            g += p;
            dg += p * z;
        }
        (g - target, dg)
    };
    if eval(lo).0 >= 0.0 {
        return lo.exp();
    }
    if eval(hi).0 <= 0.0 {
        return hi.exp();
    }
    let total_w: f64 = weights.iter().sum();
    let mean_delta = deltas.iter().zip(weights).map(|(d, w)| d * w).sum::<f64>() / total_w;
    let mut u = if mean_delta > 0.0 {
        mean_delta.ln().clamp(lo, hi)
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..MAX_SCALE_ITERS {
        let (g, dg) = eval(u);
        if g == 0.0 {
            break;
        }
        if g < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let mut next = if dg > 0.0 { u - g / dg } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - u).abs();
        u = next;
        if step <= 1e-13 * u.abs().max(1.0) || hi - lo <= 1e-13 * u.abs().max(1.0) {
            break;
        }
    }
    u.exp()
}
