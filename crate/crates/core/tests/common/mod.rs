//! Independent reference implementations and fixtures shared by the
//! integration tests.

#![allow(dead_code)]

use sewerbench::dataset::Dataset;
use sewerbench::numerics::RngStream;

/// Dataset from `(features, label)` pairs.
pub fn rows(data: &[(Vec<f64>, u8)]) -> Dataset {
    Dataset::from_rows(data).expect("valid rows")
}

/// Labels are a threshold on feature 0; other features are noise.
pub fn threshold_data(n: usize, d: usize, seed: u64) -> Dataset {
    let mut rng = RngStream::new(seed, vec![1]);
    let data: Vec<(Vec<f64>, u8)> = (0..n)
        .map(|_| {
            let f: Vec<f64> = (0..d).map(|_| rng.uniform()).collect();
            let y = u8::from(f[0] > 0.4);
            (f, y)
        })
        .collect();
    rows(&data)
}

/// Four noisy points around each corner of the unit square, XOR-labeled.
pub fn xor_data() -> Dataset {
    let mut data = Vec::new();
    for (cx, cy) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
        for (dx, dy) in [(0.05, 0.0), (-0.05, 0.0), (0.0, 0.05), (0.0, -0.05)] {
            data.push((vec![cx + dx, cy + dy], u8::from((cx > 0.5) != (cy > 0.5))));
        }
    }
    rows(&data)
}

/// Two-sample KS statistic by direct double loops over the pooled values.
pub fn ks_oracle(a: &[f64], b: &[f64]) -> f64 {
    let mut d: f64 = 0.0;
    for &x in a.iter().chain(b) {
        let mut ca = 0usize;
        for &v in a {
            if v <= x {
                ca += 1;
            }
        }
        let mut cb = 0usize;
        for &v in b {
            if v <= x {
                cb += 1;
            }
        }
        d = d.max((ca as f64 / a.len() as f64 - cb as f64 / b.len() as f64).abs());
    }
    d
}

/// Best weighted stump by enumerating every feature and midpoint threshold.
/// Returns `(feature, threshold, error)`; candidates are visited in
/// (feature, threshold) order and the first one within `eps` of the minimum
/// wins.
pub fn exhaustive_stump(x: &[Vec<f64>], y: &[u8], w: &[f64]) -> Option<(usize, f64, f64)> {
    let d = x[0].len();
    let total: f64 = w.iter().sum();
    let mut cands = Vec::new();
    for f in 0..d {
        let mut vals: Vec<f64> = x.iter().map(|r| r[f]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for pair in vals.windows(2) {
            let thr = 0.5 * (pair[0] + pair[1]);
            let mut left = [0.0; 2];
            let mut right = [0.0; 2];
            for i in 0..x.len() {
                if x[i][f] <= thr {
                    left[y[i] as usize] += w[i];
                } else {
                    right[y[i] as usize] += w[i];
                }
            }
            cands.push((f, thr, left[0].min(left[1]) + right[0].min(right[1])));
        }
    }
    let best = cands.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    let eps = 1e-9 * total;
    cands.into_iter().find(|c| c.2 <= best + eps)
}

/// Min-max scaling with the constant-column rule (maps to 0.5).
pub fn min_max(col: &[f64], v: f64) -> f64 {
    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        (v - lo) / (hi - lo)
    } else {
        0.5
    }
}

/// K* posterior P(unsafe | q) by direct summation. Training points and the
/// query are min-max scaled per column; each attribute's kernel scale is
/// found by plain bisection on `ln s`.
pub fn kstar_oracle(points: &[Vec<f64>], labels: &[u8], q: &[f64], blend: f64) -> f64 {
    let n = points.len();
    let d = q.len();
    let cols: Vec<Vec<f64>> = (0..d).map(|a| points.iter().map(|p| p[a]).collect()).collect();
    let scaled: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| c.iter().map(|&v| min_max(c, v)).collect())
        .collect();
    let sq: Vec<f64> = (0..d).map(|a| min_max(&cols[a], q[a])).collect();
    let target = (blend * n as f64).max(1.0);
    let mut log_k = vec![0.0; n];
    for a in 0..d {
        let c = &scaled[a];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let spread = hi - lo;
        if spread <= 0.0 {
            continue;
        }
        let mass = |s: f64| -> f64 { c.iter().map(|v| (-(v - sq[a]).abs() / s).exp()).sum::<f64>() - target };
        let (mut ulo, mut uhi) = ((spread * 1e-12).ln(), (spread * 1e12).ln());
        let s = if mass(ulo.exp()) >= 0.0 {
            ulo.exp()
        } else if mass(uhi.exp()) <= 0.0 {
            uhi.exp()
        } else {
            for _ in 0..300 {
                let mid = 0.5 * (ulo + uhi);
                if mass(mid.exp()) < 0.0 {
                    ulo = mid;
                } else {
                    uhi = mid;
                }
            }
            (0.5 * (ulo + uhi)).exp()
        };
        for (i, v) in c.iter().enumerate() {
            log_k[i] -= (v - sq[a]).abs() / s;
        }
    }
    let m = log_k.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut score = [0.0; 2];
    for (lk, &y) in log_k.iter().zip(labels) {
        score[y as usize] += (lk - m).exp();
    }
    score[1] / (score[0] + score[1])
}

/// Relative error `|a - b| / max(|a|, |b|)` of two gradient vectors in the
/// Euclidean norm (0 when both vanish).
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = na.max(nb);
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Central finite-difference gradient of `f` at `x`.
pub fn central_difference(x: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = p[i];
            p[i] = orig + h;
            let up = f(&p);
            p[i] = orig - h;
            let down = f(&p);
            p[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}
