use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::params::DecisionTableConfig;
use super::samples::{majority, Samples};
use super::ClassDistribution;
use crate::dataset::Dataset;

/// Majority table over equal-width bins of a feature subset chosen by
/// best-first search on leave-one-out accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTable {
    pub bins: usize,
    pub mins: Vec<f64>,
    pub widths: Vec<f64>,
    pub selected: Vec<usize>,
    /// Leave-one-out accuracy of the selected subset.
    pub merit: f64,
    /// `(bin key, class counts)` sorted by key.
    pub cells: Vec<(Vec<u16>, [f64; 2])>,
    pub fallback: ClassDistribution,
}

/// Bin index of `v` for a feature with the given minimum and bin width.
#[inline]
pub fn discretize(v: f64, min: f64, width: f64, bins: usize) -> u16 {
    if !(width > 0.0) {
        return 0;
    }
    let b = ((v - min) / width).floor();
    if b < 0.0 {
        0
    } else if b >= (bins - 1) as f64 {
        (bins - 1) as u16
    } else {
        b as u16
    }
}

struct Binned {
    /// Row-major bin codes.
    codes: Vec<u16>,
    d: usize,
    y: Vec<u8>,
}

fn bin_ranges(s: &Samples, bins: usize) -> (Vec<f64>, Vec<f64>) {
    let mut mins = Vec::with_capacity(s.d);
    let mut widths = Vec::with_capacity(s.d);
    for j in 0..s.d {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..s.n() {
            lo = lo.min(s.value(i, j));
            hi = hi.max(s.value(i, j));
        }
        mins.push(lo);
        widths.push((hi - lo) / bins as f64);
    }
    (mins, widths)
}

fn binned(s: &Samples, mins: &[f64], widths: &[f64], bins: usize) -> Binned {
    let mut codes = Vec::with_capacity(s.x.len());
    for i in 0..s.n() {
        for j in 0..s.d {
            codes.push(discretize(s.value(i, j), mins[j], widths[j], bins));
        }
    }
    Binned {
        codes,
        d: s.d,
        y: s.y.clone(),
    }
}

fn key(b: &Binned, i: usize, features: &[usize]) -> Vec<u16> {
    features.iter().map(|&f| b.codes[i * b.d + f]).collect()
}

fn loo(b: &Binned, features: &[usize]) -> f64 {
    let n = b.y.len();
    if n == 0 {
        return 0.0;
    }
    let mut cells: HashMap<Vec<u16>, [f64; 2]> = HashMap::new();
    let mut keys = Vec::with_capacity(n);
    let mut total = [0.0; 2];
    for i in 0..n {
        let k = key(b, i, features);
        cells.entry(k.clone()).or_insert([0.0; 2])[b.y[i] as usize] += 1.0;
        total[b.y[i] as usize] += 1.0;
        keys.push(k);
    }
    let mut correct = 0usize;
    for (i, k) in keys.iter().enumerate() {
        let own = b.y[i] as usize;
        let mut c = cells[k];
        c[own] -= 1.0;
        let pred = if c[0] + c[1] > 0.0 {
            majority(c)
        } else {
            let mut g = total;
            g[own] -= 1.0;
            majority(g)
        };
        if pred == b.y[i] {
            correct += 1;
        }
    }
    correct as f64 / n as f64
}

/// Leave-one-out accuracy of the decision table on `features`.
pub fn loo_accuracy(train: &Dataset, features: &[usize], bins: usize) -> f64 {
    let s = Samples::from_instances(&train.instances, train.dim(), None);
    let (mins, widths) = bin_ranges(&s, bins);
    loo(&binned(&s, &mins, &widths, bins), features)
}

fn mask_features(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).collect()
}

/// Feature counts up to which the stale limit is ignored and the search runs
/// until the open list is empty, so every subset is visited.
pub const EXHAUSTIVE_MAX_FEATURES: usize = 4;

/// Forward best-first search from the empty subset. Stops after
/// `stale_limit` consecutive expansions that fail to improve the best merit,
/// unless there are at most `EXHAUSTIVE_MAX_FEATURES` features.
fn best_first(b: &Binned, stale_limit: usize) -> (Vec<usize>, f64) {
    let d = b.d.min(63);
    let stale_limit = if d <= EXHAUSTIVE_MAX_FEATURES {
        usize::MAX
    } else {
        stale_limit
    };
    let mut seen: HashMap<u64, f64> = HashMap::new();
    let root = loo(b, &[]);
    seen.insert(0, root);
    let mut open: Vec<(f64, u64)> = vec![(root, 0)];
    let mut best = (root, 0u64);
    let mut stale = 0;
    while !open.is_empty() {
        // highest merit first; ties prefer fewer features, then lower mask
        let pos = (0..open.len())
            .max_by(|&a, &c| {
                let (ma, ka) = open[a];
                let (mc, kc) = open[c];
                ma.total_cmp(&mc)
                    .then(kc.count_ones().cmp(&ka.count_ones()))
                    .then(kc.cmp(&ka))
            })
            .expect("open list is non-empty");
        let (_, node) = open.swap_remove(pos);
        let mut improved = false;
        for f in 0..d {
            let child = node | 1 << f;
            if child == node || seen.contains_key(&child) {
                continue;
            }
            let m = loo(b, &mask_features(child));
            seen.insert(child, m);
            open.push((m, child));
            if m > best.0 + 1e-12 {
                best = (m, child);
                improved = true;
            }
        }
        if improved {
            stale = 0;
        } else {
            stale += 1;
            if stale >= stale_limit {
                break;
            }
        }
    }
    (mask_features(best.1), best.0)
}

impl DecisionTable {
    pub(crate) fn fit(s: &Samples, cfg: &DecisionTableConfig) -> Self {
        let (mins, widths) = bin_ranges(s, cfg.bins);
        let b = binned(s, &mins, &widths, cfg.bins);
        let (selected, merit) = best_first(&b, cfg.stale_limit);
        let mut cells: HashMap<Vec<u16>, [f64; 2]> = HashMap::new();
        for i in 0..s.n() {
            cells.entry(key(&b, i, &selected)).or_insert([0.0; 2])[s.y[i] as usize] += 1.0;
        }
        let mut cells: Vec<(Vec<u16>, [f64; 2])> = cells.into_iter().collect();
        cells.sort_by(|a, c| a.0.cmp(&c.0));
        let total = s.all_counts();
        DecisionTable {
            bins: cfg.bins,
            mins,
            widths,
            selected,
            merit,
            cells,
            fallback: ClassDistribution::from_scores(total[0], total[1]),
        }
    }

    pub(crate) fn dist(&self, x: &[f64]) -> ClassDistribution {
        let k: Vec<u16> = self
            .selected
            .iter()
            .map(|&f| discretize(x[f], self.mins[f], self.widths[f], self.bins))
            .collect();
        match self.cells.binary_search_by(|c| c.0.cmp(&k)) {
            Ok(pos) => {
                let c = self.cells[pos].1;
                ClassDistribution::from_scores(c[0], c[1])
            }
            Err(_) => self.fallback,
        }
    }

    pub(crate) fn parameter_count(&self) -> usize {
        2 * self.mins.len() + self.cells.len() * (self.selected.len() + 2)
    }
}
