use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::EvalSample;
use crate::error::{Error, Result};

/// Asymptotic two-sided KS coefficient `c(0.05)`.
pub const KS_C_ALPHA_005: f64 = 1.358;

/// Mean differences within this resolution do not set a direction.
const MEAN_RESOLUTION: f64 = 1e-12;

/// Outcome of comparing sample `a` against sample `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Relation {
    Equal,
    Dominates,
    Dominated,
}

impl Relation {
    /// The relation seen from the other sample.
    pub fn reverse(self) -> Relation {
        match self {
            Relation::Equal => Relation::Equal,
            Relation::Dominates => Relation::Dominated,
            Relation::Dominated => Relation::Dominates,
        }
    }

    /// `=`, `≻` or `≺`.
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Equal => "=",
            Relation::Dominates => "≻",
            Relation::Dominated => "≺",
        }
    }

    /// `=`, `>` or `<`.
    pub fn ascii(self) -> &'static str {
        match self {
            Relation::Equal => "=",
            Relation::Dominates => ">",
            Relation::Dominated => "<",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub relation: Relation,
    pub d_statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
}

/// Coefficient `c(alpha)`: 1.358 at 0.05, otherwise `sqrt(-ln(alpha / 2) / 2)`.
fn coefficient(alpha: f64) -> f64 {
    if alpha == 0.05 {
        KS_C_ALPHA_005
    } else {
        (-(alpha / 2.0).ln() / 2.0).sqrt()
    }
}

/// Rejection threshold `c(alpha) * sqrt((n + m) / (n m))`.
pub fn critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    coefficient(alpha) * ((n + m) / (n * m)).sqrt()
}

/// `sup_x |F_a(x) - F_b(x)|` over the pooled sample values.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() || j < b.len() {
        // next pooled value; both CDFs step past every copy of it
        let x = match (a.get(i), b.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Two-sided two-sample KS test with a direction from the sample means.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<KsOutcome> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::data(format!(
            "the KS test needs at least two observations per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::data("KS samples must be finite"));
    }
    let d = ks_statistic(a, b);
    let crit = critical_value(a.len(), b.len(), alpha);
    let relation = if d <= crit {
        Relation::Equal
    } else {
        let diff = mean(a) - mean(b);
        if diff > MEAN_RESOLUTION {
            Relation::Dominates
        } else if diff < -MEAN_RESOLUTION {
            Relation::Dominated
        } else {
            Relation::Equal
        }
    };
    Ok(KsOutcome {
        relation,
        d_statistic: d,
        critical_value: crit,
        alpha,
    })
}

/// Pairwise KS outcomes over test-accuracy samples; `cells[i][j]` compares
/// row `i` against column `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsMatrix {
    pub names: Vec<String>,
    pub cells: Vec<Vec<KsOutcome>>,
}

pub fn build_ks_matrix(samples: &[EvalSample], alpha: f64) -> Result<KsMatrix> {
    let n = samples.len();
    let mut cells = Vec::with_capacity(n);
    for a in samples {
        let row = samples
            .iter()
            .map(|b| ks_two_sample(&a.test_accuracies, &b.test_accuracies, alpha))
            .collect::<Result<Vec<_>>>()?;
        cells.push(row);
    }
    Ok(KsMatrix {
        names: samples.iter().map(|s| s.classifier_id.clone()).collect(),
        cells,
    })
}

impl KsMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<&KsOutcome> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        Some(&self.cells[i][j])
    }

    /// Comma-separated matrix with `=`, `>` and `<`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("classifier");
        for n in &self.names {
            let _ = write!(out, ",{}", csv_field(n));
        }
        out.push('\n');
        for (name, row) in self.names.iter().zip(&self.cells) {
            out.push_str(&csv_field(name));
            for c in row {
                let _ = write!(out, ",{}", c.relation.ascii());
            }
            out.push('\n');
        }
        out
    }

    /// Aligned Markdown matrix with `=`, `≻` and `≺`.
    pub fn to_markdown(&self) -> String {
        let mut header = vec!["Classifier".to_string()];
        header.extend(self.names.iter().cloned());
        let rows: Vec<Vec<String>> = self
            .names
            .iter()
            .zip(&self.cells)
            .map(|(name, row)| {
                let mut r = vec![name.clone()];
                r.extend(row.iter().map(|c| c.relation.symbol().to_string()));
                r
            })
            .collect();
        markdown_table(&header, &rows, &[])
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders an aligned Markdown table; columns listed in `right` are
/// right-aligned.
pub(crate) fn markdown_table(header: &[String], rows: &[Vec<String>], right: &[usize]) -> String {
    let width = |s: &str| s.chars().count();
    let mut widths: Vec<usize> = header.iter().map(|h| width(h).max(3)).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(width(c));
        }
    }
    let pad = |s: &str, w: usize, r: bool| {
        let fill = " ".repeat(w - width(s));
        if r {
            format!("{fill}{s}")
        } else {
            format!("{s}{fill}")
        }
    };
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| pad(c, widths[i], right.contains(&i)))
            .collect();
        format!("| {} |\n", parts.join(" | "))
    };
    let mut out = line(header);
    let rule: Vec<String> = widths
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            if right.contains(&i) {
                format!("{}:", "-".repeat(w - 1))
            } else {
                "-".repeat(w)
            }
        })
        .collect();
    out.push_str(&format!("| {} |\n", rule.join(" | ")));
    for r in rows {
        out.push_str(&line(r));
    }
    out
}
