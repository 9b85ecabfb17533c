use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::eigen::{jacobi_eigen, DEFAULT_EIGEN_TOL};
use crate::numerics::Matrix;

/// Principal axes of a data matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pca {
    /// Column means used for centering.
    pub mean: Vec<f64>,
    /// `cols x n_components`; column `c` is the `c`-th principal axis.
    pub rotation: Matrix,
    /// Variance along each returned axis.
    pub variances: Vec<f64>,
    /// True when the data had no variance and identity axes were returned.
    pub degenerate: bool,
}

impl Pca {
    /// Projects a centered copy of `row` onto the principal axes.
    pub fn project(&self, row: &[f64]) -> Vec<f64> {
        let centered: Vec<f64> = row.iter().zip(&self.mean).map(|(x, m)| x - m).collect();
        self.rotation.left_mul(&centered)
    }
}

/// Principal component analysis via Jacobi decomposition of the covariance.
///
/// Axes are unit-norm, ordered by descending variance, and sign-normalized
/// (first nonzero component positive). Zero-variance input yields identity
/// axes with `degenerate = true`.
pub fn pca(data: &Matrix, n_components: usize) -> Result<Pca> {
    let (n, d) = (data.rows(), data.cols());
    if n_components > d {
        return Err(Error::numeric(format!(
            "requested {n_components} components from {d} columns"
        )));
    }
    if n == 0 {
        return Err(Error::numeric("PCA on an empty matrix"));
    }
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, x) in mean.iter_mut().zip(data.row(i)) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = Matrix::zeros(d, d);
    let mut centered = vec![0.0; d];
    for i in 0..n {
        for ((c, x), m) in centered.iter_mut().zip(data.row(i)).zip(&mean) {
            *c = x - m;
        }
        for a in 0..d {
            for b in a..d {
                cov[(a, b)] += centered[a] * centered[b];
            }
        }
    }
    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
    for a in 0..d {
        for b in a..d {
            let v = cov[(a, b)] / denom;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }

    let total: f64 = (0..d).map(|a| cov[(a, a)]).sum();
    if total <= 0.0 {
        let mut rotation = Matrix::zeros(d, n_components);
        for c in 0..n_components {
            rotation[(c, c)] = 1.0;
        }
        return Ok(Pca {
            mean,
            rotation,
            variances: vec![0.0; n_components],
            degenerate: true,
        });
    }

    let eig = jacobi_eigen(&cov, DEFAULT_EIGEN_TOL)?;
    let mut rotation = Matrix::zeros(d, n_components);
    for c in 0..n_components {
        for r in 0..d {
            rotation[(r, c)] = eig.vectors[(r, c)];
        }
    }
    Ok(Pca {
        mean,
        rotation,
        variances: eig.values[..n_components].iter().map(|v| v.max(0.0)).collect(),
        degenerate: false,
    })
}
