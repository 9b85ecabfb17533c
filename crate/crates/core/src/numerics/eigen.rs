use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Symmetric eigen-decomposition: eigenvalues in descending order and the
/// matching unit eigenvectors stored as the columns of `vectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

pub const DEFAULT_EIGEN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
///
/// Sweeps continue until the off-diagonal mass is at machine precision
/// relative to the Frobenius norm; the call fails if after `MAX_SWEEPS` it is
/// still above `tol` (relative). Each eigenvector is sign-normalized so that
/// its first nonzero component is positive.
pub fn jacobi_eigen(a: &Matrix, tol: f64) -> Result<Eigen> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::numeric(format!(
            "eigen-decomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_symmetric(1e-9) {
        return Err(Error::numeric("matrix is not symmetric within 1e-9"));
    }
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("matrix has non-finite entries"));
    }

    let mut m = a.clone();
    // symmetrize exactly so rotations act on a truly symmetric matrix
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let mut v = Matrix::identity(n);
    let scale = m.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();

    let off = |m: &Matrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    if scale > 0.0 {
        let mut sweeps = 0;
        while off(&m) > f64::EPSILON * scale {
            if sweeps == MAX_SWEEPS {
                if off(&m) > tol * scale {
                    return Err(Error::numeric(format!(
                        "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps"
                    )));
                }
                break;
            }
            sweeps += 1;
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = m[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (theta * theta + 1.0).sqrt())
                    } else {
                        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = m[(k, p)];
                        let akq = m[(k, q)];
                        m[(k, p)] = c * akp - s * akq;
                        m[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = m[(p, k)];
                        let aqk = m[(q, k)];
                        m[(p, k)] = c * apk - s * aqk;
                        m[(q, k)] = s * apk + c * aqk;
                    }
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]).then(i.cmp(&j)));

    let mut values = Vec::with_capacity(n);
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        values.push(m[(src, src)]);
        let mut vec: Vec<f64> = v.column(src);
        normalize_sign(&mut vec);
        for (k, x) in vec.into_iter().enumerate() {
            vectors[(k, col)] = x;
        }
    }
    Ok(Eigen { values, vectors })
}

/// Flips `v` so that its first component with magnitude above 1e-12 is positive.
pub(crate) fn normalize_sign(v: &mut [f64]) {
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}
