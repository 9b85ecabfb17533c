//! Deterministic numerical kernels shared by the classifiers.

pub mod eigen;
pub mod fastexp;
pub mod logistic;
mod matrix;
pub mod pca;
pub mod rng;
pub mod smo;

pub use eigen::{jacobi_eigen, Eigen, DEFAULT_EIGEN_TOL};
pub use logistic::{fit_logistic, logistic_loss, logistic_loss_grad, sigmoid, LogisticFit};
pub use matrix::Matrix;
pub use pca::{pca, Pca};
pub use rng::{derive_seed, derive_stream, RngStream};
pub use smo::{smo_solve, smo_train, KernelSource, SmoConfig, SmoSolution};
