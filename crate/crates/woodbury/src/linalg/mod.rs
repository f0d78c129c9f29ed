//! Dense decomposition kernels: Jacobi SVD, LU, Cholesky, Householder QR.

pub mod cholesky;
pub mod lu;
pub mod qr;
pub mod svd;

pub use svd::{spectral_norm, svd, Svd};
