//! Cholesky factorization (L L^H) for Hermitian positive-definite systems.
//!
//! Used for the identity-plus-PSD inner factors, where positive definiteness
//! is guaranteed by structure; a non-positive pivot therefore signals
//! corrupted input rather than an unlucky matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

pub struct Cholesky {
    lower: ComplexMatrix,
}

pub fn factor(a: &ComplexMatrix, op: &'static str) -> Result<Cholesky> {
    assert!(a.is_square(), "Cholesky requires a square matrix");
    let n = a.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)].re;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if diag <= 0.0 || !diag.is_finite() {
            return Err(Error::NotPositiveDefinite {
                op,
                pivot: diag,
                index: j,
            });
        }
        let ljj = diag.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut sum = a[(i, j)];
            for k in 0..j {
                let sub = l[(i, k)] * l[(j, k)].conj();
                sum -= sub;
            }
            l[(i, j)] = sum / ljj;
        }
    }
    Ok(Cholesky { lower: l })
}

impl Cholesky {
    /// Solve `A X = B` via the two triangular solves.
    pub fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.lower.rows();
        assert_eq!(b.rows(), n, "rhs row mismatch");
        let ncols = b.cols();
        let mut x = b.clone();
        // L y = b
        for i in 0..n {
            for k in 0..i {
                let l = self.lower[(i, k)];
                for j in 0..ncols {
                    let sub = l * x[(k, j)];
                    x[(i, j)] -= sub;
                }
            }
            let d = self.lower[(i, i)];
            for j in 0..ncols {
                x[(i, j)] /= d;
            }
        }
        // L^H x = y
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let l = self.lower[(k, i)].conj();
                for j in 0..ncols {
                    let sub = l * x[(k, j)];
                    x[(i, j)] -= sub;
                }
            }
            let d = self.lower[(i, i)];
            for j in 0..ncols {
                x[(i, j)] /= d;
            }
        }
        x
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve(&ComplexMatrix::identity(self.lower.rows()))
    }
}

/// Inverse of a Hermitian positive-definite matrix.
pub fn inverse(a: &ComplexMatrix, op: &'static str) -> Result<ComplexMatrix> {
    Ok(factor(a, op)?.inverse())
}
