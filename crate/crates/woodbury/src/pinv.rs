//! Moore-Penrose inverse and its certificate machinery: the four defining
//! equations, orthogonal projectors, range-inclusion tests, and Hermitian
//! residuals.
//!
//! Every residual in this crate is relative Frobenius with a `max(1, .)`
//! floor in the denominator, so near-zero matrices do not blow up the
//! quotient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::svd::svd;
use crate::matrix::ComplexMatrix;

/// Default tolerance for every condition/residual verdict (relative
/// Frobenius). Two orders of magnitude above double-precision SVD backward
/// error at desk scale, so honest passes have headroom.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default numerical-rank threshold factor: a singular value counts toward
/// the rank iff `sigma > rank_tol * sigma_max` with
/// `rank_tol = max(rows, cols) * eps`.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

/// An MP-inverse candidate computed by SVD, with its rank decision and the
/// four Penrose residuals measured against the input.
#[derive(Debug, Clone)]
pub struct PinvResult {
    /// `n x m` pseudoinverse of the `m x n` input.
    pub pinv: ComplexMatrix,
    pub numerical_rank: usize,
    /// All `min(m, n)` singular values, descending.
    pub singular_values: Vec<f64>,
    /// Relative Frobenius residuals of Penrose equations 1-4.
    pub penrose_residuals: [f64; 4],
    /// The relative rank threshold that was applied.
    pub tol: f64,
}

/// SVD-based pseudoinverse. `rank_tol` is the relative threshold on
/// singular values (`None` uses [`default_rank_tol`]).
pub fn pinv(a: &ComplexMatrix, rank_tol: Option<f64>) -> Result<PinvResult> {
    let (m, n) = a.shape();
    let tol = rank_tol.unwrap_or_else(|| default_rank_tol(m, n));
    let dec = svd(a)?;
    let sigma_max = dec.singular_values.first().copied().unwrap_or(0.0);
    let threshold = tol * sigma_max;
    let rank = dec
        .singular_values
        .iter()
        .take_while(|&&s| s > threshold && s > 0.0)
        .count();

    let mut z = ComplexMatrix::zeros(n, m);
    if rank > 0 {
        // z = V_r * diag(1/sigma) * U_r^H, accumulated column by column.
        for t in 0..rank {
            let inv_sigma = 1.0 / dec.singular_values[t];
            for i in 0..n {
                let vi = dec.v[(i, t)] * inv_sigma;
                for j in 0..m {
                    let add = vi * dec.u[(j, t)].conj();
                    z[(i, j)] += add;
                }
            }
        }
    }

    let penrose = penrose_residuals(a, &z);
    Ok(PinvResult {
        pinv: z,
        numerical_rank: rank,
        singular_values: dec.singular_values,
        penrose_residuals: penrose,
        tol,
    })
}

/// The raw residuals of the four Penrose equations:
/// `||AZA - A|| / max(1, ||A||)`, `||ZAZ - Z|| / max(1, ||Z||)`,
/// `||(AZ)^H - AZ|| / max(1, ||AZ||)`, `||(ZA)^H - ZA|| / max(1, ||ZA||)`.
pub fn penrose_residuals(a: &ComplexMatrix, z: &ComplexMatrix) -> [f64; 4] {
    let az = a.mul(z);
    let za = z.mul(a);
    let r1 = az.mul(a).sub(a).frobenius_norm() / a.frobenius_norm().max(1.0);
    let r2 = za.mul(z).sub(z).frobenius_norm() / z.frobenius_norm().max(1.0);
    let r3 = az.adjoint().sub(&az).frobenius_norm() / az.frobenius_norm().max(1.0);
    let r4 = za.adjoint().sub(&za).frobenius_norm() / za.frobenius_norm().max(1.0);
    [r1, r2, r3, r4]
}

/// Per-equation report of the four Penrose residuals against a tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PenroseReport {
    pub residuals: [f64; 4],
    pub passes: [bool; 4],
    pub tol: f64,
}

impl PenroseReport {
    pub fn all_pass(&self) -> bool {
        self.passes.iter().all(|&p| p)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Check whether `z` satisfies the four MP-inverse equations for `a`.
pub fn penrose_check(a: &ComplexMatrix, z: &ComplexMatrix, tol: f64) -> Result<PenroseReport> {
    if z.shape() != (a.cols(), a.rows()) {
        return Err(Error::DimensionMismatch {
            op: "penrose_check",
            details: format!(
                "candidate is {}x{}, expected {}x{}",
                z.rows(),
                z.cols(),
                a.cols(),
                a.rows()
            ),
        });
    }
    let residuals = penrose_residuals(a, z);
    Ok(PenroseReport {
        residuals,
        passes: residuals.map(|r| r <= tol),
        tol,
    })
}

/// The orthogonal projectors associated with a matrix and its
/// pseudoinverse: `e_proj = I - A A^+` (onto the cokernel) and
/// `f_proj = I - A^+ A` (onto the kernel).
#[derive(Debug, Clone)]
pub struct Projectors {
    pub e_proj: ComplexMatrix,
    pub f_proj: ComplexMatrix,
}

pub fn projectors(a: &ComplexMatrix, a_pinv: &ComplexMatrix) -> Result<Projectors> {
    if a_pinv.shape() != (a.cols(), a.rows()) {
        return Err(Error::DimensionMismatch {
            op: "projectors",
            details: format!(
                "pinv is {}x{}, expected {}x{}",
                a_pinv.rows(),
                a_pinv.cols(),
                a.cols(),
                a.rows()
            ),
        });
    }
    let e_proj = ComplexMatrix::identity(a.rows()).sub(&a.mul(a_pinv));
    let f_proj = ComplexMatrix::identity(a.cols()).sub(&a_pinv.mul(a));
    Ok(Projectors { e_proj, f_proj })
}

/// Verdict + residual of a numerical range-inclusion test.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InclusionCheck {
    pub included: bool,
    pub residual: f64,
}

/// Is the column space of `b` contained in the column space of `a`?
/// Residual: `||(I - A A^+) B||_F / max(1, ||B||_F)`.
pub fn range_inclusion(
    b: &ComplexMatrix,
    a: &ComplexMatrix,
    a_pinv: &ComplexMatrix,
    tol: f64,
) -> Result<InclusionCheck> {
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch {
            op: "range_inclusion",
            details: format!("b has {} rows, a has {}", b.rows(), a.rows()),
        });
    }
    if a_pinv.shape() != (a.cols(), a.rows()) {
        return Err(Error::DimensionMismatch {
            op: "range_inclusion",
            details: "pinv shape does not match".into(),
        });
    }
    // E_A * B, computed as B - A (A^+ B) to keep the cost at panel scale.
    let residual_mat = b.sub(&a.mul(&a_pinv.mul(b)));
    let residual = residual_mat.frobenius_norm() / b.frobenius_norm().max(1.0);
    Ok(InclusionCheck {
        included: residual <= tol,
        residual,
    })
}

/// `||X - X^H||_F / max(1, ||X||_F)` for a square matrix.
pub fn hermitian_residual(x: &ComplexMatrix) -> Result<f64> {
    if !x.is_square() {
        return Err(Error::DimensionMismatch {
            op: "hermitian_residual",
            details: format!("matrix is {}x{}", x.rows(), x.cols()),
        });
    }
    Ok(x.sub(&x.adjoint()).frobenius_norm() / x.frobenius_norm().max(1.0))
}

/// Result of a formula-path pseudoinverse (no SVD of the target is taken,
/// so unlike [`PinvResult`] there are no singular values to report).
#[derive(Debug, Clone)]
pub struct FormulaPinv {
    pub pinv: ComplexMatrix,
    /// Penrose residuals measured against the matrix the formula targets.
    pub penrose: PenroseReport,
    pub tol: f64,
}
