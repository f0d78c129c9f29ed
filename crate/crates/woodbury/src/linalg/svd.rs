//! One-sided Jacobi SVD for dense complex matrices.
//!
//! The sweep orthogonalizes column pairs of a working copy W of the input
//! with unitary plane rotations accumulated into V; at convergence the
//! column norms of W are the singular values and the normalized columns are
//! the left singular vectors. One-sided Jacobi delivers high relative
//! accuracy for the small singular values, which is what the rank
//! thresholding downstream depends on.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

const MAX_SWEEPS: usize = 60;

/// Economy SVD: `a = u * diag(singular_values) * v^H` with `u` of shape
/// `m x k`, `v` of shape `n x k`, `k = min(m, n)`, singular values sorted
/// descending. Columns of `u` whose singular value is exactly zero are left
/// as zero vectors.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    let (m, n) = a.shape();
    if m < n {
        // A^H = V S U^H, so the factors swap roles.
        let s = svd(&a.adjoint())?;
        return Ok(Svd {
            u: s.v,
            singular_values: s.singular_values,
            v: s.u,
        });
    }
    if n == 0 {
        return Ok(Svd {
            u: ComplexMatrix::zeros(m, 0),
            singular_values: Vec::new(),
            v: ComplexMatrix::zeros(0, 0),
        });
    }

    let mut w = a.to_columns();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            col[j] = Complex64::new(1.0, 0.0);
            col
        })
        .collect();

    let conv_tol = f64::EPSILON * (m as f64).sqrt();
    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                // 2x2 Gram block of columns p, q: [[alpha, gamma], [conj(gamma), beta]].
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    let wp = w[p][i];
                    let wq = w[q][i];
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= conv_tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Absorb the phase of gamma into column q, then apply the
                // real Jacobi rotation that annihilates the off-diagonal of
                // the phase-adjusted (real symmetric) Gram block.
                let phase = gamma / g;
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let phase_conj = phase.conj();
                let (wp_col, wq_col) = pair_mut(&mut w, p, q);
                rotate(wp_col, wq_col, c, s, phase_conj);
                let (vp_col, vq_col) = pair_mut(&mut v, p, q);
                rotate(vp_col, vq_col, c, s, phase_conj);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNonConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w
        .iter()
        .map(|col| col.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut singular_values = Vec::with_capacity(n);
    let mut u_cols = Vec::with_capacity(n);
    let mut v_cols = Vec::with_capacity(n);
    for &j in &order {
        let sigma = norms[j];
        singular_values.push(sigma);
        if sigma > 0.0 {
            u_cols.push(w[j].iter().map(|z| z / sigma).collect());
        } else {
            u_cols.push(vec![Complex64::new(0.0, 0.0); m]);
        }
        v_cols.push(v[j].clone());
    }

    Ok(Svd {
        u: ComplexMatrix::from_columns(m, &u_cols),
        singular_values,
        v: ComplexMatrix::from_columns(n, &v_cols),
    })
}

/// Largest singular value; 0 for an empty panel.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(svd(a)?.singular_values.first().copied().unwrap_or(0.0))
}

fn pair_mut<T>(cols: &mut [Vec<T>], p: usize, q: usize) -> (&mut Vec<T>, &mut Vec<T>) {
    debug_assert!(p < q);
    let (lo, hi) = cols.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

#[inline]
fn rotate(cp: &mut [Complex64], cq: &mut [Complex64], c: f64, s: f64, phase_conj: Complex64) {
    for (zp, zq) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *zp;
        let xq = phase_conj * *zq;
        *zp = xp * c - xq * s;
        *zq = xp * s + xq * c;
    }
}
