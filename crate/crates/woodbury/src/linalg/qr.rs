//! Householder QR: column-pivoted solves for the small capacitance systems
//! and a plain variant that yields the unitary factor of a square matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::lu::COND_LIMIT;
use crate::matrix::ComplexMatrix;

/// Column-pivoted Householder QR of a square matrix, `A P = Q R`.
///
/// The pivoted diagonal of R is ordered by decreasing magnitude, so
/// `|r_00| / |r_{n-1,n-1}|` serves as the condition estimate that guards the
/// capacitance solves.
pub struct ColPivQr {
    /// Reflectors in the strict lower part + R on and above the diagonal.
    packed: ComplexMatrix,
    betas: Vec<f64>,
    perm: Vec<usize>,
}

pub fn factor_pivoted(a: &ComplexMatrix, op: &'static str) -> Result<ColPivQr> {
    assert!(a.is_square(), "pivoted QR requires a square matrix");
    let n = a.rows();
    let mut r = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut betas = vec![0.0; n];
    let mut col_norms: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| r[(i, j)].norm_sqr()).sum())
        .collect();

    for k in 0..n {
        let (best, _) = col_norms
            .iter()
            .enumerate()
            .skip(k)
            .fold((k, -1.0), |acc, (j, &v)| if v > acc.1 { (j, v) } else { acc });
        if best != k {
            for i in 0..n {
                let tmp = r[(i, k)];
                r[(i, k)] = r[(i, best)];
                r[(i, best)] = tmp;
            }
            perm.swap(k, best);
            col_norms.swap(k, best);
        }

        let sigma = ((k..n).map(|i| r[(i, k)].norm_sqr()).sum::<f64>()).sqrt();
        if sigma == 0.0 {
            betas[k] = 0.0;
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        // v = x + phase*sigma*e1, beta = 2 / v^H v = 1 / (sigma*(sigma+|x0|))
        let v0 = x0 + phase * sigma;
        r[(k, k)] = v0;
        let beta = 1.0 / (sigma * (sigma + x0.norm()));
        betas[k] = beta;
        for j in (k + 1)..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in k..n {
                dot += r[(i, k)].conj() * r[(i, j)];
            }
            dot *= beta;
            for i in k..n {
                let sub = dot * r[(i, k)];
                r[(i, j)] -= sub;
            }
        }
        // store the R diagonal entry produced by the reflector
        let rkk = -phase * sigma;
        // clear the reflector's normalization into betas; keep v in the
        // column below the diagonal and rkk on the diagonal afterwards
        let scale = v0;
        for i in (k + 1)..n {
            r[(i, k)] = r[(i, k)] / scale;
        }
        betas[k] *= scale.norm_sqr();
        r[(k, k)] = rkk;
        for (j, norm) in col_norms.iter_mut().enumerate().skip(k + 1) {
            *norm -= r[(k, j)].norm_sqr();
            if *norm < 0.0 {
                *norm = 0.0;
            }
        }
    }

    let diag_max = (0..n).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    let diag_min = (0..n).map(|i| r[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    if n > 0 && (diag_min == 0.0 || diag_max / diag_min > COND_LIMIT) {
        return Err(Error::NumericallySingular {
            op,
            cond_estimate: if diag_min == 0.0 {
                f64::INFINITY
            } else {
                diag_max / diag_min
            },
        });
    }

    Ok(ColPivQr {
        packed: r,
        betas,
        perm,
    })
}

impl ColPivQr {
    pub fn cond_estimate(&self) -> f64 {
        let n = self.packed.rows();
        if n == 0 {
            return 1.0;
        }
        let diag_max = (0..n).map(|i| self.packed[(i, i)].norm()).fold(0.0, f64::max);
        let diag_min = (0..n)
            .map(|i| self.packed[(i, i)].norm())
            .fold(f64::INFINITY, f64::min);
        diag_max / diag_min
    }

    /// Solve `A X = B`.
    pub fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.packed.rows();
        assert_eq!(b.rows(), n, "rhs row mismatch");
        let ncols = b.cols();
        let mut y = b.clone();
        // y = Q^H b, applying reflectors in order with implicit v_k = e_k + packed[k+1.., k]
        for k in 0..n {
            if self.betas[k] == 0.0 {
                continue;
            }
            for j in 0..ncols {
                let mut dot = y[(k, j)];
                for i in (k + 1)..n {
                    dot += self.packed[(i, k)].conj() * y[(i, j)];
                }
                dot *= self.betas[k];
                y[(k, j)] -= dot;
                for i in (k + 1)..n {
                    let sub = dot * self.packed[(i, k)];
                    y[(i, j)] -= sub;
                }
            }
        }
        // back substitution R z = y
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let u = self.packed[(i, k)];
                for j in 0..ncols {
                    let sub = u * y[(k, j)];
                    y[(i, j)] -= sub;
                }
            }
            let d = self.packed[(i, i)];
            for j in 0..ncols {
                y[(i, j)] /= d;
            }
        }
        // x = P z
        let mut x = ComplexMatrix::zeros(n, ncols);
        for i in 0..n {
            for j in 0..ncols {
                x[(self.perm[i], j)] = y[(i, j)];
            }
        }
        x
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve(&ComplexMatrix::identity(self.packed.rows()))
    }
}

/// Inverse through the pivoted factorization; the entry point for the
/// small identity-plus-PSD capacitance blocks.
pub fn inverse_pivoted(a: &ComplexMatrix, op: &'static str) -> Result<ComplexMatrix> {
    if a.rows() == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    Ok(factor_pivoted(a, op)?.inverse())
}

/// Unitary factor Q of the plain (unpivoted) QR of a square matrix.
/// Used to orthogonalize Gaussian draws into random unitaries.
pub fn unitary_factor(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square());
    let n = a.rows();
    let mut r = a.clone();
    let mut vs: Vec<(usize, Vec<Complex64>, f64)> = Vec::new();
    for k in 0..n {
        let sigma = ((k..n).map(|i| r[(i, k)].norm_sqr()).sum::<f64>()).sqrt();
        if sigma == 0.0 {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut v: Vec<Complex64> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] += phase * sigma;
        let beta = 1.0 / (sigma * (sigma + x0.norm()));
        for j in k..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (off, vi) in v.iter().enumerate() {
                dot += vi.conj() * r[(k + off, j)];
            }
            dot *= beta;
            for (off, vi) in v.iter().enumerate() {
                let sub = dot * vi;
                r[(k + off, j)] -= sub;
            }
        }
        vs.push((k, v, beta));
    }
    // Q = H_1 H_2 ... H_p applied to I, built by applying reflectors in
    // reverse order.
    let mut q = ComplexMatrix::identity(n);
    for (k, v, beta) in vs.iter().rev() {
        for j in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (off, vi) in v.iter().enumerate() {
                dot += vi.conj() * q[(k + off, j)];
            }
            dot *= *beta;
            for (off, vi) in v.iter().enumerate() {
                let sub = dot * vi;
                q[(k + off, j)] -= sub;
            }
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn test_matrix(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |i, j| {
            c(
                ((i * 5 + j * 3 + 1) % 7) as f64 - 3.0,
                ((i * 2 + j * 7) % 5) as f64 - 2.0,
            )
        })
        .add(&ComplexMatrix::identity(n).scale_real(4.0))
    }

    #[test]
    fn pivoted_solve_round_trip() {
        let a = test_matrix(5);
        let inv = inverse_pivoted(&a, "test").unwrap();
        assert!(a.mul(&inv).rel_diff(&ComplexMatrix::identity(5)) < 1e-13);
    }

    #[test]
    fn singular_is_detected() {
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![0.5, 1.0]]).unwrap();
        assert!(matches!(
            factor_pivoted(&a, "test"),
            Err(Error::NumericallySingular { .. })
        ));
    }

    #[test]
    fn zero_sized_inverse() {
        let a = ComplexMatrix::zeros(0, 0);
        let inv = inverse_pivoted(&a, "test").unwrap();
        assert_eq!(inv.shape(), (0, 0));
    }

    #[test]
    fn unitary_factor_is_unitary() {
        let a = test_matrix(6);
        let q = unitary_factor(&a);
        let id = ComplexMatrix::identity(6);
        assert!(q.adjoint().mul(&q).rel_diff(&id) < 1e-13);
        assert!(q.mul(&q.adjoint()).rel_diff(&id) < 1e-13);
    }
}
