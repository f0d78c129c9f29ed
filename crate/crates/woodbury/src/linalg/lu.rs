//! LU factorization with partial pivoting for square complex systems.

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Condition-estimate ceiling shared by the dense solvers: beyond this the
/// matrix is reported as numerically singular.
pub const COND_LIMIT: f64 = 1.0 / (f64::EPSILON * 1e3);

pub struct Lu {
    packed: ComplexMatrix,
    perm: Vec<usize>,
}

pub fn factor(a: &ComplexMatrix, op: &'static str) -> Result<Lu> {
    assert!(a.is_square(), "LU requires a square matrix");
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut max_pivot = 0.0f64;
    let mut min_pivot = f64::INFINITY;

    for k in 0..n {
        let mut best = k;
        let mut best_abs = lu[(k, k)].norm();
        for i in (k + 1)..n {
            let v = lu[(i, k)].norm();
            if v > best_abs {
                best_abs = v;
                best = i;
            }
        }
        if best != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(best, j)];
                lu[(best, j)] = tmp;
            }
            perm.swap(k, best);
        }
        let pivot = lu[(k, k)];
        let pabs = pivot.norm();
        if pabs == 0.0 {
            return Err(Error::NumericallySingular {
                op,
                cond_estimate: f64::INFINITY,
            });
        }
        max_pivot = max_pivot.max(pabs);
        min_pivot = min_pivot.min(pabs);
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            for j in (k + 1)..n {
                let sub = factor * lu[(k, j)];
                lu[(i, j)] -= sub;
            }
        }
    }
    if n > 0 && max_pivot / min_pivot > COND_LIMIT {
        return Err(Error::NumericallySingular {
            op,
            cond_estimate: max_pivot / min_pivot,
        });
    }
    Ok(Lu { packed: lu, perm })
}

impl Lu {
    /// Solve `A X = B` for a matrix right-hand side.
    pub fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.packed.rows();
        assert_eq!(b.rows(), n, "rhs row mismatch");
        let ncols = b.cols();
        let mut x = ComplexMatrix::zeros(n, ncols);
        // apply permutation
        for i in 0..n {
            for j in 0..ncols {
                x[(i, j)] = b[(self.perm[i], j)];
            }
        }
        // forward substitution with unit lower factor
        for i in 1..n {
            for k in 0..i {
                let l = self.packed[(i, k)];
                for j in 0..ncols {
                    let sub = l * x[(k, j)];
                    x[(i, j)] -= sub;
                }
            }
        }
        // back substitution
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let u = self.packed[(i, k)];
                for j in 0..ncols {
                    let sub = u * x[(k, j)];
                    x[(i, j)] -= sub;
                }
            }
            let d = self.packed[(i, i)];
            for j in 0..ncols {
                x[(i, j)] /= d;
            }
        }
        x
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve(&ComplexMatrix::identity(self.packed.rows()))
    }
}

/// Dense inverse of a square matrix; errors if numerically singular.
pub fn inverse(a: &ComplexMatrix, op: &'static str) -> Result<ComplexMatrix> {
    Ok(factor(a, op)?.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_of_hand_matrix() {
        // [[1, 1], [0, 1]]^-1 = [[1, -1], [0, 1]]
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let inv = inverse(&a, "test").unwrap();
        let expect = ComplexMatrix::from_real_rows(&[vec![1.0, -1.0], vec![0.0, 1.0]]).unwrap();
        assert!(inv.rel_diff(&expect) < 1e-15);
    }

    #[test]
    fn complex_solve_round_trip() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(2.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)],
            vec![c(0.5, 0.0), c(3.0, 0.0), c(-1.0, 2.0)],
            vec![c(0.0, 1.0), c(1.0, 1.0), c(4.0, -1.0)],
        ])
        .unwrap();
        let inv = inverse(&a, "test").unwrap();
        let id = ComplexMatrix::identity(3);
        assert!(a.mul(&inv).rel_diff(&id) < 1e-13);
        assert!(inv.mul(&a).rel_diff(&id) < 1e-13);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        match factor(&a, "test") {
            Err(Error::NumericallySingular { .. }) => {}
            other => panic!("expected singular error, got {:?}", other.is_ok()),
        }
    }
}
