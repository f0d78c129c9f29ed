//! Pseudoinverses of structured matrices: the two-by-two block formula with
//! a generalized Schur complement, and the factored form `M = X N Y` with
//! nonsingular outer factors. Both paths enforce their hypotheses strictly:
//! outside them the formulas are meaningless, so a violation is an error
//! rather than a stamped verdict.

use crate::error::{Error, Result};
use crate::linalg::{cholesky, lu};
use crate::matrix::ComplexMatrix;
use crate::pinv::{penrose_check, pinv, range_inclusion, FormulaPinv};

/// A two-by-two block matrix laid out as `[[a, c], [b, d]]` with
/// `a: p x q`, `b: r x q`, `c: p x s`, `d: r x s`.
#[derive(Debug, Clone)]
pub struct BlockMatrix {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
}

impl BlockMatrix {
    pub fn new(
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
    ) -> Result<Self> {
        if b.cols() != a.cols() || c.rows() != a.rows() || d.rows() != b.rows()
            || d.cols() != c.cols()
        {
            return Err(Error::DimensionMismatch {
                op: "BlockMatrix",
                details: format!(
                    "a {}x{}, b {}x{}, c {}x{}, d {}x{}",
                    a.rows(),
                    a.cols(),
                    b.rows(),
                    b.cols(),
                    c.rows(),
                    c.cols(),
                    d.rows(),
                    d.cols()
                ),
            });
        }
        Ok(Self { a, b, c, d })
    }

    /// The assembled `(p + r) x (q + s)` matrix.
    pub fn assemble(&self) -> ComplexMatrix {
        ComplexMatrix::from_blocks(&self.a, &self.c, &self.b, &self.d)
    }
}

/// Generalized Schur complement `S = D - B A^+ C` with the shared factors
/// of the block inversion formula: panels `H = B A^+`, `K = A^+ C`, the
/// Hermitian-positive-definite inner inverses `Phi = (I + H^H E_S H)^-1`
/// and `Psi = (I + K F_S K^H)^-1`, and `Sigma = Psi (A^+ + K S^+ H) Phi`.
#[derive(Debug, Clone)]
pub struct BlockSchurFactors {
    pub s: ComplexMatrix,
    pub s_pinv: ComplexMatrix,
    pub e_proj: ComplexMatrix,
    pub f_proj: ComplexMatrix,
    pub h: ComplexMatrix,
    pub k: ComplexMatrix,
    pub phi: ComplexMatrix,
    pub psi: ComplexMatrix,
    pub sigma: ComplexMatrix,
}

pub fn schur_complement(
    m: &BlockMatrix,
    a_pinv: &ComplexMatrix,
    rank_tol: Option<f64>,
) -> Result<BlockSchurFactors> {
    if a_pinv.shape() != (m.a.cols(), m.a.rows()) {
        return Err(Error::DimensionMismatch {
            op: "schur_complement",
            details: "pinv shape does not match the leading block".into(),
        });
    }
    let h = m.b.mul(a_pinv); // r x p
    let k = a_pinv.mul(&m.c); // q x s
    let s = m.d.sub(&m.b.mul(&a_pinv.mul(&m.c))); // r x s
    let s_res = pinv(&s, rank_tol)?;
    let s_pinv = s_res.pinv; // s x r
    let e_proj = ComplexMatrix::identity(s.rows()).sub(&s.mul(&s_pinv));
    let f_proj = ComplexMatrix::identity(s.cols()).sub(&s_pinv.mul(&s));

    let p = m.a.rows();
    let q = m.a.cols();
    let phi_sys = ComplexMatrix::identity(p).add(&h.adjoint().mul(&e_proj).mul(&h));
    let phi = cholesky::inverse(&phi_sys, "schur_complement phi")?;
    let psi_sys = ComplexMatrix::identity(q).add(&k.mul(&f_proj).mul(&k.adjoint()));
    let psi = cholesky::inverse(&psi_sys, "schur_complement psi")?;
    let sigma = psi.mul(&a_pinv.add(&k.mul(&s_pinv).mul(&h))).mul(&phi);

    Ok(BlockSchurFactors {
        s,
        s_pinv,
        e_proj,
        f_proj,
        h,
        k,
        phi,
        psi,
        sigma,
    })
}

/// Pseudoinverse of the assembled block matrix, valid under
/// `R(B^H) <= R(A^H)` and `R(C) <= R(A)`; both are checked and a failure is
/// reported with its residuals.
pub fn block_pinv(m: &BlockMatrix, tol: f64) -> Result<FormulaPinv> {
    let a_pinv = pinv(&m.a, None)?.pinv;
    let b_cols_chk = range_inclusion(&m.b.adjoint(), &m.a.adjoint(), &a_pinv.adjoint(), tol)?;
    let c_chk = range_inclusion(&m.c, &m.a, &a_pinv, tol)?;
    if !b_cols_chk.included || !c_chk.included {
        return Err(Error::PreconditionViolation {
            op: "block_pinv",
            details: format!(
                "range inclusions fail: ||E_(A^H) B^H|| residual {:.3e}, ||E_A C|| residual \
                 {:.3e} (tol {:.1e})",
                b_cols_chk.residual, c_chk.residual, tol
            ),
        });
    }

    let f = schur_complement(m, &a_pinv, None)?;
    let tl = f.sigma.clone();
    let tr = f
        .sigma
        .mul(&f.h.adjoint())
        .mul(&f.e_proj)
        .sub(&f.psi.mul(&f.k).mul(&f.s_pinv));
    let bl = f
        .f_proj
        .mul(&f.k.adjoint())
        .mul(&f.sigma)
        .sub(&f.s_pinv.mul(&f.h).mul(&f.phi));
    let br = f
        .s_pinv
        .sub(&f.s_pinv.mul(&f.h).mul(&f.phi).mul(&f.h.adjoint()).mul(&f.e_proj))
        .sub(&f.f_proj.mul(&f.k.adjoint()).mul(&f.psi).mul(&f.k).mul(&f.s_pinv))
        .add(
            &f.f_proj
                .mul(&f.k.adjoint())
                .mul(&f.sigma)
                .mul(&f.h.adjoint())
                .mul(&f.e_proj),
        );
    let z = ComplexMatrix::from_blocks(&tl, &tr, &bl, &br);
    let penrose = penrose_check(&m.assemble(), &z, tol)?;
    Ok(FormulaPinv {
        pinv: z,
        penrose,
        tol,
    })
}

/// Pseudoinverse of `M = X N Y` for nonsingular `X`, `Y` satisfying
/// `X E_N = E_N` and `F_N Y = F_N`:
///
/// ```text
/// M^+ = (I + L^H)(I + L L^H)^-1 Y^-1 N^+ X^-1 (I + R^H R)^-1 (I + R^H),
/// R = E_N (I - X^-1),  L = (I - Y^-1) F_N.
/// ```
pub fn xny_pinv(
    x: &ComplexMatrix,
    n: &ComplexMatrix,
    y: &ComplexMatrix,
    tol: f64,
) -> Result<FormulaPinv> {
    if !x.is_square() || x.rows() != n.rows() || !y.is_square() || y.rows() != n.cols() {
        return Err(Error::DimensionMismatch {
            op: "xny_pinv",
            details: format!(
                "x {}x{}, n {}x{}, y {}x{}",
                x.rows(),
                x.cols(),
                n.rows(),
                n.cols(),
                y.rows(),
                y.cols()
            ),
        });
    }
    let n_pinv = pinv(n, None)?.pinv;
    let e_n = ComplexMatrix::identity(n.rows()).sub(&n.mul(&n_pinv));
    let f_n = ComplexMatrix::identity(n.cols()).sub(&n_pinv.mul(n));

    let x_inv = lu::inverse(x, "xny_pinv x")?;
    let y_inv = lu::inverse(y, "xny_pinv y")?;

    let cond_x = x.mul(&e_n).sub(&e_n).frobenius_norm() / e_n.frobenius_norm().max(1.0);
    let cond_y = f_n.mul(y).sub(&f_n).frobenius_norm() / f_n.frobenius_norm().max(1.0);
    if cond_x > tol || cond_y > tol {
        return Err(Error::PreconditionViolation {
            op: "xny_pinv",
            details: format!(
                "projector conditions fail: ||X E_N - E_N|| residual {cond_x:.3e}, \
                 ||F_N Y - F_N|| residual {cond_y:.3e} (tol {tol:.1e})"
            ),
        });
    }

    let r_mat = e_n.mul(&ComplexMatrix::identity(x.rows()).sub(&x_inv));
    let l_mat = ComplexMatrix::identity(y.rows()).sub(&y_inv).mul(&f_n);

    let left_sys = ComplexMatrix::identity(l_mat.rows()).add(&l_mat.mul(&l_mat.adjoint()));
    let left_inv = cholesky::inverse(&left_sys, "xny_pinv left")?;
    let right_sys = ComplexMatrix::identity(r_mat.rows()).add(&r_mat.adjoint().mul(&r_mat));
    let right_inv = cholesky::inverse(&right_sys, "xny_pinv right")?;

    let left = ComplexMatrix::identity(l_mat.rows())
        .add(&l_mat.adjoint())
        .mul(&left_inv)
        .mul(&y_inv);
    let right = x_inv
        .mul(&right_inv)
        .mul(&ComplexMatrix::identity(r_mat.rows()).add(&r_mat.adjoint()));
    let z = left.mul(&n_pinv).mul(&right);

    let target = x.mul(n).mul(y);
    let penrose = penrose_check(&target, &z, tol)?;
    Ok(FormulaPinv {
        pinv: z,
        penrose,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pinv::DEFAULT_TOL;

    #[test]
    fn schur_complement_decoupled_blocks() {
        // B = 0, C = 0: S = D, H = 0, K = 0, Phi = Psi = I, Sigma = A^+.
        let a = ComplexMatrix::from_real_rows(&[vec![2.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let a_pinv = pinv(&a, None).unwrap().pinv;
        let m = BlockMatrix::new(
            a,
            ComplexMatrix::zeros(1, 2),
            ComplexMatrix::zeros(2, 1),
            ComplexMatrix::from_real_rows(&[vec![3.0]]).unwrap(),
        )
        .unwrap();
        let f = schur_complement(&m, &a_pinv, None).unwrap();
        assert!(f.s.rel_diff(&m.d) < 1e-15);
        assert_eq!(f.h.frobenius_norm(), 0.0);
        assert_eq!(f.k.frobenius_norm(), 0.0);
        assert!(f.phi.rel_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(f.psi.rel_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(f.sigma.rel_diff(&a_pinv) < 1e-15);
    }

    #[test]
    fn schur_complement_identity_leading_block() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0]]).unwrap();
        let c = ComplexMatrix::from_real_rows(&[vec![3.0], vec![-1.0]]).unwrap();
        let d = ComplexMatrix::from_real_rows(&[vec![5.0]]).unwrap();
        let m = BlockMatrix::new(a.clone(), b.clone(), c.clone(), d.clone()).unwrap();
        let f = schur_complement(&m, &a, None).unwrap();
        let expect = d.sub(&b.mul(&c));
        assert!(f.s.rel_diff(&expect) < 1e-15);
    }

    #[test]
    fn block_pinv_decoupled_is_direct_sum() {
        let a = ComplexMatrix::from_real_rows(&[vec![2.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let m = BlockMatrix::new(
            a,
            ComplexMatrix::zeros(1, 2),
            ComplexMatrix::zeros(2, 1),
            ComplexMatrix::from_real_rows(&[vec![3.0]]).unwrap(),
        )
        .unwrap();
        let res = block_pinv(&m, DEFAULT_TOL).unwrap();
        let expect = ComplexMatrix::from_real_rows(&[
            vec![0.5, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0 / 3.0],
        ])
        .unwrap();
        assert!(res.pinv.rel_diff(&expect) < 1e-15);
        assert!(res.penrose.all_pass());
    }

    #[test]
    fn block_pinv_rejects_failed_inclusions() {
        // A = diag(1, 0) has a proper range; C = e2 sits outside it.
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let m = BlockMatrix::new(
            a,
            ComplexMatrix::zeros(1, 2),
            ComplexMatrix::from_real_rows(&[vec![0.0], vec![1.0]]).unwrap(),
            ComplexMatrix::from_real_rows(&[vec![1.0]]).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            block_pinv(&m, DEFAULT_TOL),
            Err(Error::PreconditionViolation { .. })
        ));
    }

    #[test]
    fn xny_identity_factors_return_n_pinv_exactly() {
        let n = ComplexMatrix::from_real_rows(&[vec![2.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let i2 = ComplexMatrix::identity(2);
        let res = xny_pinv(&i2, &n, &i2, DEFAULT_TOL).unwrap();
        let expect = pinv(&n, None).unwrap().pinv;
        assert_eq!(res.pinv, expect);
        assert!(res.penrose.all_pass());
    }

    #[test]
    fn xny_nonsingular_n_is_triple_inverse() {
        let n = ComplexMatrix::from_real_rows(&[vec![2.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let x = ComplexMatrix::from_real_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        let y = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![-0.25, 1.0]]).unwrap();
        // N nonsingular: E_N = F_N = 0, conditions vacuous.
        let res = xny_pinv(&x, &n, &y, DEFAULT_TOL).unwrap();
        let direct = lu::inverse(&x.mul(&n).mul(&y), "test").unwrap();
        assert!(res.pinv.rel_diff(&direct) < 1e-13);
    }

    #[test]
    fn xny_rejects_singular_outer_factor() {
        let n = ComplexMatrix::identity(2);
        let x = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            xny_pinv(&x, &n, &ComplexMatrix::identity(2), DEFAULT_TOL),
            Err(Error::NumericallySingular { .. })
        ));
    }

    #[test]
    fn xny_rejects_violated_projector_condition() {
        // N = diag(1, 0) has E_N = diag(0, 1); X shifts e2 off the
        // condition X E_N = E_N.
        let n = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let x = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            xny_pinv(&x, &n, &ComplexMatrix::identity(2), DEFAULT_TOL),
            Err(Error::PreconditionViolation { .. })
        ));
    }
}
