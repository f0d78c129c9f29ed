//! Pseudoinverse of a rank-r update `A + U V^H` through the generalized
//! Sherman-Morrison-Woodbury identity
//!
//! ```text
//! (A + U V^H)^+ = (I + A^+ U F_S U^H (A^+)^H)^-1
//!                 (A^+ - A^+ U S^+ V^H A^+)
//!                 (I + (A^+)^H V E_S V^H A^+)^-1,
//!     S = I + V^H A^+ U,   E_S = I - S S^+,   F_S = I - S^+ S,
//! ```
//!
//! together with the exact validity certificate: under the two range
//! inclusions `R(U) <= R(A)` and `R(V) <= R(A^H)`, the formula output is the
//! MP inverse iff `U E_S V^H A^+` and `A^+ U F_S V^H` are Hermitian and
//! `A^+ U F_S E_S V^H A^+ = 0`; it is always a {1}-inverse in that regime.
//! The two big inverse factors are identity-plus-PSD, so they are applied
//! through their own rank-r reduction: only r x r systems are ever solved
//! and no m x m or n x n inverse is formed.
//!
//! A note on the sufficient conditions: when all four range inclusions hold,
//! S is forced nonsingular (any x in N(S) satisfies x = -V^H A^+ U x, which
//! lies in R(V^H) = N(S)^perp, so x = 0), making E_S = F_S = 0 and
//! collapsing the formula to `A^+ - A^+ U S^-1 V^H A^+`. The full
//! three-factor form is kept because the iff-regime genuinely exercises
//! nonzero E_S and F_S.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::qr;
use crate::matrix::ComplexMatrix;
use crate::pinv::{
    hermitian_residual, penrose_check, pinv, range_inclusion, FormulaPinv, InclusionCheck,
    PenroseReport, DEFAULT_TOL,
};

/// Where an instance came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Generated,
    Loaded,
    Curated,
}

/// An `(A, U, V)` update triple with the cached pseudoinverse of `A`.
#[derive(Debug, Clone)]
pub struct UpdateInstance {
    pub a: ComplexMatrix,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub a_pinv: ComplexMatrix,
    pub provenance: Provenance,
    pub seed: Option<u64>,
}

impl UpdateInstance {
    /// Build an instance, computing `A^+` once and caching it.
    pub fn new(
        a: ComplexMatrix,
        u: ComplexMatrix,
        v: ComplexMatrix,
        provenance: Provenance,
        seed: Option<u64>,
    ) -> Result<Self> {
        let a_pinv = pinv(&a, None)?.pinv;
        Self::with_pinv(a, u, v, a_pinv, provenance, seed)
    }

    /// Build an instance around a caller-supplied `A^+`, which must pass the
    /// four Penrose equations against `A` at the default tolerance.
    pub fn with_pinv(
        a: ComplexMatrix,
        u: ComplexMatrix,
        v: ComplexMatrix,
        a_pinv: ComplexMatrix,
        provenance: Provenance,
        seed: Option<u64>,
    ) -> Result<Self> {
        if u.rows() != a.rows() || v.rows() != a.cols() || u.cols() != v.cols() {
            return Err(Error::DimensionMismatch {
                op: "UpdateInstance",
                details: format!(
                    "a is {}x{}, u is {}x{}, v is {}x{}",
                    a.rows(),
                    a.cols(),
                    u.rows(),
                    u.cols(),
                    v.rows(),
                    v.cols()
                ),
            });
        }
        let report = penrose_check(&a, &a_pinv, DEFAULT_TOL)?;
        if !report.all_pass() {
            return Err(Error::PreconditionViolation {
                op: "UpdateInstance",
                details: format!(
                    "supplied pinv fails Penrose equations, residuals {:?}",
                    report.residuals
                ),
            });
        }
        Ok(Self {
            a,
            u,
            v,
            a_pinv,
            provenance,
            seed,
        })
    }

    /// Number of update columns r (0 means "no update").
    pub fn update_cols(&self) -> usize {
        self.u.cols()
    }

    /// The perturbed matrix `A + U V^H`.
    pub fn updated(&self) -> ComplexMatrix {
        self.a.add(&self.u.mul(&self.v.adjoint()))
    }
}

/// The r x r capacitance matrix `S = I + V^H A^+ U` with its pseudoinverse,
/// projectors, and the two cached panels `H = -V^H A^+` and `K = A^+ U`.
#[derive(Debug, Clone)]
pub struct SchurFactors {
    pub s: ComplexMatrix,
    pub s_pinv: ComplexMatrix,
    /// `E_S = I - S S^+`.
    pub e_proj: ComplexMatrix,
    /// `F_S = I - S^+ S`.
    pub f_proj: ComplexMatrix,
    /// `H = -V^H A^+` (r x n).
    pub h: ComplexMatrix,
    /// `K = A^+ U` (n x r).
    pub k: ComplexMatrix,
    pub s_nonsingular: bool,
}

pub fn schur_factors(inst: &UpdateInstance, rank_tol: Option<f64>) -> Result<SchurFactors> {
    let r = inst.update_cols();
    let vh_apinv = inst.v.adjoint().mul(&inst.a_pinv); // r x m
    let k = inst.a_pinv.mul(&inst.u); // n x r
    let s = ComplexMatrix::identity(r).add(&inst.v.adjoint().mul(&k));
    let s_res = pinv(&s, rank_tol)?;
    let s_pinv = s_res.pinv;
    let e_proj = ComplexMatrix::identity(r).sub(&s.mul(&s_pinv));
    let f_proj = ComplexMatrix::identity(r).sub(&s_pinv.mul(&s));
    Ok(SchurFactors {
        s,
        s_pinv,
        e_proj,
        f_proj,
        h: vh_apinv.scale_real(-1.0),
        k,
        s_nonsingular: s_res.numerical_rank == r,
    })
}

/// Residuals and verdicts for the applicability conditions of the update
/// formula.
///
/// * `verdict_sufficient`: all four range inclusions hold. Sufficient for
///   the formula to produce the MP inverse.
/// * `verdict_exact`: the necessary-and-sufficient certificate, evaluated
///   only when the two A-range inclusions hold: `U E_S V^H A^+` and
///   `A^+ U F_S V^H` Hermitian and `A^+ U F_S E_S V^H A^+ = 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub u_in_range_a: InclusionCheck,
    pub v_in_range_a_adj: InclusionCheck,
    pub u_adj_in_range_s: InclusionCheck,
    pub v_adj_in_range_s_adj: InclusionCheck,
    /// Hermitian residual of `U E_S V^H A^+`.
    pub herm_ue: f64,
    /// Hermitian residual of `A^+ U F_S V^H`.
    pub herm_uf: f64,
    /// `||A^+ U F_S E_S V^H A^+||_F / max(1, ||A^+ U||_F ||V^H A^+||_F)`.
    pub zero_middle: f64,
    pub verdict_sufficient: bool,
    pub verdict_exact: bool,
    pub tol: f64,
}

pub fn check_conditions(
    inst: &UpdateInstance,
    factors: &SchurFactors,
    tol: f64,
) -> Result<ConditionReport> {
    let u_in_range_a = range_inclusion(&inst.u, &inst.a, &inst.a_pinv, tol)?;
    let a_adj = inst.a.adjoint();
    let a_pinv_adj = inst.a_pinv.adjoint();
    let v_in_range_a_adj = range_inclusion(&inst.v, &a_adj, &a_pinv_adj, tol)?;

    // R(U^H) <= R(S) iff E_S U^H = 0; R(V^H) <= R(S^H) iff F_S V^H = 0.
    let u_adj = inst.u.adjoint();
    let v_adj = inst.v.adjoint();
    let r1 = factors.e_proj.mul(&u_adj).frobenius_norm() / u_adj.frobenius_norm().max(1.0);
    let r2 = factors.f_proj.mul(&v_adj).frobenius_norm() / v_adj.frobenius_norm().max(1.0);
    let u_adj_in_range_s = InclusionCheck {
        included: r1 <= tol,
        residual: r1,
    };
    let v_adj_in_range_s_adj = InclusionCheck {
        included: r2 <= tol,
        residual: r2,
    };

    let vh_apinv = factors.h.scale_real(-1.0); // V^H A^+, r x m
    let ue_va = inst.u.mul(&factors.e_proj).mul(&vh_apinv); // m x m
    let herm_ue = hermitian_residual(&ue_va)?;
    let kf_vh = factors.k.mul(&factors.f_proj).mul(&v_adj); // n x n
    let herm_uf = hermitian_residual(&kf_vh)?;

    let middle = factors
        .k
        .mul(&factors.f_proj)
        .mul(&factors.e_proj)
        .mul(&vh_apinv);
    let zero_middle = middle.frobenius_norm()
        / (factors.k.frobenius_norm() * vh_apinv.frobenius_norm()).max(1.0);

    let a_inclusions = u_in_range_a.included && v_in_range_a_adj.included;
    let verdict_sufficient = a_inclusions
        && u_adj_in_range_s.included
        && v_adj_in_range_s_adj.included;
    let verdict_exact =
        a_inclusions && herm_ue <= tol && herm_uf <= tol && zero_middle <= tol;

    Ok(ConditionReport {
        u_in_range_a,
        v_in_range_a_adj,
        u_adj_in_range_s,
        v_adj_in_range_s_adj,
        herm_ue,
        herm_uf,
        zero_middle,
        verdict_sufficient,
        verdict_exact,
        tol,
    })
}

/// Output of [`smw_pinv`]: the formula result stamped with the condition
/// report it was computed under and the Penrose residuals against
/// `A + U V^H`.
#[derive(Debug, Clone)]
pub struct UpdateResult {
    pub pinv: ComplexMatrix,
    pub penrose: PenroseReport,
    pub conditions: ConditionReport,
    pub tol: f64,
}

/// Evaluate the update formula itself: the timed kernel. Cost is
/// O((m + n) r^2) plus the r-column panel products against the cached
/// `A^+`; no m x m or n x n system is ever formed or solved.
pub fn smw_apply(inst: &UpdateInstance, factors: &SchurFactors) -> Result<ComplexMatrix> {
    let r = inst.update_cols();
    if r == 0 {
        return Ok(inst.a_pinv.clone());
    }
    let k = &factors.k; // n x r
    let vh_apinv = factors.h.scale_real(-1.0); // r x m
    let w = vh_apinv.adjoint(); // (A^+)^H V, m x r

    // middle factor: A^+ - K S^+ (V^H A^+)
    let mid = inst.a_pinv.sub(&k.mul(&factors.s_pinv.mul(&vh_apinv)));

    // left factor applied through its rank-r reduction:
    // (I + K F K^H)^-1 X = X - K (I + F K^H K)^-1 F (K^H X)
    let c1 = ComplexMatrix::identity(r).add(&factors.f_proj.mul(&k.adjoint().mul(k)));
    let c1_inv = qr::inverse_pivoted(&c1, "update inner solve").map_err(corrupted_inner)?;
    let left_applied = mid.sub(&k.mul(&c1_inv.mul(&factors.f_proj.mul(&k.adjoint().mul(&mid)))));

    // right factor: X (I + W E W^H)^-1 = X - ((X W) (I + E W^H W)^-1 E) W^H
    let c2 = ComplexMatrix::identity(r).add(&factors.e_proj.mul(&w.adjoint().mul(&w)));
    let c2_inv = qr::inverse_pivoted(&c2, "update inner solve").map_err(corrupted_inner)?;
    let xw = left_applied.mul(&w);
    Ok(left_applied.sub(&xw.mul(&c2_inv).mul(&factors.e_proj).mul(&w.adjoint())))
}

/// The identity-plus-PSD structure of the inner systems makes them
/// nonsingular by construction, so a singular solve means the inputs are
/// corrupted, not that the formula hit a hard case.
fn corrupted_inner(err: Error) -> Error {
    match err {
        Error::NumericallySingular { cond_estimate, .. } => Error::PreconditionViolation {
            op: "smw_pinv",
            details: format!(
                "inner capacitance system is numerically singular (condition estimate \
                 {cond_estimate:.3e}); the factors do not belong to a well-formed instance"
            ),
        },
        other => other,
    }
}

/// Full update operation: evaluates the formula unconditionally and stamps
/// the result with the caller's condition report. When
/// `conditions.verdict_exact` holds, the result passes the four Penrose
/// equations against `A + U V^H` at the same tolerance.
pub fn smw_pinv(
    inst: &UpdateInstance,
    factors: &SchurFactors,
    conditions: &ConditionReport,
    tol: f64,
) -> Result<UpdateResult> {
    let z = smw_apply(inst, factors)?;
    let penrose = penrose_check(&inst.updated(), &z, tol)?;
    Ok(UpdateResult {
        pinv: z,
        penrose,
        conditions: conditions.clone(),
        tol,
    })
}

/// The collapsed form `A^+ - A^+ U S^+ V^H A^+`, valid when `S` is
/// nonsingular or when all four of `R(U^H), R(V^H) <= R(S) ∩ R(S^H)` hold.
/// In the nonsingular regime `S^+` coincides with `S^-1` to machine
/// precision.
pub fn smw_pinv_simplified(
    inst: &UpdateInstance,
    factors: &SchurFactors,
    tol: f64,
) -> Result<FormulaPinv> {
    let r = inst.update_cols();
    if r > 0 && !factors.s_nonsingular {
        // fall back to the mutual-inclusion hypotheses
        let u_adj = inst.u.adjoint();
        let v_adj = inst.v.adjoint();
        let residuals = [
            factors.e_proj.mul(&u_adj).frobenius_norm() / u_adj.frobenius_norm().max(1.0),
            factors.f_proj.mul(&u_adj).frobenius_norm() / u_adj.frobenius_norm().max(1.0),
            factors.e_proj.mul(&v_adj).frobenius_norm() / v_adj.frobenius_norm().max(1.0),
            factors.f_proj.mul(&v_adj).frobenius_norm() / v_adj.frobenius_norm().max(1.0),
        ];
        if residuals.iter().any(|&x| x > tol) {
            return Err(Error::PreconditionViolation {
                op: "smw_pinv_simplified",
                details: format!(
                    "capacitance matrix is singular and the mutual range inclusions fail \
                     (residuals {residuals:?} vs tol {tol:.1e})"
                ),
            });
        }
    }
    let vh_apinv = factors.h.scale_real(-1.0);
    let z = inst
        .a_pinv
        .sub(&factors.k.mul(&factors.s_pinv.mul(&vh_apinv)));
    let penrose = penrose_check(&inst.updated(), &z, tol)?;
    Ok(FormulaPinv {
        pinv: z,
        penrose,
        tol,
    })
}

/// Classic rank-r update of an explicit inverse:
/// `(A + U V^H)^-1 = A^-1 - A^-1 U (I + V^H A^-1 U)^-1 V^H A^-1`.
/// `a_inv` must be the inverse of a nonsingular square `A`.
pub fn smw_classic(
    a_inv: &ComplexMatrix,
    u: &ComplexMatrix,
    v: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if !a_inv.is_square() || u.rows() != a_inv.rows() || v.rows() != a_inv.rows()
        || u.cols() != v.cols()
    {
        return Err(Error::DimensionMismatch {
            op: "smw_classic",
            details: format!(
                "a_inv is {}x{}, u is {}x{}, v is {}x{}",
                a_inv.rows(),
                a_inv.cols(),
                u.rows(),
                u.cols(),
                v.rows(),
                v.cols()
            ),
        });
    }
    let r = u.cols();
    if r == 0 {
        return Ok(a_inv.clone());
    }
    let ainv_u = a_inv.mul(u);
    let capacitance = ComplexMatrix::identity(r).add(&v.adjoint().mul(&ainv_u));
    let cap_inv = match qr::inverse_pivoted(&capacitance, "smw_classic") {
        Err(Error::NumericallySingular { cond_estimate, .. }) => {
            return Err(Error::PreconditionViolation {
                op: "smw_classic",
                details: format!(
                    "capacitance matrix I + V^H A^-1 U is numerically singular \
                     (condition estimate {cond_estimate:.3e})"
                ),
            })
        }
        other => other?,
    };
    let vh_ainv = v.adjoint().mul(a_inv);
    Ok(a_inv.sub(&ainv_u.mul(&cap_inv).mul(&vh_ainv)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn curated_negative() -> UpdateInstance {
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let u = ComplexMatrix::from_real_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let v = ComplexMatrix::from_real_rows(&[vec![-1.0], vec![0.0]]).unwrap();
        UpdateInstance::new(a, u, v, Provenance::Curated, None).unwrap()
    }

    #[test]
    fn schur_factors_scalar_case() {
        // A = I2, U = V = e1: S = [2], S^+ = [0.5], E = F = [0].
        let a = ComplexMatrix::identity(2);
        let e1 = ComplexMatrix::from_real_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let inst =
            UpdateInstance::new(a, e1.clone(), e1, Provenance::Curated, None).unwrap();
        let f = schur_factors(&inst, None).unwrap();
        assert!((f.s[(0, 0)] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((f.s_pinv[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!(f.e_proj.frobenius_norm() < 1e-15);
        assert!(f.f_proj.frobenius_norm() < 1e-15);
        assert!(f.s_nonsingular);
    }

    #[test]
    fn schur_factors_empty_update() {
        let a = ComplexMatrix::identity(2);
        let inst = UpdateInstance::new(
            a,
            ComplexMatrix::empty_cols(2),
            ComplexMatrix::empty_cols(2),
            Provenance::Curated,
            None,
        )
        .unwrap();
        let f = schur_factors(&inst, None).unwrap();
        assert_eq!(f.s.shape(), (0, 0));
        assert!(f.s_nonsingular);
    }

    #[test]
    fn schur_factors_curated_singular() {
        let inst = curated_negative();
        let f = schur_factors(&inst, None).unwrap();
        assert!(f.s[(0, 0)].norm() < 1e-15);
        assert!(f.s_pinv[(0, 0)].norm() < 1e-15);
        assert!((f.e_proj[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((f.f_proj[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(!f.s_nonsingular);
    }

    #[test]
    fn curated_conditions_fail_only_zero_middle() {
        let inst = curated_negative();
        let f = schur_factors(&inst, None).unwrap();
        let rep = check_conditions(&inst, &f, DEFAULT_TOL).unwrap();
        assert!(rep.u_in_range_a.included);
        assert!(rep.v_in_range_a_adj.included);
        assert!(!rep.u_adj_in_range_s.included);
        assert!(rep.herm_ue <= DEFAULT_TOL);
        assert!(rep.herm_uf <= DEFAULT_TOL);
        assert!((rep.zero_middle - 1.0).abs() < 1e-14);
        assert!(!rep.verdict_sufficient);
        assert!(!rep.verdict_exact);
    }

    #[test]
    fn curated_formula_value_and_penrose_pattern() {
        let inst = curated_negative();
        let f = schur_factors(&inst, None).unwrap();
        let rep = check_conditions(&inst, &f, DEFAULT_TOL).unwrap();
        let res = smw_pinv(&inst, &f, &rep, DEFAULT_TOL).unwrap();
        let expect =
            ComplexMatrix::from_real_rows(&[vec![0.25, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(res.pinv.sub(&expect).max_abs() < 1e-15);
        // A + UV^H = 0, so eq (1) holds trivially, eq (2) fails, and the
        // symmetry equations hold because AZ = ZA = 0.
        assert!(res.penrose.passes[0]);
        assert!(!res.penrose.passes[1]);
        assert!(res.penrose.passes[2]);
        assert!(res.penrose.passes[3]);
        // {1}-inverse property: trivially 0 = 0 here.
        let t = inst.updated();
        assert!(t.mul(&res.pinv).mul(&t).sub(&t).frobenius_norm() < 1e-15);
    }

    #[test]
    fn empty_update_returns_cached_pinv_exactly() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.5), c(0.0, -1.0)],
            vec![c(2.0, 0.0), c(1.0, 1.0)],
            vec![c(0.0, 0.0), c(3.0, -2.0)],
        ])
        .unwrap();
        let inst = UpdateInstance::new(
            a,
            ComplexMatrix::empty_cols(3),
            ComplexMatrix::empty_cols(2),
            Provenance::Curated,
            None,
        )
        .unwrap();
        let f = schur_factors(&inst, None).unwrap();
        let z = smw_apply(&inst, &f).unwrap();
        assert_eq!(z, inst.a_pinv);
    }

    #[test]
    fn zero_update_columns_return_cached_pinv_exactly() {
        // U = 0 with r = 2: the formula collapses without the early return.
        let a = ComplexMatrix::identity(3);
        let inst = UpdateInstance::new(
            a,
            ComplexMatrix::zeros(3, 2),
            ComplexMatrix::zeros(3, 2),
            Provenance::Curated,
            None,
        )
        .unwrap();
        let f = schur_factors(&inst, None).unwrap();
        let z = smw_apply(&inst, &f).unwrap();
        assert!(z.rel_diff(&inst.a_pinv) == 0.0);
        let simplified = smw_pinv_simplified(&inst, &f, DEFAULT_TOL).unwrap();
        assert!(simplified.pinv.rel_diff(&inst.a_pinv) == 0.0);
    }

    #[test]
    fn classic_rank_one_hand_formula() {
        // A = I: (I + u v^H)^-1 = I - u v^H / (1 + v^H u).
        let u = ComplexMatrix::from_rows(&[vec![c(1.0, 1.0)], vec![c(0.0, -2.0)]]).unwrap();
        let v = ComplexMatrix::from_rows(&[vec![c(0.5, 0.0)], vec![c(1.0, 1.0)]]).unwrap();
        let i2 = ComplexMatrix::identity(2);
        let got = smw_classic(&i2, &u, &v).unwrap();
        let vhu = v.adjoint().mul(&u)[(0, 0)];
        let expect = i2.sub(
            &u.mul(&v.adjoint())
                .scale(Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) + vhu)),
        );
        assert!(got.rel_diff(&expect) < 1e-14);
    }

    #[test]
    fn classic_empty_update_is_inverse() {
        let a_inv = ComplexMatrix::identity(3).scale_real(0.5);
        let got = smw_classic(
            &a_inv,
            &ComplexMatrix::empty_cols(3),
            &ComplexMatrix::empty_cols(3),
        )
        .unwrap();
        assert_eq!(got, a_inv);
    }

    #[test]
    fn classic_rejects_singular_capacitance() {
        // A = I, u = e1, v = -e1: 1 + v^H u = 0.
        let i2 = ComplexMatrix::identity(2);
        let u = ComplexMatrix::from_real_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let v = ComplexMatrix::from_real_rows(&[vec![-1.0], vec![0.0]]).unwrap();
        assert!(matches!(
            smw_classic(&i2, &u, &v),
            Err(Error::PreconditionViolation { .. })
        ));
    }

    #[test]
    fn simplified_rejects_when_hypotheses_fail() {
        // Curated negative: S singular, and R(U^H) not inside R(S) = {0}.
        let inst = curated_negative();
        let f = schur_factors(&inst, None).unwrap();
        assert!(matches!(
            smw_pinv_simplified(&inst, &f, DEFAULT_TOL),
            Err(Error::PreconditionViolation { .. })
        ));
    }
}
