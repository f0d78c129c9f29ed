//! Dense complex linear algebra for Moore-Penrose inverses of low-rank
//! matrix updates.
//!
//! The crate computes `(A + U V^H)^+` from a cached `A^+` through a
//! generalized Sherman-Morrison-Woodbury identity built on the generalized
//! Schur complement `S = I + V^H A^+ U`, validates the exact applicability
//! conditions of that identity, and cross-checks results against an
//! independent SVD oracle. Supporting machinery: an SVD-based pseudoinverse
//! with Penrose-equation certificates, block-matrix and factored-form
//! pseudoinverse formulas, seeded instance generators, and Matrix Market
//! I/O.
//!
//! All matrices are immutable values; every operation is a pure function,
//! safe to call from concurrent threads.

pub mod block;
pub mod error;
pub mod generate;
pub mod linalg;
pub mod matrix;
pub mod matrix_market;
pub mod pinv;
pub mod rng;
pub mod update;

pub use block::{block_pinv, schur_complement, xny_pinv, BlockMatrix, BlockSchurFactors};
pub use error::{Error, Result};
pub use generate::{
    gen_adversarial, gen_block, gen_classic, gen_conditioned, gen_negative, gen_xny,
    oracle_pinv, write_bundle, BundleManifest, GenSpec, Regime,
};
pub use matrix::ComplexMatrix;
pub use pinv::{
    hermitian_residual, penrose_check, pinv, projectors, range_inclusion, FormulaPinv,
    InclusionCheck, PenroseReport, PinvResult, Projectors, DEFAULT_TOL,
};
pub use update::{
    check_conditions, schur_factors, smw_apply, smw_classic, smw_pinv, smw_pinv_simplified,
    ConditionReport, Provenance, SchurFactors, UpdateInstance, UpdateResult,
};
