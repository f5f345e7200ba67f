//! Nonlinear max-product q-Bernstein operator on `[0, 1]` together with the
//! q-calculus it is built from, grid estimators for the modulus of
//! continuity, executable checks of the kernel-ratio inequalities behind its
//! approximation order, and A-statistical convergence machinery.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is a pure
//! function of its inputs; IO and file formats live in the `qbmax` crate.
//!
//! ```
//! use qbmax_core::{max_product_q_bernstein, QParam, Registered};
//!
//! let q = QParam::new(0.9).unwrap();
//! let eval = max_product_q_bernstein(&Registered::Id, 1, q, 0.25).unwrap();
//! assert!((eval.value - 1.0 / 3.0).abs() < 1e-15);
//! ```

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod function;
pub mod lemmas;
pub mod modulus;
pub mod operators;
pub mod qcalc;
pub mod statconv;

pub use error::Error;
pub use function::{Constant, DistanceFrom, FnFunction, PiecewiseLinear, Registered, TestFunction};
pub use modulus::{modulus_of_continuity, ModulusGrid};
pub use operators::{
    corollary1_bound, delta_n, linear_q_bernstein, max_product_q_bernstein, sup_error,
    theorem6_bound, MaxProductOperator, NodeSamples, PointEvaluation, DEFAULT_GRID_SIZE,
};
pub use qcalc::{
    basis_weight, basis_weight_linear, ln_q_binomial, ln_q_factorial, q_binomial, q_factorial,
    q_integer, Basis, LogWeight, QParam,
};

pub use statconv::{
    a_density_tail, a_transform, st_a_violation_mass, theorem8_harness, verify_st_limit_conditions,
    verify_st_limit_conditions_with, CustomMatrix, QSequence, StLimitReport, StTarget,
    SummabilityMatrix, Theorem8Report,
};

pub type Result<T, E = Error> = core::result::Result<T, E>;
