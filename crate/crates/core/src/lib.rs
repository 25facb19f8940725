//! Exact-arithmetic verification engine for the twisted Heisenberg-Virasoro
//! algebra.
//!
//! The crate realizes the algebra with basis `L(m), I(m), C_L, C_I, C_LI`,
//! its bosonic Fock representation, the intermediate-series module families,
//! and a constraint solver that recovers the classification of those modules
//! on finite index windows. All arithmetic is over exact rationals.
//!
//! Module map:
//! - [`algebra`]: basis symbols, elements, the bracket, grading, Jacobi residuals.
//! - [`fock`]: Weyl generators on the Fock space, normal-ordered `f(m, n)`, the
//!   anomaly `phi` and the representation `pi`.
//! - [`families`]: action tables of the module families, module-axiom residuals,
//!   submodule scanning, simplicity and intertwiners.
//! - [`classify`]: the constraint system for `I(n)v_t = f(n, t)v_{n+t}` and the
//!   case-by-case classification.
//! - [`harness`]: verification suites and reports shared by the CLI and the
//!   acceptance tests.

pub mod algebra;
pub mod classify;
pub mod error;
pub mod families;
pub mod fock;
pub mod harness;
pub mod linalg;
pub mod sampling;
pub mod scalar;

pub use error::{Error, ParseError, Result};
pub use scalar::Scalar;

/// Sign-flip mutations used by the harness self-test to prove that each
/// suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Negates the `[L, I]` relation in the bracket and the anomaly term of
    /// the `f(m, n)` commutator formula.
    SignFlip,
}

impl Mutation {
    pub fn is_active(self) -> bool {
        self != Mutation::None
    }
}
