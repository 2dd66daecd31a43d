//! Weak-coupling (Davies) dynamics of an N-level system linearly coupled to a
//! thermal bosonic bath, with the tools needed to check it: spectral-density
//! and correlation-function analysis, Fermi-golden-rule and level-shift
//! diagnostics, a CPTP semigroup propagator, an exact finite-bath benchmark
//! and the perturbative coupling-threshold ledger.
//!
//! Conventions used throughout:
//! - system operators live in the energy eigenbasis of `H_S` (ascending energies);
//! - matrices are vectorized by column stacking, `vec(A X B) = (B^T (x) A) vec(X)`;
//! - complex numbers are `num_complex::Complex64`.

pub mod bath;
pub mod davies;
pub mod error;
pub mod exact;
pub mod jet;
pub mod model;
pub mod quadrature;
pub mod quantum;
pub mod semigroup;
pub mod threshold;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
