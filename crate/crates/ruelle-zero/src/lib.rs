//! Divisor order and lead Laurent coefficient at `s = 0` of twisted Ruelle
//! zeta functions on finite-area hyperbolic orbifolds.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: orbifold signatures, multiplier-system eigenvalue data and the
//!   combinatorial profile (`r_j(ℓ)`, `τ₀`, `τ̃₀`) derived from them.
//! * [`special`]: log-Gamma, Barnes G, Hurwitz zeta, digamma, sine products
//!   and the exact [`special::FactoredMagnitude`] algebra.
//! * [`funceq`]: the Selberg factor `κ(s)` and the Ruelle factors `H`, `H₁`.
//! * [`leadterm`]: orders and lead coefficients of `R(s; χ)` at zero.
//! * [`torsion`]: Reidemeister torsion of Seifert fibered spaces and the
//!   Fried-type comparisons.
//! * [`congruence`]: `Γ₀(N)` with a Dirichlet character, fully explicit.

pub mod congruence;
pub mod error;
pub mod funceq;
pub mod leadterm;
pub mod model;
pub mod special;
pub mod suites;
pub mod torsion;

pub use error::{Error, Result};
