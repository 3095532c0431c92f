//! Spectral machinery for the onset of surface superconductivity.
//!
//! The crate computes, from scratch and without external linear-algebra
//! dependencies:
//!
//! - **`model_operator`** — the half-line Neumann operator
//!   `h(ζ) = −d²/dτ² + (τ+ζ)²`, its band function `μ(ζ)`, the minimizing
//!   `ξ₀`, the de Gennes constant `Θ₀ = μ(ξ₀) = ξ₀²` and the universal
//!   constants `C₁ = u₀(0)²/3`, `I₂`, `δ₀`, `C₀` derived from the ground
//!   state `u₀` and the regularized resolvent `R₀`.
//! - **`perturbation`** — the formal expansion
//!   `𝔥(δ,B) = 𝔥₀ + B^(−1/2)𝔥₁ + B^(−1)𝔥₂`, the eigenvalue corrections
//!   `λ₁ = −C₁` and the quadratic `λ₂(δ)`, and the two-corrector trial
//!   state with its residual.
//! - **`disc_spectrum`** — the lowest magnetic Neumann eigenvalue `λ₁(B)`
//!   on the unit disc, computed both by the exact angular-momentum
//!   reduction and by the weighted boundary-coordinate problem
//!   `e_{δ,B}`, together with one-sided derivatives and normal decay
//!   profiles.
//! - **`critical_field`** — inversion of `λ₁(κH) = κ²` to obtain the
//!   local third critical field `H_C3(κ)` and the lower/upper local
//!   fields.
//! - **`boundary_gauge`** — tubular boundary coordinates, the gauge
//!   normal form `Ā₁ = γ₀ − t + t²k(s)/2 + t²b(s,t)` and the weighted
//!   quadratic-form coefficients used by the boundary solver.
//!
//! All solvers are deterministic pure functions of their inputs; records
//! are immutable after construction and safe to share across threads.

#![allow(clippy::needless_range_loop)] // stencil code reads better indexed
#![allow(clippy::neg_cmp_op_on_partial_ord)] // !(x > 0) guards reject NaN

pub mod boundary_gauge;
pub mod critical_field;
pub mod disc_spectrum;
pub mod grid;
pub mod linalg;
pub mod model_operator;
pub mod perturbation;

pub use grid::HalfLineGrid;
pub use model_operator::{DeGennesConstants, GroundMode, ModelOperator};
