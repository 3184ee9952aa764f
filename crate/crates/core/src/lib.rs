//! Exact solvers for the discrete optimal fair exchange problem.
//!
//! Participants hold supplies `π⁺` of goods and wish to receive demands
//! `π⁻`; an exchange plan `γ(i, j, s)` moves good `s` from `i` to `j`. A plan
//! is admissible when it stays under both caps and every participant sends
//! exactly as much value as it receives. The crate maximizes the exchanged
//! value by three routes that must agree exactly:
//!
//! * [`primal::solve_direct`]: the three-index LP over `γ`;
//! * [`primal::solve_via_reduction`]: the two-index LP over the projections
//!   `(σ⁺, σ⁻)`, followed by conditional-product gluing;
//! * [`dcot::solve_via_dcot`]: for disjoint supply/demand supports, a
//!   transport problem with a density cap.
//!
//! [`dual`] produces optimality certificates (prices and potentials) and
//! [`feasibility`] holds subset-enumeration oracles for capped marginal
//! problems. All arithmetic is exact over the rationals.

pub mod dcot;
pub mod dual;
pub mod error;
pub mod feasibility;
pub mod harness;
pub mod lp;
pub mod model;
pub mod primal;
pub mod rational;

pub use error::{Error, Result};
pub use model::{ExchangeInstance, ExchangePlan, Good, Measure, PairPlan, Participant};
pub use rational::Rational;
