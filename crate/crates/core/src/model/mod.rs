//! Instances, plans and measures of the exchange problem.

mod ids;
pub mod io;
mod instance;
mod measure;
mod normalize;
mod plan;

pub use ids::{cell, flow, Cell, Flow, Good, Participant};
pub use instance::{ExchangeInstance, PlanViolation, SelfLoops, Side, Violation};
pub use measure::Measure;
pub use normalize::{normalize_cost, CostScaling};
pub use plan::{
    good_marginal, measure_meet, participant_marginal, Axis, Domain, ExchangePlan, MarginalMeasure,
    PairPlan, Project,
};

/// All invariant violations of `inst`; an empty list means the instance is valid.
pub fn validate_instance(inst: &ExchangeInstance) -> Vec<Violation> {
    inst.violations()
}
