//! Reduction of an arbitrary positive cost function to unit costs.
//!
//! Scaling every mass on good `s` by `c(s)` turns the weighted objective
//! `Σ c(s) γ` into the plain mass `Σ γ̃` while keeping caps and balance
//! equivalent, so all reduced formulations work with `c ≡ 1`.

use std::collections::BTreeMap;

use num_traits::One;

use super::ids::{Cell, Good};
use super::instance::ExchangeInstance;
use super::measure::Measure;
use super::plan::{ExchangePlan, PairPlan};
use crate::error::Result;
use crate::rational::Rational;

/// Remembers the original costs so plans can be carried between the two scales.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostScaling {
    cost: BTreeMap<Good, Rational>,
}

impl CostScaling {
    pub fn is_identity(&self) -> bool {
        self.cost.values().all(One::is_one)
    }

    fn factor(&self, good: &Good) -> Rational {
        self.cost.get(good).cloned().unwrap_or_else(Rational::one)
    }

    /// `γ ↦ c(s) γ`.
    pub fn forward_plan(&self, plan: &ExchangePlan) -> ExchangePlan {
        ExchangePlan::new(plan.flows.scale_by(|(_, _, g)| self.factor(g)))
    }

    /// `γ̃ ↦ γ̃ / c(s)`.
    pub fn back_plan(&self, plan: &ExchangePlan) -> ExchangePlan {
        ExchangePlan::new(plan.flows.scale_by(|(_, _, g)| self.factor(g).recip()))
    }

    pub fn forward_measure(&self, m: &Measure<Cell>) -> Measure<Cell> {
        m.scale_by(|(_, g)| self.factor(g))
    }

    pub fn back_measure(&self, m: &Measure<Cell>) -> Measure<Cell> {
        m.scale_by(|(_, g)| self.factor(g).recip())
    }

    pub fn back_pair(&self, pair: &PairPlan) -> PairPlan {
        PairPlan::new(
            self.back_measure(&pair.sigma_plus),
            self.back_measure(&pair.sigma_minus),
        )
    }
}

/// Returns the unit-cost instance `(c π⁺, c π⁻)` and the map back to the
/// original scale. Objective values agree exactly under `γ̃ = c γ`.
pub fn normalize_cost(inst: &ExchangeInstance) -> Result<(ExchangeInstance, CostScaling)> {
    inst.validate()?;
    let scaling = CostScaling {
        cost: inst.cost.clone(),
    };
    let normalized = ExchangeInstance {
        participants: inst.participants.clone(),
        goods: inst.goods.clone(),
        cost: inst.goods.iter().map(|g| (g.clone(), Rational::one())).collect(),
        supply: scaling.forward_measure(&inst.supply),
        demand: scaling.forward_measure(&inst.demand),
    };
    Ok((normalized, scaling))
}
