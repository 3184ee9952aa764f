use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::ids::{Cell, Good, Participant};
use super::measure::Measure;
use super::plan::{ExchangePlan, PairPlan};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Which of the two instance measures an entry belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Supply,
    Demand,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Supply => "supply",
            Side::Demand => "demand",
        })
    }
}

/// One violated instance invariant, with the key that locates it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NonPositiveCost { good: Good, cost: Rational },
    MissingCost { good: Good },
    CostForUndeclaredGood { good: Good },
    NegativeAmount { side: Side, cell: Cell, amount: Rational },
    UndeclaredParticipant { side: Side, participant: Participant },
    UndeclaredGood { side: Side, good: Good },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveCost { good, cost } => {
                write!(f, "nonpositive cost {cost} at good {good}")
            }
            Violation::MissingCost { good } => write!(f, "no cost given for good {good}"),
            Violation::CostForUndeclaredGood { good } => {
                write!(f, "cost given for undeclared good {good}")
            }
            Violation::NegativeAmount { side, cell, amount } => {
                write!(f, "negative {side} {amount} at ({}, {})", cell.0, cell.1)
            }
            Violation::UndeclaredParticipant { side, participant } => {
                write!(f, "{side} entry for undeclared participant {participant}")
            }
            Violation::UndeclaredGood { side, good } => {
                write!(f, "{side} entry for undeclared good {good}")
            }
        }
    }
}

/// Whether a plan may route a good from a participant to itself.
///
/// The exchange model places no restriction on `sender = receiver`, and all
/// the equivalence results in this crate assume [`SelfLoops::Allowed`].
/// [`SelfLoops::Forbidden`] is an extension honoured only by the direct
/// three-index solver.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SelfLoops {
    #[default]
    Allowed,
    Forbidden,
}

/// A discrete exchange problem: participants, goods, unit values `c(s)`,
/// supply `π⁺` and demand `π⁻` on participant × good.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeInstance {
    pub participants: BTreeSet<Participant>,
    pub goods: BTreeSet<Good>,
    pub cost: BTreeMap<Good, Rational>,
    pub supply: Measure<Cell>,
    pub demand: Measure<Cell>,
}

impl ExchangeInstance {
    /// An instance over the given participants and goods with unit costs and no mass.
    pub fn empty<P, G>(participants: P, goods: G) -> Self
    where
        P: IntoIterator,
        P::Item: Into<Participant>,
        G: IntoIterator,
        G::Item: Into<Good>,
    {
        let goods: BTreeSet<Good> = goods.into_iter().map(Into::into).collect();
        Self {
            participants: participants.into_iter().map(Into::into).collect(),
            cost: goods.iter().map(|g| (g.clone(), Rational::one())).collect(),
            goods,
            supply: Measure::new(),
            demand: Measure::new(),
        }
    }

    pub fn with_cost(mut self, good: &str, cost: Rational) -> Self {
        self.cost.insert(Good::from(good), cost);
        self
    }

    pub fn with_supply(mut self, participant: &str, good: &str, amount: Rational) -> Self {
        self.supply.add_at(super::ids::cell(participant, good), &amount);
        self
    }

    pub fn with_demand(mut self, participant: &str, good: &str, amount: Rational) -> Self {
        self.demand.add_at(super::ids::cell(participant, good), &amount);
        self
    }

    /// Every violated invariant; empty iff the instance is valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for good in &self.goods {
            match self.cost.get(good) {
                None => out.push(Violation::MissingCost { good: good.clone() }),
                Some(c) if !c.is_positive() => out.push(Violation::NonPositiveCost {
                    good: good.clone(),
                    cost: c.clone(),
                }),
                Some(_) => {}
            }
        }
        for good in self.cost.keys() {
            if !self.goods.contains(good) {
                out.push(Violation::CostForUndeclaredGood { good: good.clone() });
            }
        }
        for (side, measure) in [(Side::Supply, &self.supply), (Side::Demand, &self.demand)] {
            for ((p, g), amount) in measure.iter() {
                if !self.participants.contains(p) {
                    out.push(Violation::UndeclaredParticipant {
                        side,
                        participant: p.clone(),
                    });
                }
                if !self.goods.contains(g) {
                    out.push(Violation::UndeclaredGood {
                        side,
                        good: g.clone(),
                    });
                }
                if amount.is_negative() {
                    out.push(Violation::NegativeAmount {
                        side,
                        cell: (p.clone(), g.clone()),
                        amount: amount.clone(),
                    });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// Cost of a good; goods without a declared cost count as 1.
    pub fn cost_of(&self, good: &Good) -> Rational {
        self.cost.get(good).cloned().unwrap_or_else(Rational::one)
    }

    pub fn has_unit_costs(&self) -> bool {
        self.goods.iter().all(|g| self.cost_of(g).is_one())
    }

    /// `Σ c(s) γ(i, j, s)`.
    pub fn objective(&self, plan: &ExchangePlan) -> Rational {
        plan.flows
            .iter()
            .fold(Rational::zero(), |acc, ((_, _, g), v)| acc + self.cost_of(g) * v)
    }

    /// Cost-weighted value `Σ c(s) σ(i, s)` of a measure on participant × good.
    pub fn value_of(&self, measure: &Measure<Cell>) -> Rational {
        measure
            .iter()
            .fold(Rational::zero(), |acc, ((_, g), v)| acc + self.cost_of(g) * v)
    }

    /// Atoms of `π⁺` and `π⁻` sharing a key.
    pub fn overlapping_cells(&self) -> Vec<Cell> {
        self.supply
            .atoms()
            .filter(|c| self.demand.contains(c))
            .cloned()
            .collect()
    }

    /// Every way `plan` fails to be admissible for this instance.
    pub fn plan_violations(&self, plan: &ExchangePlan, self_loops: SelfLoops) -> Vec<PlanViolation> {
        let mut out = Vec::new();
        for ((i, j, g), v) in plan.flows.iter() {
            if v.is_negative() {
                out.push(PlanViolation::NegativeFlow {
                    flow: (i.clone(), j.clone(), g.clone()),
                });
            }
            if !self.participants.contains(i) || !self.participants.contains(j) || !self.goods.contains(g) {
                out.push(PlanViolation::UndeclaredKey {
                    flow: (i.clone(), j.clone(), g.clone()),
                });
            }
            if self_loops == SelfLoops::Forbidden && i == j {
                out.push(PlanViolation::SelfLoop {
                    flow: (i.clone(), j.clone(), g.clone()),
                });
            }
        }
        let pair = plan.pair();
        for (side, sigma, cap) in [
            (Side::Supply, &pair.sigma_plus, &self.supply),
            (Side::Demand, &pair.sigma_minus, &self.demand),
        ] {
            for (cell, used, available) in sigma.excess_over(cap) {
                out.push(PlanViolation::CapExceeded {
                    side,
                    cell: cell.clone(),
                    used,
                    available,
                });
            }
        }
        for (participant, sent, received) in self.balance_sheet(plan) {
            if sent != received {
                out.push(PlanViolation::Unbalanced {
                    participant,
                    sent,
                    received,
                });
            }
        }
        out
    }

    /// Per participant: (value sent, value received).
    pub fn balance_sheet(&self, plan: &ExchangePlan) -> Vec<(Participant, Rational, Rational)> {
        let pair = plan.pair();
        let sent = self.weighted_participant_mass(&pair.sigma_plus);
        let received = self.weighted_participant_mass(&pair.sigma_minus);
        let mut keys: BTreeSet<Participant> = self.participants.clone();
        keys.extend(sent.atoms().cloned());
        keys.extend(received.atoms().cloned());
        keys.into_iter()
            .map(|p| {
                let s = sent.value(&p);
                let r = received.value(&p);
                (p, s, r)
            })
            .collect()
    }

    fn weighted_participant_mass(&self, m: &Measure<Cell>) -> Measure<Participant> {
        m.scale_by(|(_, g)| self.cost_of(g)).push_forward(|(p, _)| p.clone())
    }

    /// Checks a reduced pair against the caps and the equal-marginal conditions
    /// (participant and good projections of `σ⁺` and `σ⁻` coincide).
    pub fn pair_violations(&self, pair: &PairPlan) -> Vec<String> {
        let mut out = Vec::new();
        for (name, sigma, cap) in [
            ("sigma_plus", &pair.sigma_plus, &self.supply),
            ("sigma_minus", &pair.sigma_minus, &self.demand),
        ] {
            for (cell, v) in sigma.negative_atoms() {
                out.push(format!("{name} negative at ({}, {}): {v}", cell.0, cell.1));
            }
            for (cell, used, available) in sigma.excess_over(cap) {
                out.push(format!(
                    "{name} exceeds cap at ({}, {}): {used} > {available}",
                    cell.0, cell.1
                ));
            }
        }
        if pair.sigma_plus.push_forward(|(p, _)| p.clone())
            != pair.sigma_minus.push_forward(|(p, _)| p.clone())
        {
            out.push("participant marginals of sigma_plus and sigma_minus differ".into());
        }
        if pair.sigma_plus.push_forward(|(_, g)| g.clone())
            != pair.sigma_minus.push_forward(|(_, g)| g.clone())
        {
            out.push("good marginals of sigma_plus and sigma_minus differ".into());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanViolation {
    NegativeFlow {
        flow: super::ids::Flow,
    },
    UndeclaredKey {
        flow: super::ids::Flow,
    },
    SelfLoop {
        flow: super::ids::Flow,
    },
    CapExceeded {
        side: Side,
        cell: Cell,
        used: Rational,
        available: Rational,
    },
    Unbalanced {
        participant: Participant,
        sent: Rational,
        received: Rational,
    },
}

impl fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanViolation::NegativeFlow { flow: (i, j, g) } => {
                write!(f, "negative flow at ({i}, {j}, {g})")
            }
            PlanViolation::UndeclaredKey { flow: (i, j, g) } => {
                write!(f, "flow ({i}, {j}, {g}) references an undeclared key")
            }
            PlanViolation::SelfLoop { flow: (i, j, g) } => {
                write!(f, "self-exchange ({i}, {j}, {g}) is forbidden")
            }
            PlanViolation::CapExceeded {
                side,
                cell,
                used,
                available,
            } => write!(
                f,
                "{side} cap exceeded at ({}, {}): {used} > {available}",
                cell.0, cell.1
            ),
            PlanViolation::Unbalanced {
                participant,
                sent,
                received,
            } => write!(
                f,
                "participant {participant} unbalanced: sends value {sent}, receives {received}"
            ),
        }
    }
}
