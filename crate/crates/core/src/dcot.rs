//! Exchange with disjoint supply and demand supports as a transport problem
//! with an upper density bound: minimize `τ(A⁺)` over `τ ∈ Π(μ⁺, ν⁺; π⁺ + π⁻)`.

use std::collections::BTreeSet;

use num_traits::One;

use crate::error::{Error, Result};
use crate::feasibility::{coupling_lp, sigma_violations};
use crate::lp::{self, Sense};
use crate::model::{good_marginal, normalize_cost, participant_marginal, Cell, ExchangeInstance, Good, Measure, PairPlan, Participant};
use crate::primal::{glue, Method, PrimalResult};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DcotProblem {
    /// `Pr_X π⁺`
    pub mu_plus: Measure<Participant>,
    /// `Pr_S π⁺`
    pub nu_plus: Measure<Good>,
    /// `π⁺ + π⁻`
    pub pi: Measure<Cell>,
    pub pi_plus: Measure<Cell>,
    pub pi_minus: Measure<Cell>,
    /// Support of `π⁺`, where the cost is 1.
    pub a_plus: BTreeSet<Cell>,
    /// Support of `π⁻`.
    pub a_minus: BTreeSet<Cell>,
}

impl DcotProblem {
    /// `Σ h dτ = τ(A⁺)`
    pub fn transport_cost(&self, tau: &Measure<Cell>) -> Rational {
        tau.mass_where(|k| self.a_plus.contains(k))
    }
}

/// Requires unit costs and disjoint supports.
pub fn build_dcot(inst: &ExchangeInstance) -> Result<DcotProblem> {
    inst.validate()?;
    if !inst.has_unit_costs() {
        return Err(Error::NotNormalized);
    }
    let overlap = inst.overlapping_cells();
    if !overlap.is_empty() {
        return Err(Error::OverlappingSupports(overlap));
    }
    Ok(DcotProblem {
        mu_plus: participant_marginal(&inst.supply),
        nu_plus: good_marginal(&inst.supply),
        pi: &inst.supply + &inst.demand,
        pi_plus: inst.supply.clone(),
        pi_minus: inst.demand.clone(),
        a_plus: inst.supply.atoms().cloned().collect(),
        a_minus: inst.demand.atoms().cloned().collect(),
    })
}

/// Minimum `τ(A⁺)` and an attaining `τ`. `τ = π⁺` is always feasible.
pub fn solve_kantorovich_constrained(p: &DcotProblem) -> Result<(Rational, Measure<Cell>)> {
    let (mut lp, vars) = coupling_lp(&p.mu_plus, &p.nu_plus, &p.pi, Sense::Minimize);
    for (key, var) in &vars {
        if p.a_plus.contains(key) {
            lp.set_objective(*var, Rational::one());
        }
    }
    let opt = lp::solve_expect_optimal(&lp, "constrained transport")?;
    let tau = vars.iter().map(|(k, v)| (k.clone(), opt.value(*v).clone())).collect();
    Ok((opt.objective.clone(), tau))
}

/// `σ⁺ = π⁺ − τ|A⁺`, `σ⁻ = τ|A⁻`.
pub fn tau_to_pair(p: &DcotProblem, tau: &Measure<Cell>) -> Result<PairPlan> {
    if let Some(v) = sigma_violations(&p.mu_plus, &p.nu_plus, &p.pi, tau).first() {
        return Err(Error::Precondition(format!("transport plan is not feasible: {v}")));
    }
    let sigma_plus = &p.pi_plus - &tau.restrict(|k| p.a_plus.contains(k));
    let sigma_minus = tau.restrict(|k| p.a_minus.contains(k));
    Ok(PairPlan::new(sigma_plus, sigma_minus))
}

/// `τ = π⁺ − σ⁺ + σ⁻`.
pub fn pair_to_tau(p: &DcotProblem, pair: &PairPlan) -> Result<Measure<Cell>> {
    let mut problems = Vec::new();
    for (name, sigma, cap) in [("sigma_plus", &pair.sigma_plus, &p.pi_plus), ("sigma_minus", &pair.sigma_minus, &p.pi_minus)] {
        if !sigma.is_nonnegative() {
            problems.push(format!("{name} is negative"));
        }
        if !sigma.le(cap) {
            problems.push(format!("{name} exceeds its cap"));
        }
    }
    if participant_marginal(&pair.sigma_plus) != participant_marginal(&pair.sigma_minus) {
        problems.push("participant marginals differ".into());
    }
    if good_marginal(&pair.sigma_plus) != good_marginal(&pair.sigma_minus) {
        problems.push("good marginals differ".into());
    }
    if !problems.is_empty() {
        return Err(Error::Precondition(format!("pair is not admissible: {}", problems.join("; "))));
    }
    Ok(&(&p.pi_plus - &pair.sigma_plus) + &pair.sigma_minus)
}

/// Normalizes costs, solves the transport problem, and returns the glued
/// plan worth `π⁺(X × S) − K_h` in normalized units.
pub fn solve_via_dcot(inst: &ExchangeInstance) -> Result<PrimalResult> {
    let (normalized, scaling) = normalize_cost(inst)?;
    let problem = build_dcot(&normalized)?;
    let (k_h, tau) = solve_kantorovich_constrained(&problem)?;
    let pair = tau_to_pair(&problem, &tau)?;
    let plan = scaling.back_plan(&glue(&pair)?);
    let value = problem.pi_plus.total() - k_h;
    let worth = inst.objective(&plan);
    if worth != value {
        return Err(Error::Internal(format!("glued plan is worth {worth} but the reduction gives {value}")));
    }
    Ok(PrimalResult {
        value,
        pair: plan.pair(),
        plan,
        method: Method::Dcot,
    })
}
