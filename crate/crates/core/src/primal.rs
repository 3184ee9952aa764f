//! Primal solvers: the three-index exchange LP, the reduced two-index LP over
//! `(σ⁺, σ⁻)`, and the gluing step that turns a reduced pair back into a plan.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, Relation, RowId, Sense, VarId};
use crate::model::{
    good_marginal, normalize_cost, Cell, ExchangeInstance, ExchangePlan, Flow, Good, Measure,
    PairPlan, Participant, SelfLoops,
};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Direct3d,
    Reduced2d,
    Dcot,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct3d => "direct3d",
            Method::Reduced2d => "reduced2d",
            Method::Dcot => "dcot",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct3d" => Ok(Method::Direct3d),
            "reduced2d" => Ok(Method::Reduced2d),
            "dcot" => Ok(Method::Dcot),
            other => Err(Error::Usage(format!("unknown method {other:?}"))),
        }
    }
}

/// An optimal plan together with its projections, in the instance's own units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimalResult {
    pub value: Rational,
    pub plan: ExchangePlan,
    pub pair: PairPlan,
    pub method: Method,
}

impl PrimalResult {
    fn from_plan(inst: &ExchangeInstance, plan: ExchangePlan, method: Method) -> Self {
        Self {
            value: inst.objective(&plan),
            pair: plan.pair(),
            plan,
            method,
        }
    }

    /// Every broken invariant: admissibility of the plan, the value, and the
    /// pair being the plan's projections.
    pub fn violations(&self, inst: &ExchangeInstance, self_loops: SelfLoops) -> Vec<String> {
        let mut out: Vec<String> = inst
            .plan_violations(&self.plan, self_loops)
            .iter()
            .map(ToString::to_string)
            .collect();
        let value = inst.objective(&self.plan);
        if value != self.value {
            out.push(format!("reported value {} but plan is worth {value}", self.value));
        }
        if self.plan.pair() != self.pair {
            out.push("reported pair is not the projection of the plan".into());
        }
        out
    }
}

/// The three-index program together with the keys behind its variables and rows.
#[derive(Clone, Debug)]
pub struct DirectLp {
    pub lp: LinearProgram,
    pub flows: Vec<(Flow, VarId)>,
    pub supply_rows: Vec<(Cell, RowId)>,
    pub demand_rows: Vec<(Cell, RowId)>,
    pub balance_rows: Vec<(Participant, RowId)>,
}

fn demand_by_good(inst: &ExchangeInstance) -> BTreeMap<&Good, Vec<&Participant>> {
    let mut out: BTreeMap<&Good, Vec<&Participant>> = BTreeMap::new();
    for ((j, s), _) in inst.demand.iter() {
        out.entry(s).or_default().push(j);
    }
    out
}

/// Maximize `Σ c(s) γ` under supply caps, demand caps and per-participant balance.
///
/// Only triples with positive supply at `(i, s)` and positive demand at
/// `(j, s)` get a variable; every other flow is forced to zero by a cap.
pub fn build_direct_lp(inst: &ExchangeInstance, self_loops: SelfLoops) -> Result<DirectLp> {
    inst.validate()?;
    let mut lp = LinearProgram::new(Sense::Maximize);
    let receivers = demand_by_good(inst);
    let mut flows = Vec::new();
    for ((i, s), _) in inst.supply.iter() {
        for &j in receivers.get(s).into_iter().flatten() {
            if self_loops == SelfLoops::Forbidden && i == j {
                continue;
            }
            let var = lp.add_var(format!("gamma[{i},{j},{s}]"));
            lp.set_objective(var, inst.cost_of(s));
            flows.push(((i.clone(), j.clone(), s.clone()), var));
        }
    }

    let mut by_sender: BTreeMap<Cell, Vec<(VarId, Rational)>> = BTreeMap::new();
    let mut by_receiver: BTreeMap<Cell, Vec<(VarId, Rational)>> = BTreeMap::new();
    let mut balance: BTreeMap<&Participant, Vec<(VarId, Rational)>> = BTreeMap::new();
    for ((i, j, s), var) in &flows {
        by_sender.entry((i.clone(), s.clone())).or_default().push((*var, Rational::one()));
        by_receiver.entry((j.clone(), s.clone())).or_default().push((*var, Rational::one()));
        if i != j {
            let c = inst.cost_of(s);
            balance.entry(i).or_default().push((*var, c.clone()));
            balance.entry(j).or_default().push((*var, -c));
        }
    }

    let supply_rows = inst
        .supply
        .iter()
        .map(|(cell, cap)| {
            let row = lp.add_constraint(
                format!("supply[{},{}]", cell.0, cell.1),
                by_sender.remove(cell).unwrap_or_default(),
                Relation::Le,
                cap.clone(),
            );
            (cell.clone(), row)
        })
        .collect();
    let demand_rows = inst
        .demand
        .iter()
        .map(|(cell, cap)| {
            let row = lp.add_constraint(
                format!("demand[{},{}]", cell.0, cell.1),
                by_receiver.remove(cell).unwrap_or_default(),
                Relation::Le,
                cap.clone(),
            );
            (cell.clone(), row)
        })
        .collect();
    let balance_rows = inst
        .participants
        .iter()
        .map(|k| {
            let row = lp.add_constraint(
                format!("balance[{k}]"),
                balance.remove(k).unwrap_or_default(),
                Relation::Eq,
                Rational::zero(),
            );
            (k.clone(), row)
        })
        .collect();

    Ok(DirectLp {
        lp,
        flows,
        supply_rows,
        demand_rows,
        balance_rows,
    })
}

/// Solves the three-index program. `γ = 0` is always admissible and the value
/// is bounded by the total supply value, so an optimum always exists.
pub fn solve_direct(inst: &ExchangeInstance, self_loops: SelfLoops) -> Result<PrimalResult> {
    let direct = build_direct_lp(inst, self_loops)?;
    let opt = lp::solve_expect_optimal(&direct.lp, "direct exchange")?;
    let flows = direct
        .flows
        .iter()
        .map(|(key, var)| (key.clone(), opt.value(*var).clone()))
        .collect();
    let result = PrimalResult::from_plan(inst, ExchangePlan::new(flows), Method::Direct3d);
    if result.value != opt.objective {
        return Err(Error::Internal(format!(
            "plan value {} differs from LP objective {}",
            result.value, opt.objective
        )));
    }
    Ok(result)
}

/// The two-index program over `(σ⁺, σ⁻)`, with keys for reading the optimum back.
#[derive(Clone, Debug)]
pub struct ReducedLp {
    pub lp: LinearProgram,
    pub sigma_plus: Vec<(Cell, VarId)>,
    pub sigma_minus: Vec<(Cell, VarId)>,
}

impl ReducedLp {
    pub fn pair(&self, values: &[Rational]) -> PairPlan {
        let read = |vars: &[(Cell, VarId)]| -> Measure<Cell> {
            vars.iter()
                .map(|(c, v)| (c.clone(), values[v.0].clone()))
                .collect()
        };
        PairPlan::new(read(&self.sigma_plus), read(&self.sigma_minus))
    }
}

/// Maximize `σ⁺(X×S)` subject to `σ⁺ ≤ π⁺`, `σ⁻ ≤ π⁻` and equal participant
/// and good marginals. Requires unit costs. The caps are variable bounds.
pub fn build_reduced_lp(inst: &ExchangeInstance) -> Result<ReducedLp> {
    inst.validate()?;
    if !inst.has_unit_costs() {
        return Err(Error::NotNormalized);
    }
    let mut lp = LinearProgram::new(Sense::Maximize);
    let mut by_participant: BTreeMap<&Participant, Vec<(VarId, Rational)>> = BTreeMap::new();
    let mut by_good: BTreeMap<&Good, Vec<(VarId, Rational)>> = BTreeMap::new();

    let mut sigma_plus = Vec::new();
    for (cell @ (i, s), cap) in inst.supply.iter() {
        let var = lp.add_bounded_var(format!("sigma_plus[{i},{s}]"), cap.clone());
        lp.set_objective(var, Rational::one());
        by_participant.entry(i).or_default().push((var, Rational::one()));
        by_good.entry(s).or_default().push((var, Rational::one()));
        sigma_plus.push((cell.clone(), var));
    }
    let mut sigma_minus = Vec::new();
    for (cell @ (j, s), cap) in inst.demand.iter() {
        let var = lp.add_bounded_var(format!("sigma_minus[{j},{s}]"), cap.clone());
        by_participant.entry(j).or_default().push((var, -Rational::one()));
        by_good.entry(s).or_default().push((var, -Rational::one()));
        sigma_minus.push((cell.clone(), var));
    }
    for k in &inst.participants {
        lp.add_constraint(
            format!("participant[{k}]"),
            by_participant.remove(k).unwrap_or_default(),
            Relation::Eq,
            Rational::zero(),
        );
    }
    for s in &inst.goods {
        lp.add_constraint(
            format!("good[{s}]"),
            by_good.remove(s).unwrap_or_default(),
            Relation::Eq,
            Rational::zero(),
        );
    }
    Ok(ReducedLp {
        lp,
        sigma_plus,
        sigma_minus,
    })
}

/// Conditional-product gluing along the good coordinate:
/// `γ(i, j, s) = σ⁺(i, s) σ⁻(j, s) / ν(s)` with `ν = Pr_S σ⁺ = Pr_S σ⁻`.
///
/// The result has `Pr_{X×S} γ = σ⁺` and `Pr_{Y×S} γ = σ⁻` exactly.
pub fn glue(pair: &PairPlan) -> Result<ExchangePlan> {
    for (name, m) in [("sigma_plus", &pair.sigma_plus), ("sigma_minus", &pair.sigma_minus)] {
        if let Some(((p, g), v)) = m.negative_atoms().next() {
            return Err(Error::Precondition(format!("{name} is negative at ({p}, {g}): {v}")));
        }
    }
    let nu = good_marginal(&pair.sigma_plus);
    if nu != good_marginal(&pair.sigma_minus) {
        return Err(Error::Precondition(
            "sigma_plus and sigma_minus have different good marginals".into(),
        ));
    }
    let mut receivers: BTreeMap<&Good, Vec<(&Participant, &Rational)>> = BTreeMap::new();
    for ((j, s), w) in pair.sigma_minus.iter() {
        receivers.entry(s).or_default().push((j, w));
    }
    let mut flows = Measure::new();
    for ((i, s), w_plus) in pair.sigma_plus.iter() {
        let total = nu.value(s);
        debug_assert!(total.is_positive());
        for &(j, w_minus) in receivers.get(s).into_iter().flatten() {
            flows.add_at((i.clone(), j.clone(), s.clone()), &(w_plus * w_minus / &total));
        }
    }
    Ok(ExchangePlan::new(flows))
}

/// Normalize costs, solve the reduced program, glue, and map back.
pub fn solve_via_reduction(inst: &ExchangeInstance) -> Result<PrimalResult> {
    let (normalized, scaling) = normalize_cost(inst)?;
    let reduced = build_reduced_lp(&normalized)?;
    let opt = lp::solve_expect_optimal(&reduced.lp, "reduced exchange")?;
    let pair = reduced.pair(&opt.values);
    let glued = glue(&pair)?;
    if glued.pair() != pair {
        return Err(Error::Internal("glued plan does not reproduce the reduced pair".into()));
    }
    let result = PrimalResult::from_plan(inst, scaling.back_plan(&glued), Method::Reduced2d);
    if result.value != opt.objective {
        return Err(Error::Internal(format!(
            "glued plan is worth {} but the reduced optimum is {}",
            result.value, opt.objective
        )));
    }
    Ok(result)
}

/// Dispatches to one of the three solution routes.
///
/// Forbidding self-exchange changes the problem, so only the direct route
/// supports it.
pub fn solve(inst: &ExchangeInstance, method: Method, self_loops: SelfLoops) -> Result<PrimalResult> {
    if self_loops == SelfLoops::Forbidden && method != Method::Direct3d {
        return Err(Error::Precondition(format!(
            "forbidding self-exchange is only supported by direct3d, not {method}"
        )));
    }
    match method {
        Method::Direct3d => solve_direct(inst, self_loops),
        Method::Reduced2d => solve_via_reduction(inst),
        Method::Dcot => crate::dcot::solve_via_dcot(inst),
    }
}
