//! The dual exchange problem over prices `(f, g, h)`, the potential program
//! over `(u, v)`, and a three-way optimality certificate.

use std::collections::BTreeMap;
use std::thread;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, Relation, Sense, VarId};
use crate::model::{normalize_cost, Cell, ExchangeInstance, ExchangePlan, Good, Measure, Participant, SelfLoops};
use crate::primal::{solve_direct, PrimalResult};
use crate::rational::{positive_part, Rational};

#[derive(Clone, Debug)]
pub struct DualLp {
    pub lp: LinearProgram,
    pub f: Vec<(Cell, VarId)>,
    pub g: Vec<(Cell, VarId)>,
    pub h: Vec<(Participant, VarId)>,
}

/// Minimize `Σ f π⁺ + Σ g π⁻` subject to
/// `f(i,s) + g(j,s) + c(s) h(i) − c(s) h(j) ≥ c(s)` for every triple that
/// carries a variable in the direct program.
pub fn build_dual_lp(inst: &ExchangeInstance, self_loops: SelfLoops) -> Result<DualLp> {
    inst.validate()?;
    let mut lp = LinearProgram::new(Sense::Minimize);
    let h: Vec<(Participant, VarId)> = inst
        .participants
        .iter()
        .map(|k| (k.clone(), lp.add_free_var(format!("h[{k}]"))))
        .collect();
    let h_var: BTreeMap<&Participant, VarId> = h.iter().map(|(k, v)| (k, *v)).collect();
    let mut support_var = |m: &Measure<Cell>, name: &str| -> Vec<(Cell, VarId)> {
        m.iter()
            .map(|(key @ (p, s), w)| {
                let var = lp.add_var(format!("{name}[{p},{s}]"));
                lp.set_objective(var, w.clone());
                (key.clone(), var)
            })
            .collect()
    };
    let f = support_var(&inst.supply, "f");
    let g = support_var(&inst.demand, "g");
    for ((i, s), fv) in &f {
        for ((j, t), gv) in &g {
            if s != t || (self_loops == SelfLoops::Forbidden && i == j) {
                continue;
            }
            let c = inst.cost_of(s);
            let mut coeffs = vec![(*fv, Rational::one()), (*gv, Rational::one())];
            if i != j {
                coeffs.push((h_var[i], c.clone()));
                coeffs.push((h_var[j], -c.clone()));
            }
            lp.add_constraint(format!("dual[{i},{j},{s}]"), coeffs, Relation::Ge, c);
        }
    }
    Ok(DualLp { lp, f, g, h })
}

/// Prices on supply and demand cells and a balance potential on participants.
/// Absent atoms are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DualCertificate {
    pub f: Measure<Cell>,
    pub g: Measure<Cell>,
    pub h: Measure<Participant>,
}

impl DualCertificate {
    pub fn objective(&self, inst: &ExchangeInstance) -> Rational {
        let dot = |price: &Measure<Cell>, m: &Measure<Cell>| {
            price.iter().fold(Rational::zero(), |acc, (k, p)| acc + p * m.value(k))
        };
        dot(&self.f, &inst.supply) + dot(&self.g, &inst.demand)
    }

    /// Adds `t` to every `h(k)`; feasibility and objective are unchanged.
    pub fn shift_h(&self, inst: &ExchangeInstance, t: &Rational) -> Self {
        let h = inst
            .participants
            .iter()
            .map(|k| (k.clone(), self.h.value(k) + t))
            .collect();
        Self { f: self.f.clone(), g: self.g.clone(), h }
    }

    /// Shifts `h` so that it vanishes at the first participant.
    pub fn anchored(&self, inst: &ExchangeInstance) -> Self {
        match inst.participants.first() {
            Some(first) => self.shift_h(inst, &-self.h.value(first)),
            None => self.clone(),
        }
    }

    /// Fills in `f` where there is no supply and `g` where there is no
    /// demand, at the least values that keep every row satisfied:
    /// `f = c(1 + max h − h(i))` and `g = c(1 + h(j) − min h)`.
    pub fn extended(&self, inst: &ExchangeInstance) -> Self {
        let hs: Vec<Rational> = inst.participants.iter().map(|k| self.h.value(k)).collect();
        let (Some(max_h), Some(min_h)) = (hs.iter().max(), hs.iter().min()) else {
            return self.clone();
        };
        let mut out = self.clone();
        for k in &inst.participants {
            for s in &inst.goods {
                let key = (k.clone(), s.clone());
                let c = inst.cost_of(s);
                if !inst.supply.contains(&key) {
                    out.f.set(key.clone(), &c * (Rational::one() + max_h - self.h.value(k)));
                }
                if !inst.demand.contains(&key) {
                    out.g.set(key, &c * (Rational::one() + self.h.value(k) - min_h));
                }
            }
        }
        out
    }

    fn check(&self, inst: &ExchangeInstance, self_loops: SelfLoops, full: bool) -> Vec<String> {
        let mut out = Vec::new();
        for (name, m) in [("f", &self.f), ("g", &self.g)] {
            for ((p, s), w) in m.negative_atoms() {
                out.push(format!("{name}({p}, {s}) = {w} is negative"));
            }
        }
        for s in &inst.goods {
            let c = inst.cost_of(s);
            for i in &inst.participants {
                let fi = (i.clone(), s.clone());
                if !full && !inst.supply.contains(&fi) {
                    continue;
                }
                for j in &inst.participants {
                    let gj = (j.clone(), s.clone());
                    if (!full && !inst.demand.contains(&gj)) || (self_loops == SelfLoops::Forbidden && i == j) {
                        continue;
                    }
                    let lhs = self.f.value(&fi) + self.g.value(&gj) + &c * (self.h.value(i) - self.h.value(j));
                    if lhs < c {
                        out.push(format!("dual row ({i}, {j}, {s}): {lhs} < {c}"));
                    }
                }
            }
        }
        out
    }

    /// Violated rows among triples where both `π⁺(i,s)` and `π⁻(j,s)` are
    /// positive. Elsewhere `f` or `g` can be raised at no cost.
    pub fn violations(&self, inst: &ExchangeInstance, self_loops: SelfLoops) -> Vec<String> {
        self.check(inst, self_loops, false)
    }

    /// Violated rows over every participant × participant × good triple.
    pub fn full_violations(&self, inst: &ExchangeInstance, self_loops: SelfLoops) -> Vec<String> {
        self.check(inst, self_loops, true)
    }
}

/// Solves the dual program and returns its optimum with an anchored
/// certificate extended to every cell.
pub fn solve_dual(inst: &ExchangeInstance, self_loops: SelfLoops) -> Result<(Rational, DualCertificate)> {
    let dual = build_dual_lp(inst, self_loops)?;
    let opt = lp::solve_expect_optimal(&dual.lp, "dual exchange")?;
    let read_cells = |vars: &[(Cell, VarId)]| vars.iter().map(|(k, v)| (k.clone(), opt.value(*v).clone())).collect();
    let cert = DualCertificate {
        f: read_cells(&dual.f),
        g: read_cells(&dual.g),
        h: dual.h.iter().map(|(k, v)| (k.clone(), opt.value(*v).clone())).collect(),
    };
    Ok((opt.objective.clone(), cert.anchored(inst).extended(inst)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityGap {
    pub primal: Rational,
    pub dual: Rational,
    /// `dual − primal`, never negative.
    pub gap: Rational,
}

/// Weak duality for an admissible plan and a feasible certificate.
pub fn verify_weak_duality(
    inst: &ExchangeInstance,
    plan: &ExchangePlan,
    cert: &DualCertificate,
    self_loops: SelfLoops,
) -> Result<DualityGap> {
    if let Some(v) = inst.plan_violations(plan, self_loops).first() {
        return Err(Error::Precondition(format!("plan is not admissible: {v}")));
    }
    if let Some(v) = cert.violations(inst, self_loops).first() {
        return Err(Error::Precondition(format!("certificate is not feasible: {v}")));
    }
    let primal = inst.objective(plan);
    let dual = cert.objective(inst);
    let gap = &dual - &primal;
    if gap.is_negative() {
        return Err(Error::Internal(format!("dual value {dual} is below primal value {primal}")));
    }
    Ok(DualityGap { primal, dual, gap })
}

/// Potentials `u` on participants and `v` on goods.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PotentialPair {
    pub u: Measure<Participant>,
    pub v: Measure<Good>,
}

/// `Σ [u(i) + v(s)]₊ π⁺(i,s) + Σ [1 − u(j) − v(s)]₊ π⁻(j,s)` on a
/// unit-cost instance.
pub fn potential_objective(inst: &ExchangeInstance, pair: &PotentialPair) -> Rational {
    let uv = |(p, s): &Cell| pair.u.value(p) + pair.v.value(s);
    let plus = inst.supply.iter().fold(Rational::zero(), |acc, (k, w)| acc + positive_part(&uv(k)) * w);
    let minus = inst
        .demand
        .iter()
        .fold(Rational::zero(), |acc, (k, w)| acc + positive_part(&(Rational::one() - uv(k))) * w);
    plus + minus
}

#[derive(Clone, Debug)]
pub struct PotentialLp {
    pub lp: LinearProgram,
    pub u: Vec<(Participant, VarId)>,
    pub v: Vec<(Good, VarId)>,
}

/// Linearizes the positive parts of [`potential_objective`] with epigraph
/// variables on the supports of `π⁺` and `π⁻`. Requires unit costs.
pub fn build_potential_lp(inst: &ExchangeInstance) -> Result<PotentialLp> {
    inst.validate()?;
    if !inst.has_unit_costs() {
        return Err(Error::NotNormalized);
    }
    let mut lp = LinearProgram::new(Sense::Minimize);
    let u: Vec<(Participant, VarId)> = inst
        .participants
        .iter()
        .map(|k| (k.clone(), lp.add_free_var(format!("u[{k}]"))))
        .collect();
    let v: Vec<(Good, VarId)> = inst
        .goods
        .iter()
        .map(|s| (s.clone(), lp.add_free_var(format!("v[{s}]"))))
        .collect();
    let u_var: BTreeMap<&Participant, VarId> = u.iter().map(|(k, x)| (k, *x)).collect();
    let v_var: BTreeMap<&Good, VarId> = v.iter().map(|(k, x)| (k, *x)).collect();
    let one = Rational::one();
    for ((i, s), w) in inst.supply.iter() {
        let p = lp.add_var(format!("p[{i},{s}]"));
        lp.set_objective(p, w.clone());
        lp.add_constraint(
            format!("plus[{i},{s}]"),
            vec![(p, one.clone()), (u_var[i], -one.clone()), (v_var[s], -one.clone())],
            Relation::Ge,
            Rational::zero(),
        );
    }
    for ((j, s), w) in inst.demand.iter() {
        let q = lp.add_var(format!("q[{j},{s}]"));
        lp.set_objective(q, w.clone());
        lp.add_constraint(
            format!("minus[{j},{s}]"),
            vec![(q, one.clone()), (u_var[j], one.clone()), (v_var[s], one.clone())],
            Relation::Ge,
            one.clone(),
        );
    }
    Ok(PotentialLp { lp, u, v })
}

/// Normalizes costs, solves the potential program, and shifts the
/// potentials so that `u` vanishes at the first participant.
pub fn solve_potential(inst: &ExchangeInstance) -> Result<(Rational, PotentialPair)> {
    let (normalized, _) = normalize_cost(inst)?;
    let pot = build_potential_lp(&normalized)?;
    let opt = lp::solve_expect_optimal(&pot.lp, "potential")?;
    let shift = pot.u.first().map(|(_, x)| opt.value(*x).clone()).unwrap_or_default();
    let pair = PotentialPair {
        u: pot.u.iter().map(|(k, x)| (k.clone(), opt.value(*x) - &shift)).collect(),
        v: pot.v.iter().map(|(k, x)| (k.clone(), opt.value(*x) + &shift)).collect(),
    };
    Ok((opt.objective.clone(), pair))
}

/// Primal, dual and potential optima of one instance, checked to coincide.
#[derive(Clone, Debug)]
pub struct Certification {
    pub primal: PrimalResult,
    pub dual_value: Rational,
    pub certificate: DualCertificate,
    pub potential_value: Rational,
    pub potentials: PotentialPair,
    pub gap: DualityGap,
}

impl Certification {
    pub fn summary(&self) -> String {
        format!(
            "primal={} dual={} potential={} gap={}",
            self.primal.value, self.dual_value, self.potential_value, self.gap.gap
        )
    }
}

/// Runs the three solves concurrently and checks every identity between
/// them. A mismatch means a solver bug and is reported as internal.
pub fn certify_optimality(inst: &ExchangeInstance) -> Result<Certification> {
    inst.validate()?;
    let (primal, dual, potential) = thread::scope(|scope| {
        let p = scope.spawn(|| solve_direct(inst, SelfLoops::Allowed));
        let d = scope.spawn(|| solve_dual(inst, SelfLoops::Allowed));
        let q = solve_potential(inst);
        (join(p), join(d), q)
    });
    let (primal, (dual_value, certificate), (potential_value, potentials)) = (primal?, dual?, potential?);

    if primal.value != dual_value || primal.value != potential_value {
        return Err(Error::Internal(format!(
            "optima disagree: primal={} dual={dual_value} potential={potential_value}",
            primal.value
        )));
    }
    if let Some(v) = certificate.full_violations(inst, SelfLoops::Allowed).first() {
        return Err(Error::Internal(format!("extended dual certificate is infeasible: {v}")));
    }
    if certificate.objective(inst) != dual_value {
        return Err(Error::Internal("dual certificate does not attain the dual optimum".into()));
    }
    let (normalized, _) = normalize_cost(inst)?;
    if potential_objective(&normalized, &potentials) != potential_value {
        return Err(Error::Internal("potentials do not attain the potential optimum".into()));
    }
    let gap = verify_weak_duality(inst, &primal.plan, &certificate, SelfLoops::Allowed)?;
    if !gap.gap.is_zero() {
        return Err(Error::Internal(format!("nonzero duality gap {}", gap.gap)));
    }
    Ok(Certification {
        primal,
        dual_value,
        certificate,
        potential_value,
        potentials,
        gap,
    })
}

fn join<T>(handle: thread::ScopedJoinHandle<'_, Result<T>>) -> Result<T> {
    handle
        .join()
        .unwrap_or_else(|_| Err(Error::Internal("solver thread panicked".into())))
}
