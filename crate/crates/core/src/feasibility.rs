//! Existence of `σ ≤ π` with prescribed marginals: a subset-enumeration
//! oracle, an LP check with certificates both ways, and the exchange bound.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpSolution, Relation, Sense, VarId};
use crate::model::{good_marginal, normalize_cost, participant_marginal, Cell, ExchangeInstance, Good, Measure, Participant};
use crate::rational::{positive_part, Rational};

/// Largest `|X| + |S|` accepted by the enumeration checks.
pub const ENUMERATION_LIMIT: usize = 20;

/// Sets `A`, `B` with `lhs = μ(A) + ν(B)` and `rhs = α + cap(A × B)`;
/// the pair witnesses infeasibility when `lhs > rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetWitness {
    pub a: BTreeSet<Participant>,
    pub b: BTreeSet<Good>,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl SubsetWitness {
    pub fn is_violation(&self) -> bool {
        self.lhs > self.rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Feasible,
    Violated(SubsetWitness),
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible)
    }
}

fn require_balanced(mu: &Measure<Participant>, nu: &Measure<Good>, caps: &[&Measure<Cell>]) -> Result<Rational> {
    if !mu.is_nonnegative() || !nu.is_nonnegative() || caps.iter().any(|m| !m.is_nonnegative()) {
        return Err(Error::Precondition("measures must be nonnegative".into()));
    }
    let alpha = mu.total();
    if alpha != nu.total() {
        return Err(Error::Precondition(format!(
            "marginal masses differ: mu has {alpha}, nu has {}",
            nu.total()
        )));
    }
    Ok(alpha)
}

/// Participants and goods that carry mass in any of the measures, sorted.
fn ground_sets(mu: &Measure<Participant>, nu: &Measure<Good>, caps: &[&Measure<Cell>]) -> (Vec<Participant>, Vec<Good>) {
    let mut xs: BTreeSet<Participant> = mu.atoms().cloned().collect();
    let mut ss: BTreeSet<Good> = nu.atoms().cloned().collect();
    for m in caps {
        for (p, g) in m.atoms() {
            xs.insert(p.clone());
            ss.insert(g.clone());
        }
    }
    (xs.into_iter().collect(), ss.into_iter().collect())
}

fn bits(mask: usize, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |k| mask >> k & 1 == 1)
}

/// Enumerates `(A, B)` with `A` in the outer loop, both in bitmask order,
/// and returns the first pair with `μ(A) + ν(B) > α + min_c cap_c(A × B)`.
fn first_violation(
    mu: &Measure<Participant>,
    nu: &Measure<Good>,
    caps: &[&Measure<Cell>],
) -> Result<Option<SubsetWitness>> {
    let alpha = require_balanced(mu, nu, caps)?;
    let (xs, ss) = ground_sets(mu, nu, caps);
    if xs.len() + ss.len() > ENUMERATION_LIMIT {
        return Err(Error::Capacity(format!(
            "subset enumeration over {} participants and {} goods exceeds the limit of \
             {ENUMERATION_LIMIT}; use the LP check instead",
            xs.len(),
            ss.len()
        )));
    }
    let mu_x: Vec<Rational> = xs.iter().map(|x| mu.value(x)).collect();
    let nu_s: Vec<Rational> = ss.iter().map(|s| nu.value(s)).collect();
    let dense: Vec<Vec<Vec<Rational>>> = caps
        .iter()
        .map(|m| {
            xs.iter()
                .map(|x| ss.iter().map(|s| m.value(&(x.clone(), s.clone()))).collect())
                .collect()
        })
        .collect();
    let found = (0..1usize << xs.len()).into_par_iter().find_map_first(|a| {
        let mu_a = bits(a, xs.len()).fold(Rational::zero(), |acc, k| acc + &mu_x[k]);
        let column_sums: Vec<Vec<Rational>> = dense
            .iter()
            .map(|m| {
                (0..ss.len())
                    .map(|l| bits(a, xs.len()).fold(Rational::zero(), |acc, k| acc + &m[k][l]))
                    .collect()
            })
            .collect();
        (0..1usize << ss.len()).find_map(|b| {
            let nu_b = bits(b, ss.len()).fold(Rational::zero(), |acc, l| acc + &nu_s[l]);
            let cap = column_sums
                .iter()
                .map(|col| bits(b, ss.len()).fold(Rational::zero(), |acc, l| acc + &col[l]))
                .min()
                .unwrap_or_default();
            let lhs = &mu_a + nu_b;
            let rhs = &alpha + cap;
            (lhs > rhs).then(|| SubsetWitness {
                a: bits(a, xs.len()).map(|k| xs[k].clone()).collect(),
                b: bits(b, ss.len()).map(|l| ss[l].clone()).collect(),
                lhs,
                rhs,
            })
        })
    });
    Ok(found)
}

/// Whether some `σ ≤ π` has marginals `μ` and `ν`, decided by checking
/// `μ(A) + ν(B) ≤ α + π(A × B)` for every pair of subsets.
pub fn check_pi_feasible(mu: &Measure<Participant>, nu: &Measure<Good>, pi: &Measure<Cell>) -> Result<Verdict> {
    Ok(match first_violation(mu, nu, &[pi])? {
        None => Verdict::Feasible,
        Some(w) => Verdict::Violated(w),
    })
}

/// Potentials with `Σ u μ + Σ v ν > Σ [u + v]₊ π`, which rule out any
/// `σ ≤ π` with marginals `μ`, `ν`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialViolation {
    pub u: Measure<Participant>,
    pub v: Measure<Good>,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl PotentialViolation {
    pub fn new(u: Measure<Participant>, v: Measure<Good>, mu: &Measure<Participant>, nu: &Measure<Good>, pi: &Measure<Cell>) -> Self {
        let lhs = mu.iter().fold(Rational::zero(), |acc, (k, w)| acc + u.value(k) * w)
            + nu.iter().fold(Rational::zero(), |acc, (k, w)| acc + v.value(k) * w);
        let rhs = pi
            .iter()
            .fold(Rational::zero(), |acc, ((p, g), w)| acc + positive_part(&(u.value(p) + v.value(g))) * w);
        Self { u, v, lhs, rhs }
    }

    pub fn is_violation(&self) -> bool {
        self.lhs > self.rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpFeasibility {
    Feasible(Measure<Cell>),
    Infeasible(PotentialViolation),
}

impl LpFeasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpFeasibility::Feasible(_))
    }
}

/// `{0 ≤ σ ≤ π, Pr_X σ = μ, Pr_S σ = ν}` with a zero objective. Rows come
/// first for the participants, then for the goods, each in sorted order.
pub(crate) fn coupling_lp(
    mu: &Measure<Participant>,
    nu: &Measure<Good>,
    pi: &Measure<Cell>,
    sense: Sense,
) -> (LinearProgram, Vec<(Cell, VarId)>) {
    let (xs, ss) = ground_sets(mu, nu, &[pi]);
    let mut lp = LinearProgram::new(sense);
    let mut rows_x: BTreeMap<&Participant, Vec<(VarId, Rational)>> = BTreeMap::new();
    let mut rows_s: BTreeMap<&Good, Vec<(VarId, Rational)>> = BTreeMap::new();
    let mut vars = Vec::new();
    for (key @ (p, g), cap) in pi.iter() {
        let var = lp.add_bounded_var(format!("sigma[{p},{g}]"), cap.clone());
        rows_x.entry(p).or_default().push((var, Rational::one()));
        rows_s.entry(g).or_default().push((var, Rational::one()));
        vars.push((key.clone(), var));
    }
    for x in &xs {
        lp.add_constraint(format!("mu[{x}]"), rows_x.remove(x).unwrap_or_default(), Relation::Eq, mu.value(x));
    }
    for s in &ss {
        lp.add_constraint(format!("nu[{s}]"), rows_s.remove(s).unwrap_or_default(), Relation::Eq, nu.value(s));
    }
    (lp, vars)
}

/// Solves `{0 ≤ σ ≤ π, Pr_X σ = μ, Pr_S σ = ν}`. A feasible answer carries
/// `σ`; an infeasible one carries the potentials read off the Farkas ray.
pub fn check_pi_feasible_lp(mu: &Measure<Participant>, nu: &Measure<Good>, pi: &Measure<Cell>) -> Result<LpFeasibility> {
    require_balanced(mu, nu, &[pi])?;
    let (xs, ss) = ground_sets(mu, nu, &[pi]);
    let (lp, vars) = coupling_lp(mu, nu, pi, Sense::Maximize);
    match lp::solve_lp(&lp)? {
        LpSolution::Optimal(opt) => Ok(LpFeasibility::Feasible(
            vars.iter().map(|(k, v)| (k.clone(), opt.value(*v).clone())).collect(),
        )),
        LpSolution::Infeasible(farkas) => {
            let y = &farkas.multipliers;
            let u = xs.iter().enumerate().map(|(k, x)| (x.clone(), -y[k].clone())).collect();
            let v = ss.iter().enumerate().map(|(l, s)| (s.clone(), -y[xs.len() + l].clone())).collect();
            let cert = PotentialViolation::new(u, v, mu, nu, pi);
            if !cert.is_violation() {
                return Err(Error::Internal("Farkas multipliers do not separate".into()));
            }
            Ok(LpFeasibility::Infeasible(cert))
        }
        LpSolution::Unbounded(_) => Err(Error::Internal("feasibility program cannot be unbounded".into())),
    }
}

/// Everything wrong with `σ` as an element of `Π(μ, ν; π)`.
pub fn sigma_violations(
    mu: &Measure<Participant>,
    nu: &Measure<Good>,
    pi: &Measure<Cell>,
    sigma: &Measure<Cell>,
) -> Vec<String> {
    let mut out: Vec<String> = sigma
        .negative_atoms()
        .map(|((p, g), w)| format!("sigma({p}, {g}) = {w} is negative"))
        .collect();
    for ((p, g), used, available) in sigma.excess_over(pi) {
        out.push(format!("sigma({p}, {g}) = {used} exceeds cap {available}"));
    }
    if &participant_marginal(sigma) != mu {
        out.push("participant marginal differs from mu".into());
    }
    if &good_marginal(sigma) != nu {
        out.push("good marginal differs from nu".into());
    }
    out
}

/// `μ̂ = Pr_X π⁺ ∧ Pr_Y π⁻` and `ν̂ = Pr_S π⁺ ∧ Pr_S π⁻` after cost normalization.
pub fn marginal_meets(inst: &ExchangeInstance) -> Result<(Measure<Participant>, Measure<Good>)> {
    let (n, _) = normalize_cost(inst)?;
    Ok((
        participant_marginal(&n.supply).meet(&participant_marginal(&n.demand)),
        good_marginal(&n.supply).meet(&good_marginal(&n.demand)),
    ))
}

/// `min(μ̂(X), ν̂(S))`, an upper bound on the normalized exchange value.
pub fn exchange_bound(inst: &ExchangeInstance) -> Result<Rational> {
    let (mu_hat, nu_hat) = marginal_meets(inst)?;
    Ok(std::cmp::min(mu_hat.total(), nu_hat.total()))
}

/// A violated pair `(A, B)` for `r(A, B) = min(π⁺(A × B), π⁻(A × B))`,
/// with both rearranged inequalities
/// `μ(A) ≤ ν(S∖B) + r` and `ν(B) ≤ μ(X∖A) + r` evaluated as `(lhs, rhs)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondRWitness {
    pub witness: SubsetWitness,
    pub r: Rational,
    pub participant_form: (Rational, Rational),
    pub good_form: (Rational, Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CondRVerdict {
    Holds,
    Violated(Box<CondRWitness>),
}

impl CondRVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, CondRVerdict::Holds)
    }
}

/// Checks `μ(A) + ν(B) ≤ α + r(A, B)` for all subset pairs on a unit-cost
/// instance. This holds exactly when `μ`, `ν` admit couplings under both
/// `π⁺` and `π⁻`.
pub fn check_cond_r(mu: &Measure<Participant>, nu: &Measure<Good>, inst: &ExchangeInstance) -> Result<CondRVerdict> {
    inst.validate()?;
    if !inst.has_unit_costs() {
        return Err(Error::NotNormalized);
    }
    let Some(witness) = first_violation(mu, nu, &[&inst.supply, &inst.demand])? else {
        return Ok(CondRVerdict::Holds);
    };
    let in_ab = |(p, g): &Cell| witness.a.contains(p) && witness.b.contains(g);
    let r = std::cmp::min(inst.supply.mass_where(in_ab), inst.demand.mass_where(in_ab));
    let mu_a = mu.mass_where(|p| witness.a.contains(p));
    let nu_b = nu.mass_where(|g| witness.b.contains(g));
    let participant_form = (mu_a.clone(), nu.total() - &nu_b + &r);
    let good_form = (nu_b, mu.total() - mu_a + &r);
    Ok(CondRVerdict::Violated(Box::new(CondRWitness {
        witness,
        r,
        participant_form,
        good_form,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fixtures::{inst_dead, inst_swap};
    use crate::harness::{random_marginal_triple, SizeParams};
    use crate::model::cell;
    use crate::primal::solve_via_reduction;
    use crate::rational::{int, ratio};

    fn mu(atoms: &[(&str, Rational)]) -> Measure<Participant> {
        atoms.iter().map(|(k, w)| (Participant::new(*k), w.clone())).collect()
    }

    fn nu(atoms: &[(&str, Rational)]) -> Measure<Good> {
        atoms.iter().map(|(k, w)| (Good::new(*k), w.clone())).collect()
    }

    fn pi(atoms: &[(&str, &str, Rational)]) -> Measure<Cell> {
        atoms.iter().map(|(p, g, w)| (cell(p, g), w.clone())).collect()
    }

    #[test]
    fn enumeration_examples() {
        let m = mu(&[("x1", int(1))]);
        let n = nu(&[("s1", int(1))]);
        assert!(check_pi_feasible(&m, &n, &pi(&[("x1", "s1", int(1))])).unwrap().is_feasible());
        let capped = check_pi_feasible(&m, &n, &pi(&[("x1", "s1", ratio(1, 2))])).unwrap();
        let Verdict::Violated(w) = capped else { panic!("expected a witness") };
        assert_eq!(w.a, [Participant::new("x1")].into());
        assert_eq!(w.b, [Good::new("s1")].into());
        assert_eq!((w.lhs, w.rhs), (int(2), ratio(3, 2)));
        assert!(check_pi_feasible(&Measure::new(), &Measure::new(), &Measure::new()).unwrap().is_feasible());
    }

    #[test]
    fn lp_examples() {
        let m = mu(&[("x1", int(1))]);
        let n = nu(&[("s1", int(1))]);
        assert!(check_pi_feasible_lp(&m, &n, &pi(&[("x1", "s1", int(1))])).unwrap().is_feasible());
        assert!(!check_pi_feasible_lp(&m, &n, &pi(&[("x1", "s1", ratio(1, 2))])).unwrap().is_feasible());
        assert!(check_pi_feasible_lp(&Measure::new(), &Measure::new(), &Measure::new()).unwrap().is_feasible());

        let two = pi(&[("x1", "s1", int(1)), ("x2", "s1", int(1))]);
        let forced = check_pi_feasible_lp(&mu(&[("x1", int(1)), ("x2", int(1))]), &nu(&[("s1", int(2))]), &two).unwrap();
        assert_eq!(forced, LpFeasibility::Feasible(two));

        let m2 = mu(&[("x1", int(2))]);
        let n2 = nu(&[("s1", int(2))]);
        let LpFeasibility::Infeasible(cert) = check_pi_feasible_lp(&m2, &n2, &pi(&[("x1", "s1", int(1))])).unwrap() else {
            panic!("cap below mass must be infeasible")
        };
        assert!(cert.is_violation());
    }

    #[test]
    fn preconditions() {
        let m = mu(&[("x1", int(1))]);
        assert!(matches!(check_pi_feasible(&m, &Measure::new(), &Measure::new()), Err(Error::Precondition(_))));
        assert!(matches!(check_pi_feasible_lp(&m, &Measure::new(), &Measure::new()), Err(Error::Precondition(_))));
        let wide: Measure<Participant> = (0..21).map(|k| (Participant::new(format!("p{k:02}")), int(1))).collect();
        let one = nu(&[("s", int(21))]);
        assert!(matches!(check_pi_feasible(&wide, &one, &Measure::new()), Err(Error::Capacity(_))));
        assert!(!check_pi_feasible_lp(&wide, &one, &Measure::new()).unwrap().is_feasible());
    }

    #[test]
    fn oracles_agree_on_random_triples() {
        let mut seen = [0, 0];
        for seed in 0..150 {
            let sizes = SizeParams::new(1 + seed as usize % 5, 1 + (seed as usize / 5) % 4);
            let t = random_marginal_triple(seed, sizes);
            let by_subsets = check_pi_feasible(&t.mu, &t.nu, &t.pi).unwrap();
            let by_lp = check_pi_feasible_lp(&t.mu, &t.nu, &t.pi).unwrap();
            assert_eq!(by_subsets.is_feasible(), by_lp.is_feasible(), "seed {seed}");
            match by_lp {
                LpFeasibility::Feasible(sigma) => assert!(sigma_violations(&t.mu, &t.nu, &t.pi, &sigma).is_empty()),
                LpFeasibility::Infeasible(cert) => assert!(cert.is_violation()),
            }
            seen[usize::from(by_subsets.is_feasible())] += 1;
        }
        assert!(seen[0] > 10 && seen[1] > 10, "{seen:?}");
    }

    #[test]
    fn bounds() {
        assert_eq!(exchange_bound(&inst_swap()).unwrap(), int(2));
        assert_eq!(exchange_bound(&inst_dead()).unwrap(), int(0));
        let (mu_hat, nu_hat) = marginal_meets(&inst_dead()).unwrap();
        assert_eq!((mu_hat.total(), nu_hat.total()), (int(0), int(1)));
    }

    #[test]
    fn joint_cap_examples() {
        let swap = inst_swap();
        let best = solve_via_reduction(&swap).unwrap().pair.sigma_plus;
        let verdict = check_cond_r(&participant_marginal(&best), &good_marginal(&best), &swap).unwrap();
        assert!(verdict.holds());
        assert!(check_cond_r(&Measure::new(), &Measure::new(), &swap).unwrap().holds());

        let dead = check_cond_r(&mu(&[("1", int(1))]), &nu(&[("a", int(1))]), &inst_dead()).unwrap();
        let CondRVerdict::Violated(w) = dead else { panic!("expected a witness") };
        assert_eq!(w.r, int(0));
        assert_eq!(w.witness.a, [Participant::new("1")].into());
        assert_eq!(w.witness.b, [Good::new("a")].into());
        assert!(w.participant_form.0 > w.participant_form.1);
        assert!(w.good_form.0 > w.good_form.1);
    }

    #[test]
    fn joint_cap_condition_is_joint_feasibility() {
        for seed in 0..60 {
            let sizes = SizeParams::new(1 + seed as usize % 4, 1 + seed as usize % 3);
            let t = random_marginal_triple(seed, sizes);
            let other = random_marginal_triple(seed + 1000, sizes).pi;
            let cells: Vec<&Cell> = t.pi.atoms().chain(other.atoms()).collect();
            let goods: BTreeSet<Good> = cells.iter().map(|c| c.1.clone()).chain(t.nu.atoms().cloned()).collect();
            let inst = ExchangeInstance {
                participants: cells.iter().map(|c| c.0.clone()).chain(t.mu.atoms().cloned()).collect(),
                cost: goods.iter().map(|g| (g.clone(), Rational::one())).collect(),
                goods,
                supply: t.pi.clone(),
                demand: other.clone(),
            };
            let joint = check_pi_feasible_lp(&t.mu, &t.nu, &t.pi).unwrap().is_feasible()
                && check_pi_feasible_lp(&t.mu, &t.nu, &other).unwrap().is_feasible();
            assert_eq!(check_cond_r(&t.mu, &t.nu, &inst).unwrap().holds(), joint, "seed {seed}");
        }
    }
}
