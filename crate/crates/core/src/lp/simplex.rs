//! Dense-tableau, bounded-variable, two-phase primal simplex in exact arithmetic.
//!
//! The program is brought to `min c·x, A x = b, b ≥ 0, 0 ≤ x ≤ u` by splitting
//! free variables, adding one slack per inequality and negating rows with a
//! negative right-hand side. Every row gets an artificial column; their
//! tableau columns hold `B⁻¹`, which is how dual prices are read back.

use num_traits::{One, Signed, Zero};

use super::{
    Constraint, FarkasCertificate, LinearProgram, LowerBound, LpSolution, Optimum, Relation, Sense,
    UnboundedRay,
};
use crate::rational::Rational;

/// Entering-variable selection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest eligible index enters; ties in the ratio test leave by smallest
    /// index. Never cycles.
    #[default]
    Bland,
    /// Largest reduced cost enters while pivots make progress; after a
    /// degenerate pivot the next choice falls back to Bland until progress
    /// resumes, which keeps termination guaranteed.
    DantzigBland,
}

#[derive(Clone, Copy, Debug)]
enum Origin {
    Var(usize),
    NegVar(usize),
    Slack,
    Artificial(usize),
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    beta: Vec<Rational>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    upper: Vec<Option<Rational>>,
    cost: Vec<Rational>,
    d: Vec<Rational>,
    excluded: Vec<bool>,
    origin: Vec<Origin>,
    obj: Rational,
    row_sign: Vec<bool>,
}

enum Stop {
    Optimal,
    Unbounded { entering: usize },
}

struct Step {
    t: Rational,
    row: Option<usize>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let mut origin = Vec::new();
        let mut col_of_var = Vec::with_capacity(lp.num_vars());
        let mut upper = Vec::new();
        for (j, v) in lp.variables.iter().enumerate() {
            col_of_var.push(origin.len());
            origin.push(Origin::Var(j));
            upper.push(v.upper.clone());
            if v.lower == LowerBound::NegInfinity {
                origin.push(Origin::NegVar(j));
                upper.push(None);
            }
        }
        let slack_start = origin.len();
        let slack_rows: Vec<usize> = lp
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.relation != Relation::Eq)
            .map(|(r, _)| r)
            .collect();
        for _ in &slack_rows {
            origin.push(Origin::Slack);
            upper.push(None);
        }
        let art_start = origin.len();
        let m = lp.num_constraints();
        for r in 0..m {
            origin.push(Origin::Artificial(r));
            upper.push(None);
        }
        let n = origin.len();

        let mut rows = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        let mut slack_iter = slack_rows.iter().enumerate().peekable();
        for (r, con) in lp.constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); n];
            fill_row(&mut row, con, &col_of_var, lp);
            if let Some(&(k, &sr)) = slack_iter.peek() {
                if sr == r {
                    row[slack_start + k] = match con.relation {
                        Relation::Le => Rational::one(),
                        _ => -Rational::one(),
                    };
                    slack_iter.next();
                }
            }
            let negate = con.rhs.is_negative();
            if negate {
                for v in row.iter_mut().filter(|v| !v.is_zero()) {
                    *v = -&*v;
                }
            }
            row[art_start + r] = Rational::one();
            row_sign.push(!negate);
            beta.push(if negate { -&con.rhs } else { con.rhs.clone() });
            rows.push(row);
        }

        let mut cost = vec![Rational::zero(); n];
        for c in cost.iter_mut().skip(art_start) {
            *c = Rational::one();
        }
        let mut t = Tableau {
            rows,
            beta,
            basis: (art_start..n).collect(),
            is_basic: (0..n).map(|j| j >= art_start).collect(),
            at_upper: vec![false; n],
            upper,
            cost,
            d: Vec::new(),
            excluded: vec![false; n],
            origin,
            obj: Rational::zero(),
            row_sign,
        };
        t.reprice();
        t
    }

    fn ncols(&self) -> usize {
        self.origin.len()
    }

    /// Recomputes reduced costs and the objective from scratch for `self.cost`.
    fn reprice(&mut self) {
        let n = self.ncols();
        let mut d = self.cost.clone();
        let mut obj = Rational::zero();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &self.cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            obj += cb * &self.beta[i];
            for (dj, a) in d.iter_mut().zip(row) {
                if !a.is_zero() {
                    *dj -= cb * a;
                }
            }
        }
        for j in 0..n {
            if !self.is_basic[j] && self.at_upper[j] {
                if let Some(u) = &self.upper[j] {
                    obj += &self.cost[j] * u;
                }
            }
        }
        self.d = d;
        self.obj = obj;
    }

    fn eligible(&self, j: usize) -> bool {
        if self.is_basic[j] || self.excluded[j] {
            return false;
        }
        if self.at_upper[j] {
            self.d[j].is_positive()
        } else {
            self.d[j].is_negative()
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<usize> {
        if bland {
            return (0..self.ncols()).find(|&j| self.eligible(j));
        }
        let mut best: Option<(usize, &Rational)> = None;
        for j in (0..self.ncols()).filter(|&j| self.eligible(j)) {
            let score = &self.d[j];
            let better = match best {
                None => true,
                Some((_, s)) => score.abs() > s.abs(),
            };
            if better {
                best = Some((j, score));
            }
        }
        best.map(|(j, _)| j)
    }

    fn ratio_test(&self, q: usize, increasing: bool) -> Option<Step> {
        let mut best: Option<Step> = self.upper[q].as_ref().map(|u| Step {
            t: u.clone(),
            row: None,
        });
        for (i, row) in self.rows.iter().enumerate() {
            let a = &row[q];
            if a.is_zero() {
                continue;
            }
            let delta = if increasing { a.clone() } else { -a };
            let bv = self.basis[i];
            let t = if delta.is_positive() {
                &self.beta[i] / &delta
            } else {
                match &self.upper[bv] {
                    Some(u) => (u - &self.beta[i]) / -delta,
                    None => continue,
                }
            };
            let replace = match &best {
                None => true,
                Some(b) => {
                    t < b.t || (t == b.t && matches!(b.row, Some(r) if bv < self.basis[r]))
                }
            };
            if replace {
                best = Some(Step { t, row: Some(i) });
            }
        }
        best
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let mut prow = std::mem::take(&mut self.rows[r]);
        let piv = prow[q].clone();
        if !piv.is_one() {
            let inv = piv.recip();
            for v in prow.iter_mut().filter(|v| !v.is_zero()) {
                *v *= &inv;
            }
        }
        let nz: Vec<(usize, Rational)> = prow
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| (k, v.clone()))
            .collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[q].clone();
            if f.is_zero() {
                continue;
            }
            for (k, pv) in &nz {
                row[*k] -= &f * pv;
            }
        }
        let f = self.d[q].clone();
        if !f.is_zero() {
            for (k, pv) in &nz {
                self.d[*k] -= &f * pv;
            }
        }
        self.rows[r] = prow;
    }

    /// Pivots until optimal or unbounded. `stop_at_zero` ends phase one as soon
    /// as the artificial mass vanishes.
    fn run(&mut self, rule: PivotRule, stop_at_zero: bool) -> Stop {
        let mut bland = rule == PivotRule::Bland;
        loop {
            if stop_at_zero && self.obj.is_zero() {
                return Stop::Optimal;
            }
            let Some(q) = self.choose_entering(bland) else {
                return Stop::Optimal;
            };
            let increasing = !self.at_upper[q];
            let Some(step) = self.ratio_test(q, increasing) else {
                return Stop::Unbounded { entering: q };
            };
            if rule == PivotRule::DantzigBland {
                bland = step.t.is_zero();
            }
            self.advance(q, increasing, step);
        }
    }

    fn advance(&mut self, q: usize, increasing: bool, step: Step) {
        let Step { t, row } = step;
        if !t.is_zero() {
            let signed_t = if increasing { t.clone() } else { -&t };
            for (i, r) in self.rows.iter().enumerate() {
                let a = &r[q];
                if !a.is_zero() {
                    self.beta[i] -= a * &signed_t;
                }
            }
            self.obj += &self.d[q] * &signed_t;
        }
        match row {
            None => self.at_upper[q] = !self.at_upper[q],
            Some(r) => {
                let leaving = self.basis[r];
                let delta_positive = if increasing {
                    self.rows[r][q].is_positive()
                } else {
                    self.rows[r][q].is_negative()
                };
                let start = if self.at_upper[q] {
                    self.upper[q].clone().expect("nonbasic at upper has a bound")
                } else {
                    Rational::zero()
                };
                let entering_value = if increasing { start + &t } else { start - &t };
                self.is_basic[leaving] = false;
                self.at_upper[leaving] = !delta_positive;
                if matches!(self.origin[leaving], Origin::Artificial(_)) {
                    self.excluded[leaving] = true;
                }
                self.is_basic[q] = true;
                self.at_upper[q] = false;
                self.basis[r] = q;
                self.beta[r] = entering_value;
                self.pivot(r, q);
            }
        }
    }

    fn column_values(&self) -> Vec<Rational> {
        let mut x: Vec<Rational> = (0..self.ncols())
            .map(|j| match (&self.at_upper[j], &self.upper[j]) {
                (true, Some(u)) => u.clone(),
                _ => Rational::zero(),
            })
            .collect();
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.beta[i].clone();
        }
        x
    }

    fn to_original(&self, cols: &[Rational], num_vars: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); num_vars];
        for (j, v) in cols.iter().enumerate() {
            match self.origin[j] {
                Origin::Var(k) => x[k] += v,
                Origin::NegVar(k) => x[k] -= v,
                _ => {}
            }
        }
        x
    }

    /// `c_B B⁻¹` per row, read off the artificial columns.
    fn row_prices(&self) -> Vec<Rational> {
        let mut prices = vec![Rational::zero(); self.rows.len()];
        for (j, o) in self.origin.iter().enumerate() {
            if let Origin::Artificial(r) = *o {
                prices[r] = &self.cost[j] - &self.d[j];
            }
        }
        prices
    }

    fn to_original_rows(&self, std_values: Vec<Rational>) -> Vec<Rational> {
        std_values
            .into_iter()
            .zip(&self.row_sign)
            .map(|(v, &keep)| if keep { v } else { -v })
            .collect()
    }
}

fn fill_row(row: &mut [Rational], con: &Constraint, col_of_var: &[usize], lp: &LinearProgram) {
    for (v, a) in &con.coeffs {
        let c = col_of_var[v.0];
        row[c] += a;
        if lp.variables[v.0].lower == LowerBound::NegInfinity {
            row[c + 1] -= a;
        }
    }
}

pub(super) fn solve(lp: &LinearProgram, rule: PivotRule) -> LpSolution {
    let mut t = Tableau::build(lp);

    // phase one: drive the artificial mass to zero
    t.run(rule, true);
    if t.obj.is_positive() {
        let y_std: Vec<Rational> = t.row_prices().into_iter().map(|p| -p).collect();
        return LpSolution::Infeasible(FarkasCertificate {
            multipliers: t.to_original_rows(y_std),
        });
    }

    // phase two: artificials are pinned to zero and never re-enter
    let flip = match lp.sense {
        Sense::Minimize => Rational::one(),
        Sense::Maximize => -Rational::one(),
    };
    for j in 0..t.ncols() {
        t.cost[j] = match t.origin[j] {
            Origin::Var(k) => &lp.objective[k] * &flip,
            Origin::NegVar(k) => -&lp.objective[k] * &flip,
            Origin::Slack => Rational::zero(),
            Origin::Artificial(_) => {
                t.upper[j] = Some(Rational::zero());
                if !t.is_basic[j] {
                    t.excluded[j] = true;
                }
                Rational::zero()
            }
        };
    }
    t.reprice();

    match t.run(rule, false) {
        Stop::Optimal => {
            let values = t.to_original(&t.column_values(), lp.num_vars());
            let back = flip.clone();
            let duals_std: Vec<Rational> = t.row_prices().into_iter().map(|p| p * &back).collect();
            let objective = lp.objective_value(&values);
            LpSolution::Optimal(Optimum {
                values,
                duals: t.to_original_rows(duals_std),
                objective,
            })
        }
        Stop::Unbounded { entering } => {
            let mut dir = vec![Rational::zero(); t.ncols()];
            dir[entering] = Rational::one();
            for (i, &b) in t.basis.iter().enumerate() {
                dir[b] = -&t.rows[i][entering];
            }
            LpSolution::Unbounded(UnboundedRay {
                point: t.to_original(&t.column_values(), lp.num_vars()),
                direction: t.to_original(&dir, lp.num_vars()),
            })
        }
    }
}
