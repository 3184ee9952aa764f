//! Exact linear programming over the rationals.
//!
//! [`LinearProgram`] is the common form for every formulation in the crate.
//! [`solve_lp`] runs a two-phase bounded-variable primal simplex and returns
//! a self-certifying [`LpSolution`]: optimal points carry dual prices,
//! infeasible programs a Farkas combination, unbounded programs an
//! improving ray. [`LpSolution::verify`] re-checks any of these against the
//! program without touching solver state.

mod certificate;
mod simplex;

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use certificate::CertificateError;
pub use simplex::PivotRule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LowerBound {
    Zero,
    NegInfinity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub lower: LowerBound,
    /// Finite upper bound; only allowed together with a zero lower bound.
    pub upper: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(VarId, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub variables: Vec<Variable>,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            variables: Vec::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
        }
    }

    fn push_var(&mut self, name: String, lower: LowerBound, upper: Option<Rational>) -> VarId {
        self.variables.push(Variable { name, lower, upper });
        self.objective.push(Rational::zero());
        VarId(self.variables.len() - 1)
    }

    /// A variable `x ≥ 0`.
    pub fn add_var(&mut self, name: impl Into<String>) -> VarId {
        self.push_var(name.into(), LowerBound::Zero, None)
    }

    /// A variable `0 ≤ x ≤ upper`.
    pub fn add_bounded_var(&mut self, name: impl Into<String>, upper: Rational) -> VarId {
        self.push_var(name.into(), LowerBound::Zero, Some(upper))
    }

    /// An unrestricted variable.
    pub fn add_free_var(&mut self, name: impl Into<String>) -> VarId {
        self.push_var(name.into(), LowerBound::NegInfinity, None)
    }

    pub fn set_objective(&mut self, var: VarId, coeff: Rational) {
        self.objective[var.0] = coeff;
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(VarId, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> RowId {
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs,
            relation,
            rhs,
        });
        RowId(self.constraints.len() - 1)
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraint(&self, row: RowId) -> &Constraint {
        &self.constraints[row.0]
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.variables.len() {
            return Err(Error::MalformedLp("objective length differs from variable count".into()));
        }
        for v in &self.variables {
            match (&v.lower, &v.upper) {
                (LowerBound::NegInfinity, Some(_)) => {
                    return Err(Error::MalformedLp(format!(
                        "free variable {} cannot carry an upper bound",
                        v.name
                    )))
                }
                (LowerBound::Zero, Some(u)) if *u < Rational::zero() => {
                    return Err(Error::MalformedLp(format!(
                        "variable {} has negative upper bound {u}",
                        v.name
                    )))
                }
                _ => {}
            }
        }
        for c in &self.constraints {
            if let Some((var, _)) = c.coeffs.iter().find(|(v, _)| v.0 >= self.variables.len()) {
                return Err(Error::MalformedLp(format!(
                    "constraint {} references unknown variable #{}",
                    c.name, var.0
                )));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(x)
            .fold(Rational::zero(), |acc, (c, v)| acc + c * v)
    }

    pub fn row_activity(&self, row: &Constraint, x: &[Rational]) -> Rational {
        row.coeffs
            .iter()
            .fold(Rational::zero(), |acc, (v, a)| acc + a * &x[v.0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// An optimal vertex with its dual prices.
///
/// `duals[r]` is the shadow price of constraint `r`: the rate of change of
/// the optimal objective as its right-hand side grows. Under this convention
/// a maximization has `duals ≥ 0` on `≤` rows and `≤ 0` on `≥` rows, and the
/// signs flip for minimization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optimum {
    pub values: Vec<Rational>,
    pub duals: Vec<Rational>,
    pub objective: Rational,
}

impl Optimum {
    pub fn value(&self, var: VarId) -> &Rational {
        &self.values[var.0]
    }

    pub fn dual(&self, row: RowId) -> &Rational {
        &self.duals[row.0]
    }
}

/// Row multipliers `y` whose combination `Σ y_r a_r x ⋚ Σ y_r b_r` cannot be
/// met by any point inside the variable bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

/// A feasible point and a direction along which the objective improves forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnboundedRay {
    pub point: Vec<Rational>,
    pub direction: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpSolution {
    Optimal(Optimum),
    Infeasible(FarkasCertificate),
    Unbounded(UnboundedRay),
}

impl LpSolution {
    pub fn status(&self) -> LpStatus {
        match self {
            LpSolution::Optimal(_) => LpStatus::Optimal,
            LpSolution::Infeasible(_) => LpStatus::Infeasible,
            LpSolution::Unbounded(_) => LpStatus::Unbounded,
        }
    }

    pub fn optimum(&self) -> Option<&Optimum> {
        match self {
            LpSolution::Optimal(o) => Some(o),
            _ => None,
        }
    }

    pub fn into_optimum(self) -> Option<Optimum> {
        match self {
            LpSolution::Optimal(o) => Some(o),
            _ => None,
        }
    }

    /// Independently re-checks the attached certificate against `lp`.
    #[allow(clippy::result_large_err)]
    pub fn verify(&self, lp: &LinearProgram) -> Result<(), CertificateError> {
        match self {
            LpSolution::Optimal(o) => certificate::verify_optimum(lp, o),
            LpSolution::Infeasible(f) => certificate::verify_farkas(lp, f),
            LpSolution::Unbounded(r) => certificate::verify_ray(lp, r),
        }
    }
}

pub use certificate::{check_primal_feasible, dual_objective};

/// Solves `lp` exactly with the default (Bland) pivot rule.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with(lp, PivotRule::default())
}

pub fn solve_lp_with(lp: &LinearProgram, rule: PivotRule) -> Result<LpSolution> {
    lp.validate()?;
    Ok(simplex::solve(lp, rule))
}

/// Solves a program that is known to have an optimum; anything else is a bug
/// in the caller's formulation.
pub(crate) fn solve_expect_optimal(lp: &LinearProgram, what: &str) -> Result<Optimum> {
    match solve_lp(lp)? {
        LpSolution::Optimal(o) => Ok(o),
        other => Err(Error::Internal(format!(
            "{what} LP reported {:?} although it always has an optimum",
            other.status()
        ))),
    }
}

#[cfg(test)]
mod tests;
