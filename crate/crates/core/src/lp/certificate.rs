//! Solver-independent checks for LP certificates.

#![allow(clippy::result_large_err)]

use num_traits::{Signed, Zero};
use thiserror::Error;

use super::{FarkasCertificate, LinearProgram, LowerBound, Optimum, Relation, Sense, UnboundedRay};
use crate::rational::Rational;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("vector has {got} entries, expected {want}")]
    Dimension { got: usize, want: usize },
    #[error("variable {name} = {value} is outside its bounds")]
    Bound { name: String, value: Rational },
    #[error("constraint {name} violated: {activity} {relation} {rhs} fails")]
    Row {
        name: String,
        activity: Rational,
        relation: Relation,
        rhs: Rational,
    },
    #[error("dual price {value} of constraint {name} has the wrong sign")]
    DualSign { name: String, value: Rational },
    #[error("reduced cost {value} of variable {name} is not dual feasible")]
    ReducedCost { name: String, value: Rational },
    #[error("reported objective {reported} differs from recomputed {recomputed}")]
    Objective {
        reported: Rational,
        recomputed: Rational,
    },
    #[error("primal objective {primal} differs from dual objective {dual}")]
    Gap { primal: Rational, dual: Rational },
    #[error("complementary slackness fails at {0}")]
    Slackness(String),
    #[error("not a Farkas certificate: {0}")]
    Farkas(String),
    #[error("not an unbounded ray: {0}")]
    Ray(String),
}

fn sign(sense: Sense) -> Rational {
    match sense {
        Sense::Maximize => Rational::from_integer(1.into()),
        Sense::Minimize => Rational::from_integer((-1).into()),
    }
}

fn check_len(got: usize, want: usize) -> Result<(), CertificateError> {
    if got == want {
        Ok(())
    } else {
        Err(CertificateError::Dimension { got, want })
    }
}

fn holds(activity: &Rational, relation: Relation, rhs: &Rational) -> bool {
    match relation {
        Relation::Le => activity <= rhs,
        Relation::Eq => activity == rhs,
        Relation::Ge => activity >= rhs,
    }
}

pub fn check_primal_feasible(lp: &LinearProgram, x: &[Rational]) -> Result<(), CertificateError> {
    check_len(x.len(), lp.num_vars())?;
    for (v, value) in lp.variables.iter().zip(x) {
        let below = v.lower == LowerBound::Zero && value.is_negative();
        let above = v.upper.as_ref().is_some_and(|u| value > u);
        if below || above {
            return Err(CertificateError::Bound {
                name: v.name.clone(),
                value: value.clone(),
            });
        }
    }
    for row in &lp.constraints {
        let activity = lp.row_activity(row, x);
        if !holds(&activity, row.relation, &row.rhs) {
            return Err(CertificateError::Row {
                name: row.name.clone(),
                activity,
                relation: row.relation,
                rhs: row.rhs.clone(),
            });
        }
    }
    Ok(())
}

/// `Σ_r y_r a_r`, one entry per variable.
fn combine_rows(lp: &LinearProgram, y: &[Rational]) -> Vec<Rational> {
    let mut w = vec![Rational::zero(); lp.num_vars()];
    for (row, yr) in lp.constraints.iter().zip(y) {
        if yr.is_zero() {
            continue;
        }
        for (v, a) in &row.coeffs {
            w[v.0] += yr * a;
        }
    }
    w
}

/// Reduced costs `c_j − Σ_r y_r a_rj` written for the maximization form.
fn max_form_reduced_costs(lp: &LinearProgram, y: &[Rational]) -> Vec<Rational> {
    let s = sign(lp.sense);
    let w = combine_rows(lp, y);
    lp.objective
        .iter()
        .zip(w)
        .map(|(c, wj)| (c - wj) * &s)
        .collect()
}

/// Checks dual feasibility of shadow prices `y` and returns the dual objective.
pub fn dual_objective(lp: &LinearProgram, y: &[Rational]) -> Result<Rational, CertificateError> {
    check_len(y.len(), lp.num_constraints())?;
    let s = sign(lp.sense);
    for (row, yr) in lp.constraints.iter().zip(y) {
        let ys = yr * &s;
        let ok = match row.relation {
            Relation::Le => !ys.is_negative(),
            Relation::Ge => !ys.is_positive(),
            Relation::Eq => true,
        };
        if !ok {
            return Err(CertificateError::DualSign {
                name: row.name.clone(),
                value: yr.clone(),
            });
        }
    }
    let d = max_form_reduced_costs(lp, y);
    let mut value = lp
        .constraints
        .iter()
        .zip(y)
        .fold(Rational::zero(), |acc, (row, yr)| acc + yr * &row.rhs)
        * &s;
    for (v, dj) in lp.variables.iter().zip(&d) {
        let ok = match (&v.lower, &v.upper) {
            (LowerBound::NegInfinity, _) => dj.is_zero(),
            (LowerBound::Zero, None) => !dj.is_positive(),
            (LowerBound::Zero, Some(u)) => {
                if dj.is_positive() {
                    value += dj * u;
                }
                true
            }
        };
        if !ok {
            return Err(CertificateError::ReducedCost {
                name: v.name.clone(),
                value: dj * &s,
            });
        }
    }
    Ok(value * s)
}

pub(super) fn verify_optimum(lp: &LinearProgram, o: &Optimum) -> Result<(), CertificateError> {
    check_primal_feasible(lp, &o.values)?;
    let primal = lp.objective_value(&o.values);
    if primal != o.objective {
        return Err(CertificateError::Objective {
            reported: o.objective.clone(),
            recomputed: primal,
        });
    }
    let dual = dual_objective(lp, &o.duals)?;
    if dual != primal {
        return Err(CertificateError::Gap { primal, dual });
    }
    for (row, yr) in lp.constraints.iter().zip(&o.duals) {
        if !yr.is_zero() && lp.row_activity(row, &o.values) != row.rhs {
            return Err(CertificateError::Slackness(format!(
                "constraint {} is priced but not tight",
                row.name
            )));
        }
    }
    let d = max_form_reduced_costs(lp, &o.duals);
    for ((v, dj), xj) in lp.variables.iter().zip(&d).zip(&o.values) {
        let at_lower = v.lower == LowerBound::Zero && xj.is_zero();
        let at_upper = v.upper.as_ref() == Some(xj);
        if (dj.is_negative() && !at_lower) || (dj.is_positive() && !at_upper) {
            return Err(CertificateError::Slackness(format!(
                "variable {} has reduced cost {} off its bound",
                v.name, dj
            )));
        }
    }
    Ok(())
}

pub(super) fn verify_farkas(lp: &LinearProgram, cert: &FarkasCertificate) -> Result<(), CertificateError> {
    let y = &cert.multipliers;
    check_len(y.len(), lp.num_constraints())?;
    for (row, yr) in lp.constraints.iter().zip(y) {
        let ok = match row.relation {
            Relation::Le => !yr.is_negative(),
            Relation::Ge => !yr.is_positive(),
            Relation::Eq => true,
        };
        if !ok {
            return Err(CertificateError::Farkas(format!(
                "multiplier {yr} of {} has the wrong sign",
                row.name
            )));
        }
    }
    // Every feasible x satisfies w·x ≤ y·b; show the box forces w·x > y·b.
    let w = combine_rows(lp, y);
    let mut box_min = Rational::zero();
    for (v, wj) in lp.variables.iter().zip(&w) {
        match (&v.lower, &v.upper) {
            (LowerBound::NegInfinity, _) if !wj.is_zero() => {
                return Err(CertificateError::Farkas(format!(
                    "free variable {} has nonzero weight",
                    v.name
                )))
            }
            (LowerBound::Zero, None) if wj.is_negative() => {
                return Err(CertificateError::Farkas(format!(
                    "unbounded variable {} has negative weight",
                    v.name
                )))
            }
            (LowerBound::Zero, Some(u)) if wj.is_negative() => box_min += wj * u,
            _ => {}
        }
    }
    let yb = lp
        .constraints
        .iter()
        .zip(y)
        .fold(Rational::zero(), |acc, (row, yr)| acc + yr * &row.rhs);
    if box_min > yb {
        Ok(())
    } else {
        Err(CertificateError::Farkas(format!(
            "bound {box_min} does not exceed combined right-hand side {yb}"
        )))
    }
}

pub(super) fn verify_ray(lp: &LinearProgram, ray: &UnboundedRay) -> Result<(), CertificateError> {
    check_primal_feasible(lp, &ray.point)?;
    let d = &ray.direction;
    check_len(d.len(), lp.num_vars())?;
    for (v, dj) in lp.variables.iter().zip(d) {
        let ok = match (&v.lower, &v.upper) {
            (LowerBound::NegInfinity, _) => true,
            (LowerBound::Zero, None) => !dj.is_negative(),
            (LowerBound::Zero, Some(_)) => dj.is_zero(),
        };
        if !ok {
            return Err(CertificateError::Ray(format!("direction leaves the bounds of {}", v.name)));
        }
    }
    for row in &lp.constraints {
        if !holds(&lp.row_activity(row, d), row.relation, &Rational::zero()) {
            return Err(CertificateError::Ray(format!("direction leaves constraint {}", row.name)));
        }
    }
    if (lp.objective_value(d) * sign(lp.sense)).is_positive() {
        Ok(())
    } else {
        Err(CertificateError::Ray("objective does not improve along the direction".into()))
    }
}
