//! Grid discretization of the continuous example on `X = S = [0, 1]` with
//! supply uniform on `D = {x/2 ≤ s ≤ (x + 1)/2}` and demand uniform on the
//! complement. The continuous optimum is `1/4`.

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ExchangeInstance, Good, Measure, Participant};
use crate::primal::solve_via_reduction;
use crate::rational::{int, ratio, Rational};

pub const EXAMPLE1_OPTIMUM: (i64, i64) = (1, 4);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Usage("grid size must be at least 1".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Zero-padded 1-based label, so that label order is numeric order.
    pub fn label(&self, index: usize) -> String {
        let width = self.n.to_string().len();
        format!("{:0width$}", index + 1)
    }
}

type Point = (Rational, Rational);

/// Keeps the part of a convex polygon where `a·x + b·s + c ≥ 0`.
fn clip(poly: &[Point], a: &Rational, b: &Rational, c: &Rational) -> Vec<Point> {
    let side = |(x, s): &Point| a * x + b * s + c;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for (k, p) in poly.iter().enumerate() {
        let q = &poly[(k + 1) % poly.len()];
        let (fp, fq) = (side(p), side(q));
        if !fp.is_negative() {
            out.push(p.clone());
        }
        if (fp.is_positive() && fq.is_negative()) || (fp.is_negative() && fq.is_positive()) {
            let t = &fp / (&fp - &fq);
            out.push((&p.0 + &t * (&q.0 - &p.0), &p.1 + &t * (&q.1 - &p.1)));
        }
    }
    out
}

fn area(poly: &[Point]) -> Rational {
    let twice = (0..poly.len()).fold(Rational::zero(), |acc, k| {
        let (p, q) = (&poly[k], &poly[(k + 1) % poly.len()]);
        acc + &p.0 * &q.1 - &q.0 * &p.1
    });
    twice.abs() / int(2)
}

/// Exact area of `D ∩ ([x0, x1] × [s0, s1])`.
pub fn area_in_domain(x0: &Rational, x1: &Rational, s0: &Rational, s1: &Rational) -> Rational {
    let cell = vec![
        (x0.clone(), s0.clone()),
        (x1.clone(), s0.clone()),
        (x1.clone(), s1.clone()),
        (x0.clone(), s1.clone()),
    ];
    // s ≥ x/2 and s ≤ (x + 1)/2
    let lower = clip(&cell, &int(-1), &int(2), &int(0));
    if lower.len() < 3 {
        return Rational::zero();
    }
    let both = clip(&lower, &int(1), &int(-2), &int(1));
    if both.len() < 3 {
        return Rational::zero();
    }
    area(&both)
}

/// Participants and goods are the `n` grid cells of `[0, 1]`; supply and
/// demand at a cell pair are the exact areas inside and outside `D`.
pub fn discretize_example1(grid: GridSpec) -> ExchangeInstance {
    let n = grid.n as i64;
    let labels: Vec<String> = (0..grid.n).map(|k| grid.label(k)).collect();
    let mut inst = ExchangeInstance::empty(labels.iter().map(String::as_str), labels.iter().map(String::as_str));
    let cell_area = ratio(1, n * n);
    let mut supply = Measure::new();
    let mut demand = Measure::new();
    for k in 0..n {
        let (x0, x1) = (ratio(k, n), ratio(k + 1, n));
        for l in 0..n {
            let inside = area_in_domain(&x0, &x1, &ratio(l, n), &ratio(l + 1, n));
            let key = (
                Participant::new(labels[k as usize].as_str()),
                Good::new(labels[l as usize].as_str()),
            );
            demand.set(key.clone(), &cell_area - &inside);
            supply.set(key, inside);
        }
    }
    inst.supply = supply;
    inst.demand = demand;
    inst
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub value: Rational,
    /// `|value − 1/4|`
    pub error: Rational,
}

/// Solves the discretization at each grid size with the reduced method.
pub fn convergence_study(sizes: &[usize]) -> Result<Vec<ConvergenceRow>> {
    let grids = sizes.iter().map(|&n| GridSpec::new(n)).collect::<Result<Vec<_>>>()?;
    let target = ratio(EXAMPLE1_OPTIMUM.0, EXAMPLE1_OPTIMUM.1);
    grids
        .into_par_iter()
        .map(|grid| {
            let value = solve_via_reduction(&discretize_example1(grid))?.value;
            let error = (&value - &target).abs();
            Ok(ConvergenceRow { n: grid.n, value, error })
        })
        .collect()
}
