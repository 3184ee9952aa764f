use proptest::prelude::*;

use super::*;
use crate::rational::{int, ratio};

fn row(pairs: &[(VarId, i64)]) -> Vec<(VarId, Rational)> {
    pairs.iter().map(|&(v, a)| (v, int(a))).collect()
}

fn solve_checked(lp: &LinearProgram) -> LpSolution {
    for rule in [PivotRule::Bland, PivotRule::DantzigBland] {
        let sol = solve_lp_with(lp, rule).unwrap();
        sol.verify(lp).unwrap_or_else(|e| panic!("{rule:?}: {e}"));
    }
    solve_lp(lp).unwrap()
}

#[test]
fn box_maximum() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x1 = lp.add_var("x1");
    let x2 = lp.add_var("x2");
    lp.set_objective(x1, int(1));
    lp.set_objective(x2, int(1));
    lp.add_constraint("c1", row(&[(x1, 1)]), Relation::Le, int(1));
    lp.add_constraint("c2", row(&[(x2, 1)]), Relation::Le, int(1));
    let sol = solve_checked(&lp);
    let o = sol.optimum().unwrap();
    assert_eq!(o.objective, int(2));
    assert_eq!(o.duals, vec![int(1), int(1)]);
}

#[test]
fn contradictory_equality_is_infeasible() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_var("x");
    lp.set_objective(x, int(1));
    lp.add_constraint("c", row(&[(x, 1)]), Relation::Eq, int(-1));
    let sol = solve_checked(&lp);
    assert_eq!(sol.status(), LpStatus::Infeasible);
}

#[test]
fn unconstrained_direction_is_unbounded() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_var("x");
    lp.set_objective(x, int(1));
    lp.add_constraint("c", vec![(x, int(0))], Relation::Le, int(1));
    let sol = solve_checked(&lp);
    match sol {
        LpSolution::Unbounded(ray) => assert_eq!(ray.direction, vec![int(1)]),
        other => panic!("expected unbounded, got {:?}", other.status()),
    }
}

#[test]
fn furniture_problem_shadow_prices() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let chairs = lp.add_var("chairs");
    let tables = lp.add_var("tables");
    lp.set_objective(chairs, int(70));
    lp.set_objective(tables, int(50));
    lp.add_constraint("wood", row(&[(chairs, 4), (tables, 3)]), Relation::Le, int(240));
    lp.add_constraint("labour", row(&[(chairs, 2), (tables, 1)]), Relation::Le, int(100));
    let o = solve_checked(&lp).into_optimum().unwrap();
    assert_eq!(o.objective, int(4100));
    assert_eq!(o.values, vec![int(30), int(40)]);
    assert_eq!(o.duals, vec![int(15), int(5)]);
}

#[test]
fn minimization_with_free_and_bounded_variables() {
    // min x - y + 2z  s.t.  x + y >= 2,  x - z = -1,  y <= 3 (bound),  z free
    let mut lp = LinearProgram::new(Sense::Minimize);
    let x = lp.add_var("x");
    let y = lp.add_bounded_var("y", int(3));
    let z = lp.add_free_var("z");
    lp.set_objective(x, int(1));
    lp.set_objective(y, int(-1));
    lp.set_objective(z, int(2));
    lp.add_constraint("cover", row(&[(x, 1), (y, 1)]), Relation::Ge, int(2));
    lp.add_constraint("link", row(&[(x, 1), (z, -1)]), Relation::Eq, int(-1));
    // z = x + 1, objective = 3x - y + 2, minimized at x = 0, y = 3
    let o = solve_checked(&lp).into_optimum().unwrap();
    assert_eq!(o.objective, int(-1));
    assert_eq!(o.values, vec![int(0), int(3), int(1)]);
}

#[test]
fn beale_cycling_example_terminates() {
    // Degenerate program on which the textbook largest-coefficient rule cycles.
    let mut lp = LinearProgram::new(Sense::Minimize);
    let x: Vec<VarId> = (0..4).map(|k| lp.add_var(format!("x{k}"))).collect();
    for (v, c) in x.iter().zip([ratio(-3, 4), int(150), ratio(-1, 50), int(6)]) {
        lp.set_objective(*v, c);
    }
    let coeffs = |a: [Rational; 4]| x.iter().copied().zip(a).collect::<Vec<_>>();
    lp.add_constraint("r1", coeffs([ratio(1, 4), int(-60), ratio(-1, 25), int(9)]), Relation::Le, int(0));
    lp.add_constraint("r2", coeffs([ratio(1, 2), int(-90), ratio(-1, 50), int(3)]), Relation::Le, int(0));
    lp.add_constraint("r3", coeffs([int(0), int(0), int(1), int(0)]), Relation::Le, int(1));
    let o = solve_checked(&lp).into_optimum().unwrap();
    assert_eq!(o.objective, ratio(-1, 20));
}

#[test]
fn redundant_equalities_are_tolerated() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_bounded_var("x", int(5));
    let y = lp.add_var("y");
    lp.set_objective(x, int(1));
    lp.add_constraint("a", row(&[(x, 1), (y, -1)]), Relation::Eq, int(0));
    lp.add_constraint("b", row(&[(x, 2), (y, -2)]), Relation::Eq, int(0));
    lp.add_constraint("c", row(&[(y, 1)]), Relation::Le, int(4));
    let o = solve_checked(&lp).into_optimum().unwrap();
    assert_eq!(o.objective, int(4));
}

#[test]
fn empty_program_is_optimal_at_zero() {
    let lp = LinearProgram::new(Sense::Maximize);
    let o = solve_checked(&lp).into_optimum().unwrap();
    assert_eq!(o.objective, int(0));
    assert!(o.values.is_empty());
}

#[test]
fn malformed_programs_are_rejected() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    lp.add_constraint("ghost", vec![(VarId(3), int(1))], Relation::Le, int(1));
    assert!(matches!(solve_lp(&lp), Err(Error::MalformedLp(_))));

    let mut lp = LinearProgram::new(Sense::Maximize);
    lp.variables.push(Variable {
        name: "bad".into(),
        lower: LowerBound::NegInfinity,
        upper: Some(int(1)),
    });
    lp.objective.push(int(0));
    assert!(matches!(solve_lp(&lp), Err(Error::MalformedLp(_))));
}

#[test]
fn verifier_rejects_tampered_certificates() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_var("x");
    lp.set_objective(x, int(1));
    lp.add_constraint("c", row(&[(x, 1)]), Relation::Le, int(1));
    let mut o = solve_lp(&lp).unwrap().into_optimum().unwrap();
    o.duals[0] = int(2);
    assert!(LpSolution::Optimal(o.clone()).verify(&lp).is_err());
    o.duals[0] = int(1);
    o.values[0] = ratio(1, 2);
    o.objective = ratio(1, 2);
    assert!(LpSolution::Optimal(o).verify(&lp).is_err());
    let bogus = FarkasCertificate { multipliers: vec![int(1)] };
    assert!(LpSolution::Infeasible(bogus).verify(&lp).is_err());
}

#[derive(Debug, Clone)]
struct RandomLp {
    maximize: bool,
    vars: Vec<(u8, i64)>,
    objective: Vec<i64>,
    rows: Vec<(Vec<i64>, u8, i64)>,
}

fn arb_lp() -> impl Strategy<Value = RandomLp> {
    (1usize..5, 0usize..5).prop_flat_map(|(n, m)| {
        (
            any::<bool>(),
            proptest::collection::vec((0u8..3, 0i64..4), n),
            proptest::collection::vec(-3i64..4, n),
            proptest::collection::vec(
                (proptest::collection::vec(-3i64..4, n), 0u8..3, -4i64..6),
                m,
            ),
        )
            .prop_map(|(maximize, vars, objective, rows)| RandomLp {
                maximize,
                vars,
                objective,
                rows,
            })
    })
}

fn build(case: &RandomLp) -> LinearProgram {
    let mut lp = LinearProgram::new(if case.maximize { Sense::Maximize } else { Sense::Minimize });
    let ids: Vec<VarId> = case
        .vars
        .iter()
        .enumerate()
        .map(|(k, &(kind, ub))| match kind {
            0 => lp.add_var(format!("x{k}")),
            1 => lp.add_bounded_var(format!("x{k}"), int(ub)),
            _ => lp.add_free_var(format!("x{k}")),
        })
        .collect();
    for (v, &c) in ids.iter().zip(&case.objective) {
        lp.set_objective(*v, int(c));
    }
    for (k, (coeffs, rel, rhs)) in case.rows.iter().enumerate() {
        let rel = [Relation::Le, Relation::Eq, Relation::Ge][*rel as usize];
        let coeffs = ids.iter().copied().zip(coeffs.iter().map(|&a| int(a))).collect();
        lp.add_constraint(format!("r{k}"), coeffs, rel, int(*rhs));
    }
    lp
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn every_outcome_carries_a_valid_certificate(case in arb_lp()) {
        let lp = build(&case);
        let bland = solve_lp_with(&lp, PivotRule::Bland).unwrap();
        prop_assert!(bland.verify(&lp).is_ok(), "{:?}", bland.verify(&lp));
        let dantzig = solve_lp_with(&lp, PivotRule::DantzigBland).unwrap();
        prop_assert!(dantzig.verify(&lp).is_ok(), "{:?}", dantzig.verify(&lp));
        prop_assert_eq!(bland.status(), dantzig.status());
        if let (Some(a), Some(b)) = (bland.optimum(), dantzig.optimum()) {
            prop_assert_eq!(&a.objective, &b.objective);
        }
    }
}
