//! Seeded random instances for property tests and the acceptance corpus.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_traits::{Signed, Zero};

use crate::model::{participant_marginal, good_marginal, Cell, ExchangeInstance, Good, Measure, Participant};
use crate::rational::{ratio, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Independent random supply and demand; supports may overlap.
    Generic,
    /// `Pr_X π̃⁺ = Pr_X π̃⁻` and `Pr_S π̃⁺ = Pr_S π̃⁻` after cost normalization.
    EqualMarginals,
    /// No cell carries both supply and demand.
    DisjointSupport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeParams {
    pub participants: usize,
    pub goods: usize,
}

impl SizeParams {
    pub fn new(participants: usize, goods: usize) -> Self {
        assert!(participants > 0 && goods > 0, "sizes must be positive");
        Self { participants, goods }
    }
}

fn participant_name(k: usize) -> String {
    (k + 1).to_string()
}

fn good_name(k: usize) -> String {
    match u8::try_from(k) {
        Ok(b) if b < 26 => char::from(b'a' + b).to_string(),
        _ => format!("g{k}"),
    }
}

fn amount(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(1..=6), rng.gen_range(1..=4))
}

fn cells(sizes: SizeParams) -> Vec<Cell> {
    let mut out = Vec::with_capacity(sizes.participants * sizes.goods);
    for i in 0..sizes.participants {
        for s in 0..sizes.goods {
            out.push((Participant::new(participant_name(i)), Good::new(good_name(s))));
        }
    }
    out
}

/// Couples `mu` and `nu` (equal totals) by the northwest-corner rule after
/// shuffling both orders.
fn random_coupling(rng: &mut ChaCha8Rng, mu: &Measure<Participant>, nu: &Measure<Good>) -> Measure<Cell> {
    let mut rows: Vec<(Participant, Rational)> = mu.iter().map(|(k, w)| (k.clone(), w.clone())).collect();
    let mut cols: Vec<(Good, Rational)> = nu.iter().map(|(k, w)| (k.clone(), w.clone())).collect();
    rows.shuffle(rng);
    cols.shuffle(rng);
    let mut out = Measure::new();
    let (mut r, mut c) = (0, 0);
    while r < rows.len() && c < cols.len() {
        let w = std::cmp::min(rows[r].1.clone(), cols[c].1.clone());
        out.add_at((rows[r].0.clone(), cols[c].0.clone()), &w);
        rows[r].1 -= &w;
        cols[c].1 -= &w;
        if rows[r].1.is_zero() {
            r += 1;
        }
        if cols[c].1.is_zero() {
            c += 1;
        }
    }
    out
}

/// A valid instance, deterministic in `seed`.
pub fn random_instance(seed: u64, sizes: SizeParams, mode: Mode) -> ExchangeInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts: Vec<String> = (0..sizes.participants).map(participant_name).collect();
    let goods: Vec<String> = (0..sizes.goods).map(good_name).collect();
    let mut inst = ExchangeInstance::empty(parts.iter().map(String::as_str), goods.iter().map(String::as_str));
    for g in &goods {
        inst = inst.with_cost(g, ratio(rng.gen_range(1..=4), rng.gen_range(1..=3)));
    }
    let keys = cells(sizes);
    match mode {
        Mode::Generic => {
            for key in &keys {
                if rng.gen_bool(0.5) {
                    inst.supply.set(key.clone(), amount(&mut rng));
                }
                if rng.gen_bool(0.5) {
                    inst.demand.set(key.clone(), amount(&mut rng));
                }
            }
        }
        Mode::DisjointSupport => {
            for key in &keys {
                match rng.gen_range(0..5) {
                    0 | 1 => inst.supply.set(key.clone(), amount(&mut rng)),
                    2 | 3 => inst.demand.set(key.clone(), amount(&mut rng)),
                    _ => {}
                }
            }
        }
        Mode::EqualMarginals => {
            let mut normalized = Measure::new();
            for key in &keys {
                if rng.gen_bool(0.6) {
                    normalized.set(key.clone(), amount(&mut rng));
                }
            }
            let demand = random_coupling(&mut rng, &participant_marginal(&normalized), &good_marginal(&normalized));
            let unscale = |m: &Measure<Cell>| m.scale_by(|(_, s)| inst.cost_of(s).recip());
            let (supply, demand) = (unscale(&normalized), unscale(&demand));
            inst.supply = supply;
            inst.demand = demand;
        }
    }
    inst
}

/// Input to the marginal feasibility checks: `μ` on participants, `ν` on
/// goods with equal totals, and a cap `π` on participant × good.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalTriple {
    pub mu: Measure<Participant>,
    pub nu: Measure<Good>,
    pub pi: Measure<Cell>,
}

/// Starts from a feasible triple and, half of the time, perturbs it by
/// lowering one cap or moving marginal mass, so both verdicts occur.
pub fn random_marginal_triple(seed: u64, sizes: SizeParams) -> MarginalTriple {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keys = cells(sizes);
    let mut sigma = Measure::new();
    let mut pi = Measure::new();
    for key in &keys {
        if rng.gen_bool(0.6) {
            let w = amount(&mut rng);
            sigma.set(key.clone(), w.clone());
            pi.set(key.clone(), w);
        }
        if rng.gen_bool(0.4) {
            pi.add_at(key.clone(), &amount(&mut rng));
        }
    }
    let mut mu = participant_marginal(&sigma);
    let nu = good_marginal(&sigma);
    match rng.gen_range(0..4) {
        0 => {
            let atoms: Vec<Cell> = pi.atoms().cloned().collect();
            if let Some(key) = atoms.choose(&mut rng) {
                let lowered = pi.value(key) * ratio(rng.gen_range(0..=3), 4);
                pi.set(key.clone(), lowered);
            }
        }
        1 => {
            let from: Vec<Participant> = mu.atoms().cloned().collect();
            if let Some(src) = from.choose(&mut rng) {
                let dst = Participant::new(participant_name(rng.gen_range(0..sizes.participants)));
                let moved = mu.value(src) * ratio(rng.gen_range(1..=4), 4);
                mu.add_at(src.clone(), &-moved.clone());
                mu.add_at(dst, &moved);
            }
        }
        _ => {}
    }
    debug_assert!(mu.iter().all(|(_, w)| !w.is_negative()));
    MarginalTriple { mu, nu, pi }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        for mode in [Mode::Generic, Mode::EqualMarginals, Mode::DisjointSupport] {
            let sizes = SizeParams::new(4, 3);
            assert_eq!(random_instance(7, sizes, mode), random_instance(7, sizes, mode));
        }
        assert_eq!(
            random_marginal_triple(3, SizeParams::new(3, 3)),
            random_marginal_triple(3, SizeParams::new(3, 3))
        );
    }

    #[test]
    fn modes_honour_their_contracts() {
        for seed in 0..50 {
            let sizes = SizeParams::new(1 + seed as usize % 6, 1 + seed as usize % 5);
            for mode in [Mode::Generic, Mode::EqualMarginals, Mode::DisjointSupport] {
                assert!(random_instance(seed, sizes, mode).validate().is_ok());
            }
            let disjoint = random_instance(seed, sizes, Mode::DisjointSupport);
            assert!(disjoint.overlapping_cells().is_empty());
            let equal = random_instance(seed, sizes, Mode::EqualMarginals);
            let (norm, _) = crate::model::normalize_cost(&equal).unwrap();
            assert_eq!(participant_marginal(&norm.supply), participant_marginal(&norm.demand));
            assert_eq!(good_marginal(&norm.supply), good_marginal(&norm.demand));
            let t = random_marginal_triple(seed, sizes);
            assert_eq!(t.mu.total(), t.nu.total());
            assert!(t.pi.is_nonnegative());
        }
    }

    #[test]
    fn names_are_distinct() {
        let names: std::collections::BTreeSet<String> = (0..40).map(good_name).collect();
        assert_eq!(names.len(), 40);
    }
}
