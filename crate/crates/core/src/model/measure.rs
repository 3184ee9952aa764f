//! Sparse atomic measures with exact rational weights.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// A finitely supported signed measure: a sparse map from atoms to rationals.
///
/// Zero weights are never stored, so two measures are equal exactly when
/// their sets of nonzero atoms and weights coincide. Measures that model
/// supply, demand or plans are expected to be nonnegative; the type itself
/// also holds signed differences such as `σ⁺ − σ⁻`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measure<K: Ord> {
    atoms: BTreeMap<K, Rational>,
}

impl<K: Ord> Default for Measure<K> {
    fn default() -> Self {
        Self {
            atoms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Measure<K> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a measure from `(atom, weight)` pairs; repeated atoms accumulate.
    pub fn from_atoms<I: IntoIterator<Item = (K, Rational)>>(atoms: I) -> Self {
        let mut m = Self::new();
        for (k, v) in atoms {
            m.add_at(k, &v);
        }
        m
    }

    pub fn dirac(atom: K, weight: Rational) -> Self {
        Self::from_atoms([(atom, weight)])
    }

    /// Overwrites the weight at `atom`.
    pub fn set(&mut self, atom: K, weight: Rational) {
        if weight.is_zero() {
            self.atoms.remove(&atom);
        } else {
            self.atoms.insert(atom, weight);
        }
    }

    pub fn add_at(&mut self, atom: K, weight: &Rational) {
        if weight.is_zero() {
            return;
        }
        match self.atoms.entry(atom) {
            Entry::Vacant(slot) => {
                slot.insert(weight.clone());
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += weight;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn get(&self, atom: &K) -> Option<&Rational> {
        self.atoms.get(atom)
    }

    /// Weight at `atom`, zero when absent.
    pub fn value(&self, atom: &K) -> Rational {
        self.atoms.get(atom).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn contains(&self, atom: &K) -> bool {
        self.atoms.contains_key(atom)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.atoms.iter()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &K> {
        self.atoms.keys()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.atoms.values().fold(Rational::zero(), |acc, v| acc + v)
    }

    /// Total weight over the atoms selected by `pred`.
    pub fn mass_where<F: Fn(&K) -> bool>(&self, pred: F) -> Rational {
        self.atoms
            .iter()
            .filter(|(k, _)| pred(k))
            .fold(Rational::zero(), |acc, (_, v)| acc + v)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.atoms.values().all(|v| v.is_positive())
    }

    pub fn negative_atoms(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.atoms.iter().filter(|(_, v)| v.is_negative())
    }

    /// Atomwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.atoms.iter().all(|(k, v)| *v <= other.value(k))
            && other.negative_atoms().all(|(k, _)| self.contains(k))
    }

    /// Atoms where `self` exceeds `other`, with both weights.
    pub fn excess_over<'a>(&'a self, other: &'a Self) -> Vec<(&'a K, Rational, Rational)> {
        let mut out: Vec<(&K, Rational, Rational)> = self
            .atoms
            .iter()
            .filter_map(|(k, v)| {
                let w = other.value(k);
                (*v > w).then(|| (k, v.clone(), w))
            })
            .collect();
        for (k, w) in other.negative_atoms() {
            if !self.contains(k) {
                out.push((k, Rational::zero(), w.clone()));
            }
        }
        out
    }

    /// Lattice meet `μ ∧ ν = μ − (μ − ν)₊`; for atomic measures the atomwise minimum.
    pub fn meet(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (k, v) in &self.atoms {
            let w = other.value(k);
            out.set(k.clone(), if *v <= w { v.clone() } else { w });
        }
        for (k, w) in &other.atoms {
            if !self.atoms.contains_key(k) && w.is_negative() {
                out.set(k.clone(), w.clone());
            }
        }
        out
    }

    /// Hahn positive part `(μ)₊`.
    pub fn positive_part(&self) -> Self {
        self.restrict_values(|v| v.is_positive())
    }

    fn restrict_values<F: Fn(&Rational) -> bool>(&self, pred: F) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .filter(|(_, v)| pred(v))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::from_atoms(self.atoms.iter().map(|(k, v)| (k.clone(), v * factor)))
    }

    /// Rescales each atom by an atom-dependent factor.
    pub fn scale_by<F: Fn(&K) -> Rational>(&self, factor: F) -> Self {
        Self::from_atoms(self.atoms.iter().map(|(k, v)| (k.clone(), v * factor(k))))
    }

    /// Push-forward along `f`: weights of atoms with equal images are summed.
    pub fn push_forward<J: Ord + Clone, F: Fn(&K) -> J>(&self, f: F) -> Measure<J> {
        Measure::from_atoms(self.atoms.iter().map(|(k, v)| (f(k), v.clone())))
    }

    pub fn restrict<F: Fn(&K) -> bool>(&self, pred: F) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .filter(|(k, _)| pred(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

impl<K: Ord + Clone> Add for &Measure<K> {
    type Output = Measure<K>;

    fn add(self, rhs: &Measure<K>) -> Measure<K> {
        let mut out = self.clone();
        for (k, v) in &rhs.atoms {
            out.add_at(k.clone(), v);
        }
        out
    }
}

impl<K: Ord + Clone> Sub for &Measure<K> {
    type Output = Measure<K>;

    fn sub(self, rhs: &Measure<K>) -> Measure<K> {
        self + &(-rhs)
    }
}

impl<K: Ord + Clone> Neg for &Measure<K> {
    type Output = Measure<K>;

    fn neg(self) -> Measure<K> {
        Measure {
            atoms: self.atoms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }
}

impl<K: Ord + Clone> FromIterator<(K, Rational)> for Measure<K> {
    fn from_iter<I: IntoIterator<Item = (K, Rational)>>(iter: I) -> Self {
        Self::from_atoms(iter)
    }
}
