//! JSON interchange for instances and standalone measures.
//!
//! ```json
//! {
//!   "participants": ["1", "2"],
//!   "goods": ["a", "b"],
//!   "cost": {"a": "1", "b": 2},
//!   "supply": [{"participant": "1", "good": "a", "amount": "1/2"}],
//!   "demand": [{"participant": "2", "good": "a", "amount": "1/2"}]
//! }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ids::{Cell, Good, Participant};
use super::instance::ExchangeInstance;
use super::measure::Measure;
use crate::rational::{serde_text, Rational};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellAmount {
    pub participant: Participant,
    pub good: Good,
    #[serde(with = "serde_text")]
    pub amount: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParticipantAmount {
    pub participant: Participant,
    #[serde(with = "serde_text")]
    pub amount: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GoodAmount {
    pub good: Good,
    #[serde(with = "serde_text")]
    pub amount: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
struct TextRational(#[serde(with = "serde_text")] Rational);

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    participants: Vec<Participant>,
    goods: Vec<Good>,
    cost: BTreeMap<Good, TextRational>,
    #[serde(default)]
    supply: Vec<CellAmount>,
    #[serde(default)]
    demand: Vec<CellAmount>,
}

pub fn cells_to_json(m: &Measure<Cell>) -> Vec<CellAmount> {
    m.iter()
        .map(|((p, g), v)| CellAmount {
            participant: p.clone(),
            good: g.clone(),
            amount: v.clone(),
        })
        .collect()
}

pub fn cells_from_json(entries: &[CellAmount]) -> Measure<Cell> {
    entries
        .iter()
        .map(|e| ((e.participant.clone(), e.good.clone()), e.amount.clone()))
        .collect()
}

pub fn participants_to_json(m: &Measure<Participant>) -> Vec<ParticipantAmount> {
    m.iter()
        .map(|(p, v)| ParticipantAmount {
            participant: p.clone(),
            amount: v.clone(),
        })
        .collect()
}

pub fn participants_from_json(entries: &[ParticipantAmount]) -> Measure<Participant> {
    entries
        .iter()
        .map(|e| (e.participant.clone(), e.amount.clone()))
        .collect()
}

pub fn goods_to_json(m: &Measure<Good>) -> Vec<GoodAmount> {
    m.iter()
        .map(|(g, v)| GoodAmount {
            good: g.clone(),
            amount: v.clone(),
        })
        .collect()
}

pub fn goods_from_json(entries: &[GoodAmount]) -> Measure<Good> {
    entries.iter().map(|e| (e.good.clone(), e.amount.clone())).collect()
}

impl ExchangeInstance {
    /// Parses the JSON instance format. Structural problems are parse errors;
    /// semantic ones (negative amounts, unknown keys) are left for
    /// [`ExchangeInstance::violations`].
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let file: InstanceFile = serde_json::from_str(text)?;
        Ok(Self {
            participants: file.participants.into_iter().collect(),
            goods: file.goods.into_iter().collect(),
            cost: file.cost.into_iter().map(|(g, c)| (g, c.0)).collect(),
            supply: cells_from_json(&file.supply),
            demand: cells_from_json(&file.demand),
        })
    }

    /// Canonical JSON: sorted keys and atoms, rationals in lowest terms.
    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            participants: self.participants.iter().cloned().collect(),
            goods: self.goods.iter().cloned().collect(),
            cost: self
                .cost
                .iter()
                .map(|(g, c)| (g.clone(), TextRational(c.clone())))
                .collect(),
            supply: cells_to_json(&self.supply),
            demand: cells_to_json(&self.demand),
        };
        serde_json::to_string_pretty(&file).expect("instance serialization is infallible")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ids::cell;
    use crate::model::instance::{Side, Violation};
    use crate::rational::{int, ratio};

    const SWAP: &str = r#"{
        "participants": ["1", "2"],
        "goods": ["a", "b"],
        "cost": {"a": 1, "b": "1"},
        "supply": [{"participant": "1", "good": "a", "amount": "1"},
                   {"participant": "2", "good": "b", "amount": 1}],
        "demand": [{"participant": "1", "good": "b", "amount": "2/2"},
                   {"participant": "2", "good": "a", "amount": "1"}]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let inst = ExchangeInstance::from_json(SWAP).unwrap();
        assert!(inst.violations().is_empty());
        assert_eq!(inst.demand.value(&cell("1", "b")), int(1));
        let again = ExchangeInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn negative_amounts_survive_parsing_for_validation() {
        let text = SWAP.replace(r#""amount": "2/2""#, r#""amount": "-1""#);
        let inst = ExchangeInstance::from_json(&text).unwrap();
        assert_eq!(
            inst.violations(),
            vec![Violation::NegativeAmount {
                side: Side::Demand,
                cell: cell("1", "b"),
                amount: int(-1)
            }]
        );
    }

    #[test]
    fn rejects_floats_and_unknown_fields() {
        assert!(ExchangeInstance::from_json(&SWAP.replace("\"2/2\"", "0.5")).is_err());
        assert!(ExchangeInstance::from_json(&SWAP.replace("\"goods\"", "\"items\"")).is_err());
        assert_eq!(
            ExchangeInstance::from_json(&SWAP.replace("\"2/2\"", "\"3/6\""))
                .unwrap()
                .demand
                .value(&cell("1", "b")),
            ratio(1, 2)
        );
    }
}
