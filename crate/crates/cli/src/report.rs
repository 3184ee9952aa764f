//! The machine-readable solve report and its self-contained verification.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use fairex::dual::{potential_objective, DualCertificate, PotentialPair};
use fairex::feasibility::exchange_bound;
use fairex::model::io::{
    cells_from_json, cells_to_json, goods_from_json, goods_to_json, participants_from_json, participants_to_json,
    CellAmount, GoodAmount, ParticipantAmount,
};
use fairex::model::{normalize_cost, ExchangePlan, PairPlan, PlanViolation, SelfLoops};
use fairex::primal::PrimalResult;
use fairex::rational::serde_text;
use fairex::{ExchangeInstance, Participant, Rational};

/// `sha256:` followed by the hex digest of the canonical instance JSON.
pub fn instance_digest(inst: &ExchangeInstance) -> String {
    let digest = Sha256::digest(inst.to_json().as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowAmount {
    pub sender: Participant,
    pub receiver: Participant,
    pub good: fairex::Good,
    #[serde(with = "serde_text")]
    pub amount: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairReport {
    pub sigma_plus: Vec<CellAmount>,
    pub sigma_minus: Vec<CellAmount>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualReport {
    #[serde(with = "serde_text")]
    pub value: Rational,
    pub f: Vec<CellAmount>,
    pub g: Vec<CellAmount>,
    pub h: Vec<ParticipantAmount>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialReport {
    #[serde(with = "serde_text")]
    pub value: Rational,
    pub u: Vec<ParticipantAmount>,
    pub v: Vec<GoodAmount>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificates {
    pub dual: DualReport,
    /// Absent when self-exchange is forbidden.
    pub potential: Option<PotentialReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub balance_ok: bool,
    pub caps_ok: bool,
    pub duality_gap_zero: bool,
    pub bound_respected: bool,
    pub potential_matches: Option<bool>,
}

impl Verification {
    pub fn all_ok(&self) -> bool {
        self.balance_ok && self.caps_ok && self.duality_gap_zero && self.bound_respected && self.potential_matches != Some(false)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveReport {
    pub instance_digest: String,
    pub instance: serde_json::Value,
    pub method: String,
    pub forbid_self_loops: bool,
    #[serde(with = "serde_text")]
    pub value: Rational,
    pub plan: Vec<FlowAmount>,
    pub pair: PairReport,
    pub certificates: Certificates,
    pub verification: Verification,
}

fn plan_to_json(plan: &ExchangePlan) -> Vec<FlowAmount> {
    plan.flows
        .iter()
        .map(|((i, j, s), w)| FlowAmount {
            sender: i.clone(),
            receiver: j.clone(),
            good: s.clone(),
            amount: w.clone(),
        })
        .collect()
}

fn plan_from_json(entries: &[FlowAmount]) -> ExchangePlan {
    ExchangePlan::new(
        entries
            .iter()
            .map(|e| ((e.sender.clone(), e.receiver.clone(), e.good.clone()), e.amount.clone()))
            .collect(),
    )
}

fn self_loops(forbid: bool) -> SelfLoops {
    if forbid {
        SelfLoops::Forbidden
    } else {
        SelfLoops::Allowed
    }
}

impl SolveReport {
    pub fn new(
        inst: &ExchangeInstance,
        result: &PrimalResult,
        forbid_self_loops: bool,
        dual: (Rational, DualCertificate),
        potential: Option<(Rational, PotentialPair)>,
    ) -> Result<Self, serde_json::Error> {
        let mut report = Self {
            instance_digest: instance_digest(inst),
            instance: serde_json::from_str(&inst.to_json())?,
            method: result.method.to_string(),
            forbid_self_loops,
            value: result.value.clone(),
            plan: plan_to_json(&result.plan),
            pair: PairReport {
                sigma_plus: cells_to_json(&result.pair.sigma_plus),
                sigma_minus: cells_to_json(&result.pair.sigma_minus),
            },
            certificates: Certificates {
                dual: DualReport {
                    value: dual.0,
                    f: cells_to_json(&dual.1.f),
                    g: cells_to_json(&dual.1.g),
                    h: participants_to_json(&dual.1.h),
                },
                potential: potential.map(|(value, pair)| PotentialReport {
                    value,
                    u: participants_to_json(&pair.u),
                    v: goods_to_json(&pair.v),
                }),
            },
            verification: Verification {
                balance_ok: false,
                caps_ok: false,
                duality_gap_zero: false,
                bound_respected: false,
                potential_matches: None,
            },
        };
        report.verification = report.recompute()?;
        Ok(report)
    }

    pub fn embedded_instance(&self) -> Result<ExchangeInstance, serde_json::Error> {
        ExchangeInstance::from_json(&self.instance.to_string())
    }

    /// Derives every flag from the report's own fields.
    pub fn recompute(&self) -> Result<Verification, serde_json::Error> {
        let inst = self.embedded_instance()?;
        let valid = inst.validate().is_ok() && instance_digest(&inst) == self.instance_digest;
        let plan = plan_from_json(&self.plan);
        let loops = self_loops(self.forbid_self_loops);
        let violations = if valid { inst.plan_violations(&plan, loops) } else { Vec::new() };
        let balance_ok = valid && !violations.iter().any(|v| matches!(v, PlanViolation::Unbalanced { .. }));
        let caps_ok = valid && violations.iter().all(|v| matches!(v, PlanViolation::Unbalanced { .. }));

        let worth = inst.objective(&plan);
        let pair = PairPlan::new(cells_from_json(&self.pair.sigma_plus), cells_from_json(&self.pair.sigma_minus));
        let consistent = valid && worth == self.value && plan.pair() == pair;

        let d = &self.certificates.dual;
        let cert = DualCertificate {
            f: cells_from_json(&d.f),
            g: cells_from_json(&d.g),
            h: participants_from_json(&d.h),
        };
        let duality_gap_zero = consistent
            && cert.violations(&inst, loops).is_empty()
            && cert.objective(&inst) == d.value
            && d.value == worth;

        let bound_respected = valid && exchange_bound(&inst).map(|b| worth <= b).unwrap_or(false);

        let potential_matches = self.certificates.potential.as_ref().map(|p| {
            let pair = PotentialPair {
                u: participants_from_json(&p.u),
                v: goods_from_json(&p.v),
            };
            valid
                && normalize_cost(&inst)
                    .map(|(n, _)| potential_objective(&n, &pair) == p.value && p.value == worth)
                    .unwrap_or(false)
        });

        Ok(Verification {
            balance_ok,
            caps_ok,
            duality_gap_zero,
            bound_respected,
            potential_matches,
        })
    }
}

