use std::fmt;

use super::ids::{Cell, Flow, Good, Participant};
use super::measure::Measure;
use crate::error::{Error, Result};

/// An exchange plan `γ`: amount of good `s` that participant `i` sends to `j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExchangePlan {
    pub flows: Measure<Flow>,
}

impl ExchangePlan {
    pub fn new(flows: Measure<Flow>) -> Self {
        Self { flows }
    }

    /// `Pr_{X×S}(γ)`.
    pub fn sender_good(&self) -> Measure<Cell> {
        self.flows.push_forward(|(i, _, g)| (i.clone(), g.clone()))
    }

    /// `Pr_{Y×S}(γ)`.
    pub fn receiver_good(&self) -> Measure<Cell> {
        self.flows.push_forward(|(_, j, g)| (j.clone(), g.clone()))
    }

    /// Both two-index projections, as a reduced pair.
    pub fn pair(&self) -> PairPlan {
        PairPlan {
            sigma_plus: self.sender_good(),
            sigma_minus: self.receiver_good(),
        }
    }
}

/// The reduced pair `(σ⁺, σ⁻)` of measures on participant × good.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairPlan {
    pub sigma_plus: Measure<Cell>,
    pub sigma_minus: Measure<Cell>,
}

impl PairPlan {
    pub fn new(sigma_plus: Measure<Cell>, sigma_minus: Measure<Cell>) -> Self {
        Self {
            sigma_plus,
            sigma_minus,
        }
    }
}

/// A coordinate of a plan or of a participant × good measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Sender,
    Receiver,
    /// The participant coordinate of a participant × good measure.
    Participant,
    Good,
}

/// Which space a [`MarginalMeasure`] lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Participant,
    Good,
    ParticipantGood,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Participant => "participant",
            Domain::Good => "good",
            Domain::ParticipantGood => "participant×good",
        })
    }
}

/// A measure tagged with its domain; the result of a projection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MarginalMeasure {
    Participant(Measure<Participant>),
    Good(Measure<Good>),
    ParticipantGood(Measure<Cell>),
}

impl MarginalMeasure {
    pub fn domain(&self) -> Domain {
        match self {
            MarginalMeasure::Participant(_) => Domain::Participant,
            MarginalMeasure::Good(_) => Domain::Good,
            MarginalMeasure::ParticipantGood(_) => Domain::ParticipantGood,
        }
    }

    pub fn total(&self) -> crate::rational::Rational {
        match self {
            MarginalMeasure::Participant(m) => m.total(),
            MarginalMeasure::Good(m) => m.total(),
            MarginalMeasure::ParticipantGood(m) => m.total(),
        }
    }
}

/// Something with named coordinates that can be summed down to a marginal.
pub trait Project {
    fn project(&self, axes: &[Axis]) -> Result<MarginalMeasure>;
}

impl Project for ExchangePlan {
    fn project(&self, axes: &[Axis]) -> Result<MarginalMeasure> {
        use Axis::*;
        let f = &self.flows;
        Ok(match axes {
            [Sender] => MarginalMeasure::Participant(f.push_forward(|(i, _, _)| i.clone())),
            [Receiver] => MarginalMeasure::Participant(f.push_forward(|(_, j, _)| j.clone())),
            [Good] => MarginalMeasure::Good(f.push_forward(|(_, _, g)| g.clone())),
            [Sender, Good] => MarginalMeasure::ParticipantGood(self.sender_good()),
            [Receiver, Good] => MarginalMeasure::ParticipantGood(self.receiver_good()),
            other => {
                return Err(Error::Usage(format!(
                    "cannot project an exchange plan onto {other:?}; use one of Sender, Receiver, Good, Sender×Good, Receiver×Good"
                )))
            }
        })
    }
}

impl Project for Measure<Cell> {
    fn project(&self, axes: &[Axis]) -> Result<MarginalMeasure> {
        Ok(match axes {
            [Axis::Participant] => MarginalMeasure::Participant(self.push_forward(|(p, _)| p.clone())),
            [Axis::Good] => MarginalMeasure::Good(self.push_forward(|(_, g)| g.clone())),
            [Axis::Participant, Axis::Good] => MarginalMeasure::ParticipantGood(self.clone()),
            other => {
                return Err(Error::Usage(format!(
                    "cannot project a participant×good measure onto {other:?}"
                )))
            }
        })
    }
}

/// `Pr_X` of a participant × good measure.
pub fn participant_marginal(m: &Measure<Cell>) -> Measure<Participant> {
    m.push_forward(|(p, _)| p.clone())
}

/// `Pr_S` of a participant × good measure.
pub fn good_marginal(m: &Measure<Cell>) -> Measure<Good> {
    m.push_forward(|(_, g)| g.clone())
}

/// Atomwise minimum of two measures on the same domain.
pub fn measure_meet(a: &MarginalMeasure, b: &MarginalMeasure) -> Result<MarginalMeasure> {
    use MarginalMeasure::*;
    Ok(match (a, b) {
        (Participant(x), Participant(y)) => Participant(x.meet(y)),
        (Good(x), Good(y)) => Good(x.meet(y)),
        (ParticipantGood(x), ParticipantGood(y)) => ParticipantGood(x.meet(y)),
        _ => {
            return Err(Error::Usage(format!(
                "cannot meet a measure on {} with one on {}",
                a.domain(),
                b.domain()
            )))
        }
    })
}
