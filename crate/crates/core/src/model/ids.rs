use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! opaque_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(id: &str) -> Self {
                Self(id.to_string())
            }
        }

        impl From<String> for $name {
            fn from(id: String) -> Self {
                Self(id)
            }
        }
    };
}

opaque_id!(
    /// A trading participant. The same identifier names the participant as a
    /// sender and as a receiver.
    Participant
);
opaque_id!(
    /// A good that can be exchanged.
    Good
);

/// A (participant, good) pair; the index set of supply, demand and the reduced pair.
pub type Cell = (Participant, Good);

/// A (sender, receiver, good) triple; the index set of an exchange plan.
pub type Flow = (Participant, Participant, Good);

pub fn cell(participant: &str, good: &str) -> Cell {
    (Participant::from(participant), Good::from(good))
}

pub fn flow(sender: &str, receiver: &str, good: &str) -> Flow {
    (
        Participant::from(sender),
        Participant::from(receiver),
        Good::from(good),
    )
}
