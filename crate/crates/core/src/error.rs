use thiserror::Error;

use crate::model::{Cell, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {}", join(.0))]
    Invalid(Vec<Violation>),

    #[error("instance must have unit costs; normalize it first")]
    NotNormalized,

    #[error("supply and demand overlap at {}", join_cells(.0))]
    OverlappingSupports(Vec<Cell>),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Capacity(String),

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    /// A result that should be impossible if the solver is correct.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

fn join_cells(cells: &[Cell]) -> String {
    cells
        .iter()
        .map(|(p, g)| format!("({p}, {g})"))
        .collect::<Vec<_>>()
        .join(", ")
}
