use alloc::string::String;
use core::fmt;

use crate::value::Value;

/// Failures raised by the engine. Every variant carries enough of the
/// offending data to reproduce the problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    DuplicateIndex(String),
    NoIndices,
    UnknownIndex(usize),
    /// A family or morphism has the wrong number of components.
    ArityMismatch {
        expected: usize,
        found: usize,
    },
    ShapeNotInDomain(Value),
    /// A payload is undefined at a valid position.
    MissingPosition {
        index: usize,
        position: Value,
    },
    /// A payload returned a value outside the assigned domain.
    IllTypedPayload {
        index: usize,
        position: Value,
        value: Value,
    },
    /// A domain that has to be listed exhaustively is infinite or too large.
    NotEnumerable(String),
    /// A least fixed point was requested over a signature with infinitely
    /// many recursive positions at some shape.
    InfiniteRecursion(Value),
    /// Children of a W-node or machine state do not match the recursive
    /// positions of its shape.
    ChildrenMismatch {
        shape: Value,
    },
    NotATree(Value),
    NotASeed(Value),
    NotAPath(Value),
    DuplicateState {
        machine: String,
        state: String,
    },
    UnknownState {
        machine: String,
        state: String,
    },
    DuplicateMachine(String),
    UnknownMachine(String),
    /// The reachable part of a coalgebra exceeded the state cap.
    NonRegular {
        cap: usize,
    },
    /// A coalgebra component returned an ill-typed value at `at`.
    IllTypedCoalgebra {
        at: Value,
        detail: String,
    },
    /// A retraction lift did not commute with the child map.
    RetractionFailure {
        point: Value,
        position: Value,
    },
    /// A path left the tree at the given step (`steps.len()` for the final
    /// position).
    InvalidPath {
        step: usize,
    },
    UnboundName(String),
    /// A term does not follow the structure of a functor expression.
    TermMismatch {
        term: Value,
        expected: String,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DuplicateIndex(name) => write!(f, "duplicate index `{name}`"),
            Error::NoIndices => f.write_str("container has no indices to split off"),
            Error::UnknownIndex(i) => write!(f, "index {i} out of range"),
            Error::ArityMismatch { expected, found } => {
                write!(f, "expected {expected} components, found {found}")
            }
            Error::ShapeNotInDomain(s) => write!(f, "shape {s} is not in the shape domain"),
            Error::MissingPosition { index, position } => {
                write!(f, "payload undefined at ({index}, {position})")
            }
            Error::IllTypedPayload { index, position, value } => {
                write!(f, "payload value {value} at ({index}, {position}) is outside the assigned domain")
            }
            Error::NotEnumerable(what) => write!(f, "cannot enumerate {what} exhaustively"),
            Error::InfiniteRecursion(s) => {
                write!(f, "shape {s} has infinitely many recursive positions")
            }
            Error::ChildrenMismatch { shape } => {
                write!(f, "children do not match the recursive positions of {shape}")
            }
            Error::NotATree(v) => write!(f, "{v} is not a W-tree"),
            Error::NotASeed(v) => write!(f, "{v} is not a machine seed"),
            Error::NotAPath(v) => write!(f, "{v} is not a position path"),
            Error::DuplicateState { machine, state } => {
                write!(f, "machine `{machine}` declares state `{state}` twice")
            }
            Error::UnknownState { machine, state } => {
                write!(f, "machine `{machine}` has no state `{state}`")
            }
            Error::DuplicateMachine(name) => write!(f, "machine `{name}` is already registered"),
            Error::UnknownMachine(name) => write!(f, "unknown machine `{name}`"),
            Error::NonRegular { cap } => {
                write!(f, "reachable states exceed the cap of {cap}; element is not regular within budget")
            }
            Error::IllTypedCoalgebra { at, detail } => write!(f, "coalgebra at {at}: {detail}"),
            Error::RetractionFailure { point, position } => {
                write!(f, "retraction lift does not commute at ({point}, {position})")
            }
            Error::InvalidPath { step } => write!(f, "path invalid at step {step}"),
            Error::UnboundName(n) => write!(f, "unbound name `{n}`"),
            Error::TermMismatch { term, expected } => write!(f, "`{term}` is not a term of `{expected}`"),
        }
    }
}

impl core::error::Error for Error {}
