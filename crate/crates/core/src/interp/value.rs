use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rewrite::ReduceError;

/// Finite domains standing in for the unbounded data quantifiers of
/// behavioral equivalence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainBounds {
    /// Inclusive range for `Int` (and, clipped at zero, `Nat`) arguments.
    pub int_range: (i64, i64),
    /// Inclusive range for identifier-sort arguments.
    pub id_range: (i64, i64),
    pub max_rewrite_steps: u64,
}

impl Default for DomainBounds {
    fn default() -> Self {
        DomainBounds {
            int_range: (-3, 3),
            id_range: (0, 2),
            max_rewrite_steps: 10_000,
        }
    }
}

impl DomainBounds {
    pub fn validate(&self) -> Result<(), InterpError> {
        if self.int_range.0 > self.int_range.1 {
            return Err(InterpError::InvalidBounds(format!(
                "int range {:?} is empty",
                self.int_range
            )));
        }
        if self.id_range.0 > self.id_range.1 {
            return Err(InterpError::InvalidBounds(format!(
                "id range {:?} is empty",
                self.id_range
            )));
        }
        if self.max_rewrite_steps == 0 {
            return Err(InterpError::InvalidBounds(
                "max rewrite steps must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Data exchanged with the interpreter: observer results and transition or
/// observer arguments.
#[derive(Clone, Debug)]
pub enum DataValue {
    /// Integers and identifier values.
    Int(i64),
    Bool(bool),
    /// A component object state, as returned by a projection.
    State(StateValue),
    /// The missing component of a projection.
    Absent,
}

impl DataValue {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            DataValue::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            DataValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, DataValue::Absent)
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            DataValue::Int(n) => serde_json::json!(n),
            DataValue::Bool(b) => serde_json::json!(b),
            DataValue::Absent => serde_json::Value::Null,
            DataValue::State(s) => serde_json::json!({ "state": s.to_string() }),
        }
    }
}

impl fmt::Display for DataValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataValue::Int(n) => write!(f, "{n}"),
            DataValue::Bool(b) => write!(f, "{b}"),
            DataValue::State(s) => write!(f, "{s}"),
            DataValue::Absent => f.write_str("absent"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HistoryEntry {
    pub transition: String,
    pub args: Vec<DataValue>,
}

/// A state given by the transitions applied to an initial constant.
///
/// There is deliberately no `PartialEq`: states are compared behaviorally
/// with `Interpreter::behaviorally_equal`.
#[derive(Clone, Debug)]
pub struct StateValue {
    /// Module of the object the state belongs to.
    pub module: String,
    pub initial: String,
    pub history: Vec<HistoryEntry>,
}

impl StateValue {
    pub fn initial(module: &str, initial: &str) -> StateValue {
        StateValue {
            module: module.to_string(),
            initial: initial.to_string(),
            history: Vec::new(),
        }
    }

    pub fn then(&self, transition: &str, args: Vec<DataValue>) -> StateValue {
        let mut next = self.clone();
        next.history.push(HistoryEntry {
            transition: transition.to_string(),
            args,
        });
        next
    }

    pub fn depth(&self) -> usize {
        self.history.len()
    }
}

/// `init` or `add(5) ; add(3)` style, readable in traces and witnesses.
impl fmt::Display for StateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.initial)?;
        for h in &self.history {
            let args: Vec<String> = h.args.iter().map(|a| a.to_string()).collect();
            write!(f, " ; {}({})", h.transition, args.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("unknown observer `{0}`")]
    UnknownObserver(String),
    #[error("`{op}` takes {expected} argument(s), got {got}")]
    ArityMismatch {
        op: String,
        expected: usize,
        got: usize,
    },
    #[error("argument {position} of `{op}` must be {expected}, got `{value}`")]
    SortMismatch {
        op: String,
        position: usize,
        expected: String,
        value: String,
    },
    #[error("effective condition `{op}` reduced to `{value}`, not a boolean")]
    NonBoolean { op: String, value: String },
    #[error("{0}")]
    ProjectionAbsent(String),
    #[error("cannot enumerate values of sort `{0}`")]
    Unenumerable(String),
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("state belongs to `{found}`, expected `{expected}`")]
    ForeignState { expected: String, found: String },
    #[error("module `{0}` has no initial state")]
    NoInitialState(String),
}

impl InterpError {
    pub fn is_projection_absent(&self) -> bool {
        matches!(self, InterpError::ProjectionAbsent(_))
    }
}
