//! Error type shared by the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A type axiom fails at a concrete level. `clause` names the axiom.
    #[error("invalid type at level {level}, clause ({clause}): {detail}")]
    InvalidType {
        level: u64,
        clause: char,
        detail: String,
    },

    /// Materialization would exceed the element budget.
    #[error("level {requested} too deep: budget of {budget} set-elements exhausted")]
    LevelTooDeep { requested: u64, budget: u64 },

    /// m-value arithmetic left the supported range.
    #[error("level sizes overflow at level {level}")]
    SizeOverflow { level: u64 },

    /// The queried set does not belong to the scheme.
    #[error("not a scheme member: {detail}")]
    NotAMember { detail: String },

    /// A closure-difference quotient came out fractional; the engine state is
    /// inconsistent if this ever fires.
    #[error("non-integer quotient at alpha={alpha}, k={k}: ({num}) / ({den})")]
    NonIntegerQuotient {
        alpha: u64,
        k: u64,
        num: u128,
        den: u128,
    },

    /// A construction needs a branching bound the type does not satisfy.
    #[error("type too small at level {level}: need n >= {needed}, have {have}")]
    TypeTooSmall { level: u64, needed: u128, have: u128 },

    /// A construction defined only for binary branching got something else.
    #[error("construction requires a binary type (n = 2 everywhere), got {label}")]
    NonBinaryType { label: String },

    /// Witness search gave up because every candidate exceeds the budget.
    #[error("no witness within budget: {detail}")]
    NoWitnessInBudget { detail: String },

    /// A bounded scan ran out of room before deciding.
    #[error("scan budget exceeded: {detail}")]
    ScanBudgetExceeded { detail: String },

    /// An index left its declared range during projection or transport.
    #[error("bound violation: {detail}")]
    BoundViolation { detail: String },

    /// Malformed user input (CLI arguments, JSON payloads, ordinal literals).
    #[error("bad input: {0}")]
    BadInput(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to: 1 for malformed or
    /// unsatisfiable user input, 2 for exhausted budgets, 3 for internal
    /// inconsistencies.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::LevelTooDeep { .. }
            | Error::SizeOverflow { .. }
            | Error::NoWitnessInBudget { .. }
            | Error::ScanBudgetExceeded { .. } => 2,
            Error::NonIntegerQuotient { .. } => 3,
            _ => 1,
        }
    }
}
