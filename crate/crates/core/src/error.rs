use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which structural rule a daisy matrix violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixRule {
    Shape,
    DotPlacement,
    Do1,
    Larger,
}

impl fmt::Display for MatrixRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixRule::Shape => "shape",
            MatrixRule::DotPlacement => "dot placement",
            MatrixRule::Do1 => "DO1",
            MatrixRule::Larger => "larger",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty configuration")]
    EmptyConfiguration,
    #[error("coordinate overflow")]
    CoordinateOverflow,
    #[error("invalid DO1 tuple {values:?}: {reason}")]
    InvalidTuple { values: Vec<u64>, reason: &'static str },
    #[error("invalid daisy matrix: rule `{rule}` violated in row {row}: {detail}")]
    InvalidMatrix { rule: MatrixRule, row: usize, detail: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("not a minimizer: edge perimeter {perimeter} but EIP({n}) = {optimum}")]
    NotMinimizer { n: u128, perimeter: u128, optimum: u128 },
    #[error("donor does not fit inside the defect")]
    DonorDoesNotFit,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded(_) => 2,
            Error::Invariant(_) => 3,
            _ => 1,
        }
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
