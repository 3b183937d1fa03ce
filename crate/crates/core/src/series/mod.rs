//! Truncated power series and Puiseux series.

mod puiseux;
mod truncated;

pub use puiseux::{image_in, parse_puiseux, BasePoint, Embedding, PuiseuxSeries, PuiseuxValue};
pub use truncated::{TruncatedSeries, Valuation};

use std::fmt;

use thiserror::Error;

use crate::algebra::AlgebraError;

/// Direction of a one-sided reparameterization `t = t0 + sign * s^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("valuation {valuation} is below the required {required}")]
    InsufficientValuation { valuation: usize, required: usize },
    #[error("valuation undetermined at truncation order {0}")]
    UndeterminedAtOrder(usize),
    #[error("parameter lies on the wrong side of the base point")]
    WrongSide,
    #[error("numeric certification failed: {0}")]
    NotCertified(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
