//! Exact scalars and univariate polynomial algebra.

mod algebraic;
mod gaussian;
pub mod hensel;
pub mod linalg;
pub mod parse;
mod poly;
mod ring;
pub mod squarefree;
pub mod subresultant;

pub use algebraic::{dynamic_eval, AlgebraicScalar, Modulus, Scalar};
pub use gaussian::{lex_cmp, GaussianRational};
pub(crate) use gaussian::rat_to_f64;
pub use poly::Poly;
pub(crate) use poly::{split_sign, wrap_if_compound};
pub use ring::{Field, IntegralDomain, Ring};

use thiserror::Error;

/// Failures of exact arithmetic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    /// A zero divisor was met while computing modulo `modulus`; the
    /// computation must be repeated over `factor` and over `cofactor`.
    #[error("modulus {} splits as ({}) * ({})", .modulus.fmt_var("w"), .factor.fmt_var("w"), .cofactor.fmt_var("w"))]
    SplitRequest {
        modulus: Poly<GaussianRational>,
        factor: Poly<GaussianRational>,
        cofactor: Poly<GaussianRational>,
    },
    #[error("initial factors are not pairwise coprime")]
    NotCoprime,
    #[error("unsupported extension tower: {0}")]
    UnsupportedTower(String),
    #[error("division is not exact")]
    InexactDivision,
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
}
