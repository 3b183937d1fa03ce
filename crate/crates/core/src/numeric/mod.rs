//! Certified numerics: rational intervals, complex and real root isolation,
//! and adaptive quadrature for probes.

pub mod interval;
pub mod quadrature;
pub mod roots;
pub mod sturm;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("numeric certification failed: {0}")]
    NotCertified(String),
}
