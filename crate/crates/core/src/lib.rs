//! Exact lifting of curves over the invariants of finite group
//! representations.
//!
//! A curve in the quotient `V//G` is given by the values of a fixed set of
//! homogeneous invariants along a parameter `t`. For the symmetric group
//! acting on `C^n` these are the coefficients of a monic polynomial, and a
//! lift is a parameterization of its roots. This crate computes such lifts
//! exactly as Puiseux series, glues them over intervals, and decides when a
//! differentiable lift exists.

pub mod algebra;
pub mod global;
pub mod lifting;
pub mod numeric;
pub mod polar;
pub mod quotient;
pub mod regularity;
pub mod series;
