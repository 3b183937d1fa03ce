//! Minimal algebraic traits shared by scalars, polynomials and series.
//!
//! Operations take references so that generic code over big-number
//! coefficients does not clone operands it only reads.

use std::fmt::Debug;

use super::AlgebraError;

/// Commutative ring with identity.
pub trait Ring: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    /// Structural zero test. For residues modulo a reducible modulus this
    /// does not detect zero divisors; see [`Field::is_zero_checked`].
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_i64(n: i64) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Integral domain with an exact-division oracle. `div_exact` fails with
/// [`AlgebraError::InexactDivision`] when the quotient does not exist.
pub trait IntegralDomain: Ring {
    fn div_exact(&self, o: &Self) -> Result<Self, AlgebraError>;
}

/// Field whose inverse may fail in two ways: division by zero, or (for
/// residues modulo a squarefree but reducible modulus) discovery of a zero
/// divisor, reported as [`AlgebraError::SplitRequest`].
pub trait Field: Ring {
    fn inv(&self) -> Result<Self, AlgebraError>;
    fn from_gaussian(g: &super::GaussianRational) -> Self;

    /// Zero test that is sound under dynamic evaluation.
    fn is_zero_checked(&self) -> Result<bool, AlgebraError> {
        Ok(self.is_zero())
    }

    fn div(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(self.mul(&o.inv()?))
    }
}

impl<F: Field> IntegralDomain for F {
    fn div_exact(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.div(o)
    }
}
