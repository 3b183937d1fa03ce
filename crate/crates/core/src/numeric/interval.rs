//! Real and complex interval arithmetic over rationals, with outward
//! rounding to dyadic endpoints to keep numerators small.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::{rat_to_f64, GaussianRational};

/// Closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

/// Largest `k / 2^bits <= q`.
pub fn floor_dyadic(q: &BigRational, bits: u32) -> BigRational {
    let scaled = q * BigRational::from_integer(pow2(bits));
    BigRational::new(scaled.floor().to_integer(), pow2(bits))
}

/// Smallest `k / 2^bits >= q`.
pub fn ceil_dyadic(q: &BigRational, bits: u32) -> BigRational {
    let scaled = q * BigRational::from_integer(pow2(bits));
    BigRational::new(scaled.ceil().to_integer(), pow2(bits))
}

/// Rational upper bound for `sqrt(q)`, within `2^-bits` of the true value.
pub fn sqrt_upper(q: &BigRational, bits: u32) -> BigRational {
    nth_root_enclosure(q, 2, bits).hi
}

/// Enclosure of `q^(1/n)` for `q >= 0` of width `2^-bits`.
pub fn nth_root_enclosure(q: &BigRational, n: u32, bits: u32) -> Interval {
    assert!(!q.is_negative(), "root of a negative rational");
    let scaled = q * BigRational::from_integer(pow2(bits * n));
    let m = scaled.floor().to_integer();
    let r = m.nth_root(n);
    let den = pow2(bits);
    let lo = BigRational::new(r.clone(), den.clone());
    let hi = if scaled.is_integer() && r.pow(n) == m {
        lo.clone()
    } else {
        BigRational::new(r + 1, den)
    };
    Interval { lo, hi }
}

/// Exact rational `n`-th root of `q` if it exists.
pub fn exact_nth_root(q: &BigRational, n: u32) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (a, b) = (q.numer(), q.denom());
    let ra = a.nth_root(n);
    let rb = b.nth_root(n);
    (ra.pow(n) == *a && rb.pow(n) == *b).then(|| BigRational::new(ra, rb))
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn point(q: BigRational) -> Self {
        Self { lo: q.clone(), hi: q }
    }

    pub fn zero() -> Self {
        Self::point(BigRational::zero())
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// Largest absolute value of a point in the interval.
    pub fn mag(&self) -> BigRational {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value of a point in the interval.
    pub fn mig(&self) -> BigRational {
        if self.contains_zero() {
            BigRational::zero()
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Self {
        Self { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.lo == self.hi && o.lo == o.hi {
            return Self::point(&self.lo * &o.lo);
        }
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().expect("nonempty").clone();
        let hi = c.iter().max().expect("nonempty").clone();
        Self { lo, hi }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn hull(&self, o: &Self) -> Self {
        Self { lo: self.lo.clone().min(o.lo.clone()), hi: self.hi.clone().max(o.hi.clone()) }
    }

    /// Round endpoints outward to multiples of `2^-bits`.
    pub fn round_out(&self, bits: u32) -> Self {
        Self { lo: floor_dyadic(&self.lo, bits), hi: ceil_dyadic(&self.hi, bits) }
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.mid())
    }

    pub fn cmp_certain(&self, o: &Self) -> Option<Ordering> {
        if self.hi < o.lo {
            Some(Ordering::Less)
        } else if o.hi < self.lo {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

/// Rectangle `re + i*im` in the complex plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        Self { re, im }
    }

    pub fn point(g: &GaussianRational) -> Self {
        Self { re: Interval::point(g.re.clone()), im: Interval::point(g.im.clone()) }
    }

    pub fn real(i: Interval) -> Self {
        Self { re: i, im: Interval::zero() }
    }

    pub fn zero() -> Self {
        Self { re: Interval::zero(), im: Interval::zero() }
    }

    /// Square with center `(re, im)` and half-width `r`.
    pub fn disc_box(re: &BigRational, im: &BigRational, r: &BigRational) -> Self {
        Self {
            re: Interval::new(re - r, re + r),
            im: Interval::new(im - r, im + r),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> Self {
        Self { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn mul_gaussian(&self, g: &GaussianRational) -> Self {
        self.mul(&Self::point(g))
    }

    /// Larger of the two side lengths.
    pub fn width(&self) -> BigRational {
        self.re.width().max(self.im.width())
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn contains(&self, g: &GaussianRational) -> bool {
        self.re.contains(&g.re) && self.im.contains(&g.im)
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        self.re.overlaps(&o.re) && self.im.overlaps(&o.im)
    }

    pub fn round_out(&self, bits: u32) -> Self {
        Self { re: self.re.round_out(bits), im: self.im.round_out(bits) }
    }

    /// Upper bound for the squared modulus.
    pub fn abs_sqr_upper(&self) -> BigRational {
        let a = self.re.mag();
        let b = self.im.mag();
        &a * &a + &b * &b
    }

    /// Lower bound for the squared modulus.
    pub fn abs_sqr_lower(&self) -> BigRational {
        let a = self.re.mig();
        let b = self.im.mig();
        &a * &a + &b * &b
    }

    pub fn center(&self) -> GaussianRational {
        GaussianRational::new(self.re.mid(), self.im.mid())
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// `self^k` by repeated squaring with rounding after each product.
    pub fn pow(&self, k: usize, bits: u32) -> Self {
        let mut acc = Self::point(&GaussianRational::from_int(1));
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).round_out(bits);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).round_out(bits);
            }
        }
        acc
    }
}

/// Horner evaluation of a Gaussian polynomial on a complex interval with
/// outward rounding at `bits` after every step.
pub fn eval_poly_interval(coeffs: &[GaussianRational], x: &ComplexInterval, bits: u32) -> ComplexInterval {
    let mut acc = ComplexInterval::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(&ComplexInterval::point(c)).round_out(bits);
    }
    acc
}

/// Number of bits needed so that `2^-bits <= eps`.
pub fn bits_for(eps: &BigRational) -> u32 {
    let mut bits = 0u32;
    let mut p = BigRational::one();
    while &p > eps {
        p /= BigRational::from_integer(BigInt::from(2));
        bits += 1;
    }
    bits
}

/// Exact `10^-k`.
pub fn ten_pow_neg(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10).pow(k))
}

/// Integer part of `log2 |q|` (rough magnitude) for nonzero `q`.
pub fn log2_mag(q: &BigRational) -> i64 {
    q.numer().bits() as i64 - q.denom().bits() as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn square_root_enclosure_contains_true_value() {
        let e = nth_root_enclosure(&q(1, 2), 2, 110);
        assert!(&e.lo * &e.lo <= q(1, 2));
        assert!(&e.hi * &e.hi >= q(1, 2));
        assert!(e.width() <= ten_pow_neg(30));
        let approx = e.to_f64();
        assert!((approx - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn exact_roots_are_detected() {
        assert_eq!(exact_nth_root(&q(1, 4), 2), Some(q(1, 2)));
        assert_eq!(exact_nth_root(&q(1, 2), 2), None);
        assert_eq!(nth_root_enclosure(&q(9, 4), 2, 10), Interval::point(q(3, 2)));
    }

    #[test]
    fn interval_product_signs() {
        let a = Interval::new(q(-1, 1), q(2, 1));
        let b = Interval::new(q(-3, 1), q(1, 1));
        assert_eq!(a.mul(&b), Interval::new(q(-6, 1), q(3, 1)));
    }
}
