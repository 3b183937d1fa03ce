//! Dense univariate polynomials, coefficients stored low to high degree.

use std::fmt;

use super::ring::{Field, IntegralDomain, Ring};
use super::AlgebraError;

/// Dense polynomial. The leading stored coefficient is structurally nonzero;
/// the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> Poly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(R::one())
    }

    pub fn constant(c: R) -> Self {
        Self::new(vec![c])
    }

    /// `c * z^k`.
    pub fn monomial(c: R, k: usize) -> Self {
        let mut v = vec![R::zero(); k];
        v.push(c);
        Self::new(v)
    }

    /// The polynomial `z`.
    pub fn var() -> Self {
        Self::monomial(R::one(), 1)
    }

    /// `z - a`.
    pub fn linear_root(a: &R) -> Self {
        Self::new(vec![a.neg(), R::one()])
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0; only for callers that
    /// have already excluded zero.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> R {
        self.coeffs.get(i).cloned().unwrap_or_else(R::zero)
    }

    pub fn lc(&self) -> R {
        self.coeffs.last().cloned().unwrap_or_else(R::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn try_map<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<Poly<S>, E> {
        Ok(Poly::new(self.coeffs.iter().map(f).collect::<Result<Vec<_>, _>>()?))
    }

    pub fn scale(&self, k: &R) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.mul(k)).collect())
    }

    /// Multiply by `z^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![R::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Self { coeffs: v }
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = R::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul(&R::from_i64(i as i64)))
                .collect(),
        )
    }

    /// `self(q)`.
    pub fn compose(&self, q: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_poly(q).add_poly(&Self::constant(c.clone()));
        }
        acc
    }

    /// `self(z + a)`.
    pub fn taylor_shift(&self, a: &R) -> Self {
        self.compose(&Self::new(vec![a.clone(), R::one()]))
    }

    pub fn add_poly(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Self::new(v)
    }

    pub fn sub_poly(&self, o: &Self) -> Self {
        self.add_poly(&o.neg_poly())
    }

    pub fn neg_poly(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn mul_poly(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut v = vec![R::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].add(&a.mul(b));
            }
        }
        Self::new(v)
    }

    pub fn pow_poly(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul_poly(self);
        }
        acc
    }

    /// Pseudo-remainder `prem(self, d)` with `lc(d)^(deg self - deg d + 1)`
    /// premultiplied; valid over any commutative ring.
    pub fn pseudo_rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("pseudo_rem by zero polynomial");
        let Some(ds) = self.degree() else { return Self::zero() };
        if ds < dd {
            return self.clone();
        }
        let lc = d.lc();
        let mut r = self.clone();
        let mut steps = ds - dd + 1;
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let c = r.lc();
            let t = d.scale(&c).shift_up(dr - dd);
            r = r.scale(&lc).sub_poly(&t);
            // The leading term cancels structurally; drop it in case the ring
            // produced a non-normalised zero.
            if r.degree() == Some(dr) {
                r.coeffs.pop();
                r = Self::new(r.coeffs);
            }
            steps -= 1;
        }
        r.scale(&lc.pow(steps as u32))
    }
}

impl<R: IntegralDomain> Poly<R> {
    /// Exact division in `R[z]`.
    pub fn div_exact_poly(&self, d: &Self) -> Result<Self, AlgebraError> {
        let dd = d.degree().ok_or(AlgebraError::DivisionByZero)?;
        let Some(ds) = self.degree() else { return Ok(Self::zero()) };
        if ds < dd {
            return Err(AlgebraError::InexactDivision);
        }
        let lc = d.lc();
        let mut r = self.clone();
        let mut q = vec![R::zero(); ds - dd + 1];
        while let Some(dr) = r.degree() {
            if dr < dd {
                return Err(AlgebraError::InexactDivision);
            }
            let c = r.lc().div_exact(&lc)?;
            r = r.sub_poly(&d.scale(&c).shift_up(dr - dd));
            if r.degree() == Some(dr) {
                r.coeffs.pop();
                r = Self::new(r.coeffs);
            }
            q[dr - dd] = c;
        }
        Ok(Self::new(q))
    }

    /// Divide every coefficient exactly by `k`.
    pub fn div_exact_scalar(&self, k: &R) -> Result<Self, AlgebraError> {
        self.try_map(|c| c.div_exact(k))
    }
}

impl<F: Field> Poly<F> {
    /// Euclidean division. Inverting the leading coefficient of `d` can raise
    /// a split request over residue rings.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self), AlgebraError> {
        let dd = d.degree().ok_or(AlgebraError::DivisionByZero)?;
        let inv = d.lc().inv()?;
        let Some(ds) = self.degree() else { return Ok((Self::zero(), Self::zero())) };
        if ds < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![F::zero(); ds - dd + 1];
        for k in (0..=ds - dd).rev() {
            let c = r[k + dd].mul(&inv);
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    r[k + j] = r[k + j].sub(&c.mul(dj));
                }
            }
            r[k + dd] = F::zero();
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self, AlgebraError> {
        Ok(self.div_rem(d)?.1)
    }

    pub fn monic(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let inv = self.lc().inv()?;
        let mut p = self.scale(&inv);
        if let Some(last) = p.coeffs.last_mut() {
            *last = F::one();
        }
        Ok(p)
    }

    /// Monic gcd by the Euclidean algorithm. Every division checks its
    /// pivot, so over a residue ring a zero divisor surfaces as a split
    /// request instead of a wrong answer.
    pub fn gcd(&self, o: &Self) -> Result<Self, AlgebraError> {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            // Normalise first so a zero-divisor leading coefficient is caught.
            b = normalize_leading(b)?;
            if b.is_zero() {
                break;
            }
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        normalize_leading(a)?.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn xgcd(&self, o: &Self) -> Result<(Self, Self, Self), AlgebraError> {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            r1 = normalize_leading(r1)?;
            if r1.is_zero() {
                break;
            }
            let (q, r) = r0.div_rem(&r1)?;
            let s2 = s0.sub_poly(&q.mul_poly(&s1));
            let t2 = t0.sub_poly(&q.mul_poly(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        r0 = normalize_leading(r0)?;
        if r0.is_zero() {
            return Ok((Self::zero(), Self::zero(), Self::zero()));
        }
        let inv = r0.lc().inv()?;
        Ok((r0.monic()?, s0.scale(&inv), t0.scale(&inv)))
    }

    /// Exact quotient by a divisor; fails if the remainder is nonzero.
    pub fn div_exact_field(&self, d: &Self) -> Result<Self, AlgebraError> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(AlgebraError::InexactDivision);
        }
        Ok(q)
    }
}

/// Strip leading coefficients that are zero under the checked test. Over a
/// residue ring this raises a split request when the leading coefficient is
/// a zero divisor.
pub(crate) fn normalize_leading<F: Field>(mut p: Poly<F>) -> Result<Poly<F>, AlgebraError> {
    while let Some(c) = p.coeffs.last() {
        if c.is_zero_checked()? {
            p.coeffs.pop();
        } else {
            break;
        }
    }
    Ok(p)
}

impl<R: Ring> Ring for Poly<R> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        self.add_poly(o)
    }
    fn sub(&self, o: &Self) -> Self {
        self.sub_poly(o)
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_poly(o)
    }
    fn neg(&self) -> Self {
        self.neg_poly()
    }
    fn from_i64(n: i64) -> Self {
        Poly::constant(R::from_i64(n))
    }
}

impl<R: IntegralDomain> IntegralDomain for Poly<R> {
    fn div_exact(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.div_exact_poly(o)
    }
}

impl<R: Ring + fmt::Display> Poly<R> {
    /// Render with the given variable name, highest degree first, e.g.
    /// `z^2 - (1+2i)*z + 4`.
    pub fn fmt_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (neg, body) = split_sign(&c.to_string());
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let term = if i == 0 {
                wrap_if_compound(&body)
            } else if body == "1" {
                mono
            } else {
                format!("{}*{mono}", wrap_if_compound(&body))
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        out
    }
}

/// Split a leading minus off a rendered coefficient when the remainder is a
/// single term, so `-3` renders as ` - 3` while `-1+i` stays parenthesised.
pub(crate) fn split_sign(s: &str) -> (bool, String) {
    if let Some(rest) = s.strip_prefix('-') {
        if !is_compound(rest) {
            return (true, rest.to_string());
        }
    }
    (false, s.to_string())
}

fn is_compound(s: &str) -> bool {
    s.chars().skip(1).any(|ch| ch == '+' || ch == '-' || ch == ' ')
}

pub(crate) fn wrap_if_compound(s: &str) -> String {
    if is_compound(s) || s.starts_with('-') {
        format!("({s})")
    } else {
        s.to_string()
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_var("z"))
    }
}

impl<R: Ring + fmt::Debug> fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}
