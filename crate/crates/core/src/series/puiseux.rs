//! Puiseux series `t = t0 + sign * k * s^N`, `s >= 0`, and their
//! evaluation. The scale `k` is 1 except at irrational base points, where a
//! positive `k` from the base field can keep the coefficients out of a
//! further extension.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::algebra::{GaussianRational as G, Poly, Ring, Scalar};
use crate::numeric::interval::{eval_poly_interval, nth_root_enclosure, ten_pow_neg, exact_nth_root, ComplexInterval, Interval};
use crate::numeric::roots::{refine_root, RootDisc};
use crate::numeric::sturm::RealRoot;

use super::{SeriesError, Sign, TruncatedSeries};

/// Base point of an expansion: a rational, or a real algebraic number given
/// by a squarefree rational polynomial and an isolating interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasePoint {
    Rational(BigRational),
    Algebraic(RealRoot),
}

impl BasePoint {
    pub fn rational(&self) -> Option<&BigRational> {
        match self {
            BasePoint::Rational(q) => Some(q),
            BasePoint::Algebraic(r) => r.exact_value(),
        }
    }

    /// Rational enclosure of the point of width at most `width`.
    pub fn enclosure(&self, width: &BigRational) -> Interval {
        match self {
            BasePoint::Rational(q) => Interval::point(q.clone()),
            BasePoint::Algebraic(r) => {
                let r = r.refine(width);
                Interval::new(r.lo, r.hi)
            }
        }
    }

    pub fn approx(&self) -> f64 {
        match self {
            BasePoint::Rational(q) => crate::algebra::rat_to_f64(q),
            BasePoint::Algebraic(r) => r.approx(),
        }
    }
}

impl fmt::Display for BasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasePoint::Rational(q) => write!(f, "{}", G::from_real(q.clone())),
            BasePoint::Algebraic(r) => write!(
                f,
                "root({}; {}, {})",
                r.poly.fmt_var("t"),
                G::from_real(r.lo.clone()),
                G::from_real(r.hi.clone())
            ),
        }
    }
}

/// An embedding of `Q(i)[w]/(modulus)` into the complex numbers, fixed by an
/// isolating disc of one root of the modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub modulus: Poly<G>,
    pub disc: RootDisc,
}

impl Embedding {
    /// Enclosure of the image of `x`, with the root refined to radius
    /// `2^-bits`.
    pub fn image(&self, x: &Scalar, bits: u32) -> ComplexInterval {
        image_in(x, &self.root_box(bits), bits)
    }

    /// Box around the root of radius at most `2^-bits`.
    pub fn root_box(&self, bits: u32) -> ComplexInterval {
        refine_root(&self.modulus, &self.disc, &pow2_neg(bits)).to_box()
    }

    pub fn approx(&self) -> (f64, f64) {
        self.disc.center.to_f64_pair()
    }
}

/// Enclosure of `x` given a box around the embedded generator.
pub fn image_in(x: &Scalar, root: &ComplexInterval, bits: u32) -> ComplexInterval {
    match x {
        Scalar::Gaussian(g) => ComplexInterval::point(g),
        Scalar::Algebraic(a) => eval_poly_interval(a.residue().coeffs(), root, bits + 8),
    }
}

/// The value of a Puiseux series at a parameter.
#[derive(Clone, Debug, PartialEq)]
pub enum PuiseuxValue {
    Exact(Scalar),
    Enclosure(ComplexInterval),
}

/// The function `t -> body(s)` on the side `t = t0 + sign * scale * s^N`,
/// `s >= 0`.
#[derive(Clone, PartialEq)]
pub struct PuiseuxSeries {
    pub base_point: BasePoint,
    pub ramification: usize,
    pub sign: Sign,
    /// Positive real under the embedding of the coefficients.
    pub scale: Scalar,
    pub body: TruncatedSeries<Scalar>,
}

impl PuiseuxSeries {
    pub fn new(base_point: BasePoint, ramification: usize, sign: Sign, body: TruncatedSeries<Scalar>) -> Self {
        assert!(ramification >= 1);
        Self { base_point, ramification, sign, scale: Scalar::one(), body }
    }

    pub fn with_scale(self, scale: Scalar) -> Self {
        Self { scale, ..self }
    }

    fn rational_scale(&self) -> Option<BigRational> {
        self.scale.as_gaussian().filter(|g| g.im.is_zero()).map(|g| g.re.clone())
    }

    /// Exact value of `s` at `t` when it is rational; `Err(WrongSide)` if
    /// `t` is on the other side of the base point.
    fn exact_s(&self, t: &BigRational) -> Result<Option<BigRational>, SeriesError> {
        let (Some(t0), Some(k)) = (self.base_point.rational(), self.rational_scale()) else {
            return Ok(None);
        };
        let d = (t - t0) * BigRational::from_integer(self.sign.as_i64().into()) / k;
        if d.is_negative() {
            return Err(SeriesError::WrongSide);
        }
        Ok(exact_nth_root(&d, self.ramification as u32))
    }

    /// Enclosure of `s` at `t` of width about `2^-bits`.
    fn s_enclosure(&self, t: &BigRational, embedding: Option<&Embedding>, bits: u32) -> Result<Interval, SeriesError> {
        let n = self.ramification as u32;
        let sign = BigRational::from_integer(self.sign.as_i64().into());
        let mut w = bits * n + 8;
        loop {
            let b = self.base_point.enclosure(&pow2_neg(w));
            let mut d = Interval::new(t - &b.hi, t - &b.lo).scale(&sign);
            if d.hi.is_negative() {
                return Err(SeriesError::WrongSide);
            }
            let k = match (self.rational_scale(), embedding) {
                (Some(k), _) => Interval::point(k),
                (None, Some(e)) => e.image(&self.scale, w).re,
                (None, None) => return Err(SeriesError::NotCertified("algebraic scale needs an embedding".into())),
            };
            if !k.lo.is_positive() {
                return Err(SeriesError::NotCertified("scale is not positive".into()));
            }
            if !d.lo.is_negative() {
                d = Interval::new(&d.lo / &k.hi, &d.hi / &k.lo);
                let lo = nth_root_enclosure(&d.lo, n, bits).lo;
                let hi = nth_root_enclosure(&d.hi, n, bits).hi;
                return Ok(Interval::new(lo, hi));
            }
            if w > 1 << 15 {
                return Err(SeriesError::NotCertified("parameter too close to the base point".into()));
            }
            w *= 2;
        }
    }

    /// Evaluates the body at `t`: exactly when `s` is rational, otherwise
    /// as an enclosure of width at most `10^-30`. Bodies with algebraic
    /// coefficients need [`PuiseuxSeries::eval_embedded`] in the inexact case.
    pub fn eval(&self, t: &BigRational) -> Result<PuiseuxValue, SeriesError> {
        if let Some(s) = self.exact_s(t)? {
            return Ok(PuiseuxValue::Exact(self.body.eval(&Scalar::gaussian(G::from_real(s)))));
        }
        if self.body.coeffs().iter().any(|c| c.as_gaussian().is_none()) {
            return Err(SeriesError::NotCertified("algebraic coefficients need an embedding".into()));
        }
        Ok(PuiseuxValue::Enclosure(self.enclose(t, None, &ten_pow_neg(30))?))
    }

    /// Enclosure of the value at `t` under `embedding`, of width at most
    /// `width`.
    pub fn eval_embedded(
        &self,
        t: &BigRational,
        embedding: Option<&Embedding>,
        width: &BigRational,
    ) -> Result<ComplexInterval, SeriesError> {
        if let Some(s) = self.exact_s(t)? {
            let v = self.body.eval(&Scalar::gaussian(G::from_real(s)));
            if let Some(g) = v.as_gaussian() {
                return Ok(ComplexInterval::point(g));
            }
        }
        self.enclose(t, embedding, width)
    }

    fn enclose(&self, t: &BigRational, embedding: Option<&Embedding>, width: &BigRational) -> Result<ComplexInterval, SeriesError> {
        let mut bits = 128u32;
        loop {
            let s = ComplexInterval::real(self.s_enclosure(t, embedding, bits)?);
            let root = embedding.map(|e| e.root_box(bits));
            let mut acc = ComplexInterval::zero();
            for c in self.body.coeffs().iter().rev() {
                let cv = match (c, &root) {
                    (Scalar::Gaussian(g), _) => ComplexInterval::point(g),
                    (Scalar::Algebraic(_), Some(r)) => image_in(c, r, bits),
                    (Scalar::Algebraic(_), None) => {
                        return Err(SeriesError::NotCertified("algebraic coefficients need an embedding".into()))
                    }
                };
                acc = acc.mul(&s).add(&cv).round_out(bits + 8);
            }
            if acc.width() <= *width {
                return Ok(acc);
            }
            if bits > 1 << 13 {
                return Err(SeriesError::NotCertified("enclosure did not reach the requested width".into()));
            }
            bits *= 2;
        }
    }

    /// Ramification header `t = t0 + s^N`.
    pub fn header(&self) -> String {
        let pow = if self.ramification == 1 { "s".to_string() } else { format!("s^{}", self.ramification) };
        if self.scale.is_one() {
            format!("t = {} {} {pow}", self.base_point, self.sign)
        } else {
            format!("t = {} {} {}*{pow}", self.base_point, self.sign, self.scale)
        }
    }

    /// Mirror of a ramification-odd expansion: the same function written
    /// with the opposite sign, via `s -> -s`.
    pub fn mirrored(&self) -> Option<Self> {
        (self.ramification % 2 == 1).then(|| Self {
            base_point: self.base_point.clone(),
            ramification: self.ramification,
            sign: match self.sign {
                Sign::Plus => Sign::Minus,
                Sign::Minus => Sign::Plus,
            },
            scale: self.scale.clone(),
            body: self.body.substitute_power(1, Sign::Minus),
        })
    }
}

fn pow2_neg(bits: u32) -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(1) << bits)
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\n{}", self.header(), self.body.fmt_var("s"))
    }
}

impl fmt::Debug for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses the two-line form produced by `Display` for rational base points
/// and Gaussian coefficients.
pub fn parse_puiseux(src: &str) -> Result<PuiseuxSeries, crate::algebra::parse::ParseError> {
    use crate::algebra::parse::{parse_rational, parse_series_over, ParseError};
    let bad = |m: &str| ParseError { message: m.to_string(), position: 0 };
    let mut lines = src.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("missing header"))?.trim();
    let body = lines.next().ok_or_else(|| bad("missing body"))?;
    let rest = header.strip_prefix("t = ").ok_or_else(|| bad("header must start with `t = `"))?;
    let (pos, sign) = match (rest.rfind(" + "), rest.rfind(" - ")) {
        (Some(p), Some(m)) if m > p => (m, Sign::Minus),
        (Some(p), _) => (p, Sign::Plus),
        (None, Some(m)) => (m, Sign::Minus),
        (None, None) => return Err(bad("header needs a sign")),
    };
    let t0 = parse_rational(&rest[..pos])?;
    let pow = rest[pos + 3..].trim();
    let n = match pow.strip_prefix("s") {
        Some("") => 1,
        Some(e) => e.strip_prefix('^').and_then(|e| e.parse::<usize>().ok()).ok_or_else(|| bad("bad ramification"))?,
        None => return Err(bad("bad ramification")),
    };
    if n == 0 {
        return Err(bad("ramification must be positive"));
    }
    let body = parse_series_over(body.trim(), "s", "w", None)?;
    Ok(PuiseuxSeries::new(BasePoint::Rational(t0), n, sign, body))
}

impl TruncatedSeries<Scalar> {
    pub fn from_gaussian(s: &TruncatedSeries<G>) -> Self {
        s.map(|c| Scalar::gaussian(c.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_series_over;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn sqrt_series() -> PuiseuxSeries {
        PuiseuxSeries::new(BasePoint::Rational(q(0, 1)), 2, Sign::Plus, TruncatedSeries::var())
    }

    #[test]
    fn exact_square_root() {
        assert_eq!(sqrt_series().eval(&q(1, 4)).unwrap(), PuiseuxValue::Exact(Scalar::gaussian(G::from_ratio(1, 2))));
    }

    #[test]
    fn interval_square_root() {
        let PuiseuxValue::Enclosure(b) = sqrt_series().eval(&q(1, 2)).unwrap() else {
            panic!("expected an enclosure");
        };
        assert!(b.width() <= ten_pow_neg(30));
        let (re, _) = b.to_f64();
        assert!((re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn wrong_side() {
        let r = PuiseuxSeries::new(
            BasePoint::Rational(q(0, 1)),
            1,
            Sign::Plus,
            parse_series_over("1 + s", "s", "w", None).unwrap(),
        );
        assert_eq!(r.eval(&q(-1, 1)), Err(SeriesError::WrongSide));
    }

    #[test]
    fn display_round_trip() {
        let r = PuiseuxSeries::new(
            BasePoint::Rational(q(1, 2)),
            2,
            Sign::Minus,
            parse_series_over("1 - 1/2i*s^2 + O(s^4)", "s", "w", None).unwrap(),
        );
        let text = r.to_string();
        assert_eq!(text, "t = 1/2 - s^2\n1 - 1/2i*s^2 + O(s^4)");
        assert_eq!(parse_puiseux(&text).unwrap(), r);
    }
}
