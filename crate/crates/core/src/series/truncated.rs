//! Truncated power series with an explicit trusted order.

use std::fmt;

use crate::algebra::{split_sign, wrap_if_compound, AlgebraError, Field, Poly, Ring};

use super::{SeriesError, Sign};

/// A power series `c_0 + c_1 t + ...` known up to `t^T`, or exactly (a
/// polynomial known in full) when `order` is `None`.
///
/// Trailing structural zeros are trimmed, so the stored vector can be
/// shorter than `T + 1`; missing coefficients up to `T` are zero.
#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<S> {
    coeffs: Vec<S>,
    order: Option<usize>,
}

/// Outcome of a valuation query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(usize),
    /// The series is exactly zero.
    Infinity,
    /// Every known coefficient up to `t^T` vanishes.
    UndeterminedAtOrder(usize),
}

impl Valuation {
    pub fn finite(self) -> Option<usize> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl<S: Ring> TruncatedSeries<S> {
    /// Builds a series from coefficients; with `order = Some(T)` anything
    /// beyond `t^T` is discarded.
    pub fn new(mut coeffs: Vec<S>, order: Option<usize>) -> Self {
        if let Some(t) = order {
            coeffs.truncate(t.saturating_add(1));
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs, order }
    }

    /// A polynomial known in full.
    pub fn exact(coeffs: Vec<S>) -> Self {
        Self::new(coeffs, None)
    }

    pub fn truncated(coeffs: Vec<S>, order: usize) -> Self {
        Self::new(coeffs, Some(order))
    }

    pub fn from_poly(p: &Poly<S>) -> Self {
        Self::exact(p.coeffs().to_vec())
    }

    pub fn constant(c: S) -> Self {
        Self::exact(vec![c])
    }

    /// The series `t`.
    pub fn var() -> Self {
        Self::exact(vec![S::zero(), S::one()])
    }

    /// `c * t^k`.
    pub fn monomial(c: S, k: usize) -> Self {
        let mut v = vec![S::zero(); k];
        v.push(c);
        Self::exact(v)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    /// Trusted order `T`, or `None` for an exact series.
    pub fn order(&self) -> Option<usize> {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    /// Highest index that can be read: the polynomial degree for exact
    /// series, `T` otherwise.
    pub fn known_degree(&self) -> usize {
        match self.order {
            Some(t) => t,
            None => self.coeffs.len().saturating_sub(1),
        }
    }

    pub fn to_poly(&self) -> Poly<S> {
        Poly::new(self.coeffs.clone())
    }

    /// Lower bound for the valuation from structural zero tests: the first
    /// stored coefficient, `T + 1` for an unknown zero, `usize::MAX` for the
    /// exact zero.
    pub fn valuation_bound(&self) -> usize {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(i) => i,
            None => match self.order {
                Some(t) => t + 1,
                None => usize::MAX,
            },
        }
    }

    /// Valuation from structural zero tests.
    pub fn valuation_structural(&self) -> Valuation {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(i) => Valuation::Finite(i),
            None => match self.order {
                Some(t) => Valuation::UndeterminedAtOrder(t),
                None => Valuation::Infinity,
            },
        }
    }

    /// Lower the trusted order to at most `t`.
    pub fn truncate(&self, t: usize) -> Self {
        let order = Some(self.order.map_or(t, |o| o.min(t)));
        Self::new(self.coeffs.clone(), order)
    }

    /// Forget exactness but keep all stored coefficients.
    pub fn with_order(&self, order: Option<usize>) -> Self {
        Self::new(self.coeffs.clone(), order)
    }

    pub fn map<R: Ring>(&self, f: impl Fn(&S) -> R) -> TruncatedSeries<R> {
        TruncatedSeries::new(self.coeffs.iter().map(f).collect(), self.order)
    }

    pub fn try_map<R: Ring, E>(&self, f: impl Fn(&S) -> Result<R, E>) -> Result<TruncatedSeries<R>, E> {
        Ok(TruncatedSeries::new(self.coeffs.iter().map(f).collect::<Result<_, _>>()?, self.order))
    }

    pub fn scale(&self, k: &S) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.mul(k)).collect(), self.order)
    }

    /// `f(sign * t^n)`, trusted to order `n * T`.
    pub fn substitute_power(&self, n: usize, sign: Sign) -> Self {
        assert!(n >= 1, "ramification must be positive");
        let mut v = vec![S::zero(); self.coeffs.len().saturating_sub(1) * n + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            v[k * n] = if sign == Sign::Minus && k % 2 == 1 { c.neg() } else { c.clone() };
        }
        Self::new(v, self.order.map(|t| t * n))
    }

    /// `f / t^m`, trusted to order `T - m`.
    pub fn shift_divide(&self, m: usize) -> Result<Self, SeriesError> {
        if let Some(i) = self.coeffs.iter().position(|c| !c.is_zero()) {
            if i < m {
                return Err(SeriesError::InsufficientValuation { valuation: i, required: m });
            }
        } else if let Some(t) = self.order {
            if t + 1 < m {
                return Err(SeriesError::UndeterminedAtOrder(t));
            }
        }
        let coeffs = self.coeffs.iter().skip(m).cloned().collect();
        Ok(Self::new(coeffs, self.order.map(|t| t.saturating_sub(m))))
    }

    /// Multiply by `t^m`.
    pub fn shift_up(&self, m: usize) -> Self {
        if self.coeffs.is_empty() {
            return Self::new(Vec::new(), self.order.map(|t| t + m));
        }
        let mut v = vec![S::zero(); m];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v, self.order.map(|t| t + m))
    }

    /// Formal derivative; the trusted order drops by one.
    pub fn derivative(&self) -> Self {
        let v = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.mul(&S::from_i64(k as i64))).collect();
        Self::new(v, self.order.map(|t| t.saturating_sub(1)))
    }

    /// Value of the known part at `x` (exact for exact series).
    pub fn eval(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// `f(g(t))` for `g(0) = 0`.
    pub fn compose(&self, g: &Self) -> Self {
        assert!(g.coeff(0).is_zero(), "composition requires g(0) = 0");
        let mut acc = Self::new(Vec::new(), None);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_series(g).add_series(&Self::constant(c.clone()));
        }
        match self.order {
            // Terms beyond T contribute from t^(T+1) * v(g) onwards.
            Some(t) => acc.truncate((t + 1) * g.valuation_bound().max(1) - 1),
            None => acc,
        }
    }

    pub fn add_series(&self, o: &Self) -> Self {
        let order = min_order(self.order, o.order);
        let n = self.coeffs.len().max(o.coeffs.len());
        let n = order.map_or(n, |t| n.min(t + 1));
        let v = (0..n)
            .map(|i| match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => S::zero(),
            })
            .collect();
        Self::new(v, order)
    }

    pub fn neg_series(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.neg()).collect(), order: self.order }
    }

    pub fn sub_series(&self, o: &Self) -> Self {
        self.add_series(&o.neg_series())
    }

    pub fn mul_series(&self, o: &Self) -> Self {
        let exact_zero = |x: &Self| x.order.is_none() && x.coeffs.is_empty();
        if exact_zero(self) || exact_zero(o) {
            return Self::zero();
        }
        let va = self.valuation_bound();
        let vb = o.valuation_bound();
        let order = match (self.order, o.order) {
            (None, None) => None,
            (Some(ta), None) => Some(ta.saturating_add(vb)),
            (None, Some(tb)) => Some(tb.saturating_add(va)),
            (Some(ta), Some(tb)) => Some(ta.saturating_add(vb).min(tb.saturating_add(va))),
        };
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Self::new(Vec::new(), order);
        }
        let full = self.coeffs.len() + o.coeffs.len() - 1;
        let n = order.map_or(full, |t| full.min(t + 1));
        let mut v = vec![S::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= n {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                v[i + j] = v[i + j].add(&a.mul(b));
            }
        }
        Self::new(v, order)
    }
}

impl<S: Field> TruncatedSeries<S> {
    /// Valuation with zero tests that are sound over residue rings; may
    /// raise a split request.
    pub fn valuation(&self) -> Result<Valuation, AlgebraError> {
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero_checked()? {
                return Ok(Valuation::Finite(i));
            }
        }
        Ok(match self.order {
            Some(t) => Valuation::UndeterminedAtOrder(t),
            None => Valuation::Infinity,
        })
    }

    /// `f^alpha` for `f(0) = 1` and rational `alpha = num/den`, by the
    /// recurrence `n f_0 g_n = sum_{k=1..n} ((alpha+1)k - n) f_k g_(n-k)`.
    /// Exact inputs yield a series trusted to `order`.
    pub fn rational_power(&self, num: i64, den: i64, order: usize) -> Result<Self, AlgebraError> {
        assert!(self.coeff(0).is_one(), "rational power needs constant term 1");
        let t = self.order.map_or(order, |o| o.min(order));
        let inv_den = S::from_i64(den).inv()?;
        let mut g: Vec<S> = vec![S::one()];
        for n in 1..=t {
            let mut acc = S::zero();
            for k in 1..=n {
                let fk = self.coeff(k);
                if fk.is_zero() {
                    continue;
                }
                // ((alpha + 1) k - n) = ((num + den) k - n den) / den
                let w = S::from_i64((num + den) * k as i64 - n as i64 * den);
                acc = acc.add(&w.mul(&fk).mul(&g[n - k]));
            }
            g.push(acc.mul(&inv_den).mul(&S::from_i64(n as i64).inv()?));
        }
        Ok(Self::truncated(g, t))
    }

    /// Multiplicative inverse of a series with invertible constant term.
    pub fn inverse(&self, order: usize) -> Result<Self, AlgebraError> {
        let t = self.order.map_or(order, |o| o.min(order));
        let c0inv = self.coeff(0).inv()?;
        let mut g = vec![c0inv.clone()];
        for n in 1..=t {
            let mut acc = S::zero();
            for k in 1..=n {
                acc = acc.add(&self.coeff(k).mul(&g[n - k]));
            }
            g.push(acc.neg().mul(&c0inv));
        }
        Ok(Self::truncated(g, t))
    }
}

fn min_order(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

impl<S: Ring> Ring for TruncatedSeries<S> {
    fn zero() -> Self {
        Self::new(Vec::new(), None)
    }
    fn one() -> Self {
        Self::constant(S::one())
    }
    fn is_zero(&self) -> bool {
        self.order.is_none() && self.coeffs.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        self.add_series(o)
    }
    fn sub(&self, o: &Self) -> Self {
        self.sub_series(o)
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_series(o)
    }
    fn neg(&self) -> Self {
        self.neg_series()
    }
    fn from_i64(n: i64) -> Self {
        Self::constant(S::from_i64(n))
    }
}

impl<S: Ring + fmt::Display> TruncatedSeries<S> {
    /// Render in ascending powers of `var`, ending with `O(var^(T+1))` unless
    /// the series is exact.
    pub fn fmt_var(&self, var: &str) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
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
        if let Some(t) = self.order {
            let o = if t == 0 { format!("O({var})") } else { format!("O({var}^{})", t + 1) };
            if out.is_empty() {
                out = o;
            } else {
                out.push_str(" + ");
                out.push_str(&o);
            }
        } else if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl<S: Ring + fmt::Display> fmt::Display for TruncatedSeries<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_var("t"))
    }
}

impl<S: Ring> fmt::Debug for TruncatedSeries<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order {
            Some(t) => write!(f, "{:?} + O(t^{})", self.coeffs, t + 1),
            None => write!(f, "{:?}", self.coeffs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GaussianRational as G;

    fn s(c: &[i64], order: Option<usize>) -> TruncatedSeries<G> {
        TruncatedSeries::new(c.iter().map(|&x| G::from_int(x)).collect(), order)
    }

    #[test]
    fn valuation_cases() {
        assert_eq!(s(&[0, 0, 0, 1, 0, 1], None).valuation().unwrap(), Valuation::Finite(3));
        assert_eq!(s(&[], None).valuation().unwrap(), Valuation::Infinity);
        assert_eq!(s(&[0, 0, 0], Some(6)).valuation().unwrap(), Valuation::UndeterminedAtOrder(6));
    }

    #[test]
    fn substitute_power_examples() {
        assert_eq!(s(&[0, 1], None).substitute_power(2, Sign::Plus), s(&[0, 0, 1], None));
        assert_eq!(s(&[1, 0, 0, -1], None).substitute_power(2, Sign::Minus), s(&[1, 0, 0, 0, 0, 0, 1], None));
        assert_eq!(s(&[0, 1], None).substitute_power(1, Sign::Minus), s(&[0, -1], None));
        assert_eq!(s(&[1, 2], Some(3)).substitute_power(2, Sign::Plus).order(), Some(6));
    }

    #[test]
    fn shift_divide_examples() {
        assert_eq!(s(&[0, 0, 0, 1], None).shift_divide(2).unwrap(), s(&[0, 1], None));
        assert_eq!(s(&[0, 0, 1, 0, 1], None).shift_divide(2).unwrap(), s(&[1, 0, 1], None));
        assert!(matches!(
            s(&[0, 1], None).shift_divide(2),
            Err(SeriesError::InsufficientValuation { valuation: 1, required: 2 })
        ));
        assert!(matches!(s(&[], Some(0)).shift_divide(3), Err(SeriesError::UndeterminedAtOrder(0))));
        assert_eq!(s(&[0, 0, 5], Some(4)).shift_divide(2).unwrap().order(), Some(2));
    }

    #[test]
    fn truncated_product_order() {
        // (t + O(t^4)) * (t^2 + O(t^3)): order min(3 + 2, 2 + 1) = 3
        let a = s(&[0, 1], Some(3));
        let b = s(&[0, 0, 1], Some(2));
        assert_eq!(a.mul(&b).order(), Some(3));
        assert_eq!(a.mul(&b).coeffs(), &[G::zero(), G::zero(), G::zero(), G::one()]);
    }

    #[test]
    fn square_root_of_one_plus_t() {
        // sqrt(1+t) = 1 + t/2 - t^2/8 + t^3/16 - ...
        let f = s(&[1, 1], None);
        let g = f.rational_power(1, 2, 4).unwrap();
        assert_eq!(g.coeff(1), G::from_ratio(1, 2));
        assert_eq!(g.coeff(2), G::from_ratio(-1, 8));
        assert_eq!(g.coeff(3), G::from_ratio(1, 16));
        assert_eq!(g.mul(&g).truncate(4), s(&[1, 1], Some(4)));
    }

    #[test]
    fn display_format() {
        assert_eq!(s(&[1, -2, 0, 3], Some(4)).fmt_var("s"), "1 - 2*s + 3*s^3 + O(s^5)");
        assert_eq!(s(&[], Some(2)).fmt_var("s"), "O(s^3)");
        assert_eq!(s(&[], None).fmt_var("s"), "0");
    }
}
