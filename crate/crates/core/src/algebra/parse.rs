//! Parser for exact scalar, polynomial and series literals.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr    := sign? term (("+" | "-") term)*
//! term    := factor (("*" factor) | ("/" number))*
//! factor  := primary ("^" integer)?
//! primary := number | "i" | variable | "(" expr ")"
//! number  := digits ("/" digits)? "i"?
//! ```
//!
//! `1/3i` reads as `i/3`. At the top level one order term `O(v^k)` may be
//! added; it marks a truncated series known below `v^k`. Decimal points are
//! rejected: every literal must be an exact rational.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use super::{GaussianRational as G, Modulus, Poly, Ring, Scalar};
use crate::series::TruncatedSeries;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub message: String,
    pub position: usize,
}

fn err<T>(message: impl Into<String>, position: usize) -> Result<T, ParseError> {
    Err(ParseError { message: message.into(), position })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational, bool),
    I,
    Var(usize),
    Order,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str, vars: &[&str]) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j < bytes.len() && bytes[j] == b'.' {
                return err("floating-point literals are not accepted", j);
            }
            let num: BigInt = src[i..j].parse().expect("digits");
            let mut value = BigRational::from_integer(num);
            if j + 1 < bytes.len() && bytes[j] == b'/' && bytes[j + 1].is_ascii_digit() {
                let mut k = j + 1;
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                if k < bytes.len() && bytes[k] == b'.' {
                    return err("floating-point literals are not accepted", k);
                }
                let den: BigInt = src[j + 1..k].parse().expect("digits");
                if den.is_zero() {
                    return err("zero denominator", j + 1);
                }
                value /= BigRational::from_integer(den);
                j = k;
            }
            let imag = j < bytes.len() && bytes[j] == b'i' && !is_ident(bytes.get(j + 1));
            if imag {
                j += 1;
            }
            out.push((Tok::Num(value, imag), start));
            i = j;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut j = i;
            while j < bytes.len() && (bytes[j] as char).is_ascii_alphanumeric() {
                j += 1;
            }
            let word = &src[i..j];
            let tok = if word == "i" {
                Tok::I
            } else if word == "O" {
                Tok::Order
            } else if let Some(v) = vars.iter().position(|v| *v == word) {
                Tok::Var(v)
            } else {
                return err(format!("unknown symbol `{word}`"), i);
            };
            out.push((tok, start));
            i = j;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '.' => return err("floating-point literals are not accepted", i),
            _ => return err(format!("unexpected character `{c}`"), i),
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

fn is_ident(b: Option<&u8>) -> bool {
    b.is_some_and(|b| b.is_ascii_alphanumeric())
}

/// Sparse multivariate polynomial keyed by exponent vectors.
type Multi = BTreeMap<Vec<u32>, G>;

fn mul_multi(a: &Multi, b: &Multi) -> Multi {
    let mut out = Multi::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let entry = out.entry(e).or_insert_with(G::zero);
            *entry = entry.add(&ca.mul(cb));
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn add_multi(a: &mut Multi, b: &Multi, negate: bool) {
    for (e, c) in b {
        let entry = a.entry(e.clone()).or_insert_with(G::zero);
        *entry = if negate { entry.sub(c) } else { entry.add(c) };
    }
    a.retain(|_, c| !c.is_zero());
}

fn constant_multi(c: G, nvars: usize) -> Multi {
    let mut m = Multi::new();
    if !c.is_zero() {
        m.insert(vec![0; nvars], c);
    }
    m
}

/// Result of parsing an expression: the polynomial part and, if present,
/// the order term `O(var^k)` as `(var index, k)`.
#[derive(Debug, Clone)]
pub struct Parsed {
    terms: Multi,
    order: Option<(usize, u32)>,
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    nvars: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            err(format!("expected {t:?}"), self.here())
        }
    }

    fn expr(&mut self, top: bool) -> Result<Parsed, ParseError> {
        let mut acc = Multi::new();
        let mut order = None;
        let mut negate = false;
        match self.peek() {
            Some(Tok::Minus) => {
                negate = true;
                self.pos += 1;
            }
            Some(Tok::Plus) => self.pos += 1,
            _ => {}
        }
        loop {
            if self.peek() == Some(&Tok::Order) {
                if !top {
                    return err("order term only allowed at top level", self.here());
                }
                if order.is_some() {
                    return err("repeated order term", self.here());
                }
                if negate {
                    return err("order term cannot be negated", self.here());
                }
                order = Some(self.order_term()?);
            } else {
                if order.is_some() {
                    return err("order term must come last", self.here());
                }
                let t = self.term()?;
                add_multi(&mut acc, &t, negate);
            }
            match self.peek() {
                Some(Tok::Plus) => negate = false,
                Some(Tok::Minus) => negate = true,
                _ => break,
            }
            self.pos += 1;
        }
        Ok(Parsed { terms: acc, order })
    }

    fn order_term(&mut self) -> Result<(usize, u32), ParseError> {
        self.expect(Tok::Order)?;
        self.expect(Tok::LParen)?;
        let v = match self.peek() {
            Some(Tok::Var(v)) => *v,
            _ => return err("expected a variable inside O(...)", self.here()),
        };
        self.pos += 1;
        let k = if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            self.exponent()?
        } else {
            1
        };
        self.expect(Tok::RParen)?;
        if k == 0 {
            return err("order term must have positive exponent", self.here());
        }
        Ok((v, k))
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let at = self.here();
        match self.peek() {
            Some(Tok::Num(q, false)) if q.is_integer() => {
                let q = q.clone();
                self.pos += 1;
                u32::try_from(q.to_integer()).or_else(|_| err("exponent too large", at))
            }
            _ => err("expected a nonnegative integer exponent", at),
        }
    }

    fn term(&mut self) -> Result<Multi, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = mul_multi(&acc, &f);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.here();
                    let d = match self.peek() {
                        Some(Tok::Num(q, imag)) => {
                            let g = if *imag { G::new(BigRational::zero(), q.clone()) } else { G::from_real(q.clone()) };
                            self.pos += 1;
                            g
                        }
                        Some(Tok::I) => {
                            self.pos += 1;
                            G::i()
                        }
                        _ => return err("division is only allowed by a number", at),
                    };
                    let inv = super::Field::inv(&d).or_else(|_| err("division by zero", at))?;
                    acc = mul_multi(&acc, &constant_multi(inv, self.nvars));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Multi, ParseError> {
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = self.exponent()?;
            let mut acc = constant_multi(G::one(), self.nvars);
            for _ in 0..e {
                acc = mul_multi(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Multi, ParseError> {
        let at = self.here();
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Num(q, imag)) => {
                self.pos += 1;
                let g = if imag { G::new(BigRational::zero(), q) } else { G::from_real(q) };
                Ok(constant_multi(g, self.nvars))
            }
            Some(Tok::I) => {
                self.pos += 1;
                Ok(constant_multi(G::i(), self.nvars))
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                let mut e = vec![0; self.nvars];
                e[v] = 1;
                Ok(Multi::from([(e, G::one())]))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr(false)?;
                self.expect(Tok::RParen)?;
                Ok(inner.terms)
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                let inner = self.factor()?;
                Ok(mul_multi(&inner, &constant_multi(G::from_int(-1), self.nvars)))
            }
            _ => err("expected a number, variable or parenthesis", at),
        }
    }
}

/// Parses `src` as a polynomial in the variables `vars`, with an optional
/// top-level order term.
pub fn parse_expr(src: &str, vars: &[&str]) -> Result<Parsed, ParseError> {
    let toks = tokenize(src, vars)?;
    if toks.is_empty() {
        return err("empty expression", 0);
    }
    let mut p = Parser { toks: &toks, pos: 0, nvars: vars.len(), end: src.len() };
    let out = p.expr(true)?;
    if p.pos != toks.len() {
        return err("trailing input", p.here());
    }
    Ok(out)
}

impl Parsed {
    /// Coefficient map for a single variable (index 0).
    fn univariate(&self) -> Vec<G> {
        let deg = self.terms.keys().map(|e| e[0] as usize).max();
        let mut out = vec![G::zero(); deg.map_or(0, |d| d + 1)];
        for (e, c) in &self.terms {
            out[e[0] as usize] = c.clone();
        }
        out
    }
}

pub fn parse_rational(src: &str) -> Result<BigRational, ParseError> {
    let g = parse_gaussian(src)?;
    if !g.is_real() {
        return err("expected a real rational", 0);
    }
    Ok(g.re)
}

pub fn parse_gaussian(src: &str) -> Result<G, ParseError> {
    let p = parse_expr(src, &[])?;
    if p.order.is_some() {
        return err("order term not allowed in a scalar", 0);
    }
    Ok(p.terms.get(&Vec::new()).cloned().unwrap_or_else(G::zero))
}

pub fn parse_poly(src: &str, var: &str) -> Result<Poly<G>, ParseError> {
    let p = parse_expr(src, &[var])?;
    if p.order.is_some() {
        return err("order term not allowed in a polynomial", 0);
    }
    Ok(Poly::new(p.univariate()))
}

/// Parses a series in `var`; without an order term the series is exact.
pub fn parse_series(src: &str, var: &str) -> Result<TruncatedSeries<G>, ParseError> {
    let p = parse_expr(src, &[var])?;
    let coeffs = p.univariate();
    Ok(match p.order {
        Some((_, k)) => TruncatedSeries::truncated(coeffs, k as usize - 1),
        None => TruncatedSeries::exact(coeffs),
    })
}

/// Parses a series in `var` whose coefficients are residues in `gen`
/// modulo `modulus`, e.g. `w + (1 - w)*s + O(s^3)`.
pub fn parse_series_over(
    src: &str,
    var: &str,
    gen: &str,
    modulus: Option<&Arc<Modulus>>,
) -> Result<TruncatedSeries<Scalar>, ParseError> {
    let p = parse_expr(src, &[var, gen])?;
    if let Some((v, _)) = p.order {
        if v != 0 {
            return err("order term must be in the series variable", 0);
        }
    }
    let deg = p.terms.keys().map(|e| e[0] as usize).max().map_or(0, |d| d + 1);
    let mut residues: Vec<Vec<G>> = vec![Vec::new(); deg];
    for (e, c) in &p.terms {
        let r = &mut residues[e[0] as usize];
        let k = e[1] as usize;
        if r.len() <= k {
            r.resize(k + 1, G::zero());
        }
        r[k] = c.clone();
    }
    let mut coeffs = Vec::with_capacity(deg);
    for r in residues {
        let poly = Poly::new(r);
        let s = match modulus {
            Some(m) => Scalar::from_residue(poly, m),
            None if poly.deg() == 0 => Scalar::gaussian(poly.coeff(0)),
            None => return err(format!("`{gen}` used without a field modulus"), 0),
        };
        coeffs.push(s);
    }
    Ok(match p.order {
        Some((_, k)) => TruncatedSeries::truncated(coeffs, k as usize - 1),
        None => TruncatedSeries::exact(coeffs),
    })
}

/// Parses a polynomial in `outer` whose coefficients are polynomials in
/// `inner`, e.g. `z^2 - t`.
pub fn parse_bivariate(src: &str, outer: &str, inner: &str) -> Result<Poly<Poly<G>>, ParseError> {
    let p = parse_expr(src, &[outer, inner])?;
    if p.order.is_some() {
        return err("order term not allowed here", 0);
    }
    let deg = p.terms.keys().map(|e| e[0] as usize).max().map_or(0, |d| d + 1);
    let mut rows: Vec<Vec<G>> = vec![Vec::new(); deg];
    for (e, c) in &p.terms {
        let r = &mut rows[e[0] as usize];
        let k = e[1] as usize;
        if r.len() <= k {
            r.resize(k + 1, G::zero());
        }
        r[k] = c.clone();
    }
    Ok(Poly::new(rows.into_iter().map(Poly::new).collect()))
}

impl std::str::FromStr for G {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_gaussian(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_literals() {
        assert_eq!(parse_gaussian("3/2+1/3i").unwrap().to_string(), "3/2+1/3i");
        assert_eq!(parse_gaussian("-i").unwrap(), G::i().neg());
        assert_eq!(parse_gaussian("(1+2i)*(1-2i)").unwrap(), G::from_int(5));
        assert_eq!(parse_gaussian("2i/4").unwrap().to_string(), "1/2i");
    }

    #[test]
    fn floats_are_rejected() {
        assert!(parse_gaussian("0.5").is_err());
        assert!(parse_poly("1.0*z", "z").is_err());
    }

    #[test]
    fn polynomial_round_trip() {
        let p = parse_poly("z^2 - (1+2i)*z + 4", "z").unwrap();
        assert_eq!(p.to_string(), "z^2 + (-1-2i)*z + 4");
        assert_eq!(parse_poly(&p.to_string(), "z").unwrap(), p);
    }

    #[test]
    fn series_with_order() {
        let s = parse_series("1 - 2*s + 3*s^3 + O(s^5)", "s").unwrap();
        assert_eq!(s.order(), Some(4));
        assert_eq!(s.fmt_var("s"), "1 - 2*s + 3*s^3 + O(s^5)");
        let e = parse_series("t^2 - t", "t").unwrap();
        assert!(e.is_exact());
        assert!(parse_series("O(s) + 1", "s").is_err());
    }

    #[test]
    fn unknown_symbols_fail() {
        assert!(parse_poly("x + 1", "z").is_err());
        assert!(parse_poly("z/z", "z").is_err());
    }
}
