//! Eigenvalue lifting for curves of square matrices under conjugation.
//!
//! The invariants of the adjoint action are the coefficients of the
//! characteristic polynomial, so a matrix curve maps to a `Symmetric(m)`
//! curve and its lifts are curves of eigenvalue tuples.

use num_rational::BigRational;
use thiserror::Error;

use crate::algebra::linalg::charpoly;
use crate::algebra::parse::{parse_poly, ParseError};
use crate::algebra::{GaussianRational as G, Poly};
use crate::global::{ac_certificate, glue_global, AcCertificate, GlobalLift, RootValue};
use crate::numeric::interval::{eval_poly_interval, ComplexInterval};
use crate::quotient::MonicCurve;
use crate::regularity::{differentiable_lift, DerivativeCertificate, FlatnessReport, RegularityError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix must be square, row {row} has {got} entries for size {size}")]
    NotSquare { row: usize, got: usize, size: usize },
    #[error("empty matrix")]
    Empty,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A square matrix with polynomial entries in `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixCurve {
    pub entries: Vec<Vec<Poly<G>>>,
}

impl MatrixCurve {
    pub fn new(entries: Vec<Vec<Poly<G>>>) -> Result<Self, MatrixError> {
        let m = entries.len();
        if m == 0 {
            return Err(MatrixError::Empty);
        }
        for (row, r) in entries.iter().enumerate() {
            if r.len() != m {
                return Err(MatrixError::NotSquare { row: row + 1, got: r.len(), size: m });
            }
        }
        Ok(Self { entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Parses a row-major matrix: rows separated by newlines or `;`,
    /// entries by `,`. Enclosing brackets such as `[[0, t], [t, 0]]` are
    /// accepted.
    pub fn parse(src: &str) -> Result<Self, MatrixError> {
        let s = src.trim();
        let rows: Vec<String> = if s.starts_with("[[") {
            let inner = s.strip_prefix('[').and_then(|x| x.strip_suffix(']')).unwrap_or(s);
            inner.split(']').map(|r| r.trim_start_matches([',', ' ', '\n', '\t', '[']).to_string()).filter(|r| !r.trim().is_empty()).collect()
        } else {
            s.split(['\n', ';']).map(|r| r.to_string()).filter(|r| !r.trim().is_empty()).collect()
        };
        let entries = rows
            .iter()
            .map(|r| r.split(',').map(|e| parse_poly(e.trim(), "t")).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(entries)
    }

    /// `A(t)` at a Gaussian rational.
    pub fn at(&self, t: &G) -> Vec<Vec<G>> {
        self.entries.iter().map(|r| r.iter().map(|e| e.eval(t)).collect()).collect()
    }

    /// `P A P^-1` for a constant invertible `P`, given with its inverse.
    pub fn conjugate(&self, p: &[Vec<G>], p_inv: &[Vec<G>]) -> Self {
        let m = self.size();
        let lift = |x: &[Vec<G>]| -> Vec<Vec<Poly<G>>> { x.iter().map(|r| r.iter().map(|c| Poly::constant(c.clone())).collect()).collect() };
        let mul = |a: &[Vec<Poly<G>>], b: &[Vec<Poly<G>>]| -> Vec<Vec<Poly<G>>> {
            (0..m)
                .map(|i| (0..m).map(|j| (0..m).fold(Poly::zero(), |acc, k| acc.add_poly(&a[i][k].mul_poly(&b[k][j])))).collect())
                .collect()
        };
        Self { entries: mul(&mul(&lift(p), &self.entries), &lift(p_inv)) }
    }
}

impl std::fmt::Display for MatrixCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|e| e.fmt_var("t")).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// The `Symmetric(m)` curve of `det(z I - A(t))`.
pub fn charpoly_curve(a: &MatrixCurve) -> MonicCurve {
    MonicCurve::from_monic(&charpoly(&a.entries))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenMode {
    Continuous,
    Ac,
    Differentiable,
}

/// A lift of the eigenvalues with what the mode certifies.
#[derive(Clone, Debug)]
pub struct EigenLift {
    pub lift: GlobalLift,
    pub ac: Option<AcCertificate>,
    pub report: Option<FlatnessReport>,
    pub derivatives: Option<Vec<DerivativeCertificate>>,
}

pub fn eigen_lift(
    a: &MatrixCurve,
    lo: &BigRational,
    hi: &BigRational,
    order: usize,
    mode: EigenMode,
) -> Result<EigenLift, RegularityError> {
    let c = charpoly_curve(a);
    match mode {
        EigenMode::Continuous => Ok(EigenLift { lift: glue_global(&c, lo, hi, order)?, ac: None, report: None, derivatives: None }),
        EigenMode::Ac => {
            let lift = glue_global(&c, lo, hi, order)?;
            Ok(EigenLift { ac: Some(ac_certificate(&lift)), lift, report: None, derivatives: None })
        }
        EigenMode::Differentiable => {
            let d = differentiable_lift(&c, lo, hi, order)?;
            Ok(EigenLift { lift: d.lift, ac: None, report: Some(d.report), derivatives: Some(d.derivatives) })
        }
    }
}

/// Exact spectral check: the defining polynomial of the eigenvalue divides
/// `det(z I - A(t))`, computed from `A(t)` directly.
pub fn spectral_check_exact(a: &MatrixCurve, t: &G, value: &RootValue) -> bool {
    let p = charpoly(&a.at(t));
    p.rem(&value.poly).map(|r| r.is_zero()).unwrap_or(false)
}

/// Enclosure of `det(lambda I - A(t))` at an enclosure of the eigenvalue.
pub fn spectral_residual(a: &MatrixCurve, t: &G, value: &RootValue, width: &BigRational) -> ComplexInterval {
    let p = charpoly(&a.at(t));
    eval_poly_interval(p.coeffs(), &value.enclosure(width), 256)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularity::RegularityError;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn comps(c: &MonicCurve) -> Vec<String> {
        c.components.iter().map(|x| x.fmt_var("t")).collect()
    }

    #[test]
    fn charpoly_examples() {
        let a = MatrixCurve::parse("[[0, t], [t, 0]]").unwrap();
        assert_eq!(comps(&charpoly_curve(&a)), vec!["0", "-t^2"]);
        let a = MatrixCurve::parse("1, 0; 0, 2").unwrap();
        assert_eq!(comps(&charpoly_curve(&a)), vec!["3", "2"]);
        let a = MatrixCurve::parse("0, 1\nt, 0").unwrap();
        assert_eq!(comps(&charpoly_curve(&a)), vec!["0", "-t"]);
    }

    #[test]
    fn conjugation_invariance() {
        let a = MatrixCurve::parse("t, 1; t^2, 3").unwrap();
        let p = vec![vec![G::from_int(1), G::from_int(2)], vec![G::from_int(0), G::from_int(1)]];
        let p_inv = vec![vec![G::from_int(1), G::from_int(-2)], vec![G::from_int(0), G::from_int(1)]];
        assert_eq!(charpoly_curve(&a.conjugate(&p, &p_inv)), charpoly_curve(&a));
    }

    #[test]
    fn eigen_examples() {
        let a = MatrixCurve::parse("[[0, t], [t, 0]]").unwrap();
        let l = eigen_lift(&a, &q(-1), &q(1), 8, EigenMode::Differentiable).unwrap();
        let v = l.lift.eval(&BigRational::new(1.into(), 3.into())).unwrap();
        let mut vals: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        vals.sort();
        assert_eq!(vals, vec!["-1/3", "1/3"]);
        let a = MatrixCurve::parse("[[0, 1], [t, 0]]").unwrap();
        assert!(matches!(eigen_lift(&a, &q(-1), &q(1), 8, EigenMode::Differentiable), Err(RegularityError::NotOneFlat(_))));
        let a = MatrixCurve::parse("[[1, 0], [0, 2]]").unwrap();
        let l = eigen_lift(&a, &q(-1), &q(1), 8, EigenMode::Ac).unwrap();
        let v = l.lift.eval(&q(0)).unwrap();
        assert!(v.iter().all(|x| spectral_check_exact(&a, &G::from_int(0), x)));
        assert_eq!(l.ac.unwrap().total_variation, vec![0.0, 0.0]);
    }
}
