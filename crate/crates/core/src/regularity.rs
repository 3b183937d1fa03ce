//! Differentiable lifts: the 1-flatness test at contact points and the
//! construction of global differentiable lifts when it passes.
//!
//! At a contact point the roots are split into clusters that coincide
//! there. A cluster of size `k` recentered at its mean has components
//! `c_2, ..., c_k`; the curve is 1-flat at the point when `v(c_j) >= j` for
//! every cluster and every `j`.

use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::global::{exceptional_points, glue, piece_derivatives, GlobalError, GlobalLift, PointValue, Side};
use crate::lifting::{slice_split_at, whole_cluster_at, LiftError, SliceCluster};
use crate::quotient::{MonicCurve, RepresentationSpec};
use crate::series::{BasePoint, Valuation};

/// Verdict for one cluster at a contact point.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterReport {
    /// Value of the cluster center at the point.
    pub center: String,
    pub size: usize,
    /// Conjugate copies represented by this cluster.
    pub multiplicity: usize,
    /// `(j, v(c_j))` for `j = 2..=size`.
    pub valuations: Vec<(usize, Valuation)>,
    /// First `j` with `v(c_j) < j`.
    pub failing: Option<usize>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContactReport {
    pub point: BasePoint,
    pub clusters: Vec<ClusterReport>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatnessReport {
    pub contact_points: Vec<ContactReport>,
    pub overall: bool,
    /// Largest slice degree; `n` for `Symmetric(n)`.
    pub max_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegularityError {
    #[error("the curve is not 1-flat")]
    NotOneFlat(Box<FlatnessReport>),
    #[error(transparent)]
    Global(#[from] GlobalError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

fn cluster_report(cl: &SliceCluster, order: usize) -> Result<ClusterReport, LiftError> {
    let mut valuations = Vec::new();
    let mut failing = None;
    for (idx, comp) in cl.components.iter().enumerate().skip(1) {
        let j = idx + 1;
        let v = comp.valuation_structural();
        let ok = match v {
            Valuation::Infinity => true,
            Valuation::Finite(x) => x >= j,
            Valuation::UndeterminedAtOrder(t) => {
                if t + 1 < j {
                    return Err(LiftError::NonflatUndetermined(order.max(t)));
                }
                true
            }
        };
        if !ok && failing.is_none() {
            failing = Some(j);
        }
        valuations.push((j, v));
    }
    Ok(ClusterReport {
        center: cl.center.coeff(0).to_string(),
        size: cl.size(),
        multiplicity: cl.multiplicity,
        valuations,
        pass: failing.is_none(),
        failing,
    })
}

/// Tests 1-flatness of a `Symmetric(n)` curve at `point`.
pub fn one_flat_test(c: &MonicCurve, point: &BasePoint, order: usize) -> Result<ContactReport, LiftError> {
    let clusters = match slice_split_at(c, point, order) {
        Ok(cl) => cl,
        Err(LiftError::NotSplittable) if c.components.iter().all(|x| x.is_exact() && x.to_poly().is_zero()) => Vec::new(),
        Err(LiftError::NotSplittable) => vec![whole_cluster_at(c, point)?],
        Err(e) => return Err(e),
    };
    let clusters = clusters.iter().map(|cl| cluster_report(cl, order)).collect::<Result<Vec<_>, _>>()?;
    let pass = clusters.iter().all(|c| c.pass);
    Ok(ContactReport { point: point.clone(), clusters, pass })
}

fn max_degree(c: &MonicCurve) -> usize {
    match c.rep {
        RepresentationSpec::Symmetric(n) => n,
        _ => c.rep.degrees().into_iter().max().unwrap_or(0),
    }
}

/// 1-flatness at every exceptional point of an exact curve in `[lo, hi]`.
pub fn flatness_report(c: &MonicCurve, lo: &BigRational, hi: &BigRational, order: usize) -> Result<FlatnessReport, RegularityError> {
    let ex = exceptional_points(c, lo, hi)?;
    let contact_points = ex
        .base_points()
        .iter()
        .map(|p| one_flat_test(c, p, order))
        .collect::<Result<Vec<_>, _>>()?;
    let overall = contact_points.iter().all(|p| p.pass);
    Ok(FlatnessReport { contact_points, overall, max_degree: max_degree(c) })
}

/// Report for a single point, for curves given only as germs.
pub fn point_report(c: &MonicCurve, point: &BasePoint, order: usize) -> Result<FlatnessReport, LiftError> {
    let entry = one_flat_test(c, point, order)?;
    Ok(FlatnessReport { overall: entry.pass, contact_points: vec![entry], max_degree: max_degree(c) })
}

/// Derivatives of every root at a contact point, in the glued order of the
/// piece to its right (or the two-sided piece based there).
#[derive(Clone, Debug)]
pub struct DerivativeCertificate {
    pub point: BasePoint,
    pub values: Vec<PointValue>,
}

#[derive(Clone, Debug)]
pub struct DifferentiableLift {
    pub lift: GlobalLift,
    pub report: FlatnessReport,
    pub derivatives: Vec<DerivativeCertificate>,
}

/// Global differentiable lift of an exact curve over `[lo, hi]`, or the
/// report showing where 1-flatness fails.
pub fn differentiable_lift(
    c: &MonicCurve,
    lo: &BigRational,
    hi: &BigRational,
    order: usize,
) -> Result<DifferentiableLift, RegularityError> {
    let report = flatness_report(c, lo, hi, order)?;
    if !report.overall {
        return Err(RegularityError::NotOneFlat(Box::new(report)));
    }
    let lift = glue(c, lo, hi, order, true)?;
    let mut derivatives = Vec::new();
    for point in lift.exceptional.base_points() {
        let piece = lift
            .pieces
            .iter()
            .find(|p| p.exceptional && p.base_point == point && p.side != Side::Left)
            .or_else(|| lift.pieces.iter().find(|p| p.exceptional && p.base_point == point));
        // Irrational points may have been refined to a factor of their
        // defining polynomial.
        let piece = piece.or_else(|| {
            lift.pieces.iter().find(|p| {
                p.exceptional && p.side != Side::Left && same_point(&p.base_point, &point)
            })
        });
        let Some(piece) = piece else { continue };
        let values = piece_derivatives(piece).ok_or_else(|| GlobalError::DerivativeMismatch(point.to_string()))?;
        derivatives.push(DerivativeCertificate { point, values });
    }
    Ok(DifferentiableLift { lift, report, derivatives })
}

fn same_point(a: &BasePoint, b: &BasePoint) -> bool {
    match (a, b) {
        (BasePoint::Algebraic(x), BasePoint::Algebraic(y)) => x.lo < y.hi && y.lo < x.hi,
        _ => a == b,
    }
}

impl fmt::Display for FlatnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "point | cluster | k | valuation | required | verdict")?;
        for p in &self.contact_points {
            for (i, cl) in p.clusters.iter().enumerate() {
                if cl.valuations.is_empty() {
                    writeln!(f, "{} | {} | - | - | - | pass", p.point, i + 1)?;
                }
                for (j, v) in &cl.valuations {
                    let verdict = if cl.failing == Some(*j) {
                        "fail"
                    } else if v.finite().is_some_and(|x| x < *j) {
                        "fail"
                    } else {
                        "pass"
                    };
                    writeln!(f, "{} | {} | {} | {} | {} | {}", p.point, i + 1, j, fmt_valuation(v), j, verdict)?;
                }
            }
        }
        writeln!(f, "max degree: {}", self.max_degree)?;
        write!(f, "overall: {}", if self.overall { "pass" } else { "fail" })
    }
}

fn fmt_valuation(v: &Valuation) -> String {
    match v {
        Valuation::Finite(x) => x.to_string(),
        Valuation::Infinity => "inf".into(),
        Valuation::UndeterminedAtOrder(t) => format!(">{t}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_series;
    use num_traits::Zero;

    fn curve(comps: &[&str]) -> MonicCurve {
        let comps: Vec<_> = comps.iter().map(|c| parse_series(c, "t").unwrap()).collect();
        MonicCurve::new(RepresentationSpec::Symmetric(comps.len()), comps).unwrap()
    }

    fn zero() -> BasePoint {
        BasePoint::Rational(BigRational::zero())
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn point_verdicts() {
        assert!(one_flat_test(&curve(&["0", "-t^2"]), &zero(), 8).unwrap().pass);
        let r = one_flat_test(&curve(&["0", "-t"]), &zero(), 8).unwrap();
        assert!(!r.pass);
        assert_eq!(r.clusters[0].failing, Some(2));
        assert_eq!(r.clusters[0].valuations, vec![(2, Valuation::Finite(1))]);
        let r = one_flat_test(&curve(&["5", "6"]), &zero(), 8).unwrap();
        assert!(r.pass && r.clusters.iter().all(|c| c.size == 1));
    }

    #[test]
    fn square_root_is_not_one_flat() {
        match differentiable_lift(&curve(&["0", "-t"]), &q(-1), &q(1), 8) {
            Err(RegularityError::NotOneFlat(r)) => {
                assert!(!r.overall);
                assert_eq!(r.contact_points[0].clusters[0].failing, Some(2));
            }
            other => panic!("expected NotOneFlat, got {other:?}"),
        }
    }

    #[test]
    fn plus_minus_t_derivatives() {
        let d = differentiable_lift(&curve(&["0", "-t^2"]), &q(-1), &q(1), 8).unwrap();
        assert_eq!(d.derivatives.len(), 1);
        let vals: Vec<String> = d.derivatives[0].values.iter().map(|v| v.to_string()).collect();
        let mut sorted = vals.clone();
        sorted.sort();
        assert_eq!(sorted, vec!["-1", "1"]);
    }

    #[test]
    fn three_halves_has_zero_derivative() {
        let d = differentiable_lift(&curve(&["0", "-t^3"]), &q(-1), &q(1), 8).unwrap();
        let vals: Vec<String> = d.derivatives[0].values.iter().map(|v| v.to_string()).collect();
        assert_eq!(vals, vec!["0", "0"]);
        assert!(d.lift.junctions.iter().any(|j| j.derivatives.is_some()));
    }
}
