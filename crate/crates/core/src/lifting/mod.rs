//! Local lifting of curves in the quotient at a base point.
//!
//! A lift is a list of Puiseux series roots, one list per side of the base
//! point when the ramification index is even. Every lift carries an exact
//! certificate: the symmetric functions of its roots reproduce the curve.

mod certify;
mod engine;
pub mod field;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::squarefree::squarefree_decomposition_bivariate;
use crate::algebra::subresultant::{principal_subresultants, psc_determinant};
use crate::algebra::{AlgebraError, Field, GaussianRational as G, Modulus, Poly, Ring, Scalar};
use crate::numeric::roots::{isolate_roots, refine_root, RootDisc};
use crate::numeric::sturm::{sign_at, RealRoot};
use crate::quotient::{Leaf, LeafSignature, ModelError, MonicCurve, RepresentationSpec, StratumSignature};
use crate::series::{BasePoint, Embedding, PuiseuxSeries, SeriesError, Sign, TruncatedSeries, Valuation};

use engine::{Block, S};
use field::FieldCtx;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiftError {
    #[error("normal nonflatness cannot be witnessed at truncation order {0}")]
    NonflatUndetermined(usize),
    #[error("slice splitting needs at least two distinct roots at the base point")]
    NotSplittable,
    #[error("every component vanishes identically")]
    AllZero,
    /// The defining polynomial of an irrational base point factors; the
    /// lift is retried over the factor that vanishes at the point.
    #[error("base field modulus splits")]
    BaseSplit { factor: Poly<G>, cofactor: Poly<G> },
    #[error("certificate reached order {achieved}, below the requested {requested}")]
    InsufficientOrder { requested: usize, achieved: usize },
    #[error("certificate failed: {0}")]
    CertificateFailed(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One step of the lifting recursion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionStep {
    /// All roots of a block are distinct at the base point.
    Principal,
    /// A block was recentered at the mean of its roots.
    RemoveFixed,
    /// A block split along clusters of equal roots (cluster sizes,
    /// decreasing).
    SliceSplit { clusters: Vec<usize> },
    /// Substitution `t = ±s^d` followed by division; `m_next = d m - 1`.
    Reduce { m: BigRational, d: usize, m_next: BigRational },
    /// A block vanishing identically, lifted by the zero curve.
    ZeroCurve,
}

fn fmt_q(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionStep::Principal => f.write_str("principal"),
            ReductionStep::RemoveFixed => f.write_str("remove-fixed"),
            ReductionStep::SliceSplit { clusters } => {
                let c: Vec<String> = clusters.iter().map(|k| k.to_string()).collect();
                write!(f, "slice-split clusters={}", c.join(","))
            }
            ReductionStep::Reduce { m, d, m_next } => write!(f, "reduce m={} d={d} next={}", fmt_q(m), fmt_q(m_next)),
            ReductionStep::ZeroCurve => f.write_str("zero-curve"),
        }
    }
}

impl FromStr for ReductionStep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut words = s.split_whitespace();
        let head = words.next().ok_or("empty step")?;
        let fields: Vec<(&str, &str)> = words.filter_map(|w| w.split_once('=')).collect();
        let get = |k: &str| fields.iter().find(|(a, _)| *a == k).map(|(_, v)| *v).ok_or(format!("missing `{k}`"));
        let rat = |v: &str| crate::algebra::parse::parse_rational(v).map_err(|e| e.to_string());
        Ok(match head {
            "principal" => ReductionStep::Principal,
            "remove-fixed" => ReductionStep::RemoveFixed,
            "zero-curve" => ReductionStep::ZeroCurve,
            "slice-split" => ReductionStep::SliceSplit {
                clusters: get("clusters")?.split(',').map(|k| k.parse().map_err(|_| "bad cluster size".to_string())).collect::<Result<_, _>>()?,
            },
            "reduce" => ReductionStep::Reduce {
                m: rat(get("m")?)?,
                d: get("d")?.parse().map_err(|_| "bad d".to_string())?,
                m_next: rat(get("next")?)?,
            },
            other => return Err(format!("unknown step `{other}`")),
        })
    }
}

/// Series roots over one field, standing for every compatible embedding of
/// that field.
#[derive(Clone, Debug)]
pub struct RootFamily {
    pub leaf: usize,
    pub series: TruncatedSeries<Scalar>,
    pub modulus: Option<Arc<Modulus>>,
    pub base_image: Option<Scalar>,
    /// Embeddings this family stands for; empty when the series is over
    /// `Q(i)`.
    pub embeddings: Vec<Embedding>,
    pub replication: usize,
}

impl RootFamily {
    pub(crate) fn ctx(&self) -> FieldCtx {
        FieldCtx { modulus: self.modulus.clone(), base_image: self.base_image.clone() }
    }

    pub fn root_count(&self) -> usize {
        self.replication * self.embeddings.len().max(1)
    }
}

/// One root as a Puiseux series with the embedding that makes it a complex
/// function.
#[derive(Clone, Debug)]
pub struct LiftedRoot {
    pub leaf: usize,
    pub series: PuiseuxSeries,
    pub embedding: Option<Embedding>,
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub sign: Sign,
    pub families: Vec<RootFamily>,
    pub trace: Vec<ReductionStep>,
}

#[derive(Clone, Debug)]
pub struct LocalLift {
    pub base_point: BasePoint,
    pub rep: RepresentationSpec,
    /// Ramification index `N`: `t = t0 ± scale * s^N`.
    pub ramification: usize,
    /// Positive element of the base field, 1 at rational base points.
    pub scale: Scalar,
    pub branches: Vec<Branch>,
    pub certificate_order: usize,
}

impl LocalLift {
    /// Trace of the first branch.
    pub fn trace(&self) -> &[ReductionStep] {
        &self.branches[0].trace
    }

    pub fn branch(&self, sign: Sign) -> Option<&Branch> {
        self.branches.iter().find(|b| b.sign == sign)
    }

    /// All roots of the branch with the given sign, in leaf order. For odd
    /// `N` the minus side is the mirrored plus branch.
    pub fn roots(&self, sign: Sign) -> Vec<LiftedRoot> {
        if let Some(b) = self.branch(sign) {
            return expand(self, b);
        }
        let plus = expand(self, &self.branches[0]);
        plus.into_iter()
            .map(|r| LiftedRoot { series: r.series.mirrored().expect("odd ramification"), ..r })
            .collect()
    }
}

fn expand(lift: &LocalLift, b: &Branch) -> Vec<LiftedRoot> {
    let mut out = Vec::new();
    for f in &b.families {
        let scale = match &f.base_image {
            Some(img) => lift.scale.map_generator(img),
            None => lift.scale.clone(),
        };
        let series =
            PuiseuxSeries::new(lift.base_point.clone(), lift.ramification, b.sign, f.series.clone()).with_scale(scale);
        let embs: Vec<Option<Embedding>> =
            if f.embeddings.is_empty() { vec![None] } else { f.embeddings.iter().cloned().map(Some).collect() };
        for e in embs {
            for _ in 0..f.replication {
                out.push(LiftedRoot { leaf: f.leaf, series: series.clone(), embedding: e.clone() });
            }
        }
    }
    out
}

/// Generic stratum near the base point and the valuation of the witness.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub generic: StratumSignature,
    pub valuation: Valuation,
}

/// Generic squarefree structure of an exact `Symmetric(n)` polynomial: the
/// partition of generic multiplicities and the witness polynomial
/// `psc_{n-r}(P, P_z)`, `r` the generic number of distinct roots.
pub fn sym_witness_polynomial(p: &Poly<Poly<G>>) -> Result<(Vec<usize>, Poly<G>), LiftError> {
    let n = p.deg();
    let parts = squarefree_decomposition_bivariate(p);
    let mut partition: Vec<usize> = parts.iter().flat_map(|(g, e)| vec![*e; g.deg()]).collect();
    partition.sort_unstable_by(|a, b| b.cmp(a));
    let r: usize = parts.iter().map(|(g, _)| g.deg()).sum();
    let w = principal_subresultants(p, &p.derivative())?[n - r].clone();
    Ok((partition, w))
}

/// Product of the leaf witnesses of an exact curve as a polynomial in `t`.
pub fn witness_polynomial(c: &MonicCurve) -> Result<Poly<G>, LiftError> {
    if !c.is_exact() {
        return Err(ModelError::NotExact.into());
    }
    let mut w = Poly::one();
    for (leaf, comps) in c.leaf_components() {
        let f = match leaf {
            Leaf::Symmetric(_) => {
                let curve = MonicCurve { rep: RepresentationSpec::Symmetric(comps.len()), components: comps.to_vec() };
                sym_witness_polynomial(&curve.sym_poly_exact())?.1
            }
            Leaf::Cyclic(_) => {
                let c = comps[0].to_poly();
                if c.is_zero() {
                    Poly::one()
                } else {
                    c
                }
            }
        };
        w = w.mul_poly(&f);
    }
    Ok(w)
}

fn poly_valuation(p: &Poly<G>) -> usize {
    p.coeffs().iter().position(|c| !c.is_zero()).unwrap_or(usize::MAX)
}

/// Generic stratum and witness valuation at `t0`.
pub fn nonflat_witness(c: &MonicCurve, t0: &BigRational) -> Result<Witness, LiftError> {
    let c = c.translate(&G::from_real(t0.clone()))?;
    let mut leaves = Vec::new();
    let mut total = 0usize;
    let mut undetermined: Option<usize> = None;
    for (leaf, comps) in c.leaf_components() {
        match leaf {
            Leaf::Symmetric(n) => {
                let curve = MonicCurve { rep: RepresentationSpec::Symmetric(n), components: comps.to_vec() };
                if curve.is_exact() {
                    let (partition, w) = sym_witness_polynomial(&curve.sym_poly_exact())?;
                    total += poly_valuation(&w);
                    leaves.push(LeafSignature::Partition(partition));
                    continue;
                }
                let p = curve.sym_poly();
                let dp = p.derivative();
                let first = if n == 1 { Valuation::Finite(0) } else { psc_determinant(&p, &dp, 0).valuation_structural() };
                match first {
                    Valuation::Finite(v) => {
                        total += v;
                        leaves.push(LeafSignature::Partition(vec![1; n]));
                    }
                    Valuation::UndeterminedAtOrder(t) => {
                        undetermined = Some(undetermined.map_or(t, |u: usize| u.min(t)));
                        leaves.push(LeafSignature::Partition(vec![1; n]));
                    }
                    Valuation::Infinity => unreachable!("a truncated determinant is never exactly zero"),
                }
            }
            Leaf::Cyclic(_) => match comps[0].valuation_structural() {
                Valuation::Finite(v) => {
                    total += v;
                    leaves.push(LeafSignature::Cyclic { nonzero: true });
                }
                Valuation::Infinity => leaves.push(LeafSignature::Cyclic { nonzero: false }),
                Valuation::UndeterminedAtOrder(t) => {
                    undetermined = Some(undetermined.map_or(t, |u: usize| u.min(t)));
                    leaves.push(LeafSignature::Cyclic { nonzero: true });
                }
            },
        }
    }
    let valuation = match undetermined {
        Some(t) => Valuation::UndeterminedAtOrder(t),
        None => Valuation::Finite(total),
    };
    Ok(Witness { generic: StratumSignature { leaves }, valuation })
}

/// Result of one reduction `c_k(±t^d) = t^(d d_k) c'_k(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReduceOutcome {
    pub m: BigRational,
    pub d: usize,
    pub m_next: BigRational,
    pub reduced: MonicCurve,
}

/// One reduction step on a curve with `c(0) = 0`.
pub fn reduce_step(c: &MonicCurve, sign: Sign) -> Result<ReduceOutcome, LiftError> {
    let weights = c.rep.degrees();
    let mut m: Option<BigRational> = None;
    let mut unknown: Option<(BigRational, usize)> = None;
    for (comp, &w) in c.components.iter().zip(&weights) {
        let q = |v: usize| BigRational::new(BigInt::from(v), BigInt::from(w));
        match comp.valuation_structural() {
            Valuation::Finite(0) => {
                return Err(SeriesError::InsufficientValuation { valuation: 0, required: 1 }.into());
            }
            Valuation::Finite(v) => m = Some(m.map_or(q(v), |x| x.min(q(v)))),
            Valuation::UndeterminedAtOrder(t) => {
                if unknown.as_ref().is_none_or(|(b, _)| q(t + 1) < *b) {
                    unknown = Some((q(t + 1), t));
                }
            }
            Valuation::Infinity => {}
        }
    }
    let Some(m) = m else {
        return match unknown {
            Some((_, t)) => Err(LiftError::NonflatUndetermined(t)),
            None => Err(LiftError::AllZero),
        };
    };
    if let Some((b, t)) = unknown {
        if b < m {
            return Err(LiftError::NonflatUndetermined(t));
        }
    }
    let d = (BigRational::one() / &m).ceil().to_integer().to_usize().expect("small exponent");
    let m_next = &m * BigRational::from_integer(BigInt::from(d)) - BigRational::one();
    let comps = c
        .components
        .iter()
        .zip(&weights)
        .map(|(comp, &w)| comp.substitute_power(d, sign).shift_divide(w))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ReduceOutcome { m, d, m_next, reduced: MonicCurve { rep: c.rep.clone(), components: comps } })
}

/// One cluster of a slice split: its center and the recentered factor.
#[derive(Clone, Debug)]
pub struct SliceCluster {
    pub center: TruncatedSeries<Scalar>,
    /// `a_1, ..., a_k` of the recentered factor (`a_1 = 0`).
    pub components: Vec<TruncatedSeries<Scalar>>,
    /// Field of the cluster, `None` for `Q(i)`; a cluster over an extension
    /// stands for all its conjugates.
    pub modulus: Option<Arc<Modulus>>,
    pub multiplicity: usize,
}

impl SliceCluster {
    pub fn size(&self) -> usize {
        self.components.len()
    }
}

fn b_to_a(b: &[S]) -> Vec<S> {
    b.iter().enumerate().map(|(j, c)| if j % 2 == 0 { c.neg_series() } else { c.clone() }).collect()
}

fn a_to_b(a: &[S]) -> Vec<S> {
    b_to_a(a)
}

/// Splits a `Symmetric(n)` curve at `t0` along the distinct roots of
/// `P(t0)`.
pub fn slice_split(c: &MonicCurve, t0: &BigRational, order: usize) -> Result<Vec<SliceCluster>, LiftError> {
    slice_split_at(c, &BasePoint::Rational(t0.clone()), order)
}

/// [`slice_split`] at a rational or real algebraic point.
pub fn slice_split_at(c: &MonicCurve, point: &BasePoint, order: usize) -> Result<Vec<SliceCluster>, LiftError> {
    let RepresentationSpec::Symmetric(_) = c.rep else {
        return Err(LiftError::Unsupported("slice splitting is implemented for Symmetric(n)".into()));
    };
    let mut point = point.clone();
    loop {
        let base = BaseField::new(&point)?;
        let a: Vec<S> = c.components.iter().map(|s| shift_series(s, &base)).collect::<Result<_, _>>()?;
        let block = Block::sym(0, base.ctx.clone(), a_to_b(&a), 1);
        match engine::split_block(block, &base.ctx, order) {
            Err(LiftError::BaseSplit { factor, cofactor }) => point = base.refine(&factor, &cofactor)?,
            Err(e) => return Err(e),
            Ok(pieces) => {
                return Ok(pieces
                    .into_iter()
                    .map(|p| SliceCluster {
                        center: p.center,
                        components: b_to_a(&p.comps),
                        modulus: p.ctx.modulus,
                        multiplicity: p.replication,
                    })
                    .collect())
            }
        }
    }
}

/// The whole curve at `point` as one cluster, recentered at the mean of
/// its roots.
pub fn whole_cluster_at(c: &MonicCurve, point: &BasePoint) -> Result<SliceCluster, LiftError> {
    let RepresentationSpec::Symmetric(n) = c.rep else {
        return Err(LiftError::Unsupported("slice splitting is implemented for Symmetric(n)".into()));
    };
    let base = BaseField::new(point)?;
    let a: Vec<S> = c.components.iter().map(|s| shift_series(s, &base)).collect::<Result<_, _>>()?;
    let inv_n = Scalar::Gaussian(G::from_ratio(1, n as i64));
    let center = a[0].scale(&inv_n);
    let p = crate::quotient::sym_poly_from(&a).taylor_shift(&center);
    let components = crate::quotient::components_from_sym_poly(&p);
    Ok(SliceCluster { center, components, modulus: base.ctx.modulus.clone(), multiplicity: 1 })
}

/// The base field of a lift and, for an irrational base point, the disc
/// isolating the point among the complex roots of its polynomial.
struct BaseField {
    point: BasePoint,
    ctx: FieldCtx,
    disc: Option<RootDisc>,
    /// `t - t0 = scale * tau`; the lift is computed in `tau`.
    scale: Scalar,
}

fn real_root_disc(r: &RealRoot) -> Result<RootDisc, LiftError> {
    let discs = isolate_roots(&r.poly).map_err(|e| LiftError::CertificateFailed(e.to_string()))?;
    let mut width = &r.hi - &r.lo;
    for _ in 0..200 {
        let rr = r.refine(&width);
        let hits: Vec<RootDisc> = discs
            .iter()
            .map(|d| refine_root(&r.poly, d, &width))
            .filter(|d| d.meets_real_axis() && &d.center.re - &d.radius <= rr.hi && &d.center.re + &d.radius >= rr.lo)
            .collect();
        if hits.len() == 1 {
            let i = discs.iter().position(|d| refine_root(&r.poly, d, &width) == hits[0]).expect("present");
            return Ok(discs[i].clone());
        }
        width /= BigRational::from_integer(BigInt::from(16));
    }
    Err(LiftError::CertificateFailed("could not isolate the base point among complex roots".into()))
}

impl BaseField {
    fn new(point: &BasePoint) -> Result<Self, LiftError> {
        match point {
            BasePoint::Rational(_) => Ok(Self { point: point.clone(), ctx: FieldCtx::gaussian(), disc: None, scale: Scalar::one() }),
            BasePoint::Algebraic(r) => {
                let poly = r.poly.monic()?;
                let r = RealRoot { poly: poly.clone(), lo: r.lo.clone(), hi: r.hi.clone() };
                let m = Modulus::new(poly)?;
                Ok(Self {
                    disc: Some(real_root_disc(&r)?),
                    point: BasePoint::Algebraic(r),
                    ctx: FieldCtx::base(&m),
                    scale: Scalar::one(),
                })
            }
        }
    }

    /// `t0` as an element of the base field.
    fn value(&self) -> Scalar {
        match &self.point {
            BasePoint::Rational(q) => Scalar::Gaussian(G::from_real(q.clone())),
            BasePoint::Algebraic(_) => self.ctx.base_image.clone().expect("algebraic base"),
        }
    }

    /// Restricts an irrational base point to the factor vanishing there.
    fn refine(&self, factor: &Poly<G>, cofactor: &Poly<G>) -> Result<BasePoint, LiftError> {
        let BasePoint::Algebraic(r) = &self.point else {
            return Err(LiftError::CertificateFailed("rational base field cannot split".into()));
        };
        for f in [factor, cofactor] {
            if sign_at(f, &r.lo) * sign_at(f, &r.hi) < 0 {
                return Ok(BasePoint::Algebraic(RealRoot { poly: f.clone(), lo: r.lo.clone(), hi: r.hi.clone() }));
            }
        }
        Err(LiftError::CertificateFailed("no factor changes sign on the isolating interval".into()))
    }
}

fn shift_series(s: &TruncatedSeries<G>, base: &BaseField) -> Result<S, LiftError> {
    let t0 = base.value();
    if t0.is_zero() {
        return Ok(TruncatedSeries::from_gaussian(s));
    }
    if !s.is_exact() {
        return Err(ModelError::NotExact.into());
    }
    let p: Poly<Scalar> = s.to_poly().map(|c| Scalar::Gaussian(c.clone()));
    let mut p = p.taylor_shift(&t0);
    if !base.scale.is_one() {
        let mut k = Scalar::one();
        p = Poly::new(
            p.coeffs()
                .iter()
                .map(|c| {
                    let out = c.mul(&k);
                    k = k.mul(&base.scale);
                    out
                })
                .collect(),
        );
    }
    Ok(TruncatedSeries::from_poly(&p))
}

/// Scale for an irrational base point at which a single pair of roots
/// branches like `z^2 = beta * tau`: with `t - t0 = tau / |beta|` the pair
/// starts as `z = ±s` or `z = ±i s`, so no square root of `beta` is
/// adjoined.
fn branch_scale(c: &MonicCurve, base: &BaseField, order: usize) -> Option<Scalar> {
    let RepresentationSpec::Symmetric(_) = c.rep else { return None };
    let real = c.components.iter().all(|x| x.coeffs().iter().all(|g| g.im.is_zero()));
    let disc = base.disc.as_ref()?;
    let modulus = base.ctx.modulus.as_ref()?;
    if !real {
        return None;
    }
    let a: Vec<S> = c.components.iter().map(|s| shift_series(s, base)).collect::<Result<_, _>>().ok()?;
    let block = Block::sym(0, base.ctx.clone(), a_to_b(&a), 1);
    let pieces = engine::split_block(block, &base.ctx, order.min(2)).ok()?;
    let mut beta = None;
    for p in &pieces {
        if p.ctx.modulus.as_ref() != Some(modulus) || p.replication != 1 {
            return None;
        }
        match p.comps.len() {
            1 => {}
            2 => {
                // b-convention: z^2 + b_1 z + b_2, recentered so b_1 = 0.
                let b2 = &p.comps[1];
                let v = (0..b2.coeffs().len()).find(|&k| !b2.coeff(k).is_zero())?;
                if v != 1 || beta.is_some() {
                    return None;
                }
                beta = Some(b2.coeff(v).neg());
            }
            _ => return None,
        }
    }
    let beta = beta?;
    let emb = Embedding { modulus: modulus.poly().clone(), disc: disc.clone() };
    let re = emb.image(&beta, 64).re;
    let inv = beta.inv().ok()?;
    if re.lo.is_positive() {
        Some(inv)
    } else if re.hi.is_negative() {
        Some(inv.neg())
    } else {
        None
    }
}

fn initial_blocks(c: &MonicCurve, base: &BaseField) -> Result<(Vec<Block>, Vec<(Leaf, Vec<S>)>), LiftError> {
    let mut blocks = Vec::new();
    let mut targets = Vec::new();
    for (index, (leaf, comps)) in c.leaf_components().into_iter().enumerate() {
        let shifted: Vec<S> = comps.iter().map(|s| shift_series(s, base)).collect::<Result<_, _>>()?;
        match leaf {
            Leaf::Symmetric(n) => {
                let curve = MonicCurve { rep: RepresentationSpec::Symmetric(n), components: comps.to_vec() };
                if curve.is_exact() && n > 1 {
                    for (g, e) in squarefree_decomposition_bivariate(&curve.sym_poly_exact()) {
                        let k = g.deg();
                        let b: Vec<S> = (1..=k)
                            .map(|j| shift_series(&TruncatedSeries::from_poly(&g.coeff(k - j)), base))
                            .collect::<Result<_, _>>()?;
                        blocks.push(Block::sym(index, base.ctx.clone(), b, e));
                    }
                } else {
                    blocks.push(Block::sym(index, base.ctx.clone(), a_to_b(&shifted), 1));
                }
            }
            Leaf::Cyclic(m) => blocks.push(Block::cyclic(index, m, base.ctx.clone(), shifted[0].clone())),
        }
        targets.push((leaf, shifted));
    }
    Ok((blocks, targets))
}

fn families(out: &engine::EngineOutput, base: &BaseField, ramification: usize) -> Result<Vec<RootFamily>, LiftError> {
    let k = ramification / out.ramification;
    let mut fams = Vec::new();
    for r in &out.resolved {
        let embeddings = match (&r.chosen, &base.disc, &base.ctx.modulus) {
            (Some(e), _, _) => vec![e.clone()],
            // Roots over the base field itself take its embedding.
            (None, Some(d), Some(m)) if r.ctx == base.ctx => vec![Embedding { modulus: m.poly().clone(), disc: d.clone() }],
            _ => field::compatible_embeddings(&r.ctx, base.disc.as_ref())?,
        };
        let series = if k == 1 { r.root.clone() } else { r.root.substitute_power(k, Sign::Plus) };
        fams.push(RootFamily {
            leaf: r.leaf,
            series,
            modulus: r.ctx.modulus.clone(),
            base_image: r.ctx.base_image.clone(),
            embeddings,
            replication: r.replication,
        });
    }
    fams.sort_by_key(|f| f.leaf);
    Ok(fams)
}

/// Lift at a rational base point, certified to order `order` in `s`.
pub fn local_lift(c: &MonicCurve, t0: &BigRational, order: usize) -> Result<LocalLift, LiftError> {
    if let Valuation::UndeterminedAtOrder(_) = nonflat_witness(c, t0)?.valuation {
        return Err(LiftError::NonflatUndetermined(order));
    }
    local_lift_at(c, &BasePoint::Rational(t0.clone()), order)
}

/// Lift at a rational or real algebraic base point. Irrational base points
/// need an exact curve.
pub fn local_lift_at(c: &MonicCurve, point: &BasePoint, order: usize) -> Result<LocalLift, LiftError> {
    let mut point = point.clone();
    loop {
        let mut base = BaseField::new(&point)?;
        if let Some(k) = branch_scale(c, &base, order) {
            base.scale = k;
        }
        match lift_over(c, &base, order) {
            Err(LiftError::BaseSplit { factor, cofactor }) => point = base.refine(&factor, &cofactor)?,
            other => return other,
        }
    }
}

fn lift_over(c: &MonicCurve, base: &BaseField, order: usize) -> Result<LocalLift, LiftError> {
    let order = order.max(1);
    let (blocks, targets) = initial_blocks(c, base)?;
    let mut budget = order;
    let mut previous: Option<usize> = None;
    loop {
        let plus = engine::run(blocks.clone(), &base.ctx, Sign::Plus, budget, order)?;
        let mut outs = vec![(Sign::Plus, plus)];
        if outs[0].1.ramification % 2 == 0 {
            let minus = engine::run(blocks.clone(), &base.ctx, Sign::Minus, budget, order)?;
            outs.push((Sign::Minus, minus));
        }
        let ramification = outs.iter().fold(1, |acc, (_, o)| engine::lcm(acc, o.ramification));
        let mut branches = Vec::new();
        let mut certified: Option<usize> = None;
        for (sign, out) in &outs {
            let fams = families(out, base, ramification)?;
            if let Some(t) = certify::certify(&fams, &targets, &base.ctx, ramification, *sign)? {
                certified = Some(certified.map_or(t, |c: usize| c.min(t)));
            }
            branches.push(Branch { sign: *sign, families: fams, trace: out.trace.clone() });
        }
        let achieved = certified.unwrap_or(usize::MAX);
        if achieved >= order {
            return Ok(LocalLift {
                base_point: base.point.clone(),
                rep: c.rep.clone(),
                ramification,
                scale: base.scale.clone(),
                branches,
                certificate_order: order,
            });
        }
        if previous.is_some_and(|p| p >= achieved) || budget > 64 * order {
            return Err(LiftError::InsufficientOrder { requested: order, achieved });
        }
        previous = Some(achieved);
        budget *= 2;
    }
}

impl fmt::Display for LocalLift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "base: {}", self.base_point)?;
        writeln!(f, "N: {}", self.ramification)?;
        if !self.scale.is_one() {
            writeln!(f, "scale: {}", self.scale)?;
        }
        for b in &self.branches {
            writeln!(f, "branch {}", b.sign)?;
            for r in expand(self, b) {
                writeln!(f, "  {}", r.series.body.fmt_var("s"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_series;
    use crate::quotient::RepresentationSpec as Rep;

    fn curve(rep: &str, comps: &[&str]) -> MonicCurve {
        let comps = comps.iter().map(|c| parse_series(c, "t").unwrap()).collect();
        MonicCurve::new(Rep::parse(rep).unwrap(), comps).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn bodies(l: &LocalLift, sign: Sign) -> Vec<String> {
        l.roots(sign).iter().map(|r| r.series.body.fmt_var("s")).collect()
    }

    #[test]
    fn square_root_of_t() {
        let l = local_lift(&curve("sym:2", &["0", "-t"]), &q(0), 8).unwrap();
        assert_eq!(l.ramification, 2);
        let mut plus = bodies(&l, Sign::Plus);
        plus.sort();
        assert_eq!(plus, vec!["-s", "s"]);
        let mut minus = bodies(&l, Sign::Minus);
        minus.sort();
        assert_eq!(minus, vec!["-i*s", "i*s"]);
    }

    #[test]
    fn constant_roots() {
        let l = local_lift(&curve("sym:2", &["5", "6"]), &q(3), 8).unwrap();
        assert_eq!(l.ramification, 1);
        let mut r = bodies(&l, Sign::Plus);
        r.sort();
        assert_eq!(r, vec!["2", "3"]);
        assert_eq!(l.trace(), &[ReductionStep::RemoveFixed, ReductionStep::Principal]);
    }

    #[test]
    fn three_halves_trace() {
        let l = local_lift(&curve("sym:2", &["0", "-t^3"]), &q(0), 8).unwrap();
        assert_eq!(l.ramification, 2);
        let reduces: Vec<String> =
            l.trace().iter().filter(|s| matches!(s, ReductionStep::Reduce { .. })).map(|s| s.to_string()).collect();
        assert_eq!(reduces, vec!["reduce m=3/2 d=1 next=1/2", "reduce m=1/2 d=2 next=0"]);
        let mut r = bodies(&l, Sign::Plus);
        r.sort();
        assert_eq!(r, vec!["-s^3", "s^3"]);
    }

    #[test]
    fn cube_root_on_cyclic_leaf() {
        let l = local_lift(&curve("cyc:3", &["t"]), &q(0), 6).unwrap();
        assert_eq!(l.ramification, 3);
        assert_eq!(bodies(&l, Sign::Plus), vec!["s"]);
    }

    #[test]
    fn fourth_root_needs_one_extension() {
        let l = local_lift(&curve("sym:4", &["0", "0", "0", "-t"]), &q(0), 8).unwrap();
        assert_eq!(l.ramification, 4);
        assert_eq!(l.roots(Sign::Plus).len(), 4);
    }

    #[test]
    fn witness_examples() {
        let w = nonflat_witness(&curve("sym:2", &["0", "-t"]), &q(0)).unwrap();
        assert_eq!(w.generic.to_string(), "{1,1}");
        assert_eq!(w.valuation, Valuation::Finite(1));
        let w = nonflat_witness(&curve("sym:2", &["0", "-t^2"]), &q(0)).unwrap();
        assert_eq!(w.valuation, Valuation::Finite(2));
        let w = nonflat_witness(&curve("sym:2", &["0", "0"]), &q(0)).unwrap();
        assert_eq!(w.generic.to_string(), "{2}");
        assert_eq!(w.valuation, Valuation::Finite(0));
        let w = nonflat_witness(&curve("sym:2", &["0", "O(t^5)"]), &q(0)).unwrap();
        assert_eq!(w.valuation, Valuation::UndeterminedAtOrder(4));
    }

    #[test]
    fn reduce_step_examples() {
        let r = reduce_step(&curve("sym:2", &["0", "-t^3"]), Sign::Plus).unwrap();
        assert_eq!((r.m.clone(), r.d), (BigRational::new(3.into(), 2.into()), 1));
        assert_eq!(r.reduced, curve("sym:2", &["0", "-t"]));
        let r = reduce_step(&r.reduced, Sign::Plus).unwrap();
        assert_eq!(r.d, 2);
        assert_eq!(r.reduced, curve("sym:2", &["0", "-1"]));
        let r = reduce_step(&curve("cyc:3", &["t"]), Sign::Plus).unwrap();
        assert_eq!(r.d, 3);
        assert_eq!(r.reduced, curve("cyc:3", &["1"]));
        assert_eq!(reduce_step(&curve("sym:2", &["0", "0"]), Sign::Plus).unwrap_err(), LiftError::AllZero);
    }

    #[test]
    fn slice_split_examples() {
        // (z^2 - t)(z - 1 - t) = z^3 - (1+t) z^2 - t z + t + t^2
        let c = curve("sym:3", &["1 + t", "-t", "-t - t^2"]);
        let parts = slice_split(&c, &q(0), 6).unwrap();
        assert_eq!(parts.len(), 2);
        let double = parts.iter().find(|p| p.size() == 2).unwrap();
        assert_eq!(double.center.fmt_var("t"), "0");
        assert_eq!(double.components[1].fmt_var("t"), "-t");
        let single = parts.iter().find(|p| p.size() == 1).unwrap();
        assert_eq!(single.center.fmt_var("t"), "1 + t");
        let err = slice_split(&curve("sym:2", &["-2", "1 - t"]), &q(0), 4).unwrap_err();
        assert_eq!(err, LiftError::NotSplittable);
    }

    #[test]
    fn trace_lines_round_trip() {
        for s in ["principal", "remove-fixed", "slice-split clusters=2,1", "reduce m=3/2 d=1 next=1/2", "zero-curve"] {
            assert_eq!(s.parse::<ReductionStep>().unwrap().to_string(), s);
        }
    }
}
