//! Global lifts of exact `Symmetric(n)` curves over a closed interval.
//!
//! The interval is cut into pieces. Around each exceptional point a piece
//! carries the Puiseux branches of the local lift there; the gaps are
//! covered by ordinary power series expansions at rational centers, each
//! used within a third of its distance to the nearest complex singularity.
//! Consecutive pieces are glued by the permutation that makes their root
//! lists agree at the shared endpoint.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::algebra::squarefree::{squarefree_decomposition, squarefree_part};
use crate::algebra::{rat_to_f64, AlgebraError, Field, GaussianRational as G, Poly, Ring, Scalar};
use crate::lifting::{local_lift, local_lift_at, witness_polynomial, LiftError, LiftedRoot, LocalLift};
use crate::numeric::interval::{ten_pow_neg, ComplexInterval};
use crate::numeric::quadrature::integrate;
use crate::numeric::roots::{isolate_roots, refine_root, simplest_rational_between, RootDisc};
use crate::numeric::sturm::{isolate_real_roots, sign_at, RealRoot};
use crate::numeric::NumericError;
use crate::quotient::{ModelError, MonicCurve, RepresentationSpec};
use crate::series::{BasePoint, Embedding, PuiseuxSeries, SeriesError, Sign};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GlobalError {
    #[error("no permutation matches the root lists at t = {0}")]
    NoMatchingPermutation(String),
    #[error("one-sided derivatives disagree at t = {0}")]
    DerivativeMismatch(String),
    #[error("cannot evaluate the lift at t = {0}")]
    Evaluation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("empty interval")]
    EmptyInterval,
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Real parameters where the stratum of the curve drops below the generic
/// one, each isolated by a rational interval.
#[derive(Clone, Debug, PartialEq)]
pub struct ExceptionalSet {
    pub points: Vec<RealRoot>,
}

impl ExceptionalSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn base_points(&self) -> Vec<BasePoint> {
        self.points.iter().map(to_base_point).collect()
    }

    /// Whether `t` is one of the points or lies inside an open isolating
    /// interval.
    pub fn covers(&self, t: &BigRational) -> bool {
        self.points.iter().any(|r| match r.exact_value() {
            Some(x) => x == t,
            None => &r.lo < t && t < &r.hi,
        })
    }
}

impl fmt::Display for ExceptionalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.points.is_empty() {
            return f.write_str("none");
        }
        let parts: Vec<String> = self.base_points().iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(", "))
    }
}

fn to_base_point(r: &RealRoot) -> BasePoint {
    match r.exact_value() {
        Some(q) => BasePoint::Rational(q.clone()),
        None => BasePoint::Algebraic(r.clone()),
    }
}

fn require_sym(c: &MonicCurve) -> Result<usize, GlobalError> {
    match c.rep {
        RepresentationSpec::Symmetric(n) if c.is_exact() => Ok(n),
        RepresentationSpec::Symmetric(_) => Err(ModelError::NotExact.into()),
        _ => Err(GlobalError::Unsupported("global lifts are built for Symmetric(n) curves".into())),
    }
}

fn real_zero_polynomial(w: &Poly<G>) -> Result<Poly<G>, GlobalError> {
    let re = w.map(|c| G::from_real(c.re.clone()));
    let im = w.map(|c| G::from_real(c.im.clone()));
    let g = if im.is_zero() { re } else { re.gcd(&im)? };
    Ok(g)
}

/// Real zeros in `[lo, hi]` of the witness polynomial of an exact curve.
pub fn exceptional_points(c: &MonicCurve, lo: &BigRational, hi: &BigRational) -> Result<ExceptionalSet, GlobalError> {
    require_sym(c)?;
    if lo > hi {
        return Err(GlobalError::EmptyInterval);
    }
    let w = witness_polynomial(c)?;
    let g = real_zero_polynomial(&w)?;
    if g.deg() == 0 {
        return Ok(ExceptionalSet { points: Vec::new() });
    }
    Ok(ExceptionalSet { points: isolate_real_roots(&g, lo, hi).into_iter().map(exact_if_rational).collect() })
}

/// Replaces the isolating interval by the point itself when the root is
/// rational.
fn exact_if_rational(r: RealRoot) -> RealRoot {
    if r.exact_value().is_some() {
        return r;
    }
    if r.poly.deg() == 1 {
        let x = r.poly.coeff(0).neg().div(&r.poly.coeff(1)).expect("nonzero").re;
        return RealRoot { poly: r.poly.clone(), lo: x.clone(), hi: x };
    }
    let mut cur = r.clone();
    for _ in 0..24 {
        let x = simplest_rational_between(&cur.lo, &cur.hi);
        if sign_at(&cur.poly, &x) == 0 {
            return RealRoot { poly: r.poly.clone(), lo: x.clone(), hi: x };
        }
        cur = cur.refine(&((&cur.hi - &cur.lo) / BigRational::from_integer(256.into())));
        if cur.exact_value().is_some() {
            return cur;
        }
    }
    r
}

/// A certified root of `P(t)` at a rational `t`: the root of the squarefree
/// factor `poly` inside `disc`, with its multiplicity in `P(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootValue {
    pub poly: Poly<G>,
    pub disc: RootDisc,
    pub multiplicity: usize,
}

impl RootValue {
    pub fn exact(&self) -> Option<&G> {
        self.disc.is_exact().then_some(&self.disc.center)
    }

    pub fn enclosure(&self, width: &BigRational) -> ComplexInterval {
        refine_root(&self.poly, &self.disc, &(width / BigRational::from_integer(4.into()))).to_box()
    }

    pub fn approx(&self) -> Complex64 {
        self.disc.approx()
    }
}

impl fmt::Display for RootValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact() {
            Some(g) => write!(f, "{g}"),
            None => write!(f, "root({}; {} r {})", self.poly.fmt_var("z"), self.disc.center, G::from_real(self.disc.radius.clone())),
        }
    }
}

/// Certified roots of a polynomial, grouped by squarefree factor.
pub fn certified_roots(p: &Poly<G>) -> Result<Vec<RootValue>, GlobalError> {
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition(&p.monic()?)? {
        for disc in isolate_roots(&g)? {
            let disc = match crate::numeric::roots::gaussian_root_refined(&g, &disc) {
                Some(x) => RootDisc::exact(x),
                None => disc,
            };
            out.push(RootValue { poly: g.clone(), disc, multiplicity: e });
        }
    }
    Ok(out)
}

/// Assigns each approximation to a certified root, respecting
/// multiplicities. Every approximation must be closer to its root than a
/// quarter of that root's distance to the others.
fn snap(approx: &[Complex64], roots: &[RootValue]) -> Option<Vec<usize>> {
    let centers: Vec<Complex64> = roots.iter().map(|r| r.approx()).collect();
    let sep: Vec<f64> = (0..roots.len())
        .map(|j| {
            (0..roots.len())
                .filter(|&i| i != j)
                .map(|i| (centers[i] - centers[j]).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut used = vec![0usize; roots.len()];
    let mut out = Vec::with_capacity(approx.len());
    for v in approx {
        let (j, d) = centers
            .iter()
            .enumerate()
            .map(|(j, c)| (j, (v - c).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))?;
        if !(d < sep[j] / 4.0 || sep[j].is_infinite()) {
            return None;
        }
        used[j] += 1;
        out.push(j);
    }
    roots.iter().zip(&used).all(|(r, &u)| r.multiplicity == u).then_some(out)
}

/// Which side of its base point a piece covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `t <= t0`, roots on the branch `t = t0 - s^N`.
    Left,
    /// `t >= t0`, roots on the branch `t = t0 + s^N`.
    Right,
    /// Both sides; the roots are written for `t >= t0` and mirrored below.
    Both,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Both => "both",
        })
    }
}

/// One piece of a global lift.
#[derive(Clone, Debug)]
pub struct Piece {
    pub lo: BasePoint,
    pub hi: BasePoint,
    pub base_point: BasePoint,
    pub ramification: usize,
    pub side: Side,
    pub exceptional: bool,
    /// Roots in glued order.
    pub roots: Vec<LiftedRoot>,
    /// `roots[k]` is root `permutation[k]` of the local lift.
    pub permutation: Vec<usize>,
    numeric: Vec<Vec<Complex64>>,
    base_approx: BigRational,
    scale_approx: f64,
}

/// Compares a rational with a base point.
pub fn cmp_point(t: &BigRational, p: &BasePoint) -> Ordering {
    match p {
        BasePoint::Rational(q) => t.cmp(q),
        BasePoint::Algebraic(r) => {
            if let Some(q) = r.exact_value() {
                return t.cmp(q);
            }
            let mut r = r.clone();
            loop {
                if t <= &r.lo {
                    return Ordering::Less;
                }
                if t >= &r.hi {
                    return Ordering::Greater;
                }
                if sign_at(&r.poly, t) == 0 {
                    return Ordering::Equal;
                }
                r = r.refine(&((&r.hi - &r.lo) / BigRational::from_integer(4.into())));
            }
        }
    }
}

fn point_approx(p: &BasePoint) -> BigRational {
    match p {
        BasePoint::Rational(q) => q.clone(),
        BasePoint::Algebraic(r) => r.refine(&ten_pow_neg(40)).midpoint(),
    }
}

fn scalar_f64(x: &Scalar, emb: Option<&Embedding>) -> Complex64 {
    match (x, emb) {
        (Scalar::Gaussian(g), _) => {
            let (re, im) = g.to_f64_pair();
            Complex64::new(re, im)
        }
        (Scalar::Algebraic(_), Some(e)) => {
            let (re, im) = e.image(x, 80).to_f64();
            Complex64::new(re, im)
        }
        (Scalar::Algebraic(_), None) => Complex64::new(f64::NAN, f64::NAN),
    }
}

fn horner(coeffs: &[Complex64], s: f64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * s + c)
}

impl Piece {
    fn new(
        lo: BasePoint,
        hi: BasePoint,
        lift: &LocalLift,
        side: Side,
        exceptional: bool,
        roots: Vec<LiftedRoot>,
    ) -> Self {
        let numeric = roots
            .iter()
            .map(|r| r.series.body.coeffs().iter().map(|c| scalar_f64(c, r.embedding.as_ref())).collect())
            .collect();
        let n = roots.len();
        let scale_approx = roots.first().map_or(1.0, |r| scalar_f64(&r.series.scale, r.embedding.as_ref()).re);
        Self {
            scale_approx,
            lo,
            hi,
            base_approx: point_approx(&lift.base_point),
            base_point: lift.base_point.clone(),
            ramification: lift.ramification,
            side,
            exceptional,
            roots,
            permutation: (0..n).collect(),
            numeric,
        }
    }

    fn permute(&mut self, perm: &[usize]) {
        self.roots = perm.iter().map(|&i| self.roots[i].clone()).collect();
        self.numeric = perm.iter().map(|&i| self.numeric[i].clone()).collect();
        self.permutation = perm.iter().map(|&i| self.permutation[i]).collect();
    }

    pub fn contains(&self, t: &BigRational) -> bool {
        cmp_point(t, &self.lo) != Ordering::Less && cmp_point(t, &self.hi) != Ordering::Greater
    }

    /// `s` and the sign `e` with `t - t0 = e * s^N`.
    fn s_of(&self, t: f64) -> (f64, f64) {
        let d = t - rat_to_f64(&self.base_approx);
        let e = match self.side {
            Side::Left => -1.0,
            Side::Right => 1.0,
            Side::Both => {
                if d < 0.0 {
                    -1.0
                } else {
                    1.0
                }
            }
        };
        let s = (e * d / self.scale_approx).max(0.0).powf(1.0 / self.ramification as f64);
        (s, e)
    }

    fn s_of_exact(&self, t: &BigRational) -> (f64, f64) {
        let d = rat_to_f64(&(t - &self.base_approx));
        let (_, e) = self.s_of(rat_to_f64(t));
        ((e * d / self.scale_approx).max(0.0).powf(1.0 / self.ramification as f64), e)
    }

    /// Floating point value of every root at `t`.
    pub fn approx_at(&self, t: &BigRational) -> Vec<Complex64> {
        let (s, e) = self.s_of_exact(t);
        // A two-sided piece below its base point evaluates the body at -s.
        let s = if self.side == Side::Both && e < 0.0 { -s } else { s };
        self.numeric.iter().map(|c| horner(c, s)).collect()
    }

    /// Floating point value and derivative in `t` of every root.
    pub fn approx_with_derivative(&self, t: f64) -> Vec<(Complex64, Complex64)> {
        let (s, e) = self.s_of(t);
        let n = self.ramification;
        let mirror = self.side == Side::Both && e < 0.0;
        let sv = if mirror { -s } else { s };
        self.numeric
            .iter()
            .map(|c| {
                let v = horner(c, sv);
                let dc: Vec<Complex64> = c.iter().enumerate().skip(1).map(|(k, x)| x * k as f64).collect();
                // dr/ds with the mirror folded in.
                let mut dr = horner(&dc, sv);
                if mirror {
                    dr = -dr;
                }
                // t - t0 = e k s^N, so dt/ds = e k N s^(N-1).
                let dt = e * self.scale_approx * n as f64 * s.powi(n as i32 - 1);
                (v, dr / dt)
            })
            .collect()
    }

    /// The Puiseux series of root `k` on the side of `t`.
    pub fn series_at(&self, k: usize, t: &BigRational) -> PuiseuxSeries {
        let s = &self.roots[k].series;
        if self.side == Side::Both && cmp_point(t, &self.base_point) == Ordering::Less {
            s.mirrored().expect("two-sided pieces have odd ramification")
        } else {
            s.clone()
        }
    }

    /// Enclosure of root `k` of the truncated series at `t`.
    pub fn enclose(&self, k: usize, t: &BigRational, width: &BigRational) -> Result<ComplexInterval, GlobalError> {
        Ok(self.series_at(k, t).eval_embedded(t, self.roots[k].embedding.as_ref(), width)?)
    }
}

/// A value at a junction: a certified root of `P(t)` at a rational point,
/// or an element of a number field with its embedding at an exceptional
/// point.
#[derive(Clone, Debug)]
pub enum PointValue {
    Root(RootValue),
    Field { value: Scalar, embedding: Option<Embedding> },
}

impl PointValue {
    pub fn enclosure(&self, width: &BigRational) -> ComplexInterval {
        match self {
            PointValue::Root(r) => r.enclosure(width),
            PointValue::Field { value: Scalar::Gaussian(g), .. } => ComplexInterval::point(g),
            PointValue::Field { value, embedding } => {
                let e = embedding.as_ref().expect("algebraic values carry an embedding");
                let mut bits = 112u32;
                loop {
                    let b = e.image(value, bits);
                    if b.width() <= *width || bits > 1 << 12 {
                        return b;
                    }
                    bits *= 2;
                }
            }
        }
    }

    pub fn approx(&self) -> Complex64 {
        match self {
            PointValue::Root(r) => r.approx(),
            PointValue::Field { value, embedding } => scalar_f64(value, embedding.as_ref()),
        }
    }
}

impl fmt::Display for PointValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointValue::Root(r) => write!(f, "{r}"),
            PointValue::Field { value: Scalar::Gaussian(g), .. } => write!(f, "{g}"),
            PointValue::Field { value, embedding } => {
                let e = embedding.as_ref().expect("algebraic values carry an embedding");
                write!(
                    f,
                    "{value} in w: {} near {} r {}",
                    e.modulus.fmt_var("w"),
                    e.disc.center,
                    G::from_real(e.disc.radius.clone())
                )
            }
        }
    }
}

/// Junction between consecutive pieces with the common root list.
#[derive(Clone, Debug)]
pub struct Junction {
    pub at: BasePoint,
    pub values: Vec<PointValue>,
    /// Common one-sided derivatives, when they were matched.
    pub derivatives: Option<Vec<PointValue>>,
}

/// A continuous lift of an exact curve over `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct GlobalLift {
    pub curve: MonicCurve,
    pub lo: BigRational,
    pub hi: BigRational,
    pub order: usize,
    pub exceptional: ExceptionalSet,
    pub pieces: Vec<Piece>,
    pub junctions: Vec<Junction>,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Largest power of two not above `x` (at least `2^-60`).
fn dyadic_below(x: f64) -> BigRational {
    let k = x.max(f64::MIN_POSITIVE).log2().floor().max(-60.0) as i32;
    if k >= 0 {
        q(1 << k.min(60))
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-k) as usize)
    }
}

/// Complex zeros of the witness polynomial, as floating point discs.
struct Singularities {
    discs: Vec<(Complex64, f64)>,
}

impl Singularities {
    fn new(w: &Poly<G>) -> Result<Self, GlobalError> {
        if w.deg() == 0 {
            return Ok(Self { discs: Vec::new() });
        }
        let sq = squarefree_part(&w.monic()?)?;
        let discs = isolate_roots(&sq)?
            .into_iter()
            .map(|d| (d.approx(), rat_to_f64(&d.radius)))
            .collect();
        Ok(Self { discs })
    }

    /// Distance from the real point `x` to the singularities, skipping those
    /// within `skip` of `x`.
    fn distance(&self, x: f64, skip: f64) -> f64 {
        self.discs
            .iter()
            .map(|(c, r)| (Complex64::new(x, 0.0) - c).norm() - r)
            .filter(|&d| d > skip)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Root lists on either side of a junction, matched by a bijection.
/// `same(k, j)` decides whether left value `k` equals right value `j`.
fn match_lists(n: usize, same: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    fn go(k: usize, n: usize, same: &dyn Fn(usize, usize) -> bool, used: &mut [bool], out: &mut Vec<usize>) -> bool {
        if k == n {
            return true;
        }
        for j in 0..n {
            if !used[j] && same(k, j) {
                used[j] = true;
                out.push(j);
                if go(k + 1, n, same, used, out) {
                    return true;
                }
                out.pop();
                used[j] = false;
            }
        }
        false
    }
    let mut used = vec![false; n];
    let mut out = Vec::with_capacity(n);
    go(0, n, &same, &mut used, &mut out).then_some(out)
}

fn junction_width() -> BigRational {
    ten_pow_neg(30)
}

/// First-order data of root `k` of a piece at its base point: the value
/// and derivative in `t`, or `None` when the body is not differentiable in
/// `t` there.
fn first_order(piece: &Piece, k: usize) -> Option<(PointValue, PointValue)> {
    let r = &piece.roots[k];
    let body = &r.series.body;
    let n = piece.ramification;
    if (1..n).any(|j| !body.coeff(j).is_zero()) || body.order().is_some_and(|o| o < n) {
        return None;
    }
    let mut d = body.coeff(n);
    if !r.series.scale.is_one() {
        d = d.div(&r.series.scale).ok()?;
    }
    if piece.side == Side::Left {
        d = d.neg();
    }
    let value = PointValue::Field { value: body.coeff(0), embedding: r.embedding.clone() };
    let deriv = PointValue::Field { value: d, embedding: r.embedding.clone() };
    Some((value, deriv))
}

fn overlap(a: &PointValue, b: &PointValue) -> bool {
    let w = junction_width();
    a.enclosure(&w).overlaps(&b.enclosure(&w))
}

impl GlobalLift {
    /// Index of the piece containing `t`.
    pub fn piece_index(&self, t: &BigRational) -> Option<usize> {
        self.pieces.iter().position(|p| p.contains(t))
    }

    /// Certified roots of `P(t)` in the order of the lift.
    pub fn eval(&self, t: &BigRational) -> Result<Vec<RootValue>, GlobalError> {
        let i = self.piece_index(t).ok_or_else(|| GlobalError::Evaluation(t.to_string()))?;
        eval_piece(&self.curve, &self.pieces[i], t)
    }

    /// Floating point values of the roots at `t`.
    pub fn approx(&self, t: &BigRational) -> Option<Vec<Complex64>> {
        self.piece_index(t).map(|i| self.pieces[i].approx_at(t))
    }

    pub fn root_count(&self) -> usize {
        self.pieces.first().map_or(0, |p| p.roots.len())
    }
}

fn eval_piece(c: &MonicCurve, piece: &Piece, t: &BigRational) -> Result<Vec<RootValue>, GlobalError> {
    let roots = certified_roots(&c.sym_poly_at(&G::from_real(t.clone())))?;
    let idx = snap(&piece.approx_at(t), &roots).ok_or_else(|| GlobalError::Evaluation(G::from_real(t.clone()).to_string()))?;
    Ok(idx.into_iter().map(|j| roots[j].clone()).collect())
}

/// Rational lower and upper ends of the exceptional piece around `e`.
fn exceptional_window(e: &RealRoot, h: &BigRational) -> (BigRational, BigRational) {
    match e.exact_value() {
        Some(x) => (x - h, x + h),
        None => {
            let r = e.refine(&(h / q(8)));
            (&r.lo - h, &r.hi + h)
        }
    }
}

/// Builds pieces and glues them. With `derivatives`, junctions at
/// exceptional points also match one-sided derivatives.
pub fn glue(
    c: &MonicCurve,
    lo: &BigRational,
    hi: &BigRational,
    order: usize,
    derivatives: bool,
) -> Result<GlobalLift, GlobalError> {
    require_sym(c)?;
    if lo >= hi {
        return Err(GlobalError::EmptyInterval);
    }
    let ex = exceptional_points(c, lo, hi)?;
    let sing = Singularities::new(&witness_polynomial(c)?)?;
    let span = rat_to_f64(&(hi - lo));

    // Exceptional pieces, left to right.
    let mut pieces: Vec<Piece> = Vec::new();
    let mut windows: Vec<(BasePoint, BasePoint)> = Vec::new();
    for e in &ex.points {
        let point = to_base_point(e);
        let x = e.approx();
        let rho = sing.distance(x, 1e-9 * (1.0 + x.abs()));
        let h = dyadic_below((rho / 4.0).min(span));
        let (wl, wr) = exceptional_window(e, &h);
        let left_end = if &wl <= lo { BasePoint::Rational(lo.clone()) } else { BasePoint::Rational(wl) };
        let right_end = if &wr >= hi { BasePoint::Rational(hi.clone()) } else { BasePoint::Rational(wr) };
        let lift = local_lift_at(c, &point, order)?;
        let point = lift.base_point.clone();
        let at_lo = cmp_point(lo, &point) == Ordering::Equal;
        let at_hi = cmp_point(hi, &point) == Ordering::Equal;
        if !at_lo && !at_hi && lift.ramification % 2 == 1 {
            pieces.push(Piece::new(left_end.clone(), right_end.clone(), &lift, Side::Both, true, lift.roots(Sign::Plus)));
        } else {
            if !at_lo {
                pieces.push(Piece::new(left_end.clone(), point.clone(), &lift, Side::Left, true, lift.roots(Sign::Minus)));
            }
            if !at_hi {
                pieces.push(Piece::new(point.clone(), right_end.clone(), &lift, Side::Right, true, lift.roots(Sign::Plus)));
            }
        }
        windows.push((if at_lo { point.clone() } else { left_end }, if at_hi { point } else { right_end }));
    }

    // Gaps between windows, covered by ordinary expansions.
    let mut gaps: Vec<(BigRational, BigRational)> = Vec::new();
    let mut cursor = lo.clone();
    for (l, r) in &windows {
        let l = point_approx(l);
        if l > cursor {
            gaps.push((cursor.clone(), l));
        }
        cursor = point_approx(r);
    }
    if &cursor < hi {
        gaps.push((cursor, hi.clone()));
    }
    for (a, b) in gaps {
        let mut x = a;
        let mut guard = 0;
        while x < b {
            guard += 1;
            if guard > 100_000 {
                return Err(GlobalError::Evaluation("gap needs too many expansions".into()));
            }
            let d = sing.distance(rat_to_f64(&x), 0.0);
            let h = dyadic_below((d / 4.0).min(span));
            let (end, center) = if &x + q(2) * &h >= b {
                (b.clone(), (&x + &b) / q(2))
            } else {
                (&x + q(2) * &h, &x + &h)
            };
            let lift = local_lift(c, &center, order)?;
            if lift.ramification != 1 {
                return Err(GlobalError::Lift(LiftError::CertificateFailed(format!(
                    "regular point {center} has ramification {}",
                    lift.ramification
                ))));
            }
            pieces.push(Piece::new(
                BasePoint::Rational(x.clone()),
                BasePoint::Rational(end.clone()),
                &lift,
                Side::Both,
                false,
                lift.roots(Sign::Plus),
            ));
            x = end;
        }
    }
    pieces.sort_by(|p, r| point_approx(&p.lo).cmp(&point_approx(&r.lo)).then(p.side.cmp_order(&r.side)));

    // Glue left to right.
    let mut junctions = Vec::new();
    for i in 1..pieces.len() {
        let (left, right) = pieces.split_at_mut(i);
        let prev = &left[i - 1];
        let next = &mut right[0];
        let at = next.lo.clone();
        let j = match &at {
            BasePoint::Rational(x) if !(next.exceptional && next.side == Side::Right && prev.side == Side::Left) => {
                rational_junction(c, prev, next, x)?
            }
            _ => exceptional_junction(prev, next, derivatives)?,
        };
        junctions.push(j);
    }
    Ok(GlobalLift { curve: c.clone(), lo: lo.clone(), hi: hi.clone(), order, exceptional: ex, pieces, junctions })
}

impl Side {
    fn cmp_order(&self, o: &Side) -> Ordering {
        let rank = |s: &Side| match s {
            Side::Left => 0,
            Side::Both => 1,
            Side::Right => 2,
        };
        rank(self).cmp(&rank(o))
    }
}

fn rational_junction(c: &MonicCurve, prev: &Piece, next: &mut Piece, x: &BigRational) -> Result<Junction, GlobalError> {
    let roots = certified_roots(&c.sym_poly_at(&G::from_real(x.clone())))?;
    let bad = || GlobalError::Evaluation(G::from_real(x.clone()).to_string());
    let l = snap(&prev.approx_at(x), &roots).ok_or_else(bad)?;
    let r = snap(&next.approx_at(x), &roots).ok_or_else(bad)?;
    let perm = match_lists(l.len(), |k, j| l[k] == r[j])
        .ok_or_else(|| GlobalError::NoMatchingPermutation(G::from_real(x.clone()).to_string()))?;
    next.permute(&perm);
    Ok(Junction { at: BasePoint::Rational(x.clone()), values: l.iter().map(|&j| PointValue::Root(roots[j].clone())).collect(), derivatives: None })
}

fn exceptional_junction(prev: &Piece, next: &mut Piece, derivatives: bool) -> Result<Junction, GlobalError> {
    let at = next.lo.clone();
    let n = prev.roots.len();
    let value = |p: &Piece, k: usize| PointValue::Field { value: p.roots[k].series.body.coeff(0), embedding: p.roots[k].embedding.clone() };
    let lv: Vec<PointValue> = (0..n).map(|k| value(prev, k)).collect();
    let rv: Vec<PointValue> = (0..n).map(|k| value(next, k)).collect();
    let (ld, rd) = if derivatives {
        let get = |p: &Piece| -> Result<Vec<PointValue>, GlobalError> {
            (0..n)
                .map(|k| first_order(p, k).map(|(_, d)| d).ok_or_else(|| GlobalError::DerivativeMismatch(at.to_string())))
                .collect()
        };
        (Some(get(prev)?), Some(get(next)?))
    } else {
        (None, None)
    };
    let perm = match_lists(n, |k, j| {
        overlap(&lv[k], &rv[j]) && match (&ld, &rd) {
            (Some(a), Some(b)) => overlap(&a[k], &b[j]),
            _ => true,
        }
    });
    let perm = match perm {
        Some(p) => p,
        None if derivatives && match_lists(n, |k, j| overlap(&lv[k], &rv[j])).is_some() => {
            return Err(GlobalError::DerivativeMismatch(at.to_string()))
        }
        None => return Err(GlobalError::NoMatchingPermutation(at.to_string())),
    };
    next.permute(&perm);
    Ok(Junction { at, values: lv, derivatives: ld })
}

/// Continuous lift of an exact `Symmetric(n)` curve over `[lo, hi]`, with
/// local expansions certified to order `order`.
pub fn glue_global(c: &MonicCurve, lo: &BigRational, hi: &BigRational, order: usize) -> Result<GlobalLift, GlobalError> {
    glue(c, lo, hi, order, false)
}

/// Derivatives at an exceptional point of every root of a two-sided or
/// one-sided piece based there, in glued order.
pub fn piece_derivatives(piece: &Piece) -> Option<Vec<PointValue>> {
    (0..piece.roots.len()).map(|k| first_order(piece, k).map(|(_, d)| d)).collect()
}

/// Per piece: ramification, interval and bodies. Absolute continuity of
/// each piece follows from its being an analytic function of `|t - t0|^(1/N)`.
#[derive(Clone, Debug)]
pub struct AcPiece {
    pub lo: BasePoint,
    pub hi: BasePoint,
    pub ramification: usize,
    pub bodies: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct AcCertificate {
    pub pieces: Vec<AcPiece>,
    /// Total variation of each root on a uniform grid.
    pub total_variation: Vec<f64>,
    pub grid_points: usize,
}

/// Number of grid intervals for the total variation estimate.
pub const TV_GRID: usize = 10_000;

pub fn ac_certificate(g: &GlobalLift) -> AcCertificate {
    let pieces = g
        .pieces
        .iter()
        .map(|p| AcPiece {
            lo: p.lo.clone(),
            hi: p.hi.clone(),
            ramification: p.ramification,
            bodies: p.roots.iter().map(|r| r.series.body.fmt_var("s")).collect(),
        })
        .collect();
    AcCertificate { pieces, total_variation: total_variation(g, &g.lo, &g.hi, TV_GRID), grid_points: TV_GRID + 1 }
}

/// Total variation of each root over `[a, b]` on a uniform grid with
/// `intervals` steps.
pub fn total_variation(g: &GlobalLift, a: &BigRational, b: &BigRational, intervals: usize) -> Vec<f64> {
    let n = g.root_count();
    let mut tv = vec![0.0; n];
    let step = (b - a) / q(intervals as i64);
    let mut prev: Option<Vec<Complex64>> = None;
    for i in 0..=intervals {
        let t = a + &step * q(i as i64);
        let Some(v) = g.approx(&t) else { continue };
        if let Some(p) = &prev {
            for k in 0..n {
                tv[k] += (v[k] - p[k]).norm();
            }
        }
        prev = Some(v);
    }
    tv
}

/// `I(eps) = max_k int |r_k'(t)|^p dt` over the points of the interval at
/// distance at least `eps` from every exceptional point. Pieces touching an
/// exceptional point are integrated in `log |t - t0|`.
pub fn lp_probe(g: &GlobalLift, p: f64, eps: &[f64]) -> Vec<f64> {
    let ex: Vec<f64> = g.exceptional.points.iter().map(|e| e.approx()).collect();
    let n = g.root_count();
    eps.iter()
        .map(|&eps| {
            let mut totals = vec![0.0; n];
            for piece in &g.pieces {
                let a = rat_to_f64(&point_approx(&piece.lo));
                let b = rat_to_f64(&point_approx(&piece.hi));
                for (x, y) in allowed(a, b, &ex, eps) {
                    for (k, total) in totals.iter_mut().enumerate() {
                        *total += integrate_piece(piece, k, p, x, y, &ex);
                    }
                }
            }
            totals.into_iter().fold(0.0, f64::max)
        })
        .collect()
}

/// Subintervals of `[a, b]` outside the `eps`-neighbourhoods of `ex`.
fn allowed(a: f64, b: f64, ex: &[f64], eps: f64) -> Vec<(f64, f64)> {
    let mut parts = vec![(a, b)];
    for &e in ex {
        let mut next = Vec::new();
        for (x, y) in parts {
            let (l, r) = (e - eps, e + eps);
            if y <= l || x >= r {
                next.push((x, y));
                continue;
            }
            if x < l {
                next.push((x, l));
            }
            if y > r {
                next.push((r, y));
            }
        }
        parts = next;
    }
    parts.into_iter().filter(|(x, y)| y > x).collect()
}

fn integrate_piece(piece: &Piece, k: usize, p: f64, x: f64, y: f64, ex: &[f64]) -> f64 {
    let f = |t: f64| piece.approx_with_derivative(t)[k].1.norm().powf(p);
    // Log substitution around the nearest exceptional point when the
    // subinterval lies on one side of it.
    let near = ex.iter().copied().min_by(|u, v| {
        let du = (u - x).abs().min((u - y).abs());
        let dv = (v - x).abs().min((v - y).abs());
        du.partial_cmp(&dv).unwrap_or(Ordering::Equal)
    });
    let rel = 1e-10;
    match near {
        Some(e) if e <= x => {
            let (u0, u1) = ((x - e).max(1e-300).ln(), (y - e).ln());
            integrate(|u: f64| f(e + u.exp()) * u.exp(), u0, u1, rel, 0.0, 4000).value
        }
        Some(e) if e >= y => {
            let (u0, u1) = ((e - y).max(1e-300).ln(), (e - x).ln());
            integrate(|u: f64| f(e - u.exp()) * u.exp(), u0, u1, rel, 0.0, 4000).value
        }
        _ => integrate(f, x, y, rel, 0.0, 4000).value,
    }
}

/// Supremum over the grid of `|r_k(t_{i+1}) - r_k(t_i)| / (t_{i+1} - t_i)`.
pub fn lipschitz_probe(g: &GlobalLift, grid: &[BigRational]) -> f64 {
    let mut sup = 0.0f64;
    let vals: Vec<Option<Vec<Complex64>>> = grid.iter().map(|t| g.approx(t)).collect();
    for i in 1..grid.len() {
        let (Some(a), Some(b)) = (&vals[i - 1], &vals[i]) else { continue };
        let dt = rat_to_f64(&(&grid[i] - &grid[i - 1])).abs();
        if dt == 0.0 {
            continue;
        }
        for k in 0..a.len() {
            sup = sup.max((b[k] - a[k]).norm() / dt);
        }
    }
    sup
}

/// One-line cycle notation of a permutation, 1-based.
pub fn cycle_notation(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for i in 0..perm.len() {
        if seen[i] || perm[i] == i {
            continue;
        }
        let mut cyc = Vec::new();
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            cyc.push((j + 1).to_string());
            j = perm[j];
        }
        out.push_str(&format!("({})", cyc.join(" ")));
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}

fn fmt_embedding(e: &Option<Embedding>) -> String {
    match e {
        None => String::new(),
        Some(e) => format!(" | w: {} near {} r {}", e.modulus.fmt_var("w"), e.disc.center, G::from_real(e.disc.radius.clone())),
    }
}

impl fmt::Display for GlobalLift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "curve: {} [{}]", self.curve.rep, self.curve.components.iter().map(|c| c.fmt_var("t")).collect::<Vec<_>>().join("; "))?;
        writeln!(f, "interval: [{}, {}]", G::from_real(self.lo.clone()), G::from_real(self.hi.clone()))?;
        writeln!(f, "order: {}", self.order)?;
        writeln!(f, "exceptional: {}", self.exceptional)?;
        for (i, p) in self.pieces.iter().enumerate() {
            writeln!(
                f,
                "piece {}: [{}, {}] base {} N={} side {} permutation {}",
                i + 1,
                p.lo,
                p.hi,
                p.base_point,
                p.ramification,
                p.side,
                cycle_notation(&p.permutation)
            )?;
            for (k, r) in p.roots.iter().enumerate() {
                writeln!(f, "  r{} = {}{}", k + 1, r.series.body.fmt_var("s"), fmt_embedding(&r.embedding))?;
            }
        }
        for j in &self.junctions {
            let vals: Vec<String> = j.values.iter().map(|v| v.to_string()).collect();
            writeln!(f, "junction {}: ({})", j.at, vals.join(", "))?;
            if let Some(d) = &j.derivatives {
                let vals: Vec<String> = d.iter().map(|v| v.to_string()).collect();
                writeln!(f, "  derivatives: ({})", vals.join(", "))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for AcCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pieces.iter().enumerate() {
            writeln!(f, "piece {}: [{}, {}] N={} analytic in |t - t0|^(1/{})", i + 1, p.lo, p.hi, p.ramification, p.ramification)?;
        }
        let tv: Vec<String> = self.total_variation.iter().map(|x| format!("{x:.12}")).collect();
        writeln!(f, "total variation (numeric, {} points): {}", self.grid_points, tv.join(", "))
    }
}

/// Values of every root of a piece series at rational `t`, exactly when
/// the series terminates and `s` is rational.
pub fn exact_values(piece: &Piece, t: &BigRational) -> Option<Vec<Scalar>> {
    (0..piece.roots.len())
        .map(|k| {
            let s = piece.series_at(k, t);
            if !s.body.is_exact() {
                return None;
            }
            match s.eval(t) {
                Ok(crate::series::PuiseuxValue::Exact(v)) => Some(v),
                _ => None,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::algebra::parse::parse_series;

    fn curve(comps: &[&str]) -> MonicCurve {
        let comps: Vec<_> = comps.iter().map(|c| parse_series(c, "t").unwrap()).collect();
        MonicCurve::new(RepresentationSpec::Symmetric(comps.len()), comps).unwrap()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exceptional_examples() {
        let e = exceptional_points(&curve(&["0", "-t"]), &q(-1), &q(1)).unwrap();
        assert_eq!(e.base_points(), vec![BasePoint::Rational(q(0))]);
        let e = exceptional_points(&curve(&["5", "6"]), &q(-1), &q(1)).unwrap();
        assert!(e.is_empty());
        let e = exceptional_points(&curve(&["0", "-t^2*(t-1)^2"]), &q(-1), &q(2)).unwrap();
        assert_eq!(e.base_points(), vec![BasePoint::Rational(q(0)), BasePoint::Rational(q(1))]);
    }

    #[test]
    fn square_root_glues_at_zero() {
        let g = glue_global(&curve(&["0", "-t"]), &q(-1), &q(1), 8).unwrap();
        assert_eq!(g.pieces.len(), 2);
        assert_eq!(g.junctions.len(), 1);
        assert!(g.pieces.iter().all(|p| p.ramification == 2));
        let v = g.eval(&r(1, 4)).unwrap();
        let mut vals: Vec<G> = v.iter().map(|x| x.exact().unwrap().clone()).collect();
        vals.sort_by(crate::algebra::lex_cmp);
        assert_eq!(vals, vec![G::from_ratio(-1, 2), G::from_ratio(1, 2)]);
        let v = g.eval(&r(-1, 4)).unwrap();
        assert!(v.iter().all(|x| x.exact().unwrap().re.is_zero()));
        let ac = ac_certificate(&g);
        assert!(ac.pieces.iter().all(|p| p.ramification == 2));
        let tv = total_variation(&g, &q(0), &q(1), TV_GRID);
        assert!(tv.iter().all(|x| (x - 1.0).abs() < 1e-3), "{tv:?}");
    }

    #[test]
    fn constant_curve_is_one_piece() {
        let g = glue_global(&curve(&["5", "6"]), &q(-1), &q(1), 4).unwrap();
        assert_eq!(g.pieces.len(), 1);
        let v = g.eval(&q(0)).unwrap();
        let vals: Vec<G> = v.iter().map(|x| x.exact().unwrap().clone()).collect();
        assert_eq!(vals.len(), 2);
        assert!(vals.contains(&G::from_int(2)) && vals.contains(&G::from_int(3)));
        assert_eq!(ac_certificate(&g).total_variation, vec![0.0, 0.0]);
        assert_eq!(lipschitz_probe(&g, &[q(-1), q(0), q(1)]), 0.0);
    }

    #[test]
    fn plus_minus_t_is_linear() {
        let g = glue_global(&curve(&["0", "-t^2"]), &q(-1), &q(1), 6).unwrap();
        assert!(g.pieces.iter().all(|p| p.ramification == 1));
        let tv = ac_certificate(&g).total_variation;
        assert!(tv.iter().all(|x| (x - 2.0).abs() < 1e-3), "{tv:?}");
        let grid: Vec<BigRational> = (0..=20).map(|i| r(i - 10, 10)).collect();
        assert!((lipschitz_probe(&g, &grid) - 1.0).abs() < 1e-9);
        let i = lp_probe(&g, 3.0, &[1e-6]);
        assert!((i[0] - 2.0).abs() < 1e-4, "{i:?}");
    }

    #[test]
    fn lp_of_square_root() {
        let g = glue_global(&curve(&["0", "-t"]), &q(0), &q(1), 8).unwrap();
        let i = lp_probe(&g, 2.0, &[1e-2, 1e-4]);
        assert!(((i[1] - i[0]) - 0.25 * 100f64.ln()).abs() < 1e-6, "{i:?}");
        let i = lp_probe(&g, 1.0, &[1e-8]);
        assert!((i[0] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn irrational_exceptional_points() {
        // z^2 - (t^2 - 2): branch points at +-sqrt(2).
        let c = curve(&["0", "2 - t^2"]);
        let e = exceptional_points(&c, &q(-2), &q(2)).unwrap();
        assert_eq!(e.len(), 2);
        let g = glue_global(&c, &q(-2), &q(2), 8).unwrap();
        for k in -7..=7 {
            let t = r(k, 4);
            let v = g.eval(&t).unwrap();
            assert_eq!(v.len(), 2);
        }
    }

    #[test]
    fn cycle_notation_examples() {
        assert_eq!(cycle_notation(&[0, 1, 2]), "()");
        assert_eq!(cycle_notation(&[1, 0, 2]), "(1 2)");
        assert_eq!(cycle_notation(&[1, 2, 0]), "(1 2 3)");
    }
}
