//! The block-based lifting loop.
//!
//! Every leaf (and later every root cluster) is a block carrying its own
//! coefficient field, a recentering offset and a scale, so that an original
//! root equals `offset + s^scale * (root of the block)`. Blocks are centered,
//! split along the distinct roots of their value at `s = 0`, or, when that
//! value is the origin, reduced jointly with all other waiting blocks.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::field::{closest_embedding, compatible_embeddings, extend, FieldCtx};
use super::{LiftError, ReductionStep};
use crate::algebra::hensel::{hensel_split, SeriesPoly};
use crate::algebra::squarefree::squarefree_decomposition;
use crate::algebra::{AlgebraError, Field, GaussianRational as G, Modulus, Poly, Ring, Scalar};
use crate::numeric::roots::{gaussian_root_refined, isolate_roots};
use crate::series::{Embedding, Sign, TruncatedSeries, Valuation};

pub(crate) type S = TruncatedSeries<Scalar>;

/// Reductions allowed before the loop is declared runaway.
const MAX_REDUCTIONS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum BlockKind {
    Sym,
    Cyclic(usize),
}

#[derive(Clone, Debug)]
pub(crate) struct Block {
    pub leaf: usize,
    pub kind: BlockKind,
    pub ctx: FieldCtx,
    /// `Sym`: `b_1..b_n` of `z^n + b_1 z^(n-1) + ... + b_n`; `Cyclic`: `[c]`.
    pub comps: Vec<S>,
    pub offset: S,
    pub scale: usize,
    pub replication: usize,
    /// A root of the value at `s = 0` whose cluster alone is to be kept.
    pub pinned: Option<Scalar>,
}

impl Block {
    pub fn sym(leaf: usize, ctx: FieldCtx, comps: Vec<S>, replication: usize) -> Self {
        Self { leaf, kind: BlockKind::Sym, ctx, comps, offset: S::zero(), scale: 0, replication, pinned: None }
    }

    pub fn cyclic(leaf: usize, m: usize, ctx: FieldCtx, c: S) -> Self {
        Self { leaf, kind: BlockKind::Cyclic(m), ctx, comps: vec![c], offset: S::zero(), scale: 0, replication: 1, pinned: None }
    }

    fn poly(&self) -> SeriesPoly<Scalar> {
        let mut coeffs: Vec<S> = self.comps.iter().rev().cloned().collect();
        coeffs.push(S::one());
        Poly::new(coeffs)
    }

    fn with_poly(&self, p: &SeriesPoly<Scalar>) -> Self {
        let n = p.deg();
        let comps = (1..=n).map(|k| p.coeff(n - k)).collect();
        Self { comps, pinned: None, ..self.clone() }
    }

    fn restrict(&self, factor: &Poly<G>) -> Result<Self, AlgebraError> {
        let m = Modulus::new(factor.clone())?;
        let ctx = self.ctx.restrict(&m);
        let red = |s: &S| s.map(|x| ctx.reduce(x));
        Ok(Self {
            comps: self.comps.iter().map(red).collect(),
            offset: red(&self.offset),
            pinned: self.pinned.as_ref().map(|p| ctx.reduce(p)),
            ctx,
            ..self.clone()
        })
    }

    /// `offset + s^scale * r`.
    fn place(&self, r: &S) -> S {
        self.offset.add_series(&r.shift_up(self.scale))
    }

    fn weights(&self) -> Vec<usize> {
        match self.kind {
            BlockKind::Sym => (1..=self.comps.len()).collect(),
            BlockKind::Cyclic(m) => vec![m],
        }
    }
}

/// A finished root series in the final parameter.
#[derive(Clone, Debug)]
pub(crate) struct Resolved {
    pub leaf: usize,
    pub ctx: FieldCtx,
    pub root: S,
    pub replication: usize,
    /// For a cyclic leaf over an extension, the embedding singled out by the
    /// principal-root convention.
    pub chosen: Option<Embedding>,
}

enum Outcome {
    Waiting(Block),
    Done(Resolved),
    Again(Block),
}

pub(crate) struct EngineOutput {
    pub resolved: Vec<Resolved>,
    pub trace: Vec<ReductionStep>,
    pub ramification: usize,
}

struct Engine<'a> {
    base: &'a FieldCtx,
    budget: usize,
    requested: usize,
}

fn split_parts(e: &LiftError) -> Option<(&Poly<G>, &Poly<G>, &Poly<G>)> {
    let a = match e {
        LiftError::Algebra(a) => a,
        LiftError::Series(crate::series::SeriesError::Algebra(a)) => a,
        _ => return None,
    };
    match a {
        AlgebraError::SplitRequest { modulus, factor, cofactor } => Some((modulus, factor, cofactor)),
        _ => None,
    }
}

fn g_scalar(n: i64, d: i64) -> Scalar {
    Scalar::Gaussian(G::from_ratio(n, d))
}

fn is_exact_zero(s: &S) -> bool {
    s.is_exact() && s.coeffs().is_empty()
}

/// Marks Hensel factors exact when their truncations multiply back to `f`
/// exactly.
fn exactify(f: &SeriesPoly<Scalar>, factors: Vec<SeriesPoly<Scalar>>) -> Vec<SeriesPoly<Scalar>> {
    if !f.coeffs().iter().all(|c| c.is_exact()) {
        return factors;
    }
    let exact: Vec<SeriesPoly<Scalar>> =
        factors.iter().map(|g| Poly::new(g.coeffs().iter().map(|c| c.with_order(None)).collect())).collect();
    // Cheap rejection at one rational parameter before the full product.
    let x = probe_point();
    let at = |p: &SeriesPoly<Scalar>| -> Poly<Scalar> { Poly::new(p.coeffs().iter().map(|c| c.eval(&x)).collect()) };
    let mut prod0: Poly<Scalar> = Poly::one();
    for g in &exact {
        prod0 = prod0.mul_poly(&at(g));
    }
    if prod0 != at(f) {
        return factors;
    }
    let mut prod: SeriesPoly<Scalar> = Poly::one();
    for g in &exact {
        prod = prod.mul_poly(g);
    }
    if prod == *f {
        exact
    } else {
        factors
    }
}

fn probe_point() -> Scalar {
    g_scalar(7, 3)
}

fn exactify_root(f: &SeriesPoly<Scalar>, r: S) -> S {
    if !f.coeffs().iter().all(|c| c.is_exact()) {
        return r;
    }
    let e = r.with_order(None);
    let x = probe_point();
    let ex = e.eval(&x);
    let mut v = Scalar::zero();
    for c in f.coeffs().iter().rev() {
        v = v.mul(&ex).add(&c.eval(&x));
    }
    if !v.is_zero() {
        return r;
    }
    let mut acc = S::zero();
    for c in f.coeffs().iter().rev() {
        acc = acc.mul_series(&e).add_series(c);
    }
    if is_exact_zero(&acc) {
        e
    } else {
        r
    }
}

/// One factor of the value at `s = 0` along which a block is split.
enum Cluster {
    Linear { root: Scalar, mult: usize },
    Extension { poly: Poly<Scalar>, mult: usize },
}

impl Cluster {
    fn poly0(&self) -> Poly<Scalar> {
        match self {
            Cluster::Linear { root, mult } => Poly::linear_root(root).pow_poly(*mult as u32),
            Cluster::Extension { poly, mult } => poly.pow_poly(*mult as u32),
        }
    }

    fn sizes(&self) -> Vec<usize> {
        match self {
            Cluster::Linear { mult, .. } => vec![*mult],
            Cluster::Extension { poly, mult } => vec![*mult; poly.deg()],
        }
    }
}

/// Gaussian roots of a polynomial with Gaussian coefficients.
fn gaussian_roots(p: &Poly<G>) -> Result<Vec<G>, LiftError> {
    let discs = isolate_roots(p).map_err(|e| LiftError::CertificateFailed(e.to_string()))?;
    Ok(discs.iter().filter_map(|d| gaussian_root_refined(p, d)).collect())
}

fn clusters(p0: &Poly<Scalar>) -> Result<Vec<Cluster>, LiftError> {
    let mut out = Vec::new();
    for (g, mult) in squarefree_decomposition(p0)? {
        if g.deg() == 1 {
            out.push(Cluster::Linear { root: g.coeff(0).neg(), mult });
            continue;
        }
        let mut rest = g.clone();
        if let Ok(gg) = g.try_map(|c| c.as_gaussian().cloned().ok_or(())) {
            for r in gaussian_roots(&gg)? {
                let root = Scalar::Gaussian(r);
                rest = rest.div_exact_field(&Poly::linear_root(&root))?;
                out.push(Cluster::Linear { root, mult });
            }
        }
        match rest.deg() {
            0 => {}
            1 => out.push(Cluster::Linear { root: rest.coeff(0).neg(), mult }),
            _ => out.push(Cluster::Extension { poly: rest, mult }),
        }
    }
    Ok(out)
}

impl Engine<'_> {
    /// Runs `f` on the block, splitting the block whenever its modulus
    /// reports a zero divisor.
    fn guarded<T>(&self, b: Block, mut f: impl FnMut(&Block) -> Result<T, LiftError>) -> Result<Vec<(Block, T)>, LiftError> {
        let mut work = vec![b];
        let mut out = Vec::new();
        while let Some(b) = work.pop() {
            match f(&b) {
                Ok(v) => out.push((b, v)),
                Err(e) => {
                    let Some((modulus, factor, cofactor)) = split_parts(&e) else { return Err(e) };
                    if !b.ctx.is_modulus(modulus) {
                        return Err(e);
                    }
                    if b.ctx.modulus == self.base.modulus {
                        return Err(LiftError::BaseSplit { factor: factor.clone(), cofactor: cofactor.clone() });
                    }
                    work.push(b.restrict(cofactor)?);
                    work.push(b.restrict(factor)?);
                }
            }
        }
        Ok(out)
    }

    fn process(&self, b: &Block) -> Result<(Vec<ReductionStep>, Vec<Outcome>), LiftError> {
        match b.kind {
            BlockKind::Sym if b.pinned.is_some() => self.process_pinned(b),
            BlockKind::Sym => self.process_sym(b),
            BlockKind::Cyclic(m) => self.process_cyclic(b, m),
        }
    }

    fn done(&self, b: &Block, root: S, replication: usize) -> Outcome {
        Outcome::Done(Resolved { leaf: b.leaf, ctx: b.ctx.clone(), root, replication, chosen: None })
    }

    fn process_sym(&self, b: &Block) -> Result<(Vec<ReductionStep>, Vec<Outcome>), LiftError> {
        let n = b.comps.len();
        let mut steps = Vec::new();
        if b.comps.iter().all(is_exact_zero) {
            steps.push(ReductionStep::ZeroCurve);
            return Ok((steps, vec![self.done(b, b.offset.clone(), n * b.replication)]));
        }
        if n == 1 {
            return Ok((steps, vec![self.done(b, b.place(&b.comps[0].neg_series()), b.replication)]));
        }
        let mut b = b.clone();
        let center = b.comps[0].neg_series().scale(&g_scalar(1, n as i64));
        if !center.coeffs().is_empty() {
            let shifted = b.poly().taylor_shift(&center);
            b = b.with_poly(&shifted);
            b.offset = b.place(&center);
            steps.push(ReductionStep::RemoveFixed);
        }
        b.comps[0] = S::zero();
        if b.comps.iter().all(is_exact_zero) {
            steps.push(ReductionStep::ZeroCurve);
            return Ok((steps, vec![self.done(&b, b.offset.clone(), n * b.replication)]));
        }
        let mut at_origin = true;
        for c in &b.comps {
            if !c.coeff(0).is_zero_checked()? {
                at_origin = false;
            }
        }
        if at_origin {
            return Ok((steps, vec![Outcome::Waiting(b)]));
        }
        let p = b.poly();
        let p0 = Poly::new(p.coeffs().iter().map(|c| c.coeff(0)).collect());
        let parts = clusters(&p0)?;
        let mut sizes: Vec<usize> = parts.iter().flat_map(|c| c.sizes()).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        if sizes.iter().all(|&k| k == 1) {
            steps.push(ReductionStep::Principal);
        } else {
            steps.push(ReductionStep::SliceSplit { clusters: sizes });
        }
        let factors0: Vec<Poly<Scalar>> = parts.iter().map(Cluster::poly0).collect();
        let factors = exactify(&p, hensel_split(&p, &factors0, self.budget)?);
        let mut out = Vec::new();
        for (f, part) in factors.iter().zip(&parts) {
            match part {
                Cluster::Linear { mult: 1, .. } => out.push(self.done(&b, b.place(&f.coeff(0).neg_series()), b.replication)),
                Cluster::Linear { .. } => out.push(Outcome::Again(b.with_poly(f))),
                Cluster::Extension { poly, .. } => {
                    for ext in extend(&b.ctx, poly)? {
                        let map = |x: &Scalar| match &ext.old_generator {
                            Some(img) => x.map_generator(img),
                            None => x.clone(),
                        };
                        let fm: SeriesPoly<Scalar> = f.map(|c| c.map(map));
                        let mut nb = b.with_poly(&fm);
                        nb.offset = b.offset.map(map);
                        nb.ctx = ext.ctx.clone();
                        nb.pinned = Some(ext.root.clone());
                        out.push(Outcome::Again(nb));
                    }
                }
            }
        }
        Ok((steps, out))
    }

    /// Splits off the cluster of the pinned root of the value at `s = 0`.
    fn process_pinned(&self, b: &Block) -> Result<(Vec<ReductionStep>, Vec<Outcome>), LiftError> {
        let y = b.pinned.clone().expect("pinned block");
        let p = b.poly();
        let p0: Poly<Scalar> = Poly::new(p.coeffs().iter().map(|c| c.coeff(0)).collect());
        let lin = Poly::linear_root(&y);
        let mut mult = 0;
        let mut rest = p0.clone();
        loop {
            let (q, r) = rest.div_rem(&lin)?;
            let mut zero = true;
            for c in r.coeffs() {
                if !c.is_zero_checked()? {
                    zero = false;
                }
            }
            if !zero {
                break;
            }
            mult += 1;
            rest = q;
        }
        let mut b = b.clone();
        b.pinned = None;
        let first = lin.pow_poly(mult as u32);
        let factors = if rest.deg() == 0 {
            vec![p.clone()]
        } else {
            exactify(&p, hensel_split(&p, &[first, rest], self.budget)?)
        };
        let f = &factors[0];
        let out = if mult == 1 {
            self.done(&b, b.place(&exactify_root(&p, f.coeff(0).neg_series())), b.replication)
        } else {
            Outcome::Again(b.with_poly(f))
        };
        Ok((Vec::new(), vec![out]))
    }

    fn process_cyclic(&self, b: &Block, m: usize) -> Result<(Vec<ReductionStep>, Vec<Outcome>), LiftError> {
        let c = &b.comps[0];
        if is_exact_zero(c) {
            return Ok((vec![ReductionStep::ZeroCurve], vec![self.done(b, S::zero(), 1)]));
        }
        if m == 1 {
            return Ok((vec![ReductionStep::Principal], vec![self.done(b, c.shift_up(b.scale), 1)]));
        }
        let c0 = c.coeff(0);
        if c0.is_zero_checked()? {
            return Ok((Vec::new(), vec![Outcome::Waiting(b.clone())]));
        }
        let g0 = c0
            .as_gaussian()
            .cloned()
            .ok_or_else(|| LiftError::Unsupported("cyclic coordinate over an extension field".into()))?;
        let (re, im) = g0.to_f64_pair();
        let principal = Complex64::new(re, im).powf(1.0 / m as f64);
        let target = (principal.re, principal.im);
        let zm: Poly<G> = Poly::monomial(G::one(), m).sub_poly(&Poly::constant(g0.clone()));
        let discs = isolate_roots(&zm).map_err(|e| LiftError::CertificateFailed(e.to_string()))?;
        let dist = |g: &G| {
            let (a, b) = g.to_f64_pair();
            (a - target.0).hypot(b - target.1)
        };
        let nearest = discs
            .iter()
            .min_by(|a, b| dist(&a.center).total_cmp(&dist(&b.center)))
            .expect("at least one root");
        let (ctx, rho, chosen) = match gaussian_root_refined(&zm, nearest) {
            Some(r) => (b.ctx.clone(), Scalar::Gaussian(r), None),
            None => {
                let mut nu = zm.clone();
                for d in &discs {
                    if let Some(r) = gaussian_root_refined(&zm, d) {
                        nu = nu.div_exact_field(&Poly::linear_root(&r))?;
                    }
                }
                let nu_s: Poly<Scalar> = nu.map(|c| Scalar::Gaussian(c.clone()));
                let ext = extend(&FieldCtx::gaussian(), &nu_s)?.remove(0);
                let embs = compatible_embeddings(&ext.ctx, None)?;
                let chosen = closest_embedding(&embs, &ext.root, target);
                (ext.ctx, ext.root, Some(chosen))
            }
        };
        let unit = c.scale(&Scalar::Gaussian(g0.inv()?));
        let r = unit.rational_power(1, m as i64, self.budget)?.scale(&rho);
        let r = exactify_root(&Poly::new(vec![c.neg_series(), S::zero()]).add_poly(&Poly::monomial(S::one(), m)), r);
        let out = Outcome::Done(Resolved { leaf: b.leaf, ctx, root: r.shift_up(b.scale), replication: 1, chosen });
        Ok((vec![ReductionStep::Principal], vec![out]))
    }

    /// `(min ratio, least undetermined bound)` over the components.
    fn ratios(b: &Block) -> Result<(Option<BigRational>, Option<BigRational>), LiftError> {
        let mut best: Option<BigRational> = None;
        let mut unknown: Option<BigRational> = None;
        for (c, w) in b.comps.iter().zip(b.weights()) {
            if b.kind == BlockKind::Sym && w == 1 {
                continue;
            }
            let q = |v: usize| BigRational::new(BigInt::from(v), BigInt::from(w));
            match c.valuation()? {
                Valuation::Finite(v) => best = Some(best.map_or(q(v), |x| x.min(q(v)))),
                Valuation::UndeterminedAtOrder(t) => unknown = Some(unknown.map_or(q(t + 1), |x| x.min(q(t + 1)))),
                Valuation::Infinity => {}
            }
        }
        Ok((best, unknown))
    }
}

fn substitute(s: &S, d: usize, sign: Sign) -> S {
    s.substitute_power(d, sign)
}

/// Runs the loop for one reparameterization sign.
pub(crate) fn run(blocks: Vec<Block>, base: &FieldCtx, sign: Sign, budget: usize, requested: usize) -> Result<EngineOutput, LiftError> {
    let engine = Engine { base, budget, requested };
    let mut trace = Vec::new();
    let mut resolved: Vec<Resolved> = Vec::new();
    let mut pending = blocks;
    let mut ramification = 1usize;
    let mut reductions = 0usize;
    loop {
        let mut queue: VecDeque<Block> = pending.drain(..).collect();
        let mut waiting = Vec::new();
        while let Some(b) = queue.pop_front() {
            for (_, (steps, outs)) in engine.guarded(b, |b| engine.process(b))? {
                trace.extend(steps);
                for o in outs {
                    match o {
                        Outcome::Waiting(b) => waiting.push(b),
                        Outcome::Done(r) => resolved.push(r),
                        Outcome::Again(b) => queue.push_back(b),
                    }
                }
            }
        }
        if waiting.is_empty() {
            break;
        }
        let mut m: Option<BigRational> = None;
        let mut unknown: Option<BigRational> = None;
        let mut blocks = Vec::new();
        for b in waiting {
            for (b, (best, unk)) in engine.guarded(b, Engine::ratios)? {
                if let Some(q) = best {
                    m = Some(m.map_or(q.clone(), |x| x.min(q)));
                }
                if let Some(q) = unk {
                    unknown = Some(unknown.map_or(q.clone(), |x| x.min(q)));
                }
                blocks.push(b);
            }
        }
        let Some(m) = m else {
            return Err(LiftError::NonflatUndetermined(engine.requested));
        };
        if unknown.is_some_and(|u| u < m) {
            return Err(LiftError::NonflatUndetermined(engine.requested));
        }
        let d = (BigRational::one() / &m).ceil().to_integer().to_usize().expect("small reduction exponent");
        let m_next = &m * BigRational::from_integer(BigInt::from(d)) - BigRational::one();
        trace.push(ReductionStep::Reduce { m, d, m_next });
        let s = if reductions == 0 { sign } else { Sign::Plus };
        for b in &mut blocks {
            let weights = b.weights();
            for (c, w) in b.comps.iter_mut().zip(weights) {
                *c = substitute(c, d, s).shift_divide(w)?;
            }
            b.offset = substitute(&b.offset, d, s);
            b.scale = b.scale * d + 1;
        }
        for r in &mut resolved {
            r.root = substitute(&r.root, d, s);
        }
        ramification *= d;
        reductions += 1;
        if reductions > MAX_REDUCTIONS {
            return Err(LiftError::CertificateFailed("reduction loop did not terminate".into()));
        }
        pending = blocks;
    }
    Ok(EngineOutput { resolved, trace, ramification })
}

/// `lcm` helper for combining ramification indices.
pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a.lcm(&b)
}

/// A cluster produced by a single slice split, recentered at its mean.
pub(crate) struct SplitPiece {
    pub ctx: FieldCtx,
    pub center: S,
    pub comps: Vec<S>,
    pub replication: usize,
}

fn recentered(b: &Block) -> SplitPiece {
    let n = b.comps.len();
    let center = b.comps[0].neg_series().scale(&g_scalar(1, n as i64));
    let shifted = b.poly().taylor_shift(&center);
    let mut comps: Vec<S> = (1..=n).map(|k| shifted.coeff(n - k)).collect();
    comps[0] = S::zero();
    SplitPiece { ctx: b.ctx.clone(), center: b.place(&center), comps, replication: b.replication }
}

/// Splits a `Sym` block once along the distinct roots of its value at
/// `s = 0`.
pub(crate) fn split_block(block: Block, base: &FieldCtx, budget: usize) -> Result<Vec<SplitPiece>, LiftError> {
    if block.comps.len() < 2 {
        return Err(LiftError::NotSplittable);
    }
    let engine = Engine { base, budget, requested: budget };
    let mut out = Vec::new();
    let mut queue: VecDeque<(Block, bool)> = VecDeque::from([(block, true)]);
    while let Some((b, first)) = queue.pop_front() {
        if !first && b.pinned.is_none() {
            out.push(recentered(&b));
            continue;
        }
        for (_, (steps, outs)) in engine.guarded(b, |b| engine.process(b))? {
            if first && steps.contains(&ReductionStep::ZeroCurve) {
                return Err(LiftError::NotSplittable);
            }
            for o in outs {
                match o {
                    Outcome::Waiting(_) => return Err(LiftError::NotSplittable),
                    Outcome::Done(r) => out.push(SplitPiece {
                        ctx: r.ctx,
                        center: r.root,
                        comps: vec![S::zero()],
                        replication: r.replication,
                    }),
                    Outcome::Again(b) => queue.push_back((b, false)),
                }
            }
        }
    }
    Ok(out)
}
