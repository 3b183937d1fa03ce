//! Coefficient fields for the lifting engine.
//!
//! A field is either `Q(i)` or `Q(i)[w]/(nu)` for a squarefree `nu`. When the
//! base point is irrational the base field is itself an extension, and a
//! further extension is collapsed to a single modulus with a primitive
//! element `w = y + lambda x`.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::subresultant::resultant;
use crate::algebra::{AlgebraError, GaussianRational as G, Modulus, Poly, Ring, Scalar};
use crate::numeric::interval::ComplexInterval;
use crate::numeric::roots::{isolate_roots, refine_root, RootDisc};
use crate::series::{image_in, Embedding};

/// Largest collapsed extension degree the engine will build.
pub const TOWER_CAP: usize = 48;

#[derive(Clone, Debug, PartialEq)]
pub struct FieldCtx {
    pub modulus: Option<Arc<Modulus>>,
    /// Image of the generator of the base field, if that is an extension.
    pub base_image: Option<Scalar>,
}

/// A new field with a root of the extending polynomial.
#[derive(Clone, Debug)]
pub struct Extension {
    pub ctx: FieldCtx,
    /// Image of the old generator, `None` when the old field was `Q(i)`.
    pub old_generator: Option<Scalar>,
    pub root: Scalar,
}

impl FieldCtx {
    pub fn gaussian() -> Self {
        Self { modulus: None, base_image: None }
    }

    /// `Q(i)[x]/(q)` as the base field, `x` the base point.
    pub fn base(m: &Arc<Modulus>) -> Self {
        Self { modulus: Some(Arc::clone(m)), base_image: Some(m.generator()) }
    }

    pub fn degree(&self) -> usize {
        self.modulus.as_ref().map_or(1, |m| m.degree())
    }

    pub fn is_modulus(&self, p: &Poly<G>) -> bool {
        self.modulus.as_ref().is_some_and(|m| m.poly() == p)
    }

    /// The field over one factor of this modulus.
    pub fn restrict(&self, factor: &Arc<Modulus>) -> Self {
        Self { modulus: Some(Arc::clone(factor)), base_image: self.base_image.as_ref().map(|b| b.reduce_mod(factor)) }
    }

    /// Moves a scalar from the field this one was split from.
    pub fn reduce(&self, x: &Scalar) -> Scalar {
        match &self.modulus {
            Some(m) => x.reduce_mod(m),
            None => x.clone(),
        }
    }

    /// Trace down to `Q(i)`.
    pub fn trace(&self, x: &Scalar, power_sums: &[G]) -> G {
        match x {
            Scalar::Gaussian(g) => g.mul(&G::from_int(self.degree() as i64)),
            Scalar::Algebraic(a) => {
                let mut acc = G::zero();
                for (k, c) in a.residue().coeffs().iter().enumerate() {
                    acc = acc.add(&c.mul(&power_sums[k]));
                }
                acc
            }
        }
    }

    /// Power sums `p_0, ..., p_{D-1}` of the roots of the modulus.
    pub fn power_sums(&self) -> Vec<G> {
        match &self.modulus {
            None => vec![G::one()],
            Some(m) => power_sums(m.poly(), m.degree()),
        }
    }
}

/// Power sums `p_0..p_{count-1}` of the roots of monic `p`, by Newton's
/// identities.
pub fn power_sums(p: &Poly<G>, count: usize) -> Vec<G> {
    let n = p.deg();
    // e-coefficients: p = z^n + c_1 z^(n-1) + ... + c_n
    let c = |k: usize| if k <= n { p.coeff(n - k) } else { G::zero() };
    let mut out = vec![G::from_int(n as i64)];
    for j in 1..count {
        let mut acc = c(j).mul(&G::from_int(j as i64));
        for i in 1..j {
            acc = acc.add(&c(i).mul(&out[j - i]));
        }
        out.push(acc.neg());
    }
    out.truncate(count);
    out
}

/// Adjoins a root of `g`, a monic polynomial over `ctx` of degree at least 2
/// that is squarefree over every factor of the modulus. The result is one
/// field per factor of the collapsed modulus met along the way.
pub fn extend(ctx: &FieldCtx, g: &Poly<Scalar>) -> Result<Vec<Extension>, AlgebraError> {
    let k = g.deg();
    let Some(mu) = &ctx.modulus else {
        let gg = g.try_map(|c| c.as_gaussian().cloned().ok_or(AlgebraError::InexactDivision))?;
        if k > TOWER_CAP {
            return Err(AlgebraError::UnsupportedTower(format!("extension of degree {k}")));
        }
        let m = Modulus::new(gg)?;
        let root = m.generator();
        return Ok(vec![Extension { ctx: FieldCtx { modulus: Some(m), base_image: None }, old_generator: None, root }]);
    };
    let total = mu.degree() * k;
    if total > TOWER_CAP {
        return Err(AlgebraError::UnsupportedTower(format!("collapsed degree {total} exceeds {TOWER_CAP}")));
    }
    for lambda in [1i64, -1, 2, -2, 3, -3, 5, 7, 11, 13] {
        if let Some(out) = try_primitive(ctx, mu, g, lambda)? {
            return Ok(out);
        }
    }
    Err(AlgebraError::UnsupportedTower("no separating primitive element".into()))
}

type Biv = Poly<Poly<G>>;

fn try_primitive(
    ctx: &FieldCtx,
    mu: &Arc<Modulus>,
    g: &Poly<Scalar>,
    lambda: i64,
) -> Result<Option<Vec<Extension>>, AlgebraError> {
    let k = g.deg();
    let lam = G::from_int(lambda);
    // (w - lambda x) as a polynomial in x over Q(i)[w]
    let lin: Biv = Poly::new(vec![Poly::var(), Poly::constant(lam.neg())]);
    let mut big: Biv = Poly::zero();
    let mut pow: Biv = Poly::one();
    for j in 0..=k {
        let r: Biv = g.coeff(j).residue().map(|c| Poly::constant(c.clone()));
        big = big.add_poly(&r.mul_poly(&pow));
        pow = pow.mul_poly(&lin);
    }
    let mu_x: Biv = mu.poly().map(|c| Poly::constant(c.clone()));
    let big = big.pseudo_rem(&mu_x);
    if big.is_zero() {
        return Ok(None);
    }
    let nu = if big.deg() == 0 { big.coeff(0).pow_poly(mu.degree() as u32) } else { resultant(&mu_x, &big)? };
    if nu.deg() != mu.degree() * k {
        return Ok(None);
    }
    let nu = nu.monic()?;
    if nu.gcd(&nu.derivative())?.deg() > 0 {
        return Ok(None);
    }
    let mut work = vec![Modulus::new(nu)?];
    let mut out = Vec::new();
    while let Some(m) = work.pop() {
        let w = m.generator();
        let into_m = |p: &Biv| -> Poly<Scalar> {
            p.map(|c| {
                let mut acc = Scalar::zero();
                for a in c.coeffs().iter().rev() {
                    acc = acc.mul(&w).add(&Scalar::Gaussian(a.clone()));
                }
                acc
            })
        };
        let common = into_m(&mu_x).gcd(&into_m(&big));
        match common {
            Ok(d) if d.deg() == 1 => {
                let xi = d.coeff(0).neg();
                let root = w.sub(&xi.mul(&Scalar::Gaussian(lam.clone())));
                let base_image = ctx.base_image.as_ref().map(|b| b.map_generator(&xi));
                out.push(Extension {
                    ctx: FieldCtx { modulus: Some(Arc::clone(&m)), base_image },
                    old_generator: Some(xi),
                    root,
                });
            }
            Ok(_) => return Ok(None),
            Err(AlgebraError::SplitRequest { modulus, factor, cofactor }) if &modulus == m.poly() => {
                work.push(Modulus::new(cofactor)?);
                work.push(Modulus::new(factor)?);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Some(out))
}

/// Whether the box lies inside the closed disc.
pub fn box_inside(b: &ComplexInterval, d: &RootDisc) -> bool {
    let dx = (&b.re.lo - &d.center.re).abs().max((&b.re.hi - &d.center.re).abs());
    let dy = (&b.im.lo - &d.center.im).abs().max((&b.im.hi - &d.center.im).abs());
    &dx * &dx + &dy * &dy < &d.radius * &d.radius
}

/// Whether the box misses the closed disc.
pub fn box_outside(b: &ComplexInterval, d: &RootDisc) -> bool {
    let gap = |lo: &BigRational, hi: &BigRational, c: &BigRational| {
        if c < lo {
            lo - c
        } else if c > hi {
            c - hi
        } else {
            BigRational::zero()
        }
    };
    let dx = gap(&b.re.lo, &b.re.hi, &d.center.re);
    let dy = gap(&b.im.lo, &b.im.hi, &d.center.im);
    &dx * &dx + &dy * &dy > &d.radius * &d.radius
}

fn pow2_neg(bits: u32) -> BigRational {
    BigRational::new(1.into(), num_bigint::BigInt::one() << bits)
}

/// Decides whether `x` under the embedding lies in the isolating disc
/// `target`, given that it lies in exactly one of a family of disjoint
/// isolating discs containing `target`.
pub fn image_in_disc(x: &Scalar, emb: &Embedding, target: &RootDisc) -> bool {
    let mut bits = 32u32;
    loop {
        let b = emb.image(x, bits);
        if box_inside(&b, target) {
            return true;
        }
        if box_outside(&b, target) {
            return false;
        }
        bits *= 2;
        assert!(bits <= 1 << 15, "embedding comparison did not separate");
    }
}

/// Embeddings of `ctx` into the complex numbers that send the base
/// generator into `base_disc` (all embeddings for a rational base point).
pub fn compatible_embeddings(ctx: &FieldCtx, base_disc: Option<&RootDisc>) -> Result<Vec<Embedding>, AlgebraError> {
    let Some(m) = &ctx.modulus else { return Ok(Vec::new()) };
    let discs = isolate_roots(m.poly()).map_err(|e| AlgebraError::UnsupportedTower(e.to_string()))?;
    let mut out = Vec::new();
    for d in discs {
        let emb = Embedding { modulus: m.poly().clone(), disc: d };
        let keep = match (base_disc, &ctx.base_image) {
            (Some(bd), Some(img)) => image_in_disc(img, &emb, bd),
            _ => true,
        };
        if keep {
            out.push(emb);
        }
    }
    Ok(out)
}

/// The embedding among `embs` whose image of `x` is closest to `target`,
/// certified by interval separation.
pub fn closest_embedding(embs: &[Embedding], x: &Scalar, target: (f64, f64)) -> Embedding {
    let dist = |e: &Embedding| {
        let (re, im) = image_in(x, &refine_root(&e.modulus, &e.disc, &pow2_neg(60)).to_box(), 60).to_f64();
        (re - target.0).hypot(im - target.1)
    };
    let mut best = embs[0].clone();
    let mut bd = dist(&best);
    for e in &embs[1..] {
        let d = dist(e);
        if d < bd {
            bd = d;
            best = e.clone();
        }
    }
    best
}
