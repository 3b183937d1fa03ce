//! Certified isolation of the complex roots of a squarefree polynomial.
//!
//! Approximations come from the Aberth iteration, first in `f64` and then in
//! rounded rational arithmetic. A disc of radius `n |p(z)| / |p'(z)|` around
//! any point `z` contains a root of `p`; when the `n` discs around the
//! approximations are pairwise disjoint each holds exactly one root.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{Field, GaussianRational as G, Poly, Ring};

use super::interval::{ceil_dyadic, floor_dyadic, sqrt_upper, ComplexInterval, Interval};
use super::NumericError;

/// A disc `|z - center| <= radius` containing exactly one root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDisc {
    pub center: G,
    pub radius: BigRational,
}

impl RootDisc {
    pub fn exact(center: G) -> Self {
        Self { center, radius: BigRational::zero() }
    }

    /// Bounding box of the disc.
    pub fn to_box(&self) -> ComplexInterval {
        ComplexInterval::disc_box(&self.center.re, &self.center.im, &self.radius)
    }

    pub fn approx(&self) -> Complex64 {
        let (re, im) = self.center.to_f64_pair();
        Complex64::new(re, im)
    }

    /// Whether the disc meets the real axis.
    pub fn meets_real_axis(&self) -> bool {
        self.center.im.abs() <= self.radius
    }

    pub fn is_exact(&self) -> bool {
        self.radius.is_zero()
    }
}

pub(crate) fn round_g(z: &G, bits: u32) -> G {
    G::new(round_rat(&z.re, bits), round_rat(&z.im, bits))
}

fn round_rat(q: &BigRational, bits: u32) -> BigRational {
    let lo = floor_dyadic(q, bits);
    let hi = ceil_dyadic(q, bits);
    if (q - &lo) <= (&hi - q) {
        lo
    } else {
        hi
    }
}

/// `(p(z), p'(z))` exactly.
pub fn eval_with_derivative(p: &Poly<G>, z: &G) -> (G, G) {
    let mut v = G::zero();
    let mut d = G::zero();
    for c in p.coeffs().iter().rev() {
        d = d.mul(z).add(&v);
        v = v.mul(z).add(c);
    }
    (v, d)
}

fn to_c64(g: &G) -> Complex64 {
    let (re, im) = g.to_f64_pair();
    Complex64::new(re, im)
}

fn from_c64(z: Complex64) -> G {
    let re = BigRational::from_float(z.re).unwrap_or_else(BigRational::zero);
    let im = BigRational::from_float(z.im).unwrap_or_else(BigRational::zero);
    G::new(re, im)
}

/// Aberth iteration in double precision.
pub fn aberth_f64(p: &Poly<G>) -> Vec<Complex64> {
    let n = p.deg();
    let lc = to_c64(&p.lc());
    let a: Vec<Complex64> = p.coeffs().iter().map(|c| to_c64(c) / lc).collect();
    let mut bound: f64 = 0.0;
    for k in 0..n {
        let m = a[k].norm();
        if m > 0.0 {
            bound = bound.max(m.powf(1.0 / (n - k) as f64));
        }
    }
    let radius = if bound > 0.0 { bound } else { 1.0 };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut biggest: f64 = 0.0;
        for i in 0..n {
            let (mut v, mut d) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for c in a.iter().rev() {
                d = d * z[i] + v;
                v = v * z[i] + c;
            }
            if d.norm() == 0.0 {
                z[i] += Complex64::new(1e-8, 1e-8);
                continue;
            }
            let ratio = v / d;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                biggest = biggest.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if biggest < 1e-15 {
            break;
        }
    }
    z
}

/// One Aberth sweep in rational arithmetic rounded to `bits`. Returns the
/// largest squared correction.
fn aberth_exact_step(p: &Poly<G>, z: &mut [G], bits: u32) -> Option<BigRational> {
    let n = z.len();
    let mut biggest = BigRational::zero();
    for i in 0..n {
        let (v, d) = eval_with_derivative(p, &z[i]);
        if Ring::is_zero(&d) {
            return None;
        }
        let ratio = round_g(&v.div(&d).ok()?, bits);
        let mut s = G::zero();
        for j in 0..n {
            if j != i {
                let diff = z[i].sub(&z[j]);
                if Ring::is_zero(&diff) {
                    return None;
                }
                s = s.add(&round_g(&diff.inv().ok()?, bits));
            }
        }
        let denom = G::one().sub(&ratio.mul(&round_g(&s, bits)));
        let w = if Ring::is_zero(&denom) { ratio } else { round_g(&ratio.div(&denom).ok()?, bits) };
        biggest = biggest.max(w.norm_sqr());
        z[i] = round_g(&z[i].sub(&w), bits);
    }
    Some(biggest)
}

/// Radius bound `n |p(z)| / |p'(z)|` rounded up.
fn inclusion_radius(p: &Poly<G>, z: &G, bits: u32) -> Option<BigRational> {
    let n = BigRational::from_integer(BigInt::from(p.deg()));
    let (v, d) = eval_with_derivative(p, z);
    let dn = d.norm_sqr();
    if dn.is_zero() {
        return None;
    }
    let r2 = &n * &n * v.norm_sqr() / dn;
    Some(sqrt_upper(&r2, bits + 8))
}

fn certify(p: &Poly<G>, z: &[G], bits: u32) -> Option<Vec<RootDisc>> {
    let mut discs = Vec::with_capacity(z.len());
    for zi in z {
        discs.push(RootDisc { center: zi.clone(), radius: inclusion_radius(p, zi, bits)? });
    }
    for i in 0..discs.len() {
        for j in i + 1..discs.len() {
            let dist2 = discs[i].center.sub(&discs[j].center).norm_sqr();
            let rr = &discs[i].radius + &discs[j].radius;
            if dist2 <= &rr * &rr {
                return None;
            }
        }
    }
    Some(discs)
}

/// Isolates all complex roots of a squarefree polynomial. The discs are
/// pairwise disjoint and sorted lexicographically by center.
pub fn isolate_roots(p: &Poly<G>) -> Result<Vec<RootDisc>, NumericError> {
    let n = p.degree().ok_or_else(|| NumericError::NotCertified("zero polynomial".into()))?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        let r = p.coeff(0).neg().div(&p.coeff(1)).expect("nonzero leading coefficient");
        return Ok(vec![RootDisc::exact(r)]);
    }
    let approx = aberth_f64(p);
    // Start with enough bits to keep close roots apart.
    let sep = (0..n)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .map(|(i, j)| (approx[i] - approx[j]).norm())
        .filter(|d| *d > 0.0)
        .fold(1.0f64, f64::min);
    let mut bits = 64u32.max(64 + (-sep.log2()).ceil().max(0.0) as u32);
    let mut z: Vec<G> = approx.into_iter().map(from_c64).collect();
    while bits <= 8192 {
        for _ in 0..80 {
            let Some(w2) = aberth_exact_step(p, &mut z, bits) else {
                // A critical point or coincident iterates: nudge and retry.
                let nudge = BigRational::new(BigInt::one(), BigInt::one() << (bits / 2));
                for (i, zi) in z.iter_mut().enumerate() {
                    let k = BigRational::from_integer(BigInt::from(i as i64 + 1));
                    *zi = zi.add(&G::new(&nudge * &k, &nudge / &k));
                }
                continue;
            };
            let tol = BigRational::new(BigInt::one(), BigInt::one() << (2 * bits.saturating_sub(16)));
            if w2 <= tol {
                break;
            }
        }
        if let Some(mut discs) = certify(p, &z, bits) {
            discs.sort_by(|a, b| crate::algebra::lex_cmp(&a.center, &b.center));
            return Ok(discs);
        }
        // Perturb coincident approximations before raising precision.
        for i in 0..z.len() {
            for j in 0..i {
                if z[i] == z[j] {
                    z[i] = z[i].add(&G::new(BigRational::new(1.into(), 1000.into()), BigRational::new(1.into(), 997.into())));
                }
            }
        }
        bits *= 2;
    }
    Err(NumericError::NotCertified(format!("could not isolate the roots of {}", p.fmt_var("z"))))
}

/// Shrinks an isolating disc by Newton steps until its radius is at most
/// `target`. The new disc lies inside the old one, so it holds the same root.
pub fn refine_root(p: &Poly<G>, disc: &RootDisc, target: &BigRational) -> RootDisc {
    if disc.radius <= *target {
        return disc.clone();
    }
    let mut bits = 64u32.max(bits_for_target(target) + 16);
    let mut z = disc.center.clone();
    loop {
        for _ in 0..200 {
            let (v, d) = eval_with_derivative(p, &z);
            if Ring::is_zero(&v) {
                return RootDisc::exact(z);
            }
            if Ring::is_zero(&d) {
                break;
            }
            let step = round_g(&v.div(&d).expect("nonzero"), bits);
            z = round_g(&z.sub(&step), bits);
            if let Some(r) = inclusion_radius(p, &z, bits) {
                if r <= *target {
                    let dist2 = z.sub(&disc.center).norm_sqr();
                    let slack = &disc.radius - &r;
                    if !slack.is_negative() && dist2 <= &slack * &slack {
                        return RootDisc { center: z, radius: r };
                    }
                }
            }
        }
        bits *= 2;
        z = disc.center.clone();
        assert!(bits < 1 << 16, "root refinement did not converge");
    }
}

fn bits_for_target(target: &BigRational) -> u32 {
    if target.is_zero() {
        return 256;
    }
    let b = target.denom().bits() as i64 - target.numer().bits() as i64 + 2;
    b.max(8) as u32
}

/// Simplest rational in the closed interval `[lo, hi]` (smallest
/// denominator), by continued fractions.
pub fn simplest_rational_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    assert!(lo <= hi);
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return BigRational::zero();
    }
    if hi.is_negative() {
        return -simplest_rational_between(&-hi.clone(), &-lo.clone());
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    if fl.clone() + BigRational::one() <= *hi {
        return fl + BigRational::one();
    }
    // lo and hi share the integer part; recurse on reciprocals of the
    // fractional parts.
    let a = lo - &fl;
    let b = hi - &fl;
    let inner = simplest_rational_between(&b.recip(), &a.recip());
    fl + inner.recip()
}

/// Tries to recognise the root in `disc` as a Gaussian rational, verified
/// exactly against `p`.
pub fn gaussian_root_in(p: &Poly<G>, disc: &RootDisc) -> Option<G> {
    let r = &disc.radius;
    let re = simplest_rational_between(&(&disc.center.re - r), &(&disc.center.re + r));
    let im = simplest_rational_between(&(&disc.center.im - r), &(&disc.center.im + r));
    let g = G::new(re, im);
    (Ring::is_zero(&p.eval(&g))).then_some(g)
}

/// Like [`gaussian_root_in`], refining the disc first until a Gaussian root
/// would be the simplest rational point in it: for monic `p` with
/// denominators dividing `D`, Gaussian roots have denominators dividing `D`,
/// so radius `1/(4 D^2)` separates them.
pub fn gaussian_root_refined(p: &Poly<G>, disc: &RootDisc) -> Option<G> {
    if let Some(g) = gaussian_root_in(p, disc) {
        return Some(g);
    }
    let lc = p.lc();
    let d = p.coeffs().iter().fold(BigInt::one(), |acc, c| {
        let c = c.div(&lc).expect("nonzero leading coefficient");
        acc.lcm(&c.denominator_lcm())
    });
    if d.bits() > 512 {
        return None;
    }
    let target = BigRational::new(BigInt::one(), &d * &d * BigInt::from(4));
    if disc.radius <= target {
        return None;
    }
    gaussian_root_in(p, &refine_root(p, disc, &target))
}

/// Tight disc around a Gaussian polynomial's roots, refined to `target`.
pub fn isolate_roots_to(p: &Poly<G>, target: &BigRational) -> Result<Vec<RootDisc>, NumericError> {
    Ok(isolate_roots(p)?.iter().map(|d| refine_root(p, d, target)).collect())
}

/// Real interval enclosing the real part of a disc.
pub fn real_part_interval(d: &RootDisc) -> Interval {
    Interval::new(&d.center.re - &d.radius, &d.center.re + &d.radius)
}
