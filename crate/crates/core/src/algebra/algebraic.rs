//! Residues modulo a squarefree polynomial, with dynamic evaluation.
//!
//! A modulus `g` over Q(i) need not be irreducible. Arithmetic proceeds as if
//! `K[w]/(g)` were a field; the first time an inverse or zero test meets a
//! zero divisor, the operation fails with a split request carrying a
//! nontrivial factorisation of `g`, and the caller reruns its computation
//! over each factor.

use std::fmt;
use std::sync::Arc;

use super::gaussian::GaussianRational as G;
use super::poly::Poly;
use super::ring::{Field, Ring};
use super::AlgebraError;

/// A monic squarefree modulus over the Gaussian rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Modulus {
    poly: Poly<G>,
}

impl Modulus {
    /// Builds a modulus after checking it is monic, nonconstant and
    /// squarefree.
    pub fn new(poly: Poly<G>) -> Result<Arc<Self>, AlgebraError> {
        let poly = poly.monic()?;
        if poly.deg() == 0 {
            return Err(AlgebraError::InvalidModulus("modulus must have positive degree".into()));
        }
        let g = poly.gcd(&poly.derivative())?;
        if g.deg() > 0 {
            return Err(AlgebraError::InvalidModulus(format!("modulus {} is not squarefree", poly.fmt_var("w"))));
        }
        Ok(Arc::new(Self { poly }))
    }

    pub fn poly(&self) -> &Poly<G> {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.deg()
    }

    /// The class of `w` in `K[w]/(g)`.
    pub fn generator(self: &Arc<Self>) -> Scalar {
        Scalar::from_residue(Poly::var(), self)
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Modulus({})", self.poly.fmt_var("w"))
    }
}

/// An element of `K[w]/(g)` with `deg residue >= 1`. Residues of degree 0
/// are always normalised to [`Scalar::Gaussian`].
#[derive(Clone)]
pub struct AlgebraicScalar {
    residue: Poly<G>,
    modulus: Arc<Modulus>,
}

impl AlgebraicScalar {
    pub fn residue(&self) -> &Poly<G> {
        &self.residue
    }
    pub fn modulus(&self) -> &Arc<Modulus> {
        &self.modulus
    }
}

impl PartialEq for AlgebraicScalar {
    fn eq(&self, o: &Self) -> bool {
        self.residue == o.residue && (Arc::ptr_eq(&self.modulus, &o.modulus) || self.modulus == o.modulus)
    }
}

impl fmt::Debug for AlgebraicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} mod {}]", self.residue.fmt_var("w"), self.modulus.poly.fmt_var("w"))
    }
}

/// The working scalar: a Gaussian rational, or a residue in a dynamic
/// algebraic extension.
#[derive(Clone, PartialEq)]
pub enum Scalar {
    Gaussian(G),
    Algebraic(AlgebraicScalar),
}

impl Scalar {
    pub fn from_residue(residue: Poly<G>, modulus: &Arc<Modulus>) -> Self {
        let residue = if residue.degree().is_some_and(|d| d >= modulus.degree()) {
            residue.rem(&modulus.poly).expect("modulus is monic")
        } else {
            residue
        };
        if residue.deg() == 0 {
            Scalar::Gaussian(residue.coeff(0))
        } else {
            Scalar::Algebraic(AlgebraicScalar { residue, modulus: Arc::clone(modulus) })
        }
    }

    pub fn gaussian(g: G) -> Self {
        Scalar::Gaussian(g)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Gaussian(G::from_int(n))
    }

    pub fn as_gaussian(&self) -> Option<&G> {
        match self {
            Scalar::Gaussian(g) => Some(g),
            Scalar::Algebraic(_) => None,
        }
    }

    pub fn modulus(&self) -> Option<&Arc<Modulus>> {
        match self {
            Scalar::Gaussian(_) => None,
            Scalar::Algebraic(a) => Some(&a.modulus),
        }
    }

    /// Residue polynomial in `w` (a constant for Gaussian scalars).
    pub fn residue(&self) -> Poly<G> {
        match self {
            Scalar::Gaussian(g) => Poly::constant(g.clone()),
            Scalar::Algebraic(a) => a.residue.clone(),
        }
    }

    /// Image in `K[w]/(factor)` for a factor of this scalar's modulus.
    pub fn reduce_mod(&self, factor: &Arc<Modulus>) -> Self {
        match self {
            Scalar::Gaussian(_) => self.clone(),
            Scalar::Algebraic(a) => Scalar::from_residue(a.residue.clone(), factor),
        }
    }

    /// Substitute `w -> image` (a field embedding given by the image of the
    /// generator).
    pub fn map_generator(&self, image: &Scalar) -> Scalar {
        match self {
            Scalar::Gaussian(_) => self.clone(),
            Scalar::Algebraic(a) => {
                let mut acc = Scalar::zero();
                for c in a.residue.coeffs().iter().rev() {
                    acc = Ring::add(&Ring::mul(&acc, image), &Scalar::Gaussian(c.clone()));
                }
                acc
            }
        }
    }

    fn binary(&self, o: &Self, op: impl Fn(&Poly<G>, &Poly<G>) -> Poly<G>) -> Self {
        match (self, o) {
            (Scalar::Gaussian(a), Scalar::Gaussian(b)) => {
                Scalar::Gaussian(op(&Poly::constant(a.clone()), &Poly::constant(b.clone())).coeff(0))
            }
            (Scalar::Algebraic(a), Scalar::Gaussian(b)) => {
                Scalar::from_residue(op(&a.residue, &Poly::constant(b.clone())), &a.modulus)
            }
            (Scalar::Gaussian(a), Scalar::Algebraic(b)) => {
                Scalar::from_residue(op(&Poly::constant(a.clone()), &b.residue), &b.modulus)
            }
            (Scalar::Algebraic(a), Scalar::Algebraic(b)) => {
                assert!(
                    Arc::ptr_eq(&a.modulus, &b.modulus) || a.modulus == b.modulus,
                    "arithmetic between different extensions: {:?} vs {:?}",
                    a.modulus,
                    b.modulus
                );
                Scalar::from_residue(op(&a.residue, &b.residue), &a.modulus)
            }
        }
    }

    fn split_from_gcd(modulus: &Arc<Modulus>, g: Poly<G>) -> AlgebraError {
        let cofactor = modulus.poly.div_exact_field(&g).expect("gcd divides modulus");
        AlgebraError::SplitRequest {
            modulus: modulus.poly.clone(),
            factor: g,
            cofactor: cofactor.monic().expect("nonzero cofactor"),
        }
    }
}

impl Ring for Scalar {
    fn zero() -> Self {
        Scalar::Gaussian(G::zero())
    }
    fn one() -> Self {
        Scalar::Gaussian(G::one())
    }
    fn is_zero(&self) -> bool {
        matches!(self, Scalar::Gaussian(g) if Ring::is_zero(g))
    }
    fn add(&self, o: &Self) -> Self {
        if let (Scalar::Gaussian(a), Scalar::Gaussian(b)) = (self, o) {
            return Scalar::Gaussian(Ring::add(a, b));
        }
        self.binary(o, |a, b| a.add_poly(b))
    }
    fn sub(&self, o: &Self) -> Self {
        if let (Scalar::Gaussian(a), Scalar::Gaussian(b)) = (self, o) {
            return Scalar::Gaussian(Ring::sub(a, b));
        }
        self.binary(o, |a, b| a.sub_poly(b))
    }
    fn mul(&self, o: &Self) -> Self {
        if let (Scalar::Gaussian(a), Scalar::Gaussian(b)) = (self, o) {
            return Scalar::Gaussian(Ring::mul(a, b));
        }
        self.binary(o, |a, b| a.mul_poly(b))
    }
    fn neg(&self) -> Self {
        match self {
            Scalar::Gaussian(g) => Scalar::Gaussian(Ring::neg(g)),
            Scalar::Algebraic(a) => {
                Scalar::Algebraic(AlgebraicScalar { residue: a.residue.neg_poly(), modulus: Arc::clone(&a.modulus) })
            }
        }
    }
    fn from_i64(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl Field for Scalar {
    fn inv(&self) -> Result<Self, AlgebraError> {
        match self {
            Scalar::Gaussian(g) => Ok(Scalar::Gaussian(g.inv()?)),
            Scalar::Algebraic(a) => {
                let (g, s, _) = a.residue.xgcd(&a.modulus.poly)?;
                if g.deg() > 0 {
                    return Err(Scalar::split_from_gcd(&a.modulus, g));
                }
                Ok(Scalar::from_residue(s, &a.modulus))
            }
        }
    }

    fn from_gaussian(g: &G) -> Self {
        Scalar::Gaussian(g.clone())
    }

    fn is_zero_checked(&self) -> Result<bool, AlgebraError> {
        match self {
            Scalar::Gaussian(g) => Ok(Ring::is_zero(g)),
            Scalar::Algebraic(a) => {
                let g = a.residue.gcd(&a.modulus.poly)?;
                if g.deg() > 0 {
                    return Err(Scalar::split_from_gcd(&a.modulus, g));
                }
                Ok(false)
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Gaussian(g) => write!(f, "{g}"),
            Scalar::Algebraic(a) => {
                let s = a.residue.fmt_var("w");
                if s.contains(' ') {
                    write!(f, "({s})")
                } else {
                    f.write_str(&s)
                }
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Gaussian(g) => write!(f, "{g}"),
            Scalar::Algebraic(a) => write!(f, "{a:?}"),
        }
    }
}

impl From<G> for Scalar {
    fn from(g: G) -> Self {
        Scalar::Gaussian(g)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

/// Runs `f` over `K[w]/(modulus)` and, whenever it reports a zero divisor of
/// the modulus it was given, reruns it over both factors. Returns one result
/// per final factor. Split requests for other moduli are propagated.
pub fn dynamic_eval<T>(
    modulus: Arc<Modulus>,
    mut f: impl FnMut(&Arc<Modulus>) -> Result<T, AlgebraError>,
) -> Result<Vec<(Arc<Modulus>, T)>, AlgebraError> {
    let mut work = vec![modulus];
    let mut done = Vec::new();
    while let Some(m) = work.pop() {
        match f(&m) {
            Ok(v) => done.push((m, v)),
            Err(AlgebraError::SplitRequest { modulus, factor, cofactor }) if modulus == *m.poly() => {
                work.push(Modulus::new(cofactor)?);
                work.push(Modulus::new(factor)?);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(done)
}
