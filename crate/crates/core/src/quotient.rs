//! Finite group representations with explicit invariant generators.
//!
//! `Symmetric(n)` acts on `C^n` by permuting coordinates, with the
//! elementary symmetric functions as generators; `Cyclic(m)` acts on `C` by
//! `m`-th roots of unity, with generator `z^m`; products act blockwise.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::squarefree::squarefree_decomposition;
use crate::algebra::{AlgebraError, Field, GaussianRational as G, Modulus, Poly, Ring, Scalar};
use crate::series::TruncatedSeries;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("group order times dimension is {0}, above the limit of 30")]
    TooLarge(usize),
    #[error("bad representation descriptor `{0}`")]
    BadDescriptor(String),
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("point has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("a truncated curve can only be expanded at 0")]
    NotExact,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Representation descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RepresentationSpec {
    Symmetric(usize),
    Cyclic(usize),
    Product(Vec<RepresentationSpec>),
}

/// An irreducible building block of a product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Leaf {
    Symmetric(usize),
    Cyclic(usize),
}

impl Leaf {
    pub fn num_generators(self) -> usize {
        match self {
            Leaf::Symmetric(n) => n,
            Leaf::Cyclic(_) => 1,
        }
    }

    pub fn dim(self) -> usize {
        self.num_generators()
    }

    pub fn degrees(self) -> Vec<usize> {
        match self {
            Leaf::Symmetric(n) => (1..=n).collect(),
            Leaf::Cyclic(m) => vec![m],
        }
    }
}

impl RepresentationSpec {
    /// Degrees `d_1, ..., d_n` of the generators.
    pub fn degrees(&self) -> Vec<usize> {
        self.leaves().into_iter().flat_map(Leaf::degrees).collect()
    }

    pub fn num_generators(&self) -> usize {
        self.leaves().into_iter().map(Leaf::num_generators).sum()
    }

    pub fn dim(&self) -> usize {
        self.leaves().into_iter().map(Leaf::dim).sum()
    }

    /// Order of the group.
    pub fn group_order(&self) -> usize {
        self.leaves()
            .into_iter()
            .map(|l| match l {
                Leaf::Symmetric(n) => (1..=n).product(),
                Leaf::Cyclic(m) => m,
            })
            .product()
    }

    /// Leaves in order, with nested products flattened.
    pub fn leaves(&self) -> Vec<Leaf> {
        match self {
            RepresentationSpec::Symmetric(n) => vec![Leaf::Symmetric(*n)],
            RepresentationSpec::Cyclic(m) => vec![Leaf::Cyclic(*m)],
            RepresentationSpec::Product(fs) => fs.iter().flat_map(|f| f.leaves()).collect(),
        }
    }

    /// Parses `sym:3`, `cyc:4` or `prod:[sym:2,cyc:3]`.
    pub fn parse(src: &str) -> Result<Self, ModelError> {
        let s = src.trim();
        let bad = || ModelError::BadDescriptor(src.to_string());
        if let Some(inner) = s.strip_prefix("prod:[").and_then(|r| r.strip_suffix(']')) {
            let mut parts = Vec::new();
            let mut depth = 0usize;
            let mut start = 0;
            for (i, c) in inner.char_indices() {
                match c {
                    '[' => depth += 1,
                    ']' => depth = depth.checked_sub(1).ok_or_else(bad)?,
                    ',' if depth == 0 => {
                        parts.push(Self::parse(&inner[start..i])?);
                        start = i + 1;
                    }
                    _ => {}
                }
            }
            parts.push(Self::parse(&inner[start..])?);
            return Ok(RepresentationSpec::Product(parts));
        }
        let (kind, n) = s.split_once(':').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        match kind.trim() {
            "sym" => Ok(RepresentationSpec::Symmetric(n)),
            "cyc" => Ok(RepresentationSpec::Cyclic(n)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for RepresentationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepresentationSpec::Symmetric(n) => write!(f, "sym:{n}"),
            RepresentationSpec::Cyclic(m) => write!(f, "cyc:{m}"),
            RepresentationSpec::Product(fs) => {
                write!(f, "prod:[")?;
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// A curve in the quotient. For a `Symmetric(n)` leaf the components are
/// `a_1, ..., a_n` with `P(t)(z) = z^n + sum_j (-1)^j a_j(t) z^(n-j)`; for
/// a `Cyclic(m)` leaf the single component is `c` with `z^m = c`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicCurve {
    pub rep: RepresentationSpec,
    pub components: Vec<TruncatedSeries<G>>,
}

impl MonicCurve {
    pub fn new(rep: RepresentationSpec, components: Vec<TruncatedSeries<G>>) -> Result<Self, ModelError> {
        let expected = rep.num_generators();
        if components.len() != expected {
            return Err(ModelError::ComponentCount { expected, got: components.len() });
        }
        Ok(Self { rep, components })
    }

    /// `Symmetric(n)` curve of a monic polynomial in `z` with polynomial
    /// coefficients in `t`.
    pub fn from_monic(p: &Poly<Poly<G>>) -> Self {
        let n = p.deg();
        let comps = (1..=n)
            .map(|j| {
                let c = p.coeff(n - j);
                let c = if j % 2 == 1 { c.neg_poly() } else { c };
                TruncatedSeries::from_poly(&c)
            })
            .collect();
        Self { rep: RepresentationSpec::Symmetric(n), components: comps }
    }

    /// Components grouped by leaf.
    pub fn leaf_components(&self) -> Vec<(Leaf, &[TruncatedSeries<G>])> {
        let mut out = Vec::new();
        let mut at = 0;
        for leaf in self.rep.leaves() {
            let k = leaf.num_generators();
            out.push((leaf, &self.components[at..at + k]));
            at += k;
        }
        out
    }

    pub fn is_exact(&self) -> bool {
        self.components.iter().all(|c| c.is_exact())
    }

    /// Minimum trusted order over the components.
    pub fn order(&self) -> Option<usize> {
        self.components.iter().filter_map(|c| c.order()).min()
    }

    /// The curve `t -> c(t0 + t)`; only exact curves can be moved off 0.
    pub fn translate(&self, t0: &G) -> Result<Self, ModelError> {
        if t0.is_zero() {
            return Ok(self.clone());
        }
        if !self.is_exact() {
            return Err(ModelError::NotExact);
        }
        let comps = self
            .components
            .iter()
            .map(|c| TruncatedSeries::from_poly(&c.to_poly().taylor_shift(t0)))
            .collect();
        Ok(Self { rep: self.rep.clone(), components: comps })
    }

    /// Value of every component at `t` (exact curves, or `t = 0`).
    pub fn eval(&self, t: &G) -> Vec<G> {
        self.components.iter().map(|c| c.eval(t)).collect()
    }

    /// For a `Symmetric(n)` curve, `P(z)` with series coefficients.
    pub fn sym_poly(&self) -> Poly<TruncatedSeries<G>> {
        sym_poly_from(&self.components)
    }

    /// For an exact `Symmetric(n)` curve, `P` as a polynomial in `z` over
    /// `Q(i)[t]`.
    pub fn sym_poly_exact(&self) -> Poly<Poly<G>> {
        let p = self.sym_poly();
        Poly::new(p.coeffs().iter().map(|c| c.to_poly()).collect())
    }

    /// `P(t0)` for a `Symmetric(n)` curve.
    pub fn sym_poly_at(&self, t: &G) -> Poly<G> {
        sym_poly_values(&self.eval(t))
    }
}

/// `z^n + sum_j (-1)^j a_j z^(n-j)` from series components.
pub fn sym_poly_from<S: Ring>(a: &[TruncatedSeries<S>]) -> Poly<TruncatedSeries<S>> {
    let n = a.len();
    let mut coeffs = vec![TruncatedSeries::zero(); n + 1];
    coeffs[n] = TruncatedSeries::one();
    for (j, aj) in a.iter().enumerate() {
        let j = j + 1;
        coeffs[n - j] = if j % 2 == 1 { aj.neg_series() } else { aj.clone() };
    }
    Poly::new(coeffs)
}

/// Inverse of [`sym_poly_from`] for a monic polynomial.
pub fn components_from_sym_poly<S: Ring>(p: &Poly<TruncatedSeries<S>>) -> Vec<TruncatedSeries<S>> {
    let n = p.deg();
    (1..=n)
        .map(|j| {
            let c = p.coeff(n - j);
            if j % 2 == 1 {
                c.neg_series()
            } else {
                c
            }
        })
        .collect()
}

/// `z^n + sum_j (-1)^j a_j z^(n-j)` from scalar values.
pub fn sym_poly_values<S: Ring>(a: &[S]) -> Poly<S> {
    let n = a.len();
    let mut coeffs = vec![S::zero(); n + 1];
    coeffs[n] = S::one();
    for (j, aj) in a.iter().enumerate() {
        let j = j + 1;
        coeffs[n - j] = if j % 2 == 1 { aj.neg() } else { aj.clone() };
    }
    Poly::new(coeffs)
}

/// Elementary symmetric functions `e_1, ..., e_n` of series roots; the
/// result is trusted to the least order among the roots.
pub fn elementary_symmetric<S: Ring>(roots: &[TruncatedSeries<S>]) -> Vec<TruncatedSeries<S>> {
    let order = roots.iter().filter_map(|r| r.order()).min();
    // e[k] holds e_k of the roots processed so far.
    let mut e: Vec<TruncatedSeries<S>> = vec![TruncatedSeries::one()];
    for r in roots {
        let mut next = e.clone();
        next.push(TruncatedSeries::zero());
        for k in 1..next.len() {
            let term = e[k - 1].mul_series(r);
            next[k] = next[k].add_series(&term);
            if let Some(t) = order {
                next[k] = next[k].truncate(t);
            }
        }
        e = next;
    }
    e.remove(0);
    e
}

/// The quotient curve `sigma(roots)` for `Symmetric(n)`.
pub fn vieta_from_roots(roots: &[TruncatedSeries<G>]) -> MonicCurve {
    MonicCurve { rep: RepresentationSpec::Symmetric(roots.len()), components: elementary_symmetric(roots) }
}

/// Stratum signature of one leaf.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LeafSignature {
    /// Root multiplicities, in decreasing order.
    Partition(Vec<usize>),
    /// Whether the cyclic coordinate is nonzero (principal stratum).
    Cyclic { nonzero: bool },
}

impl LeafSignature {
    pub fn dimension(&self) -> usize {
        match self {
            LeafSignature::Partition(p) => p.len(),
            LeafSignature::Cyclic { nonzero } => usize::from(*nonzero),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StratumSignature {
    pub leaves: Vec<LeafSignature>,
}

impl StratumSignature {
    /// The partition of a single `Symmetric(n)` leaf.
    pub fn partition(&self) -> Option<&[usize]> {
        match self.leaves.as_slice() {
            [LeafSignature::Partition(p)] => Some(p),
            _ => None,
        }
    }

    pub fn dimension(&self) -> usize {
        self.leaves.iter().map(LeafSignature::dimension).sum()
    }
}

impl fmt::Display for StratumSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .leaves
            .iter()
            .map(|l| match l {
                LeafSignature::Partition(p) => {
                    format!("{{{}}}", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
                }
                LeafSignature::Cyclic { nonzero } => (if *nonzero { "{nonzero}" } else { "{zero}" }).to_string(),
            })
            .collect();
        f.write_str(&parts.join(" x "))
    }
}

/// Multiplicity pattern of the roots of a monic polynomial.
pub fn partition_of<F: Field>(p: &Poly<F>) -> Result<Vec<usize>, AlgebraError> {
    let mut parts = Vec::new();
    for (g, e) in squarefree_decomposition(p)? {
        for _ in 0..g.deg() {
            parts.push(e);
        }
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Ok(parts)
}

/// Stratum of the quotient point with the given component values.
pub fn stratum_signature(rep: &RepresentationSpec, values: &[G]) -> Result<StratumSignature, ModelError> {
    let expected = rep.num_generators();
    if values.len() != expected {
        return Err(ModelError::ComponentCount { expected, got: values.len() });
    }
    let mut at = 0;
    let mut leaves = Vec::new();
    for leaf in rep.leaves() {
        let k = leaf.num_generators();
        let v = &values[at..at + k];
        at += k;
        leaves.push(match leaf {
            Leaf::Symmetric(_) => LeafSignature::Partition(partition_of(&sym_poly_values(v))?),
            Leaf::Cyclic(_) => LeafSignature::Cyclic { nonzero: !v[0].is_zero() },
        });
    }
    Ok(StratumSignature { leaves })
}

/// The mean of the roots, `a_1 / n`.
pub fn tschirnhaus_center<F: Field>(p: &Poly<F>) -> Result<F, AlgebraError> {
    let n = p.deg();
    assert!(n >= 1, "center of a constant polynomial");
    p.coeff(n - 1).neg().div(&F::from_i64(n as i64))
}

/// A group element acting on `V`: a permutation per symmetric leaf and a
/// rotation exponent per cyclic leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafElement {
    Perm(Vec<usize>),
    Rotate(usize),
}

/// Cyclotomic data for the cyclic leaves: `w` is a primitive `L`-th root of
/// unity with `L` the lcm of the cyclic orders.
#[derive(Debug, Clone)]
pub struct RootsOfUnity {
    pub order: usize,
    pub modulus: Option<Arc<Modulus>>,
}

impl RootsOfUnity {
    pub fn for_rep(rep: &RepresentationSpec) -> Result<Self, AlgebraError> {
        let mut l = 1usize;
        for leaf in rep.leaves() {
            if let Leaf::Cyclic(m) = leaf {
                l = num_integer::lcm(l, m);
            }
        }
        let modulus = match l {
            1 | 2 | 4 => None,
            _ => Some(Modulus::new(cyclotomic(l))?),
        };
        Ok(Self { order: l, modulus })
    }

    /// `zeta_m^k` with `zeta_m = w^(L/m)`.
    pub fn power(&self, m: usize, k: usize) -> Scalar {
        let e = (self.order / m * k) % self.order;
        match &self.modulus {
            Some(md) => Scalar::from_residue(Poly::monomial(G::one(), e), md),
            None => {
                // L divides 4: w = i, -1 or 1.
                let base = match self.order {
                    4 => G::i(),
                    2 => G::from_int(-1),
                    _ => G::one(),
                };
                Scalar::gaussian(base.pow(e as u64))
            }
        }
    }
}

/// The cyclotomic polynomial `Phi_m`, by dividing `z^m - 1` by `Phi_d` for
/// the proper divisors `d` of `m`.
pub fn cyclotomic(m: usize) -> Poly<G> {
    let mut p = Poly::monomial(G::one(), m).sub_poly(&Poly::one());
    for d in 1..m {
        if m % d == 0 {
            p = p.div_exact_field(&cyclotomic(d)).expect("cyclotomic division");
        }
    }
    p
}

/// Group generators: a transposition and an `n`-cycle per symmetric leaf,
/// the basic rotation per cyclic leaf; identity elsewhere.
pub fn group_generators(rep: &RepresentationSpec) -> Vec<Vec<LeafElement>> {
    let leaves = rep.leaves();
    let identity: Vec<LeafElement> = leaves
        .iter()
        .map(|l| match l {
            Leaf::Symmetric(n) => LeafElement::Perm((0..*n).collect()),
            Leaf::Cyclic(_) => LeafElement::Rotate(0),
        })
        .collect();
    let mut out = Vec::new();
    for (i, l) in leaves.iter().enumerate() {
        match l {
            Leaf::Symmetric(n) if *n >= 2 => {
                let mut swap: Vec<usize> = (0..*n).collect();
                swap.swap(0, 1);
                let cycle: Vec<usize> = (0..*n).map(|k| (k + 1) % n).collect();
                for p in [swap, cycle] {
                    let mut g = identity.clone();
                    g[i] = LeafElement::Perm(p);
                    out.push(g);
                }
            }
            Leaf::Cyclic(m) if *m >= 2 => {
                let mut g = identity.clone();
                g[i] = LeafElement::Rotate(1);
                out.push(g);
            }
            _ => {}
        }
    }
    out
}

fn all_elements(rep: &RepresentationSpec) -> Vec<Vec<LeafElement>> {
    let mut out: Vec<Vec<LeafElement>> = vec![Vec::new()];
    for leaf in rep.leaves() {
        let choices: Vec<LeafElement> = match leaf {
            Leaf::Symmetric(n) => permutations(n).into_iter().map(LeafElement::Perm).collect(),
            Leaf::Cyclic(m) => (0..m).map(LeafElement::Rotate).collect(),
        };
        out = out
            .into_iter()
            .flat_map(|g| {
                choices.iter().map(move |c| {
                    let mut h = g.clone();
                    h.push(c.clone());
                    h
                })
            })
            .collect();
    }
    out
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `g . x`; permutations send coordinate `k` to position `perm[k]`.
pub fn act(rep: &RepresentationSpec, units: &RootsOfUnity, g: &[LeafElement], x: &[Scalar]) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(x.len());
    let mut at = 0;
    for (leaf, e) in rep.leaves().into_iter().zip(g) {
        let k = leaf.dim();
        let block = &x[at..at + k];
        at += k;
        match (leaf, e) {
            (Leaf::Symmetric(_), LeafElement::Perm(p)) => {
                let mut v = block.to_vec();
                for (src, &dst) in p.iter().enumerate() {
                    v[dst] = block[src].clone();
                }
                out.extend(v);
            }
            (Leaf::Cyclic(m), LeafElement::Rotate(j)) => out.push(units.power(m, *j).mul(&block[0])),
            _ => panic!("group element does not match the representation"),
        }
    }
    out
}

/// `prod_g prod_i (z - pr_i(g . x))`, of degree `dim V * |G|`.
pub fn orbit_polynomial(rep: &RepresentationSpec, x: &[Scalar]) -> Result<Poly<Scalar>, ModelError> {
    let size = rep.group_order() * rep.dim();
    if size > 30 {
        return Err(ModelError::TooLarge(size));
    }
    if x.len() != rep.dim() {
        return Err(ModelError::Dimension { expected: rep.dim(), got: x.len() });
    }
    let units = RootsOfUnity::for_rep(rep)?;
    let mut p = Poly::one();
    for g in all_elements(rep) {
        for c in act(rep, &units, &g, x) {
            p = p.mul_poly(&Poly::new(vec![c.neg(), Scalar::one()]));
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cst(n: i64) -> TruncatedSeries<G> {
        TruncatedSeries::constant(G::from_int(n))
    }

    #[test]
    fn descriptors_round_trip() {
        for s in ["sym:3", "cyc:4", "prod:[sym:2,cyc:3]", "prod:[prod:[sym:1,cyc:2],sym:2]"] {
            assert_eq!(RepresentationSpec::parse(s).unwrap().to_string(), s);
        }
        assert!(RepresentationSpec::parse("sym:0").is_err());
        assert!(RepresentationSpec::parse("alt:3").is_err());
        let p = RepresentationSpec::parse("prod:[sym:2,cyc:3]").unwrap();
        assert_eq!(p.degrees(), vec![1, 2, 3]);
    }

    #[test]
    fn vieta_examples() {
        let t = TruncatedSeries::<G>::var();
        let c = vieta_from_roots(&[t.clone(), t.neg_series()]);
        assert!(c.components[0].is_zero());
        assert_eq!(c.components[1], TruncatedSeries::monomial(G::from_int(-1), 2));
        let c = vieta_from_roots(&[cst(1), cst(2)]);
        assert_eq!(c.components, vec![cst(3), cst(2)]);
    }

    #[test]
    fn signatures() {
        let rep = RepresentationSpec::Symmetric(2);
        let sig = stratum_signature(&rep, &[G::from_int(0), G::from_int(-1)]).unwrap();
        assert_eq!(sig.partition(), Some(&[1, 1][..]));
        let sig = stratum_signature(&rep, &[G::from_int(0), G::from_int(0)]).unwrap();
        assert_eq!(sig.partition(), Some(&[2][..]));
        // z^3 - z^2: a1 = 1, a2 = 0, a3 = 0.
        let rep3 = RepresentationSpec::Symmetric(3);
        let sig = stratum_signature(&rep3, &[G::from_int(1), G::from_int(0), G::from_int(0)]).unwrap();
        assert_eq!(sig.partition(), Some(&[2, 1][..]));
    }

    #[test]
    fn centers() {
        let p = |c: &[i64]| Poly::new(c.iter().map(|&x| G::from_int(x)).collect());
        assert_eq!(tschirnhaus_center(&p(&[1, -2, 1])).unwrap(), G::from_int(1));
        assert_eq!(tschirnhaus_center(&p(&[0, 0, 0, 1])).unwrap(), G::from_int(0));
        assert_eq!(tschirnhaus_center(&p(&[3, 4, 1])).unwrap(), G::from_int(-2));
    }

    #[test]
    fn orbit_polynomials() {
        let cyc3 = RepresentationSpec::Cyclic(3);
        let p = orbit_polynomial(&cyc3, &[Scalar::from_int(1)]).unwrap();
        let expect: Poly<Scalar> = Poly::new(vec![Scalar::from_int(-1), Scalar::zero(), Scalar::zero(), Scalar::one()]);
        assert_eq!(p, expect);
        let sym2 = RepresentationSpec::Symmetric(2);
        let p = orbit_polynomial(&sym2, &[Scalar::from_int(1), Scalar::from_int(2)]).unwrap();
        let q: Poly<Scalar> = Poly::new(vec![Scalar::from_int(2), Scalar::from_int(-3), Scalar::one()]);
        assert_eq!(p, q.mul_poly(&q));
        let sym4 = RepresentationSpec::Symmetric(4);
        assert_eq!(orbit_polynomial(&sym4, &vec![Scalar::zero(); 4]), Err(ModelError::TooLarge(96)));
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic(6).to_string(), "z^2 - z + 1");
        assert_eq!(cyclotomic(5).deg(), 4);
    }
}
