//! Squarefree decomposition, over a field and over `K[t][z]`.

use super::gaussian::GaussianRational as G;
use super::poly::Poly;
use super::ring::Field;
use super::AlgebraError;

/// Yun's algorithm: `p = prod g_i^e_i` with `g_i` monic, squarefree,
/// pairwise coprime and `e_i` strictly increasing. `p` must be nonzero.
pub fn squarefree_decomposition<F: Field>(p: &Poly<F>) -> Result<Vec<(Poly<F>, usize)>, AlgebraError> {
    let p = p.monic()?;
    if p.deg() == 0 {
        return Ok(Vec::new());
    }
    let dp = p.derivative();
    let a0 = p.gcd(&dp)?;
    let mut b = p.div_exact_field(&a0)?;
    let mut d = dp.div_exact_field(&a0)?.sub_poly(&b.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    while b.deg() > 0 {
        let a = b.gcd(&d)?;
        if a.deg() > 0 {
            out.push((a.clone(), i));
        }
        b = b.div_exact_field(&a)?;
        d = d.div_exact_field(&a)?.sub_poly(&b.derivative());
        i += 1;
    }
    Ok(out)
}

/// Product of the squarefree factors (the radical of `p`).
pub fn squarefree_part<F: Field>(p: &Poly<F>) -> Result<Poly<F>, AlgebraError> {
    let p = p.monic()?;
    if p.deg() == 0 {
        return Ok(Poly::one());
    }
    let g = p.gcd(&p.derivative())?;
    p.div_exact_field(&g)
}

/// Monic gcd of polynomials over a field, folded over a list.
pub fn gcd_all<F: Field>(ps: &[Poly<F>]) -> Result<Poly<F>, AlgebraError> {
    let mut g = Poly::zero();
    for p in ps {
        g = g.gcd(p)?;
    }
    Ok(g)
}

type Bivariate = Poly<Poly<G>>;

/// Content of a polynomial in `z` with coefficients in `Q(i)[t]`: the monic
/// gcd of its coefficients.
pub fn content(p: &Bivariate) -> Poly<G> {
    gcd_all(p.coeffs()).expect("gcd over a field cannot split")
}

/// Primitive part with respect to `z`, scaled so the content is monic.
pub fn primitive_part(p: &Bivariate) -> Bivariate {
    if p.is_zero() {
        return Poly::zero();
    }
    let c = content(p);
    p.map(|a| a.div_exact_field(&c).expect("content divides every coefficient"))
}

/// Gcd over `Q(i)(t)` of two polynomials in `z`, one of which is monic;
/// the result is monic in `z` with coefficients in `Q(i)[t]`.
pub fn gcd_bivariate(a: &Bivariate, b: &Bivariate) -> Bivariate {
    let (mut x, mut y) = (primitive_part(a), primitive_part(b));
    if x.deg() < y.deg() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_zero() {
        let r = primitive_part(&x.pseudo_rem(&y));
        x = y;
        y = r;
    }
    // The gcd divides a monic polynomial, so its leading coefficient is a
    // constant of Q(i).
    let lc = x.lc();
    assert_eq!(lc.deg(), 0, "gcd over Q(i)(t) with a monic argument must have constant leading coefficient");
    let inv = lc.coeff(0).inv().expect("nonzero");
    x.map(|c| c.scale(&inv))
}

/// Exact quotient of a bivariate polynomial by a monic divisor in `z`.
pub fn div_monic_bivariate(a: &Bivariate, d: &Bivariate) -> Result<Bivariate, AlgebraError> {
    a.div_exact_poly(d)
}

/// Squarefree decomposition over `Q(i)(t)` of a monic polynomial in `z`
/// with coefficients in `Q(i)[t]`. Factors are monic in `z` with polynomial
/// coefficients.
pub fn squarefree_decomposition_bivariate(p: &Bivariate) -> Vec<(Bivariate, usize)> {
    assert!(p.is_monic(), "bivariate squarefree decomposition expects a monic polynomial");
    if p.deg() == 0 {
        return Vec::new();
    }
    // A monic `p` squarefree at one value of `t` is squarefree over Q(i)(t).
    for t0 in [G::from_ratio(7, 3), G::from_ratio(-5, 11), G::from_ints(2, 1)] {
        let at: Poly<G> = p.map(|c| c.eval(&t0));
        if at.gcd(&at.derivative()).is_ok_and(|g| g.deg() == 0) {
            return vec![(p.clone(), 1)];
        }
    }
    let dp = p.derivative();
    let a0 = gcd_bivariate(p, &dp);
    let mut b = div_monic_bivariate(p, &a0).expect("gcd divides p");
    let mut d = div_monic_bivariate(&dp, &a0).expect("gcd divides p'").sub_poly(&b.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    while b.deg() > 0 {
        let a = if d.is_zero() { b.clone() } else { gcd_bivariate(&b, &d) };
        if a.deg() > 0 {
            out.push((a.clone(), i));
        }
        b = div_monic_bivariate(&b, &a).expect("exact");
        d = div_monic_bivariate(&d, &a).expect("exact").sub_poly(&b.derivative());
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly<G> {
        Poly::new(c.iter().map(|&x| G::from_int(x)).collect())
    }

    #[test]
    fn square_of_quadratic() {
        // z^4 - 2z^2 + 1 = (z^2 - 1)^2
        assert_eq!(squarefree_decomposition(&p(&[1, 0, -2, 0, 1])).unwrap(), vec![(p(&[-1, 0, 1]), 2)]);
    }

    #[test]
    fn pure_power() {
        assert_eq!(squarefree_decomposition(&p(&[0, 0, 0, 1])).unwrap(), vec![(p(&[0, 1]), 3)]);
    }

    #[test]
    fn mixed_multiplicities() {
        // (z-1)(z-2)^2
        let f = p(&[-1, 1]).mul_poly(&p(&[-2, 1]).pow_poly(2));
        assert_eq!(squarefree_decomposition(&f).unwrap(), vec![(p(&[-1, 1]), 1), (p(&[-2, 1]), 2)]);
    }

    #[test]
    fn bivariate_square() {
        // (z^2 - t)^2 over Q(i)[t]
        let t = p(&[0, 1]);
        let g: Bivariate = Poly::new(vec![t.neg_poly(), Poly::zero(), Poly::one()]);
        let f = g.mul_poly(&g);
        assert_eq!(squarefree_decomposition_bivariate(&f), vec![(g, 2)]);
    }
}
