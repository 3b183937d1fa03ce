//! Hensel lifting of coprime factorizations and of simple roots over
//! truncated power series.
//!
//! A polynomial in `z` with series coefficients is handled as its list of
//! `t`-slices `F_k(z)`, so that `F = sum_k F_k(z) t^k`.

use super::{AlgebraError, Field, Poly};
use crate::series::TruncatedSeries;

/// Polynomial in `z` whose coefficients are series in `t`.
pub type SeriesPoly<F> = Poly<TruncatedSeries<F>>;

/// Trusted order of all coefficients, `None` if every coefficient is exact.
pub fn series_poly_order<F: Field>(f: &SeriesPoly<F>) -> Option<usize> {
    f.coeffs().iter().filter_map(|c| c.order()).min()
}

/// The slices `F_0(z), ..., F_T(z)`.
pub fn to_slices<F: Field>(f: &SeriesPoly<F>, order: usize) -> Vec<Poly<F>> {
    (0..=order)
        .map(|k| Poly::new(f.coeffs().iter().map(|c| c.coeff(k)).collect()))
        .collect()
}

/// Reassembles slices into a polynomial with series coefficients trusted to
/// `order`.
pub fn from_slices<F: Field>(slices: &[Poly<F>], order: usize) -> SeriesPoly<F> {
    let deg = slices.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    let coeffs = (0..deg)
        .map(|j| TruncatedSeries::truncated(slices.iter().map(|p| p.coeff(j)).collect(), order))
        .collect();
    Poly::new(coeffs)
}

/// Lifts `F(z, 0) = g0 * h0` with `g0, h0` monic and coprime to monic
/// `g, h` with `g h = F mod t^(T+1)`. Returns the slices of `g` and `h`.
fn hensel_two<F: Field>(
    f: &[Poly<F>],
    g0: &Poly<F>,
    h0: &Poly<F>,
) -> Result<(Vec<Poly<F>>, Vec<Poly<F>>), AlgebraError> {
    let (d, _a, b) = g0.xgcd(h0)?;
    if d.deg() != 0 || d.is_zero() {
        return Err(AlgebraError::NotCoprime);
    }
    let order = f.len() - 1;
    let mut g = vec![g0.clone()];
    let mut h = vec![h0.clone()];
    for k in 1..=order {
        let mut e = f[k].clone();
        for i in 1..k {
            e = e.sub_poly(&g[i].mul_poly(&h[k - i]));
        }
        if e.is_zero() {
            g.push(Poly::zero());
            h.push(Poly::zero());
            continue;
        }
        let gk = e.mul_poly(&b).rem(g0)?;
        let hk = e.sub_poly(&gk.mul_poly(h0)).div_exact_field(g0)?;
        g.push(gk);
        h.push(hk);
    }
    Ok((g, h))
}

/// Splits monic `F` along the pairwise coprime monic factorization
/// `factors0` of `F(z, 0)`, returning monic factors whose product agrees
/// with `F` up to `t^T`. The order is capped by the order of `F`.
pub fn hensel_split<F: Field>(
    f: &SeriesPoly<F>,
    factors0: &[Poly<F>],
    order: usize,
) -> Result<Vec<SeriesPoly<F>>, AlgebraError> {
    let order = series_poly_order(f).map_or(order, |o| o.min(order));
    let slices = to_slices(f, order);
    let mut check = Poly::one();
    for g in factors0 {
        check = check.mul_poly(g);
    }
    if check != slices[0] {
        return Err(AlgebraError::InexactDivision);
    }
    let mut out = Vec::with_capacity(factors0.len());
    let mut rest = slices;
    for (i, g0) in factors0.iter().enumerate() {
        if i + 1 == factors0.len() {
            out.push(from_slices(&rest, order));
            break;
        }
        let mut h0 = Poly::one();
        for g in &factors0[i + 1..] {
            h0 = h0.mul_poly(g);
        }
        let (g, h) = hensel_two(&rest, g0, &h0)?;
        out.push(from_slices(&g, order));
        rest = h;
    }
    Ok(out)
}

/// Lifts a simple root `r0` of `F(z, 0)` to the series root of `F` up to
/// `t^T` by Newton iteration with doubling precision.
pub fn newton_root<F: Field>(
    f: &SeriesPoly<F>,
    r0: &F,
    order: usize,
) -> Result<TruncatedSeries<F>, AlgebraError> {
    let order = series_poly_order(f).map_or(order, |o| o.min(order));
    let df = f.derivative();
    let mut r = TruncatedSeries::truncated(vec![r0.clone()], 0);
    let mut prec = 0usize;
    while prec < order {
        prec = (2 * prec + 1).min(order);
        let r_ext = r.with_order(Some(prec));
        let v = eval_truncated(f, &r_ext, prec);
        let d = eval_truncated(&df, &r_ext, prec);
        let step = v.mul_series(&d.inverse(prec)?).truncate(prec);
        r = r_ext.sub_series(&step).truncate(prec);
    }
    Ok(r.with_order(Some(order)))
}

/// `F(z = r)` truncated to `t^T`.
pub fn eval_truncated<F: Field>(f: &SeriesPoly<F>, r: &TruncatedSeries<F>, order: usize) -> TruncatedSeries<F> {
    let mut acc = TruncatedSeries::truncated(Vec::new(), order);
    for c in f.coeffs().iter().rev() {
        acc = acc.mul_series(r).add_series(c).truncate(order);
    }
    acc
}

/// Product of polynomials with series coefficients, truncated to `t^T`.
pub fn product_truncated<F: Field>(factors: &[SeriesPoly<F>], order: usize) -> SeriesPoly<F> {
    let mut acc: SeriesPoly<F> = Poly::one();
    for g in factors {
        acc = acc.mul_poly(g);
        acc = Poly::new(acc.coeffs().iter().map(|c| c.truncate(order)).collect());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{GaussianRational as G, Ring};

    type S = TruncatedSeries<G>;

    fn g(n: i64) -> G {
        G::from_int(n)
    }

    fn zpoly(c: &[i64]) -> Poly<G> {
        Poly::new(c.iter().map(|&x| g(x)).collect())
    }

    /// `z^2 - (1 + t)` as a polynomial over series.
    fn sqrt_case() -> SeriesPoly<G> {
        Poly::new(vec![S::exact(vec![g(-1), g(-1)]), S::constant(g(0)), S::constant(g(1))])
    }

    #[test]
    fn splits_square_root_of_one_plus_t() {
        let f = sqrt_case();
        let fs = hensel_split(&f, &[zpoly(&[-1, 1]), zpoly(&[1, 1])], 6).unwrap();
        // Binomial series: sqrt(1+t) = 1 + t/2 - t^2/8 + t^3/16 - 5t^4/128 + ...
        let root = fs[0].coeff(0).neg();
        assert_eq!(root.coeff(1), G::from_ratio(1, 2));
        assert_eq!(root.coeff(2), G::from_ratio(-1, 8));
        assert_eq!(root.coeff(3), G::from_ratio(1, 16));
        assert_eq!(root.coeff(4), G::from_ratio(-5, 128));
        assert_eq!(fs[1].coeff(0), root);
        let back = product_truncated(&fs, 6);
        for j in 0..3 {
            assert_eq!(back.coeff(j).coeffs(), f.coeff(j).truncate(6).coeffs());
        }
    }

    #[test]
    fn single_factor_is_identity() {
        let f: SeriesPoly<G> = Poly::new(vec![S::exact(vec![g(0), g(0), g(-1)]), S::zero(), S::one()]);
        let fs = hensel_split(&f, &[zpoly(&[0, 0, 1])], 5).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].coeff(0).coeffs(), &[g(0), g(0), g(-1)]);
    }

    #[test]
    fn shifted_product_matches_undetermined_coefficients() {
        // (z - 1)(z - 2) + t: roots 1 + t + t^2 + ..., 2 - t - t^2 - ...
        let f: SeriesPoly<G> = Poly::new(vec![S::exact(vec![g(2), g(1)]), S::constant(g(-3)), S::one()]);
        let fs = hensel_split(&f, &[zpoly(&[-1, 1]), zpoly(&[-2, 1])], 8).unwrap();
        let r1 = fs[0].coeff(0).neg();
        let r2 = fs[1].coeff(0).neg();
        assert_eq!(r1.coeff(1), g(1));
        assert_eq!(r2.coeff(1), g(-1));
        // Undetermined coefficients: r = 1 + a t + b t^2, (r-1)(r-2) + t = 0
        // gives a = 1, b = a^2 = 1.
        assert_eq!(r1.coeff(2), g(1));
        let back = product_truncated(&fs, 8);
        for j in 0..3 {
            assert_eq!(back.coeff(j).coeffs(), f.coeff(j).coeffs());
        }
    }

    #[test]
    fn shared_root_is_rejected() {
        let f: SeriesPoly<G> = Poly::new(vec![S::constant(g(1)), S::constant(g(-2)), S::one()]);
        let err = hensel_split(&f, &[zpoly(&[-1, 1]), zpoly(&[-1, 1])], 3).unwrap_err();
        assert_eq!(err, AlgebraError::NotCoprime);
    }

    #[test]
    fn newton_agrees_with_hensel() {
        let f = sqrt_case();
        let r = newton_root(&f, &g(1), 10).unwrap();
        let fs = hensel_split(&f, &[zpoly(&[-1, 1]), zpoly(&[1, 1])], 10).unwrap();
        assert_eq!(r, fs[0].coeff(0).neg());
    }
}
