//! Principal subresultant coefficients.
//!
//! Sign convention: `psc_k(p, q)` is the determinant of the square matrix
//! whose rows are the coefficient vectors of `z^(n-k-1) p, ..., p` followed by
//! `z^(m-k-1) q, ..., q` (with `m = deg p`, `n = deg q`), restricted to the
//! `m + n - 2k` leading columns, coefficients in descending order. For
//! `k = 0` this is the Sylvester resultant, e.g. `psc_0(z^2 - 1, 2z) = -4`.

use super::linalg::det;
use super::poly::Poly;
use super::ring::{IntegralDomain, Ring};
use super::AlgebraError;

/// `psc_k(p, q)` as a determinant of a Sylvester submatrix.
pub fn psc_determinant<R: Ring>(p: &Poly<R>, q: &Poly<R>, k: usize) -> R {
    let m = p.degree().expect("psc of zero polynomial");
    let n = q.degree().expect("psc of zero polynomial");
    assert!(m >= n && k <= n, "psc requires deg p >= deg q >= k");
    let size = m + n - 2 * k;
    let width = m + n - k;
    let mut rows: Vec<Vec<R>> = Vec::with_capacity(size);
    let mut push_shifts = |f: &Poly<R>, count: usize| {
        for shift in (0..count).rev() {
            let mut row = vec![R::zero(); width];
            for (i, c) in f.coeffs().iter().enumerate() {
                // monomial z^(i + shift) sits in column width - 1 - (i + shift)
                row[width - 1 - (i + shift)] = c.clone();
            }
            row.truncate(size);
            rows.push(row);
        }
    };
    push_shifts(p, n - k);
    push_shifts(q, m - k);
    det(&rows)
}

/// The subresultant polynomial remainder sequence `R_0 = p, R_1 = q, ...`
/// (Brown–Collins), ending with the last nonzero member.
pub fn subresultant_prs<D: IntegralDomain>(p: &Poly<D>, q: &Poly<D>) -> Result<Vec<Poly<D>>, AlgebraError> {
    let m = p.degree().ok_or(AlgebraError::DivisionByZero)?;
    let n = q.degree().ok_or(AlgebraError::DivisionByZero)?;
    assert!(m > n, "subresultant sequence requires deg p > deg q");
    let mut seq = vec![p.clone(), q.clone()];
    let mut beta = if (m - n) % 2 == 0 { D::one().neg() } else { D::one() };
    let mut psi = D::one().neg();
    loop {
        let i = seq.len() - 1;
        let r = seq[i - 1].pseudo_rem(&seq[i]);
        if r.is_zero() {
            break;
        }
        let r = r.div_exact_scalar(&beta)?;
        let di = seq[i - 1].deg() - seq[i].deg();
        let gamma = seq[i].lc();
        let dn = seq[i].deg() - r.deg();
        let num = gamma.neg().pow(di as u32);
        psi = if di >= 1 { num.div_exact(&psi.pow(di as u32 - 1))? } else { num };
        beta = gamma.neg().mul(&psi.pow(dn as u32));
        let done = r.deg() == 0;
        seq.push(r);
        if done {
            break;
        }
    }
    Ok(seq)
}

/// All principal subresultant coefficients `psc_0, ..., psc_{deg q}` read off
/// the subresultant remainder sequence.
pub fn principal_subresultants<D: IntegralDomain>(p: &Poly<D>, q: &Poly<D>) -> Result<Vec<D>, AlgebraError> {
    let seq = subresultant_prs(p, q)?;
    let n = q.deg();
    let mut out = vec![D::zero(); n + 1];
    let m = p.deg();
    let mut prev_psc = q.lc().pow((m - n) as u32);
    out[n] = prev_psc.clone();
    for i in 2..seq.len() {
        let ni = seq[i].deg();
        let delta = seq[i - 1].deg() - ni;
        let lc = seq[i].lc();
        let v = lc.pow(delta as u32).div_exact(&prev_psc.pow(delta as u32 - 1))?;
        out[ni] = v.clone();
        prev_psc = v;
    }
    Ok(out)
}

/// `psc_k(p, q)` via the subresultant remainder sequence.
pub fn subresultant_psc<D: IntegralDomain>(p: &Poly<D>, q: &Poly<D>, k: usize) -> Result<D, AlgebraError> {
    Ok(principal_subresultants(p, q)?[k].clone())
}

/// Resultant `psc_0(p, q)` for nonzero `p` and `q` of any degrees.
pub fn resultant<D: IntegralDomain>(p: &Poly<D>, q: &Poly<D>) -> Result<D, AlgebraError> {
    let m = p.degree().ok_or(AlgebraError::DivisionByZero)?;
    let n = q.degree().ok_or(AlgebraError::DivisionByZero)?;
    if n == 0 {
        return Ok(q.lc().pow(m as u32));
    }
    if m == 0 {
        return Ok(p.lc().pow(n as u32));
    }
    match m.cmp(&n) {
        std::cmp::Ordering::Greater => subresultant_psc(p, q, 0),
        std::cmp::Ordering::Equal => Ok(psc_determinant(p, q, 0)),
        std::cmp::Ordering::Less => {
            let r = resultant(q, p)?;
            Ok(if (m * n) % 2 == 1 { r.neg() } else { r })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GaussianRational as G;

    fn p(c: &[i64]) -> Poly<G> {
        Poly::new(c.iter().map(|&x| G::from_int(x)).collect())
    }

    #[test]
    fn resultant_of_z2_minus_1_and_derivative() {
        assert_eq!(psc_determinant(&p(&[-1, 0, 1]), &p(&[0, 2]), 0), G::from_int(-4));
        assert_eq!(subresultant_psc(&p(&[-1, 0, 1]), &p(&[0, 2]), 0).unwrap(), G::from_int(-4));
    }

    #[test]
    fn resultant_any_degrees() {
        // (z - 1)(z - 2) against (z - 3)(z + 1)
        assert_eq!(resultant(&p(&[2, -3, 1]), &p(&[-3, -2, 1])).unwrap(), G::from_int(12));
        // deg 1 against deg 2: sign (-1)^(1*2) = 1
        assert_eq!(resultant(&p(&[-1, 1]), &p(&[-3, -2, 1])).unwrap(), G::from_int(-4));
        assert_eq!(resultant(&p(&[-3, -2, 1]), &p(&[-1, 1])).unwrap(), G::from_int(-4));
        assert_eq!(resultant(&p(&[5]), &p(&[-3, -2, 1])).unwrap(), G::from_int(25));
    }

    #[test]
    fn psc1_of_square() {
        assert_eq!(subresultant_psc(&p(&[0, 0, 1]), &p(&[0, 2]), 1).unwrap(), G::from_int(2));
        assert_eq!(subresultant_psc(&p(&[0, 0, 1]), &p(&[0, 2]), 0).unwrap(), G::zero());
    }

    #[test]
    fn symbolic_discriminant_in_t() {
        // z^2 - t^2 with coefficients in Q(i)[t]
        let t2 = Poly::monomial(G::one(), 2);
        let f: Poly<Poly<G>> = Poly::new(vec![t2.neg_poly(), Poly::zero(), Poly::one()]);
        let w = subresultant_psc(&f, &f.derivative(), 0).unwrap();
        assert_eq!(w, Poly::monomial(G::from_int(-4), 2));
        assert_eq!(psc_determinant(&f, &f.derivative(), 0), w);
    }
}
