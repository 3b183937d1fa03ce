//! Division-free determinants and characteristic polynomials.

use super::poly::Poly;
use super::ring::Ring;

/// Characteristic polynomial `det(z*I - A)` by Berkowitz's algorithm. Uses
/// only ring operations, so it works over polynomial and truncated-series
/// rings where division is unavailable.
pub fn charpoly<R: Ring>(a: &[Vec<R>]) -> Poly<R> {
    let n = a.len();
    // Coefficients from the leading one downwards.
    let mut c: Vec<R> = vec![R::one()];
    for r in 0..n {
        let diag = a[r][r].clone();
        // toeplitz[0] = 1, toeplitz[1] = -a_rr, toeplitz[k] = -row * M^(k-2) * col
        let mut toeplitz = Vec::with_capacity(r + 2);
        toeplitz.push(R::one());
        toeplitz.push(diag.neg());
        let mut v: Vec<R> = (0..r).map(|i| a[i][r].clone()).collect();
        for _ in 0..r {
            let dot = (0..r).fold(R::zero(), |acc, j| acc.add(&a[r][j].mul(&v[j])));
            toeplitz.push(dot.neg());
            v = (0..r)
                .map(|i| (0..r).fold(R::zero(), |acc, j| acc.add(&a[i][j].mul(&v[j]))))
                .collect();
        }
        let mut next = Vec::with_capacity(r + 2);
        for i in 0..r + 2 {
            let mut acc = R::zero();
            for (j, cj) in c.iter().enumerate().take(i.min(r) + 1) {
                acc = acc.add(&toeplitz[i - j].mul(cj));
            }
            next.push(acc);
        }
        c = next;
    }
    c.reverse();
    Poly::new(c)
}

/// Determinant of a square matrix.
pub fn det<R: Ring>(a: &[Vec<R>]) -> R {
    let n = a.len();
    let cp = charpoly(a);
    let c0 = cp.coeff(0);
    if n % 2 == 0 {
        c0
    } else {
        c0.neg()
    }
}
