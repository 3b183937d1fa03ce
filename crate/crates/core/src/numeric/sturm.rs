//! Real root isolation with Sturm sequences over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::{squarefree::squarefree_part, GaussianRational as G, Poly};

/// A real root of `poly` (squarefree, rational coefficients), either exact
/// or the unique root in the open interval `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealRoot {
    pub poly: Poly<G>,
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RealRoot {
    pub fn exact_value(&self) -> Option<&BigRational> {
        (self.lo == self.hi).then_some(&self.lo)
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    /// Shrinks the isolating interval by bisection until its width is at
    /// most `width`.
    pub fn refine(&self, width: &BigRational) -> RealRoot {
        let mut r = self.clone();
        let s_lo = sign_at(&r.poly, &r.lo);
        while r.lo != r.hi && &(&r.hi - &r.lo) > width {
            let mid = r.midpoint();
            let s = sign_at(&r.poly, &mid);
            if s == 0 {
                r.lo = mid.clone();
                r.hi = mid;
            } else if s == s_lo {
                r.lo = mid;
            } else {
                r.hi = mid;
            }
        }
        r
    }

    pub fn approx(&self) -> f64 {
        crate::algebra::rat_to_f64(&self.midpoint())
    }
}

fn real_part(p: &Poly<G>) -> Vec<BigRational> {
    p.coeffs().iter().map(|c| c.re.clone()).collect()
}

fn eval_real(c: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for a in c.iter().rev() {
        acc = acc * x + a;
    }
    acc
}

/// Sign of `p(x)` for real `p`.
pub fn sign_at(p: &Poly<G>, x: &BigRational) -> i32 {
    let v = eval_real(&real_part(p), x);
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// Sturm sequence `p, p', -rem(p, p'), ...` of a real polynomial.
pub fn sturm_sequence(p: &Poly<G>) -> Vec<Poly<G>> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].rem(&seq[n - 1]).expect("rational division");
        if r.is_zero() {
            break;
        }
        seq.push(r.neg_poly());
    }
    seq
}

fn variations(seq: &[Poly<G>], x: &BigRational) -> usize {
    let mut last = 0;
    let mut count = 0;
    for p in seq {
        let s = sign_at(p, x);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots in the half-open interval `(a, b]`.
pub fn count_roots(seq: &[Poly<G>], a: &BigRational, b: &BigRational) -> usize {
    variations(seq, a) - variations(seq, b)
}

/// Isolates the distinct real roots of a real polynomial in the closed
/// interval `[lo, hi]`, sorted ascending. Intervals are pairwise disjoint and
/// each contains exactly one root; rational roots met during bisection are
/// reported exactly.
pub fn isolate_real_roots(p: &Poly<G>, lo: &BigRational, hi: &BigRational) -> Vec<RealRoot> {
    assert!(p.coeffs().iter().all(|c| c.im.is_zero()), "Sturm isolation needs real coefficients");
    if p.deg() == 0 {
        return Vec::new();
    }
    let q = squarefree_part(p).expect("rational gcd");
    let seq = sturm_sequence(&q);
    let mut out = Vec::new();
    if sign_at(&q, lo) == 0 {
        out.push(RealRoot { poly: q.clone(), lo: lo.clone(), hi: lo.clone() });
    }
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        let k = count_roots(&seq, &a, &b);
        if k == 0 {
            continue;
        }
        if sign_at(&q, &b) == 0 {
            out.push(RealRoot { poly: q.clone(), lo: b.clone(), hi: b.clone() });
            if k == 1 {
                continue;
            }
        } else if k == 1 {
            let a = if sign_at(&q, &a) == 0 { shrink_above(&q, &seq, &a, &b) } else { a };
            out.push(RealRoot { poly: q.clone(), lo: a, hi: b.clone() });
            continue;
        }
        let mid = (&a + &b) / BigRational::from_integer(BigInt::from(2));
        // (a, b] with b handled: split into (a, mid] and (mid, b')
        let b_open = if sign_at(&q, &b) == 0 { shrink_below(&q, &seq, &mid, &b) } else { b.clone() };
        stack.push((mid.clone(), b_open));
        stack.push((a, mid));
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

/// An upper endpoint just below the root at `b`, excluding it from
/// `(mid, b]` while keeping every other root.
fn shrink_below(q: &Poly<G>, seq: &[Poly<G>], mid: &BigRational, b: &BigRational) -> BigRational {
    let mut c = b.clone();
    let mut step = (b - mid) / BigRational::from_integer(BigInt::from(2));
    loop {
        let cand = b - &step;
        if sign_at(q, &cand) != 0 && count_roots(seq, &cand, b) == 1 {
            c = cand;
            break;
        }
        step /= BigRational::from_integer(BigInt::from(2));
        if step < BigRational::new(BigInt::one(), BigInt::one() << 4000) {
            break;
        }
    }
    c
}

/// A lower endpoint just above the root at `a` such that `(a', b]` keeps
/// its single root.
fn shrink_above(q: &Poly<G>, seq: &[Poly<G>], a: &BigRational, b: &BigRational) -> BigRational {
    let mut step = (b - a) / BigRational::from_integer(BigInt::from(2));
    loop {
        let cand = a + &step;
        if sign_at(q, &cand) != 0 && count_roots(seq, &cand, b) == 1 {
            return cand;
        }
        step /= BigRational::from_integer(BigInt::from(2));
        assert!(step > BigRational::new(BigInt::one(), BigInt::one() << 4000), "root separation underflow");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly<G> {
        Poly::new(c.iter().map(|&x| G::from_int(x)).collect())
    }
    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn roots_of_quadratic() {
        let roots = isolate_real_roots(&p(&[-2, 0, 1]), &q(-2), &q(2));
        assert_eq!(roots.len(), 2);
        let r = roots[1].refine(&BigRational::new(1.into(), 1_000_000.into()));
        assert!((r.approx() - std::f64::consts::SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn rational_roots_are_exact() {
        // t (t - 1) on [-1, 1]
        let roots = isolate_real_roots(&p(&[0, -1, 1]), &q(-1), &q(1));
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.exact_value().is_some()));
        assert_eq!(roots[0].exact_value(), Some(&q(0)));
        assert_eq!(roots[1].exact_value(), Some(&q(1)));
    }

    #[test]
    fn no_roots() {
        assert!(isolate_real_roots(&p(&[1, 0, 1]), &q(-5), &q(5)).is_empty());
    }
}
