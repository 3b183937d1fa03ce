//! Exact certificate of a branch: the roots map back to the curve.
//!
//! For a `Symmetric(n)` leaf the power sums of all roots are compared with
//! the power sums of the curve. A family over `M = Q(i)[w]/(nu)` stands for
//! its conjugates, so its contribution is a trace; over an irrational base
//! field `K0` both sides are compared through the trace form
//! `Tr(. * x^i)`, which determines an element of `K0`.

use super::engine::S;
use super::field::FieldCtx;
use super::{LiftError, RootFamily};
use crate::algebra::{GaussianRational as G, Ring, Scalar};
use crate::quotient::Leaf;
use crate::series::{Sign, TruncatedSeries};

type GS = TruncatedSeries<G>;

fn trunc(s: &S, ord: Option<usize>) -> S {
    match ord {
        Some(t) => s.truncate(t),
        None => s.clone(),
    }
}

fn mul(a: &S, b: &S, ord: Option<usize>) -> S {
    trunc(&a.mul_series(b), ord)
}

fn trace_series(ctx: &FieldCtx, s: &S, sums: &[G]) -> GS {
    s.map(|c| ctx.trace(c, sums))
}

fn agree<R: Ring>(a: &TruncatedSeries<R>, b: &TruncatedSeries<R>, ord: Option<usize>) -> bool {
    match ord {
        Some(t) => (0..=t).all(|k| a.coeff(k) == b.coeff(k)),
        None => a.coeffs() == b.coeffs(),
    }
}

/// Power sums `p_0..p_n` from `a_1..a_n` (elementary symmetric functions).
fn newton_power_sums(a: &[S], ord: Option<usize>) -> Vec<S> {
    let n = a.len();
    let mut p = vec![S::constant(Scalar::from_int(n as i64))];
    for j in 1..=n {
        let mut acc = a[j - 1].scale(&Scalar::from_int(j as i64));
        if j % 2 == 0 {
            acc = acc.neg_series();
        }
        for i in 1..j {
            let term = mul(&a[i - 1], &p[j - i], ord);
            acc = if i % 2 == 1 { acc.add_series(&term) } else { acc.sub_series(&term) };
        }
        p.push(trunc(&acc, ord));
    }
    p
}

fn min_order(it: impl Iterator<Item = Option<usize>>) -> Option<usize> {
    it.flatten().min()
}

/// Checks one branch; returns the certified order in `s`, `None` when the
/// identity holds exactly.
pub(crate) fn certify(
    families: &[RootFamily],
    targets: &[(Leaf, Vec<S>)],
    base: &FieldCtx,
    ramification: usize,
    sign: Sign,
) -> Result<Option<usize>, LiftError> {
    let mut overall: Option<usize> = None;
    let base_sums = base.power_sums();
    for (leaf_index, (leaf, comps)) in targets.iter().enumerate() {
        let fams: Vec<&RootFamily> = families.iter().filter(|f| f.leaf == leaf_index).collect();
        let target: Vec<S> = comps.iter().map(|c| c.substitute_power(ramification, sign)).collect();
        let ord = min_order(fams.iter().map(|f| f.series.order()).chain(target.iter().map(|c| c.order())));
        let fail = |what: &str| LiftError::CertificateFailed(format!("leaf {leaf_index}: {what}"));
        match leaf {
            Leaf::Cyclic(m) => {
                let [f] = fams.as_slice() else { return Err(fail("expected one root")) };
                let mut acc = S::one();
                for _ in 0..*m {
                    acc = mul(&acc, &f.series, ord);
                }
                if !agree(&acc, &trunc(&target[0], ord), ord) {
                    return Err(fail("r^m differs from the curve"));
                }
            }
            Leaf::Symmetric(n) => {
                let count: usize = fams.iter().map(|f| f.replication * f.embeddings.len().max(1)).sum();
                if count != *n {
                    return Err(fail(&format!("{count} roots for degree {n}")));
                }
                let sums = newton_power_sums(&target, ord);
                if base.modulus.is_some() && fams.iter().all(|f| f.ctx() == *base) {
                    // Every root lies in the base field: compare there.
                    let mut powers: Vec<S> = vec![S::one(); fams.len()];
                    for (j, pj) in sums.iter().enumerate() {
                        let mut lhs = S::zero();
                        for (p, f) in powers.iter_mut().zip(&fams) {
                            if j > 0 {
                                *p = mul(p, &f.series, ord);
                            }
                            lhs = lhs.add_series(&p.scale(&Scalar::from_int(f.replication as i64)));
                        }
                        if !agree(&lhs, &trunc(pj, ord), ord) {
                            return Err(fail(&format!("power sum {j} differs")));
                        }
                    }
                    if let Some(t) = ord {
                        overall = Some(overall.map_or(t, |o| o.min(t)));
                    }
                    continue;
                }
                let k0 = base.degree();
                let x = base.base_image.clone().unwrap_or_else(Scalar::one);
                let fam_data: Vec<(Vec<G>, Scalar)> = fams
                    .iter()
                    .map(|f| (f.ctx().power_sums(), f.base_image.clone().unwrap_or_else(Scalar::one)))
                    .collect();
                let mut powers: Vec<S> = vec![S::one(); fams.len()];
                for (j, pj) in sums.iter().enumerate() {
                    if j > 0 {
                        for (p, f) in powers.iter_mut().zip(&fams) {
                            *p = mul(p, &f.series, ord);
                        }
                    }
                    let mut xi = Scalar::one();
                    let mut fxi: Vec<Scalar> = vec![Scalar::one(); fams.len()];
                    for i in 0..k0 {
                        if i > 0 {
                            xi = xi.mul(&x);
                            for (v, (_, img)) in fxi.iter_mut().zip(&fam_data) {
                                *v = v.mul(img);
                            }
                        }
                        let rhs = trace_series(base, &trunc(&pj.scale(&xi), ord), &base_sums);
                        let mut lhs = GS::zero();
                        for (k, f) in fams.iter().enumerate() {
                            let t = trace_series(&f.ctx(), &powers[k].scale(&fxi[k]), &fam_data[k].0);
                            lhs = lhs.add_series(&t.scale(&G::from_int(f.replication as i64)));
                        }
                        if !agree(&lhs, &rhs, ord) {
                            return Err(fail(&format!("power sum {j} differs")));
                        }
                    }
                }
            }
        }
        if let Some(t) = ord {
            overall = Some(overall.map_or(t, |o| o.min(t)));
        }
    }
    Ok(overall)
}
