//! Structured renderings of engine results.

use orbit_lift::algebra::GaussianRational as G;
use orbit_lift::global::{cycle_notation, AcCertificate, GlobalLift};
use orbit_lift::lifting::{LiftedRoot, LocalLift};
use orbit_lift::polar::EigenLift;
use orbit_lift::quotient::MonicCurve;
use orbit_lift::regularity::{DerivativeCertificate, FlatnessReport};
use orbit_lift::series::{Sign, Valuation};

use crate::document::Document;

/// `x` with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..12).contains(&e) {
        format!("{:.*}", (11 - e) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

fn root_text(r: &LiftedRoot) -> String {
    let body = r.series.body.fmt_var("s");
    match &r.embedding {
        None => body,
        Some(e) => format!("{body} | w: {} near {} r {}", e.modulus.fmt_var("w"), e.disc.center, G::from_real(e.disc.radius.clone())),
    }
}

fn push_curve(doc: &mut Document, c: &MonicCurve) {
    doc.push("rep", &c.rep);
    for comp in &c.components {
        doc.push("coefficient", comp.fmt_var("t"));
    }
}

pub fn local_lift(c: &MonicCurve, l: &LocalLift, branch: Option<Sign>) -> Document {
    let mut doc = Document::new("local-lift");
    push_curve(&mut doc, c);
    doc.push("base", &l.base_point);
    doc.push("N", l.ramification);
    doc.push("scale", &l.scale);
    doc.push("order", l.certificate_order);
    let signs: Vec<Sign> = match branch {
        Some(s) => vec![s],
        None => l.branches.iter().map(|b| b.sign).collect(),
    };
    for sign in signs {
        doc.push("branch", sign);
        for r in l.roots(sign) {
            doc.push("root", root_text(&r));
        }
        let b = l.branch(sign).unwrap_or(&l.branches[0]);
        for step in &b.trace {
            doc.push("trace", step);
        }
    }
    doc
}

fn push_global(doc: &mut Document, g: &GlobalLift) {
    push_curve(doc, &g.curve);
    doc.push("interval", format!("{}:{}", G::from_real(g.lo.clone()), G::from_real(g.hi.clone())));
    doc.push("order", g.order);
    doc.push("exceptional", &g.exceptional);
    for (i, p) in g.pieces.iter().enumerate() {
        doc.push(
            "piece",
            format!(
                "{} [{}, {}] base {} N={} side {} permutation {}",
                i + 1,
                p.lo,
                p.hi,
                p.base_point,
                p.ramification,
                p.side,
                cycle_notation(&p.permutation)
            ),
        );
        for r in &p.roots {
            doc.push("root", root_text(r));
        }
    }
    for j in &g.junctions {
        let vals: Vec<String> = j.values.iter().map(|v| v.to_string()).collect();
        doc.push("junction", format!("{} ({})", j.at, vals.join(", ")));
        if let Some(d) = &j.derivatives {
            let vals: Vec<String> = d.iter().map(|v| v.to_string()).collect();
            doc.push("derivatives", format!("({})", vals.join(", ")));
        }
    }
}

fn push_ac(doc: &mut Document, ac: &AcCertificate) {
    for (i, p) in ac.pieces.iter().enumerate() {
        doc.push("ac-piece", format!("{} [{}, {}] analytic in |t - t0|^(1/{})", i + 1, p.lo, p.hi, p.ramification));
    }
    doc.push("tv-grid-points", ac.grid_points);
    let tv: Vec<String> = ac.total_variation.iter().map(|x| sig12(*x)).collect();
    doc.push("tv-numeric", tv.join(", "));
}

pub fn global_lift(g: &GlobalLift, ac: Option<&AcCertificate>) -> Document {
    let mut doc = Document::new("global-lift");
    push_global(&mut doc, g);
    if let Some(ac) = ac {
        push_ac(&mut doc, ac);
    }
    doc
}

fn fmt_valuation(v: &Valuation) -> String {
    match v {
        Valuation::Finite(x) => x.to_string(),
        Valuation::Infinity => "inf".into(),
        Valuation::UndeterminedAtOrder(t) => format!(">{t}"),
    }
}

fn push_report(doc: &mut Document, r: &FlatnessReport) {
    for p in &r.contact_points {
        doc.push("point", format!("{} {}", p.point, if p.pass { "pass" } else { "fail" }));
        for (i, cl) in p.clusters.iter().enumerate() {
            doc.push("cluster", format!("{} center {} size {} copies {}", i + 1, cl.center, cl.size, cl.multiplicity));
            for (j, v) in &cl.valuations {
                let verdict = if cl.failing == Some(*j) || v.finite().is_some_and(|x| x < *j) { "fail" } else { "pass" };
                doc.push("valuation", format!("k={j} v={} required={j} {verdict}", fmt_valuation(v)));
            }
        }
    }
    doc.push("max-degree", r.max_degree);
    doc.push("overall", if r.overall { "pass" } else { "fail" });
}

fn push_derivatives(doc: &mut Document, ds: &[DerivativeCertificate]) {
    for d in ds {
        let vals: Vec<String> = d.values.iter().map(|v| v.to_string()).collect();
        doc.push("derivative", format!("{} ({})", d.point, vals.join(", ")));
    }
}

pub fn regularity(c: &MonicCurve, r: &FlatnessReport, derivatives: Option<&[DerivativeCertificate]>) -> Document {
    let mut doc = Document::new("flatness-report");
    push_curve(&mut doc, c);
    push_report(&mut doc, r);
    if let Some(ds) = derivatives {
        push_derivatives(&mut doc, ds);
    }
    doc
}

pub fn eigen(matrix: &str, mode: &str, e: &EigenLift) -> Document {
    let mut doc = Document::new("eigen-lift");
    doc.push("matrix", matrix);
    doc.push("mode", mode);
    push_global(&mut doc, &e.lift);
    if let Some(ac) = &e.ac {
        push_ac(&mut doc, ac);
    }
    if let Some(r) = &e.report {
        push_report(&mut doc, r);
    }
    if let Some(ds) = &e.derivatives {
        push_derivatives(&mut doc, ds);
    }
    doc
}

pub fn probe(g: &GlobalLift, p: f64, eps: &[f64], values: &[f64]) -> Document {
    let mut doc = Document::new("lp-probe");
    push_curve(&mut doc, &g.curve);
    doc.push("interval", format!("{}:{}", G::from_real(g.lo.clone()), G::from_real(g.hi.clone())));
    doc.push("exceptional", &g.exceptional);
    doc.push("p", sig12(p));
    for (e, v) in eps.iter().zip(values) {
        doc.push("numeric", format!("eps={} I={}", sig12(*e), sig12(*v)));
    }
    doc
}

/// Human-readable form: one `key value` line per record, with repeated
/// keys aligned under their first occurrence.
pub fn text(doc: &Document) -> String {
    let width = doc.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in &doc.entries {
        out.push_str(&format!("{k:<width$}  {v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(1.0), "1.00000000000");
        assert_eq!(sig12(0.25), "0.250000000000");
        assert_eq!(sig12(-1234.5), "-1234.50000000");
        assert_eq!(sig12(1e-9), "1.00000000000e-9");
        assert_eq!(sig12(0.0), "0");
    }
}
