//! Command-line front end for the lifting engine: input documents,
//! dispatch and output rendering.

pub mod document;
pub mod render;

use std::fmt;

use num_rational::BigRational;
use orbit_lift::global::{ac_certificate, glue_global, lp_probe, GlobalError};
use orbit_lift::lifting::{local_lift, LiftError};
use orbit_lift::polar::{eigen_lift, EigenMode};
use orbit_lift::regularity::{differentiable_lift, point_report, RegularityError};
use orbit_lift::series::{BasePoint, Sign};

use document::{CurveDocument, Document, DocumentError, MatrixDocument};

pub const DEFAULT_ORDER: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

/// Options shared by every subcommand; `None` falls back to the input
/// document and then to the defaults.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub order: Option<usize>,
    pub interval: Option<(BigRational, BigRational)>,
    pub at: Option<BigRational>,
    pub branch: Option<Sign>,
}

#[derive(Debug)]
pub enum Failure {
    Input(DocumentError),
    Nonflat(String),
    Engine(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Engine(_) => 1,
            Failure::Nonflat(_) => 2,
            Failure::Input(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(e) => write!(f, "parse error: {e}"),
            Failure::Nonflat(m) | Failure::Engine(m) => f.write_str(m),
        }
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        Failure::Input(e)
    }
}

fn lift_failure(e: &LiftError) -> Option<Failure> {
    match e {
        LiftError::NonflatUndetermined(t) => Some(Failure::Nonflat(format!(
            "nonflat undetermined: {e}; rerun with --order above {t}"
        ))),
        _ => None,
    }
}

impl From<LiftError> for Failure {
    fn from(e: LiftError) -> Self {
        lift_failure(&e).unwrap_or_else(|| Failure::Engine(format!("error: {e}")))
    }
}

impl From<GlobalError> for Failure {
    fn from(e: GlobalError) -> Self {
        match &e {
            GlobalError::Lift(l) => lift_failure(l).unwrap_or_else(|| Failure::Engine(format!("error: {e}"))),
            _ => Failure::Engine(format!("error: {e}")),
        }
    }
}

impl From<RegularityError> for Failure {
    fn from(e: RegularityError) -> Self {
        match e {
            RegularityError::Lift(l) => l.into(),
            RegularityError::Global(g) => g.into(),
            other => Failure::Engine(format!("error: {other}")),
        }
    }
}

fn order(opts: &Options, doc: Option<usize>) -> usize {
    opts.order.or(doc).unwrap_or(DEFAULT_ORDER)
}

fn interval(opts: &Options, doc: &Option<(BigRational, BigRational)>) -> (BigRational, BigRational) {
    opts.interval.clone().or_else(|| doc.clone()).unwrap_or_else(|| (BigRational::from_integer((-1).into()), BigRational::from_integer(1.into())))
}

pub fn cmd_lift(src: &str, opts: &Options) -> Result<Document, Failure> {
    let doc = CurveDocument::parse(src)?;
    let t0 = opts.at.clone().or(doc.base_point).unwrap_or_default();
    let l = local_lift(&doc.curve, &t0, order(opts, doc.truncation))?;
    Ok(render::local_lift(&doc.curve, &l, opts.branch))
}

pub fn cmd_global(src: &str, opts: &Options) -> Result<Document, Failure> {
    let doc = CurveDocument::parse(src)?;
    let (lo, hi) = interval(opts, &doc.interval);
    let g = glue_global(&doc.curve, &lo, &hi, order(opts, doc.truncation))?;
    let ac = ac_certificate(&g);
    Ok(render::global_lift(&g, Some(&ac)))
}

/// With `--at`, the 1-flatness test at that point; otherwise the report
/// over the interval and, when it passes, the derivatives at the contact
/// points.
pub fn cmd_regularity(src: &str, opts: &Options) -> Result<Document, Failure> {
    let doc = CurveDocument::parse(src)?;
    let t = order(opts, doc.truncation);
    if let Some(t0) = &opts.at {
        let r = point_report(&doc.curve, &BasePoint::Rational(t0.clone()), t)?;
        return Ok(render::regularity(&doc.curve, &r, None));
    }
    let (lo, hi) = interval(opts, &doc.interval);
    match differentiable_lift(&doc.curve, &lo, &hi, t) {
        Ok(d) => Ok(render::regularity(&doc.curve, &d.report, Some(&d.derivatives))),
        Err(RegularityError::NotOneFlat(r)) => Ok(render::regularity(&doc.curve, &r, None)),
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_eigen(src: &str, opts: &Options, mode: EigenMode) -> Result<Document, Failure> {
    let doc = MatrixDocument::parse(src)?;
    let (lo, hi) = interval(opts, &doc.interval);
    let name = match mode {
        EigenMode::Continuous => "continuous",
        EigenMode::Ac => "ac",
        EigenMode::Differentiable => "differentiable",
    };
    match eigen_lift(&doc.matrix, &lo, &hi, order(opts, doc.truncation), mode) {
        Ok(e) => Ok(render::eigen(&doc.matrix.to_string(), name, &e)),
        Err(RegularityError::NotOneFlat(r)) => {
            let c = orbit_lift::polar::charpoly_curve(&doc.matrix);
            let mut d = render::regularity(&c, &r, None);
            d.kind = "eigen-flatness-report".into();
            Ok(d)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_probe_lp(src: &str, opts: &Options, p: f64, eps: &[f64]) -> Result<Document, Failure> {
    let doc = CurveDocument::parse(src)?;
    let (lo, hi) = interval(opts, &doc.interval);
    let g = glue_global(&doc.curve, &lo, &hi, order(opts, doc.truncation))?;
    let values = lp_probe(&g, p, eps);
    Ok(render::probe(&g, p, eps, &values))
}

pub fn emit(doc: &Document, format: Format) -> String {
    match format {
        Format::Structured => doc.to_string(),
        Format::Text => render::text(doc),
    }
}
