//! Line-oriented documents: a version header followed by `key: value`
//! records. Inputs and structured outputs share the format.

use std::fmt;

use num_rational::BigRational;
use orbit_lift::algebra::parse::{parse_rational, parse_series, ParseError};
use orbit_lift::polar::{MatrixCurve, MatrixError};
use orbit_lift::quotient::{ModelError, MonicCurve, RepresentationSpec};
use thiserror::Error;

pub const HEADER: &str = "orbit-lift/1";

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("line {line}: expected `key: value`")]
    Syntax { line: usize },
    #[error("expected header `{HEADER}`, found `{0}`")]
    Header(String),
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("field `{field}`: {message}")]
    Field { field: &'static str, message: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// An ordered list of records with a kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub kind: String,
    pub entries: Vec<(String, String)>,
}

impl Document {
    pub fn new(kind: &str) -> Self {
        Self { kind: kind.to_string(), entries: Vec::new() }
    }

    /// Appends a record. Newlines in the value are replaced by `; `.
    pub fn push(&mut self, key: &str, value: impl fmt::Display) {
        let v = value.to_string().replace('\n', "; ");
        self.entries.push((key.to_string(), v));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.entries.iter().filter(move |(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Parses a serialized document. The header is required.
    pub fn parse(src: &str) -> Result<Self, DocumentError> {
        let mut lines = src.lines();
        let first = lines.next().unwrap_or("");
        if first != HEADER {
            return Err(DocumentError::Header(first.to_string()));
        }
        let mut kind = None;
        let mut entries = Vec::new();
        for (i, line) in lines.enumerate() {
            let (k, v) = line.split_once(": ").ok_or(DocumentError::Syntax { line: i + 2 })?;
            if k.is_empty() || k.contains(char::is_whitespace) {
                return Err(DocumentError::Syntax { line: i + 2 });
            }
            if kind.is_none() {
                if k != "kind" {
                    return Err(DocumentError::Missing("kind"));
                }
                kind = Some(v.to_string());
            } else {
                entries.push((k.to_string(), v.to_string()));
            }
        }
        Ok(Self { kind: kind.ok_or(DocumentError::Missing("kind"))?, entries })
    }

    /// Lenient reading of hand-written inputs: the header is optional,
    /// blank lines and `#` comments are skipped, and `:` may be followed by
    /// any amount of space.
    pub fn parse_input(src: &str) -> Result<Self, DocumentError> {
        let mut doc = Document::new("curve");
        let mut seen_kind = false;
        for (i, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() || (line == HEADER && i == 0) {
                continue;
            }
            let (k, v) = line.split_once(':').ok_or(DocumentError::Syntax { line: i + 1 })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(DocumentError::Syntax { line: i + 1 });
            }
            if k == "kind" && !seen_kind {
                doc.kind = v.to_string();
                seen_kind = true;
            } else {
                doc.entries.push((k.to_string(), v.to_string()));
            }
        }
        Ok(doc)
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEADER}")?;
        writeln!(f, "kind: {}", self.kind)?;
        for (k, v) in &self.entries {
            writeln!(f, "{k}: {v}")?;
        }
        Ok(())
    }
}

/// Parses `lo:hi` into a rational interval with `lo < hi`.
pub fn parse_interval(s: &str) -> Result<(BigRational, BigRational), DocumentError> {
    let bad = |m: &str| DocumentError::Field { field: "interval", message: m.to_string() };
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    let (a, b) = s.split_once(':').or_else(|| s.split_once(',')).ok_or_else(|| bad("expected `lo:hi`"))?;
    let lo = parse_rational(a.trim())?;
    let hi = parse_rational(b.trim())?;
    if lo >= hi {
        return Err(bad("lo must be below hi"));
    }
    Ok((lo, hi))
}

/// Input curve: representation, components and optional defaults for the
/// truncation order, interval and base point.
#[derive(Clone, Debug)]
pub struct CurveDocument {
    pub curve: MonicCurve,
    pub truncation: Option<usize>,
    pub interval: Option<(BigRational, BigRational)>,
    pub base_point: Option<BigRational>,
}

fn common(doc: &Document) -> Result<(Option<usize>, Option<(BigRational, BigRational)>, Option<BigRational>), DocumentError> {
    let truncation = match doc.get("truncation").or_else(|| doc.get("order")) {
        Some(s) => {
            let t: usize = s.parse().map_err(|_| DocumentError::Field { field: "truncation", message: format!("`{s}` is not a positive integer") })?;
            if t == 0 {
                return Err(DocumentError::Field { field: "truncation", message: "must be at least 1".into() });
            }
            Some(t)
        }
        None => None,
    };
    let interval = doc.get("interval").map(parse_interval).transpose()?;
    let base_point = doc.get("base_point").or_else(|| doc.get("at")).map(parse_rational).transpose()?;
    Ok((truncation, interval, base_point))
}

impl CurveDocument {
    /// Components come from repeated `coefficient` records or one
    /// `coefficients` record separated by `;`.
    pub fn from_document(doc: &Document) -> Result<Self, DocumentError> {
        let rep = RepresentationSpec::parse(doc.get("rep").ok_or(DocumentError::Missing("rep"))?)?;
        let mut comps: Vec<String> = doc.get_all("coefficient").map(str::to_string).collect();
        if let Some(all) = doc.get("coefficients") {
            comps.extend(all.split(';').map(|c| c.trim().to_string()));
        }
        let comps = comps.iter().map(|c| parse_series(c, "t")).collect::<Result<Vec<_>, _>>()?;
        let curve = MonicCurve::new(rep, comps)?;
        let (truncation, interval, base_point) = common(doc)?;
        Ok(Self { curve, truncation, interval, base_point })
    }

    pub fn parse(src: &str) -> Result<Self, DocumentError> {
        Self::from_document(&Document::parse_input(src)?)
    }
}

/// Input matrix curve, from one `matrix` record or repeated `row` records.
#[derive(Clone, Debug)]
pub struct MatrixDocument {
    pub matrix: MatrixCurve,
    pub truncation: Option<usize>,
    pub interval: Option<(BigRational, BigRational)>,
}

impl MatrixDocument {
    pub fn from_document(doc: &Document) -> Result<Self, DocumentError> {
        let matrix = match doc.get("matrix") {
            Some(m) => MatrixCurve::parse(m)?,
            None => {
                let rows: Vec<&str> = doc.get_all("row").collect();
                if rows.is_empty() {
                    return Err(DocumentError::Missing("matrix"));
                }
                MatrixCurve::parse(&rows.join("\n"))?
            }
        };
        let (truncation, interval, _) = common(doc)?;
        Ok(Self { matrix, truncation, interval })
    }

    pub fn parse(src: &str) -> Result<Self, DocumentError> {
        Self::from_document(&Document::parse_input(src)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut d = Document::new("lift");
        d.push("N", 2);
        d.push("root", "s + 1/2*s^2");
        d.push("note", "a\nb");
        let s = d.to_string();
        assert_eq!(Document::parse(&s).unwrap(), d);
        assert_eq!(Document::parse(&s).unwrap().to_string(), s);
        assert_eq!(d.get("note"), Some("a; b"));
    }

    #[test]
    fn input_forms() {
        let c = CurveDocument::parse("# z^2 - t\nrep: sym:2\ncoefficients: 0; -t\ntruncation: 6\ninterval: -1:1\n").unwrap();
        assert_eq!(c.curve.components.len(), 2);
        assert_eq!(c.truncation, Some(6));
        let c = CurveDocument::parse("orbit-lift/1\nkind: curve\nrep: cyc:3\ncoefficient: t\nbase_point: 1/2\n").unwrap();
        assert_eq!(c.base_point, Some(BigRational::new(1.into(), 2.into())));
        assert!(matches!(CurveDocument::parse("rep: sym:2\ncoefficient: t\n"), Err(DocumentError::Model(_))));
        assert!(matches!(CurveDocument::parse("rep: sym:1\ncoefficient: t\ninterval: 1:0"), Err(DocumentError::Field { .. })));
        assert!(matches!(CurveDocument::parse("rep: sym:1\ncoefficient: t\ntruncation: 0"), Err(DocumentError::Field { .. })));
        let m = MatrixDocument::parse("row: 0, t\nrow: t, 0\n").unwrap();
        assert_eq!(m.matrix.size(), 2);
    }

    #[test]
    fn strict_parse_rejects() {
        assert!(matches!(Document::parse("orbit-lift/2\nkind: x\n"), Err(DocumentError::Header(_))));
        assert!(matches!(Document::parse("orbit-lift/1\nkind: x\nbad line\n"), Err(DocumentError::Syntax { line: 3 })));
    }
}
