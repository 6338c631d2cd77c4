//! Persistence diagrams and the geometry of their points.
//!
//! Only off-diagonal points are stored. The diagonal, which every diagram
//! contains with infinite multiplicity, stays implicit; the matching code
//! reaches it through dedicated diagonal slots of the cost matrix.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::extended::{format_real, ExtendedValue};
use crate::{Error, Result};

/// An off-diagonal point `(birth, death)` with `birth < death`.
///
/// `birth` is always finite; `death` may be `f64::INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagramPoint {
    birth: f64,
    death: f64,
    multiplicity: u32,
}

impl DiagramPoint {
    pub fn new(birth: f64, death: f64) -> Result<Self> {
        Self::with_multiplicity(birth, death, 1)
    }

    pub fn with_multiplicity(birth: f64, death: f64, multiplicity: u32) -> Result<Self> {
        let invalid = |reason| Error::InvalidPoint {
            birth,
            death,
            reason,
        };
        if !birth.is_finite() {
            return Err(invalid("birth must be finite"));
        }
        if death.is_nan() {
            return Err(invalid("death is NaN"));
        }
        if death < birth {
            return Err(invalid("death precedes birth"));
        }
        if death == birth {
            return Err(invalid("point lies on the diagonal"));
        }
        if multiplicity == 0 {
            return Err(invalid("multiplicity must be positive"));
        }
        Ok(DiagramPoint {
            birth: birth + 0.0,
            death: death + 0.0,
            multiplicity,
        })
    }

    /// Shorthand for an essential class `(birth, ∞)`.
    pub fn infinite(birth: f64) -> Result<Self> {
        Self::new(birth, f64::INFINITY)
    }

    pub fn birth(&self) -> f64 {
        self.birth
    }

    pub fn death(&self) -> f64 {
        self.death
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    pub fn is_infinite(&self) -> bool {
        self.death == f64::INFINITY
    }

    /// Bar length `death - birth` (∞ for essential classes).
    pub fn persistence(&self) -> ExtendedValue {
        ExtendedValue::abs_diff(self.death, self.birth)
    }

    /// The same point with multiplicity one.
    pub fn unit(&self) -> Self {
        DiagramPoint {
            multiplicity: 1,
            ..*self
        }
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.birth
            .total_cmp(&other.birth)
            .then(self.death.total_cmp(&other.death))
    }

    fn same_location(&self, other: &Self) -> bool {
        self.canonical_cmp(other) == Ordering::Equal
    }

    pub fn diagonal_projection(&self) -> (f64, f64) {
        diagonal_projection(self.birth, self.death)
    }

    pub fn diagonal_gap(&self) -> ExtendedValue {
        diagonal_gap(self)
    }
}

/// `‖a − b‖∞ = max(|x₁ − x₂|, |y₁ − y₂|)`, with `|y₁ − y₂| = 0` when both
/// deaths are infinite and `∞` when exactly one is.
pub fn linf_distance(a: &DiagramPoint, b: &DiagramPoint) -> ExtendedValue {
    plane_linf((a.birth, a.death), (b.birth, b.death))
}

/// `‖·‖∞` between two points of the extended plane.
pub fn plane_linf(a: (f64, f64), b: (f64, f64)) -> ExtendedValue {
    ExtendedValue::abs_diff(a.0, b.0).max(ExtendedValue::abs_diff(a.1, b.1))
}

/// Orthogonal projection of `(x, y)` onto the diagonal: `((x+y)/2, (x+y)/2)`.
/// A point with infinite death projects to `(∞, ∞)`.
pub fn diagonal_projection(x: f64, y: f64) -> (f64, f64) {
    let m = if y == f64::INFINITY {
        f64::INFINITY
    } else {
        (x + y) / 2.0
    };
    (m, m)
}

/// `‖a − λ(a)‖∞`: half the bar length, `∞` for essential classes.
///
/// Evaluated literally as the distance to the projection so the identity
/// `diagonal_gap(a) == linf(a, λ(a))` holds bit for bit.
pub fn diagonal_gap(a: &DiagramPoint) -> ExtendedValue {
    plane_linf((a.birth, a.death), a.diagonal_projection())
}

/// A finite multiset of off-diagonal points, kept in canonical order
/// (lexicographic by birth, then death) with coincident points merged into
/// one entry carrying the summed multiplicity.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PersistenceDiagram {
    points: Vec<DiagramPoint>,
    homology_dimension: Option<usize>,
}

impl PersistenceDiagram {
    pub fn new(points: impl IntoIterator<Item = DiagramPoint>) -> Self {
        let mut points: Vec<DiagramPoint> = points.into_iter().collect();
        points.sort_by(DiagramPoint::canonical_cmp);
        let mut merged: Vec<DiagramPoint> = Vec::with_capacity(points.len());
        for p in points {
            match merged.last_mut() {
                Some(last) if last.same_location(&p) => last.multiplicity += p.multiplicity,
                _ => merged.push(p),
            }
        }
        PersistenceDiagram {
            points: merged,
            homology_dimension: None,
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a diagram from `(birth, death)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        pairs
            .iter()
            .map(|&(b, d)| DiagramPoint::new(b, d))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn with_homology_dimension(mut self, dim: usize) -> Self {
        self.homology_dimension = Some(dim);
        self
    }

    pub fn homology_dimension(&self) -> Option<usize> {
        self.homology_dimension
    }

    /// Distinct points with their multiplicities, in canonical order.
    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    /// One unit-multiplicity point per copy, in canonical order.
    pub fn expanded(&self) -> Vec<DiagramPoint> {
        self.points
            .iter()
            .flat_map(|p| std::iter::repeat_n(p.unit(), p.multiplicity as usize))
            .collect()
    }

    /// Number of points counted with multiplicity.
    pub fn len(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn infinite_count(&self) -> usize {
        infinite_count(self)
    }

    /// True when no point has infinite death.
    pub fn is_finite(&self) -> bool {
        self.points.iter().all(|p| !p.is_infinite())
    }

    pub fn iter(&self) -> impl Iterator<Item = &DiagramPoint> {
        self.points.iter()
    }
}

impl FromIterator<DiagramPoint> for PersistenceDiagram {
    fn from_iter<I: IntoIterator<Item = DiagramPoint>>(iter: I) -> Self {
        Self::new(iter)
    }
}

/// Multiplicity-weighted number of points with infinite death.
pub fn infinite_count(diagram: &PersistenceDiagram) -> usize {
    diagram
        .points
        .iter()
        .filter(|p| p.is_infinite())
        .map(|p| p.multiplicity as usize)
        .sum()
}

/// Result of [`parse_diagram`]: the diagram and how many zero-persistence
/// rows were discarded.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedDiagram {
    pub diagram: PersistenceDiagram,
    pub dropped: usize,
}

/// Parses the `.dgm` text format.
///
/// One point per line, `<birth> <death> [multiplicity]`, whitespace
/// separated. `inf` (any case) marks an infinite death, `#` starts a comment
/// line and blank lines are skipped. Rows with `birth == death` are dropped
/// and counted.
pub fn parse_diagram(text: &str) -> Result<ParsedDiagram> {
    let mut points = Vec::new();
    let mut dropped = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(err(format!(
                "expected `<birth> <death> [multiplicity]`, found {} fields",
                fields.len()
            )));
        }
        let birth = parse_real(fields[0]).map_err(&err)?;
        let death = parse_real(fields[1]).map_err(&err)?;
        let multiplicity = match fields.get(2) {
            Some(m) => m
                .parse::<u32>()
                .ok()
                .filter(|&m| m > 0)
                .ok_or_else(|| err(format!("invalid multiplicity `{m}`")))?,
            None => 1,
        };
        if !birth.is_finite() {
            return Err(err(format!("birth must be finite, found `{}`", fields[0])));
        }
        if death < birth {
            return Err(err(format!("death {death} precedes birth {birth}")));
        }
        if death == birth {
            dropped += 1;
            continue;
        }
        let point = DiagramPoint::with_multiplicity(birth, death, multiplicity)
            .map_err(|e| err(e.to_string()))?;
        points.push(point);
    }
    Ok(ParsedDiagram {
        diagram: PersistenceDiagram::new(points),
        dropped,
    })
}

/// Parses a real number, accepting `inf` / `-inf` in any case and rejecting NaN.
pub(crate) fn parse_real(token: &str) -> std::result::Result<f64, String> {
    let value = match token.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => f64::INFINITY,
        "-inf" | "-infinity" => f64::NEG_INFINITY,
        _ => token
            .parse::<f64>()
            .map_err(|_| format!("invalid number `{token}`"))?,
    };
    if value.is_nan() {
        return Err(format!("invalid number `{token}`"));
    }
    Ok(value)
}

/// Writes a diagram in `.dgm` format, one distinct point per line in canonical
/// order. The multiplicity column is emitted only when it exceeds one.
pub fn serialize_diagram(diagram: &PersistenceDiagram) -> String {
    let mut out = String::new();
    for p in diagram.points() {
        let _ = write!(out, "{} {}", format_real(p.birth), format_real(p.death));
        if p.multiplicity > 1 {
            let _ = write!(out, " {}", p.multiplicity);
        }
        out.push('\n');
    }
    out
}
