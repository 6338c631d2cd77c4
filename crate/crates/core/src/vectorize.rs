//! Projection onto finite diagrams and vectorizations that only make sense
//! for finite bars.
//!
//! Among all diagrams without infinite points, the one closest to `A` in the
//! `D_p^f(· ‖ A)` sense is obtained by deleting `A`'s infinite points, not by
//! cutting them at some height. [`project_finite`] does that, and
//! [`Extended`] turns any vectorization `g` of finite diagrams into
//! `g̃ = g ∘ π_F`, defined on every diagram.

use std::fmt::Write as _;

use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::divergence::{divergence, Order};
use crate::extended::{format_real, ExtendedValue};
use crate::functions::TameFunction;
use crate::{Error, Result};

/// `π_F`: drops every point with infinite death.
pub fn project_finite(diagram: &PersistenceDiagram) -> PersistenceDiagram {
    let projected: PersistenceDiagram = diagram.iter().filter(|p| !p.is_infinite()).copied().collect();
    match diagram.homology_dimension() {
        Some(d) => projected.with_homology_dimension(d),
        None => projected,
    }
}

/// Outcome of [`verify_projection_optimality`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionCheck {
    pub holds: bool,
    /// `D_p^f(π_F(A) ‖ A)`.
    pub projection_value: ExtendedValue,
    /// Smallest `D_p^f(C ‖ A)` over the candidates, with its index.
    pub best_candidate: Option<(usize, ExtendedValue)>,
    /// `D_p^f(C ‖ A)` for each candidate, in input order.
    pub candidate_values: Vec<ExtendedValue>,
}

/// Checks `D_p^f(π_F(A) ‖ A) ≤ D_p^f(C ‖ A)` for every candidate `C`.
///
/// Candidates must be finite diagrams. This samples the optimality of the
/// projection; it cannot prove it.
pub fn verify_projection_optimality(
    a: &PersistenceDiagram,
    f: &TameFunction,
    p: Order,
    candidates: &[PersistenceDiagram],
) -> Result<ProjectionCheck> {
    if candidates.iter().any(|c| !c.is_finite()) {
        return Err(Error::InfinitePoint);
    }
    let projection_value = divergence(&project_finite(a), a, f, p)?.value;
    let candidate_values: Vec<ExtendedValue> = candidates
        .iter()
        .map(|c| divergence(c, a, f, p).map(|r| r.value))
        .collect::<Result<_>>()?;
    let best_candidate = candidate_values
        .iter()
        .copied()
        .enumerate()
        .min_by_key(|&(_, v)| v);
    Ok(ProjectionCheck {
        holds: candidate_values.iter().all(|&v| projection_value <= v),
        projection_value,
        best_candidate,
        candidate_values,
    })
}

/// Finite stand-ins for `A` of the kinds people use in practice:
///
/// 1. `π_F(A)` itself;
/// 2. `π_F(A)` with every point shifted along the diagonal by `±δ`;
/// 3. `π_F(A)` with one point deleted (for each point);
/// 4. `A` with every infinite bar cut at each of `heights`.
///
/// Heights must exceed every birth of an infinite point.
pub fn projection_candidates(a: &PersistenceDiagram, shifts: &[f64], heights: &[f64]) -> Result<Vec<PersistenceDiagram>> {
    let finite = project_finite(a);
    let mut out = vec![finite.clone()];
    for &delta in shifts {
        let shifted = finite
            .iter()
            .map(|q| DiagramPoint::with_multiplicity(q.birth() + delta, q.death() + delta, q.multiplicity()))
            .collect::<Result<PersistenceDiagram>>()?;
        out.push(shifted);
    }
    let units = finite.expanded();
    for skip in 0..units.len() {
        out.push(units.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, q)| *q).collect());
    }
    for &h in heights {
        out.push(truncate_infinite(a, h)?);
    }
    Ok(out)
}

/// Replaces every infinite death by `height`.
pub fn truncate_infinite(a: &PersistenceDiagram, height: f64) -> Result<PersistenceDiagram> {
    a.iter()
        .map(|q| {
            let death = if q.is_infinite() { height } else { q.death() };
            DiagramPoint::with_multiplicity(q.birth(), death, q.multiplicity())
        })
        .collect()
}

/// Bar lengths `death − birth`, one per copy. Fails on infinite points.
pub fn bar_lengths(a: &PersistenceDiagram) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(Error::InfinitePoint);
    }
    Ok(a.expanded().iter().map(|q| q.death() - q.birth()).collect())
}

/// Shannon entropy (natural log) of the bar-length distribution,
/// `−Σ (l_i/L) ln(l_i/L)`. Zero for zero or one bar.
pub fn persistent_entropy(a: &PersistenceDiagram) -> Result<f64> {
    let lengths = bar_lengths(a)?;
    if lengths.len() <= 1 {
        return Ok(0.0);
    }
    let total: f64 = lengths.iter().sum();
    Ok(-lengths
        .iter()
        .map(|&l| {
            let q = l / total;
            q * q.ln()
        })
        .sum::<f64>())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarStats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub count: usize,
}

/// Mean and population standard deviation of the bar lengths; all zero for
/// the empty diagram.
pub fn basic_stats(a: &PersistenceDiagram) -> Result<BarStats> {
    let lengths = bar_lengths(a)?;
    let count = lengths.len();
    if count == 0 {
        return Ok(BarStats {
            mean: 0.0,
            std: 0.0,
            count: 0,
        });
    }
    let n = count as f64;
    let mean = lengths.iter().sum::<f64>() / n;
    let var = lengths.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / n;
    Ok(BarStats {
        mean,
        std: var.sqrt(),
        count,
    })
}

/// A map from finite diagrams to `R^dimension`.
pub trait Vectorization {
    fn name(&self) -> &str;

    fn dimension(&self) -> usize;

    /// Defined on every finite diagram, the empty one included; errors on
    /// infinite points.
    fn vectorize(&self, diagram: &PersistenceDiagram) -> Result<Vec<f64>>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PersistentEntropy;

impl Vectorization for PersistentEntropy {
    fn name(&self) -> &str {
        "entropy"
    }

    fn dimension(&self) -> usize {
        1
    }

    fn vectorize(&self, diagram: &PersistenceDiagram) -> Result<Vec<f64>> {
        Ok(vec![persistent_entropy(diagram)?])
    }
}

/// `(mean, std, count)` of the bar lengths.
#[derive(Clone, Copy, Debug, Default)]
pub struct BasicStats;

impl Vectorization for BasicStats {
    fn name(&self) -> &str {
        "basic_stats"
    }

    fn dimension(&self) -> usize {
        3
    }

    fn vectorize(&self, diagram: &PersistenceDiagram) -> Result<Vec<f64>> {
        let s = basic_stats(diagram)?;
        Ok(vec![s.mean, s.std, s.count as f64])
    }
}

/// A single bar statistic, as selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Mean,
    Std,
    Count,
    Entropy,
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mean" => Ok(Measure::Mean),
            "std" => Ok(Measure::Std),
            "count" => Ok(Measure::Count),
            "entropy" => Ok(Measure::Entropy),
            other => Err(Error::InvalidParameter(format!("unknown measure `{other}`"))),
        }
    }
}

/// The chosen measures, in order.
#[derive(Clone, Debug, PartialEq)]
pub struct Measures(pub Vec<Measure>);

impl Vectorization for Measures {
    fn name(&self) -> &str {
        "measures"
    }

    fn dimension(&self) -> usize {
        self.0.len()
    }

    fn vectorize(&self, diagram: &PersistenceDiagram) -> Result<Vec<f64>> {
        let stats = basic_stats(diagram)?;
        self.0
            .iter()
            .map(|m| match m {
                Measure::Mean => Ok(stats.mean),
                Measure::Std => Ok(stats.std),
                Measure::Count => Ok(stats.count as f64),
                Measure::Entropy => persistent_entropy(diagram),
            })
            .collect()
    }
}

/// `g̃ = g ∘ π_F`: the extension of a finite-diagram vectorization to all
/// diagrams.
#[derive(Clone, Debug)]
pub struct Extended<G>(pub G);

/// Wraps `g` as `g̃`.
pub fn extend<G: Vectorization>(g: G) -> Extended<G> {
    Extended(g)
}

impl<G: Vectorization> Extended<G> {
    pub fn apply(&self, diagram: &PersistenceDiagram) -> Vec<f64> {
        self.0
            .vectorize(&project_finite(diagram))
            .expect("projected diagrams are finite")
    }

    pub fn inner(&self) -> &G {
        &self.0
    }
}

/// `name,dim,v1,v2,...`
pub fn vector_csv_row(name: &str, values: &[f64]) -> String {
    let mut row = format!("{name},{}", values.len());
    for v in values {
        let _ = write!(row, ",{}", format_real(*v));
    }
    row
}
