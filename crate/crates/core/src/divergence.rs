//! Wasserstein and bottleneck distances and the `(f, p)` divergences.
//!
//! Both families reduce to one square assignment problem of size
//! `|A| + |B|`:
//!
//! ```text
//!                 B points                 diagonal slots (one per a)
//!  A points       ‖a − b‖∞^p               ‖a − λ(a)‖∞^p
//!  penalty rows   pen(b)^p                 0
//! ```
//!
//! A penalty row taking column `b` means `b` is left out of the image of the
//! injection. For the classical distances `pen(b) = ‖b − λ(b)‖∞` (the point is
//! sent to the diagonal); for `D_p^f` it is `f(‖b − λ(b)‖∞)`. An infinite
//! point can only be matched at finite cost to another infinite point, which
//! the `∞` entries of `‖·‖∞` encode without any special casing.

use std::fmt;
use std::str::FromStr;

use crate::diagram::{diagonal_gap, linf_distance, DiagramPoint, PersistenceDiagram};
use crate::extended::ExtendedValue;
use crate::functions::TameFunction;
use crate::matching::{solve_bottleneck, solve_min_cost, CostMatrix, Slot};
use crate::{Error, Result};

/// The exponent `p ∈ [1, ∞]`; `Infinity` selects the bottleneck objective.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    Finite(f64),
    Infinity,
}

impl Order {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Order::Infinity)
        } else if p >= 1.0 && p.is_finite() {
            Ok(Order::Finite(p))
        } else {
            Err(Error::InvalidOrder(p))
        }
    }

    /// Accepts only finite `p ≥ 1`.
    pub fn finite(p: f64) -> Result<Self> {
        match Self::new(p)? {
            Order::Infinity => Err(Error::InvalidOrder(p)),
            o => Ok(o),
        }
    }

    fn raise(self, x: ExtendedValue) -> ExtendedValue {
        match self {
            Order::Finite(p) => x.pow(p),
            Order::Infinity => x,
        }
    }

    fn accumulate(self, acc: ExtendedValue, term: ExtendedValue) -> ExtendedValue {
        match self {
            Order::Finite(_) => acc + term,
            Order::Infinity => acc.max(term),
        }
    }

    fn finish(self, total: ExtendedValue) -> ExtendedValue {
        match self {
            Order::Finite(p) => total.root(p),
            Order::Infinity => total,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(p) => write!(f, "{p}"),
            Order::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" => Ok(Order::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("invalid order `{s}`")))?;
                Order::new(p)
            }
        }
    }
}

/// One term of a realising injection `γ : A → B`.
#[derive(Clone, Debug, PartialEq)]
pub enum MatchEntry {
    /// `γ(source) = target`, at cost `‖source − target‖∞`.
    Matched {
        source: DiagramPoint,
        target: DiagramPoint,
        cost: ExtendedValue,
    },
    /// `source` is sent to its diagonal projection.
    ToDiagonal {
        source: DiagramPoint,
        cost: ExtendedValue,
    },
    /// `target` is not hit by `γ` and is charged `penalty`.
    Unmatched {
        target: DiagramPoint,
        penalty: ExtendedValue,
    },
}

impl MatchEntry {
    /// The un-powered cost of this term.
    pub fn cost(&self) -> ExtendedValue {
        match *self {
            MatchEntry::Matched { cost, .. } | MatchEntry::ToDiagonal { cost, .. } => cost,
            MatchEntry::Unmatched { penalty, .. } => penalty,
        }
    }
}

impl fmt::Display for MatchEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pt = |p: &DiagramPoint| {
            format!(
                "({}, {})",
                crate::extended::format_real(p.birth()),
                crate::extended::format_real(p.death())
            )
        };
        match self {
            MatchEntry::Matched { source, target, cost } => {
                write!(f, "{} -> {} cost {}", pt(source), pt(target), cost)
            }
            MatchEntry::ToDiagonal { source, cost } => write!(f, "{} -> diagonal cost {}", pt(source), cost),
            MatchEntry::Unmatched { target, penalty } => write!(f, "unmatched {} penalty {}", pt(target), penalty),
        }
    }
}

/// Value of a distance or divergence together with a realising matching.
#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceReport {
    pub value: ExtendedValue,
    /// Sum of `p`-th powers (or the maximum, for `p = ∞`) before the root.
    pub objective: ExtendedValue,
    /// Source points in canonical order, followed by unmatched targets in
    /// canonical order.
    pub matching: Vec<MatchEntry>,
    /// `"classical"` for the Wasserstein/bottleneck distances.
    pub f_name: String,
    pub p: Order,
    /// Set when `f` is not positive on `(0, ∞)`: then a zero value does not
    /// imply equal diagrams.
    pub pseudo: bool,
}

impl DivergenceReport {
    /// Re-evaluates the value from the stored matching. Always equals
    /// `self.value` bit for bit.
    pub fn recompute(&self) -> ExtendedValue {
        self.p.finish(objective_of(&self.matching, self.p))
    }
}

fn objective_of(entries: &[MatchEntry], p: Order) -> ExtendedValue {
    entries
        .iter()
        .fold(ExtendedValue::ZERO, |acc, e| p.accumulate(acc, p.raise(e.cost())))
}

#[derive(Clone, Copy)]
enum Penalty<'a> {
    /// The unmatched point goes to the diagonal: `‖b − λ(b)‖∞`.
    Classical,
    Function(&'a TameFunction),
}

impl Penalty<'_> {
    fn of(&self, b: &DiagramPoint) -> Result<ExtendedValue> {
        let gap = diagonal_gap(b);
        match self {
            Penalty::Classical => Ok(gap),
            Penalty::Function(f) => {
                let v = f.evaluate(gap)?;
                ExtendedValue::finite(v).ok_or_else(|| {
                    Error::InvalidParameter(format!("{} returned {v}, outside [0, inf)", f.name()))
                })
            }
        }
    }

    fn name(&self) -> String {
        match self {
            Penalty::Classical => "classical".to_string(),
            Penalty::Function(f) => f.name().to_string(),
        }
    }

    fn pseudo(&self) -> bool {
        match self {
            Penalty::Classical => false,
            Penalty::Function(f) => !f.is_positive_on_positive(),
        }
    }
}

fn augmented_matrix(
    a: &[DiagramPoint],
    b: &[DiagramPoint],
    penalty: Penalty<'_>,
    p: Order,
) -> Result<CostMatrix> {
    let (m, n) = (a.len(), b.len());
    let penalties: Vec<ExtendedValue> = b.iter().map(|q| penalty.of(q)).collect::<Result<_>>()?;
    let gaps: Vec<ExtendedValue> = a.iter().map(diagonal_gap).collect();
    let rows = (0..m).map(Slot::Point).chain((0..n).map(Slot::Penalty)).collect();
    let cols = (0..n).map(Slot::Point).chain((0..m).map(Slot::Diagonal)).collect();
    CostMatrix::from_fn(m + n, rows, cols, |r, c| {
        let raw = match (r < m, c < n) {
            (true, true) => linf_distance(&a[r], &b[c]),
            (true, false) => gaps[r],
            (false, true) => penalties[c],
            (false, false) => ExtendedValue::ZERO,
        };
        Ok(p.raise(raw))
    })
}

/// The augmented cost matrix of `D_p^f(A‖B)`: rows are `A`'s points then
/// `|B|` penalty slots, columns are `B`'s points then `|A|` diagonal slots.
/// For `p = ∞` the entries are left un-powered.
pub fn build_divergence_matrix(
    a: &PersistenceDiagram,
    b: &PersistenceDiagram,
    f: &TameFunction,
    p: Order,
) -> Result<CostMatrix> {
    augmented_matrix(&a.expanded(), &b.expanded(), Penalty::Function(f), p)
}

/// The classical diagonal-augmented matrix of `d_p(A, B)`.
pub fn build_distance_matrix(a: &PersistenceDiagram, b: &PersistenceDiagram, p: Order) -> Result<CostMatrix> {
    augmented_matrix(&a.expanded(), &b.expanded(), Penalty::Classical, p)
}

/// Builds a report from an injection given as `choice[i] = Some(j)` (the
/// `i`-th point of `A` goes to the `j`-th point of `B`) or `None` (diagonal).
fn report_from_injection(
    a: &[DiagramPoint],
    b: &[DiagramPoint],
    choice: &[Option<usize>],
    penalty: Penalty<'_>,
    p: Order,
) -> Result<DivergenceReport> {
    let mut hit = vec![false; b.len()];
    let mut matching = Vec::with_capacity(a.len() + b.len());
    for (source, target) in a.iter().zip(choice) {
        match *target {
            Some(j) => {
                hit[j] = true;
                matching.push(MatchEntry::Matched {
                    source: *source,
                    target: b[j],
                    cost: linf_distance(source, &b[j]),
                });
            }
            None => matching.push(MatchEntry::ToDiagonal {
                source: *source,
                cost: diagonal_gap(source),
            }),
        }
    }
    for (target, _) in b.iter().zip(&hit).filter(|(_, &h)| !h) {
        matching.push(MatchEntry::Unmatched {
            target: *target,
            penalty: penalty.of(target)?,
        });
    }
    let objective = objective_of(&matching, p);
    Ok(DivergenceReport {
        value: p.finish(objective),
        objective,
        matching,
        f_name: penalty.name(),
        p,
        pseudo: penalty.pseudo(),
    })
}

fn solve(a: &PersistenceDiagram, b: &PersistenceDiagram, penalty: Penalty<'_>, p: Order) -> Result<DivergenceReport> {
    let (a, b) = (a.expanded(), b.expanded());
    let matrix = augmented_matrix(&a, &b, penalty, p)?;
    let result = match p {
        Order::Finite(_) => solve_min_cost(&matrix),
        Order::Infinity => solve_bottleneck(&matrix),
    };
    let mut choice = vec![None; a.len()];
    for &(r, c) in &result.assignment {
        if r < a.len() && c < b.len() {
            choice[r] = Some(c);
        }
    }
    report_from_injection(&a, &b, &choice, penalty, p)
}

/// `D_p^f(A‖B)` for any order; `Order::Infinity` gives `D_∞^f`.
pub fn divergence(a: &PersistenceDiagram, b: &PersistenceDiagram, f: &TameFunction, p: Order) -> Result<DivergenceReport> {
    solve(a, b, Penalty::Function(f), p)
}

/// The `(f, p)`-Wasserstein divergence `D_p^f(A‖B)`, finite `p ≥ 1`.
///
/// Minimises, over injections `γ` from `A` into `B` (diagonal included),
/// `Σ_a ‖a − γ(a)‖∞^p + Σ_{b ∉ γ(A)} f(‖b − λ(b)‖∞)^p`, then takes the
/// `p`-th root. Infinite exactly when no finite-cost injection exists, in
/// particular when `A` has more infinite points than `B`.
pub fn wasserstein_divergence(
    a: &PersistenceDiagram,
    b: &PersistenceDiagram,
    f: &TameFunction,
    p: f64,
) -> Result<DivergenceReport> {
    divergence(a, b, f, Order::finite(p)?)
}

/// `D_∞^f(A‖B)`: the largest matched cost or penalty, minimised over injections.
pub fn bottleneck_divergence(a: &PersistenceDiagram, b: &PersistenceDiagram, f: &TameFunction) -> Result<DivergenceReport> {
    divergence(a, b, f, Order::Infinity)
}

/// Classical distance with its optimal bijection (points sent to the
/// diagonal show up as `ToDiagonal` / `Unmatched` entries).
pub fn distance_report(a: &PersistenceDiagram, b: &PersistenceDiagram, p: Order) -> DivergenceReport {
    solve(a, b, Penalty::Classical, p).expect("classical penalties cannot fail")
}

/// `d_p(A, B)`; infinite iff the infinite-point counts differ.
pub fn wasserstein_distance(a: &PersistenceDiagram, b: &PersistenceDiagram, p: f64) -> Result<ExtendedValue> {
    Ok(distance_report(a, b, Order::finite(p)?).value)
}

/// `d_∞(A, B)`.
pub fn bottleneck_distance(a: &PersistenceDiagram, b: &PersistenceDiagram) -> ExtendedValue {
    distance_report(a, b, Order::Infinity).value
}

/// `(D_p^f(A‖B)^p + D_p^f(B‖A)^p)^{1/p}`, which lies between `d_p(A, B)` and
/// `2^{1/p} d_p(A, B)`.
pub fn symmetrized_power_mean(
    a: &PersistenceDiagram,
    b: &PersistenceDiagram,
    f: &TameFunction,
    p: f64,
) -> Result<ExtendedValue> {
    let order = Order::finite(p)?;
    let forward = divergence(a, b, f, order)?;
    let backward = divergence(b, a, f, order)?;
    Ok((forward.objective + backward.objective).root(p))
}

/// Largest `|A| + |B|` accepted by [`brute_force_divergence`].
pub const BRUTE_FORCE_MAX_POINTS: usize = 8;

/// Exhaustive minimum over every injection of `A`'s points into `B`'s points
/// plus the diagonal. Test oracle for [`divergence`].
pub fn brute_force_divergence(
    a: &PersistenceDiagram,
    b: &PersistenceDiagram,
    f: &TameFunction,
    p: Order,
) -> Result<DivergenceReport> {
    let (a, b) = (a.expanded(), b.expanded());
    let size = a.len() + b.len();
    if size > BRUTE_FORCE_MAX_POINTS {
        return Err(Error::TooLarge {
            size,
            max: BRUTE_FORCE_MAX_POINTS,
        });
    }

    fn enumerate(
        i: usize,
        choice: &mut Vec<Option<usize>>,
        used: &mut [bool],
        visit: &mut dyn FnMut(&[Option<usize>]) -> Result<()>,
    ) -> Result<()> {
        if i == choice.len() {
            return visit(choice);
        }
        choice[i] = None;
        enumerate(i + 1, choice, used, visit)?;
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                choice[i] = Some(j);
                enumerate(i + 1, choice, used, visit)?;
                used[j] = false;
            }
        }
        Ok(())
    }

    let penalty = Penalty::Function(f);
    let mut best: Option<DivergenceReport> = None;
    let mut choice = vec![None; a.len()];
    let mut used = vec![false; b.len()];
    enumerate(0, &mut choice, &mut used, &mut |c| {
        let report = report_from_injection(&a, &b, c, penalty, p)?;
        if best.as_ref().is_none_or(|r| report.objective < r.objective) {
            best = Some(report);
        }
        Ok(())
    })?;
    Ok(best.expect("at least one injection"))
}
