//! Exact assignment solvers on square `[0, ∞]` cost matrices.
//!
//! Infinite entries are forbidden edges, not big-M constants. When every
//! perfect matching uses at least one of them the optimum is `∞`, and the
//! returned assignment uses as few forbidden edges as possible so callers can
//! see which rows could not be served.

use itertools::Itertools;

use crate::extended::ExtendedValue;
use crate::{Error, Result};

/// What a row or column of an augmented matrix stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    /// The `i`-th (expanded) point of a diagram.
    Point(usize),
    /// Diagonal copy reserved for the `i`-th point of the row diagram.
    Diagonal(usize),
    /// Row that absorbs one unmatched point of the column diagram.
    Penalty(usize),
    /// No semantics attached.
    Plain,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostMatrix {
    n: usize,
    entries: Vec<ExtendedValue>,
    row_labels: Vec<Slot>,
    col_labels: Vec<Slot>,
}

impl CostMatrix {
    pub fn new(rows: Vec<Vec<ExtendedValue>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(Error::NonSquare {
                    row,
                    len: r.len(),
                    expected: n,
                });
            }
            entries.extend(r);
        }
        Ok(CostMatrix {
            n,
            entries,
            row_labels: vec![Slot::Plain; n],
            col_labels: vec![Slot::Plain; n],
        })
    }

    /// Builds from raw `f64` rows; `f64::INFINITY` marks forbidden entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let converted = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| {
                        ExtendedValue::new(x).ok_or_else(|| {
                            Error::InvalidParameter(format!("cost {x} is not in [0, inf]"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(converted)
    }

    pub(crate) fn from_fn(
        n: usize,
        row_labels: Vec<Slot>,
        col_labels: Vec<Slot>,
        mut entry: impl FnMut(usize, usize) -> Result<ExtendedValue>,
    ) -> Result<Self> {
        debug_assert_eq!(row_labels.len(), n);
        debug_assert_eq!(col_labels.len(), n);
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(entry(r, c)?);
            }
        }
        Ok(CostMatrix {
            n,
            entries,
            row_labels,
            col_labels,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> ExtendedValue {
        self.entries[row * self.n + col]
    }

    pub fn row_label(&self, row: usize) -> Slot {
        self.row_labels[row]
    }

    pub fn col_label(&self, col: usize) -> Slot {
        self.col_labels[col]
    }

    /// Applies `map` to every entry.
    pub fn map(&self, mut map: impl FnMut(ExtendedValue) -> ExtendedValue) -> Self {
        CostMatrix {
            entries: self.entries.iter().map(|&e| map(e)).collect(),
            ..self.clone()
        }
    }

    pub fn rows(&self) -> Vec<Vec<ExtendedValue>> {
        self.entries.chunks(self.n.max(1)).map(<[_]>::to_vec).take(self.n).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// Sum of selected entries (entries already raised to the `p`-th power).
    Sum,
    /// Largest selected entry.
    Max,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchingResult {
    pub total_cost: ExtendedValue,
    /// `(row, col)` pairs sorted by row; a permutation of `0..n`.
    pub assignment: Vec<(usize, usize)>,
    pub objective: Objective,
}

impl MatchingResult {
    fn from_row_to_col(costs: &CostMatrix, row_to_col: Vec<usize>, objective: Objective) -> Self {
        let assignment: Vec<(usize, usize)> = row_to_col.into_iter().enumerate().collect();
        MatchingResult {
            total_cost: objective_value(costs, &assignment, objective),
            assignment,
            objective,
        }
    }
}

/// The objective of `assignment`, accumulated in row order.
pub fn objective_value(costs: &CostMatrix, assignment: &[(usize, usize)], objective: Objective) -> ExtendedValue {
    let selected = assignment.iter().map(|&(r, c)| costs.get(r, c));
    match objective {
        Objective::Sum => selected.sum(),
        Objective::Max => selected.fold(ExtendedValue::ZERO, ExtendedValue::max),
    }
}

/// Minimum-cost perfect assignment.
///
/// Shortest augmenting paths with row/column potentials, `O(n³)`. Infinite
/// entries are never relaxed; if no finite perfect matching exists the cost
/// is `∞` and the assignment minimises the number of infinite entries used.
pub fn solve_min_cost(costs: &CostMatrix) -> MatchingResult {
    let n = costs.size();
    let (size, _) = max_bipartite_matching(n, |r, c| costs.get(r, c).is_finite());
    let row_to_col = if size == n {
        shortest_augmenting_path(n, |r, c| costs.get(r, c).get())
    } else {
        shortest_augmenting_path(n, |r, c| if costs.get(r, c).is_finite() { 0.0 } else { 1.0 })
    };
    MatchingResult::from_row_to_col(costs, row_to_col, Objective::Sum)
}

/// Jonker–Volgenant style Hungarian method. `cost` may return `+∞` for
/// forbidden pairs provided a finite perfect matching exists.
fn shortest_augmenting_path(n: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    // 1-based; index 0 is the virtual column the current row starts from
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        col_owner[0] = row;
        let mut j0 = 0;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < min_slack[j] {
                    min_slack[j] = reduced;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            assert!(j1 != 0, "no finite augmenting path");
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        row_to_col[col_owner[j] - 1] = j - 1;
    }
    row_to_col
}

/// Maximum bipartite matching on the `n × n` graph with edges where
/// `allowed(row, col)`. Returns the matching size and `row → col`.
pub fn max_bipartite_matching(n: usize, allowed: impl Fn(usize, usize) -> bool) -> (usize, Vec<Option<usize>>) {
    fn augment(
        row: usize,
        n: usize,
        allowed: &dyn Fn(usize, usize) -> bool,
        seen: &mut [bool],
        col_to_row: &mut [Option<usize>],
    ) -> bool {
        for col in 0..n {
            if !allowed(row, col) || seen[col] {
                continue;
            }
            seen[col] = true;
            let free = match col_to_row[col] {
                None => true,
                Some(other) => augment(other, n, allowed, seen, col_to_row),
            };
            if free {
                col_to_row[col] = Some(row);
                return true;
            }
        }
        false
    }

    let mut col_to_row = vec![None; n];
    let mut size = 0;
    for row in 0..n {
        let mut seen = vec![false; n];
        if augment(row, n, &allowed, &mut seen, &mut col_to_row) {
            size += 1;
        }
    }
    let mut row_to_col = vec![None; n];
    for (col, row) in col_to_row.iter().enumerate() {
        if let Some(r) = row {
            row_to_col[*r] = Some(col);
        }
    }
    (size, row_to_col)
}

/// Assignment minimising the largest selected entry.
///
/// Binary search over the sorted distinct finite entries, testing each
/// threshold for a perfect matching among entries `≤` it. The answer is
/// always an entry value, so no tolerance is involved.
pub fn solve_bottleneck(costs: &CostMatrix) -> MatchingResult {
    let n = costs.size();
    if n == 0 {
        return MatchingResult {
            total_cost: ExtendedValue::ZERO,
            assignment: Vec::new(),
            objective: Objective::Max,
        };
    }
    let mut thresholds: Vec<ExtendedValue> = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| costs.get(r, c))
        .filter(|e| e.is_finite())
        .collect();
    thresholds.sort_unstable();
    thresholds.dedup();

    let matching_at = |t: ExtendedValue| max_bipartite_matching(n, |r, c| costs.get(r, c) <= t);
    let feasible = |t: ExtendedValue| matching_at(t).0 == n;

    match thresholds.last() {
        Some(&top) if feasible(top) => {
            let idx = thresholds.partition_point(|&t| !feasible(t));
            let (_, row_to_col) = matching_at(thresholds[idx]);
            let row_to_col = row_to_col.into_iter().map(|c| c.expect("perfect")).collect();
            MatchingResult::from_row_to_col(costs, row_to_col, Objective::Max)
        }
        _ => {
            let row_to_col =
                shortest_augmenting_path(n, |r, c| if costs.get(r, c).is_finite() { 0.0 } else { 1.0 });
            MatchingResult::from_row_to_col(costs, row_to_col, Objective::Max)
        }
    }
}

/// Largest matrix the brute-force oracles accept.
pub const BRUTE_FORCE_MAX: usize = 9;

fn brute_force(costs: &CostMatrix, objective: Objective) -> Result<MatchingResult> {
    let n = costs.size();
    if n > BRUTE_FORCE_MAX {
        return Err(Error::TooLarge {
            size: n,
            max: BRUTE_FORCE_MAX,
        });
    }
    let best = (0..n)
        .permutations(n)
        .map(|perm| MatchingResult::from_row_to_col(costs, perm, objective))
        .min_by(|a, b| a.total_cost.cmp(&b.total_cost))
        .expect("at least the empty permutation");
    Ok(best)
}

/// Exhaustive minimum over all `n!` permutations (`n ≤ 9`).
pub fn brute_force_min_cost(costs: &CostMatrix) -> Result<MatchingResult> {
    brute_force(costs, Objective::Sum)
}

/// Exhaustive min-max over all `n!` permutations (`n ≤ 9`).
pub fn brute_force_bottleneck(costs: &CostMatrix) -> Result<MatchingResult> {
    brute_force(costs, Objective::Max)
}
