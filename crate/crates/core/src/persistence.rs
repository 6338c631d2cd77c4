//! Filtrations, Vietoris–Rips complexes and Z/2 persistent homology.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::diagram::{parse_real, DiagramPoint, PersistenceDiagram};
use crate::extended::format_real;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    vertices: Vec<usize>,
    value: f64,
}

impl Simplex {
    /// Sorts the vertices; rejects empty or repeated vertex lists and
    /// non-finite values.
    pub fn new(mut vertices: Vec<usize>, value: f64) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.is_empty() {
            return Err(Error::InvalidFiltration("simplex without vertices".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidFiltration(format!("repeated vertex in {vertices:?}")));
        }
        if !value.is_finite() {
            return Err(Error::InvalidFiltration(format!(
                "filtration value of {vertices:?} must be finite"
            )));
        }
        Ok(Simplex { vertices, value })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Codimension-one faces, each missing one vertex.
    pub fn facets(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let k = self.vertices.len();
        (0..k)
            .filter(move |_| k > 1)
            .map(move |skip| {
                self.vertices
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect()
            })
    }
}

/// Simplices ordered by `(value, dimension, vertices)`, closed under faces,
/// with every face entering no later than its cofaces.
#[derive(Clone, Debug, PartialEq)]
pub struct Filtration {
    simplices: Vec<Simplex>,
}

impl Filtration {
    pub fn new(mut simplices: Vec<Simplex>) -> Result<Self> {
        simplices.sort_by(|a, b| {
            a.value
                .total_cmp(&b.value)
                .then(a.dimension().cmp(&b.dimension()))
                .then_with(|| a.vertices.cmp(&b.vertices))
        });
        let mut values: HashMap<&[usize], f64> = HashMap::with_capacity(simplices.len());
        for s in &simplices {
            if values.insert(&s.vertices, s.value).is_some() {
                return Err(Error::InvalidFiltration(format!("duplicate simplex {:?}", s.vertices)));
            }
        }
        for s in &simplices {
            for face in s.facets() {
                match values.get(face.as_slice()) {
                    None => {
                        return Err(Error::InvalidFiltration(format!(
                            "face {face:?} of {:?} is missing",
                            s.vertices
                        )))
                    }
                    Some(&v) if v > s.value => {
                        return Err(Error::InvalidFiltration(format!(
                            "face {face:?} enters at {v}, after its coface {:?} at {}",
                            s.vertices, s.value
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(Filtration { simplices })
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn max_dimension(&self) -> Option<usize> {
        self.simplices.iter().map(Simplex::dimension).max()
    }

    /// Number of simplices of each dimension `0..=max_dimension`.
    pub fn counts_by_dimension(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_dimension().map_or(0, |d| d + 1)];
        for s in &self.simplices {
            counts[s.dimension()] += 1;
        }
        counts
    }

    /// `Σ_k (−1)^k #k-simplices` of the final complex.
    pub fn euler_characteristic(&self) -> i64 {
        alternating_sum(&self.counts_by_dimension())
    }
}

pub(crate) fn alternating_sum(counts: &[usize]) -> i64 {
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}

/// Parses the `.flt` format: one simplex per line as `v0 v1 ... vk;t`,
/// `#` comments and blank lines ignored.
pub fn parse_filtration(text: &str) -> Result<Filtration> {
    let mut simplices = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: idx + 1,
            message,
        };
        let (verts, value) = line
            .split_once(';')
            .ok_or_else(|| err("expected `v0 v1 ... vk;t`".into()))?;
        let vertices = verts
            .split_whitespace()
            .map(|v| v.parse::<usize>().map_err(|_| err(format!("invalid vertex id `{v}`"))))
            .collect::<Result<Vec<_>>>()?;
        let value = parse_real(value.trim()).map_err(&err)?;
        simplices.push(Simplex::new(vertices, value).map_err(|e| err(e.to_string()))?);
    }
    Filtration::new(simplices)
}

pub fn serialize_filtration(filtration: &Filtration) -> String {
    let mut out = String::new();
    for s in filtration.simplices() {
        let verts: Vec<String> = s.vertices.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "{};{}", verts.join(" "), format_real(s.value));
    }
    out
}

/// Parses a point cloud from CSV, one point per row, no header. All rows
/// must have the same number of coordinates.
pub fn parse_point_cloud(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut points: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let err = |message: String| Error::Parse { line, message };
        let point = record
            .iter()
            .map(|field| match field.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(err(format!("invalid coordinate `{field}`"))),
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = points.first() {
            if first.len() != point.len() {
                return Err(err(format!("expected {} coordinates, found {}", first.len(), point.len())));
            }
        }
        points.push(point);
    }
    Ok(points)
}

/// Largest simplex dimension [`build_rips`] will produce.
pub const RIPS_MAX_DIM: usize = 2;

/// Vietoris–Rips filtration under the Euclidean metric: a simplex enters at
/// the largest pairwise distance among its vertices and is kept when that
/// value is at most `max_eps`. Vertices enter at 0.
#[allow(clippy::needless_range_loop)]
pub fn build_rips(points: &[Vec<f64>], max_eps: f64, max_dim: usize) -> Result<Filtration> {
    if points.is_empty() {
        return Err(Error::EmptyPointCloud);
    }
    if max_dim > RIPS_MAX_DIM {
        return Err(Error::InvalidParameter(format!(
            "Rips dimension {max_dim} exceeds the supported maximum {RIPS_MAX_DIM}"
        )));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidParameter("points have differing dimensions".into()));
    }
    let n = points.len();
    let dist = |i: usize, j: usize| -> f64 {
        points[i]
            .iter()
            .zip(&points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let mut edge = vec![vec![None; n]; n];
    let mut simplices: Vec<Simplex> = (0..n).map(|v| Simplex { vertices: vec![v], value: 0.0 }).collect();
    if max_dim >= 1 {
        for i in 0..n {
            for j in i + 1..n {
                let d = dist(i, j);
                if d <= max_eps {
                    edge[i][j] = Some(d);
                    simplices.push(Simplex { vertices: vec![i, j], value: d });
                }
            }
        }
    }
    if max_dim >= 2 {
        for i in 0..n {
            for j in i + 1..n {
                let Some(dij) = edge[i][j] else { continue };
                for k in j + 1..n {
                    if let (Some(dik), Some(djk)) = (edge[i][k], edge[j][k]) {
                        simplices.push(Simplex {
                            vertices: vec![i, j, k],
                            value: dij.max(dik).max(djk),
                        });
                    }
                }
            }
        }
    }
    Filtration::new(simplices)
}

/// A persistence pair or an essential class, by simplex index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pairing {
    pub dimension: usize,
    pub birth: usize,
    pub death: Option<usize>,
}

/// Column reduction of the Z/2 boundary matrix, columns of dimension
/// `1..=max_column_dim`. With `clearing`, columns known to be paired as
/// destroyers are zeroed without reduction (higher dimensions go first).
pub fn reduce(filtration: &Filtration, max_column_dim: usize, clearing: bool) -> Vec<Pairing> {
    let simplices = filtration.simplices();
    let index: HashMap<&[usize], usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.vertices.as_slice(), i))
        .collect();
    let top = filtration.max_dimension().unwrap_or(0).min(max_column_dim);

    let mut columns: Vec<Vec<usize>> = vec![Vec::new(); simplices.len()];
    let mut low_owner: HashMap<usize, usize> = HashMap::new();
    let mut is_destroyer_row = vec![false; simplices.len()];

    for dim in (1..=top).rev() {
        for j in (0..simplices.len()).filter(|&j| simplices[j].dimension() == dim) {
            if clearing && is_destroyer_row[j] {
                continue;
            }
            let mut col: Vec<usize> = simplices[j].facets().map(|f| index[f.as_slice()]).collect();
            col.sort_unstable();
            while let Some(&low) = col.last() {
                match low_owner.get(&low) {
                    Some(&other) => col = symmetric_difference(&col, &columns[other]),
                    None => break,
                }
            }
            if let Some(&low) = col.last() {
                low_owner.insert(low, j);
                is_destroyer_row[low] = true;
            }
            columns[j] = col;
        }
    }

    let mut pairs: Vec<Pairing> = Vec::new();
    let paired_as_death: std::collections::HashSet<usize> = low_owner.values().copied().collect();
    for (i, s) in simplices.iter().enumerate() {
        if let Some(&j) = low_owner.get(&i) {
            pairs.push(Pairing {
                dimension: s.dimension(),
                birth: i,
                death: Some(j),
            });
        } else if !paired_as_death.contains(&i) && !(clearing && is_destroyer_row[i]) && columns[i].is_empty() {
            // creator: its reduced column is zero (or it is a vertex) and nothing kills it
            if s.dimension() <= max_column_dim {
                pairs.push(Pairing {
                    dimension: s.dimension(),
                    birth: i,
                    death: None,
                });
            }
        }
    }
    pairs
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Persistence diagrams for dimensions `0..=max_homology_dim`.
///
/// A class created by simplex `σ` and destroyed by `τ` gives the bar
/// `[value(σ), value(τ))`; classes that never die get death `∞`. Zero-length
/// bars are omitted.
pub fn compute_persistence(filtration: &Filtration, max_homology_dim: usize) -> Vec<PersistenceDiagram> {
    compute_persistence_with(filtration, max_homology_dim, false)
}

pub fn compute_persistence_with(filtration: &Filtration, max_homology_dim: usize, clearing: bool) -> Vec<PersistenceDiagram> {
    let simplices = filtration.simplices();
    let mut bars: Vec<Vec<DiagramPoint>> = vec![Vec::new(); max_homology_dim + 1];
    for pair in reduce(filtration, max_homology_dim + 1, clearing) {
        if pair.dimension > max_homology_dim {
            continue;
        }
        let birth = simplices[pair.birth].value;
        let death = pair.death.map_or(f64::INFINITY, |j| simplices[j].value);
        if death > birth {
            bars[pair.dimension].push(DiagramPoint::new(birth, death).expect("birth < death"));
        }
    }
    bars.into_iter()
        .enumerate()
        .map(|(k, pts)| PersistenceDiagram::new(pts).with_homology_dimension(k))
        .collect()
}
