//! Penalty functions `f : [0, ∞] → [0, ∞)` for the divergence, and sampled
//! checks of the conditions they must satisfy:
//!
//! - sub-diagonal: `f(x) ≤ x`
//! - sub-additive: `f(x + y) ≤ f(x) + f(y)`
//! - `p`-increasing: `f(‖x‖_p) ≤ ‖(f(x_1), …, f(x_n))‖_p`
//!
//! The checks are falsification tools: a deterministic grid plus seeded
//! random samples, with a tolerance of `1e-12` relative to the compared
//! magnitude. Passing is evidence, not proof.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::parse_real;
use crate::divergence::Order;
use crate::extended::ExtendedValue;
use crate::{Error, Result};

const TOLERANCE: f64 = 1e-12;

/// Properties a function is known (or declared) to have.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Properties {
    pub sub_diagonal: bool,
    pub sub_additive: bool,
    pub strictly_increasing: bool,
    /// `f(x) > 0` for every `x > 0`. Without it `D_p^f(A‖B) = 0` no longer
    /// implies `A = B`.
    pub positive_on_positive: bool,
}

impl Properties {
    const TAME: Properties = Properties {
        sub_diagonal: true,
        sub_additive: true,
        strictly_increasing: false,
        positive_on_positive: false,
    };

    const ALL: Properties = Properties {
        sub_diagonal: true,
        sub_additive: true,
        strictly_increasing: true,
        positive_on_positive: true,
    };
}

/// A piecewise-linear function given by samples `(x_i, f(x_i))` with strictly
/// increasing `x_i`, plus an explicit value at `∞`. Outside the sampled range
/// the nearest endpoint value is used.
#[derive(Clone, Debug, PartialEq)]
pub struct Tabulated {
    xs: Vec<f64>,
    ys: Vec<f64>,
    at_infinity: f64,
}

impl Tabulated {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, at_infinity: f64) -> Result<Self> {
        let bad = |msg: String| Error::InvalidParameter(msg);
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(bad("tabulated function needs matching, non-empty x and y columns".into()));
        }
        if xs.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(bad("tabulated x values must be finite and non-negative".into()));
        }
        if ys.iter().chain([&at_infinity]).any(|&y| !y.is_finite() || y < 0.0) {
            return Err(bad("tabulated values must be finite and non-negative".into()));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("tabulated x values must be strictly ascending".into()));
        }
        Ok(Tabulated { xs, ys, at_infinity })
    }

    fn eval(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return self.at_infinity;
        }
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        // first index with xs[i] > x; 1 <= i < n here
        let i = self.xs.partition_point(|&xi| xi <= x);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn max_x(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }
}

type CustomFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Zero,
    Identity,
    Scale(f64),
    Truncate(f64),
    LogisticTranslated,
    Tabulated(Tabulated),
    Custom {
        map: CustomFn,
        at_infinity: Option<f64>,
    },
}

/// A named penalty function `f` with its declared properties.
#[derive(Clone)]
pub struct TameFunction {
    name: String,
    kind: Kind,
    properties: Properties,
    infinity_clamp: Option<f64>,
}

impl fmt::Debug for TameFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TameFunction")
            .field("name", &self.name)
            .field("properties", &self.properties)
            .field("infinity_clamp", &self.infinity_clamp)
            .finish()
    }
}

/// Names accepted by [`builtin`].
pub const CATALOG: [&str; 5] = ["zero", "identity", "scale", "truncate", "logistic_translated"];

/// Looks up a catalog function. `scale` needs `0 < c ≤ 1`, `truncate` needs
/// `c > 0`; the others take no parameter. `logistic` is accepted as an alias
/// of `logistic_translated`.
pub fn builtin(name: &str, param: Option<f64>) -> Result<TameFunction> {
    let no_param = |f: TameFunction| match param {
        None => Ok(f),
        Some(_) => Err(Error::InvalidParameter(format!("`{name}` takes no parameter"))),
    };
    let need_param = || {
        param.ok_or_else(|| Error::InvalidParameter(format!("`{name}` requires a parameter")))
    };
    match name {
        "zero" => no_param(TameFunction::zero()),
        "identity" => no_param(TameFunction::identity()),
        "logistic_translated" | "logistic" => no_param(TameFunction::logistic_translated()),
        "scale" => TameFunction::scale(need_param()?),
        "truncate" => TameFunction::truncate(need_param()?),
        _ => Err(Error::UnknownFunction(name.to_string())),
    }
}

impl TameFunction {
    fn catalog(name: &str, kind: Kind, properties: Properties) -> Self {
        TameFunction {
            name: name.to_string(),
            kind,
            properties,
            infinity_clamp: None,
        }
    }

    /// `x ↦ 0`.
    pub fn zero() -> Self {
        Self::catalog("zero", Kind::Zero, Properties::TAME)
    }

    /// `x ↦ x`. Not finite at `∞`; evaluation there is an error unless a
    /// clamp is configured with [`TameFunction::with_infinity_clamp`].
    pub fn identity() -> Self {
        Self::catalog("identity", Kind::Identity, Properties::ALL)
    }

    /// `x ↦ c·x` for `0 < c ≤ 1`. Same caveat at `∞` as `identity`.
    pub fn scale(c: f64) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::InvalidParameter(format!("scale requires 0 < c <= 1, got {c}")));
        }
        Ok(Self::catalog(&format!("scale({c})"), Kind::Scale(c), Properties::ALL))
    }

    /// `x ↦ min(x, c)` for `c > 0`.
    pub fn truncate(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("truncate requires finite c > 0, got {c}")));
        }
        let props = Properties {
            positive_on_positive: true,
            ..Properties::TAME
        };
        Ok(Self::catalog(&format!("truncate({c})"), Kind::Truncate(c), props))
    }

    /// The logistic function translated to pass through the origin,
    /// `x ↦ (eˣ − 1)/(eˣ + 1)`, with value 1 at `∞`.
    pub fn logistic_translated() -> Self {
        Self::catalog("logistic_translated", Kind::LogisticTranslated, Properties::ALL)
    }

    /// A tabulated function. No properties are declared; call
    /// [`TameFunction::validated`] before using it in a divergence.
    pub fn tabulated(name: &str, table: Tabulated) -> Self {
        Self::catalog(name, Kind::Tabulated(table), Properties::default())
    }

    /// An arbitrary closure, e.g. for experiments or for exercising the
    /// validators. `at_infinity = None` means the function diverges there.
    pub fn from_fn(
        name: &str,
        map: impl Fn(f64) -> f64 + Send + Sync + 'static,
        at_infinity: Option<f64>,
    ) -> Self {
        Self::catalog(
            name,
            Kind::Custom {
                map: Arc::new(map),
                at_infinity,
            },
            Properties::default(),
        )
    }

    /// Evaluate to `value` at `∞` instead of failing, for functions whose
    /// formula diverges there.
    pub fn with_infinity_clamp(mut self, value: f64) -> Result<Self> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "infinity clamp must be finite and non-negative, got {value}"
            )));
        }
        self.infinity_clamp = Some(value);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn properties(&self) -> Properties {
        self.properties
    }

    /// True when `f(x) > 0` for all `x > 0` is declared. Divergences built from
    /// other functions are only pseudo-divergences.
    pub fn is_positive_on_positive(&self) -> bool {
        self.properties.positive_on_positive
    }

    pub fn evaluate(&self, x: ExtendedValue) -> Result<f64> {
        let v = x.get();
        let diverges = || match self.infinity_clamp {
            Some(c) => Ok(c),
            None => Err(Error::DivergesAtInfinity(self.name.clone())),
        };
        match &self.kind {
            Kind::Zero => Ok(0.0),
            Kind::Identity if x.is_infinite() => diverges(),
            Kind::Identity => Ok(v),
            Kind::Scale(_) if x.is_infinite() => diverges(),
            Kind::Scale(c) => Ok(c * v),
            Kind::Truncate(c) => Ok(v.min(*c)),
            Kind::LogisticTranslated if x.is_infinite() => Ok(1.0),
            // (e^x - 1)/(e^x + 1) = tanh(x/2), without the overflow of e^x
            Kind::LogisticTranslated => Ok((v / 2.0).tanh()),
            Kind::Tabulated(t) => Ok(t.eval(v)),
            Kind::Custom { at_infinity, .. } if x.is_infinite() => match at_infinity {
                Some(a) => Ok(*a),
                None => diverges(),
            },
            Kind::Custom { map, .. } => Ok(map(v)),
        }
    }

    /// Convenience for finite arguments.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let x = ExtendedValue::new(x)
            .ok_or_else(|| Error::InvalidParameter(format!("{x} is outside [0, inf]")))?;
        self.evaluate(x)
    }

    /// Re-derives the properties by sampling and fails if the function is
    /// not sub-diagonal and sub-additive. Positivity and strict monotonicity
    /// are recorded as observed on the sampling grid.
    pub fn validated(mut self, sampling: &Sampling) -> Result<Self> {
        let fail = |property, at: String| Error::ValidationFailed {
            name: self.name.clone(),
            property,
            at,
        };
        let diag = check_sub_diagonal(&self, sampling);
        if let Some(c) = diag.counterexample {
            return Err(fail("sub-diagonality", c.to_string()));
        }
        let add = check_sub_additive(&self, sampling);
        if let Some(c) = add.counterexample {
            return Err(fail("sub-additivity", c.to_string()));
        }
        let range = match &self.kind {
            Kind::Tabulated(t) => t.max_x().min(sampling.range_max),
            _ => sampling.range_max,
        };
        let grid = linear_grid(sampling.samples.max(2), range);
        let values: Vec<f64> = grid.iter().map(|&x| self.eval(x)).collect::<Result<_>>()?;
        self.properties = Properties {
            sub_diagonal: true,
            sub_additive: true,
            strictly_increasing: values.windows(2).all(|w| w[0] < w[1]),
            positive_on_positive: grid.iter().zip(&values).all(|(&x, &y)| x == 0.0 || y > 0.0),
        };
        Ok(self)
    }
}

/// Parses the `.fn` format: lines `<x> <f(x)>` in ascending `x`, exactly one
/// line `inf <value>`, `#` comments and blank lines ignored.
pub fn parse_tabulated(name: &str, text: &str) -> Result<TameFunction> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut at_infinity = None;
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
        if fields.len() != 2 {
            return Err(err(format!("expected `<x> <f(x)>`, found {} fields", fields.len())));
        }
        let x = parse_real(fields[0]).map_err(&err)?;
        let y = parse_real(fields[1]).map_err(&err)?;
        if !y.is_finite() || y < 0.0 {
            return Err(err(format!("value must be finite and non-negative, got {y}")));
        }
        if x == f64::INFINITY {
            if at_infinity.replace(y).is_some() {
                return Err(err("duplicate `inf` line".into()));
            }
            continue;
        }
        if x < 0.0 || !x.is_finite() {
            return Err(err(format!("x must be finite and non-negative, got {x}")));
        }
        if xs.last().is_some_and(|&last| x <= last) {
            return Err(err(format!("x values must be strictly ascending ({x})")));
        }
        xs.push(x);
        ys.push(y);
    }
    let at_infinity = at_infinity.ok_or_else(|| Error::Parse {
        line: text.lines().count(),
        message: "missing `inf <value>` line".into(),
    })?;
    Ok(TameFunction::tabulated(name, Tabulated::new(xs, ys, at_infinity)?))
}

/// Sampling plan shared by the validators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampling {
    pub samples: usize,
    pub range_max: f64,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            samples: 10_000,
            range_max: 1e3,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Counterexample {
    Point(ExtendedValue),
    Pair(f64, f64),
    Vector(Vec<f64>),
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counterexample::Point(x) => write!(f, "x = {x}"),
            Counterexample::Pair(x, y) => write!(f, "(x, y) = ({x}, {y})"),
            Counterexample::Vector(v) => write!(f, "x = {v:?}"),
        }
    }
}

/// Outcome of a sampled check; `counterexample` is the first violation found.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
    pub evaluated: usize,
}

impl CheckOutcome {
    fn run<T>(cases: impl IntoIterator<Item = T>, violates: impl Fn(&T) -> Option<Counterexample>) -> Self {
        let mut evaluated = 0;
        for case in cases {
            evaluated += 1;
            if let Some(c) = violates(&case) {
                return CheckOutcome {
                    holds: false,
                    counterexample: Some(c),
                    evaluated,
                };
            }
        }
        CheckOutcome {
            holds: true,
            counterexample: None,
            evaluated,
        }
    }
}

fn exceeds(lhs: f64, rhs: f64) -> bool {
    lhs > rhs + TOLERANCE * rhs.abs().max(1.0)
}

fn linear_grid(n: usize, max: f64) -> Vec<f64> {
    if n <= 1 {
        return vec![0.0];
    }
    (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect()
}

/// A third of the budget on an even grid over `[0, range_max]`, the rest
/// random: uniform, and log-uniform down to `1e-6` so that behaviour near the
/// origin is probed too.
fn sample_points(sampling: &Sampling) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let grid_n = sampling.samples.div_ceil(3);
    let mut xs = linear_grid(grid_n, sampling.range_max);
    for i in 0..sampling.samples.saturating_sub(grid_n) {
        xs.push(if i % 2 == 0 {
            rng.gen_range(0.0..=sampling.range_max)
        } else {
            log_uniform(&mut rng, sampling.range_max)
        });
    }
    xs
}

fn log_uniform(rng: &mut ChaCha8Rng, max: f64) -> f64 {
    let hi = max.max(1e-6).log10();
    10f64.powf(rng.gen_range(-6.0..=hi))
}

/// Sampled check of `f(x) ≤ x` on `[0, range_max] ∪ {∞}`.
///
/// At `∞` the inequality is vacuous; the sample there only confirms that `f`
/// takes a finite value (functions catalogued as diverging at `∞` skip it).
pub fn check_sub_diagonal(f: &TameFunction, sampling: &Sampling) -> CheckOutcome {
    let points = sample_points(sampling);
    let finite = CheckOutcome::run(points, |&x| match f.eval(x) {
        Ok(y) if !exceeds(y, x) && y >= 0.0 => None,
        _ => Some(Counterexample::Point(ExtendedValue::finite(x).unwrap())),
    });
    if !finite.holds {
        return finite;
    }
    match f.evaluate(ExtendedValue::INFINITY) {
        Ok(y) if !(y.is_finite() && y >= 0.0) => CheckOutcome {
            holds: false,
            counterexample: Some(Counterexample::Point(ExtendedValue::INFINITY)),
            evaluated: finite.evaluated + 1,
        },
        Ok(_) => CheckOutcome {
            evaluated: finite.evaluated + 1,
            ..finite
        },
        Err(_) => finite,
    }
}

/// Sampled check of `f(x + y) ≤ f(x) + f(y)` over pairs from `[0, range_max]`.
pub fn check_sub_additive(f: &TameFunction, sampling: &Sampling) -> CheckOutcome {
    let side = (sampling.samples as f64).sqrt().ceil() as usize;
    let grid = linear_grid(side.max(2), sampling.range_max);
    let mut pairs: Vec<(f64, f64)> = grid
        .iter()
        .flat_map(|&x| grid.iter().map(move |&y| (x, y)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    // random pairs, half of them on a log scale so small arguments get coverage
    for i in 0..sampling.samples {
        let (x, y) = if i % 2 == 0 {
            (rng.gen_range(0.0..=sampling.range_max), rng.gen_range(0.0..=sampling.range_max))
        } else {
            (log_uniform(&mut rng, sampling.range_max), log_uniform(&mut rng, sampling.range_max))
        };
        pairs.push((x, y));
    }
    CheckOutcome::run(pairs, |&(x, y)| {
        let ok = (|| -> Result<bool> { Ok(!exceeds(f.eval(x + y)?, f.eval(x)? + f.eval(y)?)) })();
        match ok {
            Ok(true) => None,
            _ => Some(Counterexample::Pair(x, y)),
        }
    })
}

fn p_norm(values: &[f64], p: Order) -> f64 {
    match p {
        Order::Infinity => values.iter().copied().fold(0.0, f64::max),
        Order::Finite(p) => values.iter().map(|v| v.powf(p)).sum::<f64>().powf(p.recip()),
    }
}

/// Sampled check of `f(‖x‖_p) ≤ ‖(f(x_i))_i‖_p` over non-negative vectors of
/// length `1..=dimension_max`, entries log-uniform in `[1e-3, 1e3]`.
pub fn check_p_increasing(
    f: &TameFunction,
    p: Order,
    dimension_max: usize,
    samples: usize,
    seed: u64,
) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dimension_max = dimension_max.max(1);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(samples);
    // constant vectors on a grid, then random ones
    for n in 1..=dimension_max {
        for k in -6..=6 {
            vectors.push(vec![10f64.powf(k as f64 / 2.0); n]);
        }
    }
    for _ in 0..samples {
        let n = rng.gen_range(1..=dimension_max);
        vectors.push((0..n).map(|_| 10f64.powf(rng.gen_range(-3.0..=3.0))).collect());
    }
    CheckOutcome::run(vectors, |x| {
        let ok = (|| -> Result<bool> {
            let lhs = f.eval(p_norm(x, p))?;
            let fx: Vec<f64> = x.iter().map(|&xi| f.eval(xi)).collect::<Result<_>>()?;
            Ok(!exceeds(lhs, p_norm(&fx, p)))
        })();
        match ok {
            Ok(true) => None,
            _ => Some(Counterexample::Vector(x.clone())),
        }
    })
}
