//! Non-negative extended reals: `[0, ∞]`.
//!
//! Every cost, gap and objective value in the crate is an [`ExtendedValue`].
//! The representation is an `f64` that is never NaN and never negative, with
//! `f64::INFINITY` standing for the single point at infinity. That keeps the
//! absorbing rules (`∞ + x = ∞`, `∞^p = ∞`, `max(∞, x) = ∞`) in plain IEEE
//! arithmetic while giving the type a total order.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ExtendedValue(f64);

impl ExtendedValue {
    pub const ZERO: ExtendedValue = ExtendedValue(0.0);
    pub const INFINITY: ExtendedValue = ExtendedValue(f64::INFINITY);

    /// Wraps a finite non-negative real. Returns `None` for negative, NaN or
    /// infinite input; use [`ExtendedValue::INFINITY`] for the latter.
    pub fn finite(value: f64) -> Option<Self> {
        if value.is_finite() && value >= 0.0 {
            // normalise -0.0
            Some(ExtendedValue(value + 0.0))
        } else {
            None
        }
    }

    /// Like [`ExtendedValue::finite`] but also accepts `+∞`.
    pub fn new(value: f64) -> Option<Self> {
        if value == f64::INFINITY {
            Some(Self::INFINITY)
        } else {
            Self::finite(value)
        }
    }

    pub fn is_infinite(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_finite(self) -> bool {
        !self.is_infinite()
    }

    /// The underlying `f64` (`f64::INFINITY` for ∞).
    pub fn get(self) -> f64 {
        self.0
    }

    /// `Some(x)` for finite values.
    pub fn as_finite(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    /// `self^p` for `p ≥ 1`; `∞^p = ∞`.
    pub fn pow(self, p: f64) -> Self {
        if self.is_infinite() {
            return self;
        }
        if p == 1.0 {
            self
        } else if p == 2.0 {
            ExtendedValue(self.0 * self.0)
        } else {
            ExtendedValue(self.0.powf(p))
        }
    }

    /// `self^(1/p)` for `p ≥ 1`; `∞^(1/p) = ∞`.
    pub fn root(self, p: f64) -> Self {
        if self.is_infinite() {
            return self;
        }
        if p == 1.0 {
            self
        } else if p == 2.0 {
            ExtendedValue(self.0.sqrt())
        } else {
            ExtendedValue(self.0.powf(p.recip()))
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// `|x - y|` for two values of the extended line where either may be `+∞`.
    /// Two infinities are at distance zero; one infinity is infinitely far
    /// from any finite value.
    pub fn abs_diff(x: f64, y: f64) -> Self {
        match (x == f64::INFINITY, y == f64::INFINITY) {
            (true, true) => Self::ZERO,
            (true, false) | (false, true) => Self::INFINITY,
            (false, false) => ExtendedValue((x - y).abs() + 0.0),
        }
    }
}

impl Eq for ExtendedValue {}

impl PartialOrd for ExtendedValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add for ExtendedValue {
    type Output = ExtendedValue;

    fn add(self, rhs: Self) -> Self {
        ExtendedValue(self.0 + rhs.0)
    }
}

impl Sum for ExtendedValue {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl From<ExtendedValue> for f64 {
    fn from(v: ExtendedValue) -> f64 {
        v.0
    }
}

/// Prints the shortest representation that round-trips through `f64`
/// parsing, or `inf`.
impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_real(self.0).fmt(f)
    }
}

/// Formats a real for machine-readable output: shortest round-trip decimal,
/// `inf` / `-inf` for infinities, and no negative zero.
pub fn format_real(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{}", x + 0.0)
    }
}
