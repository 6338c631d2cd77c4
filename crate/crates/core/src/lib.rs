//! # dgmdiv
//!
//! Distances and asymmetric divergences between persistence diagrams.
//!
//! The classical `p`-Wasserstein and bottleneck distances are infinite as soon
//! as two diagrams disagree on their number of essential (infinite-death)
//! points. The `(f, p)`-Wasserstein divergence `D_p^f(A‖B)` relaxes the
//! bijection to an injection `A → B`: every point of `B` that is left over is
//! charged `f(‖b − λ(b)‖∞)^p`, where `λ` projects onto the diagonal and `f` is
//! a sub-diagonal, sub-additive function that stays finite at `∞`. The result
//! is finite whenever `A` has no more infinite points than `B`.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`extended`] | `[0, ∞]` arithmetic |
//! | [`diagram`] | points, diagrams, `‖·‖∞`, diagonal projection, `.dgm` I/O |
//! | [`functions`] | catalog of penalty functions `f` and sampled validators |
//! | [`matching`] | min-cost and bottleneck assignment, brute-force oracles |
//! | [`divergence`] | `d_p`, `d_∞`, `D_p^f`, `D_∞^f` and friends |
//! | [`vectorize`] | projection onto finite diagrams, bar statistics, entropy |
//! | [`persistence`] | filtrations, Vietoris–Rips, Z/2 persistence |
//! | [`sample`] | seeded random diagrams for experiments and tests |
//!
//! ```
//! use dgmdiv::{diagram::parse_diagram, divergence, functions::TameFunction};
//!
//! let a = parse_diagram("2 10\n5 inf").unwrap().diagram;
//! let b = parse_diagram("3 11").unwrap().diagram;
//! let f = TameFunction::logistic_translated();
//!
//! let forward = divergence::wasserstein_divergence(&a, &b, &f, 2.0).unwrap();
//! let backward = divergence::wasserstein_divergence(&b, &a, &f, 2.0).unwrap();
//! assert!(forward.value.is_infinite());
//! assert_eq!(backward.value.get(), 2f64.sqrt());
//! ```

use thiserror::Error;

pub mod diagram;
pub mod divergence;
pub mod extended;
pub mod functions;
pub mod matching;
pub mod persistence;
pub mod sample;
pub mod vectorize;

pub use diagram::{DiagramPoint, PersistenceDiagram};
pub use divergence::{DivergenceReport, Order};
pub use extended::ExtendedValue;
pub use functions::TameFunction;
pub use matching::{CostMatrix, MatchingResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid diagram point ({birth}, {death}): {reason}")]
    InvalidPoint {
        birth: f64,
        death: f64,
        reason: &'static str,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("function `{0}` diverges at infinity (enable clamping to evaluate it there)")]
    DivergesAtInfinity(String),

    #[error("function `{name}` fails validation: {property} violated at {at}")]
    ValidationFailed {
        name: String,
        property: &'static str,
        at: String,
    },

    #[error("invalid order p = {0}: must be >= 1")]
    InvalidOrder(f64),

    #[error("cost matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare {
        row: usize,
        len: usize,
        expected: usize,
    },

    #[error("instance of size {size} exceeds the brute-force limit of {max}")]
    TooLarge { size: usize, max: usize },

    #[error("diagram contains infinite points; project onto finite diagrams first")]
    InfinitePoint,

    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),

    #[error("empty point cloud")]
    EmptyPointCloud,
}

pub type Result<T> = std::result::Result<T, Error>;
