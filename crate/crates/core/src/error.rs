//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]. Variants split into three
//! broad classes, which the CLI maps onto exit codes: domain errors
//! (bad arguments or violated preconditions), I/O and parse errors, and
//! internal failures (a solver or calibration giving up).

use thiserror::Error;

/// Alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input that must be finite was NaN or infinite.
    #[error("non-finite input for {what}")]
    NonFinite { what: &'static str },

    /// An input that must be nonnegative was negative.
    #[error("negative input for {what}")]
    Negative { what: &'static str },

    /// delta must be a rational strictly inside (0, 1/2).
    #[error("delta = {value} is outside the open interval (0, 1/2)")]
    DeltaOutOfRange { value: String },

    /// Two points of different dimensions were combined.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A point set mixed exact-lattice and floating coordinates.
    #[error("point set mixes exact-lattice and certified-float points")]
    MixedModes,

    /// Exact-mode verification is only defined for the Euclidean norm.
    #[error("exact-lattice mode requires the euclidean norm")]
    ExactNeedsEuclidean,

    /// An operation requiring at least one point got an empty set.
    #[error("point set is empty")]
    EmptySet,

    /// Two identical points in one set.
    #[error("points {i} and {j} are identical")]
    DuplicatePoint { i: usize, j: usize },

    /// A point lies outside the declared containment ball.
    #[error("point {index} lies outside the ball of radius {radius}")]
    OutsideBall { index: usize, radius: f64 },

    /// Exact coordinates beyond the range where squared distances
    /// are representable.
    #[error("coordinate magnitude {value} exceeds the exact-arithmetic limit 2^62")]
    CoordinateTooLarge { value: i64 },

    /// Coincident points where a positive pair distance is required.
    #[error("points {i} and {j} coincide; pair distance must be positive")]
    CoincidentPoints { i: usize, j: usize },

    /// A named precondition failed; the message cites the violated bound.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A construction would materialize more points than the cap allows.
    #[error("construction would emit {count} points, above the cap {cap}")]
    CountExceedsCap { count: u128, cap: u128 },

    /// The curve table is too shallow to resolve the requested parameters.
    #[error("curve has {have} levels but {need} are required; rebuild with more levels")]
    InsufficientLevels { have: u32, need: u32 },

    /// The sampled curve self-intersects, so no lower bilipschitz
    /// constant exists.
    #[error("degenerate curve: some sampled pair has ratio {ratio:e}, below {floor:e}")]
    DegenerateCurve { ratio: f64, floor: f64 },

    /// The requested delta exceeds what the measured curve supports.
    #[error("delta = {delta} exceeds the achievable delta_phi = {delta_phi}")]
    DeltaExceedsPhi { delta: String, delta_phi: String },

    /// The clique solver's exact-mode size cap was exceeded.
    #[error("candidate set has {n} points, above the exact cap {cap}; use the greedy subset")]
    CliqueCapExceeded { n: usize, cap: usize },

    /// The LP solver failed to converge or met an inconsistent basis.
    #[error("lp solver failure: {0}")]
    LpFailure(String),

    /// Monte-Carlo calibration disagreed with the fitted constant.
    #[error("calibration failed: residual {residual:e} exceeds {limit:e} at radius {radius}")]
    Calibration {
        residual: f64,
        limit: f64,
        radius: f64,
    },

    /// Underlying file I/O failed.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A file did not parse as the expected format.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// True for errors caused by bad input rather than internal failure.
    pub fn is_domain(&self) -> bool {
        !matches!(
            self,
            Error::LpFailure(_) | Error::Calibration { .. } | Error::Io(_)
        )
    }
}
