use thiserror::Error;

/// Errors raised by curve construction and the numerical operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("curve is not regular: min speed {min_speed:e} vs max speed {max_speed:e}")]
    NonRegular { min_speed: f64, max_speed: f64 },
    #[error("curve is not embedded: chord/arc ratio {bilipschitz:e} below threshold {threshold:e}")]
    NonEmbedded { bilipschitz: f64, threshold: f64 },
    #[error("mollifier width {0} outside (0, 1/2)")]
    EpsOutOfRange(f64),
    #[error("bad exponents s = {s}, p = {p}: need 0 < s < 1 and p >= 1")]
    BadExponents { s: f64, p: f64 },
    #[error("grid {grid} too small (minimum {min})")]
    GridTooSmall { grid: usize, min: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("radius {0} outside (0, 1/2]")]
    ROutOfRange(f64),
    #[error("point coincides with the inversion center")]
    CenterHit,
    #[error("inversion center at distance {distance:e} from the curve, need at least {required:e}")]
    CenterTooClose { distance: f64, required: f64 },
    #[error("window half-width {half_width} needs parameters within {needed:e} of the center (excluded below {excluded:e})")]
    DomainTooLarge {
        half_width: f64,
        needed: f64,
        excluded: f64,
    },
    #[error("vertices {i} and {j} coincide")]
    CoincidentVertices { i: usize, j: usize },
    #[error("no forward point at chord distance {side:e} within one loop (step {step})")]
    NoForwardIntersection { side: f64, step: usize },
    #[error("no sign change of the closing gap on {scanned} scanned side lengths")]
    BracketNotFound { scanned: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
