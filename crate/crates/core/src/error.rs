//! Error type shared across the workbench.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("grid too small: {nx}x{ny} (minimum 8x8)")]
    GridTooSmall { nx: usize, ny: usize },

    #[error("grid spacing must be positive, got dx={dx}, dy={dy}")]
    BadSpacing { dx: f64, dy: f64 },

    #[error("excluded disk (center ({cx}, {cy}), radius {radius}) does not lie strictly inside the domain")]
    DiskOutsideDomain { cx: f64, cy: f64, radius: f64 },

    #[error("field has {got} samples but the grid expects {expected}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("time stamps are inconsistent: {detail}")]
    TimeMismatch { detail: String },

    #[error("state has no previous time level and is not declared static")]
    MissingPrevLevel,

    #[error("need at least {need} time levels, got {got}")]
    TooFewFrames { need: usize, got: usize },

    #[error("time levels are not uniformly spaced (step {index}: dt={dt}, expected {expected})")]
    NonUniformTimes { index: usize, dt: f64, expected: f64 },

    #[error("evaluation at the singular center of the source")]
    SingularPoint,

    #[error("path approaches the singular center within {eps}")]
    PathNearSingularity { eps: f64 },

    #[error("path leaves the grid domain at ({x}, {y})")]
    PathOutsideDomain { x: f64, y: f64 },

    #[error("path needs at least {need} vertices, got {got}")]
    TooFewVertices { need: usize, got: usize },

    #[error("loop is not closed: first and last vertices differ")]
    LoopNotClosed,

    #[error("loop is self-intersecting")]
    SelfIntersectingLoop,

    #[error("loop winding about ({cx}, {cy}) is not integral: {value}")]
    NonIntegerWinding { cx: f64, cy: f64, value: f64 },

    #[error("paths do not share endpoints (mismatch {mismatch:.3e})")]
    EndpointMismatch { mismatch: f64 },

    #[error("adaptive quadrature failed to converge on segment {segment} (last delta {delta:.3e})")]
    QuadratureDivergence { segment: usize, delta: f64 },

    #[error("conjugate gradient stalled at relative residual {residual:.3e} after {iterations} iterations")]
    SolverDiverged { residual: f64, iterations: usize },

    #[error("CFL violation: c*dt*sqrt(1/dx^2 + 1/dy^2) = {value:.4} exceeds {limit}")]
    CflViolation { value: f64, limit: f64 },

    #[error("wide gauge element violates its constraints: curl residual {curl_residual:.3e}, companion residual {companion_residual:.3e} (tolerance {tolerance:.3e})")]
    WideConstraint {
        curl_residual: f64,
        companion_residual: f64,
        tolerance: f64,
    },

    #[error("polar gauge-function center ({cx}, {cy}) lies in the probe-accessible region; it must sit inside the excluded disk")]
    PolarCenterExposed { cx: f64, cy: f64 },

    #[error("no generator loop encloses the excluded disk; classification on a punctured domain needs one")]
    MissingGeneratorLoop,

    #[error("zero wave vector: a residual gauge wave needs |k| > 0")]
    ZeroWaveVector,

    #[error("kernel parameters out of range: r={r}, width={width} (need r > 0, width > 0)")]
    BadKernelParams { r: f64, width: f64 },

    #[error("probe radius {radius} reaches into the damping layer")]
    ProbeInDampingLayer { radius: f64 },

    #[error("channel never exceeds the arrival threshold at radius {radius}")]
    NoArrival { radius: f64 },

    #[error("damping layer of {got} cells is too thin for front diagnostics (need >= {need})")]
    DampingLayerTooThin { got: usize, need: usize },

    #[error("solenoid spec invalid: {detail}")]
    BadSolenoid { detail: String },

    #[error("{0}")]
    Invalid(String),
}
