//! Splitting bounded analytic functions across two singular sets.
//!
//! The crate covers the geometric classifier for pairs of arcs meeting at a
//! point, the cutting-function reduction to a ∂̄-problem, four explicit ∂̄
//! solvers, the witness constructions showing when no bounded splitting can
//! exist, and the disc-chain construction in the right half-plane.

pub mod cutting;
pub mod dbar;
pub mod geometry;
pub mod io;
pub mod numerics;
pub mod scenarios;
pub mod splitter;
pub mod witness;

pub use numerics::C64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("corridor undefined: g vanishes on every sample")]
    UndefinedCorridor,
    #[error("degenerate tangent: {0}")]
    DegenerateTangent(String),
    #[error("invalid pair: {0}")]
    InvalidPair(String),
    #[error("density not integrable: {0}")]
    Integrability(String),
    #[error("Carleson violation: {0}")]
    CarlesonViolation(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("schedule infeasible at t = {t}: Δ(t) = {delta} > h = {h}")]
    ScheduleInfeasible { t: f64, delta: f64, h: f64 },
    #[error("invalid cell: {0}")]
    InvalidCell(String),
    #[error("containment error: {0}")]
    Containment(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("ambiguous evaluation on the arc: {0}")]
    Ambiguity(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
