use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("grid point {z} is zero; the iterate identity divides by z^(n+1)")]
    ZeroGridPoint { z: Complex64 },

    #[error("evaluation point hits a pole (|1 - z*alpha| = {dist:.3e})")]
    PoleInput { dist: f64 },

    #[error("point {z} is within {dist:.3e} of the singular arc")]
    NearSingular { z: Complex64, dist: f64 },

    #[error("sample set is empty")]
    EmptySet,

    #[error("domain rejected: {0}")]
    DomainRejected(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("cantor construction halted at level {level}: removed arc (length {removed:.6e}) does not fit in host arc (length {host:.6e})")]
    ArcUnderflow { level: usize, removed: f64, host: f64 },

    #[error("quadrature failed tolerance {requested:.3e}: last two estimates {prev:.12e} and {last:.12e}")]
    ToleranceNotMet { requested: f64, prev: f64, last: f64 },

    #[error("linear system too ill-conditioned (estimate {cond:.3e}): {hint}")]
    IllConditioned { cond: f64, hint: String },

    #[error("geometry precondition failed: {0}")]
    GeometryCheck(String),

    #[error("stage {stage} failed its budget: achieved {achieved:.6e}, budget {budget:.6e}")]
    StageBudget { stage: usize, achieved: f64, budget: f64 },
}

pub type Result<T> = std::result::Result<T, CoreError>;
