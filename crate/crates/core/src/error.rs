use thiserror::Error;

/// Errors raised by the stability library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("eigenvalue iteration did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("leading polynomial coefficient is zero")]
    DegenerateLeading,
    #[error("bodies {0} and {1} occupy the same position")]
    CoincidentBodies(usize, usize),
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("collinear configuration: the planar reduction needs a non-collinear central configuration")]
    Collinear,
    #[error("step size underflow at t = {t}: loosen the tolerance or lower the eccentricity")]
    StepUnderflow { t: f64 },
    #[error("Newton iteration failed after {iterations} iterations (last residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },
    #[error("branch flip: the solved configuration left the {expected} branch (line angle {angle} rad)")]
    BranchFlip { expected: String, angle: f64 },
    #[error("construction unavailable: {0}")]
    ConstructionUnavailable(String),
    #[error("point is not degenerate (smallest singular value {0:e})")]
    NotDegenerate(f64),
    #[error("unsupported normal form: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
