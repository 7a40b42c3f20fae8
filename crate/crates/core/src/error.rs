use thiserror::Error;

/// Errors raised by chart evaluation, coefficient derivation and the
/// finite-difference oracles.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("base dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("point outside chart domain: 1 + (c/4)|x|^2 = {factor:.6e} <= 0")]
    OutsideChartDomain { factor: f64 },

    #[error("degenerate plane: area element {0:.3e} below 1e-14")]
    DegeneratePlane(f64),

    #[error("zero covector rejected: {0}")]
    ZeroCovector(&'static str),

    #[error("singular parameter: {expression} = {value:.6e} at t = {t}")]
    SingularParameter {
        expression: &'static str,
        value: f64,
        t: f64,
    },

    #[error("inadmissible point: {0}")]
    InadmissiblePoint(String),

    #[error("family fails admissibility: {0}")]
    InadmissibleFamily(String),

    #[error(
        "energy density mismatch: coefficients carry t = {coeff_t:.12e}, point gives t = {point_t:.12e}"
    )]
    EnergyMismatch { coeff_t: f64, point_t: f64 },

    #[error(
        "finite-difference step unreliable ({context}): Richardson disagreement {disagreement:.3e}"
    )]
    StepUnreliable { context: String, disagreement: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
