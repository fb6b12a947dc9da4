use thiserror::Error;

/// Errors produced by kernel evaluation, bound computation, the solvers and
/// the verification harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A value lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid run or solver configuration. Carries every violation found,
    /// not just the first.
    #[error("configuration error: {}", .0.join("; "))]
    Config(Vec<String>),

    /// g(k) requested at an inadmissible k: the level-set integral must stay
    /// strictly below C0.
    #[error("inadmissible k = {k}: level-set integral {level_integral} >= C0 = {c0}")]
    InadmissibleK { k: f64, level_integral: f64, c0: f64 },

    /// Physically invalid input data (e.g. negative initial density).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A state with no usable mass or particles.
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// An explicit step exceeded its stability bound.
    #[error("step size {dt} exceeds stable limit {dt_max}")]
    StepSize { dt: f64, dt_max: f64 },

    /// The adaptive step fell below dt_min without acceptance.
    #[error("numerical abort at t = {t}: step size fell below {dt_min}")]
    NumericalAbort { t: f64, dt_min: f64 },

    /// A campaign labelled inconsistently with the data it produced.
    #[error("campaign configuration error: {0}")]
    Campaign(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Single-message configuration error.
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(vec![msg.into()])
    }
}
