use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid cavity configuration: {0}")]
    InvalidConfig(String),

    #[error("{what} = {value} outside admissible range [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root {index} did not converge after {iterations} iterations (bracket [{lo}, {hi}])")]
    RootNotConverged {
        index: usize,
        iterations: usize,
        lo: f64,
        hi: f64,
    },

    #[error("quadrature did not reach relative tolerance {tol:e} with {nodes} nodes on [{a}, {b}]")]
    QuadratureNotConverged { a: f64, b: f64, nodes: usize, tol: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("trajectory leaves the admissible interval: q({tau}) = {q}")]
    InadmissibleTrajectory { tau: f64, q: f64 },

    #[error("slab width {delta0} does not match the structural width {required} for (n, k) = ({n}, {k})")]
    WidthMismatch {
        delta0: f64,
        required: f64,
        n: u32,
        k: u32,
    },

    #[error("coefficient table failed validation: {0}")]
    TableValidation(String),
}
