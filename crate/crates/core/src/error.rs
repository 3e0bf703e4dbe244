use thiserror::Error;

/// Errors raised by the solver and its numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pole in {op}: denominator magnitude {magnitude:e}")]
    Pole { op: &'static str, magnitude: f64 },

    #[error("overflow in {op}: {detail}")]
    Overflow { op: &'static str, detail: String },

    #[error("{op} is not defined for {what}")]
    Unsupported { op: &'static str, what: String },

    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("{op} failed to converge: {detail}")]
    Convergence { op: &'static str, detail: String },

    #[error("singular term in {op}: {detail}")]
    Singular { op: &'static str, detail: String },

    #[error("grid too small: boundary mass {boundary_mass:e} exceeds {tolerance:e}")]
    Aliasing { boundary_mass: f64, tolerance: f64 },

    #[error("data mass {out_of_grid:e} lies outside the model grid")]
    Support { out_of_grid: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("simulation exceeded {cap} events in cell {cell}")]
    EventCap { cell: u64, cap: u64 },
}

impl Error {
    /// Name of the module that raised the error, for structured reporting.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Pole { .. } | Error::Unsupported { .. } => "burst",
            Error::Overflow { .. } | Error::Singular { .. } => "integrals",
            Error::Domain { .. } => "specfun",
            Error::Convergence { .. } => "numerics",
            Error::Aliasing { .. } => "solver",
            Error::Support { .. } | Error::Shape(_) => "inference",
            Error::EventCap { .. } => "ssa",
            Error::InvalidParameter(_) => "config",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
