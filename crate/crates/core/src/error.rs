use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("{n_sites} sites exceeds the configured cap of {cap} sites")]
    TooManySites { n_sites: usize, cap: usize },

    #[error("operator is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid site selection: {0}")]
    InvalidSites(String),

    #[error("sites ({0}, {1}) are not nearest neighbours on this lattice")]
    NotABond(usize, usize),

    #[error("unphysical correlator set: smallest eigenvalue {min_eigenvalue:e}")]
    Unphysical { min_eigenvalue: f64 },

    #[error("eigendecomposition failed to converge")]
    Eigensolver,

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {value:e}, residual {residual:e})"
    )]
    Quadrature {
        value: f64,
        residual: f64,
        subdivisions: usize,
    },

    #[error("sampling plan: {0}")]
    Sampling(String),

    #[error("invalid equilibrium curve: {0}")]
    InvalidCurve(String),

    #[error(
        "curve too sparse to place a crossing between beta_tilde {lo} and {hi}; \
         refine the grid or supply an evaluator"
    )]
    CurveTooSparse { lo: f64, hi: f64 },

    #[error("configuration `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("at {context}: {source}")]
    AtPoint {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Attaches the parameter point at which a numeric failure happened.
    pub fn at(self, context: impl Into<String>) -> Self {
        Error::AtPoint {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
