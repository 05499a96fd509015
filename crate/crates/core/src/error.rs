use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("M and N must differ")]
    EqualRanks,

    #[error("M and N must be positive (got M = {m}, N = {n})")]
    NonPositiveRank { m: usize, n: usize },

    #[error("degenerate q: {0}")]
    DegenerateQ(String),

    #[error("q is too close to a root of unity: |q^{n} - 1| = {distance:e}")]
    NearRootOfUnity { n: usize, distance: f64 },

    #[error("degenerate q-exponential base: |({n})_t| = {value:e}")]
    DegenerateBase { n: usize, value: f64 },

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("pole: |1 - q^2 zeta^s| = {distance:e} at zeta^s = {zeta_s}")]
    Pole { distance: f64, zeta_s: String },

    #[error("series truncation order {order} is below the required {required}")]
    Truncation { order: usize, required: usize },

    #[error("construction error: {0}")]
    Construction(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
