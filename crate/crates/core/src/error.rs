use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants split into two families: input validation (bad parameters,
/// incommensurate grids, malformed files) and numerical failure (the input
/// does not generate a frame, a section is singular). [`Error::is_numerical`]
/// tells them apart.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid lattice: {0}")]
    Lattice(String),

    #[error("{what} = {value} is not an integer multiple of dt = {dt}")]
    Commensurability { what: &'static str, value: f64, dt: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("grid too narrow: {0}")]
    GridTooNarrow(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("band radius K = {band} too small: dropped column mass {mass:.3e} exceeds {tol:.1e}")]
    BandTooNarrow { band: usize, mass: f64, tol: f64 },

    #[error("not a frame: lower frame bound {lower:.3e} (upper {upper:.3e})")]
    NotAFrame { lower: f64, upper: f64 },

    #[error("frame deficiency: Gram section of radius {radius} is singular (pivot ratio {ratio:.3e})")]
    FrameDeficiency { radius: usize, ratio: f64 },

    #[error("no orthonormal system for ab = {ab}: an OFDM lattice needs ab < 1")]
    NoOrthonormalSystem { ab: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerics on valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotAFrame { .. }
                | Error::FrameDeficiency { .. }
                | Error::BandTooNarrow { .. }
                | Error::NoOrthonormalSystem { .. }
        )
    }

    /// Short machine-parsable tag.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "E_PARAM",
            Error::Lattice(_) => "E_LATTICE",
            Error::Commensurability { .. } => "E_COMMENSURABILITY",
            Error::GridMismatch(_) => "E_GRID_MISMATCH",
            Error::GridTooNarrow(_) => "E_GRID_NARROW",
            Error::InsufficientData(_) => "E_INSUFFICIENT_DATA",
            Error::BandTooNarrow { .. } => "E_BAND",
            Error::NotAFrame { .. } => "E_NOT_FRAME",
            Error::FrameDeficiency { .. } => "E_NOT_FRAME",
            Error::NoOrthonormalSystem { .. } => "E_NOT_FRAME",
            Error::Io(_) => "E_IO",
            Error::Json(_) | Error::Csv(_) | Error::Parse(_) => "E_PARSE",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
