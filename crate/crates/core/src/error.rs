use thiserror::Error;

/// Failures raised anywhere in the library.
///
/// Validation problems (bad inputs) and numerical problems (a tolerance that
/// could not be met) are kept apart so the command line can map them to
/// different exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite field sample at ({x}, {y}, t={t})")]
    NonFiniteField { x: f64, y: f64, t: f64 },

    #[error("field evaluated at the source axis (x=0, y=0)")]
    AtOrigin,

    #[error("time {t} lies outside the tabulated flux range [{start}, {end}]")]
    OutsideTable { t: f64, start: f64, end: f64 },

    #[error("path enters the source region (r = {r} <= a = {radius})")]
    EntersSource { r: f64, radius: f64 },

    #[error("dipole kind {dipole} does not couple to source kind {config}")]
    KindMismatch { dipole: String, config: String },

    #[error("operation requires a sinusoidal flux profile")]
    NotSinusoidal,

    #[error("trajectory endpoints differ by {gap:e} (tolerance {tol:e})")]
    EndpointMismatch { gap: f64, tol: f64 },

    #[error("quadrature did not reach tolerance {tol:e}: estimated error {err:e}")]
    Quadrature { err: f64, tol: f64 },

    #[error("linear solve did not converge: residual {residual:e} after {iterations} iterations")]
    SolverDiverged { residual: f64, iterations: usize },

    #[error("spectral weight {weight:e} near the zone edge exceeds {threshold:e}")]
    ZoneEdgeWeight { weight: f64, threshold: f64 },

    #[error("wavepacket overlaps the source disk: center r = {r}, needs r > {min}")]
    PacketOverlapsSource { r: f64, min: f64 },

    #[error("momentum {k} exceeds the band limit {limit}")]
    MomentumOutOfBand { k: f64, limit: f64 },

    #[error("mismatched run metadata: {0}")]
    RunMismatch(String),

    #[error("fringe contrast {contrast} below threshold {threshold}")]
    LowContrast { contrast: f64, threshold: f64 },

    #[error("packets failed to reach the screen: {0}")]
    MissedScreen(String),

    #[error("config error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("{}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("{check} = {value:e} misses tolerance {tol:e}")]
    Tolerance { check: String, value: f64, tol: f64 },

    #[error("refusing to write non-finite value in column {column}")]
    NonFiniteOutput { column: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures caused by a tolerance that was not met, as opposed
    /// to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::SolverDiverged { .. }
                | Error::ZoneEdgeWeight { .. }
                | Error::LowContrast { .. }
                | Error::Tolerance { .. }
                | Error::MissedScreen(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
