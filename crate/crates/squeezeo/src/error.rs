//! Crate-wide error type.
//!
//! Errors are classified into two kinds so the CLI can map them onto exit
//! codes: [`ErrorKind::Config`] for anything wrong with inputs (bad
//! parameters, malformed files, I/O) and [`ErrorKind::Numerical`] for
//! failures of the numerics themselves (instability, degenerate profiles,
//! non-converging fits).

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Broad error class, used to pick the process exit code (config = 2,
/// numerical = 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// The synthesized envelope does not decay below the edge tolerance
    /// within the grid window.
    #[error(
        "envelope leaks off the grid: edge amplitude is {edge_ratio:.3e} of the peak \
         (tolerance {tolerance:.1e}); widen the time window or shorten the envelope"
    )]
    EdgeLeakage { edge_ratio: f64, tolerance: f64 },

    #[error(
        "grid too coarse: {samples_per_cycle:.2} samples per cycle at {freq_thz:.2} THz \
         (need at least {required}); reduce dt"
    )]
    GridTooCoarse {
        samples_per_cycle: f64,
        freq_thz: f64,
        required: f64,
    },

    #[error("band limit {band_thz:.2} THz unusable on this grid: {reason}")]
    BandLimit { band_thz: f64, reason: String },

    /// z-stepping blew past the analytic energy-growth bound.
    #[error(
        "z-stepping unstable: ensemble energy grew by {growth:.3e}, above the \
         exp(2·max|f|) = {bound:.3e} bound; increase z_steps (currently {z_steps})"
    )]
    Unstable {
        growth: f64,
        bound: f64,
        z_steps: usize,
    },

    /// Noise profile has no distinct extrema (e.g. identically vanishing f).
    #[error("noise profile has no distinct extrema: {0}")]
    NoExtrema(String),

    #[error(
        "Pockels model breakdown: |Δn| = {delta_n_max:.3e} is not small against n = {n}; \
         field amplitude or d_eff is out of the model's range"
    )]
    ModelBreakdown { delta_n_max: f64, n: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("scenario config error: {0}")]
    Config(String),

    #[error("malformed data file {path}: {reason}")]
    DataFormat { path: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Classify for exit-code mapping. I/O and parse problems count as
    /// config errors.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Unstable { .. }
            | Error::NoExtrema(_)
            | Error::ModelBreakdown { .. }
            | Error::Fit(_) => ErrorKind::Numerical,
            _ => ErrorKind::Config,
        }
    }

    /// Process exit code for the CLI: 2 for config errors, 3 for numerical
    /// ones (0 is success).
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Config => 2,
            ErrorKind::Numerical => 3,
        }
    }

    /// Wrap an I/O error with the path it concerned.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
