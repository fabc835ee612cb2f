use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("source coincides with sensor {sensor} (distance {distance:e})")]
    CoincidentSourceSensor { sensor: usize, distance: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid position: {0}")]
    InvalidPosition(String),

    #[error("sensors {0} and {1} share a position")]
    DuplicateSensor(usize, usize),

    #[error("invalid preset parameters: {0}")]
    InvalidPresetParams(String),

    #[error("noise vectors span the full sampling space (rank {rank} of {n}); no decoherence-free probe exists")]
    NoiseSpansFullSpace { rank: usize, n: usize },

    #[error("signal vector lies in the insensitive subspace (residual ratio {residual:e})")]
    SignalInNoiseSpace { residual: f64 },

    #[error("invalid Apollonius ratio c = {0}; need 0 < c <= 1")]
    InvalidRatio(f64),

    #[error("rejection sampling stalled: acceptance rate below 1e-6")]
    RejectionStall,

    #[error("probe is exactly decoherence-free for this source; the QFI rate has no finite optimum")]
    InfiniteOptimum,

    #[error("brute-force oracle supports at most 4 qubits, got {0}")]
    DimensionTooLarge(usize),

    #[error("invalid probe state: {0}")]
    InvalidProbe(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear program failed: {0}")]
    LinearProgram(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Numeric failures are the ones a caller cannot fix by editing the
    /// config syntax; the command-line tool maps them to a distinct exit code.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NoiseSpansFullSpace { .. }
                | Error::SignalInNoiseSpace { .. }
                | Error::CoincidentSourceSensor { .. }
                | Error::RejectionStall
                | Error::InfiniteOptimum
                | Error::LinearProgram(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
