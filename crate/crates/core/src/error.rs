use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Precondition,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: expected 2 or 3")]
    InvalidDimension(usize),
    #[error("points per axis must be a power of two >= 8, got {0}")]
    NonPowerOfTwo(usize),
    #[error("box length must be positive and finite, got {0}")]
    InvalidLength(f64),
    #[error("array has {got} entries, grid expects {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid spectrum profile: {0}")]
    InvalidProfile(String),
    #[error("exponent out of range: {0}")]
    ExponentOutOfRange(String),
    #[error("symbol is singular or non-finite at mode {0:?}")]
    SymbolSingular([i32; 3]),
    #[error("lambda = {re}{im:+}i lies outside the sector |arg| >= {omega}")]
    SectorViolation { re: f64, im: f64, omega: f64 },
    #[error("smoothing gain needs b >= {required}, got {b}")]
    ConditionBViolation { b: f64, required: f64 },
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("angle {0} is out of range")]
    ThetaOutOfRange(f64),
    #[error("field is not divergence free (defect {0:.3e})")]
    NotSolenoidal(f64),
    #[error("Neumann series diverged after {terms} terms (last increment {last:.3e})")]
    NeumannDivergence { terms: usize, last: f64 },
    #[error("Neumann series did not reach tolerance in {terms} terms (relative increment {rel:.3e})")]
    NeumannNotConverged { terms: usize, rel: f64 },
    #[error("contour tail bound {bound:.3e} exceeds tolerance {tol:.3e}")]
    TailBoundViolation { bound: f64, tol: f64 },
    #[error("contour result has imaginary residue {0:.3e}")]
    ImaginaryResidue(f64),
    #[error("time step unstable at t = {t} (norm growth {growth:.3e})")]
    UnstableStep { t: f64, growth: f64 },
    #[error("quadrature did not converge (relative change {0:.3e})")]
    QuadratureNotConverged(f64),
    #[error("Picard iteration is not contracting at iteration {iteration} (factor {factor:.3})")]
    NonContraction { iteration: usize, factor: f64 },
    #[error("Picard iteration diverged at iteration {0}")]
    PicardDivergence(usize),
    #[error("time {0} is outside the sampled path")]
    TimeOutOfRange(f64),
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("norm samples must be positive")]
    NonPositiveNorm,
    #[error("sample window violation: {0}")]
    WindowViolation(String),
    #[error("empty suite selection")]
    EmptySelection,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("snapshot has bad magic bytes")]
    BadMagic,
    #[error("unsupported snapshot version {0}")]
    VersionMismatch(u32),
    #[error("snapshot is truncated")]
    ShortRead,
    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("serialization failed: {0}")]
    Serialization(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Io(_) | BadMagic | VersionMismatch(_) | ShortRead | CorruptSnapshot(_)
            | Serialization(_) => ErrorKind::Io,
            NeumannDivergence { .. }
            | NeumannNotConverged { .. }
            | TailBoundViolation { .. }
            | ImaginaryResidue(_)
            | UnstableStep { .. }
            | QuadratureNotConverged(_)
            | NonContraction { .. }
            | PicardDivergence(_)
            | NonPositiveNorm => ErrorKind::Numerical,
            _ => ErrorKind::Precondition,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.into())
        } else if e.is_data() || e.is_syntax() || e.is_eof() {
            Error::InvalidConfig(e.to_string())
        } else {
            Error::Serialization(e.to_string())
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                other => Error::Serialization(format!("{other:?}")),
            }
        } else {
            Error::Serialization(e.to_string())
        }
    }
}
