use std::path::PathBuf;

use hsinpaint_core::Error as CoreError;

/// Problems with the on-disk `.hsc` and `.msk` containers.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("file ends inside the header length prefix")]
    MissingPrefix,
    #[error("header declares {declared} bytes but only {available} follow")]
    TruncatedHeader { declared: usize, available: usize },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported scalar format `{0}`")]
    UnsupportedFormat(String),
    #[error("dimensions {0:?} overflow the addressable size")]
    Overflow(Vec<usize>),
    #[error("payload needs {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("{extra} unexpected bytes after the payload")]
    TrailingBytes { extra: usize },
    #[error("band index {index} at pixel {pixel} is outside 1..={bands}")]
    BandIndex { index: u16, pixel: usize, bands: usize },
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("png export failed: {0}")]
    Image(#[from] image::ImageError),
    #[error("{failed} of {total} sweep rows failed")]
    SweepFailed { failed: usize, total: usize, numerical: bool },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, mapped onto process exit codes by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numerical,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Usage => 2,
            ErrorClass::Data => 3,
            ErrorClass::Numerical => 4,
        }
    }
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) => ErrorClass::Usage,
            Error::Core(e) => core_class(e),
            Error::SweepFailed { numerical: true, .. } => ErrorClass::Numerical,
            _ => ErrorClass::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub(crate) fn core_class(e: &CoreError) -> ErrorClass {
    match e {
        CoreError::NonFinite { .. } | CoreError::DegenerateCoefficients => ErrorClass::Numerical,
        CoreError::InvalidConfig(_) | CoreError::UnsupportedFactor(_) => ErrorClass::Usage,
        _ => ErrorClass::Data,
    }
}
