use alloc::string::String;

/// Errors raised by the reconstruction core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected:?}, found {found:?}")]
    DimensionMismatch { context: &'static str, expected: (usize, usize, usize), found: (usize, usize, usize) },
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("reference has zero norm")]
    ZeroReference,
    #[error("band index {band} out of range for {bands} bands")]
    BandOutOfRange { band: usize, bands: usize },
    #[error("unsupported upscale factor {0} (expected 1, 2 or 4)")]
    UnsupportedFactor(usize),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("band {0} owns no sensor pixel")]
    EmptyBand(usize),
    #[error("invalid filter bank: {0}")]
    InvalidFilter(String),
    #[error("coefficient vector has no nonzero entry")]
    DegenerateCoefficients,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite value in iterate at iteration {iteration}")]
    NonFinite { iteration: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
