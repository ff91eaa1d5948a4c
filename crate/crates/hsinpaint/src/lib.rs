//! File formats, PNG export and the experiment pipeline around
//! [`hsinpaint_core`].

pub mod error;
pub mod experiment;
pub mod export;
pub mod format;

pub use error::{Error, ErrorClass, FormatError, Result};
pub use hsinpaint_core as core;
