//! Reconstruction core for snapshot hyperspectral mosaic imagers.
//!
//! The acquisition is modelled as a generalized inpainting problem
//! `y = Φx + n`: every focal-plane pixel records one spectral band of a
//! (possibly lower resolution) hyperspectral cube after Lanczos upsampling.
//! The cube is recovered with Pseudo-inverse Iterative Hard Thresholding
//! (PIHT) over a redundant analysis dictionary made of an undecimated
//! wavelet transform in space, a 2-D DCT of the scaling band, and a DCT
//! along the spectral axis.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, image export
//! and the command-line front end live in the `hsinpaint` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cube;
pub mod dct;
pub mod dictionary;
mod error;
pub mod init;
pub mod lanczos;
pub mod layout;
pub mod math;
pub mod metrics;
pub mod piht;
pub mod rng;
pub mod sensing;
pub mod simulate;
pub mod threshold;
pub mod wavelet;

pub use cube::{FpaImage, HyperCube};
pub use dictionary::{AnalysisDictionary, CoefVector, SubbandMap};
pub use error::{Error, Result};
pub use init::{interp3d_init, naive_demosaic, resize_cube};
pub use lanczos::{Resampler, UpsampleSpec};
pub use layout::FilterLayout;
pub use metrics::snr_db;
pub use piht::{k_schedule, piht, step_size, PihtConfig, ReconstructionReport, StepSize};
pub use sensing::SensingOperator;
pub use simulate::{acquire, make_layout, make_phantom, LayoutKind, LayoutSpec, PhantomSpec};
pub use threshold::hard_threshold;
pub use wavelet::{Boundary, FilterBank, Udwt};
