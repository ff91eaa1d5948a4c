use crate::math::{distance, norm};
use crate::{Error, HyperCube, Result};

/// Reconstruction SNR in decibels, `20·log10(‖x‖ / ‖x − x̂‖)`.
///
/// Returns `f64::INFINITY` when the estimate equals the reference exactly.
pub fn snr_db(reference: &HyperCube, estimate: &HyperCube) -> Result<f64> {
    estimate.expect_dims("snr_db", reference.dims())?;
    snr_db_slices(reference.data(), estimate.data())
}

/// Same as [`snr_db`] on raw slices of equal length.
pub fn snr_db_slices(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(Error::DimensionMismatch {
            context: "snr_db",
            expected: (reference.len(), 1, 1),
            found: (estimate.len(), 1, 1),
        });
    }
    let signal = norm(reference);
    if signal == 0.0 {
        return Err(Error::ZeroReference);
    }
    let err = distance(reference, estimate);
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * libm::log10(signal / err))
}
