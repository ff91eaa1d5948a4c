//! Non-iterative estimators: per-band nearest-neighbour demosaicing and the
//! 3-D interpolation used to initialize PIHT.

use alloc::vec;
use alloc::vec::Vec;

use crate::lanczos::{UpsampleSpec, Upsampler};
use crate::{Error, FilterLayout, FpaImage, HyperCube, Result};

/// Nearest pixel owned by `band` (squared Euclidean distance, then lowest
/// row, then lowest column) for every pixel of the sensor.
fn nearest_owner(layout: &FilterLayout, band: usize) -> Result<Vec<usize>> {
    let (rows, cols) = layout.dims();
    let owned: Vec<bool> = layout.assignment().iter().map(|&b| b as usize == band).collect();
    if !owned.iter().any(|&o| o) {
        return Err(Error::EmptyBand(band));
    }
    let max_r = rows.max(cols) as isize;
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows as isize {
        for j in 0..cols as isize {
            if owned[(i * cols as isize + j) as usize] {
                out.push((i * cols as isize + j) as usize);
                continue;
            }
            let mut best: Option<(isize, isize, isize)> = None;
            let consider = |best: &mut Option<(isize, isize, isize)>, di: isize, dj: isize| {
                let (a, b) = (i + di, j + dj);
                if a < 0 || b < 0 || a >= rows as isize || b >= cols as isize {
                    return;
                }
                if !owned[(a * cols as isize + b) as usize] {
                    return;
                }
                let cand = (di * di + dj * dj, a, b);
                if best.is_none_or(|cur| cand < cur) {
                    *best = Some(cand);
                }
            };
            for r in 1..=max_r {
                for d in -r..=r {
                    consider(&mut best, -r, d);
                    consider(&mut best, r, d);
                }
                for d in (-r + 1)..r {
                    consider(&mut best, d, -r);
                    consider(&mut best, d, r);
                }
                if let Some((d2, _, _)) = best {
                    if d2 < (r + 1) * (r + 1) {
                        break;
                    }
                }
            }
            let (_, a, b) = best.expect("band owns at least one pixel");
            out.push((a * cols as isize + b) as usize);
        }
    }
    Ok(out)
}

/// Naive demosaicing: every band is filled by nearest-neighbour
/// interpolation of its own pixels, at sensor resolution.
pub fn naive_demosaic(y: &FpaImage, layout: &FilterLayout) -> Result<HyperCube> {
    y.expect_dims("naive_demosaic", layout.dims())?;
    let (rows, cols) = layout.dims();
    let mut cube = HyperCube::zeros(rows, cols, layout.bands())?;
    for band in 0..layout.bands() {
        let owner = nearest_owner(layout, band)?;
        for (v, &o) in cube.band_mut(band).iter_mut().zip(&owner) {
            *v = y.data()[o];
        }
    }
    Ok(cube)
}

/// One `[1/4, 1/2, 1/4]` pass along an axis of length `len` with stride
/// `stride`, half-sample mirrored at the ends.
fn smooth_axis(src: &[f64], dst: &mut [f64], len: usize, stride: usize, lines: impl Iterator<Item = usize>) {
    for start in lines {
        for k in 0..len {
            let prev = if k == 0 { 0 } else { k - 1 };
            let next = if k + 1 == len { k } else { k + 1 };
            dst[start + k * stride] =
                0.25 * src[start + prev * stride] + 0.5 * src[start + k * stride] + 0.25 * src[start + next * stride];
        }
    }
}

/// Separable 3-D triangle smoothing of a cube.
fn smooth3(cube: &HyperCube) -> HyperCube {
    let (rows, cols, bands) = cube.dims();
    let plane = rows * cols;
    let mut a = cube.data().to_vec();
    let mut b = vec![0.0; a.len()];
    // columns (contiguous)
    smooth_axis(&a, &mut b, cols, 1, (0..bands * rows).map(|r| r * cols));
    // rows
    smooth_axis(&b, &mut a, rows, cols, (0..bands).flat_map(|l| (0..cols).map(move |j| l * plane + j)));
    // spectral
    smooth_axis(&a, &mut b, bands, plane, 0..plane);
    HyperCube::from_vec(rows, cols, bands, b).expect("dims preserved")
}

/// Initial estimate for PIHT at target dims `(n_I, n_J)`.
///
/// Three deterministic stages: nearest-known-pixel fill of every band at
/// sensor resolution, one separable `[1/4, 1/2, 1/4]` smoothing pass along
/// rows, columns and bands with the measured samples re-imposed in their
/// own band, and a per-band resize to the target grid with the
/// row-normalized transpose of the Lanczos upsampler.
pub fn interp3d_init(y: &FpaImage, layout: &FilterLayout, target: (usize, usize)) -> Result<HyperCube> {
    let spec = UpsampleSpec::between(target, layout.dims())?;
    let filled = naive_demosaic(y, layout)?;
    let mut smooth = smooth3(&filled);
    let plane = layout.rows() * layout.cols();
    for (p, &band) in layout.assignment().iter().enumerate() {
        smooth.data_mut()[band as usize * plane + p] = y.data()[p];
    }
    if spec.factor == 1 {
        return Ok(smooth);
    }
    resize_cube(&smooth, target)
}

/// Per-band resize of a sensor-resolution cube down to `target` with the
/// row-normalized transpose of the Lanczos upsampler. Used to compare
/// [`naive_demosaic`] output against a cube at target resolution.
pub fn resize_cube(cube: &HyperCube, target: (usize, usize)) -> Result<HyperCube> {
    let spec = UpsampleSpec::between(target, (cube.rows(), cube.cols()))?;
    if spec.factor == 1 {
        return Ok(cube.clone());
    }
    let up = Upsampler::new(spec);
    let mut out = HyperCube::zeros(target.0, target.1, cube.bands())?;
    for band in 0..cube.bands() {
        up.resize_down(cube.band(band), out.band_mut(band));
    }
    Ok(out)
}
