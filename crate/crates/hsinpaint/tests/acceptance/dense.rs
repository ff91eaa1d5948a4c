//! Dense matrix oracles assembled straight from the operator definitions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use hsinpaint::core::wavelet::{Filter, FilterBank};
use hsinpaint::core::FilterLayout;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] += v;
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows);
        let mut out = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a != 0.0 {
                    for j in 0..o.cols {
                        out.data[i * o.cols + j] += a * o.at(k, j);
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.at(i, j);
            }
        }
        out
    }

    pub fn kron(&self, o: &Mat) -> Mat {
        let mut out = Mat::zeros(self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                for p in 0..o.rows {
                    for q in 0..o.cols {
                        out.data[(i * o.rows + p) * out.cols + j * o.cols + q] = a * o.at(p, q);
                    }
                }
            }
        }
        out
    }

    /// Stacks blocks vertically.
    pub fn vstack(blocks: &[Mat]) -> Mat {
        let cols = blocks[0].cols;
        let mut data = Vec::new();
        for b in blocks {
            assert_eq!(b.cols, cols);
            data.extend_from_slice(&b.data);
        }
        Mat { rows: data.len() / cols, cols, data }
    }

    /// Solves `self · X = rhs` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, rhs: &Mat) -> Mat {
        let n = self.rows;
        assert_eq!(n, self.cols);
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let pivot = (col..n).max_by(|&x, &y| a.at(x, col).abs().total_cmp(&a.at(y, col).abs())).unwrap();
            for j in 0..n {
                a.data.swap(col * n + j, pivot * n + j);
            }
            for j in 0..b.cols {
                b.data.swap(col * b.cols + j, pivot * b.cols + j);
            }
            let d = a.at(col, col);
            for r in 0..n {
                if r != col {
                    let factor = a.at(r, col) / d;
                    if factor != 0.0 {
                        for j in 0..n {
                            a.data[r * n + j] -= factor * a.at(col, j);
                        }
                        for j in 0..b.cols {
                            b.data[r * b.cols + j] -= factor * b.at(col, j);
                        }
                    }
                }
            }
        }
        for r in 0..n {
            let d = a.at(r, r);
            for j in 0..b.cols {
                b.data[r * b.cols + j] /= d;
            }
        }
        b
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Reflects an integer index into `0..n` about the half-sample points.
fn reflect(mut t: isize, n: usize) -> usize {
    let n = n as isize;
    loop {
        if t < 0 {
            t = -t - 1;
        } else if t >= n {
            t = 2 * n - 1 - t;
        } else {
            return t as usize;
        }
    }
}

/// 1-D Lanczos-3 upsampling matrix, `f·n × n`, rows normalized to sum 1.
pub fn lanczos_1d(n: usize, f: usize) -> Mat {
    let mut m = Mat::zeros(n * f, n);
    for k in 0..n * f {
        let s = (k as f64 + 0.5) / f as f64 - 0.5;
        let mut row = vec![0.0; n];
        for t in (s.floor() as isize - 4)..=(s.floor() as isize + 4) {
            let x = s - t as f64;
            if x.abs() < 3.0 {
                row[reflect(t, n)] += sinc(x) * sinc(x / 3.0);
            }
        }
        let total: f64 = row.iter().sum();
        for (i, w) in row.into_iter().enumerate() {
            m.add(k, i, w / total);
        }
    }
    m
}

/// `Φ` for an `n×n×L` cube seen through `layout` at factor `f`.
pub fn sensing(layout: &FilterLayout, n: usize, f: usize) -> Mat {
    let up = lanczos_1d(n, f).kron(&lanczos_1d(n, f));
    let m = n * f;
    let bands = layout.bands();
    let mut phi = Mat::zeros(m * m, n * n * bands);
    for p in 0..m * m {
        let band = layout.band_at(p / m, p % m);
        for q in 0..n * n {
            phi.add(p, band * n * n + q, up.at(p, q));
        }
    }
    phi
}

/// Orthonormal DCT-II matrix.
pub fn dct(n: usize) -> Mat {
    let mut m = Mat::zeros(n, n);
    for k in 0..n {
        let s = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
        for i in 0..n {
            m.add(k, i, s * (PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos());
        }
    }
    m
}

/// Periodic correlation with the filter dilated by `d`, scaled by `1/√2`.
fn circulant(filter: &Filter, n: usize, d: usize) -> Mat {
    let mut m = Mat::zeros(n, n);
    for row in 0..n {
        for (k, &w) in filter.taps.iter().enumerate() {
            let col = (row as isize + d as isize * (k as isize - filter.origin as isize)).rem_euclid(n as isize);
            m.add(row, col as usize, FRAC_1_SQRT_2 * w);
        }
    }
    m
}

/// `A` for an `r×c×L` cube: spectral DCT, 3-level undecimated wavelet
/// transform of every band, 2-D DCT of each scaling subband.
pub fn analysis(r: usize, c: usize, bands: usize) -> Mat {
    let bank = FilterBank::daubechies8();
    let n = r * c;
    let mut approx = Mat::identity(n);
    let mut details = Vec::new();
    for level in 0..3 {
        let d = 1 << level;
        let (hr, gr) = (circulant(&bank.analysis_low, r, d), circulant(&bank.analysis_high, r, d));
        let (hc, gc) = (circulant(&bank.analysis_low, c, d), circulant(&bank.analysis_high, c, d));
        details.push(hr.kron(&gc).mul(&approx));
        details.push(gr.kron(&hc).mul(&approx));
        details.push(gr.kron(&gc).mul(&approx));
        approx = hr.kron(&hc).mul(&approx);
    }
    let scaling = dct(r).kron(&dct(c)).mul(&approx);
    let mut blocks = vec![scaling];
    blocks.extend(details);
    let plane = Mat::vstack(&blocks);
    Mat::identity(bands).kron(&plane).mul(&dct(bands).kron(&Mat::identity(n)))
}

/// Moore–Penrose pseudo-inverse of a full-column-rank matrix.
pub fn pinv(a: &Mat) -> Mat {
    let at = a.transpose();
    at.mul(a).solve(&at)
}
