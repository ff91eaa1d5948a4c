//! Hard thresholding `H_K`: keep the `K` largest magnitudes.

use alloc::vec::Vec;

use crate::CoefVector;

/// Keeps the `k` entries of largest magnitude and zeroes the others.
///
/// Among equal magnitudes the lowest indices win, so the result does not
/// depend on the selection algorithm.
pub fn hard_threshold(alpha: &CoefVector, k: usize) -> CoefVector {
    let mut out = alpha.clone();
    let mut scratch = Vec::new();
    hard_threshold_in_place(out.data_mut(), k, &mut scratch);
    out
}

/// In-place variant of [`hard_threshold`]; `scratch` is reused between calls.
pub fn hard_threshold_in_place(data: &mut [f64], k: usize, scratch: &mut Vec<f64>) {
    if k >= data.len() {
        return;
    }
    if k == 0 {
        data.fill(0.0);
        return;
    }
    scratch.clear();
    scratch.extend(data.iter().map(|v| v.abs()));
    let (_, kth, _) = scratch.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    let threshold = *kth;
    let above = data.iter().filter(|v| v.abs() > threshold).count();
    let mut ties = k - above;
    for v in data.iter_mut() {
        let m = v.abs();
        if m > threshold {
            continue;
        }
        if m == threshold && ties > 0 {
            ties -= 1;
            continue;
        }
        *v = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn run(v: &[f64], k: usize) -> Vec<f64> {
        let mut d = v.to_vec();
        hard_threshold_in_place(&mut d, k, &mut Vec::new());
        d
    }

    #[test]
    fn keeps_the_two_largest() {
        assert_eq!(run(&[3.0, -5.0, 2.0, 5.0], 2), vec![0.0, -5.0, 0.0, 5.0]);
    }

    #[test]
    fn ties_prefer_lowest_index() {
        assert_eq!(run(&[1.0, -1.0, 1.0], 1), vec![1.0, 0.0, 0.0]);
        assert_eq!(run(&[1.0, -1.0, 1.0], 2), vec![1.0, -1.0, 0.0]);
    }

    #[test]
    fn extremes() {
        let v = [0.5, -2.0, 0.0, 7.0];
        assert_eq!(run(&v, 4), v.to_vec());
        assert_eq!(run(&v, 9), v.to_vec());
        assert_eq!(run(&v, 0), vec![0.0; 4]);
    }

    #[test]
    fn zero_ties_keep_support_small() {
        let out = run(&[0.0, 3.0, 0.0, 0.0], 3);
        assert_eq!(out, vec![0.0, 3.0, 0.0, 0.0]);
    }
}
