//! Scalar integer convolution, ReLU and 2x2 max pooling.
//!
//! Values are raw integers in units of `2^-15` (raw weight times raw pixel).

use crate::dataset::Image;

/// Valid (no padding, stride 1) convolution of `image` with one row-major
/// `k x k` raw kernel. Returns `(rows, cols, sums)`.
pub fn conv_raw(image: &Image, k: usize, weights: &[i8]) -> (usize, usize, Vec<i64>) {
    assert_eq!(weights.len(), k * k);
    if image.rows < k || image.cols < k {
        return (0, 0, Vec::new());
    }
    let (rows, cols) = (image.rows - k + 1, image.cols - k + 1);
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let mut acc = 0i64;
            for i in 0..k {
                for j in 0..k {
                    acc += i64::from(weights[i * k + j]) * i64::from(image.get(r + i, c + j));
                }
            }
            out.push(acc);
        }
    }
    (rows, cols, out)
}

/// ReLU followed by 2x2 max pooling with stride 2; a trailing odd row or
/// column is dropped.
pub fn relu_maxpool(rows: usize, cols: usize, sums: &[i64]) -> Vec<i64> {
    let mut out = Vec::with_capacity((rows / 2) * (cols / 2));
    for r in (0..rows / 2 * 2).step_by(2) {
        for c in (0..cols / 2 * 2).step_by(2) {
            let quad =
                [sums[r * cols + c], sums[r * cols + c + 1], sums[(r + 1) * cols + c], sums[(r + 1) * cols + c + 1]];
            out.push(quad.into_iter().map(|v| v.max(0)).max().unwrap_or(0));
        }
    }
    out
}
