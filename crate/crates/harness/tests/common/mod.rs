//! Fixture paths and a brute-force scalar pipeline used as the test oracle.

#![allow(dead_code)]

use std::path::PathBuf;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub const TOY_KERNEL: [i8; 25] = [
    -6, -6, -6, -6, -6, //
    -6, 4, 12, 4, -6, //
    -6, 12, 32, 12, -6, //
    -6, 4, 12, 4, -6, //
    -6, -6, -6, -6, -6,
];

/// Conv (valid, stride 1) then ReLU then 2x2/2 max pool on a square
/// `side x side` image; returns `(sops, pooled)` in units of `2^-15`.
pub fn scalar_pipeline(side: usize, px: &[u8], k: usize, w: &[i8]) -> (Vec<i64>, Vec<i64>) {
    let o = side + 1 - k;
    let mut sops = vec![0i64; o * o];
    for y in 0..o {
        for x in 0..o {
            let mut s = 0i64;
            for dy in 0..k {
                for dx in 0..k {
                    s += w[dy * k + dx] as i64 * px[(y + dy) * side + x + dx] as i64;
                }
            }
            sops[y * o + x] = s;
        }
    }
    let p = o / 2;
    let mut pooled = vec![0i64; p * p];
    for y in 0..p {
        for x in 0..p {
            let mut m = 0i64;
            for (dy, dx) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                m = m.max(sops[(2 * y + dy) * o + 2 * x + dx]);
            }
            pooled[y * p + x] = m;
        }
    }
    (sops, pooled)
}
