//! Integer oracles shared by the integration tests.
//!
//! Values are carried as `(numerator, exponent)` meaning `numerator / 2^exponent`
//! over `i128`, independent of the crate's own exact-value type.

#![allow(dead_code)]

use dslot_core::sdnum::{DigitStream, Dyadic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Ratio = (i128, u32);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `sum d_i 2^-i * 2^scale` by Horner over the raw digit values.
pub fn digits_ratio(digits: &[i8], scale: i32) -> Ratio {
    let mut acc: i128 = 0;
    for &d in digits {
        acc = acc * 2 + i128::from(d);
    }
    let exp = digits.len() as i32 - scale;
    if exp >= 0 {
        (acc, exp as u32)
    } else {
        (acc << (-exp), 0)
    }
}

pub fn stream_ratio(s: &DigitStream) -> Ratio {
    digits_ratio(&s.values(), s.scale_exp())
}

pub fn ratio_eq(a: Ratio, b: Ratio) -> bool {
    let e = a.1.max(b.1);
    (a.0 << (e - a.1)) == (b.0 << (e - b.1))
}

pub fn ratio_add(a: Ratio, b: Ratio) -> Ratio {
    let e = a.1.max(b.1);
    ((a.0 << (e - a.1)) + (b.0 << (e - b.1)), e)
}

pub fn ratio_to_dyadic(r: Ratio) -> Dyadic {
    Dyadic::new(r.0, r.1)
}

pub fn random_digits(rng: &mut impl Rng, len: usize) -> Vec<i8> {
    (0..len).map(|_| rng.random_range(-1..=1)).collect()
}

/// Exact window SOP over raw integers: `sum w_raw * x_raw / 2^15`.
pub fn window_sop(weights: &[i8], pixels: &[u8]) -> Ratio {
    let n: i128 = weights.iter().zip(pixels).map(|(&w, &x)| i128::from(w) * i128::from(x)).sum();
    (n, 15)
}

/// All digit vectors of `len` digits in `{-1,0,1}`.
pub fn all_digit_vectors(len: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..3u32.pow(len as u32)).map(move |mut code| {
        let mut v = vec![0i8; len];
        for d in v.iter_mut() {
            *d = (code % 3) as i8 - 1;
            code /= 3;
        }
        v
    })
}
