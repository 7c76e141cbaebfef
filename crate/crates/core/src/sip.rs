//! Bit-serial inner-product unit, the LSB-first baseline.
//!
//! Each cycle one bit of every input is ANDed with its (parallel, sign
//! extended) 8-bit weight, the partial products are summed by an adder tree
//! and the sum is shifted into the accumulator. The sign of the result is
//! only known once the last bit has been absorbed.

use crate::record::{ConvRunRecord, Engine};
use crate::relu::TerminationRecord;
use crate::sdnum::{Dyadic, Fixed8, Pixel, FIXED8_FRAC_BITS, PIXEL_FRAC_BITS};

/// Accumulator width for a 5x5 kernel of 8-bit operands.
pub const SIP_ACCUMULATOR_BITS: u32 = 21;

#[derive(Clone, Debug)]
pub struct SipEngine {
    weights: Vec<Fixed8>,
    n_bits: u32,
    signed_inputs: bool,
    acc: i64,
    cycle: u32,
}

impl SipEngine {
    /// `n_bits`-bit serial inputs; with `signed_inputs` the last bit carries
    /// negative weight (two's complement).
    pub fn new(weights: &[Fixed8], n_bits: u32, signed_inputs: bool) -> Self {
        assert!((1..=32).contains(&n_bits), "input precision out of range");
        Self { weights: weights.to_vec(), n_bits, signed_inputs, acc: 0, cycle: 0 }
    }

    /// Engine for unsigned 8-bit pixels.
    pub fn for_pixels(weights: &[Fixed8]) -> Self {
        Self::new(weights, PIXEL_FRAC_BITS, false)
    }

    pub fn taps(&self) -> usize {
        self.weights.len()
    }

    pub fn n_bits(&self) -> u32 {
        self.n_bits
    }

    pub fn cycle(&self) -> u32 {
        self.cycle
    }

    pub fn accumulator(&self) -> i64 {
        self.acc
    }

    /// Accumulator as a value, `acc / 2^(7 + n_bits)`. Only meaningful after
    /// `n_bits` cycles.
    pub fn value(&self) -> Dyadic {
        Dyadic::new(self.acc, FIXED8_FRAC_BITS + self.n_bits)
    }

    /// One cycle with bit `cycle` of every input (LSB first). Returns the
    /// accumulator snapshot.
    pub fn step(&mut self, input_bits: &[bool]) -> i64 {
        assert_eq!(input_bits.len(), self.weights.len(), "one bit per PPG");
        assert!(self.cycle < self.n_bits, "SIP run already complete");
        let sopp: i64 =
            self.weights.iter().zip(input_bits).filter(|(_, &bit)| bit).map(|(w, _)| i64::from(w.raw())).sum();
        let shifted = sopp << self.cycle;
        if self.signed_inputs && self.cycle == self.n_bits - 1 {
            self.acc -= shifted;
        } else {
            self.acc += shifted;
        }
        self.cycle += 1;
        self.acc
    }

    pub fn reset(&mut self) {
        self.acc = 0;
        self.cycle = 0;
    }

    /// Full `n_bits`-cycle run over raw integer inputs (bit patterns taken
    /// from the low `n_bits` bits).
    pub fn run_raw(&mut self, inputs: &[i64]) -> Dyadic {
        self.reset();
        let mut bits = vec![false; inputs.len()];
        for i in 0..self.n_bits {
            for (b, x) in bits.iter_mut().zip(inputs) {
                *b = (x >> i) & 1 == 1;
            }
            self.step(&bits);
        }
        self.value()
    }

    /// Drives a pixel window through all `n_bits` cycles. Never terminates early.
    pub fn convolve(&mut self, window: &[Pixel]) -> ConvRunRecord {
        let raw: Vec<i64> = window.iter().map(|p| i64::from(p.0)).collect();
        let value = self.run_raw(&raw);
        ConvRunRecord {
            engine: Engine::Sip,
            value,
            termination: TerminationRecord::completed(self.n_bits),
            reference: None,
        }
    }
}
