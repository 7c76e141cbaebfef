use super::{OnlineError, OnlineStage, OutputPipe};
use crate::sdnum::{Fixed8, SignedDigit, FIXED8_FRAC_BITS};

/// Fractional bits of the residual register.
///
/// The residual only ever holds multiples of `2^-(7 + delta)` (weight bits
/// plus the input pre-shift), so 12 bits leave headroom for the 8-bit operand.
pub const RESIDUAL_FRAC_BITS: u32 = 12;

/// Bits kept when estimating the residual for digit selection.
const ESTIMATE_FRAC_BITS: u32 = 2;

/// Serial-parallel online multiplier: `x` enters MSDF one digit per cycle,
/// the weight `Y` sits on the parallel port.
///
/// Recurrence per cycle `j`:
///
/// ```text
/// v      = 2 W + x_{j+delta} * Y * 2^-delta
/// z_j    = sel(v)      (after the warm-up)
/// W      = v - z_j
/// ```
///
/// `sel` truncates `v` to two fractional bits and compares against `+-1/2`,
/// which keeps `|W| <= 3/4`.
#[derive(Clone, Debug)]
pub struct OnlineMultiplier {
    weight: Fixed8,
    residual: i32,
    cycle: usize,
    pipe: OutputPipe,
    delay: usize,
}

impl OnlineMultiplier {
    pub const DELAY: usize = 2;

    pub fn new(weight: Fixed8) -> Self {
        Self::with_delay(weight, Self::DELAY).expect("default delay is valid")
    }

    /// Multiplier whose output is held back by `delay - 2` extra registers.
    pub fn with_delay(weight: Fixed8, delay: usize) -> Result<Self, OnlineError> {
        if delay < Self::DELAY {
            return Err(OnlineError::DelayTooSmall { delay, min: Self::DELAY });
        }
        Ok(Self { weight, residual: 0, cycle: 0, pipe: OutputPipe::new(delay - Self::DELAY), delay })
    }

    pub fn weight(&self) -> Fixed8 {
        self.weight
    }

    /// Replaces the parallel operand and clears the run state.
    pub fn load_weight(&mut self, weight: Fixed8) {
        self.weight = weight;
        self.reset();
    }

    /// Current residual `W` in units of `2^-RESIDUAL_FRAC_BITS`.
    pub fn residual(&self) -> i32 {
        self.residual
    }

    pub fn step(&mut self, x: SignedDigit) -> SignedDigit {
        self.cycle += 1;
        let shift = RESIDUAL_FRAC_BITS - FIXED8_FRAC_BITS - Self::DELAY as u32;
        let addend = (i32::from(x.value()) * i32::from(self.weight.raw())) << shift;
        let v = 2 * self.residual + addend;
        if self.cycle <= Self::DELAY {
            self.residual = v;
            return self.pipe.shift(SignedDigit::ZERO);
        }
        let z = select(v);
        self.residual = v - (i32::from(z.value()) << RESIDUAL_FRAC_BITS);
        self.pipe.shift(z)
    }
}

fn select(v: i32) -> SignedDigit {
    let estimate = v >> (RESIDUAL_FRAC_BITS - ESTIMATE_FRAC_BITS);
    let half = 1 << (ESTIMATE_FRAC_BITS - 1);
    if estimate >= half {
        SignedDigit::ONE
    } else if estimate < -half {
        SignedDigit::NEG_ONE
    } else {
        SignedDigit::ZERO
    }
}

impl OnlineStage for OnlineMultiplier {
    fn delay(&self) -> usize {
        self.delay
    }

    fn ports(&self) -> usize {
        1
    }

    fn cycle(&self) -> usize {
        self.cycle
    }

    fn step_ports(&mut self, inputs: &[SignedDigit]) -> SignedDigit {
        self.step(inputs[0])
    }

    fn reset(&mut self) {
        self.residual = 0;
        self.cycle = 0;
        self.pipe.clear();
    }

    fn output_scale(&self, input_scales: &[i32]) -> Result<i32, OnlineError> {
        Ok(input_scales.first().copied().unwrap_or(0))
    }
}
