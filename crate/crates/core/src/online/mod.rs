//! Digit-serial MSDF (online) operators.
//!
//! Every operator is a synchronous state machine stepped once per cycle: one
//! digit enters on each input port and one digit leaves. For the first
//! `delay()` cycles the output is the digit 0; from then on output digit `i`
//! (1-based) appears at cycle `i + delay()`.

mod adder;
mod delay;
mod multiplier;

pub use adder::OnlineAdder;
pub use delay::HalvingDelay;
pub use multiplier::{OnlineMultiplier, RESIDUAL_FRAC_BITS};

use crate::sdnum::{DigitStream, SignedDigit};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OnlineError {
    #[error("{requested} cycles requested but {required} are needed (n + delta)")]
    InsufficientCycles { required: usize, requested: usize },
    #[error("stage has {expected} input ports, got {got} streams")]
    PortMismatch { expected: usize, got: usize },
    #[error("input streams have different scales {0:?}")]
    ScaleMismatch(Vec<i32>),
    #[error("online delay {delay} below the operator minimum {min}")]
    DelayTooSmall { delay: usize, min: usize },
}

/// Common step contract of the online operators.
pub trait OnlineStage {
    /// Online delay in cycles.
    fn delay(&self) -> usize;

    /// Number of serial input ports.
    fn ports(&self) -> usize;

    /// Cycles stepped since the last reset.
    fn cycle(&self) -> usize;

    /// Advances one cycle. `inputs.len()` must equal `ports()`.
    fn step_ports(&mut self, inputs: &[SignedDigit]) -> SignedDigit;

    /// Clears all per-run state (parallel operands stay loaded).
    fn reset(&mut self);

    /// Scale exponent of the output given the input stream scales.
    fn output_scale(&self, input_scales: &[i32]) -> Result<i32, OnlineError>;
}

/// Batch driver: resets `stage`, feeds `inputs` zero-padded for
/// `total_cycles` cycles and returns the `total_cycles - delay` digits
/// emitted after the warm-up.
pub fn run_to_completion<S: OnlineStage + ?Sized>(
    stage: &mut S,
    inputs: &[&DigitStream],
    total_cycles: usize,
) -> Result<DigitStream, OnlineError> {
    if inputs.len() != stage.ports() {
        return Err(OnlineError::PortMismatch { expected: stage.ports(), got: inputs.len() });
    }
    let n = inputs.iter().map(|s| s.len()).max().unwrap_or(0);
    let required = n + stage.delay();
    if total_cycles < required {
        return Err(OnlineError::InsufficientCycles { required, requested: total_cycles });
    }
    let scales: Vec<i32> = inputs.iter().map(|s| s.scale_exp()).collect();
    let scale = stage.output_scale(&scales)?;

    stage.reset();
    let mut port = vec![SignedDigit::ZERO; inputs.len()];
    let mut out = Vec::with_capacity(total_cycles - stage.delay());
    for c in 0..total_cycles {
        for (slot, s) in port.iter_mut().zip(inputs) {
            *slot = s.digit_or_zero(c);
        }
        let z = stage.step_ports(&port);
        if c >= stage.delay() {
            out.push(z);
        }
    }
    Ok(DigitStream::new(out, scale))
}

/// Fixed-length register chain appended to an operator's output to stretch
/// its online delay.
#[derive(Clone, Debug)]
pub(crate) struct OutputPipe {
    regs: std::collections::VecDeque<SignedDigit>,
    len: usize,
}

impl OutputPipe {
    pub(crate) fn new(len: usize) -> Self {
        Self { regs: std::iter::repeat_n(SignedDigit::ZERO, len).collect(), len }
    }

    pub(crate) fn shift(&mut self, d: SignedDigit) -> SignedDigit {
        if self.len == 0 {
            return d;
        }
        self.regs.push_back(d);
        self.regs.pop_front().unwrap_or(SignedDigit::ZERO)
    }

    pub(crate) fn clear(&mut self) {
        self.regs.iter_mut().for_each(|r| *r = SignedDigit::ZERO);
    }
}

fn uniform_scale(scales: &[i32]) -> Result<i32, OnlineError> {
    match scales.split_first() {
        None => Ok(0),
        Some((first, rest)) if rest.iter().all(|s| s == first) => Ok(*first),
        _ => Err(OnlineError::ScaleMismatch(scales.to_vec())),
    }
}
