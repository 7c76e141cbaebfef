use std::collections::VecDeque;

use super::{uniform_scale, OnlineError, OnlineStage};
use crate::sdnum::SignedDigit;

/// Register chain for an unpaired operand in a reduction-tree stage.
///
/// Matches an [`OnlineAdder`](super::OnlineAdder) fed with a zero second
/// operand: output value `x / 2`, scale one higher, same online delay.
/// Halving is a one-position digit shift, so the chain is `delay + 1`
/// registers deep.
#[derive(Clone, Debug)]
pub struct HalvingDelay {
    delay: usize,
    cycle: usize,
    regs: VecDeque<SignedDigit>,
}

impl HalvingDelay {
    pub fn new(delay: usize) -> Self {
        Self { delay, cycle: 0, regs: std::iter::repeat_n(SignedDigit::ZERO, delay + 1).collect() }
    }

    pub fn step(&mut self, x: SignedDigit) -> SignedDigit {
        self.cycle += 1;
        self.regs.push_back(x);
        self.regs.pop_front().unwrap_or(SignedDigit::ZERO)
    }
}

impl OnlineStage for HalvingDelay {
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
        self.cycle = 0;
        self.regs.iter_mut().for_each(|r| *r = SignedDigit::ZERO);
    }

    fn output_scale(&self, input_scales: &[i32]) -> Result<i32, OnlineError> {
        Ok(uniform_scale(input_scales)? + 1)
    }
}
