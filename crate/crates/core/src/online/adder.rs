use super::{uniform_scale, OnlineError, OnlineStage, OutputPipe};
use crate::sdnum::SignedDigit;

/// Radix-2 signed-digit online adder.
///
/// Emits the stream of `(a + b) / 2`: the sum's integer-position digit becomes
/// the first output digit, so the output scale is one above the inputs'.
///
/// Internally each position sum `p_j = a_j + b_j` is split into a transfer
/// `t_{j-1}` and interim digit `w_j` with `p_j = 2 t_{j-1} + w_j`; the split
/// looks at the sign of `p_{j+1}` so that `z_j = w_j + t_j` stays in
/// `{-1, 0, 1}`. Position `j` is therefore settled once `p_{j+2}` has arrived.
#[derive(Clone, Debug)]
pub struct OnlineAdder {
    delay: usize,
    cycle: usize,
    // p_{c-1}
    pending_sum: i8,
    // w of the oldest unsettled position
    pending_interim: i8,
    pipe: OutputPipe,
}

/// Cycles between an input digit and the settling of the position it
/// influences, counted on the halved output stream.
const NATURAL_DELAY: usize = 1;

impl OnlineAdder {
    pub const DELAY: usize = 2;

    pub fn new() -> Self {
        Self::with_delay(Self::DELAY).expect("default delay is valid")
    }

    /// Adder with an explicit online delay; extra cycles beyond the minimum
    /// are output registers.
    pub fn with_delay(delay: usize) -> Result<Self, OnlineError> {
        if delay < NATURAL_DELAY {
            return Err(OnlineError::DelayTooSmall { delay, min: NATURAL_DELAY });
        }
        Ok(Self { delay, cycle: 0, pending_sum: 0, pending_interim: 0, pipe: OutputPipe::new(delay - NATURAL_DELAY) })
    }

    /// One cycle: consumes `a_j`, `b_j` and returns the next output digit.
    pub fn step(&mut self, a: SignedDigit, b: SignedDigit) -> SignedDigit {
        self.cycle += 1;
        let p = a.value() + b.value();
        let settled = if self.cycle >= 2 {
            let (transfer, interim) = split(self.pending_sum, p);
            let z = self.pending_interim + transfer;
            self.pending_interim = interim;
            SignedDigit::from_value(z).expect("transfer rule keeps digits in range")
        } else {
            SignedDigit::ZERO
        };
        self.pending_sum = p;
        self.pipe.shift(settled)
    }
}

impl Default for OnlineAdder {
    fn default() -> Self {
        Self::new()
    }
}

/// Splits a position sum `p` into `(transfer, interim)` given the next
/// position's sum. A non-negative lookahead can only produce a transfer in
/// `{0, 1}`, so the interim digit is chosen in `{-1, 0}`; otherwise in `{0, 1}`.
fn split(p: i8, lookahead: i8) -> (i8, i8) {
    match (p, lookahead >= 0) {
        (2, _) => (1, 0),
        (-2, _) => (-1, 0),
        (1, true) => (1, -1),
        (1, false) => (0, 1),
        (-1, true) => (0, -1),
        (-1, false) => (-1, 1),
        _ => (0, 0),
    }
}

impl OnlineStage for OnlineAdder {
    fn delay(&self) -> usize {
        self.delay
    }

    fn ports(&self) -> usize {
        2
    }

    fn cycle(&self) -> usize {
        self.cycle
    }

    fn step_ports(&mut self, inputs: &[SignedDigit]) -> SignedDigit {
        self.step(inputs[0], inputs[1])
    }

    fn reset(&mut self) {
        self.cycle = 0;
        self.pending_sum = 0;
        self.pending_interim = 0;
        self.pipe.clear();
    }

    fn output_scale(&self, input_scales: &[i32]) -> Result<i32, OnlineError> {
        Ok(uniform_scale(input_scales)? + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::online::run_to_completion;
    use crate::sdnum::{DigitStream, Dyadic};

    fn s(v: &[i8]) -> DigitStream {
        DigitStream::from_values(v, 0).unwrap()
    }

    #[test]
    fn split_covers_every_case() {
        for p in -2..=2i8 {
            for look in -2..=2i8 {
                let (t, w) = split(p, look);
                assert_eq!(2 * t + w, p);
                if look >= 0 {
                    assert!((-1..=0).contains(&w));
                } else {
                    assert!((0..=1).contains(&w));
                }
            }
        }
    }

    #[test]
    fn zero_inputs() {
        let out = run_to_completion(&mut OnlineAdder::new(), &[&s(&[]), &s(&[])], 10).unwrap();
        assert_eq!(out.len(), 8);
        assert!(out.value().is_zero());
    }

    #[test]
    fn half_plus_zero() {
        let out = run_to_completion(&mut OnlineAdder::new(), &[&s(&[1]), &s(&[0])], 4).unwrap();
        assert_eq!(out.value(), Dyadic::new(1, 1));
        assert_eq!(out.raw_value(), Dyadic::new(1, 2));
        assert_eq!(out.scale_exp(), 1);
    }

    #[test]
    fn warm_up_is_zero() {
        let mut add = OnlineAdder::new();
        assert_eq!(add.step(SignedDigit::ONE, SignedDigit::ONE), SignedDigit::ZERO);
        assert_eq!(add.step(SignedDigit::ONE, SignedDigit::ONE), SignedDigit::ZERO);
    }

    #[test]
    fn mismatched_scales_rejected() {
        let a = DigitStream::from_values(&[1], 0).unwrap();
        let b = DigitStream::from_values(&[1], 1).unwrap();
        assert!(matches!(run_to_completion(&mut OnlineAdder::new(), &[&a, &b], 5), Err(OnlineError::ScaleMismatch(_))));
    }

    #[test]
    fn longer_delay_shifts_output() {
        let a = s(&[1, -1, 1]);
        let b = s(&[1, 1, 0]);
        let base = run_to_completion(&mut OnlineAdder::new(), &[&a, &b], 6).unwrap();
        let slow = run_to_completion(&mut OnlineAdder::with_delay(4).unwrap(), &[&a, &b], 8).unwrap();
        assert_eq!(base.digits(), slow.digits());
        assert!(OnlineAdder::with_delay(0).is_err());
    }
}
