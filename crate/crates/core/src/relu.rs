//! Digit-serial negative detection for the ReLU stage.
//!
//! The monitor keeps the positive and negative bits of the output digits in
//! two registers, appending one bit per cycle. Since both registers hold the
//! same number of bits, `zp < zm` as unsigned integers holds exactly when
//! the partial value `(zp - zm) * 2^-j` is negative. A redundant tail can
//! never exceed `2^-j` in magnitude, so a negative prefix means a negative
//! result and the rest of the computation can be dropped.

use crate::sdnum::{Dyadic, SignedDigit};

/// Width of the bit-concatenation registers.
pub const MONITOR_REGISTER_BITS: u32 = u64::BITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Continue,
    Terminate,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignMonitor {
    zp: u64,
    zm: u64,
    steps: u32,
    fired_at: Option<u32>,
}

impl SignMonitor {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `z_j`. Once fired the monitor is frozen and keeps answering
    /// `Terminate`.
    pub fn step(&mut self, z: SignedDigit) -> Decision {
        if self.fired_at.is_some() {
            return Decision::Terminate;
        }
        assert!(self.steps < MONITOR_REGISTER_BITS, "sign monitor registers full");
        self.steps += 1;
        self.zp = (self.zp << 1) | u64::from(z.plus());
        self.zm = (self.zm << 1) | u64::from(z.minus());
        if self.zp < self.zm {
            self.fired_at = Some(self.steps);
            Decision::Terminate
        } else {
            Decision::Continue
        }
    }

    pub fn fired_at(&self) -> Option<u32> {
        self.fired_at
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    /// `(zp, zm)` register contents.
    pub fn registers(&self) -> (u64, u64) {
        (self.zp, self.zm)
    }

    /// Value of the digits seen so far, `(zp - zm) * 2^-steps`.
    pub fn partial_value(&self) -> Dyadic {
        Dyadic::new(i128::from(self.zp) - i128::from(self.zm), self.steps)
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }

    pub fn finalize(&self, total_cycles: u32) -> TerminationRecord {
        match self.fired_at {
            Some(cycle) => TerminationRecord { terminated: true, cycle, total_cycles },
            None => TerminationRecord { terminated: false, cycle: total_cycles, total_cycles },
        }
    }
}

/// Outcome of one SOP's run: where it stopped and how much was skipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TerminationRecord {
    pub terminated: bool,
    /// Last cycle executed.
    pub cycle: u32,
    pub total_cycles: u32,
}

impl TerminationRecord {
    pub fn completed(total_cycles: u32) -> Self {
        Self { terminated: false, cycle: total_cycles, total_cycles }
    }

    pub fn cycles_saved(&self) -> u32 {
        if self.terminated {
            self.total_cycles.saturating_sub(self.cycle)
        } else {
            0
        }
    }

    /// `cycles_saved / total_cycles` (0 for an empty run).
    pub fn saved_fraction(&self) -> f64 {
        if self.total_cycles == 0 {
            0.0
        } else {
            f64::from(self.cycles_saved()) / f64::from(self.total_cycles)
        }
    }
}
