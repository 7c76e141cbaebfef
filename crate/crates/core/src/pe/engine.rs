use crate::online::{OnlineError, OnlineMultiplier, OnlineStage};
use crate::sdnum::{Fixed8, SignedDigit};

use super::tree::ReductionTree;

/// `k x k` online multipliers feeding one reduction tree.
///
/// Weights are loaded once and stay on the multipliers' parallel ports; each
/// new window only restreams the serial inputs.
#[derive(Clone, Debug)]
pub struct ProcessingEngine {
    mults: Vec<OnlineMultiplier>,
    tree: ReductionTree,
    delta_mult: usize,
    cycle: usize,
    products: Vec<SignedDigit>,
}

impl ProcessingEngine {
    pub fn new(weights: &[Fixed8], delta_mult: usize, delta_add: usize) -> Result<Self, OnlineError> {
        let mults =
            weights.iter().map(|&w| OnlineMultiplier::with_delay(w, delta_mult)).collect::<Result<Vec<_>, _>>()?;
        let tree = ReductionTree::new(weights.len(), delta_add)?;
        Ok(Self { products: vec![SignedDigit::ZERO; mults.len()], mults, tree, delta_mult, cycle: 0 })
    }

    pub fn taps(&self) -> usize {
        self.mults.len()
    }

    pub fn weights(&self) -> impl Iterator<Item = Fixed8> + '_ {
        self.mults.iter().map(|m| m.weight())
    }

    /// Cycles before the first SOP digit.
    pub fn latency(&self) -> usize {
        self.delta_mult + self.tree.latency()
    }

    pub fn tree(&self) -> &ReductionTree {
        &self.tree
    }

    /// One cycle: the next digit of every window input in, the next SOP digit out.
    pub fn step(&mut self, window_digits: &[SignedDigit]) -> SignedDigit {
        assert_eq!(window_digits.len(), self.mults.len(), "one digit per multiplier");
        self.cycle += 1;
        for ((m, &x), p) in self.mults.iter_mut().zip(window_digits).zip(self.products.iter_mut()) {
            *p = m.step(x);
        }
        if self.cycle <= self.delta_mult {
            SignedDigit::ZERO
        } else {
            self.tree.step(&self.products)
        }
    }

    pub fn reset(&mut self) {
        self.cycle = 0;
        self.mults.iter_mut().for_each(|m| m.reset());
        self.tree.reset();
    }
}
