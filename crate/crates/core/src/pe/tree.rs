use crate::online::{HalvingDelay, OnlineAdder, OnlineError, OnlineStage};
use crate::sdnum::SignedDigit;

use super::config::ceil_log2;

#[derive(Clone, Debug)]
enum Node {
    Add(OnlineAdder),
    Pass(HalvingDelay),
}

impl Node {
    fn reset(&mut self) {
        match self {
            Node::Add(a) => a.reset(),
            Node::Pass(p) => p.reset(),
        }
    }

    /// True on the cycle this node emits its first post-warm-up digit.
    fn first_valid(&self) -> bool {
        match self {
            Node::Add(a) => a.cycle() == a.delay() + 1,
            Node::Pass(p) => p.cycle() == p.delay() + 1,
        }
    }
}

/// Balanced binary tree of online adders.
///
/// Level `s` (0-based) starts stepping once level `s - 1` emits its first
/// digit, `s * delta` cycles after the leaves; an odd stream at any level
/// goes through a [`HalvingDelay`] so every stream keeps the same scale.
#[derive(Clone, Debug)]
pub struct ReductionTree {
    fan_in: usize,
    delta: usize,
    levels: Vec<Vec<Node>>,
    cycle: usize,
    first_output: Vec<Option<usize>>,
    buf: Vec<SignedDigit>,
    next: Vec<SignedDigit>,
}

impl ReductionTree {
    pub fn new(fan_in: usize, delta: usize) -> Result<Self, OnlineError> {
        assert!(fan_in >= 1, "reduction tree needs at least one input");
        let mut levels = Vec::new();
        let mut width = fan_in;
        while width > 1 {
            let mut level = Vec::with_capacity(width.div_ceil(2));
            for _ in 0..width / 2 {
                level.push(Node::Add(OnlineAdder::with_delay(delta)?));
            }
            if width % 2 == 1 {
                level.push(Node::Pass(HalvingDelay::new(delta)));
            }
            width = level.len();
            levels.push(level);
        }
        debug_assert_eq!(levels.len(), ceil_log2(fan_in));
        let stages = levels.len();
        Ok(Self {
            fan_in,
            delta,
            levels,
            cycle: 0,
            first_output: vec![None; stages],
            buf: Vec::with_capacity(fan_in),
            next: Vec::with_capacity(fan_in),
        })
    }

    pub fn fan_in(&self) -> usize {
        self.fan_in
    }

    pub fn stages(&self) -> usize {
        self.levels.len()
    }

    /// Cycles from the first leaf digit to the first root digit.
    pub fn latency(&self) -> usize {
        self.stages() * self.delta
    }

    /// Tree cycle at which level `s` emitted its first valid digit, if it has.
    pub fn first_output_cycle(&self, level: usize) -> Option<usize> {
        self.first_output.get(level).copied().flatten()
    }

    /// One cycle: leaves in, root digit out.
    pub fn step(&mut self, leaves: &[SignedDigit]) -> SignedDigit {
        assert_eq!(leaves.len(), self.fan_in, "leaf count");
        self.cycle += 1;
        self.buf.clear();
        self.buf.extend_from_slice(leaves);
        for (s, level) in self.levels.iter_mut().enumerate() {
            if self.cycle <= s * self.delta {
                return SignedDigit::ZERO;
            }
            self.next.clear();
            for (i, node) in level.iter_mut().enumerate() {
                let z = match node {
                    Node::Add(a) => a.step(self.buf[2 * i], self.buf[2 * i + 1]),
                    Node::Pass(p) => p.step(self.buf[2 * i]),
                };
                self.next.push(z);
            }
            if self.first_output[s].is_none() && level[0].first_valid() {
                self.first_output[s] = Some(self.cycle);
            }
            std::mem::swap(&mut self.buf, &mut self.next);
        }
        self.buf[0]
    }

    pub fn reset(&mut self) {
        self.cycle = 0;
        self.first_output.iter_mut().for_each(|f| *f = None);
        self.levels.iter_mut().flatten().for_each(Node::reset);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdnum::{DigitStream, Dyadic};

    fn run_tree(streams: &[DigitStream], cycles: usize) -> DigitStream {
        let mut tree = ReductionTree::new(streams.len(), 2).unwrap();
        let mut out = Vec::new();
        for c in 0..cycles {
            let leaves: Vec<_> = streams.iter().map(|s| s.digit_or_zero(c)).collect();
            let z = tree.step(&leaves);
            if c >= tree.latency() {
                out.push(z);
            }
        }
        DigitStream::new(out, tree.stages() as i32)
    }

    #[test]
    fn stage_counts() {
        for (n, s) in [(1, 0), (2, 1), (3, 2), (4, 2), (9, 4), (25, 5)] {
            assert_eq!(ReductionTree::new(n, 2).unwrap().stages(), s);
        }
    }

    #[test]
    fn single_leaf_passes_through() {
        let x = DigitStream::from_values(&[1, -1, 0, 1], 0).unwrap();
        let out = run_tree(std::slice::from_ref(&x), 4);
        assert_eq!(out.digits(), x.digits());
    }

    #[test]
    fn three_leaves_sum() {
        let streams = [
            DigitStream::from_values(&[1, 1, 0], 0).unwrap(),
            DigitStream::from_values(&[-1, 0, 1], 0).unwrap(),
            DigitStream::from_values(&[0, 1, 1], 0).unwrap(),
        ];
        let out = run_tree(&streams, 4 + 3 + 2);
        let expect: Dyadic = streams.iter().map(|s| s.value()).sum();
        assert_eq!(out.value(), expect);
    }

    #[test]
    fn levels_start_delta_apart() {
        let mut tree = ReductionTree::new(25, 2).unwrap();
        for _ in 0..20 {
            tree.step(&[SignedDigit::ONE; 25]);
        }
        for s in 0..tree.stages() {
            assert_eq!(tree.first_output_cycle(s), Some(2 * (s + 1) + 1));
        }
    }
}
