use crate::relu::MONITOR_REGISTER_BITS;
use crate::sdnum::FIXED8_FRAC_BITS;

use super::PeError;

/// `ceil(log2(n))` for `n >= 1`.
pub fn ceil_log2(n: usize) -> usize {
    assert!(n >= 1, "ceil_log2 of zero");
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Shape and precision of one processing block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeConfig {
    /// Kernel side.
    pub k: usize,
    /// Input feature maps handled by one block.
    pub n_maps: usize,
    /// Serial operand digits.
    pub n_in: usize,
    pub delta_mult: usize,
    pub delta_add: usize,
    /// Multiplier output precision in digits.
    pub p_out_mult: usize,
}

impl Default for PeConfig {
    /// 5x5 kernel, one map, 8-bit operands.
    fn default() -> Self {
        Self { k: 5, n_maps: 1, n_in: 8, delta_mult: 2, delta_add: 2, p_out_mult: 16 }
    }
}

impl PeConfig {
    pub fn new(k: usize, n_maps: usize) -> Self {
        Self { k, n_maps, ..Self::default() }
    }

    pub fn taps(&self) -> usize {
        self.k * self.k
    }

    /// Adder stages reducing the `k x k` products.
    pub fn kernel_stages(&self) -> usize {
        ceil_log2(self.taps())
    }

    /// Adder stages reducing the per-map sums.
    pub fn map_stages(&self) -> usize {
        ceil_log2(self.n_maps)
    }

    /// SOP output precision: multiplier precision plus the kernel tree's bit growth.
    pub fn p_out(&self) -> usize {
        self.p_out_mult + self.kernel_stages()
    }

    /// Cycles before the first SOP digit leaves the block.
    pub fn latency(&self) -> usize {
        self.delta_mult + self.delta_add * (self.kernel_stages() + self.map_stages())
    }

    /// Cycles for a full SOP: `delta_x + delta_+ * ceil(log2(k*k)) + delta_+ * ceil(log2(N)) + p_out`.
    pub fn num_cycles(&self) -> usize {
        self.latency() + self.p_out()
    }

    /// Scale exponent of the block output: one per adder stage.
    pub fn output_scale(&self) -> i32 {
        (self.kernel_stages() + self.map_stages()) as i32
    }

    /// Smallest `p_out_mult` for which the `p_out` digits hold the SOP exactly:
    /// a product has `n_in + 7` fraction bits and the map tree adds
    /// `ceil(log2(N))` more that `p_out` does not account for.
    pub fn exact_p_out_mult(&self) -> usize {
        self.n_in + FIXED8_FRAC_BITS as usize + self.map_stages()
    }

    pub fn is_exact(&self) -> bool {
        self.p_out_mult >= self.exact_p_out_mult()
    }

    /// Same shape with `p_out_mult` raised, if needed, to make results exact.
    pub fn with_exact_precision(mut self) -> Self {
        self.p_out_mult = self.p_out_mult.max(self.exact_p_out_mult());
        self
    }

    pub fn validate(&self) -> Result<(), PeError> {
        if self.k == 0 {
            return Err(PeError::Config("kernel side k must be at least 1".into()));
        }
        if self.n_maps == 0 {
            return Err(PeError::Config("need at least one input map".into()));
        }
        if self.n_in == 0 {
            return Err(PeError::Config("operand precision must be at least 1 digit".into()));
        }
        if self.delta_mult < 2 {
            return Err(PeError::Config(format!("multiplier delay {} < 2", self.delta_mult)));
        }
        if self.delta_add < 1 {
            return Err(PeError::Config("adder delay must be at least 1".into()));
        }
        let cycles = self.num_cycles();
        if cycles > MONITOR_REGISTER_BITS as usize {
            return Err(PeError::Config(format!(
                "{cycles} cycles exceed the {MONITOR_REGISTER_BITS}-bit sign monitor"
            )));
        }
        Ok(())
    }
}
