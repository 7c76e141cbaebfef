//! Per-pixel, per-image and per-class run statistics.

use std::collections::BTreeMap;

use dslot_core::timing::{DslotCycles, RunCycles, SipCycles};

/// One convolution output pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PixelRow {
    pub image: usize,
    pub label: Option<u8>,
    pub row: usize,
    pub col: usize,
    /// Exact SOP in units of `2^-15`.
    pub sop_raw: i64,
    pub negative: bool,
    pub dslot_cycles: Option<u32>,
    pub cycles_saved: Option<u32>,
    pub sip_cycles: Option<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ImageStats {
    /// Index in the loaded dataset.
    pub index: usize,
    pub label: Option<u8>,
    pub pixels: u64,
    pub negative: u64,
    pub dslot_cycles: Option<u64>,
    pub cycles_saved: u64,
    /// Cycles saved on the negative pixels alone.
    pub saved_on_negative: u64,
    pub sip_cycles: Option<u64>,
}

fn pct(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        100.0 * num / den
    } else {
        0.0
    }
}

impl ImageStats {
    pub fn pct_negative(&self) -> f64 {
        pct(self.negative as f64, self.pixels as f64)
    }

    /// Mean over pixels of `cycles_saved / num_cycles`, in percent.
    pub fn pct_cycles_saved(&self, num_cycles: u32) -> f64 {
        pct(self.cycles_saved as f64, (self.pixels * u64::from(num_cycles)) as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassStats {
    pub class: Option<u8>,
    pub images: usize,
    /// Mean of the per-image percentages.
    pub pct_negative: f64,
    pub pct_cycles_saved: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunStats {
    pub has_dslot: bool,
    pub has_sip: bool,
    pub num_cycles: u32,
    pub sip_cycles_per_sop: u32,
    pub images: Vec<ImageStats>,
    /// Filled when the verbose dump was requested.
    pub pixels: Option<Vec<PixelRow>>,
}

impl RunStats {
    pub fn total_pixels(&self) -> u64 {
        self.images.iter().map(|i| i.pixels).sum()
    }

    pub fn total_negative(&self) -> u64 {
        self.images.iter().map(|i| i.negative).sum()
    }

    pub fn pct_negative(&self) -> f64 {
        pct(self.total_negative() as f64, self.total_pixels() as f64)
    }

    pub fn pct_cycles_saved(&self) -> f64 {
        let saved: u64 = self.images.iter().map(|i| i.cycles_saved).sum();
        pct(saved as f64, (self.total_pixels() * u64::from(self.num_cycles)) as f64)
    }

    /// Mean of `cycles_saved / num_cycles` over negative pixels, in percent.
    pub fn pct_saved_on_negative(&self) -> Option<f64> {
        let neg = self.total_negative();
        if !self.has_dslot || neg == 0 {
            return None;
        }
        let saved: u64 = self.images.iter().map(|i| i.saved_on_negative).sum();
        Some(pct(saved as f64, (neg * u64::from(self.num_cycles)) as f64))
    }

    pub fn dslot_cycles(&self) -> Option<u64> {
        self.has_dslot.then(|| self.images.iter().filter_map(|i| i.dslot_cycles).sum())
    }

    pub fn sip_cycles(&self) -> Option<u64> {
        self.has_sip.then(|| self.images.iter().filter_map(|i| i.sip_cycles).sum())
    }

    /// Every pixel run for the full `num_cycles`.
    pub fn dslot_budget(&self) -> u64 {
        self.total_pixels() * u64::from(self.num_cycles)
    }

    /// Classes in ascending order, unlabeled images last.
    pub fn per_class(&self) -> Vec<ClassStats> {
        let mut groups: BTreeMap<(bool, u8), Vec<&ImageStats>> = BTreeMap::new();
        for img in &self.images {
            let key = match img.label {
                Some(l) => (false, l),
                None => (true, 0),
            };
            groups.entry(key).or_default().push(img);
        }
        groups
            .into_iter()
            .map(|((unlabeled, l), imgs)| {
                let n = imgs.len() as f64;
                ClassStats {
                    class: (!unlabeled).then_some(l),
                    images: imgs.len(),
                    pct_negative: imgs.iter().map(|i| i.pct_negative()).sum::<f64>() / n,
                    pct_cycles_saved: imgs.iter().map(|i| i.pct_cycles_saved(self.num_cycles)).sum::<f64>() / n,
                }
            })
            .collect()
    }

    pub fn run_cycles(&self) -> RunCycles {
        let sops = self.total_pixels();
        let negative = self.total_negative();
        RunCycles {
            sops,
            dslot: self.dslot_cycles().map(|used| DslotCycles {
                used,
                budget: self.dslot_budget(),
                negative,
                saved_on_negative: self.images.iter().map(|i| i.saved_on_negative).sum(),
            }),
            sip: self.sip_cycles().map(|used| SipCycles { used, negative }),
        }
    }
}
