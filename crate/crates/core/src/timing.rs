//! Critical-path bookkeeping from per-component delays.
//!
//! Delays are in an arbitrary time unit supplied by the user; nothing here
//! estimates FPGA timing. The critical paths describe the 5x5, single-map
//! datapath: five adder-tree stages in both designs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::pe::PeConfig;

#[derive(Debug, thiserror::Error)]
pub enum TimingError {
    #[error("reading delay table: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing delay table: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("delay `{0}` is negative or not finite")]
    BadDelay(String),
    #[error("carry-propagate width `{0}` is not an integer")]
    BadWidth(String),
    #[error("no carry-propagate delay for width {0}")]
    MissingCpaWidth(u32),
    #[error("carry-propagate delay decreases between widths {narrow} and {wide}")]
    NonMonotoneCpa { narrow: u32, wide: u32 },
}

/// Carry-propagate adder widths the critical-path formulas use.
pub const REQUIRED_CPA_WIDTHS: [u32; 3] = [4, 8, 21];

/// Unit delays of the datapath components.
#[derive(Clone, Debug, PartialEq)]
pub struct DelayTable {
    pub t_and: f64,
    pub t_fa: f64,
    pub t_ff: f64,
    pub t_mux2: f64,
    /// `[3:2]` carry-save adder.
    pub t_csa32: f64,
    /// Multiplier digit-selection module.
    pub t_selm: f64,
    pub t_xor: f64,
    t_cpa: BTreeMap<u32, f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DelayFile {
    t_and: f64,
    t_fa: f64,
    t_ff: f64,
    t_mux2: f64,
    t_csa32: f64,
    t_selm: f64,
    t_xor: f64,
    t_cpa: BTreeMap<String, f64>,
}

impl DelayTable {
    /// Every component takes one time unit, CPAs of any width included.
    pub fn unit() -> Self {
        Self::uniform(1.0)
    }

    pub fn zero() -> Self {
        Self::uniform(0.0)
    }

    fn uniform(t: f64) -> Self {
        Self {
            t_and: t,
            t_fa: t,
            t_ff: t,
            t_mux2: t,
            t_csa32: t,
            t_selm: t,
            t_xor: t,
            t_cpa: REQUIRED_CPA_WIDTHS.iter().map(|&w| (w, t)).collect(),
        }
    }

    /// Builds and validates a table. `t_cpa` maps adder width to delay and
    /// must cover [`REQUIRED_CPA_WIDTHS`].
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        t_and: f64,
        t_fa: f64,
        t_ff: f64,
        t_mux2: f64,
        t_csa32: f64,
        t_selm: f64,
        t_xor: f64,
        t_cpa: BTreeMap<u32, f64>,
    ) -> Result<Self, TimingError> {
        let table = Self { t_and, t_fa, t_ff, t_mux2, t_csa32, t_selm, t_xor, t_cpa };
        table.validate()?;
        Ok(table)
    }

    /// Parses the key-value (TOML) form:
    ///
    /// ```toml
    /// t_and = 1.0
    /// t_fa = 1.0
    /// t_ff = 1.0
    /// t_mux2 = 1.0
    /// t_csa32 = 1.0
    /// t_selm = 1.0
    /// t_xor = 1.0
    /// [t_cpa]
    /// 4 = 1.0
    /// 8 = 2.0
    /// 21 = 5.0
    /// ```
    pub fn from_toml_str(s: &str) -> Result<Self, TimingError> {
        let f: DelayFile = toml::from_str(s)?;
        let t_cpa = f
            .t_cpa
            .into_iter()
            .map(|(k, v)| k.trim().parse::<u32>().map(|w| (w, v)).map_err(|_| TimingError::BadWidth(k)))
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        Self::new(f.t_and, f.t_fa, f.t_ff, f.t_mux2, f.t_csa32, f.t_selm, f.t_xor, t_cpa)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TimingError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<(), TimingError> {
        let named = [
            ("t_and", self.t_and),
            ("t_fa", self.t_fa),
            ("t_ff", self.t_ff),
            ("t_mux2", self.t_mux2),
            ("t_csa32", self.t_csa32),
            ("t_selm", self.t_selm),
            ("t_xor", self.t_xor),
        ];
        for (name, t) in named {
            check_delay(name, t)?;
        }
        for (w, &t) in &self.t_cpa {
            check_delay(&format!("t_cpa[{w}]"), t)?;
        }
        for w in REQUIRED_CPA_WIDTHS {
            if !self.t_cpa.contains_key(&w) {
                return Err(TimingError::MissingCpaWidth(w));
            }
        }
        let entries: Vec<_> = self.t_cpa.iter().collect();
        for pair in entries.windows(2) {
            if pair[1].1 < pair[0].1 {
                return Err(TimingError::NonMonotoneCpa { narrow: *pair[0].0, wide: *pair[1].0 });
            }
        }
        Ok(())
    }

    /// Delay of a `width`-bit carry-propagate adder: the listed delay of the
    /// narrowest listed width that is at least `width`.
    pub fn t_cpa(&self, width: u32) -> Option<f64> {
        self.t_cpa.range(width..).next().map(|(_, &t)| t)
    }

    fn cpa(&self, width: u32) -> f64 {
        self.t_cpa(width).expect("validated table covers the required widths")
    }
}

fn check_delay(name: &str, t: f64) -> Result<(), TimingError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(TimingError::BadDelay(name.to_string()))
    }
}

/// Bit-serial inner product: `t_AND + 5 t_CPA(8) + t_CPA(21)`.
pub fn t_sip(d: &DelayTable) -> f64 {
    d.t_and + 5.0 * d.cpa(8) + d.cpa(21)
}

/// Online multiplier: `t_MUX2 + t_CSA32 + t_CPA(4) + t_SELM + t_XOR`.
pub fn t_olm(d: &DelayTable) -> f64 {
    d.t_mux2 + d.t_csa32 + d.cpa(4) + d.t_selm + d.t_xor
}

/// Online adder: `2 t_FA + t_FF`.
pub fn t_ola(d: &DelayTable) -> f64 {
    2.0 * d.t_fa + d.t_ff
}

/// Multiplier followed by five adder stages.
pub fn t_dslot(d: &DelayTable) -> f64 {
    t_olm(d) + 5.0 * t_ola(d)
}

/// Cycle totals measured by a simulation run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunCycles {
    /// SOPs (output pixels) simulated.
    pub sops: u64,
    pub dslot: Option<DslotCycles>,
    pub sip: Option<SipCycles>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DslotCycles {
    /// Cycles actually stepped, early termination included.
    pub used: u64,
    /// `sops * num_cycles`.
    pub budget: u64,
    pub negative: u64,
    /// Cycles saved on the negative SOPs.
    pub saved_on_negative: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SipCycles {
    pub used: u64,
    pub negative: u64,
}

/// Published FPGA implementation figures, carried for reference only.
pub mod fpga_reference {
    pub const SIP_LUTS: u32 = 830;
    pub const DSLOT_LUTS: u32 = 1302;
    pub const SIP_POWER_MW: f64 = 22.0;
    pub const DSLOT_POWER_MW: f64 = 20.0;
    pub const SIP_CRITICAL_PATH_NS: f64 = 30.075;
    pub const DSLOT_CRITICAL_PATH_NS: f64 = 15.436;
    pub const SIP_GOPS_PER_W: f64 = 25.17;
    pub const DSLOT_GOPS_PER_W: f64 = 37.69;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub metric: String,
    pub sip: Option<String>,
    pub dslot: Option<String>,
}

/// Side-by-side comparison of the two engines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComparisonTable {
    pub rows: Vec<ReportRow>,
}

pub const NOT_MODELED: &str = "n/a";

impl ComparisonTable {
    fn push(&mut self, metric: &str, sip: Option<String>, dslot: Option<String>) {
        self.rows.push(ReportRow { metric: metric.to_string(), sip, dslot });
    }

    pub fn row(&self, metric: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }
}

impl fmt::Display for ComparisonTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cell = |c: &Option<String>| c.clone().unwrap_or_else(|| "-".to_string());
        let w0 = self.rows.iter().map(|r| r.metric.len()).chain([6]).max().unwrap_or(6);
        let w1 = self.rows.iter().map(|r| cell(&r.sip).len()).chain([3]).max().unwrap_or(3);
        let w2 = self.rows.iter().map(|r| cell(&r.dslot).len()).chain([5]).max().unwrap_or(5);
        writeln!(f, "{:<w0$}  {:>w1$}  {:>w2$}", "metric", "sip", "dslot")?;
        writeln!(f, "{}  {}  {}", "-".repeat(w0), "-".repeat(w1), "-".repeat(w2))?;
        for r in &self.rows {
            writeln!(f, "{:<w0$}  {:>w1$}  {:>w2$}", r.metric, cell(&r.sip), cell(&r.dslot))?;
        }
        Ok(())
    }
}

fn num(x: f64) -> Option<String> {
    Some(format!("{x:.3}"))
}

fn pct(part: u64, whole: u64) -> Option<String> {
    (whole > 0).then(|| format!("{:.2}", 100.0 * part as f64 / whole as f64))
}

/// Builds the comparison table. Measured rows stay blank without `stats`,
/// and per engine when that engine did not run.
pub fn compare_report(cfg: &PeConfig, d: &DelayTable, stats: Option<&RunCycles>) -> ComparisonTable {
    let mut t = ComparisonTable::default();
    let sip_cycles = cfg.n_in as f64;
    let dslot_cycles = cfg.num_cycles() as f64;
    let (ts, td) = (t_sip(d), t_dslot(d));

    t.push("cycles per SOP (full)", num(sip_cycles), num(dslot_cycles));
    t.push("critical path (time units)", num(ts), num(td));
    t.push("online multiplier path", None, num(t_olm(d)));
    t.push("online adder path", None, num(t_ola(d)));
    t.push("time per SOP (full)", num(sip_cycles * ts), num(dslot_cycles * td));
    let ratio = if td > 0.0 { num(ts / td) } else { None };
    t.push("critical path ratio sip/dslot", None, ratio);

    let sops = stats.map_or(0, |s| s.sops);
    let dslot = stats.and_then(|s| s.dslot.as_ref());
    let sip = stats.and_then(|s| s.sip.as_ref());
    t.push("SOPs simulated", sip.map(|_| sops.to_string()), dslot.map(|_| sops.to_string()));
    let mean = |used: u64| (sops > 0).then(|| format!("{:.3}", used as f64 / sops as f64));
    t.push("mean cycles per SOP (measured)", sip.and_then(|s| mean(s.used)), dslot.and_then(|s| mean(s.used)));
    t.push(
        "negative activations (%)",
        sip.and_then(|s| pct(s.negative, sops)),
        dslot.and_then(|s| pct(s.negative, sops)),
    );
    t.push(
        "cycles saved overall (%)",
        sip.map(|_| format!("{:.2}", 0.0)),
        dslot.and_then(|s| pct(s.budget - s.used, s.budget)),
    );
    t.push(
        "cycles saved on negative SOPs (%)",
        sip.map(|_| format!("{:.2}", 0.0)),
        dslot.and_then(|s| pct(s.saved_on_negative, s.negative * cfg.num_cycles() as u64)),
    );
    let time = |used: u64, tc: f64| (sops > 0).then(|| format!("{:.3}", used as f64 / sops as f64 * tc));
    t.push("mean time per SOP (measured)", sip.and_then(|s| time(s.used, ts)), dslot.and_then(|s| time(s.used, td)));

    let na = || Some(NOT_MODELED.to_string());
    for metric in ["LUTs", "dynamic power (mW)", "critical path (ns)", "GOPS/W"] {
        t.push(metric, na(), na());
    }
    t
}
