use std::fmt;

use crate::relu::TerminationRecord;
use crate::sdnum::Dyadic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    Dslot,
    Sip,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Dslot => "dslot",
            Engine::Sip => "sip",
        })
    }
}

/// Per-output-pixel outcome of one SOP run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvRunRecord {
    pub engine: Engine,
    /// Value of the digits produced. For a terminated run this is the
    /// (negative) prefix at the termination cycle.
    pub value: Dyadic,
    pub termination: TerminationRecord,
    /// Exact SOP from an independent reference, when checked.
    pub reference: Option<Dyadic>,
}

impl ConvRunRecord {
    pub fn negative(&self) -> bool {
        self.termination.terminated || self.value.is_negative()
    }

    /// ReLU output: 0 for negative or terminated runs.
    pub fn activation(&self) -> Dyadic {
        if self.negative() {
            Dyadic::zero()
        } else {
            self.value.clone()
        }
    }

    pub fn cycles_used(&self) -> u32 {
        self.termination.cycle
    }
}
