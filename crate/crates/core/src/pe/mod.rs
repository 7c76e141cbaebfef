//! Processing engines, processing blocks and max pooling.

mod block;
mod config;
mod engine;
mod tree;

pub use block::{BlockOutput, ProcessingBlock};
pub use config::{ceil_log2, PeConfig};
pub use engine::ProcessingEngine;
pub use tree::ReductionTree;

use crate::online::OnlineError;
use crate::record::ConvRunRecord;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PeError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("input stream of {len} digits exceeds n_in = {n_in}")]
    InputTooLong { len: usize, n_in: usize },
    #[error("input streams have different scales")]
    ScaleMismatch,
    #[error(transparent)]
    Online(#[from] OnlineError),
}

/// `num_cycles`: cycles for one full SOP of `cfg`.
pub fn num_cycles(cfg: &PeConfig) -> usize {
    cfg.num_cycles()
}

/// Index of the record with the largest ReLU output; ties go to the lowest index.
pub fn argmax_activation(records: &[ConvRunRecord]) -> Option<usize> {
    let mut best: Option<(usize, crate::sdnum::Dyadic)> = None;
    for (i, r) in records.iter().enumerate() {
        let a = r.activation();
        if best.as_ref().is_none_or(|(_, b)| a > *b) {
            best = Some((i, a));
        }
    }
    best.map(|(i, _)| i)
}

/// 2x2 max pool over four block results. Terminated (negative) results
/// count as 0; the returned record's [`activation`](ConvRunRecord::activation)
/// is the pooled pixel.
pub fn maxpool_select(quad: &[ConvRunRecord; 4]) -> &ConvRunRecord {
    &quad[argmax_activation(quad).expect("four records")]
}
