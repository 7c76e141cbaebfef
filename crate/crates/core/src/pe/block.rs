use crate::record::{ConvRunRecord, Engine};
use crate::relu::{Decision, SignMonitor, TerminationRecord};
use crate::sdnum::{DigitStream, Fixed8, Pixel, SignedDigit};

use super::config::PeConfig;
use super::engine::ProcessingEngine;
use super::tree::ReductionTree;
use super::PeError;

/// Digits and termination outcome of one block run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockOutput {
    /// SOP digits emitted after the warm-up, up to termination.
    pub stream: DigitStream,
    pub termination: TerminationRecord,
}

/// One output pixel's worth of hardware: a PE per input map, the map
/// reduction tree, and the sign monitor that halts negative results.
#[derive(Clone, Debug)]
pub struct ProcessingBlock {
    cfg: PeConfig,
    pes: Vec<ProcessingEngine>,
    tree: ReductionTree,
    monitor: SignMonitor,
    early_termination: bool,
    pe_out: Vec<SignedDigit>,
    digits: Vec<SignedDigit>,
}

impl ProcessingBlock {
    /// `kernel[m]` holds the `k * k` row-major weights of input map `m`.
    pub fn new(cfg: PeConfig, kernel: &[Vec<Fixed8>]) -> Result<Self, PeError> {
        cfg.validate()?;
        if kernel.len() != cfg.n_maps {
            return Err(PeError::Shape(format!("{} kernel maps for N = {}", kernel.len(), cfg.n_maps)));
        }
        let pes = kernel
            .iter()
            .enumerate()
            .map(|(m, w)| {
                if w.len() != cfg.taps() {
                    return Err(PeError::Shape(format!("map {m}: {} weights, expected {}", w.len(), cfg.taps())));
                }
                Ok(ProcessingEngine::new(w, cfg.delta_mult, cfg.delta_add)?)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let tree = ReductionTree::new(cfg.n_maps, cfg.delta_add)?;
        Ok(Self {
            cfg,
            pe_out: vec![SignedDigit::ZERO; pes.len()],
            digits: vec![SignedDigit::ZERO; cfg.taps()],
            pes,
            tree,
            monitor: SignMonitor::new(),
            early_termination: true,
        })
    }

    pub fn config(&self) -> &PeConfig {
        &self.cfg
    }

    /// With termination off every run lasts `num_cycles` and yields the full value.
    pub fn set_early_termination(&mut self, on: bool) {
        self.early_termination = on;
    }

    pub fn early_termination(&self) -> bool {
        self.early_termination
    }

    pub fn engines(&self) -> &[ProcessingEngine] {
        &self.pes
    }

    pub fn map_tree(&self) -> &ReductionTree {
        &self.tree
    }

    /// Runs one SOP. `inputs[m][t]` is the serial stream of tap `t` of map
    /// `m`; all streams share one scale and have at most `n_in` digits.
    pub fn run(&mut self, inputs: &[Vec<DigitStream>]) -> Result<BlockOutput, PeError> {
        if inputs.len() != self.cfg.n_maps {
            return Err(PeError::Shape(format!("{} input maps for N = {}", inputs.len(), self.cfg.n_maps)));
        }
        let mut scale = None;
        for (m, taps) in inputs.iter().enumerate() {
            if taps.len() != self.cfg.taps() {
                return Err(PeError::Shape(format!("map {m}: {} inputs, expected {}", taps.len(), self.cfg.taps())));
            }
            for s in taps {
                if s.len() > self.cfg.n_in {
                    return Err(PeError::InputTooLong { len: s.len(), n_in: self.cfg.n_in });
                }
                match scale {
                    None => scale = Some(s.scale_exp()),
                    Some(sc) if sc != s.scale_exp() => return Err(PeError::ScaleMismatch),
                    _ => {}
                }
            }
        }
        let in_scale = scale.unwrap_or(0);

        self.reset();
        let total = self.cfg.num_cycles();
        let pe_latency = self.cfg.delta_mult + self.cfg.delta_add * self.cfg.kernel_stages();
        let latency = self.cfg.latency();
        let mut out = Vec::with_capacity(self.cfg.p_out());
        for c in 0..total {
            for ((pe, taps), o) in self.pes.iter_mut().zip(inputs).zip(self.pe_out.iter_mut()) {
                for (d, s) in self.digits.iter_mut().zip(taps) {
                    *d = s.digit_or_zero(c);
                }
                *o = pe.step(&self.digits);
            }
            let z = if c < pe_latency { SignedDigit::ZERO } else { self.tree.step(&self.pe_out) };
            if c >= latency {
                out.push(z);
            }
            if self.early_termination && self.monitor.step(z) == Decision::Terminate {
                break;
            }
        }
        let termination = if self.early_termination {
            self.monitor.finalize(total as u32)
        } else {
            TerminationRecord::completed(total as u32)
        };
        Ok(BlockOutput { stream: DigitStream::new(out, in_scale + self.cfg.output_scale()), termination })
    }

    /// Convolves one aligned window per input map (`k * k` pixels each, row-major).
    pub fn convolve(&mut self, windows: &[&[Pixel]]) -> Result<BlockOutput, PeError> {
        let inputs: Vec<Vec<DigitStream>> = windows.iter().map(|w| w.iter().map(|p| p.to_stream()).collect()).collect();
        self.run(&inputs)
    }

    pub fn convolve_record(&mut self, windows: &[&[Pixel]]) -> Result<ConvRunRecord, PeError> {
        let out = self.convolve(windows)?;
        Ok(ConvRunRecord {
            engine: Engine::Dslot,
            value: out.stream.value(),
            termination: out.termination,
            reference: None,
        })
    }

    fn reset(&mut self) {
        self.pes.iter_mut().for_each(ProcessingEngine::reset);
        self.tree.reset();
        self.monitor.reset();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdnum::Dyadic;

    fn block(cfg: PeConfig, kernel: Vec<Vec<i8>>) -> ProcessingBlock {
        let kernel: Vec<Vec<Fixed8>> =
            kernel.into_iter().map(|m| m.into_iter().map(Fixed8::from_raw).collect()).collect();
        ProcessingBlock::new(cfg, &kernel).unwrap()
    }

    #[test]
    fn positive_sop_runs_full_length() {
        let mut pb = block(PeConfig::default(), vec![vec![37; 25]]);
        let window = [Pixel(200); 25];
        let out = pb.convolve(&[&window]).unwrap();
        assert!(!out.termination.terminated);
        assert_eq!(out.termination.cycle, 33);
        assert_eq!(out.stream.len(), 21);
        assert_eq!(out.stream.value(), Dyadic::new(25 * 37 * 200, 15));
    }

    #[test]
    fn negative_sop_terminates() {
        let mut pb = block(PeConfig::default(), vec![vec![-37; 25]]);
        let window = [Pixel(200); 25];
        let out = pb.convolve(&[&window]).unwrap();
        assert!(out.termination.terminated);
        assert!(out.termination.cycle < 33);
        assert!(out.stream.value().is_negative());
    }

    #[test]
    fn shape_errors() {
        let kernel = vec![vec![Fixed8::ZERO; 24]];
        assert!(matches!(ProcessingBlock::new(PeConfig::default(), &kernel), Err(PeError::Shape(_))));
        let mut pb = block(PeConfig::default(), vec![vec![1; 25]]);
        let short = [Pixel(1); 9];
        assert!(matches!(pb.convolve(&[&short]), Err(PeError::Shape(_))));
        let long = vec![vec![DigitStream::zeros(9); 25]];
        assert!(matches!(pb.run(&long), Err(PeError::InputTooLong { .. })));
    }
}
