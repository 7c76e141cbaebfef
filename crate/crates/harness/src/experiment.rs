//! Convolution -> ReLU -> 2x2 max pool over a batch of images, on one or both engines.

use std::path::PathBuf;
use std::str::FromStr;

use dslot_core::pe::{maxpool_select, PeConfig, PeError, ProcessingBlock};
use dslot_core::sdnum::{Dyadic, Pixel, PIXEL_FRAC_BITS};
use dslot_core::sip::SipEngine;
use dslot_core::timing::{DelayTable, TimingError};
use dslot_core::ConvRunRecord;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{load_images, DataError, Image, ImageFormat};
use crate::kernel::{load_kernel, Kernel, KernelError};
use crate::reference::{conv_raw, relu_maxpool};
use crate::stats::{ImageStats, PixelRow, RunStats};

/// Raw SOPs (weight raw times pixel raw) carry this many fraction bits.
pub const SOP_FRAC_BITS: u32 = 7 + PIXEL_FRAC_BITS;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Pe(#[from] PeError),
    #[error(transparent)]
    Timing(#[from] TimingError),
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum EngineChoice {
    Dslot,
    Sip,
    #[default]
    Both,
}

impl EngineChoice {
    pub fn dslot(self) -> bool {
        matches!(self, Self::Dslot | Self::Both)
    }

    pub fn sip(self) -> bool {
        matches!(self, Self::Sip | Self::Both)
    }
}

impl FromStr for EngineChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dslot" => Ok(Self::Dslot),
            "sip" => Ok(Self::Sip),
            "both" => Ok(Self::Both),
            other => Err(format!("unknown engine `{other}` (expected dslot, sip or both)")),
        }
    }
}

impl std::fmt::Display for EngineChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Dslot => "dslot",
            Self::Sip => "sip",
            Self::Both => "both",
        })
    }
}

/// Everything the CLI can set.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub images: PathBuf,
    pub format: ImageFormat,
    pub labels: Option<PathBuf>,
    pub kernel: PathBuf,
    pub engine: EngineChoice,
    /// `k` and `n_maps` must agree with the kernel file.
    pub pe: PeConfig,
    pub limit: Option<usize>,
    pub per_class: Option<usize>,
    pub seed: u64,
    pub verify: bool,
    pub out: Option<PathBuf>,
    /// Also write the per-pixel dump.
    pub dump_pixels: bool,
    pub delays: Option<PathBuf>,
}

/// Run options once the inputs are in memory.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub engine: EngineChoice,
    pub pe: PeConfig,
    pub verify: bool,
    pub dump_pixels: bool,
}

impl RunOptions {
    pub fn new(pe: PeConfig, engine: EngineChoice) -> Self {
        Self { engine, pe, verify: false, dump_pixels: false }
    }
}

/// Dataset indices to process, in ascending order. With `per_class`, at
/// most that many images of each label (unlabeled images form one class);
/// with `limit`, at most that many overall. Which images are kept is
/// decided by a shuffle seeded with `seed`.
pub fn select_images(images: &[Image], limit: Option<usize>, per_class: Option<usize>, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..images.len()).collect();
    if limit.is_none() && per_class.is_none() {
        return order;
    }
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut taken = std::collections::HashMap::<Option<u8>, usize>::new();
    let mut picked: Vec<usize> = order
        .into_iter()
        .filter(|&i| match per_class {
            Some(cap) => {
                let n = taken.entry(images[i].label).or_default();
                *n += 1;
                *n <= cap
            }
            None => true,
        })
        .take(limit.unwrap_or(usize::MAX))
        .collect();
    picked.sort_unstable();
    picked
}

/// Result for one image: statistics, pooled outputs per engine, optional pixel rows.
#[derive(Clone, Debug)]
pub struct ImageResult {
    pub stats: ImageStats,
    pub pooled_dslot: Option<Vec<Dyadic>>,
    pub pooled_sip: Option<Vec<Dyadic>>,
    /// Scalar reference after ReLU and pooling, raw units of `2^-15`.
    pub pooled_reference: Vec<i64>,
    pub pixels: Vec<PixelRow>,
}

fn check_shapes(kernel: &Kernel, pe: &PeConfig) -> Result<(), ExperimentError> {
    pe.validate()?;
    if kernel.k != pe.k || kernel.n_maps() != pe.n_maps {
        return Err(ExperimentError::Config(format!(
            "kernel is {}x{} with {} maps, block configured for k = {}, N = {}",
            kernel.k,
            kernel.k,
            kernel.n_maps(),
            pe.k,
            pe.n_maps
        )));
    }
    if kernel.n_maps() != 1 {
        return Err(ExperimentError::Config(format!(
            "grayscale images have one input map, kernel has {}",
            kernel.n_maps()
        )));
    }
    if pe.n_in < PIXEL_FRAC_BITS as usize {
        return Err(ExperimentError::Config(format!("n_in = {} cannot hold 8-bit pixels", pe.n_in)));
    }
    Ok(())
}

fn pool(rows: usize, cols: usize, recs: &[ConvRunRecord]) -> Vec<Dyadic> {
    let mut out = Vec::with_capacity((rows / 2) * (cols / 2));
    for r in (0..rows / 2 * 2).step_by(2) {
        for c in (0..cols / 2 * 2).step_by(2) {
            let quad =
                [r * cols + c, r * cols + c + 1, (r + 1) * cols + c, (r + 1) * cols + c + 1].map(|i| recs[i].clone());
            out.push(maxpool_select(&quad).activation());
        }
    }
    out
}

/// Runs one image through the selected engines.
pub fn process_image(
    index: usize,
    image: &Image,
    kernel: &Kernel,
    opts: &RunOptions,
) -> Result<ImageResult, ExperimentError> {
    let k = kernel.k;
    let raw = kernel.raw(0);
    let (rows, cols, sums) = conv_raw(image, k, &raw);
    let mut pb = if opts.engine.dslot() { Some(ProcessingBlock::new(opts.pe, &kernel.maps)?) } else { None };
    let mut sip = opts.engine.sip().then(|| SipEngine::for_pixels(&kernel.maps[0]));

    let mut stats = ImageStats {
        index,
        label: image.label,
        pixels: sums.len() as u64,
        dslot_cycles: pb.as_ref().map(|_| 0),
        sip_cycles: sip.as_ref().map(|_| 0),
        ..Default::default()
    };
    let mut dslot_recs = Vec::new();
    let mut sip_recs = Vec::new();
    let mut pixels = Vec::new();
    let mut window = vec![Pixel(0); k * k];
    for r in 0..rows {
        for c in 0..cols {
            for i in 0..k {
                for j in 0..k {
                    window[i * k + j] = image.pixel(r + i, c + j);
                }
            }
            let exact = sums[r * cols + c];
            let reference = Dyadic::new(exact, SOP_FRAC_BITS);
            let d = match pb.as_mut() {
                Some(pb) => {
                    let mut rec = pb.convolve_record(&[&window])?;
                    rec.reference = Some(reference.clone());
                    Some(rec)
                }
                None => None,
            };
            let s = sip.as_mut().map(|e| {
                let mut rec = e.convolve(&window);
                rec.reference = Some(reference.clone());
                rec
            });
            if opts.verify {
                verify_pixel(index, r, c, exact, &reference, d.as_ref(), s.as_ref())?;
            }
            let negative = match (&d, &s) {
                (Some(d), _) => d.negative(),
                (None, Some(s)) => s.negative(),
                (None, None) => exact < 0,
            };
            if negative {
                stats.negative += 1;
            }
            if let Some(d) = &d {
                let saved = d.termination.cycles_saved();
                stats.cycles_saved += u64::from(saved);
                if negative {
                    stats.saved_on_negative += u64::from(saved);
                }
                *stats.dslot_cycles.as_mut().expect("dslot engine") += u64::from(d.cycles_used());
            }
            if let Some(s) = &s {
                *stats.sip_cycles.as_mut().expect("sip engine") += u64::from(s.cycles_used());
            }
            if opts.dump_pixels {
                pixels.push(PixelRow {
                    image: index,
                    label: image.label,
                    row: r,
                    col: c,
                    sop_raw: exact,
                    negative,
                    dslot_cycles: d.as_ref().map(|d| d.cycles_used()),
                    cycles_saved: d.as_ref().map(|d| d.termination.cycles_saved()),
                    sip_cycles: s.as_ref().map(|s| s.cycles_used()),
                });
            }
            if let Some(d) = d {
                dslot_recs.push(d);
            }
            if let Some(s) = s {
                sip_recs.push(s);
            }
        }
    }

    let pooled_reference = relu_maxpool(rows, cols, &sums);
    let pooled_dslot = pb.is_some().then(|| pool(rows, cols, &dslot_recs));
    let pooled_sip = sip.is_some().then(|| pool(rows, cols, &sip_recs));
    if opts.verify {
        for (name, pooled) in [("dslot", &pooled_dslot), ("sip", &pooled_sip)] {
            let Some(pooled) = pooled else { continue };
            for (i, (got, &want)) in pooled.iter().zip(&pooled_reference).enumerate() {
                if *got != Dyadic::new(want, SOP_FRAC_BITS) {
                    return Err(ExperimentError::Verify(format!(
                        "image {index}: {name} pooled output {i} is {got}, reference {want}/2^{SOP_FRAC_BITS}"
                    )));
                }
            }
        }
    }
    Ok(ImageResult { stats, pooled_dslot, pooled_sip, pooled_reference, pixels })
}

fn verify_pixel(
    image: usize,
    r: usize,
    c: usize,
    exact: i64,
    reference: &Dyadic,
    dslot: Option<&ConvRunRecord>,
    sip: Option<&ConvRunRecord>,
) -> Result<(), ExperimentError> {
    let fail = |what: String| Err(ExperimentError::Verify(format!("image {image} pixel ({r}, {c}): {what}")));
    if let Some(d) = dslot {
        if d.negative() != (exact < 0) {
            return fail(format!("dslot sign {} vs reference {reference}", d.value));
        }
        if !d.negative() && d.value != *reference {
            return fail(format!("dslot value {} vs reference {reference}", d.value));
        }
        if d.activation() != reference.relu() {
            return fail(format!("dslot activation {} vs reference {}", d.activation(), reference.relu()));
        }
    }
    if let Some(s) = sip {
        if s.value != *reference {
            return fail(format!("sip value {} vs reference {reference}", s.value));
        }
    }
    Ok(())
}

/// Processes `images[i]` for every `i` in `selection`, in parallel, with
/// results ordered by selection.
pub fn run_images(
    images: &[Image],
    selection: &[usize],
    kernel: &Kernel,
    opts: &RunOptions,
) -> Result<(RunStats, Vec<ImageResult>), ExperimentError> {
    check_shapes(kernel, &opts.pe)?;
    let results =
        selection.par_iter().map(|&i| process_image(i, &images[i], kernel, opts)).collect::<Result<Vec<_>, _>>()?;
    let stats = RunStats {
        has_dslot: opts.engine.dslot(),
        has_sip: opts.engine.sip(),
        num_cycles: opts.pe.num_cycles() as u32,
        sip_cycles_per_sop: PIXEL_FRAC_BITS,
        images: results.iter().map(|r| r.stats.clone()).collect(),
        pixels: opts.dump_pixels.then(|| results.iter().flat_map(|r| r.pixels.iter().cloned()).collect()),
    };
    Ok((stats, results))
}

/// Loads everything named in `cfg`, runs it, and writes the reports when
/// `cfg.out` is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunStats, ExperimentError> {
    let images = load_images(&cfg.images, cfg.format, cfg.labels.as_deref())?;
    let kernel = load_kernel(&cfg.kernel)?;
    let delays = match &cfg.delays {
        Some(p) => DelayTable::load(p)?,
        None => DelayTable::unit(),
    };
    let selection = select_images(&images, cfg.limit, cfg.per_class, cfg.seed);
    let opts = RunOptions { engine: cfg.engine, pe: cfg.pe, verify: cfg.verify, dump_pixels: cfg.dump_pixels };
    let (stats, _) = run_images(&images, &selection, &kernel, &opts)?;
    if let Some(out) = &cfg.out {
        crate::report::write_reports(out, cfg, &stats, &delays)?;
    }
    Ok(stats)
}
