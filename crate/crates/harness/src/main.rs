use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dslot_core::pe::PeConfig;
use dslot_harness::{load_kernel, run_experiment, EngineChoice, ExperimentConfig, ImageFormat};

/// Convolution, ReLU and 2x2 max pooling on an image set, simulated on the
/// online-arithmetic engine with early termination and on the bit-serial baseline.
#[derive(Parser, Debug)]
#[command(name = "dslot", version)]
struct Cli {
    /// IDX image file, PGM file or directory, or CSV file
    #[arg(long)]
    images: PathBuf,
    /// idx | pgm | csv
    #[arg(long, default_value = "idx")]
    format: ImageFormat,
    /// IDX label file (default: sibling `*-labels-idx1-ubyte` if present)
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Kernel JSON: {"k": .., "n": .., "weights": [[[..]]]}
    #[arg(long)]
    kernel: PathBuf,
    /// dslot | sip | both
    #[arg(long, default_value = "both")]
    engine: EngineChoice,
    /// Process at most this many images
    #[arg(long)]
    limit: Option<usize>,
    /// Process at most this many images per class
    #[arg(long)]
    per_class: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check every output pixel against a scalar reference
    #[arg(long)]
    verify: bool,
    /// Output directory
    #[arg(long, default_value = "dslot-out")]
    out: PathBuf,
    /// Component delay table (TOML); unit delays by default
    #[arg(long)]
    delays: Option<PathBuf>,
    /// Also write the per-pixel dump
    #[arg(long)]
    pixels: bool,
    /// Online delay of the multipliers
    #[arg(long, default_value_t = 2)]
    delta_mult: usize,
    /// Online delay of the adders
    #[arg(long, default_value_t = 2)]
    delta_add: usize,
    /// Multiplier output precision in digits
    #[arg(long, default_value_t = 16)]
    p_out_mult: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    let kernel = load_kernel(&cli.kernel)?;
    let pe = PeConfig {
        k: kernel.k,
        n_maps: kernel.n_maps(),
        n_in: 8,
        delta_mult: cli.delta_mult,
        delta_add: cli.delta_add,
        p_out_mult: cli.p_out_mult,
    };
    let cfg = ExperimentConfig {
        images: cli.images,
        format: cli.format,
        labels: cli.labels,
        kernel: cli.kernel,
        engine: cli.engine,
        pe,
        limit: cli.limit,
        per_class: cli.per_class,
        seed: cli.seed,
        verify: cli.verify,
        out: Some(cli.out.clone()),
        dump_pixels: cli.pixels,
        delays: cli.delays,
    };
    let stats = run_experiment(&cfg)?;
    print!("{}", std::fs::read_to_string(cli.out.join(dslot_harness::report::SUMMARY_FILE))?);
    if stats.images.is_empty() {
        eprintln!("warning: no images selected");
    }
    Ok(())
}
