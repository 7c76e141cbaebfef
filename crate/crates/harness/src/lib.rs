//! Data ingestion, experiment driver and reporting for the dslot simulator.

pub mod dataset;
pub mod experiment;
pub mod kernel;
pub mod reference;
pub mod report;
pub mod stats;

pub use dataset::{load_images, DataError, Image, ImageFormat};
pub use experiment::{
    process_image, run_experiment, run_images, select_images, EngineChoice, ExperimentConfig, ExperimentError,
    ImageResult, RunOptions,
};
pub use kernel::{load_kernel, Kernel, KernelError};
pub use stats::{ClassStats, ImageStats, PixelRow, RunStats};
