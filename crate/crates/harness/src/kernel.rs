//! Convolution kernel files.
//!
//! ```json
//! { "k": 5, "n": 1, "weights": [[[...5 ints...], ...5 rows...]] }
//! ```
//!
//! `weights[m][r][c]` is the raw signed 8-bit weight (value `raw / 128`).

use std::path::{Path, PathBuf};

use dslot_core::sdnum::Fixed8;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum KernelError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("kernel JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("weight {value} at map {map}, row {row}, col {col} is outside [-128, 127]")]
    OutOfRange { map: usize, row: usize, col: usize, value: i64 },
    #[error("kernel shape mismatch: {0}")]
    ShapeMismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelFile {
    pub k: usize,
    pub n: usize,
    pub weights: Vec<Vec<Vec<i64>>>,
}

/// `n_maps` row-major `k x k` weight grids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    pub k: usize,
    pub maps: Vec<Vec<Fixed8>>,
}

impl Kernel {
    pub fn n_maps(&self) -> usize {
        self.maps.len()
    }

    /// Single-map kernel from raw row-major weights.
    pub fn from_raw(k: usize, raw: &[i8]) -> Result<Self, KernelError> {
        if raw.len() != k * k {
            return Err(KernelError::ShapeMismatch(format!("{} weights for k = {k}", raw.len())));
        }
        Ok(Self { k, maps: vec![raw.iter().map(|&w| Fixed8::from_raw(w)).collect()] })
    }

    pub fn raw(&self, map: usize) -> Vec<i8> {
        self.maps[map].iter().map(|w| w.raw()).collect()
    }

    pub fn to_file(&self) -> KernelFile {
        let weights = self
            .maps
            .iter()
            .map(|m| m.chunks(self.k).map(|row| row.iter().map(|w| i64::from(w.raw())).collect()).collect())
            .collect();
        KernelFile { k: self.k, n: self.n_maps(), weights }
    }
}

impl TryFrom<KernelFile> for Kernel {
    type Error = KernelError;

    fn try_from(f: KernelFile) -> Result<Self, KernelError> {
        if f.k == 0 || f.n == 0 {
            return Err(KernelError::ShapeMismatch(format!("k = {} and n = {} must be positive", f.k, f.n)));
        }
        if f.weights.len() != f.n {
            return Err(KernelError::ShapeMismatch(format!("n = {} but {} weight maps", f.n, f.weights.len())));
        }
        let mut maps = Vec::with_capacity(f.n);
        for (m, grid) in f.weights.iter().enumerate() {
            if grid.len() != f.k {
                return Err(KernelError::ShapeMismatch(format!("map {m}: {} rows, expected {}", grid.len(), f.k)));
            }
            let mut map = Vec::with_capacity(f.k * f.k);
            for (r, row) in grid.iter().enumerate() {
                if row.len() != f.k {
                    return Err(KernelError::ShapeMismatch(format!(
                        "map {m} row {r}: {} weights, expected {}",
                        row.len(),
                        f.k
                    )));
                }
                for (c, &value) in row.iter().enumerate() {
                    let w = Fixed8::try_from_int(value).map_err(|_| KernelError::OutOfRange {
                        map: m,
                        row: r,
                        col: c,
                        value,
                    })?;
                    map.push(w);
                }
            }
            maps.push(map);
        }
        Ok(Self { k: f.k, maps })
    }
}

pub fn parse_kernel(json: &str) -> Result<Kernel, KernelError> {
    serde_json::from_str::<KernelFile>(json)?.try_into()
}

pub fn load_kernel(path: &Path) -> Result<Kernel, KernelError> {
    let text = std::fs::read_to_string(path).map_err(|source| KernelError::Io { path: path.to_path_buf(), source })?;
    parse_kernel(&text)
}
