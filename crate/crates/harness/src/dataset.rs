//! Grayscale image ingestion: MNIST IDX files, PGM directories and MNIST-style CSV.
//!
//! Pixels stay as raw bytes; `p` stands for the fraction `p / 256`.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dslot_core::sdnum::Pixel;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: malformed file: {reason}")]
    MalformedFile { path: PathBuf, reason: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

fn malformed(path: &Path, reason: impl Into<String>) -> DataError {
    DataError::MalformedFile { path: path.to_path_buf(), reason: reason.into() }
}

fn read(path: &Path) -> Result<Vec<u8>, DataError> {
    fs::read(path).map_err(|source| DataError::Io { path: path.to_path_buf(), source })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ImageFormat {
    Idx,
    Pgm,
    Csv,
}

impl FromStr for ImageFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "idx" => Ok(Self::Idx),
            "pgm" => Ok(Self::Pgm),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown image format `{other}` (expected idx, pgm or csv)")),
        }
    }
}

/// One 8-bit grayscale image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
    pub label: Option<u8>,
}

impl Image {
    pub fn new(rows: usize, cols: usize, pixels: Vec<u8>, label: Option<u8>) -> Result<Self, DataError> {
        if rows * cols != pixels.len() {
            return Err(DataError::DimensionMismatch(format!("{rows}x{cols} image with {} pixels", pixels.len())));
        }
        Ok(Self { rows, cols, pixels, label })
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.pixels[r * self.cols + c]
    }

    pub fn pixel(&self, r: usize, c: usize) -> Pixel {
        Pixel(self.get(r, c))
    }
}

/// Loads every image under `path`. For IDX, `labels` names the label file;
/// without it a sibling `*-labels-idx1-ubyte` file is used when present.
pub fn load_images(path: &Path, format: ImageFormat, labels: Option<&Path>) -> Result<Vec<Image>, DataError> {
    match format {
        ImageFormat::Idx => {
            let mut images = parse_idx_images(path, &read(path)?)?;
            let label_path = labels.map(Path::to_path_buf).or_else(|| sibling_labels(path));
            if let Some(lp) = label_path {
                let labels = parse_idx_labels(&lp, &read(&lp)?)?;
                attach_labels(&mut images, &labels)?;
            }
            Ok(images)
        }
        ImageFormat::Pgm => load_pgm_dir(path),
        ImageFormat::Csv => load_csv(path),
    }
}

fn attach_labels(images: &mut [Image], labels: &[u8]) -> Result<(), DataError> {
    if labels.len() != images.len() {
        return Err(DataError::DimensionMismatch(format!("{} images but {} labels", images.len(), labels.len())));
    }
    for (img, &l) in images.iter_mut().zip(labels) {
        img.label = Some(l);
    }
    Ok(())
}

/// `train-images-idx3-ubyte` -> `train-labels-idx1-ubyte`, if it exists.
fn sibling_labels(path: &Path) -> Option<PathBuf> {
    let name = path.file_name()?.to_str()?;
    if !name.contains("images-idx3") {
        return None;
    }
    let candidate = path.with_file_name(name.replace("images-idx3", "labels-idx1"));
    candidate.is_file().then_some(candidate)
}

fn be_u32(path: &Path, bytes: &[u8], at: usize) -> Result<u32, DataError> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| malformed(path, "truncated header"))
}

pub fn parse_idx_images(path: &Path, bytes: &[u8]) -> Result<Vec<Image>, DataError> {
    let magic = be_u32(path, bytes, 0)?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(malformed(path, format!("magic {magic:#010x}, expected {IDX_IMAGES_MAGIC:#010x}")));
    }
    let count = be_u32(path, bytes, 4)? as usize;
    let rows = be_u32(path, bytes, 8)? as usize;
    let cols = be_u32(path, bytes, 12)? as usize;
    let size = rows * cols;
    let body = &bytes[16..];
    if body.len() != count * size {
        return Err(DataError::DimensionMismatch(format!(
            "{}: header says {count}x{rows}x{cols}, payload has {} bytes",
            path.display(),
            body.len()
        )));
    }
    if size == 0 {
        return Ok(Vec::new());
    }
    body.chunks_exact(size).map(|px| Image::new(rows, cols, px.to_vec(), None)).collect()
}

pub fn parse_idx_labels(path: &Path, bytes: &[u8]) -> Result<Vec<u8>, DataError> {
    let magic = be_u32(path, bytes, 0)?;
    if magic != IDX_LABELS_MAGIC {
        return Err(malformed(path, format!("magic {magic:#010x}, expected {IDX_LABELS_MAGIC:#010x}")));
    }
    let count = be_u32(path, bytes, 4)? as usize;
    let body = &bytes[8..];
    if body.len() != count {
        return Err(DataError::DimensionMismatch(format!(
            "{}: header says {count} labels, payload has {} bytes",
            path.display(),
            body.len()
        )));
    }
    Ok(body.to_vec())
}

/// Serializes images in IDX layout (used for fixtures and round trips).
pub fn write_idx_images(images: &[Image]) -> Result<Vec<u8>, DataError> {
    let (rows, cols) = images.first().map_or((0, 0), |i| (i.rows, i.cols));
    let mut out = Vec::with_capacity(16 + images.len() * rows * cols);
    for v in [IDX_IMAGES_MAGIC, images.len() as u32, rows as u32, cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    for img in images {
        if (img.rows, img.cols) != (rows, cols) {
            return Err(DataError::DimensionMismatch("IDX images must share one size".into()));
        }
        out.extend_from_slice(&img.pixels);
    }
    Ok(out)
}

/// PGM files (P5 or P2, maxval 255). Files in a subdirectory named by a
/// number take that number as class label; files at the top level are
/// unlabeled. Paths are visited in sorted order.
fn load_pgm_dir(root: &Path) -> Result<Vec<Image>, DataError> {
    if root.is_file() {
        return Ok(vec![parse_pgm(root, &read(root)?, None)?]);
    }
    let mut out = Vec::new();
    for entry in sorted_entries(root)? {
        if entry.is_dir() {
            let label = entry.file_name().and_then(|n| n.to_str()).and_then(|n| n.parse::<u8>().ok());
            for f in sorted_entries(&entry)? {
                if is_pgm(&f) {
                    out.push(parse_pgm(&f, &read(&f)?, label)?);
                }
            }
        } else if is_pgm(&entry) {
            out.push(parse_pgm(&entry, &read(&entry)?, None)?);
        }
    }
    Ok(out)
}

fn is_pgm(p: &Path) -> bool {
    p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, DataError> {
    let io = |source| DataError::Io { path: dir.to_path_buf(), source };
    let mut v =
        fs::read_dir(dir).map_err(io)?.map(|e| e.map(|e| e.path())).collect::<Result<Vec<_>, _>>().map_err(io)?;
    v.sort();
    Ok(v)
}

pub fn parse_pgm(path: &Path, bytes: &[u8], label: Option<u8>) -> Result<Image, DataError> {
    let mut pos = 0;
    // Header tokens, skipping whitespace and `#` comments.
    let token = |pos: &mut usize| -> Result<String, DataError> {
        loop {
            match bytes.get(*pos) {
                Some(b) if b.is_ascii_whitespace() => *pos += 1,
                Some(b'#') => {
                    while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                        *pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(malformed(path, "truncated header")),
            }
        }
        let start = *pos;
        while bytes.get(*pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            *pos += 1;
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    let magic = token(&mut pos)?;
    let num = |pos: &mut usize, what: &str| -> Result<usize, DataError> {
        let t = token(pos)?;
        t.parse().map_err(|_| malformed(path, format!("bad {what} `{t}`")))
    };
    let cols = num(&mut pos, "width")?;
    let rows = num(&mut pos, "height")?;
    let maxval = num(&mut pos, "maxval")?;
    if maxval != 255 {
        return Err(malformed(path, format!("maxval {maxval}, only 8-bit (255) images are supported")));
    }
    let pixels = match magic.as_str() {
        "P5" => {
            // exactly one whitespace byte separates the header from the raster
            let body = bytes.get(pos + 1..).unwrap_or(&[]);
            if body.len() != rows * cols {
                return Err(DataError::DimensionMismatch(format!(
                    "{}: {cols}x{rows} raster with {} bytes",
                    path.display(),
                    body.len()
                )));
            }
            body.to_vec()
        }
        "P2" => {
            let text = std::str::from_utf8(&bytes[pos..]).map_err(|_| malformed(path, "non-ASCII raster"))?;
            let vals = text
                .split_ascii_whitespace()
                .map(|t| t.parse::<u8>().map_err(|_| malformed(path, format!("bad pixel `{t}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            if vals.len() != rows * cols {
                return Err(DataError::DimensionMismatch(format!(
                    "{}: {cols}x{rows} raster with {} values",
                    path.display(),
                    vals.len()
                )));
            }
            vals
        }
        other => return Err(malformed(path, format!("unsupported PGM magic `{other}`"))),
    };
    Image::new(rows, cols, pixels, label)
}

/// MNIST CSV: `label, p0, p1, ...` per row, square images, optional header row.
fn load_csv(path: &Path) -> Result<Vec<Image>, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| malformed(path, e.to_string()))?;
    let mut out = Vec::new();
    let mut width = None;
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| malformed(path, e.to_string()))?;
        if line == 0 && rec.get(0).is_some_and(|f| f.parse::<u8>().is_err()) {
            continue;
        }
        let fields = rec
            .iter()
            .map(|f| f.parse::<u8>().map_err(|_| malformed(path, format!("row {}: bad value `{f}`", line + 1))))
            .collect::<Result<Vec<_>, _>>()?;
        let Some((&label, px)) = fields.split_first() else { continue };
        let side = (px.len() as f64).sqrt().round() as usize;
        if side * side != px.len() || px.is_empty() {
            return Err(DataError::DimensionMismatch(format!(
                "{} row {}: {} pixels is not a square image",
                path.display(),
                line + 1,
                px.len()
            )));
        }
        if *width.get_or_insert(px.len()) != px.len() {
            return Err(DataError::DimensionMismatch(format!(
                "{} row {}: {} pixels, earlier rows have {}",
                path.display(),
                line + 1,
                px.len(),
                width.unwrap_or(0)
            )));
        }
        out.push(Image::new(side, side, px.to_vec(), Some(label))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_image_idx() {
        let img = Image::new(28, 28, (0..784).map(|i| (i % 256) as u8).collect(), None).unwrap();
        let bytes = write_idx_images(std::slice::from_ref(&img)).unwrap();
        assert_eq!(&bytes[..4], &[0, 0, 8, 3]);
        let back = parse_idx_images(Path::new("x"), &bytes).unwrap();
        assert_eq!(back, vec![img]);
    }

    #[test]
    fn idx_errors() {
        let p = Path::new("x");
        assert!(matches!(parse_idx_images(p, &[0, 0, 8, 1, 0, 0, 0, 0]), Err(DataError::MalformedFile { .. })));
        assert!(matches!(parse_idx_images(p, &[0, 0, 8]), Err(DataError::MalformedFile { .. })));
        let mut short = write_idx_images(&[Image::new(2, 2, vec![1, 2, 3, 4], None).unwrap()]).unwrap();
        short.pop();
        assert!(matches!(parse_idx_images(p, &short), Err(DataError::DimensionMismatch(_))));
        assert!(matches!(parse_idx_labels(p, &[0, 0, 8, 1, 0, 0, 0, 2, 7]), Err(DataError::DimensionMismatch(_))));
    }

    #[test]
    fn pixel_scaling() {
        assert!(Pixel(0).value().is_zero());
        assert_eq!(Pixel(128).value(), dslot_core::sdnum::Dyadic::new(1, 1));
    }

    #[test]
    fn pgm_ascii_and_binary() {
        let p = Path::new("x.pgm");
        let a = parse_pgm(p, b"P2\n# comment\n3 2\n255\n0 1 2\n3 4 255\n", Some(4)).unwrap();
        assert_eq!((a.rows, a.cols, a.label), (2, 3, Some(4)));
        assert_eq!(a.pixels, vec![0, 1, 2, 3, 4, 255]);
        let mut raw = b"P5 3 2 255\n".to_vec();
        raw.extend_from_slice(&[0, 1, 2, 3, 4, 255]);
        assert_eq!(parse_pgm(p, &raw, Some(4)).unwrap(), a);
        assert!(matches!(parse_pgm(p, b"P5 3 2 65535\n", None), Err(DataError::MalformedFile { .. })));
        assert!(matches!(parse_pgm(p, b"P2 3 2 255\n1 2 3\n", None), Err(DataError::DimensionMismatch(_))));
    }

    #[test]
    fn format_names() {
        assert_eq!("IDX".parse::<ImageFormat>(), Ok(ImageFormat::Idx));
        assert!("png".parse::<ImageFormat>().is_err());
    }
}
