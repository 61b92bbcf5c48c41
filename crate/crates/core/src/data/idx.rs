//! IDX container decoding and encoding (big-endian, unsigned-byte payloads).
//!
//! Images: magic `0x00000803`, then `count`, `rows`, `cols` as u32, then
//! `count * rows * cols` pixel bytes. Labels: magic `0x00000801`, then
//! `count`, then `count` label bytes.

use alloc::vec::Vec;
use core::fmt;

use super::{Dataset, Split};

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;
pub const IDX_CLASSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdxFile {
    Images,
    Labels,
}

impl fmt::Display for IdxFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdxFile::Images => "images file",
            IdxFile::Labels => "labels file",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdxError {
    #[error("{file}: bad magic number {found:#010x}, expected {expected:#010x}")]
    BadMagic {
        file: IdxFile,
        expected: u32,
        found: u32,
    },
    #[error("{file}: truncated, need {needed} bytes but found {actual}")]
    Truncated {
        file: IdxFile,
        needed: usize,
        actual: usize,
    },
    #[error("{file}: {extra} unexpected trailing bytes")]
    TrailingBytes { file: IdxFile, extra: usize },
    #[error("count mismatch: images file holds {images} samples, labels file holds {labels}")]
    CountMismatch { images: usize, labels: usize },
    #[error("{file}: holds no samples")]
    Empty { file: IdxFile },
    #[error("labels file: label {label} at position {position} is not below {IDX_CLASSES}")]
    LabelOutOfRange { position: usize, label: u8 },
}

fn read_u32(bytes: &[u8], offset: usize, file: IdxFile) -> Result<u32, IdxError> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(IdxError::Truncated {
            file,
            needed: offset + 4,
            actual: bytes.len(),
        })
}

fn check_payload(
    bytes: &[u8],
    header: usize,
    payload: usize,
    file: IdxFile,
) -> Result<(), IdxError> {
    let needed = header + payload;
    if bytes.len() < needed {
        return Err(IdxError::Truncated {
            file,
            needed,
            actual: bytes.len(),
        });
    }
    if bytes.len() > needed {
        return Err(IdxError::TrailingBytes {
            file,
            extra: bytes.len() - needed,
        });
    }
    Ok(())
}

/// Decoded image file header plus a borrowed pixel payload.
#[derive(Debug, Clone, Copy)]
pub struct IdxImages<'a> {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: &'a [u8],
}

pub fn decode_images(bytes: &[u8]) -> Result<IdxImages<'_>, IdxError> {
    let file = IdxFile::Images;
    let magic = read_u32(bytes, 0, file)?;
    if magic != IMAGES_MAGIC {
        return Err(IdxError::BadMagic {
            file,
            expected: IMAGES_MAGIC,
            found: magic,
        });
    }
    let count = read_u32(bytes, 4, file)? as usize;
    let rows = read_u32(bytes, 8, file)? as usize;
    let cols = read_u32(bytes, 12, file)? as usize;
    check_payload(bytes, 16, count * rows * cols, file)?;
    if count == 0 {
        return Err(IdxError::Empty { file });
    }
    Ok(IdxImages {
        count,
        rows,
        cols,
        pixels: &bytes[16..],
    })
}

pub fn decode_labels(bytes: &[u8]) -> Result<&[u8], IdxError> {
    let file = IdxFile::Labels;
    let magic = read_u32(bytes, 0, file)?;
    if magic != LABELS_MAGIC {
        return Err(IdxError::BadMagic {
            file,
            expected: LABELS_MAGIC,
            found: magic,
        });
    }
    let count = read_u32(bytes, 4, file)? as usize;
    check_payload(bytes, 8, count, file)?;
    if count == 0 {
        return Err(IdxError::Empty { file });
    }
    let labels = &bytes[8..];
    if let Some((position, &label)) = labels
        .iter()
        .enumerate()
        .find(|(_, &l)| l as usize >= IDX_CLASSES)
    {
        return Err(IdxError::LabelOutOfRange { position, label });
    }
    Ok(labels)
}

/// Builds a dataset from raw IDX file contents, scaling pixels by `1/255`.
pub fn dataset_from_idx(
    images: &[u8],
    labels: &[u8],
    split: Split,
) -> Result<Dataset, crate::Error> {
    let images = decode_images(images)?;
    let labels = decode_labels(labels)?;
    if images.count != labels.len() {
        return Err(IdxError::CountMismatch {
            images: images.count,
            labels: labels.len(),
        }
        .into());
    }
    let features = images.pixels.iter().map(|&p| p as f64 / 255.0).collect();
    Dataset::new(
        features,
        labels.to_vec(),
        images.rows * images.cols,
        IDX_CLASSES,
        split,
    )
}

pub fn encode_images(rows: usize, cols: usize, pixels: &[u8]) -> Vec<u8> {
    assert!(rows * cols > 0 && pixels.len() % (rows * cols) == 0);
    let count = pixels.len() / (rows * cols);
    let mut out = Vec::with_capacity(16 + pixels.len());
    for word in [IMAGES_MAGIC, count as u32, rows as u32, cols as u32] {
        out.extend_from_slice(&word.to_be_bytes());
    }
    out.extend_from_slice(pixels);
    out
}

pub fn encode_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}
