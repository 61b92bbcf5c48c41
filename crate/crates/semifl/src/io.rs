//! Dataset files.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use semifl_core::data::idx::{decode_images, decode_labels, IdxError};
use semifl_core::data::{dataset_from_idx, Dataset, Split};

/// Dataset directory used when the config does not name one.
pub const DATA_DIR_ENV: &str = "SEMIFL_DATA_DIR";

pub const TRAIN_IMAGES: &str = "train-images-idx3-ubyte";
pub const TRAIN_LABELS: &str = "train-labels-idx1-ubyte";
pub const TEST_IMAGES: &str = "t10k-images-idx3-ubyte";
pub const TEST_LABELS: &str = "t10k-labels-idx1-ubyte";

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Decode { path: PathBuf, source: IdxError },
    #[error("{} with {}: {source}", images.display(), labels.display())]
    Mismatch {
        images: PathBuf,
        labels: PathBuf,
        source: semifl_core::Error,
    },
    #[error("no dataset directory: set dataset.dir, pass --dataset <dir>, or set {DATA_DIR_ENV}")]
    NoDirectory,
}

fn read(path: &Path) -> Result<Vec<u8>, LoadError> {
    fs::read(path).map_err(|source| LoadError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads one IDX image/label pair. Errors name the file at fault.
pub fn load_idx(images: &Path, labels: &Path, split: Split) -> Result<Dataset, LoadError> {
    let image_bytes = read(images)?;
    let label_bytes = read(labels)?;
    decode_images(&image_bytes).map_err(|source| LoadError::Decode {
        path: images.to_path_buf(),
        source,
    })?;
    decode_labels(&label_bytes).map_err(|source| LoadError::Decode {
        path: labels.to_path_buf(),
        source,
    })?;
    dataset_from_idx(&image_bytes, &label_bytes, split).map_err(|source| LoadError::Mismatch {
        images: images.to_path_buf(),
        labels: labels.to_path_buf(),
        source,
    })
}

/// The configured directory, else `SEMIFL_DATA_DIR`.
pub fn resolve_data_dir(configured: Option<&Path>) -> Result<PathBuf, LoadError> {
    if let Some(dir) = configured {
        return Ok(dir.to_path_buf());
    }
    match env::var_os(DATA_DIR_ENV) {
        Some(dir) if !dir.is_empty() => Ok(PathBuf::from(dir)),
        _ => Err(LoadError::NoDirectory),
    }
}

/// Train and test sets from the four standard uncompressed IDX files.
pub fn load_fashion_mnist(dir: &Path) -> Result<(Dataset, Dataset), LoadError> {
    let train = load_idx(
        &dir.join(TRAIN_IMAGES),
        &dir.join(TRAIN_LABELS),
        Split::Train,
    )?;
    let test = load_idx(&dir.join(TEST_IMAGES), &dir.join(TEST_LABELS), Split::Test)?;
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use semifl_core::data::idx::{encode_images, encode_labels};

    #[test]
    fn errors_name_the_bad_file() {
        let dir = tempfile::tempdir().unwrap();
        let images = dir.path().join("imgs");
        let labels = dir.path().join("lbls");
        fs::write(&images, encode_images(2, 2, &[0, 255, 0, 255, 9, 9, 9, 9])).unwrap();
        fs::write(&labels, b"garbage").unwrap();
        let e = load_idx(&images, &labels, Split::Train).unwrap_err();
        assert!(e.to_string().contains("lbls"), "{e}");

        fs::write(&labels, encode_labels(&[1, 2, 3])).unwrap();
        let e = load_idx(&images, &labels, Split::Train).unwrap_err();
        assert!(matches!(e, LoadError::Mismatch { .. }), "{e}");

        fs::write(&labels, encode_labels(&[1, 2])).unwrap();
        let ds = load_idx(&images, &labels, Split::Train).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.sample(0), &[0.0, 1.0, 0.0, 1.0]);

        let e = load_idx(&dir.path().join("missing"), &labels, Split::Train).unwrap_err();
        assert!(e.to_string().contains("missing"));
    }
}
