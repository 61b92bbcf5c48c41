//! Datasets, IDX decoding, synthetic data, partitioning, and CL sample
//! selection.

mod dataset;
pub mod idx;
mod partition;
mod selection;
mod synthetic;

pub use dataset::{Dataset, Split};
pub use idx::{dataset_from_idx, IdxError, IdxFile};
pub use partition::{partition_non_iid, DataShard};
pub use selection::{select_samples, SelectionPolicy};
pub use synthetic::{generate_synthetic, NOISE_STD, SEPARATION};
