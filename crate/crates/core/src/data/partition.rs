//! Label-restricted non-IID partitioning.
//!
//! The labels present in the dataset are shuffled with the partition seed.
//! Device `d` owns the `labels_per_device` consecutive labels starting at
//! slot `d * labels_per_device` of that permutation (wrapping around), so
//! every label is owned by at least one device whenever
//! `devices * labels_per_device >= labels present`. Each label's samples are
//! shuffled and split into near-equal contiguous chunks among its owners in
//! ascending device order. Samples of unowned labels stay unassigned.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::Dataset;
use crate::seed::{stream, Purpose};
use crate::{Error, Result};

/// A device's sample indices into the training set, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataShard {
    owner: usize,
    indices: Vec<usize>,
    histogram: Vec<usize>,
}

impl DataShard {
    pub fn new(owner: usize, mut indices: Vec<usize>, dataset: &Dataset) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("shard indices must be unique".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= dataset.len()) {
            return Err(Error::Config(alloc::format!(
                "shard index {bad} outside dataset of {} samples",
                dataset.len()
            )));
        }
        let histogram = dataset.histogram(&indices);
        Ok(Self {
            owner,
            indices,
            histogram,
        })
    }

    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn histogram(&self) -> &[usize] {
        &self.histogram
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Number of labels with at least one sample.
    pub fn distinct_labels(&self) -> usize {
        self.histogram.iter().filter(|&&n| n > 0).count()
    }
}

pub fn partition_non_iid(
    dataset: &Dataset,
    devices: usize,
    labels_per_device: usize,
    seed: u64,
) -> Result<Vec<DataShard>> {
    if devices == 0 {
        return Err(Error::Config("partition needs at least one device".into()));
    }
    let by_class = dataset.indices_by_class();
    let mut present: Vec<usize> = (0..by_class.len())
        .filter(|&c| !by_class[c].is_empty())
        .collect();
    if labels_per_device == 0 || labels_per_device > present.len() {
        return Err(Error::Config(alloc::format!(
            "labels_per_device must be in 1..={} (labels present), got {labels_per_device}",
            present.len()
        )));
    }

    let mut rng = stream(seed, Purpose::Partition, 0, 0);
    present.shuffle(&mut rng);

    let mut owners: Vec<Vec<usize>> = alloc::vec![Vec::new(); by_class.len()];
    for device in 0..devices {
        for slot in 0..labels_per_device {
            let label = present[(device * labels_per_device + slot) % present.len()];
            owners[label].push(device);
        }
    }

    let mut assigned: Vec<Vec<usize>> = alloc::vec![Vec::new(); devices];
    for (label, label_owners) in owners.iter().enumerate() {
        if label_owners.is_empty() {
            continue;
        }
        let mut pool = by_class[label].clone();
        if pool.len() < label_owners.len() {
            return Err(Error::Config(alloc::format!(
                "label {label} has {} samples but {} owning devices",
                pool.len(),
                label_owners.len()
            )));
        }
        let mut label_rng = stream(seed, Purpose::Partition, 1, label as u64);
        pool.shuffle(&mut label_rng);
        let base = pool.len() / label_owners.len();
        let extra = pool.len() % label_owners.len();
        let mut start = 0;
        for (k, &device) in label_owners.iter().enumerate() {
            let take = base + usize::from(k < extra);
            assigned[device].extend_from_slice(&pool[start..start + take]);
            start += take;
        }
    }

    assigned
        .into_iter()
        .enumerate()
        .map(|(device, indices)| DataShard::new(device, indices, dataset))
        .collect()
}
