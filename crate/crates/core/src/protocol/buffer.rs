use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Samples collected from CL devices, kept across rounds in arrival order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ServerBuffer {
    samples: Vec<usize>,
    seen: BTreeSet<(usize, usize)>,
}

impl ServerBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `indices` uploaded by `device`. The whole upload is rejected if
    /// any `(device, index)` pair is already held or repeats within it.
    pub fn insert(&mut self, device: usize, indices: &[usize]) -> Result<()> {
        let mut fresh = BTreeSet::new();
        for &index in indices {
            if self.seen.contains(&(device, index)) || !fresh.insert((device, index)) {
                return Err(Error::DuplicateSample { device, index });
            }
        }
        self.seen.append(&mut fresh);
        self.samples.extend_from_slice(indices);
        Ok(())
    }

    /// Dataset indices in arrival order.
    pub fn indices(&self) -> &[usize] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn contains(&self, device: usize, index: usize) -> bool {
        self.seen.contains(&(device, index))
    }
}
