use alloc::vec::Vec;
use core::fmt;

use crate::data::DataShard;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComputeClass {
    /// Uploads raw samples (CL user).
    ComputeLimited,
    /// Trains locally and uploads gradients (FL user).
    ComputeSufficient,
}

impl fmt::Display for ComputeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComputeClass::ComputeLimited => "compute_limited",
            ComputeClass::ComputeSufficient => "compute_sufficient",
        })
    }
}

/// Capabilities strictly below `threshold` are compute-limited.
pub fn classify(capability: f64, threshold: f64) -> ComputeClass {
    if capability < threshold {
        ComputeClass::ComputeLimited
    } else {
        ComputeClass::ComputeSufficient
    }
}

pub fn classify_devices(capabilities: &[f64], threshold: f64) -> Vec<ComputeClass> {
    capabilities
        .iter()
        .map(|&c| classify(c, threshold))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Device {
    id: usize,
    class: ComputeClass,
    capability: f64,
    shard: DataShard,
    channel_gain: f64,
}

impl Device {
    /// The compute class is fixed at creation from `capability` and
    /// `threshold`.
    pub fn new(id: usize, capability: f64, threshold: f64, shard: DataShard) -> Self {
        Self {
            id,
            class: classify(capability, threshold),
            capability,
            shard,
            channel_gain: 0.0,
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn class(&self) -> ComputeClass {
        self.class
    }

    pub fn is_compute_limited(&self) -> bool {
        self.class == ComputeClass::ComputeLimited
    }

    pub fn capability(&self) -> f64 {
        self.capability
    }

    pub fn shard(&self) -> &DataShard {
        &self.shard
    }

    pub fn channel_gain(&self) -> f64 {
        self.channel_gain
    }

    pub fn set_channel_gain(&mut self, gain: f64) {
        debug_assert!(gain >= 0.0);
        self.channel_gain = gain;
    }
}
