//! Uplink/downlink byte accounting.

use alloc::vec::Vec;
use core::fmt;

use crate::{ceil_count, Error, Result};

/// Bytes per uploaded sample: 784 one-byte pixels plus a one-byte label.
pub const SAMPLE_BYTES: u64 = 784 + 1;
/// Bytes per dense parameter (f32 on the wire).
pub const DENSE_ENTRY_BYTES: u64 = 4;
/// Bytes per surviving sparse entry: f32 value plus u32 index.
pub const SPARSE_ENTRY_BYTES: u64 = 4 + 4;
/// Fixed size of device reports and strategy notices.
pub const CONTROL_BYTES: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Uplink,
    Downlink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PayloadKind {
    Samples,
    Gradient,
    Model,
    Report,
    Strategy,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Uplink => "uplink",
            Direction::Downlink => "downlink",
        }
    }
}

impl PayloadKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PayloadKind::Samples => "samples",
            PayloadKind::Gradient => "gradient",
            PayloadKind::Model => "model",
            PayloadKind::Report => "report",
            PayloadKind::Strategy => "strategy",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for PayloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What is being sent, with the counts needed to size it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Payload {
    Samples {
        count: usize,
    },
    /// Dense gradient or model with `params` entries.
    Dense {
        params: usize,
    },
    /// Gradient pruned at `sparsity`; `ceil((1 - sparsity) * params)`
    /// entries survive.
    Pruned {
        params: usize,
        sparsity: f64,
    },
    Report,
    Strategy,
}

pub fn payload_bytes(payload: Payload) -> Result<u64> {
    Ok(match payload {
        Payload::Samples { count } => count as u64 * SAMPLE_BYTES,
        Payload::Dense { params } => params as u64 * DENSE_ENTRY_BYTES,
        Payload::Pruned { params, sparsity } => {
            if !(0.0..=1.0).contains(&sparsity) {
                return Err(Error::Config(alloc::format!(
                    "sparsity must be in [0, 1], got {sparsity}"
                )));
            }
            ceil_count(1.0 - sparsity, params) as u64 * SPARSE_ENTRY_BYTES
        }
        Payload::Report | Payload::Strategy => CONTROL_BYTES,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transfer {
    pub round: u64,
    pub device: usize,
    pub direction: Direction,
    pub kind: PayloadKind,
    pub bytes: u64,
}

/// Itemized transfers with running totals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommLedger {
    entries: Vec<Transfer>,
    uplink: u64,
    downlink: u64,
}

impl CommLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(
        &mut self,
        round: u64,
        device: usize,
        direction: Direction,
        kind: PayloadKind,
        bytes: u64,
    ) {
        match direction {
            Direction::Uplink => self.uplink += bytes,
            Direction::Downlink => self.downlink += bytes,
        }
        self.entries.push(Transfer {
            round,
            device,
            direction,
            kind,
            bytes,
        });
    }

    pub fn entries(&self) -> &[Transfer] {
        &self.entries
    }

    pub fn uplink_total(&self) -> u64 {
        self.uplink
    }

    pub fn downlink_total(&self) -> u64 {
        self.downlink
    }

    pub fn total(&self, direction: Direction) -> u64 {
        match direction {
            Direction::Uplink => self.uplink,
            Direction::Downlink => self.downlink,
        }
    }

    pub fn round_total(&self, round: u64, direction: Direction) -> u64 {
        self.entries
            .iter()
            .filter(|t| t.round == round && t.direction == direction)
            .map(|t| t.bytes)
            .sum()
    }

    pub fn count(&self, round: u64, direction: Direction, kind: PayloadKind) -> usize {
        self.entries
            .iter()
            .filter(|t| t.round == round && t.direction == direction && t.kind == kind)
            .count()
    }
}
