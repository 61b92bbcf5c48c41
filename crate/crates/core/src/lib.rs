//! Semi-federated learning simulator core.
//!
//! A population of edge devices is split into computing-limited (CL) devices,
//! which upload raw samples to the edge server, and computing-sufficient (FL)
//! devices, which train locally and upload gradients. The server trains on the
//! samples it has collected and fuses the resulting gradient with the device
//! gradients into one global model update per round.
//!
//! The crate is `no_std` (with `alloc`) and performs no IO. File formats,
//! configuration, and the experiment runner live in the `semifl` crate.
//!
//! Module map:
//!
//! - [`nn`]: dense MLP with manual backpropagation, SGD, evaluation.
//! - [`data`]: datasets, IDX decoding, synthetic data, non-IID partitioning,
//!   sample selection.
//! - [`edge`]: devices, compute classification, channel gains, byte ledger.
//! - [`protocol`]: learning strategy, local/server training, pruning,
//!   selection, aggregation, and the round state machine.
//! - [`seed`]: derivation of independent per-purpose random streams from one
//!   run seed.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod data;
pub mod edge;
mod error;
pub mod nn;
pub mod protocol;
pub mod seed;

pub use error::{Error, Result};

/// Number of elements selected when keeping `fraction` of `n` items,
/// rounded up.
///
/// Products that land within floating-point noise of an integer are snapped to
/// it first, so `0.6 * 101_770` counts as exactly `61_062`.
pub fn ceil_count(fraction: f64, n: usize) -> usize {
    let exact = fraction * n as f64;
    let nearest = libm::round(exact);
    let count = if libm::fabs(exact - nearest) <= 1e-9 * libm::fmax(1.0, exact) {
        nearest
    } else {
        libm::ceil(exact)
    };
    (count.max(0.0) as usize).min(n)
}
