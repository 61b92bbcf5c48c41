//! Device population, wireless channel, and communication cost.

mod channel;
mod device;
mod ledger;

pub use channel::{channel_gain, sample_channel_gains};
pub use device::{classify, classify_devices, ComputeClass, Device};
pub use ledger::{
    payload_bytes, CommLedger, Direction, Payload, PayloadKind, Transfer, CONTROL_BYTES,
    DENSE_ENTRY_BYTES, SAMPLE_BYTES, SPARSE_ENTRY_BYTES,
};
