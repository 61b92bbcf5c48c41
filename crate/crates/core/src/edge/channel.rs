//! Flat Rayleigh fading: the per-round power gain of each device is an
//! independent Exponential(1) draw. Only the ranking of gains matters to the
//! protocol, so units are arbitrary.

use alloc::collections::BTreeMap;

use rand::Rng;

use crate::seed::{stream, Purpose};

/// Gain of `device` in `round`; a pure function of its arguments.
pub fn channel_gain(seed: u64, round: u64, device: usize) -> f64 {
    let mut rng = stream(seed, Purpose::Channel, round, device as u64);
    let u: f64 = rng.gen();
    // Inverse CDF of Exp(1); 1 - u lies in (0, 1].
    -libm::log(1.0 - u)
}

pub fn sample_channel_gains(
    devices: impl IntoIterator<Item = usize>,
    round: u64,
    seed: u64,
) -> BTreeMap<usize, f64> {
    devices
        .into_iter()
        .map(|id| (id, channel_gain(seed, round, id)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_nonnegative() {
        assert_eq!(
            channel_gain(5, 2, 3).to_bits(),
            channel_gain(5, 2, 3).to_bits()
        );
        assert_ne!(channel_gain(5, 2, 3), channel_gain(5, 3, 3));
        let table = sample_channel_gains(0..10, 4, 1);
        assert_eq!(table, sample_channel_gains(0..10, 4, 1));
        assert!(table.values().all(|&g| g >= 0.0 && g.is_finite()));
    }
}
