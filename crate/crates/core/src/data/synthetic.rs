//! Gaussian class clusters in the unit hypercube.
//!
//! Class `c` has mean `0.5 + delta * s_c`, where `s_c` is a seeded random sign
//! vector and `2 * delta = SEPARATION * NOISE_STD`: in every coordinate the two
//! mean levels sit `SEPARATION` noise deviations apart. Samples add isotropic
//! Gaussian noise and are clamped to `[0, 1]`. Labels cycle `0, 1, .., C-1, 0, ..`, so every prefix
//! of the dataset is close to class-balanced.

use alloc::vec::Vec;

use rand::Rng;

use super::{Dataset, Split};
use crate::seed::{stream, Purpose};
use crate::{Error, Result};

pub const NOISE_STD: f64 = 0.15;
pub const SEPARATION: f64 = 5.0;

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
}

pub fn generate_synthetic(
    num_samples: usize,
    num_classes: usize,
    dim: usize,
    seed: u64,
) -> Result<Dataset> {
    if num_classes == 0 || num_classes > 256 {
        return Err(Error::Config(
            "synthetic num_classes must be in 1..=256".into(),
        ));
    }
    if num_samples < num_classes {
        return Err(Error::Config(
            "synthetic num_samples must be at least num_classes".into(),
        ));
    }
    if dim == 0 {
        return Err(Error::Config("synthetic dim must be positive".into()));
    }
    let mut rng = stream(seed, Purpose::Synthetic, num_classes as u64, dim as u64);
    let offset = SEPARATION * NOISE_STD / 2.0;

    let means: Vec<Vec<f64>> = (0..num_classes)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    if rng.gen::<bool>() {
                        0.5 + offset
                    } else {
                        0.5 - offset
                    }
                })
                .collect()
        })
        .collect();

    let mut features = Vec::with_capacity(num_samples * dim);
    let mut labels = Vec::with_capacity(num_samples);
    for i in 0..num_samples {
        let class = i % num_classes;
        for &mu in &means[class] {
            let x = mu + NOISE_STD * standard_normal(&mut rng);
            features.push(x.clamp(0.0, 1.0));
        }
        labels.push(class as u8);
    }
    Dataset::new(features, labels, dim, num_classes, Split::Train)
}
