//! Global magnitude pruning of uploaded gradients.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::nn::{Gradient, ModelParams};
use crate::{ceil_count, Error, Result};

/// Orders positions by magnitude, then by position.
fn by_magnitude(values: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| {
        libm::fabs(values[a])
            .total_cmp(&libm::fabs(values[b]))
            .then(a.cmp(&b))
    }
}

/// Zeroes the `ceil(sparsity * len)` smallest-magnitude entries in place.
/// Among equal magnitudes the lower position is pruned first.
pub fn prune_in_place(values: &mut [f64], sparsity: f64) -> Result<()> {
    if !(0.0..1.0).contains(&sparsity) {
        return Err(Error::Config(alloc::format!(
            "pruning sparsity must be in [0, 1), got {sparsity}"
        )));
    }
    let k = ceil_count(sparsity, values.len());
    if k == 0 {
        return Ok(());
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.select_nth_unstable_by(k - 1, by_magnitude(values));
    for &pos in &order[..k] {
        values[pos] = 0.0;
    }
    Ok(())
}

/// Magnitude pruning ranked globally across all layers in flattened order.
pub fn prune(grad: &Gradient, sparsity: f64) -> Result<Gradient> {
    let mut flat = grad.flatten();
    prune_in_place(&mut flat, sparsity)?;
    ModelParams::from_flat(&grad.dims(), &flat)
}
