use alloc::vec::Vec;

use super::FlUpdate;

/// Ids of the `n` candidates with the largest channel gain, best first.
/// Equal gains favour the lower id. Asking for more than are available
/// returns all of them.
pub fn select_cl_uploaders(candidates: &[(usize, f64)], n: usize) -> Vec<usize> {
    let mut ranked = candidates.to_vec();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.into_iter().take(n).map(|(id, _)| id).collect()
}

/// The `k` updates with the lowest local training loss, best first. Equal
/// losses favour the lower device id.
pub fn select_topk_updates(mut updates: Vec<FlUpdate>, k: usize) -> Vec<FlUpdate> {
    updates.sort_by(|a, b| {
        a.local_loss
            .total_cmp(&b.local_loss)
            .then(a.device.cmp(&b.device))
    });
    updates.truncate(k);
    updates
}
