use alloc::vec::Vec;

use super::Dataset;
use crate::nn::{per_sample_losses, ModelParams};
use crate::seed::{stream, Purpose};
use crate::{ceil_count, Error, Result};

/// How a CL device picks the samples it uploads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SelectionPolicy {
    /// Seeded sampling without replacement; result sorted ascending.
    #[default]
    Uniform,
    /// Highest per-sample loss under the current global model first; ties go
    /// to the lower index.
    LossRanked,
}

const LOSS_CHUNK: usize = 512;

/// Picks `ceil(fraction * |candidates|)` of `candidates`.
///
/// `seed` is used as-is for the uniform draw; callers derive it per device and
/// round.
pub fn select_samples(
    dataset: &Dataset,
    candidates: &[usize],
    fraction: f64,
    policy: SelectionPolicy,
    params: Option<&ModelParams>,
    seed: u64,
) -> Result<Vec<usize>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(alloc::format!(
            "sample fraction must be in (0, 1], got {fraction}"
        )));
    }
    if candidates.is_empty() {
        return Err(Error::Empty("shard"));
    }
    let count = ceil_count(fraction, candidates.len());

    match policy {
        SelectionPolicy::Uniform => {
            let mut rng = stream(seed, Purpose::SampleSelection, 0, 0);
            let mut chosen: Vec<usize> =
                rand::seq::index::sample(&mut rng, candidates.len(), count)
                    .into_iter()
                    .map(|pos| candidates[pos])
                    .collect();
            chosen.sort_unstable();
            Ok(chosen)
        }
        SelectionPolicy::LossRanked => {
            let params = params.ok_or_else(|| {
                Error::Config("loss-ranked selection needs model parameters".into())
            })?;
            let mut scored = Vec::with_capacity(candidates.len());
            for chunk in candidates.chunks(LOSS_CHUNK) {
                let buf = dataset.gather(chunk);
                let losses = per_sample_losses(params, &buf.as_batch()?)?;
                scored.extend(chunk.iter().copied().zip(losses));
            }
            scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            Ok(scored.into_iter().take(count).map(|(i, _)| i).collect())
        }
    }
}
