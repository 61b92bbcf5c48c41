use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{prune, LearningStrategy, ServerBuffer};
use crate::data::{DataShard, Dataset};
use crate::nn::{loss_and_gradient, sgd_step_in_place, BatchBuf, Gradient, ModelParams};
use crate::{Error, Result};

/// A device's pruned pseudo-gradient and how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct FlUpdate {
    pub device: usize,
    pub gradient: Gradient,
    /// Mean training loss over the final local epoch.
    pub local_loss: f64,
    pub sample_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub params: ModelParams,
    /// Sample-weighted mean of the mini-batch losses of the last epoch, each
    /// measured before its step.
    pub last_epoch_loss: f64,
}

/// Mini-batch SGD over `indices` for `epochs` passes.
///
/// Each epoch reshuffles a copy of `indices` with `rng` and walks it in
/// batches of `batch_size`; the final batch may be short.
pub fn sgd_epochs(
    start: &ModelParams,
    dataset: &Dataset,
    indices: &[usize],
    epochs: usize,
    batch_size: usize,
    lr: f64,
    rng: &mut ChaCha8Rng,
) -> Result<TrainOutcome> {
    if indices.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if batch_size == 0 {
        return Err(Error::Config("batch_size must be at least 1".into()));
    }
    let mut params = start.clone();
    let mut order: Vec<usize> = indices.to_vec();
    let mut buf = BatchBuf::with_capacity(dataset.dim(), batch_size);
    let mut last_epoch_loss = 0.0;
    for _ in 0..epochs {
        order.shuffle(rng);
        let mut weighted = 0.0;
        for chunk in order.chunks(batch_size) {
            dataset.gather_into(chunk, &mut buf);
            let (loss, grad) = loss_and_gradient(&params, &buf.as_batch()?)?;
            weighted += loss * chunk.len() as f64;
            sgd_step_in_place(&mut params, &grad, lr)?;
        }
        last_epoch_loss = weighted / order.len() as f64;
    }
    Ok(TrainOutcome {
        params,
        last_epoch_loss,
    })
}

/// `(start - end) / lr`: the accumulated update expressed as a gradient.
/// Defined as zero when `lr == 0`.
pub fn pseudo_gradient(start: &ModelParams, end: &ModelParams, lr: f64) -> Result<Gradient> {
    start.check_shape(end, "pseudo_gradient")?;
    let mut out = start.zeros_like();
    if lr > 0.0 {
        for ((o, s), e) in out.values_mut().zip(start.values()).zip(end.values()) {
            *o = (s - e) / lr;
        }
    }
    Ok(out)
}

/// Local training on an FL device, starting from the global model.
///
/// Runs `local_epochs` of SGD, converts the result to a pseudo-gradient and
/// prunes it at `pruning_sparsity`. `seed` drives the batch order.
pub fn local_train(
    global: &ModelParams,
    dataset: &Dataset,
    shard: &DataShard,
    strategy: &LearningStrategy,
    seed: u64,
) -> Result<FlUpdate> {
    if shard.is_empty() {
        return Err(Error::Empty("device shard"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcome = sgd_epochs(
        global,
        dataset,
        shard.indices(),
        strategy.local_epochs,
        strategy.batch_size,
        strategy.learning_rate,
        &mut rng,
    )?;
    let mut gradient = pseudo_gradient(global, &outcome.params, strategy.learning_rate)?;
    if strategy.pruning_sparsity > 0.0 {
        gradient = prune(&gradient, strategy.pruning_sparsity)?;
    }
    Ok(FlUpdate {
        device: shard.owner(),
        gradient,
        local_loss: outcome.last_epoch_loss,
        sample_count: shard.len(),
    })
}

/// Centralized training at the edge server on everything uploaded so far,
/// warm-started from the global model. Returns the pseudo-gradient and the
/// buffer size; an empty buffer yields a zero gradient and count 0.
pub fn server_central_train(
    global: &ModelParams,
    dataset: &Dataset,
    buffer: &ServerBuffer,
    strategy: &LearningStrategy,
    seed: u64,
) -> Result<(Gradient, usize)> {
    if buffer.is_empty() {
        return Ok((global.zeros_like(), 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcome = sgd_epochs(
        global,
        dataset,
        buffer.indices(),
        strategy.server_epochs,
        strategy.batch_size,
        strategy.learning_rate,
        &mut rng,
    )?;
    let gradient = pseudo_gradient(global, &outcome.params, strategy.learning_rate)?;
    Ok((gradient, buffer.len()))
}
