//! Forward pass, backpropagation, SGD, and evaluation for a ReLU MLP with a
//! softmax cross-entropy head.
//!
//! Every hidden layer applies ReLU; the last layer emits raw logits. All
//! reductions over samples run in ascending sample order.

use alloc::vec;
use alloc::vec::Vec;

use super::linalg::{gemm, View};
use super::{Batch, Gradient, ModelParams};
use crate::{Error, Result};

/// Logits `(len, classes)` row-major and mean cross-entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    pub logits: Vec<f64>,
    pub loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub loss: f64,
}

fn check_batch(params: &ModelParams, batch: &Batch<'_>) -> Result<()> {
    if batch.dim() != params.input_dim() {
        return Err(Error::Shape {
            what: "batch input width",
            expected: params.input_dim(),
            found: batch.dim(),
        });
    }
    let classes = params.output_dim();
    if let Some(&label) = batch.labels().iter().find(|&&l| l as usize >= classes) {
        return Err(Error::LabelOutOfRange {
            label: label as usize,
            classes,
        });
    }
    Ok(())
}

/// Post-activation outputs of every layer; the last entry holds the logits.
fn activations(params: &ModelParams, batch: &Batch<'_>) -> Vec<Vec<f64>> {
    let rows = batch.len();
    let last = params.layers().len() - 1;
    let mut outs: Vec<Vec<f64>> = Vec::with_capacity(params.layers().len());
    for (l, layer) in params.layers().iter().enumerate() {
        let input = if l == 0 {
            batch.features()
        } else {
            &outs[l - 1][..]
        };
        let mut z = Vec::with_capacity(rows * layer.outputs());
        for _ in 0..rows {
            z.extend_from_slice(layer.bias());
        }
        gemm(
            1.0,
            View::row_major(input, rows, layer.inputs()),
            View::row_major(layer.weights(), layer.outputs(), layer.inputs()).transposed(),
            1.0,
            &mut z,
        );
        if l != last {
            for v in &mut z {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
        outs.push(z);
    }
    outs
}

/// Numerically stable `log(sum(exp(row)))`.
fn log_sum_exp(row: &[f64]) -> f64 {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = row.iter().map(|&z| libm::exp(z - max)).sum();
    max + libm::log(sum)
}

fn sample_losses<'a>(
    logits: &'a [f64],
    labels: &'a [u8],
    classes: usize,
) -> impl Iterator<Item = f64> + 'a {
    logits
        .chunks_exact(classes)
        .zip(labels)
        .map(|(row, &y)| log_sum_exp(row) - row[y as usize])
}

fn mean_loss(logits: &[f64], labels: &[u8], classes: usize) -> f64 {
    let mut total = 0.0;
    for loss in sample_losses(logits, labels, classes) {
        total += loss;
    }
    total / labels.len() as f64
}

pub fn forward(params: &ModelParams, batch: &Batch<'_>) -> Result<Forward> {
    check_batch(params, batch)?;
    let logits = activations(params, batch).pop().unwrap_or_default();
    let loss = mean_loss(&logits, batch.labels(), params.output_dim());
    Ok(Forward { logits, loss })
}

/// Cross-entropy of every sample in the batch, in batch order.
pub fn per_sample_losses(params: &ModelParams, batch: &Batch<'_>) -> Result<Vec<f64>> {
    check_batch(params, batch)?;
    let logits = activations(params, batch).pop().unwrap_or_default();
    Ok(sample_losses(&logits, batch.labels(), params.output_dim()).collect())
}

/// Mean loss and its analytic gradient with respect to every parameter.
pub fn loss_and_gradient(params: &ModelParams, batch: &Batch<'_>) -> Result<(f64, Gradient)> {
    check_batch(params, batch)?;
    let rows = batch.len();
    let classes = params.output_dim();
    let acts = activations(params, batch);
    let logits = &acts[acts.len() - 1];
    let loss = mean_loss(logits, batch.labels(), classes);

    // d loss / d logits = (softmax - onehot) / rows
    let inv_rows = 1.0 / rows as f64;
    let mut delta = Vec::with_capacity(logits.len());
    for (row, &y) in logits.chunks_exact(classes).zip(batch.labels()) {
        let lse = log_sum_exp(row);
        for (c, &z) in row.iter().enumerate() {
            let target = if c == y as usize { 1.0 } else { 0.0 };
            delta.push((libm::exp(z - lse) - target) * inv_rows);
        }
    }

    let mut grad = params.zeros_like();
    for l in (0..params.layers().len()).rev() {
        let layer = &params.layers()[l];
        let input = if l == 0 {
            batch.features()
        } else {
            &acts[l - 1][..]
        };
        let (inputs, outputs) = (layer.inputs(), layer.outputs());
        let g = &mut grad.layers_mut()[l];

        gemm(
            1.0,
            View::row_major(&delta, rows, outputs).transposed(),
            View::row_major(input, rows, inputs),
            0.0,
            g.weights_mut(),
        );
        let bias = g.bias_mut();
        for row in delta.chunks_exact(outputs) {
            for (b, d) in bias.iter_mut().zip(row) {
                *b += d;
            }
        }

        if l > 0 {
            let mut upstream = vec![0.0; rows * inputs];
            gemm(
                1.0,
                View::row_major(&delta, rows, outputs),
                View::row_major(layer.weights(), outputs, inputs),
                0.0,
                &mut upstream,
            );
            // ReLU: post-activation > 0 exactly where pre-activation > 0.
            for (u, &a) in upstream.iter_mut().zip(input) {
                if a <= 0.0 {
                    *u = 0.0;
                }
            }
            delta = upstream;
        }
    }
    Ok((loss, grad))
}

pub fn backward(params: &ModelParams, batch: &Batch<'_>) -> Result<Gradient> {
    loss_and_gradient(params, batch).map(|(_, g)| g)
}

/// `params - lr * grad`.
pub fn sgd_step(params: &ModelParams, grad: &Gradient, lr: f64) -> Result<ModelParams> {
    let mut out = params.clone();
    sgd_step_in_place(&mut out, grad, lr)?;
    Ok(out)
}

pub fn sgd_step_in_place(params: &mut ModelParams, grad: &Gradient, lr: f64) -> Result<()> {
    if lr.is_nan() || lr < 0.0 {
        return Err(Error::Config("learning rate must be non-negative".into()));
    }
    params.check_shape(grad, "sgd_step")?;
    for (p, g) in params.values_mut().zip(grad.values()) {
        *p -= lr * g;
    }
    Ok(())
}

/// Index of the largest logit; ties go to the lowest class index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (c, &z) in row.iter().enumerate().skip(1) {
        if z > row[best] {
            best = c;
        }
    }
    best
}

const EVAL_CHUNK: usize = 1024;

pub fn evaluate(params: &ModelParams, testset: &Batch<'_>) -> Result<Evaluation> {
    if testset.is_empty() {
        return Err(Error::Empty("test set"));
    }
    check_batch(params, testset)?;
    let classes = params.output_dim();
    let mut correct = 0usize;
    let mut total_loss = 0.0;
    let mut start = 0;
    while start < testset.len() {
        let end = (start + EVAL_CHUNK).min(testset.len());
        let chunk = testset.rows(start, end);
        let logits = activations(params, &chunk).pop().unwrap_or_default();
        for (row, &y) in logits.chunks_exact(classes).zip(chunk.labels()) {
            if argmax(row) == y as usize {
                correct += 1;
            }
            total_loss += log_sum_exp(row) - row[y as usize];
        }
        start = end;
    }
    let n = testset.len() as f64;
    Ok(Evaluation {
        accuracy: correct as f64 / n,
        loss: total_loss / n,
    })
}
