//! Dense MLP used identically by FL devices and the edge server.

mod batch;
mod linalg;
mod mlp;
mod params;

pub use batch::{Batch, BatchBuf};
pub use mlp::{
    argmax, backward, evaluate, forward, loss_and_gradient, per_sample_losses, sgd_step,
    sgd_step_in_place, Evaluation, Forward,
};
pub use params::{Gradient, Layer, ModelParams};

/// The 784-128-10 architecture used for Fashion-MNIST runs.
pub const FASHION_MLP: [usize; 3] = [784, 128, 10];
