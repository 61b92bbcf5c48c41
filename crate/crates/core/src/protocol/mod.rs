//! Semi-federated round protocol and its building blocks.

mod aggregate;
mod buffer;
mod executor;
mod prune;
mod round;
mod selection;
mod strategy;
mod training;

pub use aggregate::aggregate;
pub use buffer::ServerBuffer;
pub use executor::{Executor, Sequential};
pub use prune::{prune, prune_in_place};
pub use round::{build_devices, Mode, RoundReport, Simulation};
pub use selection::{select_cl_uploaders, select_topk_updates};
pub use strategy::{generate_strategy, DeviceReport, LearningStrategy, StrategyDecision};
pub use training::{
    local_train, pseudo_gradient, server_central_train, sgd_epochs, FlUpdate, TrainOutcome,
};
