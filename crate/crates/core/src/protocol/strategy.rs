use alloc::vec::Vec;

use crate::data::SelectionPolicy;
use crate::edge::ComputeClass;
use crate::{Error, Result};

/// Per-run hyperparameters the edge platform notifies to all devices.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningStrategy {
    /// CL devices uploading samples per round (top-N channels).
    pub cl_uploaders: usize,
    /// FL devices whose updates are aggregated per round (top-K models).
    pub fl_updaters: usize,
    /// Fraction of a selected CL device's not-yet-uploaded samples sent per
    /// round, in `(0, 1]`.
    pub sample_fraction: f64,
    /// Fraction of uploaded gradient entries zeroed, in `[0, 1)`.
    pub pruning_sparsity: f64,
    pub local_epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub server_epochs: usize,
    pub selection: SelectionPolicy,
}

impl Default for LearningStrategy {
    fn default() -> Self {
        Self {
            cl_uploaders: 2,
            fl_updaters: 4,
            sample_fraction: 0.2,
            pruning_sparsity: 0.6,
            local_epochs: 2,
            batch_size: 32,
            learning_rate: 0.05,
            server_epochs: 2,
            selection: SelectionPolicy::Uniform,
        }
    }
}

impl LearningStrategy {
    /// Range checks that do not depend on the population.
    ///
    /// A learning rate of zero is accepted; it freezes the global model.
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_fraction > 0.0 && self.sample_fraction <= 1.0) {
            return Err(Error::Config(alloc::format!(
                "sample_fraction must be in (0, 1], got {}",
                self.sample_fraction
            )));
        }
        if !(self.pruning_sparsity >= 0.0 && self.pruning_sparsity < 1.0) {
            return Err(Error::Config(alloc::format!(
                "pruning_sparsity must be in [0, 1), got {}",
                self.pruning_sparsity
            )));
        }
        if self.local_epochs == 0 {
            return Err(Error::Config("local_epochs must be at least 1".into()));
        }
        if self.server_epochs == 0 {
            return Err(Error::Config("server_epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(alloc::format!(
                "learning_rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// What a device tells the edge platform in the initialization stage.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceReport {
    pub device: usize,
    pub class: ComputeClass,
    pub capability: f64,
    pub data_amount: usize,
    pub label_histogram: Vec<usize>,
    pub channel_gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyDecision {
    pub strategy: LearningStrategy,
    /// Set when N or K had to be reduced to fit the population.
    pub clamped: bool,
}

/// Validates `requested` against the reporting population, clamping N and K
/// to the number of CL and FL devices.
///
/// K = 0 is rejected whenever FL devices exist: the federated path needs at
/// least one updater. With no FL devices, K is clamped to 0.
pub fn generate_strategy(
    reports: &[DeviceReport],
    requested: &LearningStrategy,
) -> Result<StrategyDecision> {
    if reports.is_empty() {
        return Err(Error::Empty("device population"));
    }
    requested.validate()?;
    let limited = reports
        .iter()
        .filter(|r| r.class == ComputeClass::ComputeLimited)
        .count();
    let sufficient = reports.len() - limited;
    if requested.fl_updaters == 0 && sufficient > 0 {
        return Err(Error::Config(
            "fl_updaters (K) must be at least 1 when FL devices exist".into(),
        ));
    }
    let mut strategy = requested.clone();
    let mut clamped = false;
    if strategy.cl_uploaders > limited {
        strategy.cl_uploaders = limited;
        clamped = true;
    }
    if strategy.fl_updaters > sufficient {
        strategy.fl_updaters = sufficient;
        clamped = true;
    }
    Ok(StrategyDecision { strategy, clamped })
}
