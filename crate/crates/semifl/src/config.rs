//! Run configuration.
//!
//! A [`RunConfig`] fully determines a run. Every field has a default, so a
//! JSON file only needs the fields it changes; unknown fields are rejected.
//! The resolved configuration (defaults filled in, dataset directory made
//! explicit) is what gets written to `config.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use semifl_core::data::SelectionPolicy;
use semifl_core::protocol::{LearningStrategy, Mode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid config field `{field}`: {reason}")]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: String,
}

impl ConfigError {
    fn new(field: &'static str, reason: impl Into<String>) -> Self {
        Self {
            field,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("cannot read config {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config {}: {source}", path.display())]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSpec {
    /// IDX files in `dir` (falls back to `SEMIFL_DATA_DIR`). The training set
    /// is reduced to a seeded `train_fraction` subsample; the test set is
    /// always used whole.
    FashionMnist {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dir: Option<PathBuf>,
        #[serde(default = "one")]
        train_fraction: f64,
    },
    /// Gaussian class clusters; the first `train_samples` train, the rest
    /// test.
    Synthetic {
        #[serde(default = "synthetic_train")]
        train_samples: usize,
        #[serde(default = "synthetic_test")]
        test_samples: usize,
        #[serde(default = "synthetic_dim")]
        dim: usize,
        #[serde(default = "synthetic_classes")]
        classes: usize,
    },
}

fn one() -> f64 {
    1.0
}
fn synthetic_train() -> usize {
    2000
}
fn synthetic_test() -> usize {
    500
}
fn synthetic_dim() -> usize {
    784
}
fn synthetic_classes() -> usize {
    10
}

impl DatasetSpec {
    pub fn synthetic() -> Self {
        DatasetSpec::Synthetic {
            train_samples: synthetic_train(),
            test_samples: synthetic_test(),
            dim: synthetic_dim(),
            classes: synthetic_classes(),
        }
    }

    pub fn fashion_mnist(dir: Option<PathBuf>) -> Self {
        DatasetSpec::FashionMnist {
            dir,
            train_fraction: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(with = "mode_name")]
    pub mode: Mode,
    pub dataset: DatasetSpec,
    /// Compute-limited devices get ids `0..num_cl`, the rest follow.
    pub num_cl: usize,
    pub num_fl: usize,
    pub cl_capability: f64,
    pub fl_capability: f64,
    /// Devices with capability below this are compute-limited.
    pub threshold: f64,
    pub labels_per_device: usize,
    pub hidden_units: usize,

    pub cl_uploaders: usize,
    pub fl_updaters: usize,
    pub sample_fraction: f64,
    pub pruning_sparsity: f64,
    pub local_epochs: usize,
    pub server_epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    #[serde(with = "selection_name")]
    pub selection: SelectionPolicy,

    pub rounds: u64,
    /// Evaluate on the test set every `eval_every` rounds and after the last.
    pub eval_every: u64,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Train devices on the rayon pool. Results do not depend on it.
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = LearningStrategy::default();
        Self {
            mode: Mode::SemiFl,
            dataset: DatasetSpec::fashion_mnist(None),
            num_cl: 4,
            num_fl: 6,
            cl_capability: 1.0,
            fl_capability: 5.0,
            threshold: 3.0,
            labels_per_device: 2,
            hidden_units: 128,
            cl_uploaders: s.cl_uploaders,
            fl_updaters: s.fl_updaters,
            sample_fraction: s.sample_fraction,
            pruning_sparsity: s.pruning_sparsity,
            local_epochs: s.local_epochs,
            server_epochs: s.server_epochs,
            batch_size: s.batch_size,
            learning_rate: s.learning_rate,
            selection: s.selection,
            rounds: 100,
            eval_every: 10,
            seed: 0,
            out_dir: PathBuf::from("out"),
            parallel: true,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigFileError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigFileError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|source| ConfigFileError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("config serializes");
        text.push('\n');
        text
    }

    pub fn strategy(&self) -> LearningStrategy {
        LearningStrategy {
            cl_uploaders: self.cl_uploaders,
            fl_updaters: self.fl_updaters,
            sample_fraction: self.sample_fraction,
            pruning_sparsity: self.pruning_sparsity,
            local_epochs: self.local_epochs,
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            server_epochs: self.server_epochs,
            selection: self.selection,
        }
    }

    /// Capability of each device in id order.
    pub fn capabilities(&self) -> Vec<f64> {
        let mut caps = vec![self.cl_capability; self.num_cl];
        caps.resize(self.num_cl + self.num_fl, self.fl_capability);
        caps
    }

    /// Checks every field on its own and the combinations the protocol
    /// needs. The error names the first offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = ConfigError::new;
        if self.rounds == 0 {
            return Err(err("rounds", "must be at least 1"));
        }
        if self.eval_every == 0 {
            return Err(err("eval_every", "must be at least 1"));
        }
        if self.num_cl + self.num_fl == 0 {
            return Err(err("num_cl", "num_cl + num_fl must be at least 1"));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(err("threshold", "must be positive and finite"));
        }
        if !(self.cl_capability >= 0.0 && self.cl_capability < self.threshold) {
            return Err(err("cl_capability", "must be in [0, threshold)"));
        }
        if !(self.fl_capability >= self.threshold && self.fl_capability.is_finite()) {
            return Err(err(
                "fl_capability",
                "must be finite and at least threshold",
            ));
        }
        if self.hidden_units == 0 {
            return Err(err("hidden_units", "must be at least 1"));
        }
        if !(self.sample_fraction > 0.0 && self.sample_fraction <= 1.0) {
            return Err(err("sample_fraction", "must be in (0, 1]"));
        }
        if !(self.pruning_sparsity >= 0.0 && self.pruning_sparsity < 1.0) {
            return Err(err("pruning_sparsity", "must be in [0, 1)"));
        }
        if self.local_epochs == 0 {
            return Err(err("local_epochs", "must be at least 1"));
        }
        if self.server_epochs == 0 {
            return Err(err("server_epochs", "must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(err("batch_size", "must be at least 1"));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(err("learning_rate", "must be finite and non-negative"));
        }
        if self.mode == Mode::SemiFl && self.num_fl > 0 && self.fl_updaters == 0 {
            return Err(err(
                "fl_updaters",
                "must be at least 1 when FL devices exist",
            ));
        }
        if self.mode == Mode::FlOnly && self.num_fl == 0 {
            return Err(err("mode", "fl_only needs at least one FL device"));
        }
        let classes = match &self.dataset {
            DatasetSpec::FashionMnist { train_fraction, .. } => {
                if !(*train_fraction > 0.0 && *train_fraction <= 1.0) {
                    return Err(err("dataset.train_fraction", "must be in (0, 1]"));
                }
                semifl_core::data::idx::IDX_CLASSES
            }
            DatasetSpec::Synthetic {
                train_samples,
                test_samples,
                dim,
                classes,
            } => {
                if !(2..=256).contains(classes) {
                    return Err(err("dataset.classes", "must be in 2..=256"));
                }
                if *train_samples < *classes {
                    return Err(err("dataset.train_samples", "must be at least classes"));
                }
                if *test_samples == 0 {
                    return Err(err("dataset.test_samples", "must be at least 1"));
                }
                if *dim == 0 {
                    return Err(err("dataset.dim", "must be at least 1"));
                }
                *classes
            }
        };
        if self.labels_per_device == 0 || self.labels_per_device > classes {
            return Err(ConfigError::new(
                "labels_per_device",
                format!("must be in 1..={classes}"),
            ));
        }
        Ok(())
    }
}

mod mode_name {
    use semifl_core::protocol::Mode;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(mode: &Mode, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(mode.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mode, D::Error> {
        let name = String::deserialize(d)?;
        name.parse().map_err(de::Error::custom)
    }
}

mod selection_name {
    use semifl_core::data::SelectionPolicy;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(policy: &SelectionPolicy, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match policy {
            SelectionPolicy::Uniform => "uniform",
            SelectionPolicy::LossRanked => "loss_ranked",
        })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<SelectionPolicy, D::Error> {
        match String::deserialize(d)?.as_str() {
            "uniform" => Ok(SelectionPolicy::Uniform),
            "loss_ranked" => Ok(SelectionPolicy::LossRanked),
            other => Err(de::Error::custom(format!(
                "unknown selection `{other}`, expected uniform or loss_ranked"
            ))),
        }
    }
}
