//! The per-round state machine.
//!
//! One round runs three synchronous stages:
//!
//! 1. Initialization: devices report their state, the edge platform validates
//!    the learning strategy and notifies it back (SemiFL modes only).
//! 2. Model training: the top-N CL devices by channel gain upload a fraction
//!    of their not-yet-uploaded samples; every FL device trains locally and the
//!    top-K by local loss upload their pruned pseudo-gradients; the server
//!    trains on its whole buffer, warm-started from the global model.
//! 3. Feedback: the server aggregates all gradients weighted by sample count,
//!    takes one SGD step on the global model, and broadcasts it to every device.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{
    aggregate, generate_strategy, local_train, select_cl_uploaders, select_topk_updates,
    server_central_train, DeviceReport, Executor, FlUpdate, LearningStrategy, ServerBuffer,
};
use crate::data::{partition_non_iid, select_samples, Dataset};
use crate::edge::{
    payload_bytes, sample_channel_gains, CommLedger, Device, Direction, Payload, PayloadKind,
};
use crate::nn::{evaluate, sgd_step_in_place, Evaluation, ModelParams};
use crate::seed::{derive_seed, Purpose};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Full protocol with top-N uploads, sample fraction, top-K, pruning.
    SemiFl,
    /// SemiFL with every CL device uploading all its data, no pruning, and
    /// every FL device aggregated.
    SemiFlNoSelNoPrune,
    /// Every device uploads all its data once; the server trains alone.
    ClOnly,
    /// Plain federated averaging over the compute-sufficient devices.
    FlOnly,
}

impl Mode {
    pub const ALL: [Mode; 4] = [
        Mode::SemiFl,
        Mode::SemiFlNoSelNoPrune,
        Mode::ClOnly,
        Mode::FlOnly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::SemiFl => "semifl",
            Mode::SemiFlNoSelNoPrune => "semifl_no_sel_no_prune",
            Mode::ClOnly => "cl_only",
            Mode::FlOnly => "fl_only",
        }
    }

    fn runs_initialization(self) -> bool {
        matches!(self, Mode::SemiFl | Mode::SemiFlNoSelNoPrune)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == key)
            .or(match key.as_str() {
                "cl" => Some(Mode::ClOnly),
                "fl" => Some(Mode::FlOnly),
                _ => None,
            })
            .ok_or_else(|| Error::Config(alloc::format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    /// 1-based round index.
    pub round: u64,
    /// Test metrics of the updated global model, when evaluated this round.
    pub evaluation: Option<Evaluation>,
    pub uplink_bytes: u64,
    pub downlink_bytes: u64,
    pub uplink_bytes_cum: u64,
    pub downlink_bytes_cum: u64,
    /// CL devices that uploaded samples, in selection order.
    pub cl_uploaders: Vec<usize>,
    /// FL devices whose gradients were aggregated, in selection order.
    pub fl_updaters: Vec<usize>,
    pub buffer_size: usize,
    pub strategy_clamped: bool,
}

/// Builds the device population: one shard per device from the non-IID
/// partition, compute class from `capabilities[i]` against `threshold`.
pub fn build_devices(
    train: &Dataset,
    capabilities: &[f64],
    threshold: f64,
    labels_per_device: usize,
    seed: u64,
) -> Result<Vec<Device>> {
    if capabilities.is_empty() {
        return Err(Error::Empty("device population"));
    }
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::Config(
            "classification threshold must be positive".into(),
        ));
    }
    let shards = partition_non_iid(train, capabilities.len(), labels_per_device, seed)?;
    Ok(shards
        .into_iter()
        .zip(capabilities)
        .enumerate()
        .map(|(id, (shard, &capability))| Device::new(id, capability, threshold, shard))
        .collect())
}

/// Simulation state carried between rounds.
#[derive(Debug, Clone)]
pub struct Simulation<'a> {
    train: &'a Dataset,
    mode: Mode,
    seed: u64,
    round: u64,
    global: ModelParams,
    devices: Vec<Device>,
    /// Per device, the shard samples not uploaded yet (ascending).
    remaining: Vec<Vec<usize>>,
    buffer: ServerBuffer,
    ledger: CommLedger,
    requested: LearningStrategy,
    strategy: LearningStrategy,
    strategy_clamped: bool,
}

impl<'a> Simulation<'a> {
    pub fn new(
        train: &'a Dataset,
        devices: Vec<Device>,
        initial: ModelParams,
        requested: LearningStrategy,
        mode: Mode,
        seed: u64,
    ) -> Result<Self> {
        if devices.is_empty() {
            return Err(Error::Empty("device population"));
        }
        if devices.iter().enumerate().any(|(i, d)| d.id() != i) {
            return Err(Error::Config("device ids must be 0..n in order".into()));
        }
        if initial.input_dim() != train.dim() || initial.output_dim() < train.num_classes() {
            return Err(Error::Shape {
                what: "model vs dataset",
                expected: train.dim(),
                found: initial.input_dim(),
            });
        }
        let fl = devices.iter().filter(|d| !d.is_compute_limited()).count();
        if mode == Mode::FlOnly && fl == 0 {
            return Err(Error::ModeMismatch {
                mode: mode.as_str(),
                reason: String::from("no compute-sufficient devices"),
            });
        }
        let remaining = devices
            .iter()
            .map(|d| d.shard().indices().to_vec())
            .collect();
        let mut sim = Self {
            train,
            mode,
            seed,
            round: 0,
            global: initial,
            devices,
            remaining,
            buffer: ServerBuffer::new(),
            ledger: CommLedger::new(),
            strategy: requested.clone(),
            requested,
            strategy_clamped: false,
        };
        let (strategy, clamped) = sim.decide_strategy()?;
        sim.strategy = strategy;
        sim.strategy_clamped = clamped;
        Ok(sim)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Rounds completed so far.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn global(&self) -> &ModelParams {
        &self.global
    }

    pub fn devices(&self) -> &[Device] {
        &self.devices
    }

    pub fn buffer(&self) -> &ServerBuffer {
        &self.buffer
    }

    pub fn ledger(&self) -> &CommLedger {
        &self.ledger
    }

    /// The strategy in force after mode overrides and clamping.
    pub fn strategy(&self) -> &LearningStrategy {
        &self.strategy
    }

    pub fn strategy_clamped(&self) -> bool {
        self.strategy_clamped
    }

    pub fn remaining(&self, device: usize) -> &[usize] {
        &self.remaining[device]
    }

    fn counts(&self) -> (usize, usize) {
        let cl = self
            .devices
            .iter()
            .filter(|d| d.is_compute_limited())
            .count();
        (cl, self.devices.len() - cl)
    }

    fn reports(&self) -> Vec<DeviceReport> {
        self.devices
            .iter()
            .map(|d| DeviceReport {
                device: d.id(),
                class: d.class(),
                capability: d.capability(),
                data_amount: d.shard().len(),
                label_histogram: d.shard().histogram().to_vec(),
                channel_gain: d.channel_gain(),
            })
            .collect()
    }

    /// Applies the mode's overrides to the requested strategy and validates
    /// it against the population.
    fn decide_strategy(&self) -> Result<(LearningStrategy, bool)> {
        let (cl, fl) = self.counts();
        let mut s = self.requested.clone();
        match self.mode {
            Mode::SemiFl => {}
            Mode::SemiFlNoSelNoPrune => {
                s.cl_uploaders = cl;
                s.fl_updaters = fl;
                s.sample_fraction = 1.0;
                s.pruning_sparsity = 0.0;
            }
            Mode::FlOnly => {
                s.cl_uploaders = 0;
                s.fl_updaters = fl;
                s.pruning_sparsity = 0.0;
            }
            Mode::ClOnly => {
                s.cl_uploaders = 0;
                s.fl_updaters = 0;
                s.sample_fraction = 1.0;
                s.pruning_sparsity = 0.0;
                s.validate()?;
                return Ok((s, false));
            }
        }
        let decision = generate_strategy(&self.reports(), &s)?;
        Ok((decision.strategy, decision.clamped))
    }

    fn gradient_payload(&self) -> Payload {
        let params = self.global.num_params();
        if self.strategy.pruning_sparsity > 0.0 {
            Payload::Pruned {
                params,
                sparsity: self.strategy.pruning_sparsity,
            }
        } else {
            Payload::Dense { params }
        }
    }

    /// Runs one round. When `test` is given, the updated global model is
    /// evaluated on it.
    pub fn run_round<E: Executor>(
        &mut self,
        exec: &E,
        test: Option<&Dataset>,
    ) -> Result<RoundReport> {
        let round = self.round + 1;
        let up_before = self.ledger.uplink_total();
        let down_before = self.ledger.downlink_total();
        let model_bytes = payload_bytes(Payload::Dense {
            params: self.global.num_params(),
        })?;

        // Stage 1: initialization.
        let gains = sample_channel_gains(self.devices.iter().map(Device::id), round, self.seed);
        for device in &mut self.devices {
            device.set_channel_gain(gains[&device.id()]);
        }
        if self.mode.runs_initialization() {
            let report_bytes = payload_bytes(Payload::Report)?;
            for id in 0..self.devices.len() {
                self.ledger.record(
                    round,
                    id,
                    Direction::Uplink,
                    PayloadKind::Report,
                    report_bytes,
                );
            }
            let (strategy, clamped) = self.decide_strategy()?;
            self.strategy = strategy;
            self.strategy_clamped = clamped;
            let strategy_bytes = payload_bytes(Payload::Strategy)?;
            for id in 0..self.devices.len() {
                self.ledger.record(
                    round,
                    id,
                    Direction::Downlink,
                    PayloadKind::Strategy,
                    strategy_bytes,
                );
            }
        }

        // Stage 2a: CL uploads.
        let cl_uploaders = match self.mode {
            Mode::FlOnly => Vec::new(),
            Mode::ClOnly => self
                .devices
                .iter()
                .filter(|d| !self.remaining[d.id()].is_empty())
                .map(Device::id)
                .collect(),
            Mode::SemiFl | Mode::SemiFlNoSelNoPrune => {
                let candidates: Vec<(usize, f64)> = self
                    .devices
                    .iter()
                    .filter(|d| d.is_compute_limited() && !self.remaining[d.id()].is_empty())
                    .map(|d| (d.id(), d.channel_gain()))
                    .collect();
                select_cl_uploaders(&candidates, self.strategy.cl_uploaders)
            }
        };
        let mut upload_order = cl_uploaders.clone();
        upload_order.sort_unstable();
        for &id in &upload_order {
            let chosen = select_samples(
                self.train,
                &self.remaining[id],
                self.strategy.sample_fraction,
                self.strategy.selection,
                Some(&self.global),
                derive_seed(self.seed, Purpose::SampleSelection, round, id as u64),
            )?;
            self.buffer.insert(id, &chosen)?;
            let mut sorted = chosen.clone();
            sorted.sort_unstable();
            self.remaining[id].retain(|i| sorted.binary_search(i).is_err());
            let bytes = payload_bytes(Payload::Samples {
                count: chosen.len(),
            })?;
            self.ledger
                .record(round, id, Direction::Uplink, PayloadKind::Samples, bytes);
        }

        // Stage 2b: FL local training and top-K.
        let fl_devices: Vec<&Device> = match self.mode {
            Mode::ClOnly => Vec::new(),
            _ => self
                .devices
                .iter()
                .filter(|d| !d.is_compute_limited())
                .collect(),
        };
        let (global, train, strategy, seed) = (&self.global, self.train, &self.strategy, self.seed);
        let updates: Vec<FlUpdate> = exec
            .map(&fl_devices, |device| {
                local_train(
                    global,
                    train,
                    device.shard(),
                    strategy,
                    derive_seed(seed, Purpose::LocalTraining, round, device.id() as u64),
                )
            })
            .into_iter()
            .collect::<Result<_>>()?;
        let selected = select_topk_updates(updates, self.strategy.fl_updaters);
        let gradient_bytes = payload_bytes(self.gradient_payload())?;
        for update in &selected {
            self.ledger.record(
                round,
                update.device,
                Direction::Uplink,
                PayloadKind::Gradient,
                gradient_bytes,
            );
        }

        // Stage 2c: centralized training on the server buffer.
        let central = if self.mode == Mode::FlOnly {
            None
        } else {
            Some(server_central_train(
                &self.global,
                self.train,
                &self.buffer,
                &self.strategy,
                derive_seed(self.seed, Purpose::ServerTraining, round, 0),
            )?)
        };

        // Stage 3: aggregation, update, broadcast.
        let gradient = aggregate(central.as_ref().map(|(g, m)| (g, *m)), &selected)?;
        sgd_step_in_place(&mut self.global, &gradient, self.strategy.learning_rate)?;
        if !self.global.is_finite() {
            return Err(Error::Config(alloc::format!(
                "global model diverged in round {round}; lower the learning rate"
            )));
        }
        for id in 0..self.devices.len() {
            self.ledger.record(
                round,
                id,
                Direction::Downlink,
                PayloadKind::Model,
                model_bytes,
            );
        }
        self.round = round;

        let evaluation = match test {
            Some(test) => Some(evaluate(&self.global, &test.as_batch())?),
            None => None,
        };
        Ok(RoundReport {
            round,
            evaluation,
            uplink_bytes: self.ledger.uplink_total() - up_before,
            downlink_bytes: self.ledger.downlink_total() - down_before,
            uplink_bytes_cum: self.ledger.uplink_total(),
            downlink_bytes_cum: self.ledger.downlink_total(),
            cl_uploaders,
            fl_updaters: selected.iter().map(|u| u.device).collect(),
            buffer_size: self.buffer.len(),
            strategy_clamped: self.strategy_clamped,
        })
    }
}
