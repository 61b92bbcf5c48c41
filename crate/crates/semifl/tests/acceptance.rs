//! Acceptance gate. Each test checks one criterion and prints a single
//! `PASS`/`FAIL` line to the real stdout, so the verdicts show up even when
//! the harness captures output.

use std::io::Write;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config as ProptestConfig, TestCaseError, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semifl::config::{DatasetSpec, RunConfig};
use semifl::runner::{load_datasets, run_experiment, simulate, LEDGER_FILE, REPORTS_FILE};
use semifl::semifl_core::ceil_count;
use semifl::semifl_core::data::{generate_synthetic, partition_non_iid, Dataset};
use semifl::semifl_core::edge::{payload_bytes, CommLedger, Direction, Payload, PayloadKind};
use semifl::semifl_core::nn::{backward, forward, Batch, ModelParams};
use semifl::semifl_core::protocol::{
    aggregate, build_devices, prune_in_place, select_cl_uploaders, select_topk_updates, FlUpdate,
    LearningStrategy, Mode, RoundReport, Sequential, Simulation,
};
use semifl::semifl_core::seed::{derive_seed, Purpose};

fn verdict(id: u32, title: &str, outcome: Result<String, String>) {
    let line = match &outcome {
        Ok(detail) => format!("PASS criterion {id} ({title}): {detail}\n"),
        Err(detail) => format!("FAIL criterion {id} ({title}): {detail}\n"),
    };
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    if let Err(detail) = outcome {
        panic!("criterion {id} failed: {detail}");
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------- 1

fn gradient_check() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let pairs = 24;
    let per_pair = 12;
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for pair in 0..pairs {
        let dims = [
            rng.gen_range(8..40),
            rng.gen_range(4..32),
            rng.gen_range(2..=10),
        ];
        let mut params = ModelParams::init(&dims, pair).map_err(|e| e.to_string())?;
        for v in params.values_mut() {
            *v += rng.gen_range(-0.1..0.1);
        }
        let rows = rng.gen_range(1..16);
        let x: Vec<f64> = (0..rows * dims[0]).map(|_| rng.gen()).collect();
        let y: Vec<u8> = (0..rows).map(|_| rng.gen_range(0..dims[2]) as u8).collect();
        let batch = Batch::new(&x, &y, dims[0]).map_err(|e| e.to_string())?;
        let analytic = backward(&params, &batch).unwrap().flatten();
        let flat = params.flatten();
        for _ in 0..per_pair {
            let coord = rng.gen_range(0..flat.len());
            let loss_at = |delta: f64| {
                let mut shifted = flat.clone();
                shifted[coord] += delta;
                let p = ModelParams::from_flat(&dims, &shifted).unwrap();
                forward(&p, &batch).unwrap().loss
            };
            let numeric = (loss_at(h) - loss_at(-h)) / (2.0 * h);
            let a = analytic[coord];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max(rel);
            checked += 1;
            check(rel < 1e-4, || {
                format!("pair {pair} coord {coord}: analytic {a:e} numeric {numeric:e} rel {rel:e}")
            })?;
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(30), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{pairs} pairs, {checked} coordinates, max relative error {worst:.2e}, {elapsed:.1?}"
    ))
}

#[test]
fn criterion_1_gradient_correctness() {
    verdict(1, "gradient correctness", gradient_check());
}

// ---------------------------------------------------------------- 2

fn fedavg_reduction() -> Result<String, String> {
    let start = Instant::now();
    let data = generate_synthetic(40, 10, 784, 11).map_err(|e| e.to_string())?;
    let seed = 5;
    let init = ModelParams::init(&[784, 128, 10], 3).unwrap();
    let strategy = LearningStrategy {
        fl_updaters: 2,
        local_epochs: 1,
        batch_size: 40,
        pruning_sparsity: 0.0,
        ..LearningStrategy::default()
    };
    let lr = strategy.learning_rate;
    let mut worst: f64 = 0.0;
    for mode in [Mode::SemiFl, Mode::FlOnly] {
        let devices = build_devices(&data, &[5.0, 5.0], 3.0, 5, seed).map_err(|e| e.to_string())?;
        let shards: Vec<Vec<usize>> = devices
            .iter()
            .map(|d| d.shard().indices().to_vec())
            .collect();
        let mut sim = Simulation::new(&data, devices, init.clone(), strategy.clone(), mode, seed)
            .map_err(|e| e.to_string())?;
        let report = sim
            .run_round(&Sequential, None)
            .map_err(|e| e.to_string())?;
        check(report.fl_updaters.len() == 2, || {
            format!("{mode}: {} updaters", report.fl_updaters.len())
        })?;

        // FedAvg: each device takes one full-batch step, the server averages
        // the resulting models by sample count.
        let w = init.flatten();
        let total: usize = shards.iter().map(Vec::len).sum();
        let mut expected = vec![0.0; w.len()];
        for shard in &shards {
            let grad = backward(&init, &data.gather(shard).as_batch().unwrap())
                .unwrap()
                .flatten();
            let share = shard.len() as f64 / total as f64;
            for ((e, wi), gi) in expected.iter_mut().zip(&w).zip(&grad) {
                *e += share * (wi - lr * gi);
            }
        }
        let diff = max_abs_diff(&sim.global().flatten(), &expected);
        worst = worst.max(diff);
        check(diff <= 1e-9, || format!("{mode}: max deviation {diff:e}"))?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("max deviation {worst:.2e}, {elapsed:.1?}"))
}

#[test]
fn criterion_2_fedavg_reduction() {
    verdict(2, "FedAvg reduction", fedavg_reduction());
}

// ---------------------------------------------------------------- 3

/// Centralized mini-batch SGD written out directly.
fn plain_sgd(
    start: &[f64],
    dims: &[usize],
    data: &Dataset,
    order: &[usize],
    (epochs, batch, lr): (usize, usize, f64),
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order = order.to_vec();
    let mut w = start.to_vec();
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            let params = ModelParams::from_flat(dims, &w).unwrap();
            let g = backward(&params, &data.gather(chunk).as_batch().unwrap())
                .unwrap()
                .flatten();
            for (wi, gi) in w.iter_mut().zip(&g) {
                *wi -= lr * gi;
            }
        }
    }
    w
}

fn cl_reduction() -> Result<String, String> {
    let start = Instant::now();
    let data = generate_synthetic(400, 10, 784, 12).map_err(|e| e.to_string())?;
    let seed = 9;
    let dims = [784, 128, 10];
    let init = ModelParams::init(&dims, 4).unwrap();
    let devices =
        build_devices(&data, &[1.0, 1.0, 1.0, 1.0], 3.0, 3, seed).map_err(|e| e.to_string())?;
    let order: Vec<usize> = devices
        .iter()
        .flat_map(|d| d.shard().indices().to_vec())
        .collect();
    let strategy = LearningStrategy {
        cl_uploaders: 4,
        sample_fraction: 1.0,
        ..LearningStrategy::default()
    };
    let (epochs, batch, lr) = (
        strategy.server_epochs,
        strategy.batch_size,
        strategy.learning_rate,
    );
    let mut sim = Simulation::new(&data, devices, init.clone(), strategy, Mode::SemiFl, seed)
        .map_err(|e| e.to_string())?;
    let mut w = init.flatten();
    let mut worst: f64 = 0.0;
    for round in 1..=10u64 {
        sim.run_round(&Sequential, None)
            .map_err(|e| e.to_string())?;
        let server_seed = derive_seed(seed, Purpose::ServerTraining, round, 0);
        w = plain_sgd(&w, &dims, &data, &order, (epochs, batch, lr), server_seed);
        let diff = max_abs_diff(&sim.global().flatten(), &w);
        worst = worst.max(diff);
        check(diff <= 1e-9, || {
            format!("round {round}: max deviation {diff:e}")
        })?;
    }
    check(sim.buffer().len() == order.len(), || {
        "buffer incomplete".into()
    })?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "10 rounds, max deviation {worst:.2e}, {elapsed:.1?}"
    ))
}

#[test]
fn criterion_3_cl_reduction() {
    verdict(3, "CL reduction", cl_reduction());
}

// ---------------------------------------------------------------- 4 and 5

struct FashionRuns {
    reports: Vec<(Mode, Vec<RoundReport>)>,
    elapsed: Duration,
}

impl FashionRuns {
    fn of(&self, mode: Mode) -> &[RoundReport] {
        &self.reports.iter().find(|(m, _)| *m == mode).unwrap().1
    }

    fn final_accuracy(&self, mode: Mode) -> f64 {
        self.of(mode).last().unwrap().evaluation.unwrap().accuracy
    }
}

fn fashion_dir() -> PathBuf {
    match std::env::var_os("SEMIFL_DATA_DIR") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fashion-mnist"),
    }
}

fn fashion_config(mode: Mode) -> RunConfig {
    RunConfig {
        mode,
        dataset: DatasetSpec::FashionMnist {
            dir: Some(fashion_dir()),
            train_fraction: 0.2,
        },
        rounds: 100,
        eval_every: 10,
        ..RunConfig::default()
    }
}

fn fashion_runs() -> &'static Result<FashionRuns, String> {
    static RUNS: OnceLock<Result<FashionRuns, String>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let (train, test) = load_datasets(&fashion_config(Mode::SemiFl)).map_err(|e| {
            format!(
                "Fashion-MNIST not loadable ({e}); put the IDX files in data/fashion-mnist or set SEMIFL_DATA_DIR"
            )
        })?;
        let start = Instant::now();
        let mut reports = Vec::new();
        for mode in Mode::ALL {
            let (r, _) = simulate(&fashion_config(mode), &train, &test, |_| {})
                .map_err(|e| format!("{mode}: {e}"))?;
            reports.push((mode, r));
        }
        Ok(FashionRuns {
            reports,
            elapsed: start.elapsed(),
        })
    })
}

fn accuracy_ordering() -> Result<String, String> {
    let runs = fashion_runs().as_ref().map_err(Clone::clone)?;
    let b3 = runs.final_accuracy(Mode::SemiFlNoSelNoPrune);
    let fl = runs.final_accuracy(Mode::FlOnly);
    let cl = runs.final_accuracy(Mode::ClOnly);
    let detail = format!(
        "cl_only {cl:.4}, semifl_no_sel_no_prune {b3:.4}, fl_only {fl:.4}; margin over FL {:+.4} (need >= 0.02), gap to CL {:.4} (need <= 0.05); four runs {:.0?}",
        b3 - fl,
        cl - b3,
        runs.elapsed
    );
    check(b3 >= fl + 0.02, || format!("no margin over FL: {detail}"))?;
    check(cl - b3 <= 0.05, || format!("too far from CL: {detail}"))?;
    check(runs.elapsed <= Duration::from_secs(15 * 60), || {
        format!("over 15 min: {detail}")
    })?;
    Ok(detail)
}

#[test]
fn criterion_4_semifl_baseline_accuracy_ordering() {
    verdict(
        4,
        "no-selection/no-pruning SemiFL vs FL and CL",
        accuracy_ordering(),
    );
}

fn selection_and_pruning_tradeoff() -> Result<String, String> {
    let runs = fashion_runs().as_ref().map_err(Clone::clone)?;
    let semifl = runs.of(Mode::SemiFl);
    let b3 = runs.of(Mode::SemiFlNoSelNoPrune);
    check(semifl.len() == b3.len(), || "round counts differ".into())?;
    for (s, b) in semifl.iter().zip(b3) {
        check(s.uplink_bytes_cum < b.uplink_bytes_cum, || {
            format!(
                "round {}: semifl {} >= baseline {}",
                s.round, s.uplink_bytes_cum, b.uplink_bytes_cum
            )
        })?;
    }
    let acc_s = runs.final_accuracy(Mode::SemiFl);
    let acc_b = runs.final_accuracy(Mode::SemiFlNoSelNoPrune);
    let last = (
        semifl.last().unwrap().uplink_bytes_cum,
        b3.last().unwrap().uplink_bytes_cum,
    );
    let detail = format!(
        "uplink lower in all {} rounds ({} vs {} bytes at the end); accuracy {acc_s:.4} vs {acc_b:.4}",
        semifl.len(),
        last.0,
        last.1
    );
    check(acc_s <= acc_b + 0.005, || {
        format!("accuracy gained: {detail}")
    })?;
    Ok(detail)
}

#[test]
fn criterion_5_selection_and_pruning_tradeoff() {
    verdict(
        5,
        "selection and pruning trade accuracy for bytes",
        selection_and_pruning_tradeoff(),
    );
}

// ---------------------------------------------------------------- 6

fn prune_oracle(values: &[f64], k: usize) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .abs()
            .partial_cmp(&values[b].abs())
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut out = values.to_vec();
    for &pos in &order[..k] {
        out[pos] = 0.0;
    }
    out
}

/// Brute-force ranking: a candidate's position is the number of others that
/// beat it.
fn rank_by<T>(items: &[T], beats: impl Fn(&T, &T) -> bool) -> Vec<usize> {
    let mut ranked: Vec<(usize, usize)> = items
        .iter()
        .enumerate()
        .map(|(i, a)| (items.iter().filter(|b| beats(b, a)).count(), i))
        .collect();
    ranked.sort();
    ranked.into_iter().map(|(_, i)| i).collect()
}

fn flat_update(device: usize, values: &[f64], sample_count: usize, local_loss: f64) -> FlUpdate {
    FlUpdate {
        device,
        gradient: ModelParams::from_flat(&[values.len() - 1, 1], values).unwrap(),
        local_loss,
        sample_count,
    }
}

type Property = fn(&mut TestRunner) -> Result<(), String>;

fn run<S: Strategy>(
    runner: &mut TestRunner,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn pruning_rule(r: &mut TestRunner) -> Result<(), String> {
    // Coarse grid so magnitude ties are common; every sparsity in steps of
    // 0.01 against a full sort.
    let values = vec((-4i32..=4).prop_map(|v| v as f64 * 0.25), 1..=12);
    run(r, values, |values| {
        let n = values.len();
        for percent in 0usize..100 {
            let mut got = values.clone();
            prune_in_place(&mut got, percent as f64 / 100.0).unwrap();
            prop_assert_eq!(got, prune_oracle(&values, (percent * n).div_ceil(100)));
        }
        Ok(())
    })?;
    run(
        r,
        (vec(-1e3f64..1e3, 1..1000), 0.0f64..0.999),
        |(values, s)| {
            let mut pruned = values.clone();
            prune_in_place(&mut pruned, s).unwrap();
            let zeroed = values.len() - pruned.iter().filter(|p| **p != 0.0).count();
            prop_assert!(zeroed >= ceil_count(s, values.len()));
            let cut = pruned
                .iter()
                .zip(&values)
                .filter(|(p, _)| **p == 0.0)
                .map(|(_, v)| v.abs())
                .fold(0.0, f64::max);
            for (p, v) in pruned.iter().zip(&values) {
                prop_assert!(*p == 0.0 || (p == v && p.abs() >= cut));
            }
            Ok(())
        },
    )
}

fn aggregation_hull(r: &mut TestRunner) -> Result<(), String> {
    let members = vec((vec(-5.0f64..5.0, 6), 0usize..200), 1..6);
    let central = proptest::option::of((vec(-5.0f64..5.0, 6), 0usize..500));
    run(r, (members, central), |(members, central)| {
        let updates: Vec<FlUpdate> = members
            .iter()
            .enumerate()
            .map(|(i, (v, m))| flat_update(i, v, *m, 0.0))
            .collect();
        let central_grad = central
            .as_ref()
            .map(|(v, m)| (ModelParams::from_flat(&[5, 1], v).unwrap(), *m));
        let result = aggregate(central_grad.as_ref().map(|(g, m)| (g, *m)), &updates);
        let mut all = members.clone();
        all.extend(central);
        let total: usize = all.iter().map(|(_, m)| m).sum();
        if total == 0 {
            prop_assert!(result.is_err());
            return Ok(());
        }
        let got = result.unwrap().flatten();
        for j in 0..6 {
            let active = all.iter().filter(|(_, m)| *m > 0).map(|(v, _)| v[j]);
            let lo = active.clone().fold(f64::INFINITY, f64::min);
            let hi = active.fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(got[j] >= lo - 1e-12 && got[j] <= hi + 1e-12);
            let mean = all.iter().map(|(v, m)| *m as f64 * v[j]).sum::<f64>() / total as f64;
            prop_assert!((got[j] - mean).abs() < 1e-12);
        }
        let same: Vec<FlUpdate> = updates
            .iter()
            .map(|u| flat_update(u.device, &[1.5; 6], u.sample_count, 0.0))
            .collect();
        if let Ok(g) = aggregate(None, &same) {
            prop_assert!(g.values().all(|x| (x - 1.5).abs() < 1e-12));
        }
        Ok(())
    })
}

fn selection_order(r: &mut TestRunner) -> Result<(), String> {
    run(r, (vec(0u8..4, 1..12), 0usize..12), |(gains, n)| {
        let candidates: Vec<(usize, f64)> = gains
            .iter()
            .enumerate()
            .map(|(i, g)| ((i * 7) % 13, *g as f64 * 0.5))
            .collect();
        let order = rank_by(&candidates, |b, a| b.1 > a.1 || (b.1 == a.1 && b.0 < a.0));
        let want: Vec<usize> = order.iter().take(n).map(|&i| candidates[i].0).collect();
        prop_assert_eq!(select_cl_uploaders(&candidates, n), want);
        Ok(())
    })?;
    run(r, (vec(0u8..4, 1..12), 0usize..12), |(losses, k)| {
        let keyed: Vec<(usize, f64)> = losses
            .iter()
            .enumerate()
            .map(|(i, l)| ((i * 5) % 11, *l as f64 * 0.1))
            .collect();
        let updates = keyed
            .iter()
            .map(|(d, l)| flat_update(*d, &[0.0, 0.0], 1, *l))
            .collect();
        let order = rank_by(&keyed, |b, a| b.1 < a.1 || (b.1 == a.1 && b.0 < a.0));
        let want: Vec<usize> = order.iter().take(k).map(|&i| keyed[i].0).collect();
        let got: Vec<usize> = select_topk_updates(updates, k)
            .into_iter()
            .map(|u| u.device)
            .collect();
        prop_assert_eq!(got, want);
        Ok(())
    })
}

fn partition_contract(r: &mut TestRunner) -> Result<(), String> {
    let inputs = (
        200usize..600,
        2usize..11,
        1usize..12,
        0usize..100,
        any::<u64>(),
    );
    run(r, inputs, |(samples, classes, devices, pick, seed)| {
        let lpd = 1 + pick % classes;
        let data = generate_synthetic(samples, classes, 2, seed).unwrap();
        let shards = partition_non_iid(&data, devices, lpd, seed).unwrap();
        prop_assert_eq!(shards.len(), devices);
        let mut owner = vec![usize::MAX; data.len()];
        for shard in &shards {
            prop_assert_eq!(shard.distinct_labels(), lpd);
            for &i in shard.indices() {
                prop_assert_eq!(owner[i], usize::MAX);
                owner[i] = shard.owner();
            }
        }
        if devices * lpd >= classes {
            prop_assert!(owner.iter().all(|&o| o != usize::MAX));
        }
        Ok(())
    })
}

fn ledger_totals(r: &mut TestRunner) -> Result<(), String> {
    let entry = (
        0u64..50,
        0usize..10,
        any::<bool>(),
        0usize..5,
        0u64..1_000_000,
    );
    run(r, vec(entry, 0..1000), |entries| {
        let kinds = [
            PayloadKind::Samples,
            PayloadKind::Gradient,
            PayloadKind::Model,
            PayloadKind::Report,
            PayloadKind::Strategy,
        ];
        let mut ledger = CommLedger::new();
        for &(round, device, up, kind, bytes) in &entries {
            let dir = if up {
                Direction::Uplink
            } else {
                Direction::Downlink
            };
            ledger.record(round, device, dir, kinds[kind], bytes);
        }
        let up: u64 = entries.iter().filter(|e| e.2).map(|e| e.4).sum();
        let down: u64 = entries.iter().filter(|e| !e.2).map(|e| e.4).sum();
        prop_assert_eq!(ledger.uplink_total(), up);
        prop_assert_eq!(ledger.downlink_total(), down);
        let itemized: u64 = ledger.entries().iter().map(|t| t.bytes).sum();
        prop_assert_eq!(itemized, up + down);
        let by_round: u64 = (0..50)
            .map(|round| ledger.round_total(round, Direction::Uplink))
            .sum();
        prop_assert_eq!(by_round, up);
        Ok(())
    })
}

fn payload_monotonicity(r: &mut TestRunner) -> Result<(), String> {
    let inputs = (0usize..10_000, 1usize..200_000, 0.0f64..1.0, 0.0f64..1.0);
    run(r, inputs, |(n, params, a, b)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let samples = |rho: f64| {
            payload_bytes(Payload::Samples {
                count: ceil_count(rho, n),
            })
            .unwrap()
        };
        prop_assert!(samples(lo) <= samples(hi));
        let pruned = |s| {
            payload_bytes(Payload::Pruned {
                params,
                sparsity: s,
            })
            .unwrap()
        };
        prop_assert!(pruned(lo) >= pruned(hi));
        Ok(())
    })
}

#[test]
fn criterion_6_property_suites() {
    let suites: [(&str, Property); 6] = [
        ("pruning rule", pruning_rule),
        ("aggregation hull", aggregation_hull),
        ("top-N/top-K order", selection_order),
        ("partition contract", partition_contract),
        ("ledger totals", ledger_totals),
        ("payload monotonicity", payload_monotonicity),
    ];
    let mut failures = Vec::new();
    for (name, property) in suites {
        let mut runner = TestRunner::new(ProptestConfig {
            cases: 256,
            failure_persistence: None,
            ..ProptestConfig::default()
        });
        if let Err(e) = property(&mut runner) {
            failures.push(format!("{name}: {e}"));
        }
    }
    let outcome = if failures.is_empty() {
        Ok(format!("{} suites x 256 cases", suites.len()))
    } else {
        Err(failures.join("; "))
    };
    verdict(6, "property suites", outcome);
}

// ---------------------------------------------------------------- 7

fn determinism() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for mode in Mode::ALL {
        let base = RunConfig {
            mode,
            dataset: DatasetSpec::Synthetic {
                train_samples: 600,
                test_samples: 100,
                dim: 784,
                classes: 10,
            },
            rounds: 4,
            eval_every: 2,
            seed: 17,
            ..RunConfig::default()
        };
        let mut outputs = Vec::new();
        for (tag, parallel) in [("par_a", true), ("par_b", true), ("seq", false)] {
            let out = tmp.path().join(format!("{mode}_{tag}"));
            let config = RunConfig {
                out_dir: out.clone(),
                parallel,
                ..base.clone()
            };
            run_experiment(&config, |_| {}).map_err(|e| e.to_string())?;
            let read = |f| std::fs::read(out.join(f)).unwrap();
            outputs.push((tag, read(REPORTS_FILE), read(LEDGER_FILE)));
        }
        for (tag, reports, ledger) in &outputs[1..] {
            check(*reports == outputs[0].1, || {
                format!("{mode}: reports.csv differs ({tag})")
            })?;
            check(*ledger == outputs[0].2, || {
                format!("{mode}: ledger.csv differs ({tag})")
            })?;
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} reruns across 4 modes bit-identical, parallel and sequential"
    ))
}

#[test]
fn criterion_7_determinism() {
    verdict(7, "determinism", determinism());
}
