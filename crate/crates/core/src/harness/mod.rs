//! Seeded parameter sweeps, CSV output and latency measurement.
//!
//! A run walks every sweep value × trial; each trial generates one user
//! snapshot (seed = base seed + trial index) that every selected algorithm
//! solves, so algorithms are compared on identical topologies. Trials run on
//! the data-parallel pool; latency measurements always run on the calling
//! thread.

pub mod config;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use config::{Algorithm, RunConfig, SweepAxis};

use crate::baselines::{run_ccs_with, run_kmeans_with, run_random_with, run_voronoi_with};
use crate::channel::{ChannelParams, DeploymentConstraints};
use crate::deployment::{Deployment, SolverOptions};
use crate::error::{Error, Result};
use crate::metrics::evaluate;
use crate::par;
use crate::scenario::{generate_users, GroundUser, Mobility};
use crate::scope::run_scope_with;
use crate::validate::{validate_deployment, QosPolicy};

pub const WORKERS_ENV: &str = "DEPLOY_WORKERS";

/// One CSV line per (sweep value, algorithm, trial).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataRow {
    pub sweep_value: f64,
    pub algorithm: String,
    pub trial: usize,
    pub seed: u64,
    pub n_users: usize,
    pub n_uavs: usize,
    pub satisfaction: f64,
    pub jain: f64,
    pub ee_bits_per_joule: f64,
    pub throughput_bps: f64,
    pub solve_ms: f64,
}

/// Mean and sample standard deviation per (sweep value, algorithm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub sweep_value: f64,
    pub algorithm: String,
    pub trials: usize,
    pub n_uavs_mean: f64,
    pub satisfaction_mean: f64,
    pub satisfaction_std: f64,
    pub jain_mean: f64,
    pub jain_std: f64,
    pub ee_mean: f64,
    pub ee_std: f64,
    pub throughput_mean: f64,
    pub throughput_std: f64,
    pub solve_ms_mean: f64,
    pub solve_ms_std: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub rows: Vec<DataRow>,
    pub summary: Vec<SummaryRow>,
    pub data_path: PathBuf,
    pub summary_path: PathBuf,
}

/// Worker count: `DEPLOY_WORKERS` if set and valid, else the config value.
pub fn resolve_workers(configured: Option<usize>) -> Option<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Some(n),
            _ => {
                log::warn!("ignoring {WORKERS_ENV}={v:?}");
                configured
            }
        },
        Err(_) => configured,
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

/// Fleet size another algorithm borrows (K-Means, Voronoi and Random use the
/// size found by SCOPE, `kmeans_ccs` the one found by CCS).
fn reference_of(algo: Algorithm) -> Option<Algorithm> {
    match algo {
        Algorithm::KmeansScope | Algorithm::Voronoi | Algorithm::Random => Some(Algorithm::Scope),
        Algorithm::KmeansCcs => Some(Algorithm::Ccs),
        Algorithm::Scope | Algorithm::Ccs => None,
    }
}

fn run_with_k(
    algo: Algorithm,
    k: usize,
    users: &[GroundUser],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
    options: &SolverOptions,
) -> Result<Deployment> {
    match algo {
        Algorithm::Scope => run_scope_with(users, constraints, params, options),
        Algorithm::Ccs => run_ccs_with(users, constraints, params, options),
        Algorithm::KmeansScope | Algorithm::KmeansCcs => {
            run_kmeans_with(users, k, constraints, params, options)
        }
        Algorithm::Voronoi => run_voronoi_with(users, k, constraints, params, options),
        Algorithm::Random => run_random_with(users, k, constraints, params, options),
    }
}

/// Fleet size for `algo` on this snapshot (0 for algorithms that pick their
/// own).
pub fn fleet_size_for(
    algo: Algorithm,
    users: &[GroundUser],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
    options: &SolverOptions,
) -> Result<usize> {
    match reference_of(algo) {
        Some(r) => Ok(run_with_k(r, 0, users, constraints, params, options)?
            .uavs
            .len()
            .max(1)),
        None => Ok(0),
    }
}

/// Solves one snapshot with `algo`. `solve_time` covers this algorithm only,
/// not the reference run that fixes its fleet size.
pub fn solve(
    algo: Algorithm,
    users: &[GroundUser],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
    options: &SolverOptions,
) -> Result<Deployment> {
    let k = fleet_size_for(algo, users, constraints, params, options)?;
    let (mut d, secs) = timed(|| run_with_k(algo, k, users, constraints, params, options))?;
    d.solve_time = secs;
    Ok(d)
}

pub fn qos_policy(algo: Algorithm) -> QosPolicy {
    match algo {
        Algorithm::Scope => QosPolicy::Sequential,
        _ => QosPolicy::Evaluated,
    }
}

/// Runs every algorithm on one snapshot and returns its CSV rows.
pub fn run_trial(cfg: &RunConfig, value: f64, trial: usize) -> Result<Vec<DataRow>> {
    let seed = cfg.scenario.seed.wrapping_add(trial as u64);
    let (scenario, params, constraints) = cfg.apply(value, seed)?;
    let mut users = generate_users(&scenario)?;
    if cfg.scenario.mobility_steps > 0 {
        let mut mobility = Mobility::new(&scenario)?;
        for _ in 0..cfg.scenario.mobility_steps {
            mobility.step(&mut users)?;
        }
    }
    let options = SolverOptions {
        sec_seed: cfg.experiment.sec_seed,
        seed,
        area: Some(scenario.area()),
        baseline_fixed_altitude: cfg.experiment.baseline_fixed_altitude,
    };

    let mut cache: Vec<(Algorithm, Deployment, f64)> = Vec::new();
    let mut rows = Vec::with_capacity(cfg.experiment.algorithms.len());
    for &algo in &cfg.experiment.algorithms {
        let (deployment, secs) = match cache.iter().find(|(a, _, _)| *a == algo) {
            Some((_, d, s)) => (d.clone(), *s),
            None => {
                let k = match reference_of(algo) {
                    None => 0,
                    Some(r) => {
                        let d = match cache.iter().find(|(a, _, _)| *a == r) {
                            Some((_, d, _)) => d.clone(),
                            None => {
                                let (d, s) = timed(|| {
                                    run_with_k(r, 0, &users, &constraints, &params, &options)
                                })?;
                                cache.push((r, d.clone(), s));
                                d
                            }
                        };
                        d.uavs.len().max(1)
                    }
                };
                let (d, s) =
                    timed(|| run_with_k(algo, k, &users, &constraints, &params, &options))?;
                cache.push((algo, d.clone(), s));
                (d, s)
            }
        };

        let report = validate_deployment(&deployment, &users, &constraints, &params, qos_policy(algo));
        if !report.is_ok() {
            let first: Vec<&String> = report.violations().take(5).collect();
            return Err(Error::Validation(format!(
                "{algo} at sweep value {value}, trial {trial} (seed {seed}): {first:?}"
            )));
        }
        let m = evaluate(&deployment, &users, &constraints, &params)?;
        rows.push(DataRow {
            sweep_value: value,
            algorithm: algo.name().to_string(),
            trial,
            seed,
            n_users: users.len(),
            n_uavs: m.active_uavs,
            satisfaction: m.satisfaction,
            jain: m.jain_index,
            ee_bits_per_joule: m.energy_efficiency,
            throughput_bps: m.total_throughput,
            solve_ms: secs * 1e3,
        });
    }
    Ok(rows)
}

fn trial_grid(cfg: &RunConfig) -> Vec<(usize, f64, usize)> {
    let e = &cfg.experiment;
    e.sweep_values
        .iter()
        .enumerate()
        .flat_map(|(vi, &v)| (0..e.trials).map(move |t| (vi, v, t)))
        .collect()
}

fn sort_rows(cfg: &RunConfig, rows: &mut [DataRow]) {
    let algo_rank = |name: &str| {
        cfg.experiment
            .algorithms
            .iter()
            .position(|a| a.name() == name)
            .unwrap_or(usize::MAX)
    };
    rows.sort_by(|a, b| {
        a.sweep_value
            .total_cmp(&b.sweep_value)
            .then(algo_rank(&a.algorithm).cmp(&algo_rank(&b.algorithm)))
            .then(a.trial.cmp(&b.trial))
    });
}

/// All data rows of an experiment, sorted by (value, algorithm, trial).
pub fn collect_rows(cfg: &RunConfig) -> Result<Vec<DataRow>> {
    collect_rows_with(cfg, true)
}

/// As [`collect_rows`], choosing between the parallel and the sequential map.
pub fn collect_rows_with(cfg: &RunConfig, parallel: bool) -> Result<Vec<DataRow>> {
    cfg.validate()?;
    let grid = trial_grid(cfg);
    let job = |&(_, v, t): &(usize, f64, usize)| run_trial(cfg, v, t);
    let results = if parallel {
        par::with_workers(resolve_workers(cfg.experiment.workers), || par::map(&grid, job))
    } else {
        par::map_seq(&grid, job)
    };
    let mut rows = Vec::with_capacity(grid.len() * cfg.experiment.algorithms.len());
    for r in results {
        rows.extend(r?);
    }
    sort_rows(cfg, &mut rows);
    Ok(rows)
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Groups sorted rows by (value, algorithm), keeping first-seen order.
pub fn summarize(rows: &[DataRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(f64, &str)> = Vec::new();
    for r in rows {
        if !keys
            .iter()
            .any(|(v, a)| v.to_bits() == r.sweep_value.to_bits() && *a == r.algorithm)
        {
            keys.push((r.sweep_value, &r.algorithm));
        }
    }
    keys.into_iter()
        .map(|(v, a)| {
            let group: Vec<&DataRow> = rows
                .iter()
                .filter(|r| r.sweep_value.to_bits() == v.to_bits() && r.algorithm == a)
                .collect();
            let col = |f: fn(&DataRow) -> f64| -> Vec<f64> { group.iter().map(|r| f(r)).collect() };
            let (sat_m, sat_s) = mean_std(&col(|r| r.satisfaction));
            let (jain_m, jain_s) = mean_std(&col(|r| r.jain));
            let (ee_m, ee_s) = mean_std(&col(|r| r.ee_bits_per_joule));
            let (tp_m, tp_s) = mean_std(&col(|r| r.throughput_bps));
            let (ms_m, ms_s) = mean_std(&col(|r| r.solve_ms));
            let (uav_m, _) = mean_std(&col(|r| r.n_uavs as f64));
            SummaryRow {
                sweep_value: v,
                algorithm: a.to_string(),
                trials: group.len(),
                n_uavs_mean: uav_m,
                satisfaction_mean: sat_m,
                satisfaction_std: sat_s,
                jain_mean: jain_m,
                jain_std: jain_s,
                ee_mean: ee_m,
                ee_std: ee_s,
                throughput_mean: tp_m,
                throughput_std: tp_s,
                solve_ms_mean: ms_m,
                solve_ms_std: ms_s,
            }
        })
        .collect()
}

/// `results.csv` -> `results_summary.csv`, next to it.
pub fn summary_path_for(data_path: &Path) -> PathBuf {
    let stem = data_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".into());
    data_path.with_file_name(format!("{stem}_summary.csv"))
}

fn create_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn write_all<T: Serialize>(mut w: csv::Writer<std::fs::File>, rows: &[T], path: &Path) -> Result<()> {
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_rows(path: impl AsRef<Path>) -> Result<Vec<DataRow>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path)?;
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// Runs the configured sweep and writes the data and summary CSVs.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let data_path = cfg.experiment.output.clone();
    let summary_path = summary_path_for(&data_path);
    // open both files up front so a bad path fails before any solving
    let data_writer = create_writer(&data_path)?;
    let summary_writer = create_writer(&summary_path)?;

    let rows = collect_rows(cfg)?;
    let summary = summarize(&rows);
    write_all(data_writer, &rows, &data_path)?;
    write_all(summary_writer, &summary, &summary_path)?;
    log::info!(
        "wrote {} rows to {} and {} summary rows to {}",
        rows.len(),
        data_path.display(),
        summary.len(),
        summary_path.display()
    );
    Ok(ExperimentOutput {
        rows,
        summary,
        data_path,
        summary_path,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatencyStats {
    pub median_s: f64,
    pub p95_s: f64,
    /// Timed repetitions, warm-up excluded.
    pub samples: Vec<f64>,
    /// Every repetition produced the same deployment.
    pub identical: bool,
}

fn same_solution(a: &Deployment, b: &Deployment) -> bool {
    a.uavs == b.uavs && a.association == b.association
}

/// Median of an already sorted slice.
fn sorted_median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Times `repetitions` solves of one snapshot after one discarded warm-up.
pub fn measure_latency(
    algo: Algorithm,
    users: &[GroundUser],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
    options: &SolverOptions,
    repetitions: usize,
) -> Result<LatencyStats> {
    if repetitions < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 repetitions, got {repetitions}"
        )));
    }
    let k = fleet_size_for(algo, users, constraints, params, options)?;
    let (first, _) = timed(|| run_with_k(algo, k, users, constraints, params, options))?;
    let mut samples = Vec::with_capacity(repetitions);
    let mut identical = true;
    for _ in 0..repetitions {
        let (d, secs) = timed(|| run_with_k(algo, k, users, constraints, params, options))?;
        identical &= same_solution(&first, &d);
        samples.push(secs);
    }
    let mut sorted = samples.clone();
    sorted.sort_by(f64::total_cmp);
    let rank = ((0.95 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Ok(LatencyStats {
        median_s: sorted_median(&sorted),
        p95_s: sorted[rank - 1],
        samples,
        identical,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Satisfaction,
    Jain,
    Ee,
    Throughput,
    SolveMs,
    NUavs,
}

impl Metric {
    fn of(&self, r: &DataRow) -> f64 {
        match self {
            Metric::Satisfaction => r.satisfaction,
            Metric::Jain => r.jain,
            Metric::Ee => r.ee_bits_per_joule,
            Metric::Throughput => r.throughput_bps,
            Metric::SolveMs => r.solve_ms,
            Metric::NUavs => r.n_uavs as f64,
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidParameter(format!("unknown metric {s:?}")))
    }
}

/// Whitespace-separated table for gnuplot: one line per sweep value, a
/// mean and a standard-deviation column per algorithm.
pub fn gnuplot_table(rows: &[DataRow], metric: Metric) -> String {
    let mut algos: Vec<&str> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for r in rows {
        if !algos.contains(&r.algorithm.as_str()) {
            algos.push(&r.algorithm);
        }
        if !values.iter().any(|v| v.to_bits() == r.sweep_value.to_bits()) {
            values.push(r.sweep_value);
        }
    }
    values.sort_by(f64::total_cmp);

    let mut out = String::from("# sweep_value");
    for a in &algos {
        out.push_str(&format!(" {a}_mean {a}_std"));
    }
    out.push('\n');
    for v in values {
        out.push_str(&format!("{v}"));
        for a in &algos {
            let xs: Vec<f64> = rows
                .iter()
                .filter(|r| r.sweep_value.to_bits() == v.to_bits() && r.algorithm == *a)
                .map(|r| metric.of(r))
                .collect();
            let (m, s) = mean_std(&xs);
            out.push_str(&format!(" {m} {s}"));
        }
        out.push('\n');
    }
    out
}
