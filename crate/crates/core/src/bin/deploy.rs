use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use uav_scope::harness::{self, Algorithm, Metric, RunConfig};
use uav_scope::metrics::evaluate;
use uav_scope::validate::{validate_deployment, QosPolicy};
use uav_scope::{Deployment, Result, Scenario, SolverOptions};

#[derive(Parser)]
#[command(name = "deploy", version, about = "UAV base-station placement experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a JSON config and write CSVs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides experiment.output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        baseline_fixed_altitude: Option<f64>,
    },
    /// Write a scenario JSON generated from the config's scenario section.
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one scenario and print or save the deployment.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "scope")]
        algo: Algorithm,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        baseline_fixed_altitude: Option<f64>,
    },
    /// Time repeated solves of one generated snapshot.
    Bench {
        #[arg(long, default_value_t = 600)]
        n: usize,
        #[arg(long, default_value = "scope")]
        algo: Algorithm,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a saved deployment against a scenario.
    Validate {
        #[arg(long)]
        deployment: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Policy::Sequential)]
        policy: Policy,
    },
    /// Print a gnuplot-ready table from a results CSV.
    Gnuplot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value = "satisfaction")]
        metric: Metric,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Sequential,
    Evaluated,
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn solver_options(cfg: &RunConfig, seed: u64, fixed: Option<f64>) -> SolverOptions {
    SolverOptions {
        sec_seed: cfg.experiment.sec_seed,
        seed,
        area: Some(cfg.scenario.to_config().area()),
        baseline_fixed_altitude: fixed.or(cfg.experiment.baseline_fixed_altitude),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            config,
            out,
            baseline_fixed_altitude,
        } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(out) = out {
                cfg.experiment.output = out;
            }
            if baseline_fixed_altitude.is_some() {
                cfg.experiment.baseline_fixed_altitude = baseline_fixed_altitude;
            }
            let result = harness::run_experiment(&cfg)?;
            println!("{}", result.data_path.display());
            println!("{}", result.summary_path.display());
        }
        Command::Generate {
            config,
            seed,
            n,
            out,
        } => {
            let cfg = load_config(config.as_ref())?;
            let mut sc = cfg.scenario.to_config();
            if let Some(s) = seed {
                sc.seed = s;
            }
            if let Some(n) = n {
                sc.n_users = n;
            }
            Scenario::generate(&sc)?.save(&out)?;
        }
        Command::Solve {
            scenario,
            algo,
            config,
            out,
            baseline_fixed_altitude,
        } => {
            let cfg = load_config(config.as_ref())?;
            let sc = Scenario::load(&scenario)?;
            let params = cfg.channel.to_params();
            let constraints = cfg.constraints.to_constraints();
            let mut opts = solver_options(&cfg, sc.seed, baseline_fixed_altitude);
            opts.area = Some(sc.area);
            let d = harness::solve(algo, &sc.users, &constraints, &params, &opts)?;
            let m = evaluate(&d, &sc.users, &constraints, &params)?;
            log::info!(
                "{algo}: {} UAVs, satisfaction {:.4}, jain {:.4}, {:.3} ms",
                m.active_uavs,
                m.satisfaction,
                m.jain_index,
                d.solve_time * 1e3
            );
            match out {
                Some(p) => d.save(p)?,
                None => println!("{}", d.to_json()?),
            }
        }
        Command::Bench {
            n,
            algo,
            reps,
            config,
            seed,
        } => {
            let cfg = load_config(config.as_ref())?;
            let mut sc = cfg.scenario.to_config();
            sc.n_users = n;
            if let Some(s) = seed {
                sc.seed = s;
            }
            let scenario = Scenario::generate(&sc)?;
            let opts = solver_options(&cfg, sc.seed, None);
            let stats = harness::measure_latency(
                algo,
                &scenario.users,
                &cfg.constraints.to_constraints(),
                &cfg.channel.to_params(),
                &opts,
                reps,
            )?;
            println!(
                "{algo} n={n} reps={reps} median_ms={:.3} p95_ms={:.3} deterministic={}",
                stats.median_s * 1e3,
                stats.p95_s * 1e3,
                stats.identical
            );
            return Ok(stats.identical);
        }
        Command::Validate {
            deployment,
            scenario,
            config,
            policy,
        } => {
            let cfg = load_config(config.as_ref())?;
            let sc = Scenario::load(&scenario)?;
            let d = Deployment::load(&deployment)?;
            let policy = match policy {
                Policy::Sequential => QosPolicy::Sequential,
                Policy::Evaluated => QosPolicy::Evaluated,
            };
            let report = validate_deployment(
                &d,
                &sc.users,
                &cfg.constraints.to_constraints(),
                &cfg.channel.to_params(),
                policy,
            );
            println!("{}", serde_json::to_string_pretty(&report)?);
            return Ok(report.is_ok());
        }
        Command::Gnuplot { csv, metric } => {
            let rows = harness::read_rows(&csv)?;
            print!("{}", harness::gnuplot_table(&rows, metric));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
