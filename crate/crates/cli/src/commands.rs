use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use fogplace::placement::{place as run_policy, PlacementFile, Policy};
use fogplace::report::{build_report, load_run_dir, write_run_dir, FailureMode, RunManifest};
use fogplace::scenario::{generate_scenario, scenario_summary, ExperimentParams};
use fogplace::simulator::{build_failure_schedule, deadline_satisfaction, run_simulation, FailureSchedule, Scope};
use fogplace::Scenario;
use serde_json::json;

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of fog devices, gateways included
    #[arg(long, default_value_t = 100)]
    devices: u32,
    #[arg(long, default_value_t = 0.25)]
    gateway_frac: f64,
    #[arg(long, default_value_t = 20)]
    apps: u32,
    /// Edges added per new node in the preferential-attachment topology
    #[arg(long, default_value_t = 2)]
    ba_m: u32,
    /// Chance that a gateway requests a given application
    #[arg(long, default_value_t = 0.25)]
    popularity: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Partition,
    Greedy,
    CloudOnly,
    BruteForce,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Partition => Policy::Partition,
            PolicyArg::Greedy => Policy::Greedy,
            PolicyArg::CloudOnly => Policy::CloudOnly,
            PolicyArg::BruteForce => Policy::BruteForce,
        }
    }
}

#[derive(Debug, Args)]
pub struct PlaceArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum)]
    policy: PolicyArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FailuresArg {
    All,
    None,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    placement: PathBuf,
    /// Simulated time in ms
    #[arg(long, default_value_t = 100_000.0)]
    duration: f64,
    #[arg(long, value_enum, default_value_t = FailuresArg::All)]
    failures: FailuresArg,
    /// Seeds the failure order
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run directories written by `simulate`
    #[arg(long, num_args = 1.., required = true)]
    runs: Vec<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
}

fn write_json<S: serde::Serialize>(path: &Path, value: &S) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_json<D: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<D> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let params = ExperimentParams {
        n_devices: args.devices,
        gateway_fraction: args.gateway_frac,
        ba_m: args.ba_m,
        n_apps: args.apps,
        popularity: args.popularity,
        ..ExperimentParams::default()
    };
    let scenario: Scenario = generate_scenario(&params, args.seed)?;
    let summary = scenario_summary(&scenario);
    write_json(&args.out, &scenario)?;
    let params_path = crate::params_path(&args.out);
    write_json(&params_path, &json!({ "seed": args.seed, "params": params, "summary": summary }))?;
    println!("scenario: {}", args.out.display());
    println!("params: {}", params_path.display());
    println!("fog devices: {}", summary.device_count);
    println!("gateways: {}", summary.gateway_count);
    println!("applications: {}", summary.app_count);
    println!("services: {}", summary.service_count);
    println!("resource demand: {}", summary.total_demand);
    println!("fog capacity: {}", summary.total_fog_capacity);
    println!("workloads: {}", summary.workload_count);
    println!("mean request interval ms: {:.3}", summary.mean_request_interval);
    Ok(())
}

pub fn place(args: &PlaceArgs) -> Result<()> {
    let scenario: Scenario = read_json(&args.scenario)?;
    let policy = Policy::from(args.policy);
    let matrix = run_policy(&scenario, policy)?;
    scenario.check_placement(&matrix)?;
    let cloud = scenario.infra.cloud_id();
    let fog: Vec<_> = matrix.iter().filter(|&(_, d)| d != cloud).collect();
    let units: u64 = fog
        .iter()
        .filter_map(|&(s, _)| scenario.service(s))
        .map(|s| u64::from(s.consumption))
        .sum();
    write_json(&args.out, &PlacementFile::new(policy, scenario.seed, &matrix))?;
    println!("policy: {policy}");
    println!("fog instances: {}", fog.len());
    println!("resource units: {units}");
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let scenario: Scenario = read_json(&args.scenario)?;
    let file: PlacementFile = read_json(&args.placement)?;
    if file.seed != scenario.seed {
        bail!("placement was computed for scenario seed {}, not {}", file.seed, scenario.seed);
    }
    let placement = file.matrix();
    let (schedule, failures) = match args.failures {
        FailuresArg::All => (build_failure_schedule(&scenario.infra, args.duration, args.seed)?, FailureMode::All),
        FailuresArg::None => (FailureSchedule::none(), FailureMode::None),
    };
    let metrics = run_simulation(&scenario, &placement, &schedule, args.duration, args.seed)?;
    let manifest = RunManifest {
        policy: file.policy,
        scenario_seed: scenario.seed,
        sim_seed: args.seed,
        duration: args.duration,
        failures,
    };
    write_run_dir(&args.out_dir, &manifest, &scenario, &file, &schedule, &metrics)?;
    let completed = metrics.requests.iter().filter(|r| r.done_time.is_some()).count();
    println!("run: {}", args.out_dir.display());
    println!("requests: {}", metrics.requests.len());
    println!("completed: {completed}");
    match deadline_satisfaction(&metrics, Scope::System) {
        Ok(ratio) => println!("deadline satisfaction: {ratio:.4}"),
        Err(_) => println!("deadline satisfaction: NA"),
    }
    println!("failures: {}", schedule.len());
    Ok(())
}

pub fn report(args: &ReportArgs) -> Result<()> {
    let runs = args
        .runs
        .iter()
        .map(|dir| load_run_dir(dir).with_context(|| format!("loading run {}", dir.display())))
        .collect::<Result<Vec<_>>>()?;
    build_report(&runs).write_dir(&args.out_dir)?;
    println!("runs: {}", runs.len());
    println!("tables: {}", args.out_dir.display());
    Ok(())
}
