//! Thin command-line front end over the library: generate instances, plan,
//! verify plans, and run benchmark sweeps.
//!
//! Exit codes: 0 success, 1 planning/verification failure, 2 invalid input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use orla::files;
use orla::harness::{self, ShapeCatalogEntry};
use orla::search::{AllocatorKind, PlanFailure, PlannerConfig, PlannerKind};
use orla::stability::{AlwaysStable, StabilityConfig, StabilityOracle, SupportPolygonOracle};
use orla::Scenario;
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "orla", about = "Tabletop rearrangement planning", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file.
    Gen(GenArgs),
    /// Plan one instance and write the plan file.
    Plan(PlanArgs),
    /// Verify a plan file against its instance.
    Verify(VerifyArgs),
    /// Run planners over a directory of instances and emit CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    rho: f64,
    #[arg(long, value_parser = parse_scenario)]
    scenario: Scenario,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shape catalog JSON; omitted means equal discs.
    #[arg(long)]
    shapes: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_parser = parse_planner, default_value = "orla-full")]
    planner: PlannerKind,
    #[arg(long, value_parser = parse_stability, default_value = "always")]
    stability: StabilityChoice,
    #[arg(long, value_parser = parse_allocator)]
    allocator: Option<AllocatorKind>,
    #[arg(long)]
    seed: Option<u64>,
    /// Timeout in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// TOML file overriding stability and buffer-allocation knobs.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    plan: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    instances_dir: PathBuf,
    #[arg(long, num_args = 1.., value_parser = parse_planner)]
    planners: Vec<PlannerKind>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_parser = parse_stability, default_value = "always")]
    stability: StabilityChoice,
    #[arg(long, value_parser = parse_allocator)]
    allocator: Option<AllocatorKind>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path, or '-' for stdout.
    #[arg(long)]
    csv_out: PathBuf,
    /// Emit wall-clock columns (off keeps seeded reruns byte-identical).
    #[arg(long, default_value_t = false)]
    include_timing: bool,
}

#[derive(Clone, Copy)]
enum StabilityChoice {
    Always,
    SupportPolygon,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    match s.to_ascii_lowercase().as_str() {
        "ee" => Ok(Scenario::Ee),
        "mb" => Ok(Scenario::Mb),
        _ => Err(format!("unknown scenario {s:?}; expected ee or mb")),
    }
}

fn parse_planner(s: &str) -> Result<PlannerKind, String> {
    PlannerKind::parse(s).ok_or_else(|| {
        format!("unknown planner {s:?}; expected orla-full, orla-action, or greedy-sampling")
    })
}

fn parse_allocator(s: &str) -> Result<AllocatorKind, String> {
    AllocatorKind::parse(s)
        .ok_or_else(|| format!("unknown allocator {s:?}; expected sampling or grid-optimal"))
}

fn parse_stability(s: &str) -> Result<StabilityChoice, String> {
    match s {
        "always" => Ok(StabilityChoice::Always),
        "support-polygon" => Ok(StabilityChoice::SupportPolygon),
        _ => Err(format!("unknown stability oracle {s:?}; expected always or support-polygon")),
    }
}

/// Optional TOML configuration: `[stability]` and `[buffer]` tables.
#[derive(Default, Deserialize)]
#[serde(default)]
struct FileConfig {
    stability: StabilityConfig,
    buffer: BufferFileConfig,
}

#[derive(Deserialize)]
#[serde(default)]
struct BufferFileConfig {
    samples_per_round: usize,
    expansion_step: Option<f64>,
    orientation_count: usize,
    allocator: String,
    grid_resolution: f64,
}

impl Default for BufferFileConfig {
    fn default() -> Self {
        let d = PlannerConfig::default();
        BufferFileConfig {
            samples_per_round: d.samples_per_round,
            expansion_step: d.expansion_step,
            orientation_count: d.orientation_count,
            allocator: d.allocator.as_str().to_string(),
            grid_resolution: d.grid_resolution,
        }
    }
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig, String> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            toml::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

struct Runtime {
    cfg: PlannerConfig,
    oracle: Box<dyn StabilityOracle>,
}

fn build_runtime(
    planner: PlannerKind,
    stability: StabilityChoice,
    allocator: Option<AllocatorKind>,
    seed: Option<u64>,
    timeout: Option<f64>,
    config: Option<&Path>,
) -> Result<Runtime, String> {
    let file = load_file_config(config)?;
    let file_allocator = AllocatorKind::parse(&file.buffer.allocator)
        .ok_or_else(|| format!("config: unknown allocator {:?}", file.buffer.allocator))?;
    let cfg = PlannerConfig {
        planner,
        allocator: allocator.unwrap_or(file_allocator),
        samples_per_round: file.buffer.samples_per_round,
        expansion_step: file.buffer.expansion_step,
        orientation_count: file.buffer.orientation_count,
        grid_resolution: file.buffer.grid_resolution,
        seed: seed.unwrap_or(0),
        timeout: Duration::from_secs_f64(timeout.unwrap_or(300.0)),
        max_nodes: PlannerConfig::default().max_nodes,
        record_trace: false,
    };
    let oracle: Box<dyn StabilityOracle> = match stability {
        StabilityChoice::Always => Box::new(AlwaysStable),
        StabilityChoice::SupportPolygon => Box::new(SupportPolygonOracle::new(file.stability)),
    };
    Ok(Runtime { cfg, oracle })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Gen(args) => {
            let instance = match &args.shapes {
                None => harness::generate_disc_instance(args.n, args.rho, args.scenario, args.seed)
                    .map_err(|e| e.to_string())?,
                Some(path) => {
                    let bytes =
                        std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
                    let catalog: Vec<ShapeCatalogEntry> =
                        files::read_shape_catalog(&bytes).map_err(|e| e.to_string())?;
                    harness::generate_shape_instance(
                        &catalog,
                        args.n,
                        args.rho,
                        args.scenario,
                        args.seed,
                    )
                    .map_err(|e| e.to_string())?
                }
            };
            std::fs::write(&args.out, files::write_instance(&instance))
                .map_err(|e| format!("{}: {e}", args.out.display()))?;
            println!("wrote {} ({} objects)", args.out.display(), instance.object_count());
            Ok(ExitCode::SUCCESS)
        }
        Command::Plan(args) => {
            let bytes = std::fs::read(&args.instance)
                .map_err(|e| format!("{}: {e}", args.instance.display()))?;
            let instance = files::read_instance(&bytes).map_err(|e| e.to_string())?;
            let rt = build_runtime(
                args.planner,
                args.stability,
                args.allocator,
                args.seed,
                args.timeout,
                args.config.as_deref(),
            )?;
            match orla::plan_search(&instance, &rt.cfg, rt.oracle.as_ref()) {
                Ok(outcome) => {
                    println!(
                        "plan: {} actions, travel {:.6}, manipulation {}, total {:.6} ({} DS / {} NDS expanded, {:.3}s)",
                        outcome.plan.len(),
                        outcome.cost.travel,
                        outcome.cost.manipulation,
                        outcome.cost.total,
                        outcome.stats.ds_expanded,
                        outcome.stats.nds_expanded,
                        outcome.stats.wall_time_s,
                    );
                    if let Some(out) = &args.out {
                        let bytes = files::write_plan(
                            &instance,
                            args.planner.as_str(),
                            &outcome.plan,
                            &outcome.cost,
                        );
                        std::fs::write(out, bytes).map_err(|e| format!("{}: {e}", out.display()))?;
                        println!("wrote {}", out.display());
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(PlanFailure::InvalidInstance(msg)) => Err(msg),
                Err(failure) => {
                    eprintln!("{failure}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Verify(args) => {
            let bytes = std::fs::read(&args.instance)
                .map_err(|e| format!("{}: {e}", args.instance.display()))?;
            let instance = files::read_instance(&bytes).map_err(|e| e.to_string())?;
            let bytes =
                std::fs::read(&args.plan).map_err(|e| format!("{}: {e}", args.plan.display()))?;
            let plan_file = files::read_plan(&bytes, &instance).map_err(|e| e.to_string())?;
            let report = verify_and_print(&instance, &plan_file);
            Ok(if report { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Bench(args) => {
            let mut instances = Vec::new();
            let mut entries: Vec<PathBuf> = std::fs::read_dir(&args.instances_dir)
                .map_err(|e| format!("{}: {e}", args.instances_dir.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
                .collect();
            entries.sort();
            for path in entries {
                let bytes = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                instances.push(files::read_instance(&bytes).map_err(|e| format!("{}: {e}", path.display()))?);
            }
            if instances.is_empty() {
                return Err(format!("no instance files in {}", args.instances_dir.display()));
            }
            if args.planners.is_empty() {
                return Err("at least one --planners value is required".into());
            }
            let rt = build_runtime(
                PlannerKind::OrlaFull,
                args.stability,
                args.allocator,
                args.seed,
                args.timeout,
                args.config.as_deref(),
            )?;
            let planners: Vec<(String, PlannerConfig)> = args
                .planners
                .iter()
                .map(|kind| {
                    (kind.as_str().to_string(), PlannerConfig { planner: *kind, ..rt.cfg.clone() })
                })
                .collect();
            let report =
                harness::run_benchmark(&instances, &planners, rt.oracle.as_ref(), args.jobs.max(1));
            let csv = harness::benchmark_csv(&report, args.include_timing);
            if args.csv_out.as_os_str() == "-" {
                print!("{csv}");
            } else {
                std::fs::write(&args.csv_out, &csv)
                    .map_err(|e| format!("{}: {e}", args.csv_out.display()))?;
                println!("wrote {}", args.csv_out.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn verify_and_print(instance: &orla::Instance, plan_file: &files::PlanFile) -> bool {
    let report = harness::verify_plan(instance, &plan_file.plan, Some(&plan_file.cost));
    if report.pass {
        println!(
            "plan verifies: {} actions, recomputed total {}",
            plan_file.plan.len(),
            report.recomputed.total
        );
        if let Some(gap) = report.cost_mismatch {
            eprintln!("warning: claimed cost differs from recomputation by {gap}");
        }
        true
    } else {
        match &report.failure {
            Some((step, reason)) => eprintln!("plan fails at step {step}: {reason}"),
            None => eprintln!("plan fails: final arrangement differs from the goal"),
        }
        false
    }
}
