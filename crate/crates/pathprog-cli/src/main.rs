//! Command-line front end: task generation, analysis, simulation,
//! reservation provisioning, and the batch experiments.
//!
//! Exit codes: 0 on success, 1 on runtime errors or when a validation-style
//! run detects an invariant violation, 2 on usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pathprog::bounds;
use pathprog::collection::approximation_ratio_bound;
use pathprog::experiments::{
    run_makespan, run_uet, run_validate, run_waste, MakespanConfig, UetConfig, ValidateConfig,
    WasteConfig,
};
use pathprog::generator::{assign_deadline, generate, GenParams};
use pathprog::io::{reservation_to_json, task_from_json, task_to_json, trace_to_json};
use pathprog::reservation::{
    provision_gang, provision_ordinary, provision_uet_baseline, waste_ratio, Reservation,
};
use pathprog::sim::{
    adversarial_supply, perturb_and_check, simulate_dedicated, simulate_supply, Mode,
    PriorityAssignment, SupplyPreset,
};
use pathprog::time::{fmt4, parse_decimal, time, Time};
use pathprog::DagTask;

#[derive(Parser)]
#[command(
    name = "pathprog",
    about = "Parallel-path-progression scheduling analysis for DAG tasks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random layered DAG task and write it as JSON.
    Generate(GenerateArgs),
    /// Print response-time bounds and the chosen path collection.
    Analyze(AnalyzeArgs),
    /// Simulate one job on dedicated processors.
    Simulate(SimulateArgs),
    /// Provision a reservation system for the task.
    Provision(ProvisionArgs),
    /// Run a batch experiment and write its CSV.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 8)]
    parallelism: usize,
    #[arg(long, default_value_t = 5)]
    min_layers: usize,
    #[arg(long, default_value_t = 10)]
    max_layers: usize,
    /// Probability of an edge from each previous-layer subtask.
    #[arg(long, default_value = "0.2", value_parser = parse_prob)]
    conn_prob: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    wcet_min: u64,
    #[arg(long, default_value_t = 100)]
    wcet_max: u64,
    /// Deadline tightness: draw D uniformly from
    /// (vol(pi*), min(rho*vol(pi*), C)). Without it, no deadline is set.
    #[arg(long, value_parser = parse_time)]
    rho: Option<Time>,
    /// Output file.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    task: PathBuf,
    /// Number of processors.
    #[arg(short = 'M', long = "processors")]
    processors: usize,
    /// Also print the non-preemptive bound.
    #[arg(long)]
    non_preemptive: bool,
}

#[derive(Args)]
struct SimulateArgs {
    task: PathBuf,
    #[arg(short = 'M', long = "processors")]
    processors: usize,
    /// Dispatch non-preemptively (started subjobs run to completion).
    #[arg(long)]
    non_preemptive: bool,
    /// Run a sustainability campaign with this many perturbation trials.
    #[arg(long)]
    perturb: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Print a plain-text Gantt chart of the schedule.
    #[arg(long)]
    gantt: bool,
    /// Write the trace as JSON.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProvisionKind {
    Gang,
    Ordinary,
    Uet,
}

#[derive(Args)]
struct ProvisionArgs {
    task: PathBuf,
    #[arg(long, value_enum)]
    kind: ProvisionKind,
    #[arg(short = 'M', long = "processors")]
    processors: usize,
    /// Write the reservation system as JSON.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Simulate the provisioned system under adversarial supplies.
    #[arg(long)]
    check: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Makespan,
    Waste,
    UetCompare,
    Validate,
}

#[derive(Args)]
struct ExperimentArgs {
    kind: ExperimentKind,
    /// Samples per grid cell (experiments) or per check family (validate).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// CSV output path; defaults to <kind>.csv inside $PATHPROG_OUT_DIR
    /// (or the working directory).
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    parallelism: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_prob)]
    conn_prob: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    procs: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_time)]
    rho: Option<Vec<Time>>,
    #[arg(long)]
    min_layers: Option<usize>,
    #[arg(long)]
    max_layers: Option<usize>,
}

fn parse_time(s: &str) -> Result<Time, String> {
    parse_decimal(s).ok_or_else(|| format!("not a decimal or rational: {:?}", s))
}

fn parse_prob(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{}", e))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("probability {} outside [0, 1]", p))
    }
}

fn load_task(path: &Path) -> Result<DagTask> {
    let json = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    task_from_json(&json).with_context(|| format!("cannot parse {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(clean) => {
            if clean {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(1)
        }
    }
}

/// Returns false when a validation-style run found violations.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args).map(|_| true),
        Command::Analyze(args) => cmd_analyze(args).map(|_| true),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Provision(args) => cmd_provision(args),
        Command::Experiment(args) => cmd_experiment(args),
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let params = GenParams {
        parallelism: args.parallelism,
        min_layers: args.min_layers,
        max_layers: args.max_layers,
        connection_probability: args.conn_prob,
        wcet_range: (args.wcet_min, args.wcet_max),
        seed: args.seed,
    };
    let mut task = generate(&params);
    if let Some(rho) = args.rho {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ 0xDEAD_11);
        task = assign_deadline(&task, rho, &mut rng)?;
    }
    fs::write(&args.output, task_to_json(&task))
        .with_context(|| format!("cannot write {}", args.output.display()))?;
    println!(
        "wrote {} ({} vertices, {} edges, volume {}{})",
        args.output.display(),
        task.vertex_count(),
        task.edges().len(),
        task.total_volume(),
        task.deadline
            .map(|d| format!(", deadline {}", d))
            .unwrap_or_default(),
    );
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let task = load_task(&args.task)?;
    let analysis = bounds::analyze(&task, args.processors)?;
    let (lp_path, lp) = task.longest_path()?;
    println!(
        "vertices {}, edges {}, volume {}, longest path {} ({}), width {}",
        task.vertex_count(),
        task.edges().len(),
        task.total_volume(),
        lp,
        join_ids(lp_path.vertices()),
        analysis.npca.width,
    );
    println!("OUR {}  (n* = {})", fmt4(analysis.preemptive), analysis.npca.n_star);
    if args.non_preemptive {
        match analysis.nonpreemptive {
            Some(b) => println!("OUR-NP {}", fmt4(b)),
            None => println!("OUR-NP n/a (collection uses all processors)"),
        }
    }
    println!("FED {}", fmt4(analysis.federated));
    println!("LB {}", fmt4(analysis.lower));
    println!("collection:");
    for (i, p) in analysis.npca.collection.paths().iter().enumerate() {
        println!("  path {}: {}", i + 1, join_ids(p.vertices()));
    }
    if analysis.npca.n_star >= 1 {
        let ratio = approximation_ratio_bound(
            analysis.npca.width,
            args.processors,
            analysis.npca.n_star,
        );
        println!("approximation guarantee: {}", ratio);
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<bool> {
    let task = load_task(&args.task)?;
    let analysis = bounds::analyze(&task, args.processors)?;
    let collection = &analysis.npca.collection;
    let priorities = PriorityAssignment::two_level(&task, collection);
    let mode = if args.non_preemptive {
        Mode::NonPreemptive
    } else {
        Mode::Preemptive
    };
    let bound = if args.non_preemptive {
        analysis.nonpreemptive
    } else {
        Some(analysis.preemptive)
    };
    let trace = simulate_dedicated(&task, &priorities, args.processors, mode, None)?;
    println!(
        "makespan {} (envelope {})",
        fmt4(trace.makespan),
        join_ids(trace.envelope.vertices()),
    );
    let mut clean = true;
    if let Some(bound) = bound {
        let ok = trace.makespan <= bound;
        println!(
            "bound {} -> {}",
            fmt4(bound),
            if ok { "ok" } else { "VIOLATED" }
        );
        clean &= ok;
    }
    if args.gantt {
        print!("{}", trace.render_gantt());
    }
    if let Some(path) = &args.trace_out {
        fs::write(path, trace_to_json(&trace))
            .with_context(|| format!("cannot write {}", path.display()))?;
        println!("trace written to {}", path.display());
    }
    if let Some(trials) = args.perturb {
        let report = perturb_and_check(&task, collection, args.processors, trials, args.seed)?;
        println!(
            "perturbation: {} trials, {} checks, {} violations",
            report.trials,
            report.checks,
            report.violations.len()
        );
        for v in report.violations.iter().take(5) {
            println!(
                "  trial {}: makespan {} > bound {} ({:?}, {} processors)",
                v.trial,
                fmt4(v.makespan),
                fmt4(v.bound),
                v.mode,
                v.processors
            );
        }
        clean &= report.violations.is_empty();
    }
    Ok(clean)
}

fn cmd_provision(args: ProvisionArgs) -> Result<bool> {
    let task = load_task(&args.task)?;
    let (reservation, collection) = match args.kind {
        ProvisionKind::Gang => match provision_gang(&task, args.processors)? {
            Some(p) => {
                println!(
                    "gang: m {}, budget {}, n {}, waste {}",
                    p.reservation.m,
                    fmt4(p.reservation.budget),
                    p.reservation.n,
                    fmt4(p.waste)
                );
                (Reservation::Gang(p.reservation), p.collection)
            }
            None => {
                println!("infeasible: no (m, n) pair fits the deadline");
                return Ok(true);
            }
        },
        ProvisionKind::Ordinary | ProvisionKind::Uet => {
            let provision = match args.kind {
                ProvisionKind::Ordinary => provision_ordinary(&task, args.processors)?,
                _ => provision_uet_baseline(&task, args.processors)?,
            };
            match provision {
                Some(p) => {
                    println!(
                        "ordinary: m {}, budgets {} each, n {}, total service {}",
                        p.reservation.m,
                        fmt4(p.reservation.budgets[0]),
                        p.reservation.n,
                        p.total_service
                    );
                    (Reservation::Ordinary(p.reservation), p.collection)
                }
                None => {
                    println!("infeasible: no (m, n) pair fits the deadline");
                    return Ok(true);
                }
            }
        }
    };
    println!("waste ratio {}%", fmt4(waste_ratio(&reservation, &task)));
    if let Some(path) = &args.output {
        fs::write(path, reservation_to_json(&reservation))
            .with_context(|| format!("cannot write {}", path.display()))?;
        println!("reservation written to {}", path.display());
    }
    let mut clean = true;
    if args.check {
        let deadline = time(reservation.deadline());
        let priorities = PriorityAssignment::two_level(&task, &collection);
        for preset in [
            SupplyPreset::Latest,
            SupplyPreset::Fragmented,
            SupplyPreset::Random(args.seed),
        ] {
            let supply = adversarial_supply(&reservation, preset);
            let trace = simulate_supply(&task, &priorities, &reservation, &supply)?;
            let ok = trace.completed && trace.makespan <= deadline;
            println!(
                "check {:?}: finish {} <= {} -> {}",
                preset,
                fmt4(trace.makespan),
                fmt4(deadline),
                if ok { "ok" } else { "VIOLATED" }
            );
            clean &= ok;
        }
    }
    Ok(clean)
}

fn cmd_experiment(args: ExperimentArgs) -> Result<bool> {
    let output = args.output.clone().unwrap_or_else(|| {
        let name = match args.kind {
            ExperimentKind::Makespan => "makespan.csv",
            ExperimentKind::Waste => "waste.csv",
            ExperimentKind::UetCompare => "uet-compare.csv",
            ExperimentKind::Validate => "validate.csv",
        };
        match std::env::var_os("PATHPROG_OUT_DIR") {
            Some(dir) => PathBuf::from(dir).join(name),
            None => PathBuf::from(name),
        }
    });
    let mut csv: Vec<u8> = Vec::new();
    let clean = match args.kind {
        ExperimentKind::Makespan => {
            let mut config = MakespanConfig {
                seed: args.seed,
                ..MakespanConfig::default()
            };
            if let Some(v) = args.parallelism {
                config.parallelism = v;
            }
            if let Some(v) = args.conn_prob {
                config.conn_prob = v;
            }
            if let Some(v) = args.procs {
                config.procs = v;
            }
            if let Some(v) = args.samples {
                config.samples = v;
            }
            if let Some(v) = args.min_layers {
                config.min_layers = v;
            }
            if let Some(v) = args.max_layers {
                config.max_layers = v;
            }
            let outcome = run_makespan(&config)?;
            outcome.write_csv(&mut csv)?;
            print!("{}", outcome.summary_table());
            let violations = outcome.violations();
            if violations > 0 {
                eprintln!("{} simulation bound checks failed", violations);
            }
            violations == 0
        }
        ExperimentKind::Waste | ExperimentKind::UetCompare => {
            let mut config = WasteConfig {
                seed: args.seed,
                ..WasteConfig::default()
            };
            if let Some(v) = args.parallelism {
                config.parallelism = v;
            }
            if let Some(v) = args.conn_prob {
                config.conn_prob = v;
            }
            if let Some(v) = args.rho {
                config.rho = v;
            }
            if let Some(v) = args.samples {
                config.samples = v;
            }
            if let Some(v) = args.min_layers {
                config.min_layers = v;
            }
            if let Some(v) = args.max_layers {
                config.max_layers = v;
            }
            if matches!(args.kind, ExperimentKind::Waste) {
                let outcome = run_waste(&config)?;
                outcome.write_csv(&mut csv)?;
                print!("{}", outcome.summary_table());
                println!(
                    "skipped (empty deadline interval): {}",
                    outcome.skipped_deadlines()
                );
                outcome.violations() == 0
            } else {
                let outcome = run_uet(&config as &UetConfig)?;
                outcome.write_csv(&mut csv)?;
                print!("{}", outcome.summary_table());
                println!(
                    "baseline infeasible / ours feasible: {}",
                    outcome.baseline_only_infeasible()
                );
                outcome.violations() == 0
            }
        }
        ExperimentKind::Validate => {
            let config = ValidateConfig {
                instances: args.samples.unwrap_or(200),
                seed: args.seed,
            };
            let outcome = run_validate(&config)?;
            outcome.write_csv(&mut csv)?;
            println!(
                "{} checks, {} violations",
                outcome.checks,
                outcome.violations().len()
            );
            for v in outcome.violations().iter().take(10) {
                println!("  {} seed {}: {}", v.family, v.seed, v.detail);
            }
            outcome.violations().is_empty()
        }
    };
    if let Some(parent) = output.parent() {
        if !parent.as_os_str().is_empty() && !parent.exists() {
            bail!("output directory {} does not exist", parent.display());
        }
    }
    fs::write(&output, &csv).with_context(|| format!("cannot write {}", output.display()))?;
    println!("csv written to {}", output.display());
    Ok(clean)
}

fn join_ids(ids: &[usize]) -> String {
    ids.iter()
        .map(|v| format!("v{}", v))
        .collect::<Vec<_>>()
        .join(" -> ")
}
