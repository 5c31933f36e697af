//! Command-line front end.
//!
//! Exit codes: 0 success, 1 other error, 2 usage error, 3 `plan` proved the
//! instance infeasible, 4 `plan` hit a limit before finding any plan,
//! 5 `validate` found violations.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ewbackup::harness::{
    bb_params, parse_list, run_experiment, write_csv, ScenarioConfig, TopologySource,
    HARNESS_LAMBDA,
};
use ewbackup::netmodel::{instance_from_toml, instance_to_toml, Instance, NodeId, PathLimit};
use ewbackup::planner::{plan_instance, validate_plan, BackupPlan, ObjectiveKind};
use ewbackup_milp::Status;

const EXIT_INFEASIBLE: u8 = 3;
const EXIT_NO_PLAN: u8 = 4;
const EXIT_VIOLATIONS: u8 = 5;

#[derive(Parser)]
#[command(name = "ewbackup", version, about = "Emergency backup planning for data-center networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one instance and write the plan.
    Plan(PlanArgs),
    /// Run a campaign and write one CSV row per cell.
    Experiment(ExperimentArgs),
    /// Check a plan file against an instance.
    Validate(ValidateArgs),
    /// List the candidate paths of an instance.
    Paths(PathsArgs),
}

#[derive(Args, Clone)]
struct Scenario {
    /// `builtin:internetmci`, `builtin:internetmci-11dc` or a topology file.
    #[arg(long, default_value = "builtin:internetmci")]
    topology: String,
    #[arg(long, default_value_t = 3)]
    affected: usize,
    /// Comma-separated safe DCs.
    #[arg(long, default_value = "9,12,14,18")]
    safe: String,
    /// Paths per item and backup DC: a count or `unbounded`.
    #[arg(long, default_value = "unbounded")]
    pn: PathLimit,
    /// Backup DCs per item; all safe DCs when omitted.
    #[arg(long)]
    vn: Option<u32>,
    #[arg(long, default_value_t = HARNESS_LAMBDA)]
    lambda: u64,
    #[arg(long)]
    max_hops: Option<usize>,
}

#[derive(Args, Clone)]
struct Limits {
    /// Seconds per solve.
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
    #[arg(long)]
    node_limit: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    Mincost,
    Maxbw,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    scenario: Scenario,
    #[command(flatten)]
    limits: Limits,
    /// Read the instance from a file instead of generating it.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Also write the instance used.
    #[arg(long)]
    instance_out: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    num_data: usize,
    #[arg(long, default_value_t = 70)]
    epsilon1: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "mincost")]
    objective: Objective,
    /// Plan file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    scenario: Scenario,
    #[command(flatten)]
    limits: Limits,
    /// Item counts, e.g. `5,10,15,20` or `5..8`.
    #[arg(long, default_value = "5,10,15,20")]
    sweep_d: String,
    /// Warning times, same syntax.
    #[arg(long, default_value = "70")]
    epsilon1: String,
    /// Seeds, same syntax.
    #[arg(long, default_value = "1..5")]
    seeds: String,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Leave the solve time column empty, making the CSV reproducible.
    #[arg(long)]
    no_timing: bool,
    /// CSV file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    plan: PathBuf,
}

#[derive(Args)]
struct PathsArgs {
    #[command(flatten)]
    scenario: Scenario,
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Scenario {
    fn config(&self) -> anyhow::Result<ScenarioConfig> {
        let safe: BTreeSet<NodeId> = parse_list(&self.safe)
            .context("--safe")?
            .into_iter()
            .map(|v| NodeId(v as usize))
            .collect();
        Ok(ScenarioConfig {
            topology: self.topology.parse::<TopologySource>()?,
            affected: NodeId(self.affected),
            safe,
            pn: self.pn,
            vn: self.vn,
            lambda: Some(self.lambda),
            max_hops: self.max_hops,
            ..ScenarioConfig::paper()
        })
    }
}

impl Limits {
    fn apply(&self, config: &mut ScenarioConfig) -> anyhow::Result<()> {
        if !(self.time_limit > 0.0) {
            bail!("--time-limit must be positive");
        }
        config.time_limit = Some(Duration::from_secs_f64(self.time_limit));
        config.node_limit = self.node_limit;
        Ok(())
    }
}

fn read_instance(path: &PathBuf) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    instance_from_toml(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(path: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => match std::io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn scenario_instance(
    scenario: &Scenario,
    instance: Option<&PathBuf>,
    num_data: usize,
    epsilon1: u64,
    seed: u64,
) -> anyhow::Result<Instance> {
    if let Some(path) = instance {
        return read_instance(path);
    }
    let config = scenario.config()?;
    let network = config.topology.load()?;
    ewbackup::harness::cell_instance(&config, &network, num_data, epsilon1, seed)
}

fn plan(args: PlanArgs) -> anyhow::Result<u8> {
    let inst = scenario_instance(
        &args.scenario,
        args.instance.as_ref(),
        args.num_data,
        args.epsilon1,
        args.seed,
    )?;
    if let Some(path) = &args.instance_out {
        fs::write(path, instance_to_toml(&inst))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let mut config = args.scenario.config()?;
    args.limits.apply(&mut config)?;
    let kind = match args.objective {
        Objective::Mincost => ObjectiveKind::MinCost,
        Objective::Maxbw => ObjectiveKind::MaxBandwidth,
    };
    let out = plan_instance(&inst, kind, &bb_params(&config))?;
    let stats = &out.result.stats;
    eprintln!(
        "status {} nodes {} iterations {} time {:.3}s",
        out.result.status,
        stats.nodes,
        stats.lp_iterations,
        stats.wall_time.as_secs_f64()
    );
    let Some(plan) = out.plan else {
        return Ok(match out.result.status {
            Status::Infeasible => {
                eprintln!("instance is infeasible");
                EXIT_INFEASIBLE
            }
            _ => {
                eprintln!("limit reached before any plan was found");
                EXIT_NO_PLAN
            }
        });
    };
    if out.result.status != Status::Optimal {
        if let Some(bound) = out.result.best_bound {
            eprintln!("plan is not proven optimal; best bound {bound}");
        }
    }
    emit(args.output.as_ref(), &plan.to_toml())?;
    let summary = format!(
        "objective {} total_cost {} storage_cost {} transmission_cost {} channels {}",
        kind.as_str(),
        plan.total_cost,
        plan.storage_cost,
        plan.transmission_cost,
        plan.total_channels()
    );
    if args.output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(0)
}

fn experiment(args: ExperimentArgs) -> anyhow::Result<u8> {
    let mut config = args.scenario.config()?;
    args.limits.apply(&mut config)?;
    config.d_counts = parse_list(&args.sweep_d)
        .context("--sweep-d")?
        .into_iter()
        .map(|d| d as usize)
        .collect();
    config.epsilon1 = parse_list(&args.epsilon1).context("--epsilon1")?;
    config.seeds = parse_list(&args.seeds).context("--seeds")?;
    config.workers = args.workers;
    config.timing = !args.no_timing;
    let cells = run_experiment(&config)?;
    match &args.output {
        Some(path) => {
            let file =
                fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(file, &cells, config.timing)?;
        }
        None => write_csv(std::io::stdout().lock(), &cells, config.timing)?,
    }
    Ok(0)
}

fn validate(args: ValidateArgs) -> anyhow::Result<u8> {
    let inst = read_instance(&args.instance)?;
    let text = fs::read_to_string(&args.plan)
        .with_context(|| format!("reading {}", args.plan.display()))?;
    let plan = BackupPlan::from_toml(&text)
        .with_context(|| format!("parsing {}", args.plan.display()))?;
    let violations = validate_plan(&inst, &plan);
    if violations.is_empty() {
        println!("plan is feasible, total cost {}", plan.total_cost);
        return Ok(0);
    }
    for v in &violations {
        println!("{v}");
    }
    eprintln!("{} violation(s)", violations.len());
    Ok(EXIT_VIOLATIONS)
}

fn paths(args: PathsArgs) -> anyhow::Result<u8> {
    let inst = scenario_instance(&args.scenario, args.instance.as_ref(), 1, 1, args.seed)?;
    let mut out = String::new();
    let Some(item) = inst.data_items.first() else {
        bail!("instance has no data items");
    };
    for &v in &inst.safe_dcs {
        let ks: Vec<usize> = inst.paths_to(item.id, v).collect();
        out.push_str(&format!("# {} -> {}: {} paths\n", item.source, v, ks.len()));
        for k in ks {
            let p = &item.candidate_paths[k];
            let bottleneck = p.bottleneck(&inst.network).map_or("-".to_string(), |b| b.to_string());
            out.push_str(&format!("{p} cost={} bottleneck={bottleneck}\n", p.cost));
        }
    }
    emit(args.output.as_ref(), &out)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(a) => plan(a),
        Command::Experiment(a) => experiment(a),
        Command::Validate(a) => validate(a),
        Command::Paths(a) => paths(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
