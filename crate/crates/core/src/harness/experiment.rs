//! Campaigns over (item count, warning time, seed) cells.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use anyhow::Context;
use ewbackup_milp::{BbParams, Status};
use serde::Serialize;

use super::config::ScenarioConfig;
use super::generate::generate_instance;
use crate::netmodel::Instance;
use crate::planner::{plan_instance, BackupPlan, ObjectiveKind};

/// Column order of the campaign CSV.
pub const CSV_COLUMNS: [&str; 10] = [
    "d_count",
    "epsilon1",
    "seed",
    "status_mincost",
    "cost_mincost",
    "status_maxbw",
    "cost_maxbw_as_mincost",
    "reduction",
    "solve_time_s",
    "bb_nodes",
];

/// Outcome of one objective on one cell.
#[derive(Debug, Clone)]
pub struct ObjectiveRun {
    pub status: Status,
    /// Best plan found, costed with the min-cost formula.
    pub plan: Option<BackupPlan>,
    pub solve_time: Duration,
    pub nodes: u64,
}

impl ObjectiveRun {
    pub fn cost(&self) -> Option<u64> {
        self.plan.as_ref().map(|p| p.total_cost)
    }
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub d_count: usize,
    pub epsilon1: u64,
    pub seed: u64,
    pub mincost: ObjectiveRun,
    pub maxbw: ObjectiveRun,
}

impl CellResult {
    /// `1 - min-cost / max-bandwidth cost`, when both plans exist.
    pub fn reduction(&self) -> Option<f64> {
        let a = self.mincost.cost()? as f64;
        let b = self.maxbw.cost()? as f64;
        (b > 0.0).then(|| 1.0 - a / b)
    }

    pub fn row(&self, timing: bool) -> ExperimentRow {
        ExperimentRow {
            d_count: self.d_count,
            epsilon1: self.epsilon1,
            seed: self.seed,
            status_mincost: self.mincost.status.as_str(),
            cost_mincost: self.mincost.cost(),
            status_maxbw: self.maxbw.status.as_str(),
            cost_maxbw_as_mincost: self.maxbw.cost(),
            reduction: self.reduction().map(|r| format!("{r:.6}")),
            solve_time_s: timing.then(|| format!("{:.3}", self.mincost.solve_time.as_secs_f64())),
            bb_nodes: self.mincost.nodes,
        }
    }
}

/// One CSV line. Empty cells stand for missing values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub d_count: usize,
    pub epsilon1: u64,
    pub seed: u64,
    pub status_mincost: &'static str,
    pub cost_mincost: Option<u64>,
    pub status_maxbw: &'static str,
    pub cost_maxbw_as_mincost: Option<u64>,
    pub reduction: Option<String>,
    pub solve_time_s: Option<String>,
    pub bb_nodes: u64,
}

/// The cells of a campaign in output order: item count, then warning
/// time, then seed.
pub fn campaign_cells(config: &ScenarioConfig) -> Vec<(usize, u64, u64)> {
    let mut cells = Vec::new();
    for &d in &config.d_counts {
        for &e in &config.epsilon1 {
            for &s in &config.seeds {
                cells.push((d, e, s));
            }
        }
    }
    cells
}

/// Instance of one cell. The warning time does not affect any draw, so all
/// cells sharing item count and seed see the same data.
pub fn cell_instance(
    config: &ScenarioConfig,
    network: &crate::netmodel::Network,
    d_count: usize,
    epsilon1: u64,
    seed: u64,
) -> anyhow::Result<Instance> {
    let mut inst = generate_instance(config, network, d_count, seed)?;
    inst.epsilon1 = epsilon1;
    Ok(inst)
}

pub fn bb_params(config: &ScenarioConfig) -> BbParams {
    BbParams {
        time_limit: config.time_limit,
        node_limit: config.node_limit,
        ..BbParams::default()
    }
}

fn run_objective(
    inst: &Instance,
    kind: ObjectiveKind,
    params: &BbParams,
) -> anyhow::Result<ObjectiveRun> {
    let out = plan_instance(inst, kind, params)
        .with_context(|| format!("{} solve", kind.as_str()))?;
    Ok(ObjectiveRun {
        status: out.result.status,
        plan: out.plan,
        solve_time: out.result.stats.wall_time,
        nodes: out.result.stats.nodes,
    })
}

/// Solves both objectives on one cell.
pub fn run_cell(
    config: &ScenarioConfig,
    network: &crate::netmodel::Network,
    (d_count, epsilon1, seed): (usize, u64, u64),
) -> anyhow::Result<CellResult> {
    let inst = cell_instance(config, network, d_count, epsilon1, seed)?;
    let params = bb_params(config);
    let mincost = run_objective(&inst, ObjectiveKind::MinCost, &params)?;
    let maxbw = run_objective(&inst, ObjectiveKind::MaxBandwidth, &params)?;
    Ok(CellResult {
        d_count,
        epsilon1,
        seed,
        mincost,
        maxbw,
    })
}

/// Runs every cell on up to `config.workers` threads. Results come back in
/// cell order whatever the completion order.
pub fn run_experiment(config: &ScenarioConfig) -> anyhow::Result<Vec<CellResult>> {
    config.check()?;
    let network = config.topology.load()?;
    let cells = campaign_cells(config);
    let slots: Vec<Mutex<Option<anyhow::Result<CellResult>>>> =
        cells.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = config.workers.clamp(1, cells.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&cell) = cells.get(i) else {
                    break;
                };
                let r = run_cell(config, &network, cell);
                *slots[i].lock().expect("slot lock") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .zip(&cells)
        .map(|(slot, &(d, e, s))| {
            slot.into_inner()
                .expect("slot lock")
                .expect("every cell ran")
                .with_context(|| format!("cell d={d} epsilon1={e} seed={s}"))
        })
        .collect()
}

pub fn write_csv<W: Write>(out: W, cells: &[CellResult], timing: bool) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if cells.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for c in cells {
        w.serialize(c.row(timing))?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(cells: &[CellResult], timing: bool) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, cells, timing).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}
