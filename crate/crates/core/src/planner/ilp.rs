use ewbackup_milp::{MilpError, MilpModel, Relation, Sense, VarId};

use super::PlannerError;
use crate::netmodel::{validate_instance, Instance, NodeId};

/// Which objective a model optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    /// Storage plus transmission cost, minimized.
    MinCost,
    /// Total channels allocated on paths, maximized.
    MaxBandwidth,
}

impl ObjectiveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveKind::MinCost => "mincost",
            ObjectiveKind::MaxBandwidth => "maxbw",
        }
    }
}

/// Model variables of each item. Site vectors follow `safe`; path vectors
/// follow the item's `candidate_paths`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarIndex {
    pub objective: ObjectiveKind,
    pub safe: Vec<NodeId>,
    /// `site_flag[d][i]` is 1 when `safe[i]` holds part of item `d`.
    pub site_flag: Vec<Vec<VarId>>,
    /// Amount of item `d` stored at `safe[i]`.
    pub stored: Vec<Vec<VarId>>,
    /// `path_flag[d][k]` is 1 when candidate path `k` carries item `d`.
    pub path_flag: Vec<Vec<VarId>>,
    /// Channels of candidate path `k` used for item `d`.
    pub channels: Vec<Vec<VarId>>,
}

impl VarIndex {
    pub fn num_vars(&self) -> usize {
        let sites: usize = self.stored.iter().map(Vec::len).sum();
        let paths: usize = self.channels.iter().map(Vec::len).sum();
        2 * sites + 2 * paths
    }
}

/// Min-cost backup model.
pub fn build_backup_ilp(inst: &Instance) -> Result<(MilpModel, VarIndex), PlannerError> {
    build_ilp(inst, ObjectiveKind::MinCost)
}

/// Same constraints, objective replaced by total path bandwidth.
pub fn build_maxbandwidth_ilp(inst: &Instance) -> Result<(MilpModel, VarIndex), PlannerError> {
    build_ilp(inst, ObjectiveKind::MaxBandwidth)
}

pub fn build_ilp(
    inst: &Instance,
    objective: ObjectiveKind,
) -> Result<(MilpModel, VarIndex), PlannerError> {
    let report = validate_instance(inst);
    if !report.is_empty() {
        return Err(PlannerError::InvalidInstance(report));
    }
    Ok(assemble(inst, objective)?)
}

fn assemble(inst: &Instance, objective: ObjectiveKind) -> Result<(MilpModel, VarIndex), MilpError> {
    let net = &inst.network;
    let sense = match objective {
        ObjectiveKind::MinCost => Sense::Minimize,
        ObjectiveKind::MaxBandwidth => Sense::Maximize,
    };
    let mut m = MilpModel::new(sense);
    let safe: Vec<NodeId> = inst.safe_dcs.iter().copied().collect();
    let lambda = inst.lambda as f64;
    let eps = inst.epsilon1 as f64;

    let mut idx = VarIndex {
        objective,
        safe: safe.clone(),
        site_flag: Vec::new(),
        stored: Vec::new(),
        path_flag: Vec::new(),
        channels: Vec::new(),
    };

    for (d, item) in inst.data_items.iter().enumerate() {
        let mut flags = Vec::with_capacity(safe.len());
        let mut stored = Vec::with_capacity(safe.len());
        for &v in &safe {
            flags.push(m.add_binary(format!("M_{d}_{v}"))?);
            let cap = inst.storage_capacity(v).min(item.size);
            let n = m.add_integer(format!("N_{d}_{v}"), 0.0, cap as f64)?;
            if objective == ObjectiveKind::MinCost {
                m.set_objective_coef(n, inst.storage_unit_cost(v) as f64)?;
            }
            stored.push(n);
        }
        let mut pflags = Vec::with_capacity(item.candidate_paths.len());
        let mut chans = Vec::with_capacity(item.candidate_paths.len());
        for (k, p) in item.candidate_paths.iter().enumerate() {
            pflags.push(m.add_binary(format!("U_{d}_{k}"))?);
            let cap = p.bottleneck(net).expect("validated capacities");
            let b = m.add_integer(format!("B_{d}_{k}"), 0.0, cap as f64)?;
            let coef = match objective {
                ObjectiveKind::MinCost => p.cost as f64,
                ObjectiveKind::MaxBandwidth => 1.0,
            };
            m.set_objective_coef(b, coef)?;
            chans.push(b);
        }
        idx.site_flag.push(flags);
        idx.stored.push(stored);
        idx.path_flag.push(pflags);
        idx.channels.push(chans);
    }

    // Storage capacity of each safe DC.
    for (i, &v) in safe.iter().enumerate() {
        let terms: Vec<_> = idx.stored.iter().map(|s| (s[i], 1.0)).collect();
        m.add_constraint(
            format!("storage_{v}"),
            terms,
            Relation::Le,
            inst.storage_capacity(v) as f64,
        )?;
    }
    // Every item is stored in full.
    for (d, item) in inst.data_items.iter().enumerate() {
        let terms: Vec<_> = idx.stored[d].iter().map(|&n| (n, 1.0)).collect();
        m.add_constraint(format!("conserve_{d}"), terms, Relation::Eq, item.size as f64)?;
    }
    // Link capacity, summed over items and both directions.
    let mut on_link: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); net.links().len()];
    for (d, item) in inst.data_items.iter().enumerate() {
        for (k, p) in item.candidate_paths.iter().enumerate() {
            for l in &p.links {
                on_link[l.0].push((idx.channels[d][k], 1.0));
            }
        }
    }
    for (l, terms) in on_link.into_iter().enumerate() {
        if terms.is_empty() {
            continue;
        }
        let link = &net.links()[l];
        m.add_constraint(
            format!("link_{}_{}", link.a, link.b),
            terms,
            Relation::Le,
            link.capacity.expect("validated capacities") as f64,
        )?;
    }

    for (d, item) in inst.data_items.iter().enumerate() {
        let mut to_site: Vec<Vec<usize>> = vec![Vec::new(); safe.len()];
        for (k, p) in item.candidate_paths.iter().enumerate() {
            let i = safe.binary_search(&p.destination()).expect("validated destination");
            to_site[i].push(k);
        }
        for (i, &v) in safe.iter().enumerate() {
            let ks = &to_site[i];
            // Path count towards one site.
            m.add_constraint(
                format!("paths_{d}_{v}"),
                ks.iter().map(|&k| (idx.path_flag[d][k], 1.0)),
                Relation::Le,
                inst.pn.cap(ks.len()) as f64,
            )?;
            // A chosen site is reached by at least one chosen path.
            m.add_constraint(
                format!("reach_{d}_{v}"),
                ks.iter()
                    .map(|&k| (idx.path_flag[d][k], 1.0))
                    .chain([(idx.site_flag[d][i], -1.0)]),
                Relation::Ge,
                0.0,
            )?;
            let n = idx.stored[d][i];
            let mflag = idx.site_flag[d][i];
            m.add_constraint(format!("site_on_{d}_{v}"), [(mflag, 1.0), (n, -1.0)], Relation::Le, 0.0)?;
            let big_m = lambda.min(model_upper(&m, n));
            m.add_constraint(format!("site_big_m_{d}_{v}"), [(n, 1.0), (mflag, -big_m)], Relation::Le, 0.0)?;
            // Transfer finishes within the warning time.
            m.add_constraint(
                format!("time_{d}_{v}"),
                ks.iter()
                    .map(|&k| (idx.channels[d][k], -eps))
                    .chain([(n, 1.0)]),
                Relation::Le,
                0.0,
            )?;
        }
        let flags: Vec<_> = idx.site_flag[d].iter().map(|&f| (f, 1.0)).collect();
        m.add_constraint(format!("min_sites_{d}"), flags.clone(), Relation::Ge, 1.0)?;
        m.add_constraint(format!("max_sites_{d}"), flags, Relation::Le, inst.vn as f64)?;
        for (k, p) in item.candidate_paths.iter().enumerate() {
            let i = safe.binary_search(&p.destination()).expect("validated destination");
            let u = idx.path_flag[d][k];
            let b = idx.channels[d][k];
            m.add_constraint(
                format!("path_site_{d}_{k}"),
                [(u, 1.0), (idx.site_flag[d][i], -1.0)],
                Relation::Le,
                0.0,
            )?;
            m.add_constraint(format!("path_on_{d}_{k}"), [(u, 1.0), (b, -1.0)], Relation::Le, 0.0)?;
            let big_m = lambda.min(model_upper(&m, b));
            m.add_constraint(format!("path_big_m_{d}_{k}"), [(b, 1.0), (u, -big_m)], Relation::Le, 0.0)?;
        }
    }
    Ok((m, idx))
}

fn model_upper(m: &MilpModel, v: VarId) -> f64 {
    m.variables()[v.0].upper
}
