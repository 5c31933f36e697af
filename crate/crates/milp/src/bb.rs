//! Best-bound branch-and-bound over the dual simplex.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::{Duration, Instant};

use crate::error::MilpError;
use crate::exact::satisfies_exactly;
use crate::model::MilpModel;
use crate::result::{SolveResult, SolveStats, Status};
use crate::simplex::{LpData, LpStatus, Simplex, WarmStart};
use crate::TOLERANCE;

#[derive(Debug, Clone, PartialEq)]
pub struct BbParams {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    /// Run a rounding dive from every n-th processed node; 0 dives at the
    /// root only.
    pub dive_interval: u64,
}

impl Default for BbParams {
    fn default() -> Self {
        BbParams {
            time_limit: None,
            node_limit: None,
            dive_interval: 64,
        }
    }
}

impl BbParams {
    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }
}

/// Solves the model with integrality dropped.
pub fn solve_lp_relaxation(model: &MilpModel) -> Result<SolveResult, MilpError> {
    let start = Instant::now();
    let lp = LpData::from_model(model);
    let mut stats = SolveStats::default();
    if lp.trivially_infeasible {
        stats.wall_time = start.elapsed();
        return Ok(SolveResult::infeasible(stats));
    }
    let mut sx = Simplex::new(&lp);
    let status = sx.solve()?;
    stats.lp_iterations = sx.iterations;
    stats.wall_time = start.elapsed();
    if status == LpStatus::Infeasible {
        return Ok(SolveResult::infeasible(stats));
    }
    let values = sx.structural_values().to_vec();
    let obj = model.objective().evaluate(&values);
    Ok(SolveResult {
        status: Status::Optimal,
        values,
        objective_value: Some(obj),
        best_bound: Some(obj),
        stats,
    })
}

type BoundChange = (u32, f64, f64);

struct Node {
    bound: f64,
    depth: u32,
    seq: u64,
    changes: Vec<BoundChange>,
    basis: Rc<WarmStart>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    /// Max-heap order: lowest bound first, then newest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.seq.cmp(&other.seq))
    }
}

#[derive(Clone, Copy)]
enum Dive {
    /// Raise the lower bound of the variable closest to its ceiling.
    Up,
    /// Round the least fractional variable to its nearest integer.
    Nearest,
}

struct Search<'m> {
    model: &'m MilpModel,
    lp: &'m LpData,
    integral_objective: bool,
    pure_integer: bool,
    global_lower: Vec<f64>,
    global_upper: Vec<f64>,
    incumbent: Option<(f64, Vec<f64>)>,
    root: Option<RootDuals>,
    start: Instant,
    params: BbParams,
}

/// Root reduced costs, kept for fixing variables whenever the incumbent
/// improves.
struct RootDuals {
    objective: f64,
    reduced: Vec<f64>,
    at_lower: Vec<Option<bool>>,
}

impl Search<'_> {
    fn out_of_time(&self) -> bool {
        self.params
            .time_limit
            .is_some_and(|t| self.start.elapsed() >= t)
    }

    fn round_bound(&self, obj: f64) -> f64 {
        if self.integral_objective {
            (obj - TOLERANCE).ceil()
        } else {
            obj
        }
    }

    /// Whether a node with this (internal, minimising) bound can still
    /// beat the incumbent.
    fn can_improve(&self, bound: f64) -> bool {
        match &self.incumbent {
            None => true,
            Some((inc, _)) => {
                if self.integral_objective {
                    bound <= inc - 1.0 + 1e-9
                } else {
                    bound < inc - 1e-9 * inc.abs().max(1.0)
                }
            }
        }
    }

    fn branching_candidate(&self, x: &[f64]) -> Option<usize> {
        let mut best = None;
        let mut best_frac = TOLERANCE;
        for (j, var) in self.model.variables().iter().enumerate() {
            if !var.integer {
                continue;
            }
            let f = x[j] - x[j].floor();
            let frac = f.min(1.0 - f);
            if frac > best_frac {
                best_frac = frac;
                best = Some(j);
            }
        }
        best
    }

    /// Rounds an integral LP point and keeps it if it verifies and improves.
    fn offer(&mut self, x: &[f64]) -> bool {
        let values: Vec<f64> = self
            .model
            .variables()
            .iter()
            .zip(x)
            .map(|(var, &v)| {
                let v = if var.integer { v.round() } else { v };
                v.clamp(var.lower, var.upper)
            })
            .collect();
        let ok = if self.pure_integer {
            satisfies_exactly(self.model, &values)
        } else {
            self.model.is_feasible(&values, TOLERANCE)
        };
        if !ok {
            return false;
        }
        let obj = self.lp.sign * self.model.objective().evaluate(&values);
        if !self.can_improve(obj) {
            return false;
        }
        self.incumbent = Some((obj, values));
        self.fix_by_reduced_cost();
        true
    }

    fn fix_by_reduced_cost(&mut self) {
        let (Some(root), Some((inc, _))) = (&self.root, &self.incumbent) else {
            return;
        };
        let target = if self.integral_objective { inc - 1.0 } else { *inc };
        let gap = target - root.objective;
        if gap < 0.0 {
            return;
        }
        for (j, var) in self.model.variables().iter().enumerate() {
            let Some(at_lower) = root.at_lower[j] else {
                continue;
            };
            let dj = root.reduced[j];
            let room = gap / dj.abs();
            let room = if var.integer { (room + 1e-9).floor() } else { room };
            if at_lower && dj > 1e-9 {
                let ub = self.lp.lower[j] + room;
                if ub < self.global_upper[j] {
                    self.global_upper[j] = ub.max(self.global_lower[j]);
                }
            } else if !at_lower && dj < -1e-9 {
                let lb = self.lp.upper[j] - room;
                if lb > self.global_lower[j] {
                    self.global_lower[j] = lb.min(self.global_upper[j]);
                }
            }
        }
    }

    /// Bounds of a node over structurals and logicals, or `None` if empty.
    fn node_bounds(&self, changes: &[BoundChange]) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = self.lp.n;
        let mut lower = self.global_lower.clone();
        let mut upper = self.global_upper.clone();
        for &(j, lb, ub) in changes {
            let j = j as usize;
            lower[j] = lower[j].max(lb);
            upper[j] = upper[j].min(ub);
            if lower[j] > upper[j] {
                return None;
            }
        }
        lower.extend_from_slice(&self.lp.lower[n..]);
        upper.extend_from_slice(&self.lp.upper[n..]);
        Some((lower, upper))
    }

    /// Puts the node's bounds into the simplex. False if they are empty.
    fn install_bounds(&self, sx: &mut Simplex, changes: &[BoundChange]) -> bool {
        match self.node_bounds(changes) {
            Some((lower, upper)) => {
                sx.reset_bounds(&lower, &upper);
                true
            }
            None => false,
        }
    }

    fn dive(&mut self, sx: &mut Simplex, rule: Dive) -> Result<(), MilpError> {
        let int_count = self.model.variables().iter().filter(|v| v.integer).count();
        for _ in 0..(2 * int_count + 16) {
            if self.out_of_time() {
                return Ok(());
            }
            let x = sx.structural_values();
            let mut pick: Option<(usize, f64)> = None;
            for (j, var) in self.model.variables().iter().enumerate() {
                if !var.integer {
                    continue;
                }
                let f = x[j] - x[j].floor();
                if f.min(1.0 - f) <= TOLERANCE {
                    continue;
                }
                let score = match rule {
                    Dive::Up => 1.0 - f,
                    Dive::Nearest => f.min(1.0 - f),
                };
                if pick.map_or(true, |(_, s)| score < s) {
                    pick = Some((j, score));
                }
            }
            let Some((j, _)) = pick else {
                let x = x.to_vec();
                self.offer(&x);
                return Ok(());
            };
            let v = x[j];
            let (lb, ub) = (sx.lower[j], sx.upper[j]);
            let up = match rule {
                Dive::Up => true,
                Dive::Nearest => v - v.floor() >= 0.5,
            };
            if up {
                sx.set_bounds(j, v.ceil(), ub);
            } else {
                sx.set_bounds(j, lb, v.floor());
            }
            if sx.solve()? == LpStatus::Infeasible {
                return Ok(());
            }
            if !self.can_improve(self.round_bound(sx.objective())) {
                return Ok(());
            }
        }
        Ok(())
    }
}

/// Branch-and-bound to proven optimality, or until a limit is reached.
///
/// Nodes are explored lowest bound first; ties go to the newest node, which
/// plunges into the last subtree. The search order, and every statistic
/// except wall time, is a function of the model and the node limit alone.
pub fn solve_bb(model: &MilpModel, params: &BbParams) -> Result<SolveResult, MilpError> {
    let start = Instant::now();
    let lp = LpData::from_model(model);
    let mut stats = SolveStats::default();
    if lp.trivially_infeasible {
        stats.wall_time = start.elapsed();
        return Ok(SolveResult::infeasible(stats));
    }
    let vars = model.variables();
    let coefs = &model.objective().coefficients;
    let integral_objective = vars
        .iter()
        .zip(coefs)
        .all(|(v, &c)| c == 0.0 || (v.integer && c.fract() == 0.0));
    let pure_integer = vars.iter().all(|v| v.integer);
    let n = lp.n;
    let mut search = Search {
        model,
        lp: &lp,
        integral_objective,
        pure_integer,
        global_lower: lp.lower[..n].to_vec(),
        global_upper: lp.upper[..n].to_vec(),
        incumbent: None,
        root: None,
        start,
        params: params.clone(),
    };

    let mut sx = Simplex::new(&lp);
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut stopped_bound: Option<f64> = None;
    let mut warm: Option<Rc<WarmStart>> = None;
    let mut root = Some(Node {
        bound: f64::NEG_INFINITY,
        depth: 0,
        seq: 0,
        changes: Vec::new(),
        basis: Rc::new(sx.warm_start()),
    });

    loop {
        let node = match root.take() {
            Some(node) => node,
            None => match heap.pop() {
                Some(node) => node,
                None => break,
            },
        };
        if !search.can_improve(node.bound) {
            // Best-bound order: nothing left can improve either.
            heap.clear();
            break;
        }
        let limit_hit = search.out_of_time()
            || params.node_limit.is_some_and(|l| stats.nodes >= l);
        if limit_hit {
            let rest = heap.iter().map(|n: &Node| n.bound).fold(node.bound, f64::min);
            stopped_bound = Some(rest);
            break;
        }
        let is_root = node.depth == 0;
        if !is_root {
            stats.nodes += 1;
        }
        let Some((lower, upper)) = search.node_bounds(&node.changes) else {
            continue;
        };
        if warm.take().is_some_and(|w| Rc::ptr_eq(&w, &node.basis)) {
            // The simplex still holds the parent's optimal basis.
            for j in 0..n {
                if sx.lower[j] != lower[j] || sx.upper[j] != upper[j] {
                    sx.set_bounds(j, lower[j], upper[j]);
                }
            }
        } else {
            sx.reset_bounds(&lower, &upper);
            sx.load(&node.basis);
        }
        if sx.solve()? == LpStatus::Infeasible {
            continue;
        }
        let obj = sx.objective();
        let bound = search.round_bound(obj);
        if is_root {
            search.root = Some(RootDuals {
                objective: obj,
                reduced: sx.d[..n].to_vec(),
                at_lower: (0..n)
                    .map(|j| (!sx.is_basic(j)).then(|| !sx.nonbasic_at_upper(j)))
                    .collect(),
            });
        }
        if !search.can_improve(bound) {
            continue;
        }
        let x = sx.structural_values().to_vec();
        let Some(branch) = search.branching_candidate(&x) else {
            search.offer(&x);
            continue;
        };
        let basis = Rc::new(sx.warm_start());
        let dive_now = is_root
            || (params.dive_interval > 0 && stats.nodes % params.dive_interval == 0);
        if dive_now {
            search.dive(&mut sx, Dive::Up)?;
            if is_root {
                search.install_bounds(&mut sx, &node.changes);
                sx.load(&basis);
                sx.solve()?;
                search.dive(&mut sx, Dive::Nearest)?;
            }
            if !search.can_improve(bound) {
                continue;
            }
        } else {
            warm = Some(Rc::clone(&basis));
        }
        let v = x[branch];
        for (lb, ub) in [(f64::NEG_INFINITY, v.floor()), (v.ceil(), f64::INFINITY)] {
            let mut changes = node.changes.clone();
            changes.push((branch as u32, lb, ub));
            seq += 1;
            heap.push(Node {
                bound,
                depth: node.depth + 1,
                seq,
                changes,
                basis: Rc::clone(&basis),
            });
        }
    }

    stats.lp_iterations = sx.iterations;
    stats.wall_time = start.elapsed();
    let sign = lp.sign;
    match (search.incumbent, stopped_bound) {
        (None, None) => Ok(SolveResult::infeasible(stats)),
        (Some((obj, values)), None) => Ok(SolveResult {
            status: Status::Optimal,
            values,
            objective_value: Some(sign * obj),
            best_bound: Some(sign * obj),
            stats,
        }),
        (incumbent, Some(bound)) => {
            let bound = match &incumbent {
                Some((obj, _)) => bound.min(*obj),
                None => bound,
            };
            let (objective_value, values) = match incumbent {
                Some((obj, values)) => (Some(sign * obj), values),
                None => (None, Vec::new()),
            };
            Ok(SolveResult {
                status: Status::BoundExceeded,
                values,
                objective_value,
                best_bound: bound.is_finite().then_some(sign * bound),
                stats,
            })
        }
    }
}
