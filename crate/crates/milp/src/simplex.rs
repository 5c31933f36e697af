//! Bounded-variable revised simplex.
//!
//! Every row `a_i x (rel) b_i` gets a logical `s_i = -a_i x` whose bounds
//! encode the relation, so the working system is `[A | I] (x, s) = 0` and
//! the all-logical basis is the identity. Structurals start at their lower
//! bounds.
//!
//! The dual simplex is the main engine, both from scratch and after bound
//! changes. It runs on shifted costs that make the starting basis dual
//! feasible, perturbed slightly to break ties between equal reduced costs.
//! A primal pass on the true costs then finishes from the primal feasible
//! basis it leaves behind.
//!
//! Both passes switch to Bland's smallest-index rule after a run of
//! degenerate pivots and go back to the normal rule once a pivot makes
//! progress.

use crate::error::MilpError;
use crate::factor::{Factor, Work};
use crate::model::{MilpModel, Relation, Sense};

const NONBASIC: usize = usize::MAX;
const PRIMAL_TOL: f64 = 1e-7;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-13;
const REFACTOR_EVERY: usize = 80;
const DEGENERATE_STREAK: u32 = 50;
const PERTURB: f64 = 1e-6;

/// Column/row storage of the constraint matrix plus costs and bounds of
/// structurals followed by logicals, always in minimisation form.
#[derive(Debug, Clone)]
pub(crate) struct LpData {
    pub n: usize,
    pub m: usize,
    col_start: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
    row_start: Vec<usize>,
    row_col: Vec<usize>,
    row_val: Vec<f64>,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// +1 for minimisation, -1 when the model maximises.
    pub sign: f64,
    /// Some empty row is violated by construction.
    pub trivially_infeasible: bool,
}

impl LpData {
    pub fn from_model(model: &MilpModel) -> LpData {
        let n = model.num_vars();
        let sign = match model.sense() {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut trivially_infeasible = false;
        let mut rows = Vec::new();
        for row in model.constraints() {
            if row.terms.is_empty() {
                if !row.relation.holds(0.0, row.rhs, 0.0) {
                    trivially_infeasible = true;
                }
                continue;
            }
            rows.push(row);
        }
        let m = rows.len();

        let mut row_start = Vec::with_capacity(m + 1);
        let mut row_col = Vec::new();
        let mut row_val = Vec::new();
        row_start.push(0);
        let mut col_count = vec![0usize; n];
        for row in &rows {
            for &(v, a) in &row.terms {
                row_col.push(v.0);
                row_val.push(a);
                col_count[v.0] += 1;
            }
            row_start.push(row_col.len());
        }
        let mut col_start = vec![0usize; n + 1];
        for j in 0..n {
            col_start[j + 1] = col_start[j] + col_count[j];
        }
        let mut fill = col_start.clone();
        let mut col_row = vec![0usize; row_col.len()];
        let mut col_val = vec![0.0; row_col.len()];
        for i in 0..m {
            for k in row_start[i]..row_start[i + 1] {
                let j = row_col[k];
                col_row[fill[j]] = i;
                col_val[fill[j]] = row_val[k];
                fill[j] += 1;
            }
        }

        let mut cost = Vec::with_capacity(n + m);
        let mut lower = Vec::with_capacity(n + m);
        let mut upper = Vec::with_capacity(n + m);
        for (var, &c) in model
            .variables()
            .iter()
            .zip(&model.objective().coefficients)
        {
            cost.push(sign * c);
            lower.push(var.lower);
            upper.push(var.upper);
        }
        for row in &rows {
            cost.push(0.0);
            let (lo, hi) = match row.relation {
                Relation::Le => (-row.rhs, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, -row.rhs),
                Relation::Eq => (-row.rhs, -row.rhs),
            };
            lower.push(lo);
            upper.push(hi);
        }

        LpData {
            n,
            m,
            col_start,
            col_row,
            col_val,
            row_start,
            row_col,
            row_val,
            cost,
            lower,
            upper,
            sign,
            trivially_infeasible,
        }
    }

    fn column_nnz(&self, j: usize) -> usize {
        if j < self.n {
            self.col_start[j + 1] - self.col_start[j]
        } else {
            1
        }
    }

    fn load_column(&self, j: usize, w: &mut Work) {
        w.clear();
        if j < self.n {
            for k in self.col_start[j]..self.col_start[j + 1] {
                w.set(self.col_row[k], self.col_val[k]);
            }
        } else {
            w.set(j - self.n, 1.0);
        }
    }

    /// `a_j . y` for a dense `y`.
    fn column_dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            (self.col_start[j]..self.col_start[j + 1])
                .map(|k| self.col_val[k] * y[self.col_row[k]])
                .sum()
        } else {
            y[j - self.n]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
}

/// Compact description of a basis, cheap enough to keep one per open
/// branch-and-bound node. Unlisted structurals are nonbasic at their lower
/// bound and unlisted logicals are basic.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct WarmStart {
    basic_structurals: Vec<u32>,
    nonbasic_logicals: Vec<(u32, bool)>,
    structurals_at_upper: Vec<u32>,
}

pub(crate) struct Simplex<'a> {
    lp: &'a LpData,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    head: Vec<usize>,
    pos: Vec<usize>,
    at_upper: Vec<bool>,
    pub x: Vec<f64>,
    pub d: Vec<f64>,
    /// Costs the reduced costs refer to; perturbed while a solve runs.
    cost: Vec<f64>,
    factor: Factor,
    /// Eta count and fill right after the last refactorization.
    factor_base: (usize, usize),
    col: Work,
    rho: Work,
    row: Work,
    /// Rows whose basic variable may be out of bounds; a superset.
    infeasible: Vec<usize>,
    listed: Vec<bool>,
    pub iterations: u64,
    iteration_cap: u64,
}

impl<'a> Simplex<'a> {
    pub fn new(lp: &'a LpData) -> Self {
        let total = lp.n + lp.m;
        let mut sx = Simplex {
            lp,
            lower: lp.lower.clone(),
            upper: lp.upper.clone(),
            head: (lp.n..total).collect(),
            pos: vec![NONBASIC; total],
            at_upper: vec![false; total],
            x: vec![0.0; total],
            d: vec![0.0; total],
            cost: lp.cost.clone(),
            factor: Factor::new(lp.m),
            factor_base: (0, 0),
            col: Work::new(lp.m),
            rho: Work::new(lp.m),
            row: Work::new(total),
            infeasible: Vec::new(),
            listed: vec![false; lp.m],
            iterations: 0,
            iteration_cap: 0,
        };
        for r in 0..lp.m {
            sx.pos[lp.n + r] = r;
        }
        sx.compute_primal();
        sx.compute_dual();
        sx
    }

    pub fn is_basic(&self, j: usize) -> bool {
        self.pos[j] != NONBASIC
    }

    pub fn nonbasic_at_upper(&self, j: usize) -> bool {
        self.pos[j] == NONBASIC && self.at_upper[j]
    }

    /// Objective of the current point in minimisation form.
    pub fn objective(&self) -> f64 {
        (0..self.lp.n).map(|j| self.lp.cost[j] * self.x[j]).sum()
    }

    pub fn structural_values(&self) -> &[f64] {
        &self.x[..self.lp.n]
    }

    /// Restores the original bounds of every variable.
    pub fn reset_bounds(&mut self, lower: &[f64], upper: &[f64]) {
        self.lower.copy_from_slice(lower);
        self.upper.copy_from_slice(upper);
    }

    /// Changes the bounds of a structural and keeps the basic values
    /// consistent. The basis stays dual feasible; primal feasibility is
    /// restored by the next solve.
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
        if self.pos[j] != NONBASIC {
            self.note_row(self.pos[j]);
            return;
        }
        let target = self.nonbasic_value(j);
        let delta = target - self.x[j];
        if delta == 0.0 {
            return;
        }
        self.lp.load_column(j, &mut self.col);
        self.factor.ftran(&mut self.col);
        for t in 0..self.col.idx.len() {
            let i = self.col.idx[t];
            let b = self.head[i];
            self.x[b] -= delta * self.col.val[i];
            self.note_row(i);
        }
        self.x[j] = target;
    }

    fn note_row(&mut self, r: usize) {
        if !self.listed[r] && self.primal_infeasibility(self.head[r]) != 0.0 {
            self.listed[r] = true;
            self.infeasible.push(r);
        }
    }

    fn rebuild_infeasible(&mut self) {
        for &r in &self.infeasible {
            self.listed[r] = false;
        }
        self.infeasible.clear();
        for r in 0..self.lp.m {
            self.note_row(r);
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        if self.at_upper[j] {
            if self.upper[j].is_finite() {
                self.upper[j]
            } else {
                self.lower[j]
            }
        } else if self.lower[j].is_finite() {
            self.lower[j]
        } else {
            self.upper[j]
        }
    }

    pub fn warm_start(&self) -> WarmStart {
        let n = self.lp.n;
        let mut ws = WarmStart::default();
        for j in 0..n {
            if self.pos[j] != NONBASIC {
                ws.basic_structurals.push(j as u32);
            } else if self.at_upper[j] {
                ws.structurals_at_upper.push(j as u32);
            }
        }
        for i in 0..self.lp.m {
            let j = n + i;
            if self.pos[j] == NONBASIC {
                ws.nonbasic_logicals.push((i as u32, self.at_upper[j]));
            }
        }
        ws
    }

    /// Installs a saved basis under the current bounds and recomputes the
    /// primal and dual values from scratch.
    pub fn load(&mut self, ws: &WarmStart) {
        let n = self.lp.n;
        let m = self.lp.m;
        self.pos.iter_mut().for_each(|p| *p = NONBASIC);
        self.at_upper.iter_mut().for_each(|u| *u = false);
        for &j in &ws.structurals_at_upper {
            self.at_upper[j as usize] = true;
        }
        let mut logical_basic = vec![true; m];
        for &(i, up) in &ws.nonbasic_logicals {
            logical_basic[i as usize] = false;
            self.at_upper[n + i as usize] = up;
        }
        let mut r = 0;
        for &j in &ws.basic_structurals {
            self.head[r] = j as usize;
            self.pos[j as usize] = r;
            r += 1;
        }
        for (i, &basic) in logical_basic.iter().enumerate() {
            if basic {
                self.head[r] = n + i;
                self.pos[n + i] = r;
                r += 1;
            }
        }
        debug_assert_eq!(r, m);
        self.refactor();
        self.compute_primal();
        self.compute_dual();
    }

    fn refresh(&mut self) {
        self.refactor();
        self.compute_primal();
        self.compute_dual();
        self.flip_to_dual_feasibility();
    }

    /// Rebuilds the product-form inverse of the current basis. Columns that
    /// turn out dependent are dropped in favour of logicals.
    fn refactor(&mut self) {
        let lp = self.lp;
        let n = lp.n;
        let m = lp.m;
        self.factor.clear();
        let mut occupied = vec![false; m];
        let mut new_head = vec![NONBASIC; m];
        let mut structurals = Vec::new();
        for &j in &self.head {
            if j >= n {
                occupied[j - n] = true;
                new_head[j - n] = j;
            } else {
                structurals.push(j);
            }
        }
        structurals.sort_by_key(|&j| (lp.column_nnz(j), j));
        // Basic structurals still to place with an entry in each row. An eta
        // pivoting on a row no later column touches causes no fill.
        let mut pending = vec![0u32; m];
        for &j in &structurals {
            for k in lp.col_start[j]..lp.col_start[j + 1] {
                pending[lp.col_row[k]] += 1;
            }
        }
        let mut dropped = Vec::new();
        for &j in &structurals {
            for k in lp.col_start[j]..lp.col_start[j + 1] {
                pending[lp.col_row[k]] -= 1;
            }
            lp.load_column(j, &mut self.col);
            self.factor.ftran(&mut self.col);
            let mut scale: f64 = 0.0;
            let mut free_max: f64 = 0.0;
            for &i in &self.col.idx {
                let a = self.col.val[i].abs();
                scale = scale.max(a);
                if !occupied[i] {
                    free_max = free_max.max(a);
                }
            }
            if free_max <= 1e-9 * scale.max(1.0) {
                dropped.push(j);
                continue;
            }
            // Threshold pivoting: among large enough entries, fewest pending.
            let mut best = NONBASIC;
            let mut best_key = (u32::MAX, 0.0);
            for &i in &self.col.idx {
                let a = self.col.val[i].abs();
                if occupied[i] || a < 0.1 * free_max {
                    continue;
                }
                if pending[i] < best_key.0 || (pending[i] == best_key.0 && a > best_key.1) {
                    best_key = (pending[i], a);
                    best = i;
                }
            }
            self.col.drop_small(DROP_TOL);
            self.factor.push(best, &self.col);
            occupied[best] = true;
            new_head[best] = j;
        }
        self.factor.seal();
        for j in dropped {
            self.pos[j] = NONBASIC;
            self.at_upper[j] = false;
        }
        for i in 0..m {
            if !occupied[i] {
                new_head[i] = n + i;
            }
        }
        self.head = new_head;
        self.factor_base = (self.factor.len(), self.factor.nnz());
        for (r, &j) in self.head.iter().enumerate() {
            self.pos[j] = r;
        }
        for (j, p) in self.pos.iter_mut().enumerate() {
            if *p != NONBASIC && self.head[*p] != j {
                *p = NONBASIC;
            }
        }
    }

    fn compute_primal(&mut self) {
        let lp = self.lp;
        let n = lp.n;
        let total = n + lp.m;
        self.col.clear();
        for j in 0..total {
            if self.pos[j] != NONBASIC {
                continue;
            }
            let v = self.nonbasic_value(j);
            self.x[j] = v;
            if v == 0.0 {
                continue;
            }
            if j < n {
                for k in lp.col_start[j]..lp.col_start[j + 1] {
                    self.col.add(lp.col_row[k], -lp.col_val[k] * v);
                }
            } else {
                self.col.add(j - n, -v);
            }
        }
        self.factor.ftran(&mut self.col);
        for r in 0..lp.m {
            self.x[self.head[r]] = self.col.val[r];
        }
        self.col.clear();
        self.rebuild_infeasible();
    }

    fn compute_dual(&mut self) {
        let lp = self.lp;
        let total = lp.n + lp.m;
        self.rho.clear();
        for r in 0..lp.m {
            let c = self.cost[self.head[r]];
            if c != 0.0 {
                self.rho.set(r, c);
            }
        }
        self.factor.btran(&mut self.rho);
        for j in 0..total {
            self.d[j] = if self.pos[j] != NONBASIC {
                0.0
            } else {
                self.cost[j] - lp.column_dot(j, &self.rho.val)
            };
        }
        self.rho.clear();
    }

    /// Moves boxed nonbasics to the bound their reduced cost prefers.
    /// Returns true if any value changed.
    fn flip_to_dual_feasibility(&mut self) -> bool {
        let total = self.lp.n + self.lp.m;
        let mut flipped = false;
        for j in 0..total {
            if self.pos[j] != NONBASIC {
                continue;
            }
            let boxed = self.lower[j].is_finite() && self.upper[j].is_finite();
            if !boxed || self.lower[j] == self.upper[j] {
                continue;
            }
            if !self.at_upper[j] && self.d[j] < -DUAL_TOL {
                self.at_upper[j] = true;
                flipped = true;
            } else if self.at_upper[j] && self.d[j] > DUAL_TOL {
                self.at_upper[j] = false;
                flipped = true;
            }
        }
        if flipped {
            self.compute_primal();
        }
        flipped
    }

    fn dual_infeasible_logicals(&self) -> bool {
        let n = self.lp.n;
        (n..n + self.lp.m).any(|j| {
            self.pos[j] == NONBASIC
                && self.lower[j] < self.upper[j]
                && ((!self.at_upper[j] && self.d[j] < -DUAL_TOL)
                    || (self.at_upper[j] && self.d[j] > DUAL_TOL))
        })
    }

    fn primal_infeasibility(&self, j: usize) -> f64 {
        let x = self.x[j];
        if x < self.lower[j] - PRIMAL_TOL {
            x - self.lower[j]
        } else if x > self.upper[j] + PRIMAL_TOL {
            x - self.upper[j]
        } else {
            0.0
        }
    }

    fn primal_feasible(&self) -> bool {
        self.head.iter().all(|&j| self.primal_infeasibility(j) == 0.0)
    }

    /// Optimises from the current basis under the current bounds.
    ///
    /// The dual passes run on costs shifted by small deterministic amounts
    /// in the direction that keeps each nonbasic dual feasible, which breaks
    /// ties among equally priced columns. A final pass on the true costs
    /// removes the shift.
    pub fn solve(&mut self) -> Result<LpStatus, MilpError> {
        let total = (self.lp.n + self.lp.m) as u64;
        self.iteration_cap = self.iterations + 50 * total + 10_000;
        self.perturb_costs();
        let status = self.optimise();
        self.cost.copy_from_slice(&self.lp.cost);
        self.compute_dual();
        if status? == LpStatus::Infeasible {
            return Ok(LpStatus::Infeasible);
        }
        if self.primal_feasible() {
            self.primal_phase()?;
            self.refactor();
            self.compute_primal();
            self.compute_dual();
        }
        self.optimise()
    }

    /// Shifts nonbasic costs so every reduced cost has the sign its bound
    /// wants, plus a small perturbation in the same direction.
    fn perturb_costs(&mut self) {
        self.cost.copy_from_slice(&self.lp.cost);
        self.compute_dual();
        let total = self.lp.n + self.lp.m;
        for j in 0..total {
            if self.pos[j] != NONBASIC || self.lower[j] == self.upper[j] {
                continue;
            }
            let c = self.lp.cost[j];
            let shift = PERTURB * (1.0 + c.abs()) * jitter(j);
            let dj = self.d[j];
            let target = if self.at_upper[j] { dj.min(0.0) - shift } else { dj.max(0.0) + shift };
            self.cost[j] += target - dj;
            self.d[j] = target;
        }
    }

    fn optimise(&mut self) -> Result<LpStatus, MilpError> {
        for _ in 0..20 {
            if self.dual_phase()? == LpStatus::Infeasible {
                return Ok(LpStatus::Infeasible);
            }
            self.compute_primal();
            self.compute_dual();
            if self.flip_to_dual_feasibility() {
                continue;
            }
            if self.dual_infeasible_logicals() {
                self.primal_phase()?;
                self.refactor();
                self.compute_primal();
                self.compute_dual();
                self.flip_to_dual_feasibility();
            }
            if self.primal_feasible() {
                return Ok(LpStatus::Optimal);
            }
        }
        Err(MilpError::IterationLimit(self.iterations))
    }

    fn bump(&mut self) -> Result<(), MilpError> {
        self.iterations += 1;
        if self.iterations > self.iteration_cap {
            return Err(MilpError::IterationLimit(self.iterations));
        }
        Ok(())
    }

    /// Tableau row `r` over the nonbasic columns, into `self.row`.
    fn compute_row(&mut self, r: usize) {
        let lp = self.lp;
        let n = lp.n;
        self.rho.clear();
        self.rho.set(r, 1.0);
        self.factor.btran(&mut self.rho);
        self.row.clear();
        for t in 0..self.rho.idx.len() {
            let i = self.rho.idx[t];
            let ri = self.rho.val[i];
            if ri.abs() <= DROP_TOL {
                continue;
            }
            for k in lp.row_start[i]..lp.row_start[i + 1] {
                let j = lp.row_col[k];
                if self.pos[j] == NONBASIC {
                    self.row.add(j, ri * lp.row_val[k]);
                }
            }
            if self.pos[n + i] == NONBASIC {
                self.row.add(n + i, ri);
            }
        }
    }

    /// Replaces the basic variable of row `r` by `q`. The periodic
    /// refactorization recomputes values; `dual` also moves boxed
    /// nonbasics to the bound their reduced cost prefers.
    fn pivot(&mut self, r: usize, q: usize, leaving_to_upper: bool, dual: bool) {
        let leaving = self.head[r];
        self.factor.push(r, &self.col);
        self.head[r] = q;
        self.pos[q] = r;
        self.pos[leaving] = NONBASIC;
        self.at_upper[leaving] = leaving_to_upper;
        self.x[leaving] = if leaving_to_upper {
            self.upper[leaving]
        } else {
            self.lower[leaving]
        };
        self.d[q] = 0.0;
        let (len0, nnz0) = self.factor_base;
        if self.factor.len() - len0 >= REFACTOR_EVERY
            || self.factor.nnz() - nnz0 > 4 * self.lp.m + nnz0 + 10_000
        {
            self.refactor();
            self.compute_primal();
            self.compute_dual();
            if dual {
                self.flip_to_dual_feasibility();
            }
        }
    }

    fn dual_phase(&mut self) -> Result<LpStatus, MilpError> {
        let mut degenerate = 0u32;
        let mut retried = false;
        loop {
            let bland = degenerate >= DEGENERATE_STREAK;
            // Leaving row: largest infeasibility, or smallest variable index.
            let mut r = NONBASIC;
            let mut best = 0.0;
            let mut best_var = NONBASIC;
            let mut k = 0;
            while k < self.infeasible.len() {
                let p = self.infeasible[k];
                let j = self.head[p];
                let inf = self.primal_infeasibility(j);
                if inf == 0.0 {
                    self.listed[p] = false;
                    self.infeasible.swap_remove(k);
                    continue;
                }
                k += 1;
                if bland {
                    if j < best_var {
                        best_var = j;
                        r = p;
                    }
                } else if inf.abs() > best || (inf.abs() == best && p < r) {
                    best = inf.abs();
                    r = p;
                }
            }
            if r == NONBASIC {
                return Ok(LpStatus::Optimal);
            }
            self.bump()?;
            let leaving = self.head[r];
            let delta = self.primal_infeasibility(leaving);
            let to_upper = delta > 0.0;
            let dir = if to_upper { 1.0 } else { -1.0 };
            self.compute_row(r);

            // Ratio test with Harris tolerances (or exact minimum under Bland).
            let mut q = NONBASIC;
            let mut theta_max = f64::INFINITY;
            let mut candidates: Vec<(usize, f64, f64)> = Vec::new();
            for t_idx in 0..self.row.idx.len() {
                let j = self.row.idx[t_idx];
                let alpha = self.row.val[j];
                let t = dir * alpha;
                if t.abs() <= PIVOT_TOL || self.lower[j] == self.upper[j] {
                    continue;
                }
                // At lower the entering variable may only increase, at upper
                // only decrease.
                let mut dj = match (self.at_upper[j], t > 0.0) {
                    (false, true) => self.d[j],
                    (true, false) => -self.d[j],
                    _ => continue,
                };
                if dj < 0.0 {
                    // Slightly wrong sign: shift the cost to make it zero.
                    self.cost[j] -= self.d[j];
                    self.d[j] = 0.0;
                    dj = 0.0;
                }
                let ratio = dj / t.abs();
                candidates.push((j, ratio, t.abs()));
                let harris = (dj + DUAL_TOL) / t.abs();
                if harris < theta_max {
                    theta_max = harris;
                }
            }
            if candidates.is_empty() {
                if !retried {
                    retried = true;
                    self.refresh();
                    continue;
                }
                return Ok(LpStatus::Infeasible);
            }
            retried = false;
            if bland {
                let min_ratio = candidates
                    .iter()
                    .map(|c| c.1)
                    .fold(f64::INFINITY, f64::min);
                let limit = min_ratio + 1e-12 * (1.0 + min_ratio);
                q = candidates
                    .iter()
                    .filter(|c| c.1 <= limit)
                    .map(|c| c.0)
                    .min()
                    .unwrap_or(NONBASIC);
            } else {
                let mut best_t = 0.0;
                for &(j, ratio, t) in &candidates {
                    if ratio <= theta_max && (t > best_t || (t == best_t && j < q)) {
                        best_t = t;
                        q = j;
                    }
                }
            }
            let alpha_row_q = self.row.val[q];

            self.lp.load_column(q, &mut self.col);
            self.factor.ftran(&mut self.col);
            let alpha_rq = self.col.val[r];
            if alpha_rq.abs() <= PIVOT_TOL
                || (alpha_rq - alpha_row_q).abs() > 1e-6 * (1.0 + alpha_rq.abs())
            {
                // Inverse has drifted: rebuild and try again.
                self.refresh();
                continue;
            }

            // Dual update.
            let mut dq = self.d[q];
            if (self.at_upper[q] && dq > 0.0) || (!self.at_upper[q] && dq < 0.0) {
                // Shift the cost so the entering reduced cost is exactly zero.
                self.cost[q] -= dq;
                dq = 0.0;
            }
            let theta_d = dq / alpha_rq;
            if theta_d != 0.0 {
                for t in 0..self.row.idx.len() {
                    let j = self.row.idx[t];
                    self.d[j] -= theta_d * self.row.val[j];
                }
            }
            self.d[leaving] = -theta_d;
            if theta_d.abs() <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }

            // Primal update.
            let theta_p = delta / alpha_rq;
            for t in 0..self.col.idx.len() {
                let i = self.col.idx[t];
                let b = self.head[i];
                self.x[b] -= theta_p * self.col.val[i];
                self.note_row(i);
            }
            self.x[q] += theta_p;
            self.pivot(r, q, to_upper, true);
            self.note_row(r);
        }
    }

    /// Primal pivots with the bounds of the starting basic variables
    /// widened by small deterministic amounts, so degenerate vertices give
    /// way to short steps. The true bounds are back in place on return.
    fn primal_phase(&mut self) -> Result<(), MilpError> {
        let saved: Vec<(usize, f64, f64)> = self
            .head
            .iter()
            .map(|&b| (b, self.lower[b], self.upper[b]))
            .collect();
        for &(b, lo, hi) in &saved {
            let u = jitter(b);
            if lo.is_finite() {
                self.lower[b] = lo - 1e-6 * (1.0 + lo.abs()) * u;
            }
            if hi.is_finite() {
                self.upper[b] = hi + 1e-6 * (1.0 + hi.abs()) * u;
            }
        }
        let result = self.primal_pivots();
        for (b, lo, hi) in saved {
            self.lower[b] = lo;
            self.upper[b] = hi;
        }
        result
    }

    fn primal_pivots(&mut self) -> Result<(), MilpError> {
        let total = self.lp.n + self.lp.m;
        let mut degenerate = 0u32;
        loop {
            let bland = degenerate >= DEGENERATE_STREAK;
            let mut q = NONBASIC;
            let mut best = 0.0;
            for j in 0..total {
                if self.pos[j] != NONBASIC || self.lower[j] == self.upper[j] {
                    continue;
                }
                let dj = self.d[j];
                let improving = if self.at_upper[j] {
                    dj > DUAL_TOL && self.lower[j] < self.upper[j]
                } else {
                    dj < -DUAL_TOL
                };
                if !improving {
                    continue;
                }
                if bland {
                    q = j;
                    break;
                }
                if dj.abs() > best {
                    best = dj.abs();
                    q = j;
                }
            }
            if q == NONBASIC {
                return Ok(());
            }
            self.bump()?;
            let dir = if self.at_upper[q] { -1.0 } else { 1.0 };
            self.lp.load_column(q, &mut self.col);
            self.factor.ftran(&mut self.col);

            let mut step = self.upper[q] - self.lower[q];
            let mut r = NONBASIC;
            let mut r_to_upper = false;
            let mut r_alpha = 0.0;
            for &i in &self.col.idx {
                let a = self.col.val[i];
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let b = self.head[i];
                let rate = -dir * a;
                let (limit, to_upper) = if rate < 0.0 {
                    if !self.lower[b].is_finite() {
                        continue;
                    }
                    (((self.x[b] - self.lower[b]).max(0.0)) / -rate, false)
                } else {
                    if !self.upper[b].is_finite() {
                        continue;
                    }
                    (((self.upper[b] - self.x[b]).max(0.0)) / rate, true)
                };
                let better = if bland {
                    limit < step - 1e-12 || (limit <= step + 1e-12 && r != NONBASIC && b < self.head[r])
                } else {
                    limit < step - 1e-12 || (limit <= step + 1e-12 && a.abs() > r_alpha)
                };
                if better {
                    step = limit;
                    r = i;
                    r_to_upper = to_upper;
                    r_alpha = a.abs();
                }
            }
            if !step.is_finite() {
                return Err(MilpError::Unbounded);
            }
            if step <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            for t in 0..self.col.idx.len() {
                let i = self.col.idx[t];
                let b = self.head[i];
                self.x[b] -= dir * step * self.col.val[i];
            }
            if r == NONBASIC {
                self.at_upper[q] = !self.at_upper[q];
                self.x[q] = self.nonbasic_value(q);
                continue;
            }
            self.x[q] += dir * step;
            let alpha_rq = self.col.val[r];
            self.compute_row(r);
            let theta_d = self.d[q] / alpha_rq;
            for t in 0..self.row.idx.len() {
                let j = self.row.idx[t];
                self.d[j] -= theta_d * self.row.val[j];
            }
            let leaving = self.head[r];
            self.d[leaving] = -theta_d;
            self.pivot(r, q, r_to_upper, false);
        }
    }
}

/// Fixed pseudo-random factor in `[1, 2)` per column.
fn jitter(j: usize) -> f64 {
    let h = (j as u64 ^ 0x9e37_79b9_7f4a_7c15).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    1.0 + (h >> 11) as f64 / (1u64 << 53) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MilpModel, Relation, Sense};

    fn solve(model: &MilpModel) -> (LpStatus, f64, Vec<f64>) {
        let lp = LpData::from_model(model);
        let mut sx = Simplex::new(&lp);
        let st = sx.solve().unwrap();
        (st, lp.sign * sx.objective(), sx.structural_values().to_vec())
    }

    #[test]
    fn single_variable_lower_row() {
        let mut m = MilpModel::new(Sense::Minimize);
        let x = m.add_continuous("x", 0.0, 10.0).unwrap();
        m.set_objective_coef(x, 1.0).unwrap();
        m.add_constraint("r", [(x, 1.0)], Relation::Ge, 3.0).unwrap();
        let (st, obj, xs) = solve(&m);
        assert_eq!(st, LpStatus::Optimal);
        assert!((obj - 3.0).abs() < 1e-9);
        assert!((xs[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn maximisation_with_shared_budget() {
        let mut m = MilpModel::new(Sense::Maximize);
        let x = m.add_continuous("x", 0.0, 1.0).unwrap();
        let y = m.add_continuous("y", 0.0, 1.0).unwrap();
        m.set_objective_coef(x, 1.0).unwrap();
        m.set_objective_coef(y, 1.0).unwrap();
        m.add_constraint("r", [(x, 1.0), (y, 1.0)], Relation::Le, 1.0).unwrap();
        let (st, obj, _) = solve(&m);
        assert_eq!(st, LpStatus::Optimal);
        assert!((obj - 1.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_rows() {
        let mut m = MilpModel::new(Sense::Minimize);
        let x = m.add_continuous("x", 0.0, 5.0).unwrap();
        m.add_constraint("a", [(x, 1.0)], Relation::Le, 0.0).unwrap();
        m.add_constraint("b", [(x, 1.0)], Relation::Ge, 1.0).unwrap();
        assert_eq!(solve(&m).0, LpStatus::Infeasible);
    }

    #[test]
    fn warm_start_round_trip_reproduces_point() {
        let mut m = MilpModel::new(Sense::Minimize);
        let x = m.add_continuous("x", 0.0, 4.0).unwrap();
        let y = m.add_continuous("y", 0.0, 4.0).unwrap();
        m.set_objective_coef(x, 2.0).unwrap();
        m.set_objective_coef(y, 3.0).unwrap();
        m.add_constraint("r", [(x, 1.0), (y, 1.0)], Relation::Ge, 5.0).unwrap();
        let lp = LpData::from_model(&m);
        let mut sx = Simplex::new(&lp);
        assert_eq!(sx.solve().unwrap(), LpStatus::Optimal);
        assert!((sx.objective() - 11.0).abs() < 1e-9);
        let ws = sx.warm_start();
        let mut other = Simplex::new(&lp);
        other.load(&ws);
        assert_eq!(other.solve().unwrap(), LpStatus::Optimal);
        assert!((other.objective() - 11.0).abs() < 1e-9);
        // Tighten x and resolve from the optimal basis.
        other.set_bounds(0, 0.0, 2.0);
        assert_eq!(other.solve().unwrap(), LpStatus::Optimal);
        assert!((other.objective() - 13.0).abs() < 1e-9);
    }
}
