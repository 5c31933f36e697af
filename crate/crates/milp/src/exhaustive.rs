//! Brute-force oracle: enumerates every integer assignment in lexicographic
//! order, filtering partial assignments that can no longer satisfy a row.

use std::time::Instant;

use crate::error::MilpError;
use crate::model::{MilpModel, Relation, Sense};
use crate::result::{SolveResult, SolveStats, Status};

/// Largest product of domain sizes the oracle accepts by default.
pub const DEFAULT_DOMAIN_CAP: f64 = 1e7;

const TOL: f64 = 1e-9;

struct Search<'a> {
    model: &'a MilpModel,
    lo: Vec<i64>,
    hi: Vec<i64>,
    /// Per variable: rows it appears in, with coefficient.
    occurs: Vec<Vec<(usize, f64)>>,
    acc: Vec<f64>,
    min_rest: Vec<f64>,
    max_rest: Vec<f64>,
    current: Vec<f64>,
    best: Option<(f64, Vec<f64>)>,
    sign: f64,
    visited: u64,
}

impl Search<'_> {
    fn row_possible(&self, c: usize) -> bool {
        let row = &self.model.constraints()[c];
        let lo = self.acc[c] + self.min_rest[c];
        let hi = self.acc[c] + self.max_rest[c];
        match row.relation {
            Relation::Le => lo <= row.rhs + TOL,
            Relation::Ge => hi >= row.rhs - TOL,
            Relation::Eq => lo <= row.rhs + TOL && hi >= row.rhs - TOL,
        }
    }

    fn descend(&mut self, k: usize) {
        self.visited += 1;
        if k == self.lo.len() {
            let obj = self.sign * self.model.objective().evaluate(&self.current);
            if self.best.as_ref().map_or(true, |(b, _)| obj < *b - 1e-12) {
                self.best = Some((obj, self.current.clone()));
            }
            return;
        }
        let (lo, hi) = (self.lo[k], self.hi[k]);
        for &(c, a) in &self.occurs[k] {
            let (p, q) = (a * lo as f64, a * hi as f64);
            self.min_rest[c] -= p.min(q);
            self.max_rest[c] -= p.max(q);
        }
        for v in lo..=hi {
            let x = v as f64;
            self.current[k] = x;
            let mut ok = true;
            for &(c, a) in &self.occurs[k] {
                self.acc[c] += a * x;
            }
            for t in 0..self.occurs[k].len() {
                if !self.row_possible(self.occurs[k][t].0) {
                    ok = false;
                    break;
                }
            }
            if ok {
                self.descend(k + 1);
            }
            for &(c, a) in &self.occurs[k] {
                self.acc[c] -= a * x;
            }
        }
        for &(c, a) in &self.occurs[k] {
            let (p, q) = (a * lo as f64, a * hi as f64);
            self.min_rest[c] += p.min(q);
            self.max_rest[c] += p.max(q);
        }
        self.current[k] = lo as f64;
    }
}

/// Exhaustive search with the default domain cap.
pub fn solve_exhaustive(model: &MilpModel) -> Result<SolveResult, MilpError> {
    solve_exhaustive_with_cap(model, DEFAULT_DOMAIN_CAP)
}

/// Globally optimal solution by enumeration. Refuses models with a
/// continuous variable or more than `cap` integer points in the box.
/// Among equally good points the lexicographically smallest wins.
pub fn solve_exhaustive_with_cap(model: &MilpModel, cap: f64) -> Result<SolveResult, MilpError> {
    let start = Instant::now();
    let n = model.num_vars();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    let mut size = 1.0f64;
    for var in model.variables() {
        if !var.integer {
            return Err(MilpError::ContinuousVariable(var.name.clone()));
        }
        let l = (var.lower - 1e-9).ceil() as i64;
        let h = (var.upper + 1e-9).floor() as i64;
        size *= (h - l + 1).max(0) as f64;
        lo.push(l);
        hi.push(h);
    }
    if size > cap {
        return Err(MilpError::DomainTooLarge { size, cap });
    }
    let m = model.num_constraints();
    let mut occurs = vec![Vec::new(); n];
    let mut min_rest = vec![0.0; m];
    let mut max_rest = vec![0.0; m];
    for (c, row) in model.constraints().iter().enumerate() {
        for &(v, a) in &row.terms {
            occurs[v.0].push((c, a));
            let (p, q) = (a * lo[v.0] as f64, a * hi[v.0] as f64);
            min_rest[c] += p.min(q);
            max_rest[c] += p.max(q);
        }
    }
    let sign = match model.sense() {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut search = Search {
        model,
        current: lo.iter().map(|&l| l as f64).collect(),
        lo,
        hi,
        occurs,
        acc: vec![0.0; m],
        min_rest,
        max_rest,
        best: None,
        sign,
        visited: 0,
    };
    let empty_row_violated = (0..m).any(|c| {
        model.constraints()[c].terms.is_empty() && !search.row_possible(c)
    });
    if size > 0.0 && !empty_row_violated {
        search.descend(0);
    }
    let stats = SolveStats {
        nodes: search.visited,
        lp_iterations: 0,
        wall_time: start.elapsed(),
    };
    Ok(match search.best {
        None => SolveResult::infeasible(stats),
        Some((obj, values)) => SolveResult {
            status: Status::Optimal,
            values,
            objective_value: Some(sign * obj),
            best_bound: Some(sign * obj),
            stats,
        },
    })
}
