#![allow(dead_code)]

use ewbackup_milp::{MilpModel, Relation, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random LP with a known interior-ish feasible point, so it is never
/// infeasible. Integer data keeps the oracle's arithmetic well conditioned.
pub fn random_feasible_lp(seed: u64, max_vars: usize) -> MilpModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_vars);
    let sense = if rng.gen_bool(0.5) {
        Sense::Minimize
    } else {
        Sense::Maximize
    };
    let mut m = MilpModel::new(sense);
    let mut point = Vec::new();
    let mut vars = Vec::new();
    for j in 0..n {
        let lo = rng.gen_range(-3..=1) as f64;
        let hi = lo + rng.gen_range(1..=8) as f64;
        let v = m.add_continuous(format!("x{j}"), lo, hi).unwrap();
        m.set_objective_coef(v, rng.gen_range(-6..=6) as f64).unwrap();
        point.push(rng.gen_range(lo..=hi));
        vars.push(v);
    }
    let rows = rng.gen_range(1..=5);
    for r in 0..rows {
        let coefs: Vec<f64> = (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect();
        let act: f64 = coefs.iter().zip(&point).map(|(a, x)| a * x).sum();
        let (rel, rhs) = match rng.gen_range(0..5) {
            0 => (Relation::Eq, act),
            1 | 2 => (Relation::Le, (act + rng.gen_range(0.0..3.0)).round().max(act)),
            _ => (Relation::Ge, (act - rng.gen_range(0.0..3.0)).round().min(act)),
        };
        m.add_constraint(
            format!("r{r}"),
            vars.iter().copied().zip(coefs),
            rel,
            rhs,
        )
        .unwrap();
    }
    m
}

/// Tiny pure-integer model; may be infeasible.
pub fn random_tiny_milp(seed: u64) -> MilpModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=6);
    let sense = if rng.gen_bool(0.5) {
        Sense::Minimize
    } else {
        Sense::Maximize
    };
    let mut m = MilpModel::new(sense);
    let mut vars = Vec::new();
    for j in 0..n {
        let lo = rng.gen_range(0..=2) as f64;
        let hi = rng.gen_range(lo as i64..=5) as f64;
        let v = m.add_integer(format!("x{j}"), lo, hi).unwrap();
        m.set_objective_coef(v, rng.gen_range(-7..=7) as f64).unwrap();
        vars.push(v);
    }
    let rows = rng.gen_range(0..=4);
    for r in 0..rows {
        let terms: Vec<_> = vars
            .iter()
            .map(|&v| (v, rng.gen_range(-4..=4) as f64))
            .collect();
        let rel = match rng.gen_range(0..4) {
            0 => Relation::Eq,
            1 => Relation::Ge,
            _ => Relation::Le,
        };
        let rhs = rng.gen_range(-4..=12) as f64 + if rng.gen_bool(0.3) { 0.5 } else { 0.0 };
        m.add_constraint(format!("r{r}"), terms, rel, rhs).unwrap();
    }
    m
}
