//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints one PASS or FAIL line; the exit code is nonzero when
//! any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::{random_tiny, table};
use ewbackup::harness::{
    cell_instance, csv_string, generate_instance, run_experiment, ScenarioConfig,
};
use ewbackup::netmodel::{
    builtin_internetmci, builtin_internetmci_11dc, DcInfo, Instance, InstanceParams, NodeId,
};
use ewbackup::planner::{build_backup_ilp, plan_instance, validate_plan, ObjectiveKind};
use ewbackup_milp::{
    solve_bb, solve_exhaustive, solve_lp_relaxation, BbParams, MilpError, MilpModel, Relation,
    Sense, Status, DEFAULT_DOMAIN_CAP,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Per-solve limit for the four-size campaign.
const CAMPAIGN_LIMIT: Duration = Duration::from_secs(60);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn oracle_equivalence() -> Outcome {
    let mut checked = 0;
    let mut mismatches = Vec::new();
    let mut seed = 0;
    while checked < 120 {
        let inst = random_tiny(seed);
        seed += 1;
        let (model, _) = build_backup_ilp(&inst).unwrap();
        let exhaustive = match solve_exhaustive(&model) {
            Ok(r) => r,
            Err(MilpError::DomainTooLarge { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        let bb = solve_bb(&model, &BbParams::default()).unwrap();
        checked += 1;
        if bb.status != exhaustive.status || bb.objective_value != exhaustive.objective_value {
            mismatches.push(seed - 1);
        }
    }
    outcome(
        mismatches.is_empty(),
        format!(
            "{checked} tiny instances (domain cap {DEFAULT_DOMAIN_CAP:e}), mismatching seeds {mismatches:?}"
        ),
    )
}

fn feasibility_audit() -> Outcome {
    // Ten seeds for each item count 1..=5, warning times varied per seed.
    let cfg = ScenarioConfig {
        d_counts: vec![1, 2, 3, 4, 5],
        epsilon1: vec![70],
        seeds: (1..=10).collect(),
        max_hops: Some(3),
        time_limit: None,
        node_limit: Some(20_000),
        timing: false,
        ..ScenarioConfig::paper()
    };
    let network = cfg.topology.load().unwrap();
    let params = BbParams::default().with_node_limit(20_000);
    let (mut optimal, mut bad) = (0, Vec::new());
    for &d in &cfg.d_counts {
        for &seed in &cfg.seeds {
            let eps = [10, 30, 50, 70][seed as usize % 4];
            let inst = cell_instance(&cfg, &network, d, eps, seed).unwrap();
            for kind in [ObjectiveKind::MinCost, ObjectiveKind::MaxBandwidth] {
                let out = plan_instance(&inst, kind, &params).unwrap();
                if out.result.status != Status::Optimal {
                    continue;
                }
                optimal += 1;
                let violations = validate_plan(&inst, out.plan.as_ref().unwrap());
                if !violations.is_empty() {
                    bad.push((d, seed, kind.as_str(), violations.len()));
                }
            }
        }
    }
    outcome(
        bad.is_empty() && optimal > 0,
        format!("50 instances, {optimal} optimal plans validated, failures {bad:?}"),
    )
}

fn dominance_and_trend() -> Outcome {
    let cfg = ScenarioConfig {
        seeds: vec![1, 2, 3],
        time_limit: Some(CAMPAIGN_LIMIT),
        timing: false,
        ..ScenarioConfig::paper()
    };
    let cells = run_experiment(&cfg).unwrap();
    let mut violations = Vec::new();
    let mut both_optimal = 0;
    let mut reductions = Vec::new();
    for c in &cells {
        if let Some(r) = c.reduction() {
            reductions.push((c.d_count, c.seed, r, c.mincost.status));
        }
        if c.mincost.status == Status::Optimal && c.maxbw.status == Status::Optimal {
            both_optimal += 1;
            if c.mincost.cost() >= c.maxbw.cost() {
                violations.push((c.d_count, c.seed));
            }
        }
    }
    let rs: Vec<f64> = reductions.iter().map(|r| r.2).collect();
    let lo = rs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = rs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for (d, seed, r, status) in &reductions {
        println!(
            "    |D|={d:<2} seed {seed}: reduction {:.1}% (min-cost {})",
            r * 100.0,
            status.as_str()
        );
    }
    outcome(
        violations.is_empty() && both_optimal > 0,
        format!(
            "{} cells, {both_optimal} with both objectives optimal, strict dominance failures {violations:?}; \
             reductions {:.1}%..{:.1}% (reference band 63%..89%)",
            cells.len(),
            lo * 100.0,
            hi * 100.0
        ),
    )
}

fn warning_time_monotone() -> Outcome {
    let cfg = ScenarioConfig {
        max_hops: Some(3),
        ..ScenarioConfig::paper()
    };
    let network = builtin_internetmci();
    let params = BbParams::default();
    let mut costs = Vec::new();
    for eps in [70, 80, 90, 100, 120] {
        let inst = cell_instance(&cfg, &network, 10, eps, 1).unwrap();
        let out = plan_instance(&inst, ObjectiveKind::MinCost, &params).unwrap();
        costs.push((eps, out.result.status, out.result.objective_value));
    }
    let all_optimal = costs.iter().all(|c| c.1 == Status::Optimal);
    let monotone = costs.windows(2).all(|w| w[1].2 <= w[0].2);
    let listed: Vec<String> = costs
        .iter()
        .map(|(e, s, v)| match v {
            Some(v) if *s == Status::Optimal => format!("{e}:{v}"),
            _ => format!("{e}:{}", s.as_str()),
        })
        .collect();
    outcome(
        all_optimal && monotone,
        format!("|D|=10 seed 1, optimal costs {}", listed.join(" ")),
    )
}

fn table_fidelity() -> Outcome {
    let net = builtin_internetmci();
    let rows = table();
    let mut wrong = Vec::new();
    for &(a, b, cost) in &rows {
        match net.link_between(NodeId(a), NodeId(b)) {
            Some(l) if net.link(l).cost == cost => {}
            _ => wrong.push((a, b)),
        }
    }
    let five: BTreeSet<usize> = net.dcs().keys().map(|v| v.0).collect();
    let eleven: BTreeSet<usize> = builtin_internetmci_11dc().dcs().keys().map(|v| v.0).collect();
    let sets_ok = net.node_count() == 19
        && five == BTreeSet::from([3, 9, 12, 14, 18])
        && eleven == BTreeSet::from([2, 3, 5, 7, 8, 9, 11, 12, 14, 15, 16]);
    outcome(
        rows.len() == 33 && net.links().len() == 33 && wrong.is_empty() && sets_ok,
        format!(
            "{} table entries, {} links, wrong {wrong:?}, node and DC sets {}",
            rows.len(),
            net.links().len(),
            if sets_ok { "match" } else { "differ" }
        ),
    )
}

fn determinism() -> Outcome {
    let cfg = ScenarioConfig {
        d_counts: vec![2, 4],
        seeds: vec![1, 2],
        max_hops: Some(3),
        time_limit: None,
        node_limit: Some(5_000),
        timing: false,
        ..ScenarioConfig::paper()
    };
    let first = run_experiment(&cfg).unwrap();
    let second = run_experiment(&ScenarioConfig { workers: 2, ..cfg.clone() }).unwrap();
    let csv_same = csv_string(&first, false) == csv_string(&second, false);
    let plans = |cells: &[ewbackup::harness::CellResult]| -> Vec<String> {
        cells
            .iter()
            .flat_map(|c| [&c.mincost.plan, &c.maxbw.plan])
            .map(|p| p.as_ref().map(|p| p.to_toml()).unwrap_or_default())
            .collect()
    };
    let plans_same = plans(&first) == plans(&second);
    let inst_same = (1..=3).all(|seed| {
        let a = generate_instance(&ScenarioConfig::paper(), &builtin_internetmci(), 10, seed);
        let b = generate_instance(&ScenarioConfig::paper(), &builtin_internetmci(), 10, seed);
        ewbackup::netmodel::instance_to_toml(&a.unwrap())
            == ewbackup::netmodel::instance_to_toml(&b.unwrap())
    });
    outcome(
        csv_same && plans_same && inst_same,
        format!(
            "{} cells run twice: csv {}, plan files {}, instance files {}",
            first.len(),
            same(csv_same),
            same(plans_same),
            same(inst_same)
        ),
    )
}

fn same(b: bool) -> &'static str {
    if b {
        "identical"
    } else {
        "differ"
    }
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Solves a 3x3 system by Cramer's rule.
fn cramer(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let d = det3(a);
    if d.abs() < 1e-9 {
        return None;
    }
    let mut x = [0.0; 3];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut m = a;
        for i in 0..3 {
            m[i][k] = b[i];
        }
        *xk = det3(m) / d;
    }
    Some(x)
}

/// Random three-variable LP: boxed variables, four rows of mixed sense
/// built around a known feasible point.
fn random_lp(rng: &mut ChaCha8Rng) -> (MilpModel, Vec<([f64; 3], f64)>) {
    let sense = if rng.gen_bool(0.5) { Sense::Minimize } else { Sense::Maximize };
    let mut m = MilpModel::new(sense);
    let mut planes = Vec::new();
    let mut point = [0.0; 3];
    let vars: Vec<_> = (0..3)
        .map(|j| {
            let hi = rng.gen_range(2..=9) as f64;
            point[j] = rng.gen_range(0.0..hi);
            let mut e = [0.0; 3];
            e[j] = 1.0;
            planes.push((e, 0.0));
            planes.push((e, hi));
            m.add_continuous(format!("x{j}"), 0.0, hi).unwrap()
        })
        .collect();
    for &v in &vars {
        m.set_objective_coef(v, rng.gen_range(-5..=5) as f64).unwrap();
    }
    for r in 0..4 {
        let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-4..=4) as f64);
        let at: f64 = a.iter().zip(&point).map(|(x, y)| x * y).sum();
        let (rel, rhs) = match rng.gen_range(0..3) {
            0 => (Relation::Le, (at + rng.gen_range(0.0..3.0)).round() + 1.0),
            1 => (Relation::Ge, (at - rng.gen_range(0.0..3.0)).round() - 1.0),
            _ => (Relation::Eq, at),
        };
        m.add_constraint(format!("r{r}"), vars.iter().copied().zip(a), rel, rhs).unwrap();
        planes.push((a, rhs));
    }
    (m, planes)
}

/// Best objective over every intersection of three of the planes that
/// satisfies the model.
fn best_vertex(m: &MilpModel, planes: &[([f64; 3], f64)]) -> Option<f64> {
    let k = planes.len();
    let mut best: Option<f64> = None;
    for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                let a = [planes[i].0, planes[j].0, planes[l].0];
                let b = [planes[i].1, planes[j].1, planes[l].1];
                let Some(x) = cramer(a, b) else { continue };
                if m.max_violation(&x) > 1e-7 {
                    continue;
                }
                let v = m.objective().evaluate(&x);
                let better = match (best, m.sense()) {
                    (None, _) => true,
                    (Some(b), Sense::Minimize) => v < b,
                    (Some(b), Sense::Maximize) => v > b,
                };
                if better {
                    best = Some(v);
                }
            }
        }
    }
    best
}

fn lp_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut checked, mut worst, mut failures) = (0, 0.0f64, 0);
    while checked < 40 {
        let (m, planes) = random_lp(&mut rng);
        let Some(want) = best_vertex(&m, &planes) else { continue };
        checked += 1;
        let r = solve_lp_relaxation(&m).unwrap();
        match (r.status, r.objective_value) {
            (Status::Optimal, Some(got)) => {
                let err = (got - want).abs();
                worst = worst.max(err);
                if err > 1e-6 {
                    failures += 1;
                }
            }
            _ => failures += 1,
        }
    }
    outcome(
        failures == 0,
        format!("{checked} random LPs, {failures} failures, largest error {worst:.1e} (tolerance 1e-6)"),
    )
}

/// Single item larger than the warning time times the capacity leaving the
/// affected node, with ample storage everywhere.
fn cut_instance(seed: u64, epsilon1: u64) -> (Instance, u64, u64) {
    let cfg = ScenarioConfig::paper();
    let base = generate_instance(&cfg, &builtin_internetmci(), 1, seed).unwrap();
    let cut: u64 = base
        .network
        .links()
        .iter()
        .filter(|l| l.a == cfg.affected || l.b == cfg.affected)
        .map(|l| l.capacity.unwrap() as u64)
        .sum();
    let size = 3 * cut + 1 + seed % cut;
    let mut net = base.network.clone();
    for &v in &cfg.safe {
        let w = base.storage_unit_cost(v);
        net = net.with_dc(
            v,
            DcInfo {
                storage_capacity: Some(10 * size),
                storage_unit_cost: Some(w),
            },
        );
    }
    let inst = Instance::generate_paths(
        net,
        cfg.affected,
        cfg.safe.clone(),
        &[size],
        InstanceParams {
            epsilon1,
            pn: cfg.pn,
            vn: cfg.vn,
            lambda: cfg.lambda,
            max_hops: cfg.max_hops,
        },
    );
    (inst, size, cut)
}

fn infeasibility_detection() -> Outcome {
    let params = BbParams::default();
    let mut wrong = Vec::new();
    let mut lines = Vec::new();
    for seed in 1..=3 {
        // size > 3 * cut, so a warning time of 3 cannot move it out.
        let (inst, size, cut) = cut_instance(seed, 3);
        assert!(3 * cut < size);
        for kind in [ObjectiveKind::MinCost, ObjectiveKind::MaxBandwidth] {
            let out = plan_instance(&inst, kind, &params).unwrap();
            if out.result.status != Status::Infeasible || out.plan.is_some() {
                wrong.push((seed, kind.as_str()));
            }
        }
        // Same data with a generous warning time is feasible.
        let (roomy, _, _) = cut_instance(seed, 20);
        let out = plan_instance(&roomy, ObjectiveKind::MinCost, &params).unwrap();
        if out.result.status != Status::Optimal {
            wrong.push((seed, "feasible control"));
        }
        lines.push(format!("C={size} cut={cut}"));
    }
    outcome(
        wrong.is_empty(),
        format!(
            "epsilon1=3 infeasible for {} (epsilon1=20 feasible), wrong {wrong:?}",
            lines.join(", ")
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("feasibility audit", feasibility_audit),
        ("baseline dominance", dominance_and_trend),
        ("warning time monotonicity", warning_time_monotone),
        ("link table fidelity", table_fidelity),
        ("determinism", determinism),
        ("LP correctness", lp_correctness),
        ("infeasibility detection", infeasibility_detection),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        println!(
            "criterion {} {name}: {} ({:.1}s) {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
