//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Exits 0 unless `OTDC_ACCEPTANCE_STRICT=1` is set, in which case any
//! failing criterion makes the run fail.

mod common;

use std::time::Instant;

use common::*;
use otdc_core::calibrate::{barycenter_map, search_lambda, CalibrationConfig};
use otdc_core::dist::{
    empirical_distribution, marginal, satisfies_ci, CiConstraint, DiscreteDistribution, Schema, Tuple,
};
use otdc_core::eval::{run_experiment, statistical_distortion, CorruptionKind, CorruptionSpec};
use otdc_core::fairness::{auc, delta_xauc, dsp, xauc, Group, Metric};
use otdc_core::ot::{exact_ot, exact_ot_between, sinkhorn, CostFn, CostMatrix, SinkhornConfig};
use otdc_core::repair::{
    apply_cleaner, cleaner_from_plan, lift_unsaturated, repair, solve_deterministic_map,
    solve_deterministic_map_keeping_domains, solve_probabilistic_cleaner, RepairProblem,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn yz() -> CiConstraint {
    CiConstraint::parse("Y,Z|").unwrap()
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let s = xyz();
    let prob = RepairProblem::new(d2(), s.clone(), yz()).unwrap();
    let cleaner_cost = repair(&prob).unwrap().transport_cost;

    let p = empirical_distribution(&d2(), &s).unwrap();
    let q = empirical_distribution(&d2_hat(), &s).unwrap();
    let exact = exact_ot_between(&p, &q, CostFn::Hamming).unwrap();
    let edges = [
        ([1, 0, 0], [1, 0, 0]),
        ([1, 0, 1], [1, 0, 1]),
        ([1, 1, 0], [1, 1, 0]),
        ([1, 1, 0], [1, 1, 1]),
    ];
    let edge_err = edges
        .iter()
        .map(|(a, b)| {
            let m = exact.plan.between(s.encode(&t(a)).unwrap(), s.encode(&t(b)).unwrap());
            (m - 0.25).abs()
        })
        .fold(0.0, f64::max);
    let edge_count = exact.plan.entries().iter().filter(|e| e.2 > 1e-12).count();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        cleaner_cost <= 0.26 && (exact.cost - 0.25).abs() <= 1e-9 && edge_err <= 1e-6 && edge_count == 4 && secs < 1.0,
        format!(
            "cleaner cost {cleaner_cost:.6}, exact cost {:.12}, max edge error {edge_err:.1e}, {edge_count} edges, {secs:.3}s",
            exact.cost
        ),
    )
}

fn ci_arithmetic() -> Outcome {
    let p = empirical_distribution(&d1(), &xyz()).unwrap();
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let pyz = marginal(&p, &names(&["Y", "Z"])).unwrap();
    let py = marginal(&p, &names(&["Y"])).unwrap();
    let pz = marginal(&p, &names(&["Z"])).unwrap();
    let joint = pyz.prob(&t(&[1, 0])).unwrap();
    let product = py.prob(&t(&[1])).unwrap() * pz.prob(&t(&[0])).unwrap();
    let check = satisfies_ci(&p, &yz(), 1e-6).unwrap();
    outcome(
        joint == 0.25 && product == 0.125 && !check.satisfied,
        format!(
            "P(Y=1,Z=0) = {joint}, P(Y=1)P(Z=0) = {product}, verdict {}",
            if check.satisfied { "satisfied" } else { "violated" }
        ),
    )
}

fn deterministic_gap() -> Outcome {
    let start = Instant::now();
    let prob = RepairProblem::new(d2(), xyz(), yz()).unwrap();
    let map = solve_deterministic_map(&prob).unwrap();
    let kept = match solve_deterministic_map_keeping_domains(&prob) {
        Ok(m) => format!("cost {}", m.total_cost),
        Err(e) => format!("{e}"),
    };
    let probabilistic = repair(&prob).unwrap().transport_cost;
    let secs = start.elapsed().as_secs_f64();
    let witness = map
        .map
        .iter()
        .filter(|(a, b)| a != b)
        .map(|(a, b)| format!("{a}->{b}"))
        .collect::<Vec<_>>()
        .join(" ");
    outcome(
        map.total_cost > 1.0 && probabilistic <= 0.26 && secs < 10.0,
        format!(
            "deterministic optimum {} via {witness}; keeping domains: {kept}; probabilistic {probabilistic:.6}; {secs:.3}s",
            map.total_cost
        ),
    )
}

fn sampling_consistency() -> Outcome {
    let s = xyz();
    let p = empirical_distribution(&d2(), &s).unwrap();
    let q = empirical_distribution(&d2_hat(), &s).unwrap();
    let cleaner = cleaner_from_plan(&exact_ot_between(&p, &q, CostFn::Hamming).unwrap().plan, &s).unwrap();
    let d3: Vec<Tuple> = d2().into_iter().flat_map(|r| std::iter::repeat(r).take(5000)).collect();
    let trials = 10_000.0;
    let band = 3.0 * (trials * 0.25f64).sqrt();
    let target = t(&[1, 1, 1]);
    let mut inside = 0;
    let mut worst_violation: f64 = 0.0;
    for seed in 0..20 {
        let out = apply_cleaner(&d3, &cleaner, seed).unwrap();
        let count = out.iter().filter(|r| **r == target).count() as f64;
        if (count - 5000.0).abs() <= band {
            inside += 1;
        }
        let check = satisfies_ci(&empirical_distribution(&out, &s).unwrap(), &yz(), 0.02).unwrap();
        worst_violation = worst_violation.max(check.violation);
    }
    outcome(
        inside >= 18 && worst_violation <= 0.02,
        format!("{inside}/20 seeds inside 5000 ± {band:.0}, worst violation {worst_violation:.4}"),
    )
}

fn sinkhorn_vs_exact() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let epsilons = [1.0, 0.1, 0.01];
    let mut monotone = 0;
    let mut worst_gap: f64 = 0.0;
    let mut worst_marginal: f64 = 0.0;
    for _ in 0..50 {
        let mu = simplex(&mut rng, 5);
        let nu = simplex(&mut rng, 5);
        let entries: Vec<f64> = (0..25).map(|_| rng.gen()).collect();
        let cost = CostMatrix::from_fn(5, 5, |i, j| entries[5 * i + j]).unwrap();
        let exact = exact_ot(&mu, &nu, &cost).unwrap().cost;
        let gaps: Vec<f64> = epsilons
            .iter()
            .map(|&e| {
                let cfg = SinkhornConfig {
                    max_iter: 200_000,
                    ..SinkhornConfig::with_epsilon(e)
                };
                let sol = sinkhorn(&mu, &nu, &cost, &cfg).unwrap();
                worst_marginal = worst_marginal.max(sol.plan.marginal_violation(&mu, &nu));
                (sol.cost - exact).abs()
            })
            .collect();
        if gaps.windows(2).all(|w| w[1] <= w[0]) {
            monotone += 1;
        }
        worst_gap = worst_gap.max(gaps[2]);
    }
    outcome(
        monotone == 50 && worst_gap <= 5e-3 && worst_marginal <= 1e-9,
        format!("{monotone}/50 monotone, worst gap at 0.01 {worst_gap:.2e}, worst marginal violation {worst_marginal:.1e}"),
    )
}

fn unsaturated_lifting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_cost: f64 = 0.0;
    let mut worst_source: f64 = 0.0;
    let mut worst_ci: f64 = 0.0;
    for k in 0..100 {
        let mut attrs = vec![
            otdc_core::dist::Attribute::new("A", 0..3).unwrap(),
            otdc_core::dist::Attribute::new("B", 0..2).unwrap(),
        ];
        attrs.insert(k % 3, otdc_core::dist::Attribute::new("W", 0..2).unwrap());
        let schema = Schema::new(attrs).unwrap();
        let weights = simplex(&mut rng, schema.joint_size());
        let data: Vec<Tuple> = (0..40)
            .map(|_| {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let idx = weights
                    .iter()
                    .position(|w| {
                        acc += w;
                        u < acc
                    })
                    .unwrap_or(weights.len() - 1);
                schema.decode(idx)
            })
            .collect();
        let sigma = CiConstraint::parse("A,B|").unwrap();
        let u_attrs: Vec<String> = schema
            .names()
            .into_iter()
            .filter(|n| *n != "W")
            .map(String::from)
            .collect();
        let u_pos = schema.positions(&u_attrs).unwrap();
        let sub = schema.project(&u_pos);
        let projected: Vec<Tuple> = data
            .iter()
            .map(|r| Tuple::new(u_pos.iter().map(|&i| r.values()[i].clone())))
            .collect();
        let small = solve_probabilistic_cleaner(&RepairProblem::new(projected, sub, sigma.clone()).unwrap()).unwrap();
        let p = empirical_distribution(&data, &schema).unwrap();
        let lifted = lift_unsaturated(&small.plan, &p, &u_attrs).unwrap();

        let full = CostMatrix::between(&schema, lifted.sources(), lifted.targets(), CostFn::Hamming);
        worst_cost = worst_cost.max((lifted.cost(&full) - small.transport_cost).abs());
        for (i, &v) in lifted.sources().iter().enumerate() {
            worst_source = worst_source.max((lifted.row_marginal()[i] - p.mass()[v]).abs());
        }
        let mut mass = vec![0.0; schema.joint_size()];
        for (j, m) in lifted.targets().iter().zip(lifted.col_marginal()) {
            mass[*j] += m;
        }
        let target = DiscreteDistribution::from_weights(schema.clone(), mass).unwrap();
        let tu = marginal(&target, &u_attrs).unwrap();
        worst_ci = worst_ci.max(satisfies_ci(&tu, &sigma, 0.0).unwrap().violation);
    }
    outcome(
        worst_cost <= 1e-12 && worst_source <= 1e-9 && worst_ci <= 1e-6,
        format!("worst cost gap {worst_cost:.1e}, worst source error {worst_source:.1e}, worst U-violation {worst_ci:.1e}"),
    )
}

fn fairness_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_mc: f64 = 0.0;
    let mut rank_exact = true;
    for _ in 0..20 {
        let table = random_table(&mut rng, 50);
        for metric in [Metric::Pr, Metric::Tpr, Metric::Fpr] {
            let label = match metric {
                Metric::Pr => None,
                Metric::Tpr => Some(true),
                Metric::Fpr => Some(false),
            };
            let mut a = table.scores(Some(Group::A), label);
            let mut b = table.scores(Some(Group::B), label);
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            let samples = 1_000_000;
            let mc: f64 = (0..samples)
                .map(|_| {
                    let tau: f64 = rng.gen();
                    (rate_at_sorted(&a, tau) - rate_at_sorted(&b, tau)).abs()
                })
                .sum::<f64>()
                / samples as f64;
            worst_mc = worst_mc.max((dsp(&table, metric).unwrap() - mc).abs());
        }
        let scores = |g: Option<Group>, l: bool| table.scores(g, Some(l));
        rank_exact &= auc(&table, None).unwrap() == pair_count(&scores(None, true), &scores(None, false));
        for g in [Group::A, Group::B] {
            rank_exact &= auc(&table, Some(g)).unwrap() == pair_count(&scores(Some(g), true), &scores(Some(g), false));
            rank_exact &= xauc(&table, g, g.other()).unwrap()
                == pair_count(&scores(Some(g), true), &scores(Some(g.other()), false));
        }
    }
    outcome(
        worst_mc <= 2e-3 && rank_exact,
        format!(
            "worst |dsp - Monte-Carlo| {worst_mc:.2e}, AUC/xAUC pair counts {}",
            if rank_exact { "exact" } else { "differ" }
        ),
    )
}

fn calibration_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_pr: f64 = 0.0;
    for _ in 0..20 {
        let per_group = rng.gen_range(10..60);
        let table = balanced_table(&mut rng, per_group);
        let hat = barycenter_map(&table, 0.5, 1000).unwrap();
        worst_pr = worst_pr.max(dsp(&hat, Metric::Pr).unwrap());
    }
    let mut unequal_pr: f64 = 0.0;
    let mut never_worse = true;
    for _ in 0..30 {
        let table = random_table(&mut rng, 60);
        let hat = barycenter_map(&table, 0.5, 1000).unwrap();
        unequal_pr = unequal_pr.max(dsp(&hat, Metric::Pr).unwrap());
        for targets in [vec![Metric::Tpr, Metric::Fpr], vec![Metric::Pr], vec![Metric::Tpr]] {
            let r = search_lambda(&table, &CalibrationConfig::with_targets(targets)).unwrap();
            never_worse &= r.objective_after <= r.objective_before;
        }
    }
    let crossing = crossing_table(200);
    let dx = delta_xauc(&crossing).unwrap();
    let eo = dsp(&crossing, Metric::Tpr).unwrap();
    outcome(
        worst_pr <= 1e-6 && never_worse && dx.abs() < 0.01 && eo > 0.1,
        format!(
            "worst DSP-PR after full calibration {worst_pr:.1e} (unequal groups, informational: {unequal_pr:.3}); \
             lambda search never worse: {never_worse}; crossing table dxAUC {dx:.4}, DSP-EO {eo:.3}"
        ),
    )
}

fn distortion() -> Outcome {
    let s = xyz();
    let fwd = statistical_distortion(&d2(), &d2_hat(), &s, CostFn::Hamming, None).unwrap().emd;
    let back = statistical_distortion(&d2_hat(), &d2(), &s, CostFn::Hamming, None).unwrap().emd;
    let same = statistical_distortion(&d2(), &d2(), &s, CostFn::Hamming, None).unwrap().emd;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_asym: f64 = (fwd - back).abs();
    for _ in 0..20 {
        let mut bag = |n: usize| -> Vec<Tuple> { (0..n).map(|_| s.decode(rng.gen_range(0..8))).collect() };
        let (a, b) = (bag(12), bag(9));
        let x = statistical_distortion(&a, &b, &s, CostFn::Hamming, None).unwrap().emd;
        let y = statistical_distortion(&b, &a, &s, CostFn::Hamming, None).unwrap().emd;
        worst_asym = worst_asym.max((x - y).abs());
    }
    outcome(
        fwd == 0.25 && same == 0.0 && worst_asym <= 1e-12,
        format!("D2 vs repaired {fwd}, identical {same}, worst asymmetry {worst_asym:.1e}"),
    )
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let s = Schema::binary(&["X", "Y"]).unwrap();
    let clean = independent_pair(5000);
    let spec = CorruptionSpec {
        kind: CorruptionKind::Noise,
        target: "Y".into(),
        drivers: vec!["X".into()],
        rate: 0.3,
        seed: 11,
    };
    let template = RepairProblem::new(clean.clone(), s, CiConstraint::parse("X,Y|").unwrap()).unwrap();
    let r = run_experiment(&clean, &spec, &template).unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        r.ci_violation_repaired <= 1e-3 && r.repaired_to_clean <= r.corrupted_to_clean && secs < 30.0,
        format!(
            "violation {:.4} -> {:.1e}, distance to clean {:.4} -> {:.4}, {secs:.2}s",
            r.ci_violation_corrupted, r.ci_violation_repaired, r.corrupted_to_clean, r.repaired_to_clean
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("worked example D2", worked_example),
        ("CI arithmetic on D1", ci_arithmetic),
        ("deterministic-map gap", deterministic_gap),
        ("sampling consistency", sampling_consistency),
        ("sinkhorn vs exact", sinkhorn_vs_exact),
        ("unsaturated lifting", unsaturated_lifting),
        ("fairness-metric exactness", fairness_exactness),
        ("calibration properties", calibration_properties),
        ("distortion", distortion),
        ("end-to-end pipeline", end_to_end),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let clock = Instant::now();
        let o = run();
        let secs = clock.elapsed().as_secs_f64();
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{}] {:>2}. {name} ({secs:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail
        );
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 && std::env::var("OTDC_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
