#![allow(dead_code)]

use otdc_core::dist::{Schema, Tuple};
use otdc_core::fairness::{Group, ScoreRecord, ScoreTable};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn t(v: &[i64]) -> Tuple {
    Tuple::new(v.iter())
}

pub fn xyz() -> Schema {
    Schema::binary(&["X", "Y", "Z"]).unwrap()
}

pub fn d1() -> Vec<Tuple> {
    vec![t(&[0, 0, 1]), t(&[1, 0, 1]), t(&[0, 1, 1]), t(&[0, 1, 0])]
}

pub fn d2() -> Vec<Tuple> {
    vec![t(&[1, 0, 0]), t(&[1, 0, 1]), t(&[1, 1, 0]), t(&[1, 1, 0])]
}

/// The repaired bag: one copy of `(1,1,0)` moved to `(1,1,1)`.
pub fn d2_hat() -> Vec<Tuple> {
    vec![t(&[1, 0, 0]), t(&[1, 0, 1]), t(&[1, 1, 0]), t(&[1, 1, 1])]
}

/// X ~ Bernoulli(0.4), Y ~ Bernoulli(0.05), independent with exact counts.
pub fn independent_pair(n: usize) -> Vec<Tuple> {
    let nx = n * 2 / 5;
    let mut rows = Vec::with_capacity(n);
    for (x, count) in [(1, nx), (0, n - nx)] {
        let ny = count / 20;
        for i in 0..count {
            rows.push(t(&[x, i64::from(i < ny)]));
        }
    }
    rows
}

/// Dirichlet(1, ..., 1) draw.
pub fn simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Table with both labels present in both groups.
pub fn random_table(rng: &mut ChaCha8Rng, n: usize) -> ScoreTable {
    loop {
        let shift = rng.gen_range(-0.3..0.3);
        let recs: Vec<ScoreRecord> = (0..n)
            .map(|i| {
                let g = if rng.gen_bool(0.5) { Group::A } else { Group::B };
                let label = rng.gen_bool(0.4);
                let base: f64 = if label { rng.gen_range(0.3..1.0) } else { rng.gen_range(0.0..0.7) };
                let s = if g == Group::B { base + shift } else { base };
                // two-decimal rounding forces ties
                let s = if i % 3 == 0 { (s * 100.0).round() / 100.0 } else { s };
                ScoreRecord::new(format!("r{i}"), s.clamp(0.0, 1.0), g, label)
            })
            .collect();
        let ok = [Group::A, Group::B]
            .iter()
            .all(|&g| [true, false].iter().all(|&l| recs.iter().any(|r| r.group == g && r.label == l)));
        if ok {
            return ScoreTable::new(recs).unwrap();
        }
    }
}

/// Equal group sizes, distinct scores, both labels in both groups.
pub fn balanced_table(rng: &mut ChaCha8Rng, per_group: usize) -> ScoreTable {
    let shift = rng.gen_range(0.05..0.25);
    let mut recs = Vec::new();
    for (gi, g) in [Group::A, Group::B].into_iter().enumerate() {
        for i in 0..per_group {
            let label = i % 2 == 0;
            let base: f64 = if label { rng.gen_range(0.3..0.75) } else { rng.gen_range(0.0..0.6) };
            let s = if g == Group::B { base + shift } else { base };
            recs.push(ScoreRecord::new(format!("{gi}-{i}"), s, g, label));
        }
    }
    ScoreTable::new(recs).unwrap()
}

/// Group `a` positives sit in [0.4, 0.6]; group `b` positives split between
/// 0.1 and 0.9; negatives are identical uniform grids in both groups.
pub fn crossing_table(per_group: usize) -> ScoreTable {
    let mut recs = Vec::new();
    let m = per_group as f64;
    for i in 0..per_group {
        let u = (i as f64 + 0.5) / m;
        recs.push(ScoreRecord::new(format!("a+{i}"), 0.4 + 0.2 * u, Group::A, true));
        let b = if i % 2 == 0 { 0.1 } else { 0.9 };
        recs.push(ScoreRecord::new(format!("b+{i}"), b, Group::B, true));
        recs.push(ScoreRecord::new(format!("a-{i}"), u, Group::A, false));
        recs.push(ScoreRecord::new(format!("b-{i}"), u, Group::B, false));
    }
    ScoreTable::new(recs).unwrap()
}

/// `#{s ≥ τ} / n` by direct counting.
pub fn rate_at(scores: &[f64], tau: f64) -> f64 {
    scores.iter().filter(|&&s| s >= tau).count() as f64 / scores.len() as f64
}

/// `#{s ≥ τ} / n` on ascending scores.
pub fn rate_at_sorted(sorted: &[f64], tau: f64) -> f64 {
    (sorted.len() - sorted.partition_point(|&s| s < tau)) as f64 / sorted.len() as f64
}

/// Pairwise `P(p > n) + ½ P(p = n)` by O(n²) counting.
pub fn pair_count(pos: &[f64], neg: &[f64]) -> f64 {
    let mut twice = 0u64;
    for &p in pos {
        for &n in neg {
            twice += if p > n { 2 } else if p == n { 1 } else { 0 };
        }
    }
    twice as f64 / (2 * pos.len() * neg.len()) as f64
}
