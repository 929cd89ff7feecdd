//! Search for the cheapest CI-consistent target distribution.
//!
//! The transport cost `F(Q) = OT(P, Q)` is convex in `Q`, the feasible set is
//! not. Each start runs exponentiated-gradient steps on `Q` using the column
//! potential of the entropic plan as the gradient, re-factorises the tilted
//! target onto the constraint, and accepts a step only when the exact cost
//! drops.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::{empirical_distribution, CiLayout, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::ot::{exact_ot, log_scaling, sinkhorn, CostMatrix, SinkhornConfig, TransportPlan, EXACT_SUPPORT_LIMIT};
use crate::repair::cleaner::{cleaner_from_plan, ProbabilisticCleaner};
use crate::repair::problem::{RepairProblem, RepairResult, RepairStatus};

const STOP_CHANGE: f64 = 1e-7;
const MIN_STEP: f64 = 1e-9;
/// Scaling accuracy needed for a descent direction.
const DIRECTION_TOL: f64 = 1e-6;
const DIRECTION_MAX_ITER: usize = 2_000;

struct Search<'a> {
    a: Vec<f64>,
    cost: CostMatrix,
    layout: &'a CiLayout,
    reg: SinkhornConfig,
    exact: bool,
}

impl Search<'_> {
    fn objective(&self, q: &[f64]) -> Result<f64> {
        if self.exact {
            Ok(exact_ot(&self.a, q, &self.cost)?.cost)
        } else {
            Ok(sinkhorn(&self.a, q, &self.cost, &self.reg)?.cost)
        }
    }

    /// Entropic column potential on the support of `q`.
    fn gradient(&self, q: &[f64], warm: &mut Option<(Vec<usize>, Vec<f64>)>) -> Vec<f64> {
        let cols: Vec<usize> = (0..q.len()).filter(|&j| q[j] > 0.0).collect();
        let rows: Vec<usize> = (0..self.a.len()).collect();
        let sub = self.cost.select(&rows, &cols);
        let b: Vec<f64> = cols.iter().map(|&j| q[j]).collect();
        let init = warm.as_ref().filter(|(c, _)| *c == cols).map(|(_, g)| g.as_slice());
        let cfg = SinkhornConfig {
            tol: self.reg.tol.max(DIRECTION_TOL),
            max_iter: self.reg.max_iter.min(DIRECTION_MAX_ITER),
            ..self.reg
        };
        let run = log_scaling(&self.a, &b, sub.view(), &cfg, init);
        let mut g = vec![0.0; q.len()];
        for (k, &j) in cols.iter().enumerate() {
            g[j] = run.g[k];
        }
        *warm = Some((cols, run.g));
        g
    }

    fn step(&self, q: &[f64], g: &[f64], eta: f64) -> Vec<f64> {
        let mean: f64 = q.iter().zip(g).map(|(qj, gj)| qj * gj).sum();
        let spread = q
            .iter()
            .zip(g)
            .filter(|(qj, _)| **qj > 0.0)
            .map(|(_, gj)| (gj - mean).abs())
            .fold(0.0, f64::max)
            .max(1e-12);
        let mut tilted: Vec<f64> = q
            .iter()
            .zip(g)
            .map(|(&qj, &gj)| if qj > 0.0 { qj * (-eta * (gj - mean) / spread).exp() } else { 0.0 })
            .collect();
        let total: f64 = tilted.iter().sum();
        tilted.iter_mut().for_each(|t| *t /= total);
        self.layout.project(&tilted)
    }

    /// Returns the local optimum reached from `q`, its cost and the number of
    /// accepted steps.
    fn descend(&self, mut q: Vec<f64>, max_outer: usize) -> Result<(Vec<f64>, f64, usize)> {
        let mut f = self.objective(&q)?;
        let mut eta = 1.0;
        let mut warm = None;
        let mut accepted = 0;
        'outer: for _ in 0..max_outer {
            let g = self.gradient(&q, &mut warm);
            let (next, fnext) = loop {
                let cand = self.step(&q, &g, eta);
                let fc = self.objective(&cand)?;
                if fc < f - 1e-13 {
                    eta = (eta * 2.0).min(64.0);
                    break (cand, fc);
                }
                eta *= 0.5;
                if eta < MIN_STEP {
                    break 'outer;
                }
            };
            accepted += 1;
            let change: f64 = next.iter().zip(&q).map(|(x, y)| (x - y).abs()).sum();
            q = next;
            f = fnext;
            if change < STOP_CHANGE {
                break;
            }
        }
        Ok((q, f, accepted))
    }
}

fn starting_points(p: &[f64], layout: &CiLayout, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let d = p.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![layout.project(p)];
    for k in 1..count {
        let noise: Vec<f64> = if k == 1 {
            vec![1.0 / d as f64; d]
        } else {
            let w: Vec<f64> = (0..d).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let total: f64 = w.iter().sum();
            w.into_iter().map(|x| x / total).collect()
        };
        let mixed: Vec<f64> = p.iter().zip(&noise).map(|(a, b)| 0.5 * a + 0.5 * b).collect();
        out.push(layout.project(&mixed));
    }
    out
}

fn identity_result(p: &DiscreteDistribution, violation: f64) -> Result<RepairResult> {
    let support = p.support();
    let n = support.len();
    let mut mass = Array2::zeros((n, n));
    for (k, &i) in support.iter().enumerate() {
        mass[[k, k]] = p.mass()[i];
    }
    let plan = TransportPlan::new(mass, support.clone(), support.clone());
    Ok(RepairResult {
        cleaner: ProbabilisticCleaner::identity(p.schema().clone(), support),
        plan,
        target: p.clone(),
        transport_cost: 0.0,
        ci_violation_before: violation,
        ci_violation_after: violation,
        iterations: 0,
        status: RepairStatus::Unchanged,
        lifted: false,
    })
}

/// Finds a minimum-cost plan from the empirical distribution to a target that
/// satisfies a saturated constraint.
///
/// The source marginal of the returned plan equals the empirical distribution.
/// Inputs that already satisfy the constraint within `ci_tol` come back
/// untouched.
pub fn solve_probabilistic_cleaner(prob: &RepairProblem) -> Result<RepairResult> {
    prob.validate()?;
    let schema = &prob.schema;
    if !prob.sigma.is_saturated(schema) {
        return Err(Error::Unsaturated);
    }
    let p = empirical_distribution(&prob.data, schema)?;
    let layout = CiLayout::new(schema, &prob.sigma)?;
    let before = layout.violation(p.mass());
    if before <= prob.ci_tol {
        return identity_result(&p, before);
    }

    let rows = p.support();
    let all: Vec<usize> = (0..schema.joint_size()).collect();
    let search = Search {
        a: rows.iter().map(|&i| p.mass()[i]).collect(),
        cost: CostMatrix::between(schema, &rows, &all, prob.cost),
        layout: &layout,
        reg: prob.reg,
        exact: rows.len() <= EXACT_SUPPORT_LIMIT && all.len() <= EXACT_SUPPORT_LIMIT,
    };

    let mut best: Option<(Vec<f64>, f64, usize)> = None;
    for start in starting_points(p.mass(), &layout, prob.starts, prob.seed) {
        let run = search.descend(start, prob.max_outer)?;
        if best.as_ref().is_none_or(|b| run.1 < b.1 - 1e-12) {
            best = Some(run);
        }
    }
    let (q, _, iterations) = best.expect("at least one start");

    let plan = if search.exact {
        let sol = exact_ot(&search.a, &q, &search.cost)?;
        TransportPlan::new(sol.plan.mass().clone(), rows, all)
    } else {
        let sol = sinkhorn(&search.a, &q, &search.cost, &prob.reg)?;
        let mut plan = TransportPlan::new(sol.plan.mass().clone(), rows, all);
        plan.rescale_rows(&search.a);
        plan
    };
    let target = DiscreteDistribution::from_weights(schema.clone(), plan.col_marginal())?;
    let after = layout.violation(target.mass());
    Ok(RepairResult {
        cleaner: cleaner_from_plan(&plan, schema)?,
        transport_cost: plan.cost(&search.cost),
        plan,
        target,
        ci_violation_before: before,
        ci_violation_after: after,
        iterations,
        status: if after <= prob.ci_tol {
            RepairStatus::Converged
        } else {
            RepairStatus::NotConverged
        },
        lifted: false,
    })
}
