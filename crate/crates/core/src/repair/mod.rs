//! CI repair as marginal-constrained optimal transport, plus the cleaners that
//! apply a plan to tuples.

mod cleaner;
mod deterministic;
mod lift;
mod problem;
mod solver;

pub use cleaner::{apply_cleaner, cleaner_from_plan, cleaner_row, ProbabilisticCleaner};
pub use deterministic::{
    solve_deterministic_map, solve_deterministic_map_keeping_domains, DeterministicMap, MAP_DOMAIN_LIMIT, MAP_SUPPORT_LIMIT};
pub use lift::lift_unsaturated;
pub use problem::{RepairProblem, RepairResult, RepairStatus};
pub use solver::solve_probabilistic_cleaner;

use crate::dist::{empirical_distribution, CiLayout, DiscreteDistribution, Tuple};
use crate::error::Result;
use crate::ot::CostMatrix;

/// Solves any constraint: saturated ones directly, unsaturated ones on the
/// constraint's attributes followed by [`lift_unsaturated`].
pub fn repair(prob: &RepairProblem) -> Result<RepairResult> {
    prob.validate()?;
    let schema = &prob.schema;
    if prob.sigma.is_saturated(schema) {
        return solve_probabilistic_cleaner(prob);
    }
    let mentioned = prob.sigma.attributes();
    let u_attrs: Vec<String> = schema
        .names()
        .into_iter()
        .filter(|n| mentioned.iter().any(|m| m == n))
        .map(String::from)
        .collect();
    let u_pos = schema.positions(&u_attrs)?;
    let sub_schema = schema.project(&u_pos);
    let sub_data: Vec<Tuple> = prob
        .data
        .iter()
        .map(|t| Tuple(u_pos.iter().map(|&k| t.values()[k].clone()).collect()))
        .collect();
    let sub = RepairProblem {
        data: sub_data,
        schema: sub_schema,
        ..prob.clone()
    };
    let inner = solve_probabilistic_cleaner(&sub)?;

    let p = empirical_distribution(&prob.data, schema)?;
    let layout = CiLayout::new(schema, &prob.sigma)?;
    let plan = lift_unsaturated(&inner.plan, &p, &u_attrs)?;
    let target = DiscreteDistribution::from_weights(schema.clone(), {
        let mut full = vec![0.0; schema.joint_size()];
        for (j, m) in plan.targets().iter().zip(plan.col_marginal()) {
            full[*j] += m;
        }
        full
    })?;
    let cost = CostMatrix::between(schema, plan.sources(), plan.targets(), prob.cost);
    Ok(RepairResult {
        cleaner: cleaner_from_plan(&plan, schema)?,
        transport_cost: plan.cost(&cost),
        ci_violation_before: layout.violation(p.mass()),
        ci_violation_after: layout.violation(target.mass()),
        iterations: inner.iterations,
        status: inner.status,
        lifted: true,
        target,
        plan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{CiConstraint, Schema};

    fn t(v: &[i64]) -> Tuple {
        Tuple::new(v.iter())
    }

    #[test]
    fn d2_marginal_independence_goes_through_lift() {
        let s = Schema::binary(&["X", "Y", "Z"]).unwrap();
        let d2 = vec![t(&[1, 0, 0]), t(&[1, 0, 1]), t(&[1, 1, 0]), t(&[1, 1, 0])];
        let p = RepairProblem::new(d2, s, CiConstraint::parse("Y,Z|").unwrap()).unwrap();
        let r = repair(&p).unwrap();
        assert!(r.lifted);
        assert!(r.transport_cost <= 0.25 + 1e-9);
        assert!(r.ci_violation_before >= 0.125);
        assert!(r.ci_violation_after <= 1e-9);
        // X is never touched
        for (_, target, _) in r.plan.entries() {
            assert_eq!(r.target.schema().decode(target).values()[0], "1");
        }
    }
}
