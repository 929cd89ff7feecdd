//! Discrete optimal transport: exact min-cost flow, entropic Sinkhorn, and
//! one-dimensional quantile routines.

mod cost;
mod exact;
mod one_d;
mod plan;
mod sinkhorn;

pub use cost::{CostFn, CostMatrix, TupleCost};
pub use exact::{exact_ot, ExactSolution, EXACT_SUPPORT_LIMIT};
pub use one_d::{barycenter_1d, wasserstein_1d, WeightedSamples};
pub use plan::TransportPlan;
pub(crate) use sinkhorn::log_scaling;
pub use sinkhorn::{sinkhorn, SinkhornConfig, SinkhornSolution};

use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};

fn same_schema(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<()> {
    if mu.schema() != nu.schema() {
        return Err(Error::SchemaMismatch);
    }
    Ok(())
}

/// [`exact_ot`] between two distributions over one schema.
pub fn exact_ot_between(
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
    cost: CostFn,
) -> Result<ExactSolution> {
    same_schema(mu, nu)?;
    let rows = mu.support();
    let cols = nu.support();
    let c = CostMatrix::between(mu.schema(), &rows, &cols, cost);
    let a: Vec<f64> = rows.iter().map(|&i| mu.mass()[i]).collect();
    let b: Vec<f64> = cols.iter().map(|&j| nu.mass()[j]).collect();
    let sol = exact_ot(&a, &b, &c)?;
    Ok(ExactSolution {
        plan: TransportPlan::new(sol.plan.mass().clone(), rows, cols),
        cost: sol.cost,
    })
}

/// [`sinkhorn`] between two distributions over one schema.
pub fn sinkhorn_between(
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
    cost: CostFn,
    cfg: &SinkhornConfig,
) -> Result<SinkhornSolution> {
    same_schema(mu, nu)?;
    let rows = mu.support();
    let cols = nu.support();
    let c = CostMatrix::between(mu.schema(), &rows, &cols, cost);
    let a: Vec<f64> = rows.iter().map(|&i| mu.mass()[i]).collect();
    let b: Vec<f64> = cols.iter().map(|&j| nu.mass()[j]).collect();
    let mut sol = sinkhorn(&a, &b, &c, cfg)?;
    sol.plan = TransportPlan::new(sol.plan.mass().clone(), rows, cols);
    Ok(sol)
}
