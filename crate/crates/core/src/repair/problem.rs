use std::fmt;

use crate::dist::{CiConstraint, DiscreteDistribution, Schema, Tuple};
use crate::error::{Error, Result};
use crate::ot::{CostFn, SinkhornConfig, TransportPlan};
use crate::repair::cleaner::ProbabilisticCleaner;

/// One CI repair instance: a bag of tuples, the constraint to enforce, and
/// solver settings.
#[derive(Debug, Clone)]
pub struct RepairProblem {
    pub data: Vec<Tuple>,
    pub schema: Schema,
    pub sigma: CiConstraint,
    pub cost: CostFn,
    /// Largest CI violation accepted on the repaired distribution.
    pub ci_tol: f64,
    /// Regularisation used for descent directions and for large supports.
    pub reg: SinkhornConfig,
    /// Outer iterations per start.
    pub max_outer: usize,
    /// Number of starting points for the outer search.
    pub starts: usize,
    /// Seeds the randomised starting points.
    pub seed: u64,
}

impl RepairProblem {
    pub fn new(data: Vec<Tuple>, schema: Schema, sigma: CiConstraint) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        sigma.validate(&schema)?;
        Ok(Self {
            data,
            schema,
            sigma,
            cost: CostFn::Hamming,
            ci_tol: 1e-6,
            reg: SinkhornConfig::default(),
            max_outer: 200,
            starts: 4,
            seed: 0,
        })
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        self.sigma.validate(&self.schema)?;
        self.reg.validate()?;
        if !(self.ci_tol >= 0.0) {
            return Err(Error::InvalidConfig(format!("ci_tol must be >= 0, got {}", self.ci_tol)));
        }
        if self.max_outer == 0 || self.starts == 0 {
            return Err(Error::InvalidConfig("max_outer and starts must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepairStatus {
    /// Input already satisfied the constraint; nothing moved.
    Unchanged,
    Converged,
    /// The repaired distribution still violates the constraint beyond
    /// `ci_tol`. The result holds the best plan found.
    NotConverged,
}

impl RepairStatus {
    pub fn is_success(&self) -> bool {
        !matches!(self, RepairStatus::NotConverged)
    }
}

impl fmt::Display for RepairStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RepairStatus::Unchanged => "unchanged",
            RepairStatus::Converged => "converged",
            RepairStatus::NotConverged => "not_converged",
        })
    }
}

#[derive(Debug, Clone)]
pub struct RepairResult {
    /// Plan labelled by joint indices of the problem schema.
    pub plan: TransportPlan,
    /// Column marginal of `plan`.
    pub target: DiscreteDistribution,
    pub cleaner: ProbabilisticCleaner,
    /// Expected per-tuple cost `⟨C, π⟩`.
    pub transport_cost: f64,
    pub ci_violation_before: f64,
    pub ci_violation_after: f64,
    pub iterations: usize,
    pub status: RepairStatus,
    /// Whether the plan was solved on the constraint's attributes and lifted.
    pub lifted: bool,
}
