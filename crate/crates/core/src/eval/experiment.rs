use crate::dist::{empirical_distribution, satisfies_ci};
use crate::dist::Tuple;
use crate::error::Result;
use crate::eval::corruption::{inject_corruption, CorruptionSpec};
use crate::eval::distortion::statistical_distortion;
use crate::ot::exact_ot_between;
use crate::repair::{apply_cleaner, repair, RepairProblem, RepairStatus};

/// Violations and distances from one corrupt → repair run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub ci_violation_clean: f64,
    pub ci_violation_corrupted: f64,
    /// Violation of the repaired target distribution.
    pub ci_violation_repaired: f64,
    /// Violation of the dataset sampled through the cleaner.
    pub ci_violation_sampled: f64,
    pub transport_cost: f64,
    /// OT distance between the corrupted data and the sampled repair.
    pub distortion: f64,
    pub corrupted_to_clean: f64,
    /// OT distance from the repaired target distribution to the clean data.
    pub repaired_to_clean: f64,
    pub sampled_to_clean: f64,
    pub rows_corrupted: usize,
    pub status: RepairStatus,
}

/// Corrupts `clean`, repairs it with the settings of `template`, and measures
/// the result against the clean data.
///
/// The template's `data` and `schema` are replaced by the corrupted rows and
/// their (possibly extended) schema. The cleaner is applied with `spec.seed`.
pub fn run_experiment(clean: &[Tuple], spec: &CorruptionSpec, template: &RepairProblem) -> Result<ExperimentReport> {
    let (corrupted, schema) = inject_corruption(clean, spec, &template.schema)?;
    let prob = RepairProblem {
        data: corrupted.clone(),
        schema: schema.clone(),
        ..template.clone()
    };
    let result = repair(&prob)?;
    let sampled = apply_cleaner(&corrupted, &result.cleaner, spec.seed)?;

    let p_clean = empirical_distribution(clean, &schema)?;
    let p_corrupt = empirical_distribution(&corrupted, &schema)?;
    let p_sampled = empirical_distribution(&sampled, &schema)?;
    let distortion = statistical_distortion(&corrupted, &sampled, &schema, prob.cost, Some(&prob.sigma))?;
    Ok(ExperimentReport {
        ci_violation_clean: satisfies_ci(&p_clean, &prob.sigma, 0.0)?.violation,
        ci_violation_corrupted: result.ci_violation_before,
        ci_violation_repaired: result.ci_violation_after,
        ci_violation_sampled: satisfies_ci(&p_sampled, &prob.sigma, 0.0)?.violation,
        transport_cost: result.transport_cost,
        distortion: distortion.emd,
        corrupted_to_clean: exact_ot_between(&p_corrupt, &p_clean, prob.cost)?.cost,
        repaired_to_clean: exact_ot_between(&result.target, &p_clean, prob.cost)?.cost,
        sampled_to_clean: exact_ot_between(&p_sampled, &p_clean, prob.cost)?.cost,
        rows_corrupted: clean.iter().zip(&corrupted).filter(|(a, b)| a != b).count(),
        status: result.status,
    })
}
