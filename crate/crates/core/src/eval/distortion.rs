use crate::dist::{empirical_distribution, satisfies_ci, CiConstraint, Schema, Tuple};
use crate::error::Result;
use crate::ot::{exact_ot_between, CostFn, TupleCost};

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    /// Exact OT distance between the two empirical distributions.
    pub emd: f64,
    /// Mean row-aligned cost `Σ c(orig_i, rep_i) / n`; `None` when the two
    /// datasets differ in length.
    pub repair_cost: Option<f64>,
    pub ci_violation_before: Option<f64>,
    pub ci_violation_after: Option<f64>,
    /// Row-aligned count of changed tuples; `None` when lengths differ.
    pub rows_changed: Option<usize>,
}

/// Compares an original and a repaired dataset over one schema.
pub fn statistical_distortion(
    original: &[Tuple],
    repaired: &[Tuple],
    schema: &Schema,
    cost: CostFn,
    sigma: Option<&CiConstraint>,
) -> Result<DistortionReport> {
    let p = empirical_distribution(original, schema)?;
    let q = empirical_distribution(repaired, schema)?;
    let emd = exact_ot_between(&p, &q, cost)?.cost;
    let (repair_cost, rows_changed) = if original.len() == repaired.len() {
        let tc = TupleCost::new(schema, cost);
        let mut total = 0.0;
        let mut changed = 0;
        for (a, b) in original.iter().zip(repaired) {
            if a != b {
                changed += 1;
                total += tc.codes(&schema.codes(a)?, &schema.codes(b)?);
            }
        }
        (Some(total / original.len() as f64), Some(changed))
    } else {
        (None, None)
    };
    let (before, after) = match sigma {
        Some(s) => (
            Some(satisfies_ci(&p, s, 0.0)?.violation),
            Some(satisfies_ci(&q, s, 0.0)?.violation),
        ),
        None => (None, None),
    };
    Ok(DistortionReport {
        emd,
        repair_cost,
        ci_violation_before: before,
        ci_violation_after: after,
        rows_changed,
    })
}
