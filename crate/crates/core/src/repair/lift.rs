use std::collections::BTreeSet;

use ndarray::Array2;

use crate::dist::{marginal_positions, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::ot::TransportPlan;

/// Extends a plan over the `u_attrs` sub-schema to the full schema of `p`.
///
/// The remaining attributes `W` ride along unchanged:
/// `π(uw, u'w') = π_s(u, u') P(w | u)` when `w = w'`, zero otherwise. Labels
/// of `pi_s` are joint indices over `u_attrs` in the order given.
pub fn lift_unsaturated(
    pi_s: &TransportPlan,
    p: &DiscreteDistribution,
    u_attrs: &[String],
) -> Result<TransportPlan> {
    let schema = p.schema();
    let u_pos = schema.positions(u_attrs)?;
    let w_pos: Vec<usize> = (0..schema.len()).filter(|k| !u_pos.contains(k)).collect();
    let u_map = schema.projection_map(&u_pos);
    let w_map = schema.projection_map(&w_pos);
    let nu = schema.project(&u_pos).joint_size();
    let nw = schema.project(&w_pos).joint_size();
    let p_u = marginal_positions(p, &u_pos);

    let row_mass = pi_s.row_marginal();
    for (i, &u) in pi_s.sources().iter().enumerate() {
        if u >= nu {
            return Err(Error::DimensionMismatch(format!("plan source label {u} >= {nu}")));
        }
        if (row_mass[i] - p_u.mass()[u]).abs() > 1e-9 {
            return Err(Error::MarginalMismatch {
                source_mass: row_mass[i],
                target_mass: p_u.mass()[u],
            });
        }
    }
    let covered: f64 = pi_s.sources().iter().map(|&u| p_u.mass()[u]).sum();
    if (covered - 1.0).abs() > 1e-9 {
        return Err(Error::MarginalMismatch {
            source_mass: covered,
            target_mass: 1.0,
        });
    }

    // (u, w) -> joint index over the full schema
    let mut join = vec![0usize; nu * nw];
    for v in 0..schema.joint_size() {
        join[u_map[v] * nw + w_map[v]] = v;
    }

    let sources = p.support();
    let targets: Vec<usize> = pi_s
        .targets()
        .iter()
        .flat_map(|&u| (0..nw).map(move |w| (u, w)))
        .map(|(u, w)| join[u * nw + w])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let col_of = |v: usize| targets.binary_search(&v).expect("target enumerated above");

    let mut mass = Array2::zeros((sources.len(), targets.len()));
    for (a, &v) in sources.iter().enumerate() {
        let u = u_map[v];
        let w = w_map[v];
        let i = pi_s
            .sources()
            .iter()
            .position(|&s| s == u)
            .ok_or(Error::MarginalMismatch {
                source_mass: 0.0,
                target_mass: p_u.mass()[u],
            })?;
        let given = p.mass()[v] / p_u.mass()[u];
        for (j, &u2) in pi_s.targets().iter().enumerate() {
            let m = pi_s.get(i, j);
            if m > 0.0 {
                mass[[a, col_of(join[u2 * nw + w])]] += m * given;
            }
        }
    }
    Ok(TransportPlan::new(mass, sources, targets))
}
