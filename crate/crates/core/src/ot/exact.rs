//! Exact discrete optimal transport via successive shortest paths on the
//! bipartite transportation network.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::ot::cost::CostMatrix;
use crate::ot::plan::TransportPlan;

/// Largest source or target support accepted by [`exact_ot`].
pub const EXACT_SUPPORT_LIMIT: usize = 512;

const MARGINAL_TOL: f64 = 1e-9;

/// Optimal plan and its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub plan: TransportPlan,
    pub cost: f64,
}

pub(crate) fn check_weights(w: &[f64], what: &str) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::InvalidWeights(format!("{what} is empty")));
    }
    if let Some(bad) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidWeights(format!("{what} has entry {bad}")));
    }
    Ok(w.iter().sum())
}

/// Solves `min ⟨C, π⟩` over couplings of `mu` and `nu`.
///
/// Zero-mass points are dropped before solving and re-inserted as empty rows
/// and columns.
pub fn exact_ot(mu: &[f64], nu: &[f64], cost: &CostMatrix) -> Result<ExactSolution> {
    if cost.rows() != mu.len() || cost.cols() != nu.len() {
        return Err(Error::DimensionMismatch(format!(
            "cost is {}x{}, marginals are {} and {}",
            cost.rows(),
            cost.cols(),
            mu.len(),
            nu.len()
        )));
    }
    let sm = check_weights(mu, "source marginal")?;
    let sn = check_weights(nu, "target marginal")?;
    if (sm - sn).abs() > MARGINAL_TOL {
        return Err(Error::MarginalMismatch {
            source_mass: sm,
            target_mass: sn,
        });
    }
    let rows: Vec<usize> = (0..mu.len()).filter(|&i| mu[i] > 0.0).collect();
    let cols: Vec<usize> = (0..nu.len()).filter(|&j| nu[j] > 0.0).collect();
    for size in [rows.len(), cols.len()] {
        if size > EXACT_SUPPORT_LIMIT {
            return Err(Error::SupportTooLarge {
                size,
                limit: EXACT_SUPPORT_LIMIT,
            });
        }
    }
    let supply: Vec<f64> = rows.iter().map(|&i| mu[i]).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| nu[j]).collect();
    let sub = cost.select(&rows, &cols);
    let flow = min_cost_flow(&supply, &demand, &sub);

    let mut mass = Array2::zeros((mu.len(), nu.len()));
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            mass[[i, j]] = flow[[a, b]];
        }
    }
    let plan = TransportPlan::dense(mass);
    let total = plan.cost(cost);
    Ok(ExactSolution { plan, cost: total })
}

/// Successive shortest augmenting paths with Dijkstra on reduced costs.
fn min_cost_flow(supply: &[f64], demand: &[f64], cost: &CostMatrix) -> Array2<f64> {
    let n = supply.len();
    let m = demand.len();
    let total: f64 = supply.iter().sum::<f64>().min(demand.iter().sum());
    let eps = 1e-15 * total.max(1.0);

    let mut flow = Array2::<f64>::zeros((n, m));
    let mut left = supply.to_vec();
    let mut need = demand.to_vec();
    // Node potentials: sources 0..n, sinks n..n+m.
    let mut pot = vec![0.0; n + m];
    for j in 0..m {
        pot[n + j] = (0..n).map(|i| cost.get(i, j)).fold(f64::INFINITY, f64::min);
    }

    let mut dist = vec![f64::INFINITY; n + m];
    let mut pred = vec![usize::MAX; n + m];
    let mut done = vec![false; n + m];

    loop {
        let remaining: f64 = left.iter().filter(|&&s| s > eps).sum();
        if remaining <= eps || need.iter().all(|&d| d <= eps) {
            break;
        }
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        pred.iter_mut().for_each(|p| *p = usize::MAX);
        done.iter_mut().for_each(|d| *d = false);
        for i in 0..n {
            if left[i] > eps {
                dist[i] = 0.0;
            }
        }
        let mut sink = None;
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..n + m {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u >= n && need[u - n] > eps {
                sink = Some(u);
                break;
            }
            if u < n {
                for j in 0..m {
                    let v = n + j;
                    if done[v] {
                        continue;
                    }
                    let rc = (cost.get(u, j) + pot[u] - pot[v]).max(0.0);
                    if dist[u] + rc < dist[v] {
                        dist[v] = dist[u] + rc;
                        pred[v] = u;
                    }
                }
            } else {
                let j = u - n;
                for i in 0..n {
                    if done[i] || flow[[i, j]] <= eps {
                        continue;
                    }
                    let rc = (-cost.get(i, j) + pot[u] - pot[i]).max(0.0);
                    if dist[u] + rc < dist[i] {
                        dist[i] = dist[u] + rc;
                        pred[i] = u;
                    }
                }
            }
        }
        let Some(t) = sink else { break };
        let dt = dist[t];
        for v in 0..n + m {
            pot[v] += dist[v].min(dt);
        }

        // Bottleneck along the path.
        let mut amount = need[t - n];
        let mut v = t;
        while pred[v] != usize::MAX {
            let u = pred[v];
            if u >= n {
                // backward arc: sink u -> source v cancels flow[v][u-n]
                amount = amount.min(flow[[v, u - n]]);
            }
            v = u;
        }
        amount = amount.min(left[v]);
        let source = v;

        let mut v = t;
        while pred[v] != usize::MAX {
            let u = pred[v];
            if u < n {
                flow[[u, v - n]] += amount;
            } else {
                flow[[v, u - n]] -= amount;
                if flow[[v, u - n]] < eps {
                    flow[[v, u - n]] = 0.0;
                }
            }
            v = u;
        }
        left[source] -= amount;
        need[t - n] -= amount;
    }
    flow
}
