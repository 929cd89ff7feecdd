//! Entropy-regularised optimal transport by Sinkhorn matrix scaling.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::ot::cost::CostMatrix;
use crate::ot::exact::check_weights;
use crate::ot::plan::TransportPlan;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornConfig {
    /// Entropic regularisation weight ε.
    pub epsilon: f64,
    pub max_iter: usize,
    /// Stop once the summed L1 violation of both marginals drops below this.
    pub tol: f64,
    /// Force log-domain updates. Log-domain is also used automatically when
    /// the Gibbs kernel underflows.
    pub log_domain: bool,
}

impl Default for SinkhornConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            max_iter: 10_000,
            tol: 1e-9,
            log_domain: false,
        }
    }
}

impl SinkhornConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SinkhornSolution {
    pub plan: TransportPlan,
    pub iterations: usize,
    /// Final L1 marginal violation (rows + columns).
    pub residual: f64,
    pub converged: bool,
    /// Whether the log-domain iteration was used.
    pub log_domain: bool,
    /// Linear transport cost `⟨C, π⟩` of the regularised plan.
    pub cost: f64,
    /// `⟨C, π⟩ - ε H(π)`.
    pub regularized_objective: f64,
}

/// Solves the entropic OT problem between `mu` and `nu`.
///
/// Zero-mass entries are removed before scaling (their rows/columns stay
/// empty). Non-convergence is reported through `converged`, not as an error.
pub fn sinkhorn(
    mu: &[f64],
    nu: &[f64],
    cost: &CostMatrix,
    cfg: &SinkhornConfig,
) -> Result<SinkhornSolution> {
    cfg.validate()?;
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
    if (sm - sn).abs() > 1e-9 {
        return Err(Error::MarginalMismatch {
            source_mass: sm,
            target_mass: sn,
        });
    }
    let rows: Vec<usize> = (0..mu.len()).filter(|&i| mu[i] > 0.0).collect();
    let cols: Vec<usize> = (0..nu.len()).filter(|&j| nu[j] > 0.0).collect();
    let a: Vec<f64> = rows.iter().map(|&i| mu[i]).collect();
    let b: Vec<f64> = cols.iter().map(|&j| nu[j]).collect();
    let sub = cost.select(&rows, &cols);

    let mut state = if cfg.log_domain {
        None
    } else {
        scaling(&a, &b, sub.view(), cfg)
    };
    if state.is_none() {
        state = Some(log_scaling(&a, &b, sub.view(), cfg, None));
    }
    let run = state.expect("one of the two iterations ran");

    let mut mass = Array2::zeros((mu.len(), nu.len()));
    for (p, &i) in rows.iter().enumerate() {
        for (q, &j) in cols.iter().enumerate() {
            mass[[i, j]] = run.plan[[p, q]];
        }
    }
    let plan = TransportPlan::dense(mass);
    let linear = plan.cost(cost);
    let regularized_objective = linear - cfg.epsilon * plan.entropy();
    Ok(SinkhornSolution {
        residual: run.residual,
        converged: run.residual <= cfg.tol,
        iterations: run.iterations,
        log_domain: run.log_domain,
        cost: linear,
        regularized_objective,
        plan,
    })
}

pub(crate) struct Scaled {
    pub plan: Array2<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub log_domain: bool,
    /// Column dual potential (log domain only).
    pub g: Vec<f64>,
}

fn residual_of(plan: &Array2<f64>, a: &[f64], b: &[f64]) -> f64 {
    let r: f64 = plan
        .rows()
        .into_iter()
        .zip(a)
        .map(|(row, &t)| (row.sum() - t).abs())
        .sum();
    let c: f64 = plan
        .columns()
        .into_iter()
        .zip(b)
        .map(|(col, &t)| (col.sum() - t).abs())
        .sum();
    r + c
}

/// Classic `u = a / Kv`, `v = b / Kᵀu` iteration. Returns `None` when the
/// kernel underflows or the scalings leave the representable range.
fn scaling(a: &[f64], b: &[f64], cost: ArrayView2<f64>, cfg: &SinkhornConfig) -> Option<Scaled> {
    let (n, m) = cost.dim();
    let kernel = cost.mapv(|c| (-c / cfg.epsilon).exp());
    if kernel.iter().any(|&k| k < f64::MIN_POSITIVE) {
        return None;
    }
    let mut u = vec![1.0; n];
    let mut v = vec![1.0; m];
    let mut iterations = 0;
    let mut kv = vec![0.0; n];
    let mut ktu = vec![0.0; m];
    while iterations < cfg.max_iter {
        iterations += 1;
        for i in 0..n {
            kv[i] = (0..m).map(|j| kernel[[i, j]] * v[j]).sum();
            u[i] = a[i] / kv[i];
        }
        for j in 0..m {
            ktu[j] = (0..n).map(|i| kernel[[i, j]] * u[i]).sum();
            v[j] = b[j] / ktu[j];
        }
        if u.iter().chain(&v).any(|x| !x.is_finite() || *x == 0.0) {
            return None;
        }
        // columns are exact after the v-update; rows need one more product
        let residual: f64 = (0..n)
            .map(|i| {
                let row: f64 = (0..m).map(|j| kernel[[i, j]] * v[j]).sum();
                (u[i] * row - a[i]).abs()
            })
            .sum::<f64>();
        if residual <= cfg.tol {
            break;
        }
    }
    let plan = Array2::from_shape_fn((n, m), |(i, j)| u[i] * kernel[[i, j]] * v[j]);
    let residual = residual_of(&plan, a, b);
    Some(Scaled {
        plan,
        iterations,
        residual,
        log_domain: false,
        g: Vec::new(),
    })
}

fn log_sum_exp(values: impl Iterator<Item = f64>, buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend(values);
    let max = buf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + buf.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Stabilised iteration on dual potentials `f`, `g`, with
/// `π_ij = exp((f_i + g_j - C_ij) / ε)`.
pub(crate) fn log_scaling(
    a: &[f64],
    b: &[f64],
    cost: ArrayView2<f64>,
    cfg: &SinkhornConfig,
    g_init: Option<&[f64]>,
) -> Scaled {
    let (n, m) = cost.dim();
    let eps = cfg.epsilon;
    let log_a: Vec<f64> = a.iter().map(|x| x.ln()).collect();
    let log_b: Vec<f64> = b.iter().map(|x| x.ln()).collect();
    let mut f = vec![0.0; n];
    let mut g = match g_init {
        Some(g0) if g0.len() == m => g0.to_vec(),
        _ => vec![0.0; m],
    };
    let mut buf = Vec::with_capacity(n.max(m));
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        iterations += 1;
        for i in 0..n {
            let lse = log_sum_exp((0..m).map(|j| (g[j] - cost[[i, j]]) / eps), &mut buf);
            f[i] = eps * (log_a[i] - lse);
        }
        for j in 0..m {
            let lse = log_sum_exp((0..n).map(|i| (f[i] - cost[[i, j]]) / eps), &mut buf);
            g[j] = eps * (log_b[j] - lse);
        }
        let residual: f64 = (0..n)
            .map(|i| {
                let row: f64 = (0..m)
                    .map(|j| ((f[i] + g[j] - cost[[i, j]]) / eps).exp())
                    .sum();
                (row - a[i]).abs()
            })
            .sum();
        if residual <= cfg.tol {
            break;
        }
    }
    let plan = Array2::from_shape_fn((n, m), |(i, j)| ((f[i] + g[j] - cost[[i, j]]) / eps).exp());
    let residual = residual_of(&plan, a, b);
    Scaled {
        plan,
        iterations,
        residual,
        log_domain: true,
        g,
    }
}
