//! Post-processing score calibration toward the 1-D Wasserstein barycenter of
//! the two group score distributions.

use std::collections::HashMap;
use std::thread;

use crate::error::{Error, Result};
use crate::fairness::{dsp, Group, Metric, MetricPanel, ScoreTable};
use crate::ot::{barycenter_1d, WeightedSamples};

/// Objective differences below this count as ties in the λ search.
const TIE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationConfig {
    /// Rate metrics whose distributional gaps are summed into the objective.
    pub targets: Vec<Metric>,
    /// Barycenter weight on group `a`; `None` uses the group-`a` record share.
    pub alpha: Option<f64>,
    /// Number of uniform λ values in `[0, 1]`.
    pub lambda_grid: usize,
    /// Number of quantile levels used to sample the barycenter.
    pub quantile_grid: usize,
    /// Worker threads for the λ grid.
    pub threads: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            targets: vec![Metric::Tpr, Metric::Fpr],
            alpha: None,
            lambda_grid: 101,
            quantile_grid: 1000,
            threads: 1,
        }
    }
}

impl CalibrationConfig {
    pub fn with_targets(targets: Vec<Metric>) -> Self {
        Self {
            targets,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::InvalidConfig("no calibration targets".into()));
        }
        if let Some(a) = self.alpha {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::InvalidConfig(format!("alpha must be in [0, 1], got {a}")));
            }
        }
        if self.lambda_grid < 2 || self.quantile_grid < 2 {
            return Err(Error::InvalidConfig("grids need at least 2 points".into()));
        }
        if self.threads == 0 {
            return Err(Error::InvalidConfig("threads must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub lambda_star: f64,
    pub calibrated: ScoreTable,
    pub objective_before: f64,
    pub objective_after: f64,
    pub before: MetricPanel,
    pub after: MetricPanel,
    /// Mean absolute score change `mean |s_λ* − s|`.
    pub mean_abs_change: f64,
}

/// Group-`a` share of the records.
pub fn default_alpha(t: &ScoreTable) -> f64 {
    t.count(Group::A) as f64 / t.len().max(1) as f64
}

/// Moves every score to the barycenter quantile at its mid-rank position
/// within its own group.
pub fn barycenter_map(t: &ScoreTable, alpha: f64, quantile_grid: usize) -> Result<ScoreTable> {
    let mut sorted: HashMap<Group, Vec<f64>> = HashMap::new();
    for g in [Group::A, Group::B] {
        let mut s = t.scores(Some(g), None);
        if s.is_empty() {
            return Err(Error::MissingGroup(g.to_string()));
        }
        s.sort_by(f64::total_cmp);
        sorted.insert(g, s);
    }
    let pa = WeightedSamples::uniform(sorted[&Group::A].clone())?;
    let pb = WeightedSamples::uniform(sorted[&Group::B].clone())?;
    let bary = barycenter_1d(&pa, &pb, alpha, quantile_grid)?;
    let mapped: Vec<f64> = t
        .records()
        .iter()
        .map(|r| {
            let s = &sorted[&r.group];
            let below = s.partition_point(|&x| x < r.score);
            let tied = s.partition_point(|&x| x <= r.score) - below;
            let rank = (below as f64 + 0.5 * tied as f64) / s.len() as f64;
            bary.quantile(rank).clamp(0.0, 1.0)
        })
        .collect();
    t.with_scores(&mapped)
}

/// `s_λ = (1 − λ) s + λ ŝ`, matching records by id.
pub fn geometric_repair(t: &ScoreTable, s_hat: &ScoreTable, lambda: f64) -> Result<ScoreTable> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidConfig(format!("lambda must be in [0, 1], got {lambda}")));
    }
    if s_hat.len() != t.len() {
        return Err(Error::IdMismatch(format!(
            "{} calibrated records for {} originals",
            s_hat.len(),
            t.len()
        )));
    }
    let target: HashMap<&str, f64> = s_hat.records().iter().map(|r| (r.id.as_str(), r.score)).collect();
    let scores = t
        .records()
        .iter()
        .map(|r| {
            target
                .get(r.id.as_str())
                .map(|&h| (1.0 - lambda) * r.score + lambda * h)
                .ok_or_else(|| Error::IdMismatch(format!("no calibrated score for `{}`", r.id)))
        })
        .collect::<Result<Vec<f64>>>()?;
    t.with_scores(&scores)
}

/// Sum of the distributional gaps of the configured targets.
pub fn objective(t: &ScoreTable, targets: &[Metric]) -> Result<f64> {
    targets.iter().map(|&m| dsp(t, m)).sum()
}

/// Evaluates the objective on a uniform λ grid and keeps the smallest
/// minimising λ.
pub fn search_lambda(t: &ScoreTable, cfg: &CalibrationConfig) -> Result<CalibrationResult> {
    cfg.validate()?;
    let alpha = cfg.alpha.unwrap_or_else(|| default_alpha(t));
    let s_hat = barycenter_map(t, alpha, cfg.quantile_grid)?;
    let lambdas: Vec<f64> = (0..cfg.lambda_grid)
        .map(|k| k as f64 / (cfg.lambda_grid - 1) as f64)
        .collect();
    let eval = |lambda: f64| -> Result<f64> { objective(&geometric_repair(t, &s_hat, lambda)?, &cfg.targets) };

    let chunk = lambdas.len().div_ceil(cfg.threads);
    let values: Vec<f64> = if cfg.threads == 1 {
        lambdas.iter().map(|&l| eval(l)).collect::<Result<_>>()?
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = lambdas
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(|&l| eval(l)).collect::<Result<Vec<f64>>>()))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("grid worker panicked"))
                .collect::<Result<Vec<Vec<f64>>>>()
        })?
        .into_iter()
        .flatten()
        .collect()
    };

    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if v < values[best] - TIE {
            best = k;
        }
    }
    let lambda_star = lambdas[best];
    let calibrated = geometric_repair(t, &s_hat, lambda_star)?;
    let mean_abs_change = t
        .records()
        .iter()
        .zip(calibrated.records())
        .map(|(a, b)| (a.score - b.score).abs())
        .sum::<f64>()
        / t.len() as f64;
    Ok(CalibrationResult {
        lambda_star,
        objective_before: values[0],
        objective_after: values[best],
        before: MetricPanel::compute(t)?,
        after: MetricPanel::compute(&calibrated)?,
        mean_abs_change,
        calibrated,
    })
}
