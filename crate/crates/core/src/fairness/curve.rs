use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fairness::table::{Group, ScoreTable};

/// Rate metric evaluated at a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    /// Positive rate `Pr(s ≥ τ)`.
    Pr,
    /// True positive rate `Pr(s ≥ τ | y = 1)`.
    Tpr,
    /// False positive rate `Pr(s ≥ τ | y = 0)`.
    Fpr,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Pr => "pr",
            Metric::Tpr => "tpr",
            Metric::Fpr => "fpr",
        }
    }

    fn label(self) -> Option<bool> {
        match self {
            Metric::Pr => None,
            Metric::Tpr => Some(true),
            Metric::Fpr => Some(false),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pr" | "dp" => Ok(Metric::Pr),
            "tpr" | "eo" => Ok(Metric::Tpr),
            "fpr" => Ok(Metric::Fpr),
            other => Err(Error::InvalidConfig(format!("unknown metric `{other}`"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Empirical step curve `γ(τ) = #{s ≥ τ} / n` of one group.
///
/// `values[k]` holds γ on `(breakpoints[k-1], breakpoints[k]]`; γ is 1 at and
/// below the first breakpoint and 0 above the last.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricCurve {
    pub metric: Metric,
    pub group: Group,
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl MetricCurve {
    pub fn eval(&self, tau: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b < tau);
        self.values.get(k).copied().unwrap_or(0.0)
    }
}

pub fn metric_curve(t: &ScoreTable, metric: Metric, group: Group) -> Result<MetricCurve> {
    if t.count(group) == 0 {
        return Err(Error::MissingGroup(group.to_string()));
    }
    let mut scores = t.scores(Some(group), metric.label());
    if scores.is_empty() {
        return Err(match metric {
            Metric::Tpr => Error::NoPositives(group.to_string()),
            _ => Error::NoNegatives(group.to_string()),
        });
    }
    scores.sort_by(f64::total_cmp);
    let n = scores.len() as f64;
    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    for (i, &s) in scores.iter().enumerate() {
        if breakpoints.last() != Some(&s) {
            breakpoints.push(s);
            values.push((scores.len() - i) as f64 / n);
        }
    }
    Ok(MetricCurve {
        metric,
        group,
        breakpoints,
        values,
    })
}

/// `∫₀¹ |γ_a(τ) − γ_b(τ)| dτ`, integrated exactly over merged breakpoints.
pub fn dsp(t: &ScoreTable, metric: Metric) -> Result<f64> {
    let a = metric_curve(t, metric, Group::A)?;
    let b = metric_curve(t, metric, Group::B)?;
    let mut cuts: Vec<f64> = a
        .breakpoints
        .iter()
        .chain(&b.breakpoints)
        .copied()
        .chain([1.0])
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut prev = 0.0;
    let mut total = 0.0;
    for &c in &cuts {
        if c > prev {
            total += (c - prev) * (a.eval(c) - b.eval(c)).abs();
            prev = c;
        }
    }
    Ok(total)
}

/// Single-threshold bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasKind {
    /// Demographic parity: positive-rate gap.
    Dp,
    /// Equal opportunity: TPR gap.
    Eo,
    /// Equalized odds: larger of the TPR and FPR gaps.
    Eod,
}

impl FromStr for BiasKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dp" => Ok(BiasKind::Dp),
            "eo" => Ok(BiasKind::Eo),
            "eod" => Ok(BiasKind::Eod),
            other => Err(Error::InvalidConfig(format!("unknown bias kind `{other}`"))),
        }
    }
}

fn gap(t: &ScoreTable, metric: Metric, tau: f64) -> Result<f64> {
    let a = metric_curve(t, metric, Group::A)?.eval(tau);
    let b = metric_curve(t, metric, Group::B)?.eval(tau);
    Ok((a - b).abs())
}

pub fn threshold_bias(t: &ScoreTable, tau: f64, kind: BiasKind) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidConfig(format!("threshold must be in [0, 1], got {tau}")));
    }
    match kind {
        BiasKind::Dp => gap(t, Metric::Pr, tau),
        BiasKind::Eo => gap(t, Metric::Tpr, tau),
        BiasKind::Eod => Ok(gap(t, Metric::Tpr, tau)?.max(gap(t, Metric::Fpr, tau)?)),
    }
}
