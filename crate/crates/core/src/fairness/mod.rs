//! Threshold-dependent and threshold-independent bias metrics over scored,
//! grouped, labelled record pairs.

mod auc;
mod curve;
mod table;

pub use auc::{auc, delta_xauc, xauc};
pub use curve::{dsp, metric_curve, threshold_bias, BiasKind, Metric, MetricCurve};
pub use table::{Group, ScoreRecord, ScoreTable};

use crate::error::Result;

/// Bias and accuracy summary of a score table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricPanel {
    pub dsp_dp: f64,
    pub dsp_eo: f64,
    /// Mean of the TPR and FPR distributional gaps.
    pub dsp_eod: f64,
    pub auc: f64,
    /// `xAUC(a⁺, b⁻)`.
    pub xauc_ab: f64,
    /// `xAUC(b⁺, a⁻)`.
    pub xauc_ba: f64,
    pub delta_xauc: f64,
}

impl MetricPanel {
    pub fn compute(t: &ScoreTable) -> Result<Self> {
        let dsp_eo = dsp(t, Metric::Tpr)?;
        let dsp_fpr = dsp(t, Metric::Fpr)?;
        let xauc_ab = xauc(t, Group::A, Group::B)?;
        let xauc_ba = xauc(t, Group::B, Group::A)?;
        Ok(Self {
            dsp_dp: dsp(t, Metric::Pr)?,
            dsp_eo,
            dsp_eod: 0.5 * (dsp_eo + dsp_fpr),
            auc: auc(t, None)?,
            xauc_ab,
            xauc_ba,
            delta_xauc: xauc_ab - xauc_ba,
        })
    }

    /// `(name, value)` pairs in a stable order.
    pub fn entries(&self) -> [(&'static str, f64); 7] {
        [
            ("AUC", self.auc),
            ("DSP-DP", self.dsp_dp),
            ("DSP-EO", self.dsp_eo),
            ("DSP-EOD", self.dsp_eod),
            ("xAUC_a^b", self.xauc_ab),
            ("xAUC_b^a", self.xauc_ba),
            ("dxAUC", self.delta_xauc),
        ]
    }
}
