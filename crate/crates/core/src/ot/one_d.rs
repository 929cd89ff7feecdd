//! One-dimensional Wasserstein distances and barycenters through quantile
//! functions.

use crate::error::{Error, Result};

/// Discrete distribution on the real line, kept sorted with ties merged.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSamples {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSamples {
    /// Weights must be non-negative and are renormalised to sum to one.
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} points, {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::EmptySamples);
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidWeights("non-finite support point".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights("negative or non-finite weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidWeights("weights sum to zero".into()));
        }
        let mut pairs: Vec<(f64, f64)> = points
            .into_iter()
            .zip(weights)
            .filter(|(_, w)| *w > 0.0)
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged_points: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut merged_weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (p, w) in pairs {
            if merged_points.last() == Some(&p) {
                *merged_weights.last_mut().unwrap() += w;
            } else {
                merged_points.push(p);
                merged_weights.push(w);
            }
        }
        merged_weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self {
            points: merged_points,
            weights: merged_weights,
        })
    }

    /// Equal weight on every sample.
    pub fn uniform(points: Vec<f64>) -> Result<Self> {
        let w = vec![1.0; points.len()];
        Self::new(points, w)
    }

    pub fn point(x: f64) -> Self {
        Self {
            points: vec![x],
            weights: vec![1.0],
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Right-continuous CDF `F(x) = P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .take_while(|(p, _)| **p <= x)
            .map(|(_, w)| w)
            .sum::<f64>()
            .min(1.0)
    }

    /// Generalised inverse `F⁻¹(t) = inf { x : F(x) ≥ t }` for `t ∈ [0, 1]`.
    pub fn quantile(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (p, w) in self.points.iter().zip(&self.weights) {
            acc += w;
            if acc >= t {
                return *p;
            }
        }
        *self.points.last().unwrap()
    }

    /// Cumulative weights at the right end of every atom.
    fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        *out.last_mut().unwrap() = 1.0;
        out
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        *self.points.last().unwrap()
    }
}

/// Walks the merged quantile breakpoints of two distributions, calling
/// `visit(length, quantile_p, quantile_q)` on each constant piece.
fn for_each_quantile_piece(p: &WeightedSamples, q: &WeightedSamples, mut visit: impl FnMut(f64, f64, f64)) {
    let cp = p.cumulative();
    let cq = q.cumulative();
    let (mut i, mut j) = (0, 0);
    let mut t = 0.0;
    while i < cp.len() && j < cq.len() {
        let next = cp[i].min(cq[j]);
        if next > t {
            visit(next - t, p.points[i], q.points[j]);
            t = next;
        }
        if cp[i] <= next {
            i += 1;
        }
        if cq[j] <= next {
            j += 1;
        }
    }
}

/// `W_p(p, q) = (∫₀¹ |F_p⁻¹(t) − F_q⁻¹(t)|^p dt)^{1/p}`, exact for discrete
/// supports.
pub fn wasserstein_1d(p: &WeightedSamples, q: &WeightedSamples, order: f64) -> Result<f64> {
    if !(order >= 1.0) {
        return Err(Error::InvalidConfig(format!("order must be >= 1, got {order}")));
    }
    let mut total = 0.0;
    for_each_quantile_piece(p, q, |len, a, b| total += len * (a - b).abs().powf(order));
    Ok(total.powf(1.0 / order))
}

/// Quantile-average barycenter `α F_p⁻¹ + (1 − α) F_q⁻¹`, sampled at the
/// `grid` cell midpoints `(k + ½) / grid` with equal weights.
pub fn barycenter_1d(p: &WeightedSamples, q: &WeightedSamples, alpha: f64, grid: usize) -> Result<WeightedSamples> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!("alpha must be in [0, 1], got {alpha}")));
    }
    if grid < 2 {
        return Err(Error::InvalidConfig(format!("grid must be >= 2, got {grid}")));
    }
    let points: Vec<f64> = (0..grid)
        .map(|k| {
            let t = (k as f64 + 0.5) / grid as f64;
            alpha * p.quantile(t) + (1.0 - alpha) * q.quantile(t)
        })
        .collect();
    WeightedSamples::uniform(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_ties_and_sorts() {
        let s = WeightedSamples::new(vec![0.5, 0.1, 0.5], vec![1.0, 2.0, 1.0]).unwrap();
        assert_eq!(s.points(), &[0.1, 0.5]);
        assert_eq!(s.weights(), &[0.5, 0.5]);
        assert_eq!(s.cdf(0.1), 0.5);
        assert_eq!(s.cdf(0.09), 0.0);
    }

    #[test]
    fn quantile_is_left_inverse() {
        let s = WeightedSamples::new(vec![1.0, 2.0, 3.0], vec![0.25, 0.25, 0.5]).unwrap();
        assert_eq!(s.quantile(0.0), 1.0);
        assert_eq!(s.quantile(0.25), 1.0);
        assert_eq!(s.quantile(0.2500001), 2.0);
        assert_eq!(s.quantile(0.75), 3.0);
        assert_eq!(s.quantile(1.0), 3.0);
    }

    #[test]
    fn identical_distributions_have_zero_distance() {
        let s = WeightedSamples::uniform(vec![0.3, 0.1, 0.9]).unwrap();
        assert_eq!(wasserstein_1d(&s, &s, 1.0).unwrap(), 0.0);
        assert_eq!(wasserstein_1d(&s, &s, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn point_masses_translation() {
        let a = WeightedSamples::point(0.0);
        let b = WeightedSamples::point(1.0);
        assert_eq!(wasserstein_1d(&a, &b, 1.0).unwrap(), 1.0);
        assert_eq!(wasserstein_1d(&a, &b, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn midpoint_barycenter_of_point_masses() {
        let a = WeightedSamples::point(0.0);
        let b = WeightedSamples::point(1.0);
        let m = barycenter_1d(&a, &b, 0.5, 10).unwrap();
        assert_eq!(m.points(), &[0.5]);
        assert_eq!(m.weights(), &[1.0]);
    }

    #[test]
    fn alpha_one_reproduces_first_argument() {
        let p = WeightedSamples::uniform(vec![0.0, 1.0]).unwrap();
        let q = WeightedSamples::point(5.0);
        let b = barycenter_1d(&p, &q, 1.0, 100).unwrap();
        assert_eq!(b, p);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(WeightedSamples::uniform(vec![]), Err(Error::EmptySamples));
        let p = WeightedSamples::point(0.0);
        assert!(wasserstein_1d(&p, &p, 0.5).is_err());
        assert!(barycenter_1d(&p, &p, 1.5, 10).is_err());
        assert!(barycenter_1d(&p, &p, 0.5, 1).is_err());
    }
}
