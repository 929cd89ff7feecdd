use ndarray::Array2;

use crate::ot::cost::CostMatrix;

/// Coupling `π(v_i, v'_j)` between source and target points.
///
/// Rows and columns carry the index of the point they stand for (for
/// tuple-valued problems, the joint-domain index).
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    mass: Array2<f64>,
    sources: Vec<usize>,
    targets: Vec<usize>,
}

impl TransportPlan {
    pub fn new(mass: Array2<f64>, sources: Vec<usize>, targets: Vec<usize>) -> Self {
        assert_eq!(mass.nrows(), sources.len(), "row labels");
        assert_eq!(mass.ncols(), targets.len(), "column labels");
        Self {
            mass,
            sources,
            targets,
        }
    }

    /// Plan whose rows and columns are labelled `0..n` and `0..m`.
    pub fn dense(mass: Array2<f64>) -> Self {
        let (n, m) = mass.dim();
        Self::new(mass, (0..n).collect(), (0..m).collect())
    }

    pub fn mass(&self) -> &Array2<f64> {
        &self.mass
    }

    pub fn mass_mut(&mut self) -> &mut Array2<f64> {
        &mut self.mass
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mass[[i, j]]
    }

    /// Mass moved between two labelled points (0 if either is absent).
    pub fn between(&self, source: usize, target: usize) -> f64 {
        match (
            self.sources.iter().position(|&s| s == source),
            self.targets.iter().position(|&t| t == target),
        ) {
            (Some(i), Some(j)) => self.mass[[i, j]],
            _ => 0.0,
        }
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        self.mass.rows().into_iter().map(|r| r.sum()).collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        self.mass.columns().into_iter().map(|c| c.sum()).collect()
    }

    /// `⟨C, π⟩` for a cost matrix aligned with this plan's rows and columns.
    pub fn cost(&self, cost: &CostMatrix) -> f64 {
        assert_eq!((cost.rows(), cost.cols()), self.mass.dim());
        self.mass
            .indexed_iter()
            .map(|((i, j), &m)| if m > 0.0 { m * cost.get(i, j) } else { 0.0 })
            .sum()
    }

    /// Shannon entropy `-Σ π log π`.
    pub fn entropy(&self) -> f64 {
        self.mass
            .iter()
            .filter(|&&m| m > 0.0)
            .map(|&m| -m * m.ln())
            .sum()
    }

    /// L1 violation of both marginals (rows + columns).
    pub fn marginal_violation(&self, mu: &[f64], nu: &[f64]) -> f64 {
        let rows: f64 = self
            .row_marginal()
            .iter()
            .zip(mu)
            .map(|(a, b)| (a - b).abs())
            .sum();
        let cols: f64 = self
            .col_marginal()
            .iter()
            .zip(nu)
            .map(|(a, b)| (a - b).abs())
            .sum();
        rows + cols
    }

    /// Rescales each row to hit `mu` exactly. Rows with zero mass are left
    /// untouched.
    pub fn rescale_rows(&mut self, mu: &[f64]) {
        for (mut row, &target) in self.mass.rows_mut().into_iter().zip(mu) {
            let s = row.sum();
            if s > 0.0 {
                row.mapv_inplace(|m| m * target / s);
            }
        }
    }

    /// Non-zero entries as `(source_label, target_label, mass)`.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        self.mass
            .indexed_iter()
            .filter(|(_, &m)| m > 0.0)
            .map(|((i, j), &m)| (self.sources[i], self.targets[j], m))
            .collect()
    }
}
