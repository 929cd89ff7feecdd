use ndarray::Array2;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::{Schema, Tuple};
use crate::error::{Error, Result};
use crate::ot::TransportPlan;

/// Row-stochastic conditional `π(v' | v)` read off a transport plan.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilisticCleaner {
    schema: Schema,
    sources: Vec<usize>,
    targets: Vec<usize>,
    rows: Array2<f64>,
}

impl ProbabilisticCleaner {
    /// Builds a cleaner from explicit rows; every row must be a distribution.
    pub fn new(
        schema: Schema,
        sources: Vec<usize>,
        targets: Vec<usize>,
        rows: Array2<f64>,
    ) -> Result<Self> {
        if rows.nrows() != sources.len() || rows.ncols() != targets.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} rows for {} sources and {} targets",
                rows.nrows(),
                rows.ncols(),
                sources.len(),
                targets.len()
            )));
        }
        for row in rows.rows() {
            let total: f64 = row.sum();
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) || (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidWeights(format!("cleaner row sums to {total}")));
            }
        }
        Ok(Self {
            schema,
            sources,
            targets,
            rows,
        })
    }

    /// Cleaner that maps every listed source to itself.
    pub fn identity(schema: Schema, sources: Vec<usize>) -> Self {
        let n = sources.len();
        Self {
            schema,
            targets: sources.clone(),
            sources,
            rows: Array2::eye(n),
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    /// Joint indices of the source tuples, one per row.
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    /// Joint indices of the target tuples, one per column.
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn rows(&self) -> &Array2<f64> {
        &self.rows
    }

    /// `π(target | source)` for joint indices; zero for unlisted targets.
    pub fn prob(&self, source: usize, target: usize) -> Result<f64> {
        let i = self.row_of(source)?;
        Ok(self
            .targets
            .iter()
            .position(|&t| t == target)
            .map_or(0.0, |j| self.rows[[i, j]]))
    }

    fn row_of(&self, source: usize) -> Result<usize> {
        self.sources
            .iter()
            .position(|&s| s == source)
            .ok_or_else(|| Error::OutsideSupport(self.schema.decode(source).to_string()))
    }
}

/// Normalises each row of a plan by its mass. Rows with no mass are dropped
/// from the cleaner's support.
pub fn cleaner_from_plan(plan: &TransportPlan, schema: &Schema) -> Result<ProbabilisticCleaner> {
    let mass = plan.mass();
    let keep: Vec<usize> = (0..mass.nrows()).filter(|&i| mass.row(i).sum() > 0.0).collect();
    if keep.is_empty() {
        return Err(Error::InvalidWeights("plan carries no mass".into()));
    }
    let cols: Vec<usize> = (0..mass.ncols())
        .filter(|&j| mass.column(j).sum() > 0.0)
        .collect();
    let mut rows = Array2::zeros((keep.len(), cols.len()));
    for (a, &i) in keep.iter().enumerate() {
        let total: f64 = mass.row(i).sum();
        for (b, &j) in cols.iter().enumerate() {
            rows[[a, b]] = mass[[i, j]] / total;
        }
    }
    Ok(ProbabilisticCleaner {
        schema: schema.clone(),
        sources: keep.iter().map(|&i| plan.sources()[i]).collect(),
        targets: cols.iter().map(|&j| plan.targets()[j]).collect(),
        rows,
    })
}

/// Conditional row for one source, erroring when the source has no mass.
pub fn cleaner_row(cleaner: &ProbabilisticCleaner, source: &Tuple) -> Result<Vec<(Tuple, f64)>> {
    let idx = cleaner.schema.encode(source)?;
    let i = cleaner
        .row_of(idx)
        .map_err(|_| Error::ZeroMassSource(source.to_string()))?;
    Ok(cleaner
        .targets
        .iter()
        .zip(cleaner.rows.row(i))
        .filter(|(_, &p)| p > 0.0)
        .map(|(&t, &p)| (cleaner.schema.decode(t), p))
        .collect())
}

/// Resamples every tuple independently from its cleaner row.
///
/// The same `(data, cleaner, seed)` always yields the same output.
pub fn apply_cleaner(data: &[Tuple], cleaner: &ProbabilisticCleaner, seed: u64) -> Result<Vec<Tuple>> {
    let samplers: Vec<Option<WeightedIndex<f64>>> = cleaner
        .rows
        .rows()
        .into_iter()
        .map(|row| {
            let nonzero = row.iter().filter(|&&p| p > 0.0).count();
            (nonzero > 1).then(|| WeightedIndex::new(row.iter().copied()).expect("row is a distribution"))
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    data.iter()
        .map(|tuple| {
            let i = cleaner.row_of(cleaner.schema.encode(tuple)?)?;
            let j = match &samplers[i] {
                Some(s) => s.sample(&mut rng),
                None => cleaner.rows.row(i).iter().position(|&p| p > 0.0).unwrap(),
            };
            Ok(cleaner.schema.decode(cleaner.targets[j]))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[i64]) -> Tuple {
        Tuple::new(v.iter())
    }

    fn split_plan(s: &Schema) -> TransportPlan {
        let e = |v: &[i64]| s.encode(&t(v)).unwrap();
        let sources = vec![e(&[1, 0, 0]), e(&[1, 0, 1]), e(&[1, 1, 0])];
        let targets = vec![e(&[1, 0, 0]), e(&[1, 0, 1]), e(&[1, 1, 0]), e(&[1, 1, 1])];
        let mass = ndarray::array![
            [0.25, 0.0, 0.0, 0.0],
            [0.0, 0.25, 0.0, 0.0],
            [0.0, 0.0, 0.25, 0.25]
        ];
        TransportPlan::new(mass, sources, targets)
    }

    #[test]
    fn split_plan_divides_the_duplicated_tuple() {
        let s = Schema::binary(&["X", "Y", "Z"]).unwrap();
        let c = cleaner_from_plan(&split_plan(&s), &s).unwrap();
        let src = s.encode(&t(&[1, 1, 0])).unwrap();
        assert_eq!(c.prob(src, s.encode(&t(&[1, 1, 1])).unwrap()).unwrap(), 0.5);
        assert_eq!(c.prob(src, src).unwrap(), 0.5);
        let row = cleaner_row(&c, &t(&[1, 0, 0])).unwrap();
        assert_eq!(row, vec![(t(&[1, 0, 0]), 1.0)]);
    }

    #[test]
    fn identity_cleaner_is_a_no_op() {
        let s = Schema::binary(&["A", "B"]).unwrap();
        let data = vec![t(&[0, 1]), t(&[1, 1]), t(&[0, 1])];
        let support: Vec<usize> = (0..4).collect();
        let c = ProbabilisticCleaner::identity(s, support);
        assert_eq!(apply_cleaner(&data, &c, 3).unwrap(), data);
    }

    #[test]
    fn seeded_application_is_reproducible() {
        let s = Schema::binary(&["X", "Y", "Z"]).unwrap();
        let c = cleaner_from_plan(&split_plan(&s), &s).unwrap();
        let data: Vec<Tuple> = (0..200).map(|_| t(&[1, 1, 0])).collect();
        let a = apply_cleaner(&data, &c, 11).unwrap();
        assert_eq!(a, apply_cleaner(&data, &c, 11).unwrap());
        assert_ne!(a, apply_cleaner(&data, &c, 12).unwrap());
    }

    #[test]
    fn unknown_source_is_rejected() {
        let s = Schema::binary(&["X", "Y", "Z"]).unwrap();
        let c = cleaner_from_plan(&split_plan(&s), &s).unwrap();
        assert!(matches!(
            apply_cleaner(&[t(&[0, 0, 0])], &c, 0),
            Err(Error::OutsideSupport(_))
        ));
        assert!(matches!(
            cleaner_row(&c, &t(&[0, 0, 0])),
            Err(Error::ZeroMassSource(_))
        ));
    }

    #[test]
    fn rejects_non_stochastic_rows() {
        let s = Schema::binary(&["A"]).unwrap();
        let bad = ndarray::array![[0.5, 0.4]];
        assert!(ProbabilisticCleaner::new(s, vec![0], vec![0, 1], bad).is_err());
    }
}
