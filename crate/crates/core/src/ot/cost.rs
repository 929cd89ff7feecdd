use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};

use crate::dist::Schema;
use crate::error::{Error, Result};

/// Tuple-level cost functions over a schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostFn {
    /// Number of attributes whose values differ.
    #[default]
    Hamming,
    /// Squared Euclidean distance over numeric codes (parsed values when the
    /// whole domain is numeric, domain index otherwise).
    SqEuclidean,
}

impl CostFn {
    pub fn name(&self) -> &'static str {
        match self {
            CostFn::Hamming => "hamming",
            CostFn::SqEuclidean => "sqeuclid",
        }
    }
}

impl FromStr for CostFn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hamming" => Ok(CostFn::Hamming),
            "sqeuclid" | "sqeuclidean" | "squared-euclidean" => Ok(CostFn::SqEuclidean),
            other => Err(Error::InvalidConfig(format!("unknown cost function `{other}`"))),
        }
    }
}

impl fmt::Display for CostFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Evaluates a [`CostFn`] on joint-domain indices of one schema.
#[derive(Debug, Clone)]
pub struct TupleCost {
    schema: Schema,
    kind: CostFn,
    numeric: Vec<Vec<f64>>,
}

impl TupleCost {
    pub fn new(schema: &Schema, kind: CostFn) -> Self {
        Self {
            schema: schema.clone(),
            kind,
            numeric: schema.attributes().iter().map(|a| a.numeric_codes()).collect(),
        }
    }

    pub fn kind(&self) -> CostFn {
        self.kind
    }

    pub fn codes(&self, a: &[usize], b: &[usize]) -> f64 {
        match self.kind {
            CostFn::Hamming => a.iter().zip(b).filter(|(x, y)| x != y).count() as f64,
            CostFn::SqEuclidean => a
                .iter()
                .zip(b)
                .zip(&self.numeric)
                .map(|((&x, &y), num)| (num[x] - num[y]).powi(2))
                .sum(),
        }
    }

    pub fn indices(&self, a: usize, b: usize) -> f64 {
        self.codes(&self.schema.decode_codes(a), &self.schema.decode_codes(b))
    }
}

/// Dense non-negative cost matrix `c(source_i, target_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    entries: Array2<f64>,
}

impl CostMatrix {
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        for ((row, col), &value) in entries.indexed_iter() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidCost { row, col, value });
            }
        }
        Ok(Self { entries })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Self::new(Array2::from_shape_fn((rows, cols), |(i, j)| f(i, j)))
    }

    /// Full `d_V × d_V` matrix of a cost function over a schema.
    pub fn for_schema(schema: &Schema, kind: CostFn) -> Self {
        let all: Vec<usize> = (0..schema.joint_size()).collect();
        Self::between(schema, &all, &all, kind)
    }

    /// Cost between selected source and target joint indices.
    pub fn between(schema: &Schema, sources: &[usize], targets: &[usize], kind: CostFn) -> Self {
        let cost = TupleCost::new(schema, kind);
        let src: Vec<Vec<usize>> = sources.iter().map(|&i| schema.decode_codes(i)).collect();
        let tgt: Vec<Vec<usize>> = targets.iter().map(|&j| schema.decode_codes(j)).collect();
        Self {
            entries: Array2::from_shape_fn((sources.len(), targets.len()), |(i, j)| {
                cost.codes(&src[i], &tgt[j])
            }),
        }
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[[i, j]]
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.entries.view()
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// Sub-matrix on the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> CostMatrix {
        CostMatrix {
            entries: Array2::from_shape_fn((rows.len(), cols.len()), |(i, j)| {
                self.entries[[rows[i], cols[j]]]
            }),
        }
    }
}
