use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::{Schema, Tuple};
use crate::error::{Error, Result};

/// Domain value written into masked cells.
pub const MISSING: &str = "MISSING";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptionKind {
    /// Replace the target with a different value, driven by other attributes.
    Noise,
    /// Mask the target depending on other attributes.
    Mar,
    /// Mask the target depending on its own value and other attributes.
    Mnar,
}

impl FromStr for CorruptionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "noise" | "attribute_noise" => Ok(CorruptionKind::Noise),
            "mar" => Ok(CorruptionKind::Mar),
            "mnar" => Ok(CorruptionKind::Mnar),
            other => Err(Error::InvalidConfig(format!("unknown corruption kind `{other}`"))),
        }
    }
}

impl fmt::Display for CorruptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorruptionKind::Noise => "noise",
            CorruptionKind::Mar => "mar",
            CorruptionKind::Mnar => "mnar",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    pub target: String,
    pub drivers: Vec<String>,
    pub rate: f64,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn validate(&self, schema: &Schema) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rate) {
            return Err(Error::InvalidConfig(format!("rate must be in [0, 1], got {}", self.rate)));
        }
        schema.attribute(&self.target)?;
        for d in &self.drivers {
            schema.attribute(d)?;
            if *d == self.target {
                return Err(Error::OverlappingAttributes(d.clone()));
            }
        }
        Ok(())
    }
}

/// Multiplier for one driver code: 1 for the first domain value, 2 otherwise.
fn weight(code: usize) -> f64 {
    if code == 0 {
        1.0
    } else {
        2.0
    }
}

/// Mean multiplier over the given codes (1 when there are none).
pub fn multiplier(codes: &[usize]) -> f64 {
    if codes.is_empty() {
        return 1.0;
    }
    codes.iter().map(|&c| weight(c)).sum::<f64>() / codes.len() as f64
}

/// Corrupts the target attribute row by row with probability
/// `min(1, rate · g)`, where `g` is the mean multiplier of the driver codes
/// (plus the target's own code for MNAR).
///
/// Returns the corrupted rows and their schema; missingness kinds extend the
/// target domain with [`MISSING`].
pub fn inject_corruption(data: &[Tuple], spec: &CorruptionSpec, schema: &Schema) -> Result<(Vec<Tuple>, Schema)> {
    spec.validate(schema)?;
    let target = schema.position(&spec.target).expect("validated");
    let drivers = schema.positions(&spec.drivers)?;
    let attr = &schema.attributes()[target];
    let out_schema = match spec.kind {
        CorruptionKind::Noise => schema.clone(),
        _ => schema.with_attribute(target, attr.with_value(MISSING)),
    };
    let domain: Vec<&String> = attr.domain().iter().filter(|v| v.as_str() != MISSING).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(data.len());
    for row in data {
        let codes = schema.codes(row)?;
        let mut driving: Vec<usize> = drivers.iter().map(|&k| codes[k]).collect();
        if spec.kind == CorruptionKind::Mnar {
            driving.push(codes[target]);
        }
        let p = (spec.rate * multiplier(&driving)).min(1.0);
        let hit = rng.gen::<f64>() < p;
        let mut values = row.values().to_vec();
        if hit {
            match spec.kind {
                CorruptionKind::Noise => {
                    let current = &values[target];
                    let others: Vec<&&String> = domain.iter().filter(|v| **v != current).collect();
                    if !others.is_empty() {
                        values[target] = others[rng.gen_range(0..others.len())].to_string();
                    }
                }
                CorruptionKind::Mar | CorruptionKind::Mnar => values[target] = MISSING.to_string(),
            }
        }
        out.push(Tuple(values));
    }
    Ok((out, out_schema))
}
