use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One of the two protected groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    A,
    B,
}

impl Group {
    pub fn other(self) -> Group {
        match self {
            Group::A => Group::B,
            Group::B => Group::A,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::A => "a",
            Group::B => "b",
        }
    }
}

impl FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" | "A" => Ok(Group::A),
            "b" | "B" => Ok(Group::B),
            other => Err(Error::InvalidConfig(format!("group must be `a` or `b`, got `{other}`"))),
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A scored record pair with its group and ground-truth match label.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub id: String,
    pub score: f64,
    pub group: Group,
    pub label: bool,
}

impl ScoreRecord {
    pub fn new(id: impl Into<String>, score: f64, group: Group, label: bool) -> Self {
        Self {
            id: id.into(),
            score,
            group,
            label,
        }
    }
}

/// Validated collection of scored records with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    records: Vec<ScoreRecord>,
}

impl ScoreTable {
    pub fn new(records: Vec<ScoreRecord>) -> Result<Self> {
        let mut ids = HashSet::with_capacity(records.len());
        for r in &records {
            if !(0.0..=1.0).contains(&r.score) {
                return Err(Error::ScoreOutOfRange(r.score));
            }
            if !ids.insert(r.id.as_str()) {
                return Err(Error::IdMismatch(format!("duplicate id `{}`", r.id)));
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[ScoreRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count(&self, group: Group) -> usize {
        self.records.iter().filter(|r| r.group == group).count()
    }

    /// Scores of one group, optionally restricted to one label.
    pub fn scores(&self, group: Option<Group>, label: Option<bool>) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| group.is_none_or(|g| r.group == g))
            .filter(|r| label.is_none_or(|l| r.label == l))
            .map(|r| r.score)
            .collect()
    }

    /// Same records with scores replaced in order. Scores are clamped to
    /// `[0, 1]`.
    pub fn with_scores(&self, scores: &[f64]) -> Result<ScoreTable> {
        if scores.len() != self.records.len() {
            return Err(Error::IdMismatch(format!(
                "{} scores for {} records",
                scores.len(),
                self.records.len()
            )));
        }
        Ok(ScoreTable {
            records: self
                .records
                .iter()
                .zip(scores)
                .map(|(r, &s)| ScoreRecord {
                    score: s.clamp(0.0, 1.0),
                    ..r.clone()
                })
                .collect(),
        })
    }
}
