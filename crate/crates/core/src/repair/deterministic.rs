use std::collections::BTreeMap;

use crate::dist::{CiLayout, Schema, Tuple};
use crate::error::{Error, Result};
use crate::ot::TupleCost;
use crate::repair::problem::RepairProblem;

/// Largest number of distinct tuples accepted by [`solve_deterministic_map`].
pub const MAP_SUPPORT_LIMIT: usize = 12;
/// Largest joint domain accepted by [`solve_deterministic_map`].
pub const MAP_DOMAIN_LIMIT: usize = 16;

const CI_EXACT: f64 = 1e-9;
const TIE: f64 = 1e-12;

/// Optimal tuple-to-tuple repair map.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicMap {
    /// `(source, image)` for every distinct source tuple, in domain order.
    pub map: Vec<(Tuple, Tuple)>,
    /// `Σ_rows c(v, T(v))`.
    pub total_cost: f64,
    /// `total_cost / n`, comparable with the probabilistic transport cost.
    pub mean_cost: f64,
}

impl DeterministicMap {
    pub fn image(&self, source: &Tuple) -> Option<&Tuple> {
        self.map.iter().find(|(s, _)| s == source).map(|(_, t)| t)
    }

    pub fn apply(&self, data: &[Tuple]) -> Vec<Tuple> {
        data.iter()
            .map(|t| self.image(t).cloned().unwrap_or_else(|| t.clone()))
            .collect()
    }
}

struct Search<'a> {
    counts: Vec<usize>,
    /// Per item: `(weighted cost, target)` sorted by cost then target.
    options: Vec<Vec<(f64, usize)>>,
    layout: &'a CiLayout,
    n: f64,
    load: Vec<f64>,
    choice: Vec<usize>,
    best_cost: f64,
    best: Option<Vec<usize>>,
    schema: &'a Schema,
    /// Per attribute, which codes occur in the input (when preserved).
    active: Option<Vec<Vec<bool>>>,
}

impl Search<'_> {
    fn keeps_domains(&self) -> bool {
        let Some(wanted) = &self.active else {
            return true;
        };
        let mut seen: Vec<Vec<bool>> = wanted.iter().map(|w| vec![false; w.len()]).collect();
        for (t, &load) in self.load.iter().enumerate() {
            if load > 0.0 {
                for (k, c) in self.schema.decode_codes(t).into_iter().enumerate() {
                    seen[k][c] = true;
                }
            }
        }
        seen == *wanted
    }

    fn run(&mut self, k: usize, acc: f64) {
        if k == self.counts.len() {
            let better = acc < self.best_cost - TIE
                || (acc <= self.best_cost + TIE
                    && self.best.as_ref().is_none_or(|b| self.choice < *b));
            if better {
                let mass: Vec<f64> = self.load.iter().map(|c| c / self.n).collect();
                if self.layout.violation(&mass) <= CI_EXACT && self.keeps_domains() {
                    self.best_cost = acc.min(self.best_cost);
                    self.best = Some(self.choice.clone());
                }
            }
            return;
        }
        for o in 0..self.options[k].len() {
            let (c, target) = self.options[k][o];
            if acc + c > self.best_cost + TIE {
                break;
            }
            self.choice[k] = target;
            self.load[target] += self.counts[k] as f64;
            self.run(k + 1, acc + c);
            self.load[target] -= self.counts[k] as f64;
        }
    }
}

/// Exhaustive branch-and-bound over maps `T: support → domain` such that the
/// repaired bag `T(D)` satisfies the constraint exactly.
///
/// Every copy of a tuple goes to the same image. Among equal-cost maps the
/// one whose image list (sources in domain order) is lexicographically
/// smallest wins.
pub fn solve_deterministic_map(prob: &RepairProblem) -> Result<DeterministicMap> {
    search_maps(prob, false)
}

/// Like [`solve_deterministic_map`], but only accepts maps whose output uses
/// exactly the attribute values present in the input, ruling out repairs that
/// satisfy the constraint by collapsing an attribute to a single value.
pub fn solve_deterministic_map_keeping_domains(prob: &RepairProblem) -> Result<DeterministicMap> {
    search_maps(prob, true)
}

fn search_maps(prob: &RepairProblem, keep_domains: bool) -> Result<DeterministicMap> {
    prob.validate()?;
    let schema = &prob.schema;
    let d = schema.joint_size();
    if d > MAP_DOMAIN_LIMIT {
        return Err(Error::SupportTooLarge {
            size: d,
            limit: MAP_DOMAIN_LIMIT,
        });
    }
    let mut bag: BTreeMap<usize, usize> = BTreeMap::new();
    for t in &prob.data {
        *bag.entry(schema.encode(t)?).or_default() += 1;
    }
    if bag.len() > MAP_SUPPORT_LIMIT {
        return Err(Error::SupportTooLarge {
            size: bag.len(),
            limit: MAP_SUPPORT_LIMIT,
        });
    }
    let sources: Vec<usize> = bag.keys().copied().collect();
    let counts: Vec<usize> = bag.values().copied().collect();
    let cost = TupleCost::new(schema, prob.cost);
    let layout = CiLayout::new(schema, &prob.sigma)?;

    let options: Vec<Vec<(f64, usize)>> = sources
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| {
            let mut o: Vec<(f64, usize)> =
                (0..d).map(|t| (c as f64 * cost.indices(s, t), t)).collect();
            o.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            o
        })
        .collect();

    // Collapsing the bag onto one tuple always satisfies the constraint.
    let (fallback_cost, fallback) = (0..d)
        .map(|t| {
            let c: f64 = sources
                .iter()
                .zip(&counts)
                .map(|(&s, &n)| n as f64 * cost.indices(s, t))
                .sum();
            (c, t)
        })
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
        .expect("non-empty domain");

    let active = keep_domains.then(|| {
        let mut seen: Vec<Vec<bool>> = schema.radices().iter().map(|&r| vec![false; r]).collect();
        for &src in &sources {
            for (k, c) in schema.decode_codes(src).into_iter().enumerate() {
                seen[k][c] = true;
            }
        }
        seen
    });
    let collapses = active.as_ref().is_some_and(|a| a.iter().any(|v| v.iter().filter(|&&x| x).count() > 1));
    let mut search = Search {
        n: prob.data.len() as f64,
        load: vec![0.0; d],
        choice: vec![0; sources.len()],
        best_cost: if collapses { f64::INFINITY } else { fallback_cost },
        best: (!collapses).then(|| vec![fallback; sources.len()]),
        counts,
        options,
        layout: &layout,
        schema,
        active,
    };
    search.run(0, 0.0);
    let (choice, total_cost) = match search.best {
        Some(c) => (c, search.best_cost),
        None => return Err(Error::NoFeasibleMap),
    };
    Ok(DeterministicMap {
        map: sources
            .iter()
            .zip(&choice)
            .map(|(&s, &t)| (schema.decode(s), schema.decode(t)))
            .collect(),
        mean_cost: total_cost / prob.data.len() as f64,
        total_cost,
    })
}
