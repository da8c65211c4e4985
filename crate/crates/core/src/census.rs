//! Exhaustive enumeration of towers with bounded data, for bulk checks.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::isosearch::SearchMode;
use crate::tower::{StageSpec, TowerSpec};
use crate::triviality::full_report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Filter {
    QTrivial,
    ZTrivial,
    ChernTrivial,
}

impl FromStr for Filter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" | "q_trivial" => Ok(Filter::QTrivial),
            "z" | "z_trivial" => Ok(Filter::ZTrivial),
            "chern" | "chern_trivial" => Ok(Filter::ChernTrivial),
            other => Err(Error::Precondition(format!("unknown filter '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationConfig {
    pub height: usize,
    /// Allowed fiber dimensions, tried in the given order at every stage.
    pub dims: Vec<usize>,
    pub coeff_bound: u32,
    pub filters: Vec<Filter>,
}

impl EnumerationConfig {
    pub fn new(height: usize, dims: Vec<usize>, coeff_bound: u32) -> Self {
        EnumerationConfig {
            height,
            dims,
            coeff_bound,
            filters: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Err(Error::Precondition(reason.to_string()));
        if self.height == 0 {
            return bad("height must be positive");
        }
        if self.dims.is_empty() {
            return bad("at least one fiber dimension is required");
        }
        if self.dims.contains(&0) {
            return bad("fiber dimensions must be positive");
        }
        let mut sorted = self.dims.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.dims.len() {
            return bad("fiber dimensions must be distinct");
        }
        Ok(())
    }

    /// Number of towers the enumeration visits.
    pub fn expected_count(&self) -> u128 {
        let width = 2 * self.coeff_bound as u128 + 1;
        // count[d] = number of (dims, coeffs) prefixes whose dims sum to d
        let mut by_total: BTreeMap<usize, u128> = BTreeMap::from([(0, 1)]);
        for i in 1..=self.height {
            let mut next = BTreeMap::new();
            for (&sum, &count) in &by_total {
                for &n in &self.dims {
                    let cells = (n * (i - 1)) as u32;
                    *next.entry(sum + n).or_insert(0) += count * width.pow(cells);
                }
            }
            by_total = next;
        }
        by_total.values().sum()
    }

    /// All towers, dims tuples in lexicographic order of `dims`, then
    /// coefficients row-major from stage 2 on, each running `-C..=C`.
    pub fn towers(&self) -> impl Iterator<Item = TowerSpec> + '_ {
        dim_tuples(&self.dims, self.height)
            .into_iter()
            .flat_map(move |dims| coefficient_towers(dims, self.coeff_bound))
    }
}

fn dim_tuples(dims: &[usize], height: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..height {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                dims.iter().map(move |&n| {
                    let mut p = prefix.clone();
                    p.push(n);
                    p
                })
            })
            .collect();
    }
    out
}

fn coefficient_towers(dims: Vec<usize>, bound: u32) -> impl Iterator<Item = TowerSpec> {
    let cells: usize = dims.iter().enumerate().map(|(idx, &n)| n * idx).sum();
    let b = bound as i64;
    let mut digits = vec![-b; cells];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mut it = digits.iter();
        let stages = dims
            .iter()
            .enumerate()
            .map(|(idx, &n)| {
                let coeffs = (0..n)
                    .map(|_| {
                        (0..idx)
                            .map(|_| BigInt::from(*it.next().unwrap()))
                            .collect()
                    })
                    .collect();
                StageSpec::new(n, coeffs)
            })
            .collect();
        let tower = TowerSpec::new(stages).expect("well-formed by construction");
        // odometer, last cell fastest
        done = true;
        for d in digits.iter_mut().rev() {
            if *d < b {
                *d += 1;
                done = false;
                break;
            }
            *d = -b;
        }
        Some(tower)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusRecord {
    pub tower: TowerSpec,
    pub q_trivial: bool,
    pub z_trivial: bool,
    pub chern_trivial: bool,
}

impl CensusRecord {
    pub fn passes(&self, filters: &[Filter]) -> bool {
        filters.iter().all(|f| match f {
            Filter::QTrivial => self.q_trivial,
            Filter::ZTrivial => self.z_trivial,
            Filter::ChernTrivial => self.chern_trivial,
        })
    }
}

impl fmt::Display for CensusRecord {
    /// `dims=2,3 AT=1,0;1,0;0,1;0,1;1,1 q=false z=false chern=false`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self
            .tower
            .fiber_dims()
            .iter()
            .map(ToString::to_string)
            .collect();
        let rows: Vec<String> = self
            .tower
            .vector_matrix_transpose()
            .iter()
            .map(|r| {
                r.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(
            f,
            "dims={} AT={} q={} z={} chern={}",
            dims.join(","),
            rows.join(";"),
            self.q_trivial,
            self.z_trivial,
            self.chern_trivial
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Census {
    /// Records passing the filters, in enumeration order.
    pub records: Vec<CensusRecord>,
    pub total: usize,
    /// Counts over all towers keyed by `(q, z, chern)`.
    pub summary: BTreeMap<(bool, bool, bool), usize>,
}

impl Census {
    pub fn summary_table(&self) -> String {
        let mut out = String::from("q_trivial z_trivial chern_trivial count\n");
        for (&(q, z, c), &n) in &self.summary {
            out.push_str(&format!("{q:<9} {z:<9} {c:<13} {n}\n"));
        }
        out.push_str(&format!("total {}\n", self.total));
        out
    }
}

pub fn classify(t: &TowerSpec) -> CensusRecord {
    let report = full_report(t).expect("valid tower");
    CensusRecord {
        tower: t.clone(),
        q_trivial: report.q_trivial,
        z_trivial: report.z_trivial,
        chern_trivial: report.total_chern_trivial,
    }
}

/// Classifies every tower of the configuration. Output order is the
/// enumeration order in both modes.
pub fn run_census(config: &EnumerationConfig, mode: SearchMode) -> Result<Census> {
    config.validate()?;
    let towers: Vec<TowerSpec> = config.towers().collect();
    let records: Vec<CensusRecord> = match mode {
        SearchMode::Sequential => towers.iter().map(classify).collect(),
        SearchMode::Parallel => towers.par_iter().map(classify).collect(),
    };
    let mut summary = BTreeMap::new();
    for r in &records {
        *summary
            .entry((r.q_trivial, r.z_trivial, r.chern_trivial))
            .or_insert(0) += 1;
    }
    let total = records.len();
    let records = records
        .into_iter()
        .filter(|r| r.passes(&config.filters))
        .collect();
    Ok(Census {
        records,
        total,
        summary,
    })
}
