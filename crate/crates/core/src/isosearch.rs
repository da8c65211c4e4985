//! Graded ring maps between tower cohomology rings.
//!
//! Both rings are generated in degree 2, so a graded map is fixed by a
//! matrix `M`: row `j` lists the image of the source generator `x_j` in the
//! target generators. The map is well defined iff every source relation
//! vanishes after substitution, and it is an isomorphism iff additionally
//! `M` is invertible (unimodular over Z) and the Poincaré ranks agree.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::cohomring::{build_ring, poincare_ranks, CohomRing};
use crate::error::{Error, Result};
use crate::exactpoly::{Monomial, Polynomial, Rational};
use crate::tower::TowerSpec;

/// Degree-2 part of a graded ring map: `x_j ↦ Σ_i rows[j][i] X_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Degree2Map {
    rows: Vec<Vec<Rational>>,
}

impl Degree2Map {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension {
                left: n,
                right: bad.len(),
            });
        }
        Ok(Degree2Map { rows })
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| Rational::from_integer(BigInt::from(v)))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        Degree2Map {
            rows: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                Rational::one()
                            } else {
                                Rational::zero()
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn is_integral(&self) -> bool {
        self.rows.iter().flatten().all(Rational::is_integer)
    }

    /// Images of the source generators as linear polynomials.
    pub fn images(&self) -> Vec<Polynomial> {
        let n = self.size();
        self.rows
            .iter()
            .map(|row| {
                Polynomial::from_terms(
                    n,
                    row.iter()
                        .enumerate()
                        .map(|(i, c)| (Monomial::var(n, i), c.clone())),
                )
                .expect("square matrix")
            })
            .collect()
    }

    /// Exact determinant by Gaussian elimination over Q.
    pub fn determinant(&self) -> Rational {
        let mut a = self.rows.clone();
        let n = a.len();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Rational::zero();
            };
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            let p = a[col][col].clone();
            det *= &p;
            let (top, bottom) = a.split_at_mut(col + 1);
            let pivot = &top[col];
            for row in bottom {
                if row[col].is_zero() {
                    continue;
                }
                let f = &row[col] / &p;
                for (x, y) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= &f * y;
                }
            }
        }
        det
    }

    /// `other ∘ self`: first apply `self`, then `other`.
    pub fn then(&self, other: &Degree2Map) -> Result<Degree2Map> {
        let n = self.size();
        if other.size() != n {
            return Err(Error::Dimension {
                left: n,
                right: other.size(),
            });
        }
        let rows = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        (0..n).fold(Rational::zero(), |acc, i| {
                            acc + &self.rows[j][i] * &other.rows[i][k]
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(Degree2Map { rows })
    }
}

impl fmt::Display for Degree2Map {
    /// Row-major, one row per line, entries separated by spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let parts: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SearchMode {
    Sequential,
    #[default]
    Parallel,
}

fn check_sizes(m: &Degree2Map, src: &CohomRing, tgt: &CohomRing) -> Result<()> {
    if src.generator_count() != tgt.generator_count() {
        return Err(Error::Dimension {
            left: src.generator_count(),
            right: tgt.generator_count(),
        });
    }
    if m.size() != src.generator_count() {
        return Err(Error::Dimension {
            left: src.generator_count(),
            right: m.size(),
        });
    }
    Ok(())
}

/// Normal forms in the target of the substituted source relations.
pub fn relation_residues(
    m: &Degree2Map,
    src: &CohomRing,
    tgt: &CohomRing,
) -> Result<Vec<Polynomial>> {
    check_sizes(m, src, tgt)?;
    let images = m.images();
    src.relations()
        .iter()
        .map(|r| tgt.normal_form(&r.substitute(&images)?))
        .collect()
}

/// Whether `M` induces a well-defined ring map `src → tgt`.
pub fn check_hom(
    m: &Degree2Map,
    src: &CohomRing,
    tgt: &CohomRing,
    over_integers: bool,
) -> Result<bool> {
    check_sizes(m, src, tgt)?;
    if over_integers && !m.is_integral() {
        return Err(Error::Precondition(
            "integral map requested but matrix has fractional entries".into(),
        ));
    }
    let images = m.images();
    for r in src.relations() {
        if !tgt.is_zero_class(&r.substitute(&images)?, over_integers)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `M` induces a graded isomorphism. A well-defined map that is
/// bijective on `H^2` between rings generated in degree 2 with equal finite
/// ranks is an isomorphism; over Z bijectivity on `H^2` means `det = ±1`.
pub fn is_iso(
    m: &Degree2Map,
    src: &CohomRing,
    tgt: &CohomRing,
    over_integers: bool,
) -> Result<bool> {
    if !check_hom(m, src, tgt, over_integers)? {
        return Ok(false);
    }
    if poincare_ranks(src.tower()) != poincare_ranks(tgt.tower()) {
        return Ok(false);
    }
    let det = m.determinant();
    Ok(if over_integers {
        det.abs().is_one()
    } else {
        !det.is_zero()
    })
}

/// Entries tried in the order 0, 1, -1, 2, -2, ..., bound, -bound.
fn entry_values(bound: u32) -> Vec<i64> {
    let mut v = vec![0];
    for a in 1..=bound as i64 {
        v.push(a);
        v.push(-a);
    }
    v
}

fn all_rows(values: &[i64], n: usize) -> Vec<Vec<i64>> {
    let mut rows = vec![Vec::new()];
    for _ in 0..n {
        rows = rows
            .into_iter()
            .flat_map(|r| {
                values.iter().map(move |&v| {
                    let mut r = r.clone();
                    r.push(v);
                    r
                })
            })
            .collect();
    }
    rows.retain(|r| r.iter().any(|&v| v != 0));
    rows
}

/// Rank of an integer matrix (fraction-free elimination).
fn rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(piv, rank);
        let (top, bottom) = a.split_at_mut(rank + 1);
        let pivot = &top[rank];
        for row in bottom {
            if row[col].is_zero() {
                continue;
            }
            let q = row[col].clone();
            for (x, y) in row.iter_mut().zip(pivot) {
                *x = &*x * &pivot[col] - y * &q;
            }
        }
        rank += 1;
    }
    rank
}

struct Search<'a> {
    src: &'a CohomRing,
    tgt: &'a CohomRing,
    over_integers: bool,
    // candidate rows per source generator, already filtered where possible
    candidates: Vec<Vec<Vec<i64>>>,
    // whether relation i must still be checked once rows 0..=i are fixed
    deferred: Vec<bool>,
}

impl Search<'_> {
    fn relation_vanishes(&self, i: usize, rows: &[Vec<i64>]) -> bool {
        let n = self.src.generator_count();
        let images: Vec<Polynomial> = (0..n)
            .map(|j| match rows.get(j) {
                Some(r) => Polynomial::linear(r),
                None => Polynomial::zero(n),
            })
            .collect();
        let img = self.src.relations()[i]
            .substitute(&images)
            .expect("sizes checked");
        self.tgt
            .is_zero_class(&img, self.over_integers)
            .expect("sizes checked")
    }

    fn extend(&self, prefix: &mut Vec<Vec<i64>>) -> Option<Vec<Vec<i64>>> {
        let n = self.src.generator_count();
        let i = prefix.len();
        if i == n {
            if self.over_integers {
                let m = Degree2Map::from_integers(prefix).expect("square");
                if !m.determinant().abs().is_one() {
                    return None;
                }
            }
            return Some(prefix.clone());
        }
        for row in &self.candidates[i] {
            prefix.push(row.clone());
            let ok = rank(prefix) == prefix.len()
                && (!self.deferred[i] || self.relation_vanishes(i, prefix));
            if ok {
                if let Some(found) = self.extend(prefix) {
                    return Some(found);
                }
            }
            prefix.pop();
        }
        None
    }
}

/// Exhaustive search over integer matrices with entries in `[-bound, bound]`
/// for a graded isomorphism `src → tgt`. Rows are fixed in order and each
/// source relation is checked as soon as the rows it involves are known.
/// Both modes return the same (first in enumeration order) witness.
pub fn search_iso(
    src: &CohomRing,
    tgt: &CohomRing,
    over_integers: bool,
    bound: u32,
    mode: SearchMode,
) -> Option<Degree2Map> {
    let n = src.generator_count();
    if n != tgt.generator_count() || poincare_ranks(src.tower()) != poincare_ranks(tgt.tower()) {
        return None;
    }
    let rows = all_rows(&entry_values(bound), n);
    let mut search = Search {
        src,
        tgt,
        over_integers,
        candidates: Vec::with_capacity(n),
        deferred: Vec::with_capacity(n),
    };
    for (i, rel) in src.relations().iter().enumerate() {
        // relation i only involves x_1..x_{i+1}; if only x_{i+1}, filter now
        let self_contained = rel.terms().all(|(m, _)| {
            m.exponents()
                .iter()
                .enumerate()
                .all(|(j, &e)| j == i || e == 0)
        });
        search.deferred.push(!self_contained);
        search.candidates.push(Vec::new());
        if self_contained {
            let mut scratch = vec![vec![0; n]; i];
            let kept = rows
                .iter()
                .filter(|r| {
                    scratch.push((*r).clone());
                    let ok = search.relation_vanishes(i, &scratch);
                    scratch.pop();
                    ok
                })
                .cloned()
                .collect();
            search.candidates[i] = kept;
        } else {
            search.candidates[i] = rows.clone();
        }
    }
    let found = match mode {
        SearchMode::Sequential => search.extend(&mut Vec::with_capacity(n)),
        SearchMode::Parallel => search.candidates[0].par_iter().find_map_first(|first| {
            let mut prefix = Vec::with_capacity(n);
            prefix.push(first.clone());
            if rank(&prefix) != 1 || (search.deferred[0] && !search.relation_vanishes(0, &prefix)) {
                return None;
            }
            search.extend(&mut prefix)
        }),
    };
    found.map(|rows| Degree2Map::from_integers(&rows).expect("square"))
}

/// Bounded search for a Z-isomorphism from the product ring with the same
/// fiber dimensions onto the tower's ring. A hit proves Z-triviality; a miss
/// is only evidence.
pub fn z_trivial_oracle(t: &TowerSpec, bound: u32) -> bool {
    let product = TowerSpec::product(&t.fiber_dims()).expect("valid dims");
    let src = build_ring(&product);
    let tgt = build_ring(t);
    search_iso(&src, &tgt, true, bound, SearchMode::Parallel).is_some()
}
