//! Rational and integral triviality of generalized Bott towers.
//!
//! A tower is Q-trivial (Z-trivial) when its cohomology ring with Q (Z)
//! coefficients is isomorphic to that of `∏ CP^{n_i}`. Q-triviality holds
//! exactly when every stage satisfies
//!
//! ```text
//! (n_i + 1)^k c_k(ξ_i) = binom(n_i + 1, k) c_1(ξ_i)^k,   k = 1..n_i+1
//! ```
//!
//! with `c_{n_i+1} = 0`. In that case `x_i + c_1(ξ_i)/(n_i+1)` has vanishing
//! `(n_i+1)`-st power, and the only integral classes with that property and
//! top stage `i` lie on the line through `(n_i+1) x_i + c_1(ξ_i)`. Those lines
//! form a triangular system, so an integral basis of such classes exists iff
//! the primitive vector on each line has unit `x_i` coefficient, i.e.
//! `n_i + 1` divides every coefficient of `c_1(ξ_i)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cohomring::{build_ring, first_chern_vector, CohomRing};
use crate::error::{Error, Result};
use crate::exactpoly::{Polynomial, Rational};
use crate::tower::{Permutation, TowerSpec};

/// Integral class `Σ b_j x_j` in `H^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Degree2Class {
    #[serde(serialize_with = "crate::serde_big::vector")]
    pub coeffs: Vec<BigInt>,
}

impl Degree2Class {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        Degree2Class { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Degree2Class {
            coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::linear(&self.coeffs)
    }

    /// gcd of the entries (0 for the zero vector).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// Largest 1-based index with a nonzero coefficient.
    pub fn top_stage(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .map(|p| p + 1)
    }

    /// Whether the two vectors span the same line (zero is parallel to nothing).
    pub fn is_parallel(&self, other: &Degree2Class) -> bool {
        if self.coeffs.len() != other.coeffs.len()
            || self.top_stage().is_none()
            || other.top_stage().is_none()
        {
            return false;
        }
        let n = self.coeffs.len();
        (0..n).all(|a| {
            (a + 1..n)
                .all(|b| &self.coeffs[a] * &other.coeffs[b] == &self.coeffs[b] * &other.coeffs[a])
        })
    }
}

impl fmt::Display for Degree2Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Primitive integral class on the line through `(n_i+1) x_i + c_1(ξ_i)`,
/// equal to `scale · (x_i + c_1(ξ_i)/(n_i+1))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorCandidate {
    pub stage: usize,
    #[serde(serialize_with = "crate::serde_big::int")]
    pub scale: BigInt,
    pub vector: Degree2Class,
}

/// Per-stage outcome of the Q-triviality test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StageDiagnostic {
    /// The relation with this `k` fails at this stage.
    Violated {
        stage: usize,
        k: usize,
    },
    Candidate(GeneratorCandidate),
}

/// Result of reordering a Q-trivial tower so that its `CP^1` stages come first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    /// Old stage `i` moves to position `permutation(i)`.
    pub permutation: Permutation,
    pub reordered: TowerSpec,
    /// Number of leading `CP^1` stages (the Bott base).
    pub base_height: usize,
    /// Fiber dimensions of the remaining stages, in order.
    pub fiber_dims: Vec<usize>,
}

impl Decomposition {
    pub fn summary(&self) -> String {
        let fiber = if self.fiber_dims.is_empty() {
            "point".to_string()
        } else {
            self.fiber_dims
                .iter()
                .map(|n| format!("CP^{n}"))
                .collect::<Vec<_>>()
                .join(" x ")
        };
        format!(
            "permutation {}; base: {}-stage Bott tower; fiber: {}",
            self.permutation, self.base_height, fiber
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrivialityReport {
    pub q_trivial: bool,
    pub z_trivial: bool,
    pub total_chern_trivial: bool,
    pub per_stage: Vec<StageDiagnostic>,
    pub decomposition: Option<Decomposition>,
}

impl TrivialityReport {
    pub fn first_violation(&self) -> Option<(usize, usize)> {
        self.per_stage.iter().find_map(|d| match d {
            StageDiagnostic::Violated { stage, k } => Some((*stage, *k)),
            StageDiagnostic::Candidate(_) => None,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "q_trivial: {}\nz_trivial: {}\ntotal_chern_trivial: {}\n",
            self.q_trivial, self.z_trivial, self.total_chern_trivial
        );
        for d in &self.per_stage {
            match d {
                StageDiagnostic::Violated { stage, k } => {
                    out.push_str(&format!("stage {stage}: relation k={k} fails\n"))
                }
                StageDiagnostic::Candidate(c) => out.push_str(&format!(
                    "stage {}: candidate {} with r={}\n",
                    c.stage, c.vector, c.scale
                )),
            }
        }
        if let Some(dec) = &self.decomposition {
            out.push_str(&format!("decomposition: {}\n", dec.summary()));
        }
        out
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// First `k` in `1..=n_i+1` for which the Chern relation fails at stage `i`.
pub fn stage_violation(ring: &CohomRing, i: usize) -> Result<Option<usize>> {
    let data = ring.chern(i)?;
    let n = data.rank();
    let c1 = data.class(1);
    let base = BigInt::from(n + 1);
    let mut c1_pow = Polynomial::one(ring.generator_count());
    for k in 1..=n + 1 {
        c1_pow = &c1_pow * &c1;
        let lhs = data
            .class(k)
            .scale(&Rational::from_integer(base.pow(k as u32)));
        let rhs = c1_pow.scale(&Rational::from_integer(binomial(n + 1, k)));
        if !ring.is_zero_class(&(&lhs - &rhs), true)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

fn q_trivial_in(ring: &CohomRing) -> Result<bool> {
    for i in 1..=ring.generator_count() {
        if stage_violation(ring, i)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Q-triviality via the Chern class relations.
pub fn is_q_trivial(t: &TowerSpec) -> bool {
    q_trivial_in(&build_ring(t)).expect("valid tower")
}

/// Per stage, the first failing `k` (or `None`).
pub fn q_trivial_diagnostics(t: &TowerSpec) -> Vec<Option<usize>> {
    let ring = build_ring(t);
    (1..=t.height())
        .map(|i| stage_violation(&ring, i).expect("stage in range"))
        .collect()
}

fn total_chern_trivial_in(ring: &CohomRing) -> Result<bool> {
    for data in ring.chern_all() {
        for k in 1..=data.rank() {
            if !ring.is_zero_class(&data.classes[k], true)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether every `c_k(ξ_i)`, `k >= 1`, vanishes in the ring.
pub fn is_total_chern_trivial(t: &TowerSpec) -> bool {
    total_chern_trivial_in(&build_ring(t)).expect("valid tower")
}

/// The primitive class on the line through `(n_i+1) x_i + c_1(ξ_i)`, with
/// positive `x_i` coefficient. Defined for every stage; its power only
/// vanishes when stage `i` passes the Chern relations.
pub fn stage_candidate(t: &TowerSpec, i: usize) -> Result<GeneratorCandidate> {
    let n1 = BigInt::from(t.stage(i)?.fiber_dim + 1);
    let mut w = first_chern_vector(t, i)?;
    w[i - 1] += &n1;
    let g = w.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let vector = Degree2Class::new(w.iter().map(|c| c / &g).collect());
    let scale = &n1 / &g;
    debug_assert!(vector.coeffs[i - 1].is_positive());
    Ok(GeneratorCandidate {
        stage: i,
        scale,
        vector,
    })
}

fn candidates_in(ring: &CohomRing) -> Result<Vec<GeneratorCandidate>> {
    let t = ring.tower();
    let mut out = Vec::with_capacity(t.height());
    for (idx, st) in t.stages().iter().enumerate() {
        let cand = stage_candidate(t, idx + 1)?;
        let power = cand.vector.to_polynomial().pow(st.fiber_dim as u32 + 1);
        if !ring.is_zero_class(&power, true)? {
            return Err(Error::Internal(format!(
                "candidate {} at stage {} has nonvanishing power",
                cand.vector,
                idx + 1
            )));
        }
        out.push(cand);
    }
    Ok(out)
}

/// One primitive generator candidate per stage. Requires Q-triviality.
pub fn generator_candidates(t: &TowerSpec) -> Result<Vec<GeneratorCandidate>> {
    let ring = build_ring(t);
    if !q_trivial_in(&ring)? {
        return Err(Error::Precondition("tower is not Q-trivial".into()));
    }
    candidates_in(&ring)
}

fn z_trivial_in(ring: &CohomRing) -> Result<bool> {
    if !q_trivial_in(ring)? {
        return Ok(false);
    }
    Ok(candidates_in(ring)?.iter().all(|c| c.scale.is_one()))
}

/// Z-triviality: Q-trivial and every candidate has scale 1, so the
/// candidates form a unitriangular change of basis of `H^2`.
pub fn is_z_trivial(t: &TowerSpec) -> bool {
    z_trivial_in(&build_ring(t)).expect("valid tower")
}

/// Bott-tower criterion: `c_1(ξ_i)^2 = 0` for every stage.
pub fn bott_q_trivial(t: &TowerSpec) -> Result<bool> {
    if let Some(pos) = t.stages().iter().position(|s| s.fiber_dim != 1) {
        return Err(Error::Precondition(format!(
            "stage {} has fiber dimension {}, not a Bott tower",
            pos + 1,
            t.stages()[pos].fiber_dim
        )));
    }
    let ring = build_ring(t);
    for data in ring.chern_all() {
        if !ring.is_zero_class(&data.class(1).pow(2), true)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks the zero-block pattern: no stage depends on a stage with `n_k > 1`.
pub fn has_q_trivial_block_form(t: &TowerSpec) -> bool {
    let dims = t.fiber_dims();
    let base = dims.iter().take_while(|&&n| n == 1).count();
    if dims[base..].contains(&1) {
        return false;
    }
    t.stages().iter().enumerate().all(|(idx, st)| {
        (1..=idx)
            .filter(|&k| dims[k - 1] > 1)
            .all(|k| st.column_is_zero(k))
    })
}

fn decompose_unchecked(t: &TowerSpec) -> Result<Decomposition> {
    let h = t.height();
    let mut cur = t.clone();
    let mut total = Permutation::identity(h);
    loop {
        let dims = cur.fiber_dims();
        let Some(pos) = (0..h.saturating_sub(1)).find(|&p| dims[p] > 1 && dims[p + 1] == 1) else {
            break;
        };
        let swap = Permutation::transposition(h, pos + 1, pos + 2)?;
        cur = cur
            .permute(&swap)
            .map_err(|e| Error::Internal(format!("adjacent swap at {} rejected: {e}", pos + 1)))?;
        total = swap.compose(&total);
    }
    if !has_q_trivial_block_form(&cur) {
        return Err(Error::Internal(format!(
            "reordered tower lacks the expected zero blocks:\n{cur}"
        )));
    }
    if t.permute(&total)? != cur {
        return Err(Error::Internal(
            "composite permutation disagrees with swaps".into(),
        ));
    }
    let dims = cur.fiber_dims();
    let base_height = dims.iter().filter(|&&n| n == 1).count();
    Ok(Decomposition {
        permutation: total,
        reordered: cur,
        base_height,
        fiber_dims: dims[base_height..].to_vec(),
    })
}

/// Moves all `CP^1` stages in front, by adjacent stage swaps, exhibiting the
/// tower as a `∏ CP^{n_i}`-bundle over a Q-trivial Bott tower.
pub fn decompose(t: &TowerSpec) -> Result<Decomposition> {
    if !is_q_trivial(t) {
        return Err(Error::Precondition("tower is not Q-trivial".into()));
    }
    decompose_unchecked(t)
}

/// All triviality flags, per-stage diagnostics and the decomposition.
pub fn full_report(t: &TowerSpec) -> Result<TrivialityReport> {
    let ring = build_ring(t);
    let mut per_stage = Vec::with_capacity(t.height());
    let mut q_trivial = true;
    for i in 1..=t.height() {
        match stage_violation(&ring, i)? {
            Some(k) => {
                q_trivial = false;
                per_stage.push(StageDiagnostic::Violated { stage: i, k });
            }
            None => per_stage.push(StageDiagnostic::Candidate(stage_candidate(t, i)?)),
        }
    }
    let total_chern_trivial = total_chern_trivial_in(&ring)?;
    let z_trivial = q_trivial
        && per_stage.iter().all(|d| match d {
            StageDiagnostic::Candidate(c) => c.scale.is_one(),
            StageDiagnostic::Violated { .. } => false,
        });
    let decomposition = if q_trivial {
        Some(decompose_unchecked(t)?)
    } else {
        None
    };
    if (z_trivial || total_chern_trivial) && !q_trivial {
        return Err(Error::Internal("triviality flags are inconsistent".into()));
    }
    Ok(TrivialityReport {
        q_trivial,
        z_trivial,
        total_chern_trivial,
        per_stage,
        decomposition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hirzebruch(a: i64) -> TowerSpec {
        TowerSpec::from_i64(&[1, 1], &[vec![vec![]], vec![vec![a]]]).unwrap()
    }

    fn b() -> TowerSpec {
        TowerSpec::parse("stage n=2\nstage n=3\n0\n0\n1").unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(4, 4), BigInt::one());
        assert_eq!(binomial(7, 0), BigInt::one());
    }

    #[test]
    fn q_triviality_examples() {
        assert!(is_q_trivial(&TowerSpec::product(&[2, 3, 1]).unwrap()));
        for a in -4..=4 {
            assert!(is_q_trivial(&hirzebruch(a)));
        }
        assert!(!is_q_trivial(&b()));
        // 16 c2 - 6 c1^2 = -6 x^2, nonzero in CP^2
        assert_eq!(q_trivial_diagnostics(&b()), vec![None, Some(2)]);
    }

    #[test]
    fn total_chern_examples() {
        assert!(is_total_chern_trivial(
            &TowerSpec::product(&[2, 2]).unwrap()
        ));
        let opp =
            TowerSpec::from_i64(&[2, 2], &[vec![vec![], vec![]], vec![vec![1], vec![-1]]]).unwrap();
        assert!(!is_total_chern_trivial(&opp));
        assert!(!is_total_chern_trivial(&hirzebruch(3)));
    }

    #[test]
    fn candidates() {
        let prod = generator_candidates(&TowerSpec::product(&[2, 1]).unwrap()).unwrap();
        assert_eq!(prod[0].vector, Degree2Class::from_i64(&[1, 0]));
        assert_eq!(prod[1].vector, Degree2Class::from_i64(&[0, 1]));
        assert!(prod.iter().all(|c| c.scale.is_one()));

        let h3 = generator_candidates(&hirzebruch(3)).unwrap();
        assert_eq!(h3[1].vector, Degree2Class::from_i64(&[3, 2]));
        assert_eq!(h3[1].scale, BigInt::from(2));

        let h4 = generator_candidates(&hirzebruch(4)).unwrap();
        assert_eq!(h4[1].vector, Degree2Class::from_i64(&[2, 1]));
        assert!(h4[1].scale.is_one());

        assert!(matches!(
            generator_candidates(&b()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn z_triviality_examples() {
        assert!(is_z_trivial(&TowerSpec::product(&[3, 1]).unwrap()));
        assert!(!is_z_trivial(&hirzebruch(3)));
        assert!(is_z_trivial(&hirzebruch(4)));
        assert!(is_z_trivial(&hirzebruch(-2)));
        assert!(!is_z_trivial(&b()));
        // height one is always trivial
        assert!(is_z_trivial(&TowerSpec::product(&[4]).unwrap()));
    }

    #[test]
    fn bott_criterion() {
        for a in -3..=3 {
            assert!(bott_q_trivial(&hirzebruch(a)).unwrap());
        }
        // c1(xi_3) = x1 + x2, c1(xi_2) = 0: (x1 + x2)^2 = 2 x1 x2
        let t = TowerSpec::from_i64(&[1, 1, 1], &[vec![vec![]], vec![vec![0]], vec![vec![1, 1]]])
            .unwrap();
        assert!(!bott_q_trivial(&t).unwrap());
        assert!(!is_q_trivial(&t));
        assert!(bott_q_trivial(&TowerSpec::product(&[1, 1, 1]).unwrap()).unwrap());
        assert!(matches!(bott_q_trivial(&b()), Err(Error::Precondition(_))));
    }

    #[test]
    fn decompose_examples() {
        // n = (2, 1) with a = 0 is the only Q-trivial choice
        assert!(!is_q_trivial(
            &TowerSpec::from_i64(&[2, 1], &[vec![vec![], vec![]], vec![vec![1]]]).unwrap()
        ));
        let t = TowerSpec::product(&[2, 1]).unwrap();
        let d = decompose(&t).unwrap();
        assert_eq!(d.permutation.images(), &[2, 1]);
        assert_eq!(d.base_height, 1);
        assert_eq!(d.fiber_dims, vec![2]);

        let d = decompose(&TowerSpec::product(&[1, 2, 1]).unwrap()).unwrap();
        assert_eq!(d.permutation.images(), &[1, 3, 2]);
        assert_eq!(d.reordered.fiber_dims(), vec![1, 1, 2]);
        assert!(d.reordered.is_block_diagonal());

        let d = decompose(&hirzebruch(3)).unwrap();
        assert!(d.permutation.is_identity());
        assert_eq!(d.base_height, 2);
        assert!(d.fiber_dims.is_empty());
        assert_eq!(d.reordered, hirzebruch(3));

        assert!(matches!(decompose(&b()), Err(Error::Precondition(_))));
    }

    #[test]
    fn decompose_moves_twisted_bott_stage() {
        // stage 3 (n=1) depends on stage 1 (n=1); stage 2 has n=2 and
        // depends on stage 1 too
        let t = TowerSpec::from_i64(
            &[1, 2, 1],
            &[vec![vec![]], vec![vec![1], vec![2]], vec![vec![3, 0]]],
        )
        .unwrap();
        assert!(is_q_trivial(&t));
        let d = decompose(&t).unwrap();
        assert_eq!(d.permutation.images(), &[1, 3, 2]);
        assert_eq!(
            d.reordered,
            TowerSpec::from_i64(
                &[1, 1, 2],
                &[vec![vec![]], vec![vec![3]], vec![vec![1, 0], vec![2, 0]]],
            )
            .unwrap()
        );
        assert!(has_q_trivial_block_form(&d.reordered));
        assert!(!has_q_trivial_block_form(&t));
    }

    #[test]
    fn reports() {
        let r = full_report(&b()).unwrap();
        assert!(!r.q_trivial && !r.z_trivial && !r.total_chern_trivial);
        assert_eq!(r.first_violation(), Some((2, 2)));
        assert!(r.decomposition.is_none());

        let r = full_report(&TowerSpec::product(&[2, 3]).unwrap()).unwrap();
        assert!(r.q_trivial && r.z_trivial && r.total_chern_trivial);

        let r = full_report(&hirzebruch(3)).unwrap();
        assert!(r.q_trivial && !r.z_trivial && !r.total_chern_trivial);
        let text = r.to_text();
        assert!(text.contains("stage 2: candidate (3,2) with r=2"), "{text}");
    }

    #[test]
    fn parallel_vectors() {
        let a = Degree2Class::from_i64(&[3, 2, 0]);
        assert!(a.is_parallel(&Degree2Class::from_i64(&[-6, -4, 0])));
        assert!(!a.is_parallel(&Degree2Class::from_i64(&[3, 1, 0])));
        assert!(!a.is_parallel(&Degree2Class::from_i64(&[0, 0, 0])));
        assert_eq!(a.top_stage(), Some(2));
        assert!(a.is_primitive());
        assert!(!Degree2Class::from_i64(&[2, 4]).is_primitive());
    }
}
