//! Cohomology ring of a generalized Bott tower.
//!
//! `H*(B_h) = Z[x_1..x_h] / <r_1..r_h>` with
//! `r_i = x_i · ∏_j (x_i + Σ_k a^i_{jk} x_k)`. Expanding the product gives
//! `r_i = x_i^{n_i+1} + c_1(ξ_i) x_i^{n_i} + ... + c_{n_i}(ξ_i) x_i`, where the
//! `c_k(ξ_i)` only involve `x_1..x_{i-1}`. That makes the relations a
//! triangular rewriting system: reducing `x_h` first, then `x_{h-1}` and so
//! on never brings back a high power of an already reduced generator. The
//! result is supported on the monomial basis `{x^e : e_i <= n_i}`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::Result;
use crate::exactpoly::{Monomial, Polynomial};
use crate::tower::TowerSpec;

/// Chern classes `c_0..c_{n_i}` of the stage bundle `ξ_i`, as polynomials in
/// all `h` generators (only `x_1..x_{i-1}` occur).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernData {
    pub stage: usize,
    pub classes: Vec<Polynomial>,
}

impl ChernData {
    /// `c_k`, zero above the rank.
    pub fn class(&self, k: usize) -> Polynomial {
        self.classes
            .get(k)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.classes[0].generator_count()))
    }

    pub fn rank(&self) -> usize {
        self.classes.len() - 1
    }

    /// Total Chern class `1 + c_1 + ... + c_n`.
    pub fn total(&self) -> Polynomial {
        let mut sum = Polynomial::zero(self.classes[0].generator_count());
        for c in &self.classes {
            sum = &sum + c;
        }
        sum
    }
}

/// The linear forms `ℓ_j = Σ_k a^i_{jk} x_k` whose product is `c(ξ_i)`.
pub fn line_bundle_classes(t: &TowerSpec, i: usize) -> Result<Vec<Polynomial>> {
    let h = t.height();
    let stage = t.stage(i)?;
    Ok(stage
        .coeffs
        .iter()
        .map(|row| {
            let mut full: Vec<BigInt> = row.clone();
            full.resize(h, BigInt::zero());
            Polynomial::linear(&full)
        })
        .collect())
}

/// First Chern class coefficients of `ξ_i`: column sums of the stage matrix,
/// padded to length `h`.
pub fn first_chern_vector(t: &TowerSpec, i: usize) -> Result<Vec<BigInt>> {
    let stage = t.stage(i)?;
    let mut out = vec![BigInt::zero(); t.height()];
    for row in &stage.coeffs {
        for (k, a) in row.iter().enumerate() {
            out[k] += a;
        }
    }
    Ok(out)
}

/// `c_k(ξ_i)` as the elementary symmetric polynomials of the line classes.
pub fn chern_classes(t: &TowerSpec, i: usize) -> Result<ChernData> {
    let h = t.height();
    let lines = line_bundle_classes(t, i)?;
    let n = lines.len();
    let mut e = vec![Polynomial::zero(h); n + 1];
    e[0] = Polynomial::one(h);
    for (count, l) in lines.iter().enumerate() {
        for k in (1..=count + 1).rev() {
            let term = &e[k - 1] * l;
            e[k] = &e[k] + &term;
        }
    }
    Ok(ChernData {
        stage: i,
        classes: e,
    })
}

/// Presentation of `H*(B_h; Z)` with a normal-form reducer.
#[derive(Debug)]
pub struct CohomRing {
    tower: TowerSpec,
    chern: Vec<ChernData>,
    relations: Vec<Polynomial>,
    // x_i^{n_i+1} is congruent to tails[i-1]
    tails: Vec<Polynomial>,
    basis: OnceLock<Vec<Monomial>>,
}

impl Clone for CohomRing {
    fn clone(&self) -> Self {
        CohomRing {
            tower: self.tower.clone(),
            chern: self.chern.clone(),
            relations: self.relations.clone(),
            tails: self.tails.clone(),
            basis: OnceLock::new(),
        }
    }
}

/// Relation `x_i ∏_j (ℓ_j + x_i)` in product form.
pub fn product_relation(t: &TowerSpec, i: usize) -> Result<Polynomial> {
    let h = t.height();
    let x = Polynomial::var(h, i - 1);
    let mut r = x.clone();
    for l in line_bundle_classes(t, i)? {
        r = &r * &(&l + &x);
    }
    Ok(r)
}

impl CohomRing {
    pub fn new(tower: &TowerSpec) -> Self {
        build_ring(tower)
    }

    pub fn tower(&self) -> &TowerSpec {
        &self.tower
    }

    pub fn generator_count(&self) -> usize {
        self.tower.height()
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }

    /// Chern data of stage `i` (1-based).
    pub fn chern(&self, i: usize) -> Result<&ChernData> {
        self.tower.stage(i)?;
        Ok(&self.chern[i - 1])
    }

    pub fn chern_all(&self) -> &[ChernData] {
        &self.chern
    }

    /// Relation `i` written as `Σ_k c_k(ξ_i) x_i^{n_i+1-k}`.
    pub fn chern_form_relation(&self, i: usize) -> Result<Polynomial> {
        let data = self.chern(i)?;
        let h = self.generator_count();
        let x = Polynomial::var(h, i - 1);
        let n = data.rank() as u32;
        let mut r = Polynomial::zero(h);
        for (k, c) in data.classes.iter().enumerate() {
            r = &r + &(c * &x.pow(n + 1 - k as u32));
        }
        Ok(r)
    }

    /// Monomials `x^e` with `0 <= e_i <= n_i`, a Z-basis of the ring.
    pub fn basis(&self) -> &[Monomial] {
        self.basis.get_or_init(|| {
            let dims = self.tower.fiber_dims();
            let mut out = vec![Monomial::one(0)];
            for &n in &dims {
                let mut next = Vec::with_capacity(out.len() * (n + 1));
                for m in &out {
                    for e in 0..=n as u32 {
                        let mut exps = m.exponents().to_vec();
                        exps.push(e);
                        next.push(Monomial::from_exponents(exps));
                    }
                }
                out = next;
            }
            out
        })
    }

    fn in_basis(&self, m: &Monomial) -> bool {
        m.exponents()
            .iter()
            .zip(self.tower.stages())
            .all(|(&e, s)| e as usize <= s.fiber_dim)
    }

    /// Unique representative of `p` supported on the monomial basis.
    pub fn normal_form(&self, p: &Polynomial) -> Result<Polynomial> {
        let h = self.generator_count();
        let mut cur = if p.generator_count() == h {
            p.clone()
        } else {
            p.embed(h)?
        };
        for (idx, stage) in self.tower.stages().iter().enumerate().rev() {
            let top = stage.fiber_dim as u32 + 1;
            let tail = &self.tails[idx];
            loop {
                let (high, low): (Vec<_>, Vec<_>) =
                    cur.terms().partition(|(m, _)| m.exponent(idx) >= top);
                if high.is_empty() {
                    break;
                }
                let mut next = Polynomial::from_terms(
                    h,
                    low.into_iter().map(|(m, c)| (m.clone(), c.clone())),
                )?;
                for (m, c) in high {
                    let rest = m.with_exponent(idx, m.exponent(idx) - top);
                    for (tm, tc) in tail.terms() {
                        next.add_term(tm.mul(&rest), c * tc);
                    }
                }
                cur = next;
            }
        }
        debug_assert!(cur.terms().all(|(m, _)| self.in_basis(m)));
        Ok(cur)
    }

    /// Whether `p` vanishes in the ring. The ring is a free module on the
    /// monomial basis, so vanishing over Q and over Z agree for integral
    /// input; `over_integers` only turns on an integrality check of the
    /// reduction in debug builds.
    pub fn is_zero_class(&self, p: &Polynomial, over_integers: bool) -> Result<bool> {
        let nf = self.normal_form(p)?;
        if over_integers && p.is_integral() {
            debug_assert!(nf.is_integral(), "integral input reduced to {nf}");
        }
        Ok(nf.is_zero())
    }

    /// Number of basis monomials in each degree `2d`, `d = 0..Σn_i`.
    pub fn basis_ranks(&self) -> Vec<u64> {
        let top: usize = self.tower.fiber_dims().iter().sum();
        let mut ranks = vec![0u64; top + 1];
        for m in self.basis() {
            ranks[m.total_degree() as usize] += 1;
        }
        ranks
    }

    /// Human-readable presentation: generators, relations and ranks.
    pub fn report(&self, names: &[impl AsRef<str>]) -> String {
        let gens: Vec<String> = names
            .iter()
            .take(self.generator_count())
            .map(|n| format!("{} (deg 2)", n.as_ref()))
            .collect();
        let rels: Vec<String> = self
            .relations
            .iter()
            .map(|r| r.to_string_with(names))
            .collect();
        let ranks: Vec<String> = poincare_ranks(&self.tower)
            .iter()
            .map(ToString::to_string)
            .collect();
        format!(
            "generators: {}\nrelations: {}\npoincare ranks: {}\n",
            gens.join(", "),
            rels.join(", "),
            ranks.join(" ")
        )
    }
}

pub fn build_ring(t: &TowerSpec) -> CohomRing {
    let h = t.height();
    let mut chern = Vec::with_capacity(h);
    let mut relations = Vec::with_capacity(h);
    let mut tails = Vec::with_capacity(h);
    for i in 1..=h {
        let data = chern_classes(t, i).expect("stage in range");
        let n = data.rank() as u32;
        let x = Polynomial::var(h, i - 1);
        let mut tail = Polynomial::zero(h);
        for k in 1..=n {
            let term = &data.classes[k as usize] * &x.pow(n + 1 - k);
            tail = &tail - &term;
        }
        relations.push(product_relation(t, i).expect("stage in range"));
        tails.push(tail);
        chern.push(data);
    }
    CohomRing {
        tower: t.clone(),
        chern,
        relations,
        tails,
        basis: OnceLock::new(),
    }
}

/// Ranks of `H^{2d}` for `d = 0..Σn_i`: coefficients of `∏ (1 + t + ... + t^{n_i})`.
pub fn poincare_ranks(t: &TowerSpec) -> Vec<u64> {
    let mut coeffs = vec![1u64];
    for n in t.fiber_dims() {
        let mut next = vec![0u64; coeffs.len() + n];
        for (d, &c) in coeffs.iter().enumerate() {
            for slot in &mut next[d..=d + n] {
                *slot += c;
            }
        }
        coeffs = next;
    }
    coeffs
}

/// `Σ b_j x_j` as a polynomial in `h` generators.
pub fn degree_two(coeffs: &[BigInt]) -> Polynomial {
    Polynomial::linear(coeffs)
}
