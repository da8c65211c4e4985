//! Generalized Bott towers as integer vector matrices.
//!
//! Stage `i` (1-based) of a tower of height `h` is `P(C ⊕ ξ_i)` over the
//! previous stage, where `ξ_i` is a sum of `n_i` line bundles. The line
//! bundle in slot `j` is the tensor product of the pulled-back tautological
//! bundles of stages `k < i` raised to the integer powers `a^i_{jk}`. A
//! [`StageSpec`] stores those exponents as an `n_i × (i-1)` matrix.
//!
//! Text format, one header per stage followed by its coefficient rows:
//!
//! ```text
//! stage n=2
//! stage n=3
//! 0
//! 0
//! 2
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// One stage: fiber dimension `n_i` and the `n_i × (i-1)` exponent matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StageSpec {
    pub fiber_dim: usize,
    #[serde(serialize_with = "crate::serde_big::matrix")]
    pub coeffs: Vec<Vec<BigInt>>,
}

impl StageSpec {
    pub fn new(fiber_dim: usize, coeffs: Vec<Vec<BigInt>>) -> Self {
        StageSpec { fiber_dim, coeffs }
    }

    /// Stage at 1-based position `index` with all exponents zero.
    pub fn trivial(index: usize, fiber_dim: usize) -> Self {
        StageSpec {
            fiber_dim,
            coeffs: vec![vec![BigInt::zero(); index - 1]; fiber_dim],
        }
    }

    /// Column `k` (1-based), the vector `a^i_k`.
    pub fn column(&self, k: usize) -> impl Iterator<Item = &BigInt> + '_ {
        self.coeffs.iter().map(move |row| &row[k - 1])
    }

    pub fn column_is_zero(&self, k: usize) -> bool {
        self.column(k).all(Zero::is_zero)
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().flatten().all(Zero::is_zero)
    }
}

/// A validated generalized Bott tower.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TowerSpec {
    stages: Vec<StageSpec>,
}

/// Checks the shape invariants of a list of stages.
pub fn validate(stages: &[StageSpec]) -> Result<()> {
    if stages.is_empty() {
        return Err(Error::Validation {
            stage: 0,
            reason: "a tower needs at least one stage".into(),
        });
    }
    for (idx, st) in stages.iter().enumerate() {
        let i = idx + 1;
        if st.fiber_dim == 0 {
            return Err(Error::Validation {
                stage: i,
                reason: "fiber dimension must be positive".into(),
            });
        }
        if st.coeffs.len() != st.fiber_dim {
            return Err(Error::Validation {
                stage: i,
                reason: format!(
                    "expected {} coefficient rows, found {}",
                    st.fiber_dim,
                    st.coeffs.len()
                ),
            });
        }
        if let Some((j, row)) = st.coeffs.iter().enumerate().find(|(_, r)| r.len() != i - 1) {
            return Err(Error::Validation {
                stage: i,
                reason: format!(
                    "row {} has {} entries, expected {}",
                    j + 1,
                    row.len(),
                    i - 1
                ),
            });
        }
    }
    Ok(())
}

impl TowerSpec {
    pub fn new(stages: Vec<StageSpec>) -> Result<Self> {
        validate(&stages)?;
        Ok(TowerSpec { stages })
    }

    /// Convenience constructor from machine integers. `coeffs[i]` holds the
    /// rows of stage `i + 1`.
    pub fn from_i64(dims: &[usize], coeffs: &[Vec<Vec<i64>>]) -> Result<Self> {
        if dims.len() != coeffs.len() {
            return Err(Error::Validation {
                stage: dims.len().min(coeffs.len()) + 1,
                reason: "dimension list and coefficient list differ in length".into(),
            });
        }
        let stages = dims
            .iter()
            .zip(coeffs)
            .map(|(&n, rows)| StageSpec {
                fiber_dim: n,
                coeffs: rows
                    .iter()
                    .map(|r| r.iter().map(|&a| BigInt::from(a)).collect())
                    .collect(),
            })
            .collect();
        Self::new(stages)
    }

    /// The product `CP^{n_1} × ... × CP^{n_h}`.
    pub fn product(dims: &[usize]) -> Result<Self> {
        Self::new(
            dims.iter()
                .enumerate()
                .map(|(idx, &n)| StageSpec::trivial(idx + 1, n))
                .collect(),
        )
    }

    pub fn height(&self) -> usize {
        self.stages.len()
    }

    pub fn stages(&self) -> &[StageSpec] {
        &self.stages
    }

    /// Stage `i`, 1-based.
    pub fn stage(&self, i: usize) -> Result<&StageSpec> {
        if i == 0 || i > self.stages.len() {
            return Err(Error::StageOutOfRange {
                index: i,
                height: self.stages.len(),
            });
        }
        Ok(&self.stages[i - 1])
    }

    pub fn fiber_dims(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.fiber_dim).collect()
    }

    pub fn is_bott(&self) -> bool {
        self.stages.iter().all(|s| s.fiber_dim == 1)
    }

    /// True iff every exponent vanishes, i.e. the vector matrix is block diagonal.
    pub fn is_block_diagonal(&self) -> bool {
        self.stages.iter().all(StageSpec::is_trivial)
    }

    /// `A^T`: a `(sum n_i) × h` matrix whose block row `i` has `a^i_k` in
    /// column `k < i`, all ones in column `i` and zeros after.
    pub fn vector_matrix_transpose(&self) -> Vec<Vec<BigInt>> {
        let h = self.height();
        let mut rows = Vec::new();
        for st in &self.stages {
            for r in &st.coeffs {
                let mut row = r.clone();
                row.push(BigInt::one());
                row.resize(h, BigInt::zero());
                rows.push(row);
            }
        }
        rows
    }

    /// Inverse of [`vector_matrix_transpose`](Self::vector_matrix_transpose).
    /// Block boundaries are recovered from the position of the unit entry
    /// closing each row.
    pub fn from_vector_matrix_transpose(matrix: &[Vec<BigInt>]) -> Result<Self> {
        let h = matrix.first().map_or(0, Vec::len);
        let mut stages = vec![
            StageSpec {
                fiber_dim: 0,
                coeffs: Vec::new(),
            };
            h
        ];
        let mut last_block = 0;
        for (r, row) in matrix.iter().enumerate() {
            let bad = |reason: &str| Error::Validation {
                stage: last_block.max(1),
                reason: format!("matrix row {}: {reason}", r + 1),
            };
            if row.len() != h {
                return Err(bad("ragged matrix"));
            }
            let Some(pos) = row.iter().rposition(|v| !v.is_zero()) else {
                return Err(bad("zero row"));
            };
            if !row[pos].is_one() {
                return Err(bad("diagonal entry must be 1"));
            }
            let block = pos + 1;
            if block < last_block {
                return Err(bad("rows are not in block order"));
            }
            last_block = block;
            stages[pos].fiber_dim += 1;
            stages[pos].coeffs.push(row[..pos].to_vec());
        }
        Self::new(stages)
    }

    /// `Λ_* = -A^T`, the reduced characteristic matrix of the tower viewed as
    /// a quasitoric manifold over a product of simplices.
    pub fn reduced_characteristic_matrix(&self) -> Vec<Vec<BigInt>> {
        self.vector_matrix_transpose()
            .into_iter()
            .map(|row| row.into_iter().map(|v| -v).collect())
            .collect()
    }

    /// Conjugates the vector matrix by the block permutation of `perm`:
    /// old stage `i` becomes stage `perm(i)`.
    pub fn permute(&self, perm: &Permutation) -> Result<TowerSpec> {
        let h = self.height();
        if perm.len() != h {
            return Err(Error::Dimension {
                left: h,
                right: perm.len(),
            });
        }
        for (idx, st) in self.stages.iter().enumerate() {
            let i = idx + 1;
            for k in 1..i {
                if !st.column_is_zero(k) && perm.apply(k) > perm.apply(i) {
                    return Err(Error::InadmissiblePermutation {
                        images: perm.images().to_vec(),
                        stage: perm.apply(i),
                        depends_on: perm.apply(k),
                    });
                }
            }
        }
        let inv = perm.inverse();
        let stages = (1..=h)
            .map(|p| {
                let i = inv.apply(p);
                let old = &self.stages[i - 1];
                let coeffs = old
                    .coeffs
                    .iter()
                    .map(|row| {
                        (1..p)
                            .map(|q| {
                                let k = inv.apply(q);
                                if k < i {
                                    row[k - 1].clone()
                                } else {
                                    BigInt::zero()
                                }
                            })
                            .collect()
                    })
                    .collect();
                StageSpec {
                    fiber_dim: old.fiber_dim,
                    coeffs,
                }
            })
            .collect();
        TowerSpec::new(stages)
    }

    pub fn parse(text: &str) -> Result<TowerSpec> {
        parse_tower(text)
    }

    pub fn to_text(&self) -> String {
        serialize_tower(self)
    }
}

impl fmt::Display for TowerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_tower(self))
    }
}

/// Bijection of `{1..h}` stored as its list of images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// `images[i-1]` is the image of `i`; must be a permutation of `1..=h`.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let h = images.len();
        let mut seen = vec![false; h];
        for &v in &images {
            if v == 0 || v > h || seen[v - 1] {
                return Err(Error::InvalidPermutation(images));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(h: usize) -> Self {
        Permutation {
            images: (1..=h).collect(),
        }
    }

    /// Swaps `a` and `b` (1-based).
    pub fn transposition(h: usize, a: usize, b: usize) -> Result<Self> {
        let mut images: Vec<usize> = (1..=h).collect();
        if a == 0 || b == 0 || a > h || b > h {
            return Err(Error::InvalidPermutation(vec![a, b]));
        }
        images.swap(a - 1, b - 1);
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (idx, &v) in self.images.iter().enumerate() {
            inv[v - 1] = idx + 1;
        }
        Permutation { images: inv }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Permutation) -> Permutation {
        Permutation {
            images: first.images.iter().map(|&i| self.apply(i)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| v == i + 1)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Parses the tower text format. Errors carry 1-based line numbers.
pub fn parse_tower(text: &str) -> Result<TowerSpec> {
    let mut stages: Vec<StageSpec> = Vec::new();
    // rows still owed by the current stage
    let mut pending = 0usize;
    let mut last_line = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |reason: String| Error::Syntax {
            line: line_no,
            reason,
        };
        if line.starts_with("stage") {
            if pending > 0 {
                return Err(syntax(format!(
                    "stage {} is missing {pending} coefficient row(s)",
                    stages.len()
                )));
            }
            let mut toks = line.split_whitespace();
            let head = toks.next();
            let dim = toks.next();
            if head != Some("stage") || toks.next().is_some() {
                return Err(syntax("expected header 'stage n=<int>'".into()));
            }
            let n: usize = dim
                .and_then(|d| d.strip_prefix("n="))
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| syntax("expected header 'stage n=<int>'".into()))?;
            if n == 0 {
                return Err(syntax("fiber dimension must be positive".into()));
            }
            let index = stages.len() + 1;
            stages.push(StageSpec {
                fiber_dim: n,
                coeffs: Vec::with_capacity(n),
            });
            pending = if index == 1 { 0 } else { n };
            continue;
        }
        let index = stages.len();
        let Some(stage) = stages.last_mut() else {
            return Err(syntax(
                "coefficient row before the first stage header".into(),
            ));
        };
        if pending == 0 {
            return Err(syntax(format!(
                "unexpected coefficient row: stage {index} already has {} row(s)",
                stage.fiber_dim
            )));
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<BigInt>()
                    .map_err(|_| syntax(format!("'{tok}' is not an integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != index - 1 {
            return Err(syntax(format!(
                "stage {index} rows need {} integer(s), found {}",
                index - 1,
                row.len()
            )));
        }
        stage.coeffs.push(row);
        pending -= 1;
    }
    if pending > 0 {
        return Err(Error::Syntax {
            line: last_line + 1,
            reason: format!(
                "unexpected end of input: stage {} is missing {pending} coefficient row(s)",
                stages.len()
            ),
        });
    }
    if stages.is_empty() {
        return Err(Error::Syntax {
            line: last_line.max(1),
            reason: "no stages".into(),
        });
    }
    // stage 1 carries n_1 empty rows in memory
    stages[0].coeffs = vec![Vec::new(); stages[0].fiber_dim];
    TowerSpec::new(stages)
}

pub fn serialize_tower(t: &TowerSpec) -> String {
    let mut out = String::new();
    for (idx, st) in t.stages.iter().enumerate() {
        out.push_str(&format!("stage n={}\n", st.fiber_dim));
        if idx == 0 {
            continue;
        }
        for row in &st.coeffs {
            let parts: Vec<String> = row.iter().map(ToString::to_string).collect();
            out.push_str(&parts.join(" "));
            out.push('\n');
        }
    }
    out
}
