//! Exact multivariate polynomials with rational coefficients.
//!
//! A [`Polynomial`] lives in `Q[x_1, ..., x_n]` for a fixed generator count
//! `n`. Every generator has cohomological degree 2. Terms are kept in a
//! canonical map with no zero coefficients, so structural equality is
//! equality of polynomials.
//!
//! The text form lists terms by descending total degree, breaking ties by
//! the exponent of the highest-index generator first, then the next one
//! down. With generators `x, y` this prints the relation of a projective
//! bundle as `y^4 + x*y^3`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always stored in lowest terms.
pub type Rational = BigRational;

/// Exponent vector, one slot per generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(generators: usize) -> Self {
        Monomial(vec![0; generators])
    }

    pub fn var(generators: usize, index: usize) -> Self {
        let mut e = vec![0; generators];
        e[index] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn generator_count(&self) -> usize {
        self.0.len()
    }

    /// Sum of exponents.
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Degree in cohomology, where every generator sits in degree 2.
    pub fn cohomological_degree(&self) -> u32 {
        2 * self.total_degree()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn with_exponent(&self, index: usize, exponent: u32) -> Monomial {
        let mut e = self.0.clone();
        e[index] = exponent;
        Monomial(e)
    }

    /// Order used for printing: higher total degree first, then larger
    /// exponent of the last generator, then the one before, and so on.
    pub fn display_cmp(&self, other: &Monomial) -> Ordering {
        other
            .total_degree()
            .cmp(&self.total_degree())
            .then_with(|| {
                for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
                    match b.cmp(a) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            })
    }
}

/// Polynomial over the rationals in a fixed number of generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    generators: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(generators: usize) -> Self {
        Polynomial {
            generators,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(generators: usize) -> Self {
        Self::constant(generators, Rational::one())
    }

    pub fn constant(generators: usize, c: Rational) -> Self {
        Self::monomial(Monomial::one(generators), c)
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Polynomial::zero(m.generator_count());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// The generator `x_{index+1}`.
    pub fn var(generators: usize, index: usize) -> Self {
        Self::monomial(Monomial::var(generators, index), Rational::one())
    }

    /// `sum_j coeffs[j] * x_{j+1}`.
    pub fn linear<I: Into<BigInt> + Clone>(coeffs: &[I]) -> Self {
        let n = coeffs.len();
        let mut p = Polynomial::zero(n);
        for (j, c) in coeffs.iter().enumerate() {
            let c = Rational::from_integer(c.clone().into());
            if !c.is_zero() {
                p.terms.insert(Monomial::var(n, j), c);
            }
        }
        p
    }

    /// Builds a polynomial from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms<I>(generators: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Polynomial::zero(generators);
        for (m, c) in terms {
            if m.generator_count() != generators {
                return Err(Error::Dimension {
                    left: generators,
                    right: m.generator_count(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// True iff every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// The common total degree of all terms, if homogeneous. Zero is
    /// homogeneous of every degree and reports `None`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(Monomial::total_degree);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// Largest index (0-based) of a generator that occurs, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter_map(|m| m.exponents().iter().rposition(|&e| e > 0))
            .max()
    }

    /// Same polynomial viewed in a ring with more generators.
    pub fn embed(&self, generators: usize) -> Result<Self> {
        if generators < self.generators {
            return Err(Error::Dimension {
                left: self.generators,
                right: generators,
            });
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = m.0.clone();
            e.resize(generators, 0);
            (Monomial(e), c.clone())
        });
        Ok(Polynomial {
            generators,
            terms: terms.collect(),
        })
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dims(&self, other: &Polynomial) -> Result<()> {
        if self.generators != other.generators {
            Err(Error::Dimension {
                left: self.generators,
                right: other.generators,
            })
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dims(other)?;
        let mut out = Polynomial::zero(self.generators);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    /// `self^k` by repeated squaring; `p^0 = 1`.
    pub fn pow(&self, mut k: u32) -> Polynomial {
        let mut result = Polynomial::one(self.generators);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.generators);
        }
        Polynomial {
            generators: self.generators,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Polynomial {
        self.scale(&Rational::from_integer(BigInt::from(c)))
    }

    /// Substitutes `x_{j+1} -> images[j]`. The images must share a generator
    /// count, which becomes the generator count of the result.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.generators {
            return Err(Error::Dimension {
                left: self.generators,
                right: images.len(),
            });
        }
        let target = images.first().map_or(0, Polynomial::generator_count);
        for img in images {
            if img.generators != target {
                return Err(Error::Dimension {
                    left: target,
                    right: img.generators,
                });
            }
        }
        // powers[j][e] = images[j]^e, filled on demand
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|_| vec![Polynomial::one(target)])
            .collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(target, c.clone());
            for (j, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[j].len() <= e as usize {
                    let next = powers[j].last().unwrap() * &images[j];
                    powers[j].push(next);
                }
                term = &term * &powers[j][e as usize];
            }
            for (tm, tc) in term.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// Default generator names `x1, x2, ...`.
    pub fn default_names(generators: usize) -> Vec<String> {
        (1..=generators).map(|i| format!("x{i}")).collect()
    }

    /// Canonical text form using the given generator names.
    pub fn to_string_with(&self, names: &[impl AsRef<str>]) -> String {
        assert!(
            names.len() >= self.generators,
            "need {} generator names, got {}",
            self.generators,
            names.len()
        );
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| a.0.display_cmp(b.0));
        let mut out = String::new();
        for (idx, (m, c)) in terms.into_iter().enumerate() {
            let negative = c.is_negative();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let abs = c.abs();
            let mut factors = Vec::new();
            if m.is_one() || !abs.is_one() {
                factors.push(abs.to_string());
            }
            for (j, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[j].as_ref().to_string()),
                    _ => factors.push(format!("{}^{}", names[j].as_ref(), e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Parses the canonical text form (any term order is accepted).
    pub fn parse(text: &str, names: &[impl AsRef<str>]) -> Result<Polynomial> {
        Parser::new(text, names).parse()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&Polynomial::default_names(self.generators)))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    /// Panics on a generator-count mismatch; see [`Polynomial::try_add`].
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("polynomial add")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("polynomial sub")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("polynomial mul")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            generators: self.generators,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: Vec<&'a str>,
}

impl<'a> Parser<'a> {
    fn new(text: &str, names: &'a [impl AsRef<str>]) -> Self {
        Parser {
            chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
            names: names.iter().map(AsRef::as_ref).collect(),
        }
    }

    fn err<T>(&self, what: &str) -> Result<T> {
        Err(Error::PolynomialSyntax(format!(
            "{what} at offset {}",
            self.pos
        )))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Polynomial> {
        let n = self.names.len();
        let mut out = Polynomial::zero(n);
        if self.chars.is_empty() {
            return self.err("empty input");
        }
        let mut first = true;
        while self.pos < self.chars.len() {
            let sign = match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    1
                }
                Some('-') => {
                    self.pos += 1;
                    -1
                }
                _ if first => 1,
                _ => return self.err("expected '+' or '-'"),
            };
            first = false;
            let (m, c) = self.term()?;
            out.add_term(m, if sign < 0 { -c } else { c });
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Monomial, Rational)> {
        let mut exps = vec![0u32; self.names.len()];
        let mut coeff = Rational::one();
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let num = self.integer()?;
                    let mut value = Rational::from_integer(num);
                    if self.peek() == Some('/') {
                        self.pos += 1;
                        let den = self.integer()?;
                        if den.is_zero() {
                            return self.err("zero denominator");
                        }
                        value = Rational::new(value.to_integer(), den);
                    }
                    coeff *= value;
                }
                Some(c) if c.is_alphabetic() || c == '_' => {
                    let start = self.pos;
                    while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
                        self.pos += 1;
                    }
                    let name: String = self.chars[start..self.pos].iter().collect();
                    let Some(idx) = self.names.iter().position(|n| *n == name) else {
                        self.pos = start;
                        return self.err(&format!("unknown generator '{name}'"));
                    };
                    let mut e = 1u32;
                    if self.peek() == Some('^') {
                        self.pos += 1;
                        let v = self.integer()?;
                        e = u32::try_from(v).or_else(|_| self.err("exponent too large"))?;
                    }
                    exps[idx] += e;
                }
                _ => return self.err("expected coefficient or generator"),
            }
            if self.peek() == Some('*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((Monomial(exps), coeff))
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("digits"))
    }
}
