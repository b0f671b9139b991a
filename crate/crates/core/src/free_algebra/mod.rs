//! Exact symbolic arithmetic in the free algebra on noncommuting
//! indeterminates `x1, x2, …`, the multilinear subspace indexed by
//! permutations, and the coefficient-sum classifier with its two symbolic
//! lemma checks.
//!
//! Values are canonical (no zero coefficients stored) and immutable;
//! equality is exact map equality.

mod parse;

pub use parse::parse_poly;

use crate::rat::{rat_to_string, Rat};
use itertools::Itertools;
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FreeAlgebraError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("polynomial is not multilinear: {0}")]
    NotMultilinear(String),
    #[error("degree must be at least 1")]
    DegreeOutOfRange,
    #[error("variable slot {slot} out of range for degree {degree}")]
    SlotOutOfRange { slot: usize, degree: usize },
    #[error("operation requires degree >= 2, got {0}")]
    DegreeTooSmall(usize),
}

// ---------------------------------------------------------------------------
// Words and general free-algebra elements
// ---------------------------------------------------------------------------

/// A monomial in the free algebra: an ordered sequence of indeterminate
/// indices (each >= 1). The empty word is the unity element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(letters: Vec<u32>) -> Self {
        assert!(letters.iter().all(|&l| l >= 1), "letters are 1-based");
        Word(letters)
    }

    pub fn unity() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(other.0.iter()).copied().collect())
    }
}

/// Element of the free algebra: finite map from words to nonzero rational
/// coefficients. The zero polynomial is the empty map.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FreePoly {
    terms: BTreeMap<Word, Rat>,
}

impl FreePoly {
    pub fn zero() -> Self {
        FreePoly::default()
    }

    pub fn one() -> Self {
        FreePoly::monomial(Word::unity(), Rat::from_integer(1.into()))
    }

    pub fn var(i: u32) -> Self {
        FreePoly::monomial(Word::new(vec![i]), Rat::from_integer(1.into()))
    }

    pub fn monomial(word: Word, coeff: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(word, coeff);
        }
        FreePoly { terms }
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (Word, Rat)>) -> Self {
        let mut p = FreePoly::zero();
        for (w, c) in iter {
            p.add_term(w, c);
        }
        p
    }

    fn add_term(&mut self, word: Word, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(word) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, word: &Word) -> Rat {
        self.terms.get(word).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return FreePoly::zero();
        }
        FreePoly {
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    /// Formal partial derivative with respect to `x_i`: every occurrence of
    /// the letter `i` is deleted in turn (variables keep their names).
    pub fn partial_derivative(&self, i: u32) -> FreePoly {
        assert!(i >= 1, "letters are 1-based");
        let mut out = FreePoly::zero();
        for (word, coeff) in &self.terms {
            for (pos, &letter) in word.letters().iter().enumerate() {
                if letter == i {
                    let mut reduced = word.letters().to_vec();
                    reduced.remove(pos);
                    out.add_term(Word::new(reduced), coeff.clone());
                }
            }
        }
        out
    }

    /// Largest letter index appearing in any word (0 for constants).
    pub fn max_letter(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|w| w.letters().iter().copied())
            .max()
            .unwrap_or(0)
    }
}

impl Add for &FreePoly {
    type Output = FreePoly;
    fn add(self, rhs: &FreePoly) -> FreePoly {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &FreePoly {
    type Output = FreePoly;
    fn sub(self, rhs: &FreePoly) -> FreePoly {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &FreePoly {
    type Output = FreePoly;
    fn neg(self) -> FreePoly {
        FreePoly {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &FreePoly {
    type Output = FreePoly;
    fn mul(self, rhs: &FreePoly) -> FreePoly {
        let mut out = FreePoly::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &rhs.terms {
                out.add_term(wa.concat(wb), ca * cb);
            }
        }
        out
    }
}

/// `fg - gf`.
pub fn commutator(f: &FreePoly, g: &FreePoly) -> FreePoly {
    &(f * g) - &(g * f)
}

// ---------------------------------------------------------------------------
// Permutations and multilinear polynomials
// ---------------------------------------------------------------------------

/// Permutation of `{1..d}` in one-line notation: `images[k]` is `σ(k+1)`.
/// Ordering is lexicographic on the one-line form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(d: usize) -> Self {
        Perm((1..=d as u8).collect())
    }

    pub fn from_one_line(images: Vec<u8>) -> Result<Self, FreeAlgebraError> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &v in &images {
            let idx = v as usize;
            if idx == 0 || idx > d || seen[idx - 1] {
                return Err(FreeAlgebraError::NotMultilinear(format!(
                    "{images:?} is not a permutation of 1..={d}"
                )));
            }
            seen[idx - 1] = true;
        }
        Ok(Perm(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    /// `σ(k)` for 1-based `k`.
    pub fn image(&self, k: usize) -> u8 {
        self.0[k - 1]
    }

    /// 1-based position of value `v` in the one-line form, i.e. `σ⁻¹(v)`.
    pub fn position_of(&self, v: u8) -> usize {
        self.0.iter().position(|&x| x == v).expect("value present") + 1
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.0.len()];
        for (k, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = k as u8 + 1;
        }
        Perm(inv)
    }

    /// Sign by inversion count.
    pub fn sign(&self) -> i8 {
        let mut inversions = 0usize;
        for a in 0..self.0.len() {
            for b in a + 1..self.0.len() {
                if self.0[a] > self.0[b] {
                    inversions += 1;
                }
            }
        }
        if inversions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Multilinear polynomial of degree `d`: a finite map from permutations of
/// `{1..d}` to nonzero coefficients, the monomial of `σ` being
/// `x_{σ(1)} ⋯ x_{σ(d)}`.
///
/// Degree 0 (a constant) is allowed so that unit substitution is total; the
/// named constructions all produce degree >= 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearPoly {
    degree: usize,
    coeffs: BTreeMap<Perm, Rat>,
}

impl MultilinearPoly {
    pub fn zero(degree: usize) -> Self {
        MultilinearPoly {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs(
        degree: usize,
        iter: impl IntoIterator<Item = (Perm, Rat)>,
    ) -> Result<Self, FreeAlgebraError> {
        let mut coeffs: BTreeMap<Perm, Rat> = BTreeMap::new();
        for (p, c) in iter {
            if p.len() != degree {
                return Err(FreeAlgebraError::NotMultilinear(format!(
                    "permutation {:?} has length {}, expected {}",
                    p.images(),
                    p.len(),
                    degree
                )));
            }
            if c.is_zero() {
                continue;
            }
            let entry = coeffs.entry(p).or_insert_with(Rat::zero);
            *entry += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(MultilinearPoly { degree, coeffs })
    }

    pub fn monomial(degree: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(Perm::identity(degree), Rat::from_integer(1.into()));
        MultilinearPoly { degree, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Perm, &Rat)> {
        self.coeffs.iter()
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, p: &Perm) -> Rat {
        self.coeffs.get(p).cloned().unwrap_or_else(Rat::zero)
    }

    /// Lexicographically least permutation with nonzero coefficient.
    pub fn lex_min_support(&self) -> Option<&Perm> {
        self.coeffs.keys().next()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return MultilinearPoly::zero(self.degree);
        }
        MultilinearPoly {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .map(|(p, v)| (p.clone(), v * c))
                .collect(),
        }
    }

    pub fn add(&self, other: &MultilinearPoly) -> Result<Self, FreeAlgebraError> {
        if self.degree != other.degree {
            return Err(FreeAlgebraError::NotMultilinear(format!(
                "degree mismatch {} vs {}",
                self.degree, other.degree
            )));
        }
        Self::from_coeffs(
            self.degree,
            self.coeffs
                .iter()
                .chain(other.coeffs.iter())
                .map(|(p, c)| (p.clone(), c.clone())),
        )
    }

    /// View in the free algebra (word of `σ` is its one-line form).
    pub fn embed(&self) -> FreePoly {
        FreePoly::from_terms(self.coeffs.iter().map(|(p, c)| {
            (
                Word::new(p.images().iter().map(|&v| v as u32).collect()),
                c.clone(),
            )
        }))
    }

    /// Sum of all coefficients (the classifier's λ).
    pub fn lambda(&self) -> Rat {
        self.coeffs.values().sum()
    }

    /// Sum of coefficients over permutations in which `x1` occurs before
    /// `x2` (the classifier's μ). For degree 1 the condition is vacuous and
    /// μ coincides with λ.
    pub fn mu(&self) -> Rat {
        if self.degree < 2 {
            return self.lambda();
        }
        self.coeffs
            .iter()
            .filter(|(p, _)| p.position_of(1) < p.position_of(2))
            .map(|(_, c)| c)
            .sum()
    }

    /// Substitutes 1 for the variable in slot `i` (1-based) and re-indexes
    /// the remaining variables order-preservingly.
    pub fn substitute_unit(&self, i: usize) -> Result<MultilinearPoly, FreeAlgebraError> {
        if i == 0 || i > self.degree {
            return Err(FreeAlgebraError::SlotOutOfRange {
                slot: i,
                degree: self.degree,
            });
        }
        let reduced = self.coeffs.iter().map(|(p, c)| {
            let images: Vec<u8> = p
                .images()
                .iter()
                .filter(|&&v| v as usize != i)
                .map(|&v| if v as usize > i { v - 1 } else { v })
                .collect();
            (Perm(images), c.clone())
        });
        Self::from_coeffs(self.degree - 1, reduced)
    }

    /// True iff every unit substitution vanishes; over the rationals this
    /// is the multilinear criterion for membership in the subalgebra
    /// generated by 1 and Lie polynomials.
    pub fn is_lie_generated(&self) -> bool {
        (1..=self.degree).all(|i| self.substitute_unit(i).expect("slot in range").is_zero())
    }

    /// Word-reversal: the coefficient of `σ` in the result is the
    /// coefficient of `σ` composed with the order reversal `k ↦ d+1-k`.
    pub fn reverse(&self) -> MultilinearPoly {
        let d = self.degree;
        MultilinearPoly {
            degree: d,
            coeffs: self
                .coeffs
                .iter()
                .map(|(p, c)| {
                    let images: Vec<u8> = p.images().iter().rev().copied().collect();
                    (Perm(images), c.clone())
                })
                .collect(),
        }
    }

    /// Coefficients of `f(x,…,x,y)` grouped by the position of `y`:
    /// `c_p` sums the coefficients of permutations placing `x_d` in
    /// position `p`, so that `f(x,…,x,y) = Σ_p c_p x^{p-1} y x^{d-p}`.
    pub fn collapse_last(&self) -> Vec<Rat> {
        let d = self.degree;
        let mut collapse = vec![Rat::zero(); d];
        for (p, c) in &self.coeffs {
            let pos = p.position_of(d as u8);
            collapse[pos - 1] += c;
        }
        collapse
    }

    /// Expansion of `f(x_a, x_b, 1, …, 1)` in the free algebra: slot
    /// values 1 and 2 become the letters `a` and `b`, all other slots
    /// become the unity.
    pub fn expand_pair(&self, a: u32, b: u32) -> FreePoly {
        FreePoly::from_terms(self.coeffs.iter().map(|(p, c)| {
            let letters: Vec<u32> = p
                .images()
                .iter()
                .filter_map(|&v| match v {
                    1 => Some(a),
                    2 => Some(b),
                    _ => None,
                })
                .collect();
            (Word::new(letters), c.clone())
        }))
    }
}

impl TryFrom<&FreePoly> for MultilinearPoly {
    type Error = FreeAlgebraError;

    fn try_from(f: &FreePoly) -> Result<Self, Self::Error> {
        let Some(first) = f.terms.keys().next() else {
            return Err(FreeAlgebraError::ZeroPolynomial);
        };
        let d = first.len();
        if d == 0 {
            return Err(FreeAlgebraError::NotMultilinear(
                "constant polynomial".into(),
            ));
        }
        let coeffs = f
            .terms
            .iter()
            .map(|(w, c)| {
                if w.len() != d {
                    return Err(FreeAlgebraError::NotMultilinear(format!(
                        "mixed word lengths {} and {}",
                        d,
                        w.len()
                    )));
                }
                let images: Vec<u8> = w
                    .letters()
                    .iter()
                    .map(|&l| {
                        u8::try_from(l).map_err(|_| {
                            FreeAlgebraError::NotMultilinear(format!("letter x{l} too large"))
                        })
                    })
                    .collect::<Result<_, _>>()?;
                Ok((Perm::from_one_line(images)?, c.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_coeffs(d, coeffs)
    }
}

impl fmt::Display for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.embed())
    }
}

/// The standard polynomial `s_d = Σ_σ sign(σ) x_{σ(1)} ⋯ x_{σ(d)}`.
pub fn standard_poly(d: usize) -> Result<MultilinearPoly, FreeAlgebraError> {
    if d < 1 {
        return Err(FreeAlgebraError::DegreeOutOfRange);
    }
    let coeffs = (1..=d as u8).permutations(d).map(|images| {
        let p = Perm(images);
        let sign = Rat::from_integer(i64::from(p.sign()).into());
        (p, sign)
    });
    MultilinearPoly::from_coeffs(d, coeffs)
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Coefficient-sum invariants of a multilinear polynomial and the three
/// derived condition flags. Exactly one of the situations `λ ≠ 0` (A),
/// `λ = 0, μ ≠ 0` (B), `λ = 0, some c_p ≠ 0` (C) can make a flag true;
/// (B) and (C) may hold together.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    #[serde(with = "crate::rat::rat_string")]
    pub lambda: Rat,
    #[serde(with = "crate::rat::rat_string")]
    pub mu: Rat,
    #[serde(with = "crate::rat::rat_string_vec")]
    pub collapse: Vec<Rat>,
    pub cond_a: bool,
    pub cond_b: bool,
    pub cond_c: bool,
    pub in_lie_generated: bool,
}

pub fn classify(f: &MultilinearPoly) -> Result<ClassificationReport, FreeAlgebraError> {
    if f.is_zero() {
        return Err(FreeAlgebraError::ZeroPolynomial);
    }
    let lambda = f.lambda();
    let mu = f.mu();
    let collapse = f.collapse_last();
    debug_assert_eq!(collapse.iter().sum::<Rat>(), lambda);
    let cond_a = !lambda.is_zero();
    let cond_b = lambda.is_zero() && !mu.is_zero();
    let cond_c = lambda.is_zero() && collapse.iter().any(|c| !c.is_zero());
    Ok(ClassificationReport {
        lambda,
        mu,
        collapse,
        cond_a,
        cond_b,
        cond_c,
        in_lie_generated: f.is_lie_generated(),
    })
}

/// Verifies, by expansion in the free algebra on two letters, that
/// `f(x,y,1,…,1) + f(y,x,1,…,1) = λ·(xy + yx)`.
pub fn symbolic_lemma31_identity(f: &MultilinearPoly) -> Result<bool, FreeAlgebraError> {
    if f.degree() < 2 {
        return Err(FreeAlgebraError::DegreeTooSmall(f.degree()));
    }
    let lhs = &f.expand_pair(1, 2) + &f.expand_pair(2, 1);
    let xy = &FreePoly::var(1) * &FreePoly::var(2);
    let yx = &FreePoly::var(2) * &FreePoly::var(1);
    let rhs = (&xy + &yx).scale(&f.lambda());
    Ok(lhs == rhs)
}

/// Verifies, by expansion in the free algebra on two letters, that
/// `f(x,y,1,…,1) = μ·xy + (λ-μ)·yx`.
pub fn symbolic_lemma32_identity(f: &MultilinearPoly) -> Result<bool, FreeAlgebraError> {
    if f.degree() < 2 {
        return Err(FreeAlgebraError::DegreeTooSmall(f.degree()));
    }
    let lhs = f.expand_pair(1, 2);
    let lambda = f.lambda();
    let mu = f.mu();
    let xy = &FreePoly::var(1) * &FreePoly::var(2);
    let yx = &FreePoly::var(2) * &FreePoly::var(1);
    let rhs = &xy.scale(&mu) + &yx.scale(&(&lambda - &mu));
    Ok(lhs == rhs)
}

impl fmt::Display for FreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (word, coeff)) in self.terms.iter().enumerate() {
            let neg = crate::rat::is_negative(coeff);
            let abs = if neg { -coeff.clone() } else { coeff.clone() };
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let one = abs == Rat::from_integer(1.into());
            if word.is_empty() {
                write!(f, "{}", rat_to_string(&abs))?;
            } else {
                if !one {
                    write!(f, "{} ", rat_to_string(&abs))?;
                }
                let mono = word
                    .letters()
                    .iter()
                    .map(|l| format!("x{l}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                write!(f, "{mono}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for FreePoly {
    type Err = FreeAlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_poly(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn p(s: &str) -> FreePoly {
        parse_poly(s).unwrap()
    }

    fn ml(s: &str) -> MultilinearPoly {
        MultilinearPoly::try_from(&p(s)).unwrap()
    }

    #[test]
    fn multiplication_fixtures() {
        assert_eq!(&p("x1") * &p("x2"), p("x1 x2"));
        let comm = p("x1 x2 - x2 x1");
        assert_eq!(&comm * &FreePoly::one(), comm);
        assert_eq!(
            &p("x1 + x2") * &p("x1 - x2"),
            p("x1 x1 - x1 x2 + x2 x1 - x2 x2")
        );
    }

    #[test]
    fn commutator_fixtures() {
        assert_eq!(commutator(&p("x1"), &p("x2")), p("x1 x2 - x2 x1"));
        let f = p("3 x1 x2 + x3");
        assert!(commutator(&f, &f).is_zero());
        assert_eq!(
            commutator(&p("x1"), &commutator(&p("x2"), &p("x3"))),
            p("x1 x2 x3 - x1 x3 x2 - x2 x3 x1 + x3 x2 x1")
        );
    }

    #[test]
    fn standard_poly_fixtures() {
        assert_eq!(standard_poly(1).unwrap(), ml("x1"));
        assert_eq!(standard_poly(2).unwrap(), ml("x1 x2 - x2 x1"));
        // the six-term degree-3 standard polynomial
        assert_eq!(
            standard_poly(3).unwrap(),
            ml("x1 x2 x3 + x3 x1 x2 + x2 x3 x1 - x2 x1 x3 - x1 x3 x2 - x3 x2 x1")
        );
        assert_eq!(standard_poly(4).unwrap().support_size(), 24);
        assert!(standard_poly(0).is_err());
    }

    #[test]
    fn partial_derivative_fixtures() {
        assert_eq!(p("x1 x2").partial_derivative(1), p("x2"));
        assert!(p("x1 x2 - x2 x1").partial_derivative(1).is_zero());
        assert_eq!(p("x1 x1").partial_derivative(1), p("2 x1"));
    }

    #[test]
    fn substitute_unit_fixtures() {
        assert_eq!(ml("x1 x2").substitute_unit(1).unwrap(), ml("x1"));
        assert!(ml("x1 x2 - x2 x1").substitute_unit(2).unwrap().is_zero());
        assert_eq!(
            standard_poly(3).unwrap().substitute_unit(3).unwrap(),
            standard_poly(2).unwrap()
        );
        assert!(matches!(
            ml("x1 x2").substitute_unit(3),
            Err(FreeAlgebraError::SlotOutOfRange { .. })
        ));
    }

    #[test]
    fn substitution_agrees_with_derivative_after_relabeling() {
        // On multilinear input, the formal derivative equals the unit
        // substitution once the surviving letters are shifted down past
        // the deleted one.
        let f = ml("2 x1 x3 x2 - x2 x1 x3 + 1/2 x3 x2 x1");
        for i in 1..=3u32 {
            let derived = f.embed().partial_derivative(i);
            let relabeled = FreePoly::from_terms(derived.terms().map(|(w, c)| {
                let letters = w
                    .letters()
                    .iter()
                    .map(|&l| if l > i { l - 1 } else { l })
                    .collect();
                (Word::new(letters), c.clone())
            }));
            assert_eq!(relabeled, f.substitute_unit(i as usize).unwrap().embed());
        }
    }

    #[test]
    fn lie_generated_fixtures() {
        assert!(ml("x1 x2 - x2 x1").is_lie_generated());
        assert!(!ml("x1 x2").is_lie_generated());
        let lie3 = "x1 x2 x3 - x1 x3 x2 - x2 x3 x1 + x3 x2 x1";
        assert!(ml(lie3).is_lie_generated());
        assert!(!standard_poly(3).unwrap().is_lie_generated());
        assert!(standard_poly(4).unwrap().is_lie_generated());
    }

    #[test]
    fn reverse_fixtures() {
        assert_eq!(ml("x1 x2").reverse(), ml("x2 x1"));
        let sym = ml("x1 x2 + x2 x1");
        assert_eq!(sym.reverse(), sym);
        let s3 = standard_poly(3).unwrap();
        assert_eq!(s3.reverse(), s3.scale(&rat_int(-1)));
        // involution
        let f = ml("2 x1 x3 x2 - x3 x2 x1");
        assert_eq!(f.reverse().reverse(), f);
    }

    #[test]
    fn collapse_fixtures() {
        // c_p sums coefficients of permutations with x_d in position p
        assert_eq!(
            ml("x1 x2 - x2 x1").collapse_last(),
            vec![rat_int(-1), rat_int(1)]
        );
        assert_eq!(ml("x1 x2").collapse_last(), vec![rat_int(0), rat_int(1)]);
        assert_eq!(
            standard_poly(3).unwrap().collapse_last(),
            vec![rat_int(0); 3]
        );
    }

    #[test]
    fn collapse_matches_two_letter_substitution() {
        // independent oracle: substitute x for every slot except the last
        // (y there) in the free algebra and compare with Σ c_p x^{p-1} y x^{d-p}
        for f in [
            ml("x1 x2 - x2 x1"),
            standard_poly(3).unwrap(),
            ml("x1 x2 x3 - x1 x3 x2 - x2 x3 x1 + x3 x2 x1"),
            ml("3 x2 x1 x4 x3 - 1/2 x4 x3 x2 x1"),
        ] {
            let d = f.degree();
            let x = 1u32;
            let y = 2u32;
            let expanded = FreePoly::from_terms(f.coeffs().map(|(p, c)| {
                let letters = p
                    .images()
                    .iter()
                    .map(|&v| if v as usize == d { y } else { x })
                    .collect();
                (Word::new(letters), c.clone())
            }));
            let collapse = f.collapse_last();
            let mut rhs = FreePoly::zero();
            for (p, c) in collapse.iter().enumerate() {
                let mut letters = vec![x; d];
                letters[p] = y;
                rhs = &rhs + &FreePoly::monomial(Word::new(letters), c.clone());
            }
            assert_eq!(expanded, rhs);
        }
    }

    #[test]
    fn classify_fixtures() {
        let a = classify(&ml("x1 x2")).unwrap();
        assert!(a.cond_a && !a.cond_b && !a.cond_c);
        assert_eq!(a.lambda, rat_int(1));
        assert_eq!(a.mu, rat_int(1));

        let b = classify(&standard_poly(3).unwrap()).unwrap();
        assert!(!b.cond_a && b.cond_b && !b.cond_c);
        assert_eq!(b.lambda, rat_int(0));
        assert_eq!(b.mu, rat_int(1));
        assert_eq!(b.collapse, vec![rat_int(0); 3]);

        let c = classify(&ml("x1 x2 x3 - x1 x3 x2 - x2 x3 x1 + x3 x2 x1")).unwrap();
        assert!(!c.cond_a && !c.cond_b && c.cond_c);
        assert_eq!(c.mu, rat_int(0));
        assert_eq!(c.collapse, vec![rat_int(1), rat_int(-2), rat_int(1)]);
        assert!(c.in_lie_generated);

        // (B) and (C) co-occur for the commutator
        let bc = classify(&ml("x1 x2 - x2 x1")).unwrap();
        assert!(!bc.cond_a && bc.cond_b && bc.cond_c);

        assert_eq!(
            classify(&MultilinearPoly::zero(2)).unwrap_err(),
            FreeAlgebraError::ZeroPolynomial
        );
    }

    #[test]
    fn lemma_identities_on_fixtures() {
        assert!(symbolic_lemma31_identity(&ml("x1 x2")).unwrap());
        assert!(symbolic_lemma31_identity(&standard_poly(3).unwrap()).unwrap());
        assert!(symbolic_lemma32_identity(&ml("x1 x2 - x2 x1")).unwrap());
        assert!(symbolic_lemma32_identity(&ml("x1 x2")).unwrap());
        assert!(symbolic_lemma32_identity(&standard_poly(4).unwrap()).unwrap());
        assert!(symbolic_lemma31_identity(&standard_poly(1).unwrap()).is_err());
    }

    #[test]
    fn scalar_coeff_arithmetic_is_exact() {
        let f = p("1/3 x1 + 1/6 x1");
        assert_eq!(f, p("1/2 x1"));
        let g = &p("1/2 x1") - &p("1/2 x1");
        assert!(g.is_zero());
        assert_eq!(p("x1").scale(&rat(2, 3)), p("2/3 x1"));
    }
}
