//! Evaluation of multilinear polynomials on matrix tuples and exact
//! polynomial-identity testing.
//!
//! Identity testing reduces, by multilinearity, to the finitely many
//! tuples of matrix units. The enumeration works purely symbolically: a
//! product of units is again a unit or zero, so each candidate monomial is
//! an index chase, never a dense matrix product. Monomials are walked
//! through a prefix trie of the polynomial's support so that a vanishing
//! partial product prunes every permutation extending it.

use crate::exact_matrix::{
    corner_units, matrix_unit, random_rank_one_idempotent, staircase_units, MatrixError, RatMatrix,
    RowReducer,
};
use crate::free_algebra::{MultilinearPoly, Perm};
use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize};
use std::sync::atomic::{AtomicBool, Ordering};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PiError {
    #[error("tuple has {found} matrices, polynomial has degree {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("tuple dimension {found} does not match expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("degree {d} is not below 2n = {twice_n}")]
    DegreeTooLarge { d: usize, twice_n: usize },
    #[error("degree {0} too small for this operation")]
    DegreeTooSmall(usize),
    #[error("the monomial x1 x2 … xd must have coefficient 1")]
    IdentityCoefficientNotOne,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Ordered list of same-size square matrices, used as a substitution for
/// the `d` slots of a multilinear polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MatrixTuple {
    mats: Vec<RatMatrix>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<RatMatrix>) -> Result<Self, PiError> {
        if mats.is_empty() {
            return Err(PiError::ArityMismatch {
                expected: 1,
                found: 0,
            });
        }
        if !mats[0].is_square() {
            return Err(PiError::DimensionMismatch {
                expected: mats[0].rows(),
                found: mats[0].cols(),
            });
        }
        let n = mats[0].n();
        for m in &mats {
            if !m.is_square() || m.n() != n {
                return Err(PiError::DimensionMismatch {
                    expected: n,
                    found: m.rows(),
                });
            }
        }
        Ok(MatrixTuple { mats })
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.mats[0].n()
    }

    pub fn get(&self, slot: usize) -> &RatMatrix {
        &self.mats[slot]
    }

    pub fn iter(&self) -> impl Iterator<Item = &RatMatrix> {
        self.mats.iter()
    }

    pub fn mats(&self) -> &[RatMatrix] {
        &self.mats
    }

    /// Slot-wise image under a matrix-to-matrix function.
    pub fn map(&self, f: impl Fn(&RatMatrix) -> RatMatrix) -> MatrixTuple {
        MatrixTuple {
            mats: self.mats.iter().map(f).collect(),
        }
    }
}

impl<'de> Deserialize<'de> for MatrixTuple {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let mats = Vec::<RatMatrix>::deserialize(de)?;
        MatrixTuple::new(mats).map_err(serde::de::Error::custom)
    }
}

fn int_matmul(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                let b_entry = &b[k * n + j];
                if !b_entry.is_zero() {
                    out[i * n + j] += aik * b_entry;
                }
            }
        }
    }
    out
}

/// Exact evaluation `Σ_σ λ_σ · a_{σ(1)} ⋯ a_{σ(d)}`.
///
/// Each slot is factored as scalar × primitive-integer matrix first; by
/// multilinearity the scalars pull out of every monomial uniformly, so the
/// monomial products run over plain integers.
pub fn evaluate(f: &MultilinearPoly, t: &MatrixTuple) -> Result<RatMatrix, PiError> {
    if f.degree() != t.len() {
        return Err(PiError::ArityMismatch {
            expected: f.degree(),
            found: t.len(),
        });
    }
    let n = t.dim();
    let mut scalar = Rat::one();
    let mut primitive: Vec<Vec<BigInt>> = Vec::with_capacity(t.len());
    for m in t.iter() {
        if m.is_zero() {
            return Ok(RatMatrix::zeros(n, n));
        }
        let (c, p) = crate::exact_matrix::primitive_factor(m);
        scalar *= c;
        primitive.push(p.to_vec().iter().map(|x| x.numer().clone()).collect());
    }
    let coeff_lcm = f
        .coeffs()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let mut acc = vec![BigInt::zero(); n * n];
    for (perm, coeff) in f.coeffs() {
        let mut prod = primitive[perm.image(1) as usize - 1].clone();
        for k in 2..=perm.len() {
            prod = int_matmul(&prod, &primitive[perm.image(k) as usize - 1], n);
        }
        let c_int = coeff.numer() * (&coeff_lcm / coeff.denom());
        for (a, p) in acc.iter_mut().zip(&prod) {
            if !p.is_zero() {
                *a += &c_int * p;
            }
        }
    }
    let rescale = scalar / Rat::from_integer(coeff_lcm);
    let entries: Vec<Rat> = acc.into_iter().map(Rat::from_integer).collect();
    Ok(RatMatrix::from_flat(n, &entries).scale(&rescale))
}

// ---------------------------------------------------------------------------
// Identity testing
// ---------------------------------------------------------------------------

#[derive(Clone)]
struct TrieNode {
    children: Vec<(u8, u32)>,
    coeff: Option<u32>,
}

/// Prefix trie over the one-line forms of the support permutations.
struct SupportTrie {
    nodes: Vec<TrieNode>,
    /// Coefficients scaled to a common denominator (integers).
    scaled: Vec<BigInt>,
    /// The same integers when every one of them fits in an `i64`.
    small: Option<Vec<i64>>,
}

impl SupportTrie {
    fn build(f: &MultilinearPoly) -> Self {
        let denom_lcm = f
            .coeffs()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut nodes = vec![TrieNode {
            children: Vec::new(),
            coeff: None,
        }];
        let mut scaled = Vec::new();
        for (perm, coeff) in f.coeffs() {
            let mut cur = 0usize;
            for &letter in perm.images() {
                let next = match nodes[cur].children.iter().find(|(l, _)| *l == letter) {
                    Some((_, idx)) => *idx as usize,
                    None => {
                        nodes.push(TrieNode {
                            children: Vec::new(),
                            coeff: None,
                        });
                        let idx = nodes.len() - 1;
                        nodes[cur].children.push((letter, idx as u32));
                        idx
                    }
                };
                cur = next;
            }
            nodes[cur].coeff = Some(scaled.len() as u32);
            scaled.push(coeff.numer() * (&denom_lcm / coeff.denom()));
        }
        let small = scaled
            .iter()
            .map(|c| c.to_i64())
            .collect::<Option<Vec<i64>>>();
        SupportTrie {
            nodes,
            scaled,
            small,
        }
    }
}

/// Per-tuple accumulation state; result cells are `(start_row, col)` pairs.
struct Accum<T> {
    cells: Vec<T>,
    touched: Vec<usize>,
}

impl<T: Clone + Zero> Accum<T> {
    fn new(ncells: usize) -> Self {
        Accum {
            cells: vec![T::zero(); ncells],
            touched: Vec::new(),
        }
    }

    fn reset(&mut self) {
        for &c in &self.touched {
            self.cells[c] = T::zero();
        }
        self.touched.clear();
    }
}

/// Walks the support trie against one unit tuple; `units[slot]` is
/// `(row, col)`, 0-based. Accumulates into `acc`, returns nothing; the
/// caller inspects the touched cells.
fn walk<T>(
    trie: &SupportTrie,
    coeffs: &[T],
    units: &[(u8, u8)],
    n: usize,
    node: usize,
    start_row: u8,
    cur_col: u8,
    acc: &mut Accum<T>,
) where
    T: Clone + Zero + for<'a> std::ops::AddAssign<&'a T>,
{
    let nd = &trie.nodes[node];
    if let Some(k) = nd.coeff {
        let cell = start_row as usize * n + cur_col as usize;
        if acc.cells[cell].is_zero() {
            acc.touched.push(cell);
        }
        acc.cells[cell] += &coeffs[k as usize];
    }
    for &(letter, child) in &nd.children {
        let (r, c) = units[letter as usize - 1];
        if r == cur_col {
            walk(trie, coeffs, units, n, child as usize, start_row, c, acc);
        }
    }
}

fn tuple_vanishes<T>(
    trie: &SupportTrie,
    coeffs: &[T],
    units: &[(u8, u8)],
    n: usize,
    acc: &mut Accum<T>,
) -> bool
where
    T: Clone + Zero + for<'a> std::ops::AddAssign<&'a T>,
{
    acc.reset();
    let root = &trie.nodes[0];
    for &(letter, child) in &root.children {
        let (r, c) = units[letter as usize - 1];
        walk(trie, coeffs, units, n, child as usize, r, c, acc);
    }
    acc.touched.iter().all(|&cell| acc.cells[cell].is_zero())
}

fn shard_vanishes(
    trie: &SupportTrie,
    n: usize,
    d: usize,
    first_units: &[usize],
    stop: &AtomicBool,
) -> bool {
    let n2 = n * n;
    // Scaled coefficients fit an i128 accumulator whenever each fits an
    // i64: at most d! <= 40320 additions keep the sum well inside range.
    let small_coeffs: Option<Vec<I128>> = trie
        .small
        .as_ref()
        .map(|v| v.iter().map(|&x| I128(i128::from(x))).collect());
    let mut acc_small = Accum::<I128>::new(n2);
    let mut acc_big = Accum::<BigInt>::new(n2);
    let mut units = vec![(0u8, 0u8); d];
    for &first in first_units {
        units[0] = ((first / n) as u8, (first % n) as u8);
        let mut digits = vec![0usize; d - 1];
        'tuples: loop {
            if stop.load(Ordering::Relaxed) {
                return false;
            }
            for (k, &dg) in digits.iter().enumerate() {
                units[k + 1] = ((dg / n) as u8, (dg % n) as u8);
            }
            let ok = match &small_coeffs {
                Some(cs) => tuple_vanishes(trie, cs, &units, n, &mut acc_small),
                None => tuple_vanishes(trie, &trie.scaled, &units, n, &mut acc_big),
            };
            if !ok {
                stop.store(true, Ordering::Relaxed);
                return false;
            }
            if digits.is_empty() {
                break 'tuples;
            }
            let mut k = 0;
            loop {
                digits[k] += 1;
                if digits[k] < n2 {
                    break;
                }
                digits[k] = 0;
                k += 1;
                if k == digits.len() {
                    break 'tuples;
                }
            }
        }
    }
    true
}

/// i128 accumulator newtype so the generic walker can use it.
#[derive(Clone, Copy)]
struct I128(i128);

impl Zero for I128 {
    fn zero() -> Self {
        I128(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl std::ops::Add for I128 {
    type Output = I128;
    fn add(self, rhs: Self) -> Self {
        I128(self.0 + rhs.0)
    }
}

impl<'a> std::ops::AddAssign<&'a I128> for I128 {
    fn add_assign(&mut self, rhs: &'a I128) {
        self.0 += rhs.0;
    }
}

/// True iff `f` vanishes on every matrix-unit tuple of `M_n` (equivalently,
/// by multilinearity, on all of `M_n`).
pub fn is_identity(f: &MultilinearPoly, n: usize) -> bool {
    is_identity_sharded(f, n, 1)
}

/// Same verdict as [`is_identity`], with the tuple space split over up to
/// `threads` worker threads. The verdict is independent of the shard count.
pub fn is_identity_sharded(f: &MultilinearPoly, n: usize, threads: usize) -> bool {
    assert!(n >= 1);
    if f.is_zero() {
        return true;
    }
    let d = f.degree();
    if d == 0 {
        return false; // nonzero constant
    }
    let trie = SupportTrie::build(f);
    let n2 = n * n;
    let threads = threads.max(1).min(n2);
    let stop = AtomicBool::new(false);
    if threads == 1 {
        let all: Vec<usize> = (0..n2).collect();
        return shard_vanishes(&trie, n, d, &all, &stop);
    }
    let shards: Vec<Vec<usize>> = (0..threads)
        .map(|t| (0..n2).filter(|u| u % threads == t).collect())
        .collect();
    let mut verdicts = vec![true; threads];
    std::thread::scope(|scope| {
        let handles: Vec<_> = shards
            .iter()
            .map(|shard| {
                let trie = &trie;
                let stop = &stop;
                scope.spawn(move || shard_vanishes(trie, n, d, shard, stop))
            })
            .collect();
        for (v, h) in verdicts.iter_mut().zip(handles) {
            *v = h.join().expect("shard thread panicked");
        }
    });
    verdicts.into_iter().all(|v| v) && !stop.load(Ordering::Relaxed)
}

/// First matrix-unit tuple, in lexicographic order of the fixed basis, on
/// which `f` does not vanish. `None` when `f` is an identity of `M_n`.
pub fn find_nonvanishing_unit_tuple(f: &MultilinearPoly, n: usize) -> Option<MatrixTuple> {
    if f.is_zero() || f.degree() == 0 {
        return None;
    }
    let d = f.degree();
    let n2 = n * n;
    let trie = SupportTrie::build(f);
    let small_coeffs: Option<Vec<I128>> = trie
        .small
        .as_ref()
        .map(|v| v.iter().map(|&x| I128(i128::from(x))).collect());
    let mut acc_small = Accum::<I128>::new(n2);
    let mut acc_big = Accum::<BigInt>::new(n2);
    let mut digits = vec![0usize; d];
    let mut units = vec![(0u8, 0u8); d];
    loop {
        for (k, &dg) in digits.iter().enumerate() {
            units[k] = ((dg / n) as u8, (dg % n) as u8);
        }
        let vanishes = match &small_coeffs {
            Some(cs) => tuple_vanishes(&trie, cs, &units, n, &mut acc_small),
            None => tuple_vanishes(&trie, &trie.scaled, &units, n, &mut acc_big),
        };
        if !vanishes {
            let mats = digits
                .iter()
                .map(|&dg| {
                    let (i, j) = crate::exact_matrix::unit_position(n, dg);
                    matrix_unit(n, i, j).expect("in range")
                })
                .collect();
            return Some(MatrixTuple::new(mats).expect("nonempty uniform tuple"));
        }
        // lexicographic odometer: the last slot is least significant
        let mut k = d;
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < n2 {
                break;
            }
            digits[k] = 0;
            if k == 0 {
                return None;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Witnesses
// ---------------------------------------------------------------------------

/// Assigns the staircase units to the slots so that exactly the
/// lexicographically least support monomial survives; the value is
/// `λ_σ · e_{1,k} ≠ 0`. Requires `d < 2n`.
pub fn nonidentity_witness(f: &MultilinearPoly, n: usize) -> Result<MatrixTuple, PiError> {
    if f.is_zero() {
        return Err(PiError::ZeroPolynomial);
    }
    let d = f.degree();
    if d == 0 {
        return Err(PiError::DegreeTooSmall(0));
    }
    if d >= 2 * n {
        return Err(PiError::DegreeTooLarge { d, twice_n: 2 * n });
    }
    let sigma = f.lex_min_support().expect("nonzero polynomial");
    let inv = sigma.inverse();
    let units = staircase_units(d, n)?;
    let mats = (1..=d)
        .map(|slot| units[inv.image(slot) as usize - 1].clone())
        .collect();
    let tuple = MatrixTuple::new(mats)?;
    let value = evaluate(f, &tuple)?;
    assert!(
        !value.is_zero(),
        "staircase witness must evaluate nonzero; this is an internal invariant"
    );
    Ok(tuple)
}

// ---------------------------------------------------------------------------
// Slot maps (the linear map of one argument with the others fixed)
// ---------------------------------------------------------------------------

/// Matrix (n² x n², fixed basis order) of the linear map
/// `z ↦ f(a_1, …, z at position `slot`, …, a_d)`; the entry of `mats` at
/// `slot` (1-based) is ignored.
pub fn slot_map(
    f: &MultilinearPoly,
    mats: &[RatMatrix],
    slot: usize,
) -> Result<RatMatrix, PiError> {
    let d = f.degree();
    if mats.len() != d {
        return Err(PiError::ArityMismatch {
            expected: d,
            found: mats.len(),
        });
    }
    if slot == 0 || slot > d {
        return Err(PiError::DegreeTooSmall(slot));
    }
    let n = mats[0].n();
    let n2 = n * n;
    let mut rep = RatMatrix::zeros(n2, n2);
    for (perm, coeff) in f.coeffs() {
        let hole = perm.position_of(slot as u8);
        let mut left = RatMatrix::identity(n);
        for k in 1..hole {
            left = &left * &mats[perm.image(k) as usize - 1];
        }
        let mut right = RatMatrix::identity(n);
        for k in hole + 1..=d {
            right = &right * &mats[perm.image(k) as usize - 1];
        }
        // z ↦ left · z · right contributes left_{ij} right_{kl} at
        // rep[(i,l),(j,k)].
        for i in 0..n {
            for j in 0..n {
                let lij = left.get(i, j);
                if lij.is_zero() {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        let rkl = right.get(k, l);
                        if rkl.is_zero() {
                            continue;
                        }
                        let cur = rep.get(i * n + l, j * n + k).clone();
                        rep.set(i * n + l, j * n + k, cur + coeff * lij * rkl);
                    }
                }
            }
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Central solutions (the linear space cut out by f(…, c, …) = 0)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq)]
enum UnitProd {
    Identity,
    Unit(u8, u8),
    Zero,
}

impl UnitProd {
    fn mul_unit(self, r: u8, c: u8) -> UnitProd {
        match self {
            UnitProd::Identity => UnitProd::Unit(r, c),
            UnitProd::Unit(a, b) => {
                if b == r {
                    UnitProd::Unit(a, c)
                } else {
                    UnitProd::Zero
                }
            }
            UnitProd::Zero => UnitProd::Zero,
        }
    }
}

/// Exact basis of `{c ∈ M_n : f(a_1,…,c at slot s,…,a_d) = 0` for every
/// slot `s` and all `a_i ∈ M_n}`. By multilinearity it suffices to let the
/// `a_i` range over matrix units; the (hugely redundant) stacked system is
/// generated lazily and elimination stops as soon as the kernel is pinned.
pub fn central_solutions(f: &MultilinearPoly, n: usize) -> Vec<RatMatrix> {
    let n2 = n * n;
    let full_basis = || {
        (0..n2)
            .map(|idx| {
                let (i, j) = crate::exact_matrix::unit_position(n, idx);
                matrix_unit(n, i, j).expect("in range")
            })
            .collect::<Vec<_>>()
    };
    if f.is_zero() || is_identity(f, n) {
        // every equation is identically zero
        return full_basis();
    }
    let d = f.degree();
    let lie = f.is_lie_generated();
    let one_coords = RatMatrix::identity(n).to_vec();
    let mut reducer = RowReducer::new(n2);
    let support: Vec<(&Perm, &Rat)> = f.coeffs().collect();

    'outer: for slot in 1..=d {
        // other-slot assignment: slots in increasing order, skipping `slot`
        let others: Vec<usize> = (1..=d).filter(|&s| s != slot).collect();
        let mut digits = vec![0usize; d - 1];
        loop {
            // unit (row, col) per slot, 0-based
            let mut assign = vec![(0u8, 0u8); d + 1];
            for (k, &dg) in digits.iter().enumerate() {
                assign[others[k]] = ((dg / n) as u8, (dg % n) as u8);
            }
            // sparse n² x n² equation matrix for c ↦ f(units…, c, units…)
            let mut entries: std::collections::BTreeMap<usize, Vec<(usize, Rat)>> =
                std::collections::BTreeMap::new();
            for (perm, coeff) in &support {
                let hole = perm.position_of(slot as u8);
                let mut left = UnitProd::Identity;
                for k in 1..hole {
                    let (r, c) = assign[perm.image(k) as usize];
                    left = left.mul_unit(r, c);
                }
                if left == UnitProd::Zero {
                    continue;
                }
                let mut right = UnitProd::Identity;
                for k in hole + 1..=d {
                    let (r, c) = assign[perm.image(k) as usize];
                    right = right.mul_unit(r, c);
                }
                if right == UnitProd::Zero {
                    continue;
                }
                let mut push = |row: usize, col: usize, val: &Rat| {
                    entries.entry(row).or_default().push((col, val.clone()));
                };
                match (left, right) {
                    (UnitProd::Unit(a, b), UnitProd::Unit(c, dd)) => {
                        push(
                            a as usize * n + dd as usize,
                            b as usize * n + c as usize,
                            coeff,
                        );
                    }
                    (UnitProd::Identity, UnitProd::Unit(c, dd)) => {
                        for i in 0..n {
                            push(i * n + dd as usize, i * n + c as usize, coeff);
                        }
                    }
                    (UnitProd::Unit(a, b), UnitProd::Identity) => {
                        for l in 0..n {
                            push(a as usize * n + l, b as usize * n + l, coeff);
                        }
                    }
                    (UnitProd::Identity, UnitProd::Identity) => {
                        for cell in 0..n2 {
                            push(cell, cell, coeff);
                        }
                    }
                    (UnitProd::Zero, _) | (_, UnitProd::Zero) => unreachable!(),
                }
            }
            for (_, cols) in entries {
                let mut row = vec![Rat::zero(); n2];
                for (col, val) in cols {
                    row[col] += val;
                }
                if row.iter().all(|v| v.is_zero()) {
                    continue;
                }
                reducer.add_row(row);
                if reducer.rank() == n2 {
                    return Vec::new();
                }
                if lie && reducer.rank() == n2 - 1 {
                    // every equation annihilates 1, so the kernel is
                    // exactly the scalars from here on
                    debug_assert!(reducer.annihilates(&one_coords));
                    break 'outer;
                }
            }
            // odometer
            let mut k = 0;
            loop {
                if k == digits.len() {
                    break;
                }
                digits[k] += 1;
                if digits[k] < n2 {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == digits.len() {
                break;
            }
        }
    }
    reducer
        .kernel_basis()
        .into_iter()
        .map(|v| RatMatrix::from_flat(n, &v))
        .collect()
}

// ---------------------------------------------------------------------------
// The corner micro-identity
// ---------------------------------------------------------------------------

/// Checks the exact identity
/// `e · f(e, c, h_11, h_12, h_22, h_23, …, h_st) · h_t1 = e·c·h_11`
/// for the corner units `h` of the rank-one idempotent `e`, where `(s,t)`
/// is `(d/2 - 1, d/2)` for even `d` and `((d-1)/2, (d-1)/2)` for odd `d`.
/// Requires the monomial `x1 x2 ⋯ xd` to have coefficient 1 and `d < 2n`.
pub fn check_lemma23_microidentity(
    f: &MultilinearPoly,
    n: usize,
    c: &RatMatrix,
    e: &RatMatrix,
) -> Result<bool, PiError> {
    let d = f.degree();
    if d < 2 {
        return Err(PiError::DegreeTooSmall(d));
    }
    if d >= 2 * n {
        return Err(PiError::DegreeTooLarge { d, twice_n: 2 * n });
    }
    if f.coeff(&Perm::identity(d)) != Rat::one() {
        return Err(PiError::IdentityCoefficientNotOne);
    }
    if c.rows() != n || c.cols() != n {
        return Err(PiError::DimensionMismatch {
            expected: n,
            found: c.rows(),
        });
    }
    let grid = corner_units(e)?;
    let t = d / 2; // equals (d-1)/2 for odd d
    debug_assert!(t < n);
    let mut args = vec![e.clone(), c.clone()];
    if d > 2 {
        for (i, j) in crate::exact_matrix::staircase_positions(d - 2, n - 1)? {
            args.push(grid[i - 1][j - 1].clone());
        }
    }
    let tuple = MatrixTuple::new(args)?;
    let lhs = &(e * &evaluate(f, &tuple)?) * &grid[t - 1][0];
    let rhs = &(e * c) * &grid[0][0];
    Ok(lhs == rhs)
}

/// Decides exactly whether `c` commutes with every rank-one idempotent
/// (equivalently, whether `c` is scalar): the diagonal units `e_ii` and the
/// idempotents `e_11 + e_1j` generate enough constraints. Additionally
/// cross-checks against `trials` random conjugated idempotents.
pub fn commutes_with_rank_one_idempotents<R: Rng + ?Sized>(
    c: &RatMatrix,
    trials: usize,
    rng: &mut R,
) -> bool {
    let n = c.n();
    if n < 2 {
        return true;
    }
    let mut family = Vec::new();
    for i in 1..=n {
        family.push(matrix_unit(n, i, i).expect("in range"));
    }
    for j in 2..=n {
        let e = &matrix_unit(n, 1, 1).expect("in range") + &matrix_unit(n, 1, j).expect("in range");
        family.push(e);
    }
    let exact = family
        .iter()
        .all(|e| crate::exact_matrix::commutator(c, e).is_zero());
    for _ in 0..trials {
        let e = random_rank_one_idempotent(n, rng);
        if !crate::exact_matrix::commutator(c, &e).is_zero() {
            debug_assert!(!exact, "a scalar matrix commutes with everything");
            return false;
        }
    }
    exact
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_matrix::random_int_matrix;
    use crate::free_algebra::{parse_poly, standard_poly};
    use crate::rat::rat_int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ml(s: &str) -> MultilinearPoly {
        MultilinearPoly::try_from(&parse_poly(s).unwrap()).unwrap()
    }

    fn e(n: usize, i: usize, j: usize) -> RatMatrix {
        matrix_unit(n, i, j).unwrap()
    }

    #[test]
    fn evaluate_fixtures() {
        let comm = ml("x1 x2 - x2 x1");
        let t = MatrixTuple::new(vec![e(2, 1, 2), e(2, 2, 1)]).unwrap();
        assert_eq!(evaluate(&comm, &t).unwrap(), &e(2, 1, 1) - &e(2, 2, 2));

        let zero_t = MatrixTuple::new(vec![RatMatrix::zeros(2, 2); 2]).unwrap();
        assert!(evaluate(&comm, &zero_t).unwrap().is_zero());

        let mono = ml("x1 x2 x3 x4");
        let stair = MatrixTuple::new(staircase_units(4, 3).unwrap()).unwrap();
        assert_eq!(evaluate(&mono, &stair).unwrap(), e(3, 1, 3));

        assert!(matches!(
            evaluate(&comm, &stair),
            Err(PiError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn evaluate_is_multilinear_in_each_slot() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let f = standard_poly(3).unwrap();
        for n in [2usize, 3] {
            for _ in 0..5 {
                let a = random_int_matrix(n, -2, 2, &mut rng);
                let b = random_int_matrix(n, -2, 2, &mut rng);
                let x = random_int_matrix(n, -2, 2, &mut rng);
                let y = random_int_matrix(n, -2, 2, &mut rng);
                let alpha = crate::rat::rat(3, 2);
                let beta = crate::rat::rat(-1, 3);
                let mixed = &x.scale(&alpha) + &y.scale(&beta);
                let lhs = evaluate(
                    &f,
                    &MatrixTuple::new(vec![a.clone(), mixed, b.clone()]).unwrap(),
                )
                .unwrap();
                let at_x = evaluate(
                    &f,
                    &MatrixTuple::new(vec![a.clone(), x, b.clone()]).unwrap(),
                )
                .unwrap();
                let at_y = evaluate(&f, &MatrixTuple::new(vec![a, y, b]).unwrap()).unwrap();
                assert_eq!(lhs, &at_x.scale(&alpha) + &at_y.scale(&beta));
            }
        }
    }

    #[test]
    fn identity_test_fixtures() {
        assert!(is_identity(&standard_poly(4).unwrap(), 2));
        assert!(!is_identity(&standard_poly(3).unwrap(), 2));
        assert!(is_identity(&ml("x1 x2 - x2 x1"), 1));
        assert!(!is_identity(&ml("x1 x2 - x2 x1"), 2));
        assert!(!is_identity(&ml("x1 x2"), 3));
        assert!(is_identity(&MultilinearPoly::zero(3), 2));
    }

    #[test]
    fn identity_verdict_is_shard_independent() {
        let s4 = standard_poly(4).unwrap();
        let s3 = standard_poly(3).unwrap();
        for threads in [1usize, 2, 3, 7] {
            assert!(is_identity_sharded(&s4, 2, threads));
            assert!(!is_identity_sharded(&s3, 2, threads));
        }
    }

    #[test]
    fn identity_test_agrees_with_dense_random_evaluations() {
        let s4 = standard_poly(4).unwrap();
        assert!(is_identity(&s4, 2));
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..500 {
            let t = MatrixTuple::new(
                (0..4)
                    .map(|_| random_int_matrix(2, -3, 3, &mut rng))
                    .collect(),
            )
            .unwrap();
            assert!(evaluate(&s4, &t).unwrap().is_zero());
        }
    }

    #[test]
    fn witness_fixtures() {
        let s3 = standard_poly(3).unwrap();
        let w = nonidentity_witness(&s3, 2).unwrap();
        let v = evaluate(&s3, &w).unwrap();
        assert!(v == e(2, 1, 2) || v == e(2, 1, 2).scale(&rat_int(-1)));

        let f = ml("x1 x2");
        let w = nonidentity_witness(&f, 2).unwrap();
        assert_eq!(w.mats(), &[e(2, 1, 1), e(2, 1, 2)]);
        assert_eq!(evaluate(&f, &w).unwrap(), e(2, 1, 2));

        let s5 = standard_poly(5).unwrap();
        let w = nonidentity_witness(&s5, 3).unwrap();
        assert!(!evaluate(&s5, &w).unwrap().is_zero());

        assert!(matches!(
            nonidentity_witness(&standard_poly(4).unwrap(), 2),
            Err(PiError::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn evaluation_is_conjugation_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f = standard_poly(3).unwrap();
        for _ in 0..5 {
            let g = crate::exact_matrix::random_invertible(3, &mut rng);
            let ginv = g.inverse().unwrap();
            let t = MatrixTuple::new(
                (0..3)
                    .map(|_| random_int_matrix(3, -2, 2, &mut rng))
                    .collect(),
            )
            .unwrap();
            let conj_t = t.map(|a| &(&g * a) * &ginv);
            assert_eq!(
                evaluate(&f, &conj_t).unwrap(),
                &(&g * &evaluate(&f, &t).unwrap()) * &ginv
            );
        }
    }

    #[test]
    fn central_solutions_fixtures() {
        // s4 is lie-generated and not an identity of M_3
        let basis = central_solutions(&standard_poly(4).unwrap(), 3);
        assert_eq!(basis.len(), 1);
        assert!(!basis[0].as_scalar().expect("proportional to 1").is_zero());

        let basis = central_solutions(&ml("x1 x2 - x2 x1"), 2);
        assert_eq!(basis.len(), 1);
        assert!(basis[0].as_scalar().is_some());

        // s4 is an identity of M_2: every c works
        let basis = central_solutions(&standard_poly(4).unwrap(), 2);
        assert_eq!(basis.len(), 4);

        // x1 x2 admits only c = 0
        assert!(central_solutions(&ml("x1 x2"), 2).is_empty());
    }

    #[test]
    fn micro_identity_fixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mono4 = ml("x1 x2 x3 x4");
        let c = random_int_matrix(3, -3, 3, &mut rng);
        assert!(check_lemma23_microidentity(&mono4, 3, &c, &e(3, 1, 1)).unwrap());

        // s4 already has coefficient 1 on the identity monomial
        let s4 = standard_poly(4).unwrap();
        let em = random_rank_one_idempotent(3, &mut rng);
        let c = random_int_matrix(3, -3, 3, &mut rng);
        assert!(check_lemma23_microidentity(&s4, 3, &c, &em).unwrap());

        // c = 1: both sides collapse to e·h11 = 0
        let one = RatMatrix::identity(3);
        assert!(check_lemma23_microidentity(&mono4, 3, &one, &e(3, 1, 1)).unwrap());

        // odd degree and the d = 2 base case
        let mono5 = ml("x1 x2 x3 x4 x5");
        let c5 = random_int_matrix(3, -2, 2, &mut rng);
        assert!(check_lemma23_microidentity(&mono5, 3, &c5, &e(3, 1, 1)).unwrap());
        let mono2 = ml("x1 x2");
        assert!(check_lemma23_microidentity(&mono2, 2, &c5.clone(), &e(2, 1, 1)).is_err());
        let c2 = random_int_matrix(2, -2, 2, &mut rng);
        assert!(check_lemma23_microidentity(&mono2, 2, &c2, &e(2, 1, 1)).unwrap());

        // precondition: identity coefficient must be 1
        let bad = ml("2 x1 x2");
        assert!(matches!(
            check_lemma23_microidentity(&bad, 2, &c2, &e(2, 1, 1)),
            Err(PiError::IdentityCoefficientNotOne)
        ));
    }

    #[test]
    fn idempotent_commutation_fixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let scalar = RatMatrix::identity(3).scale(&rat_int(3));
        assert!(commutes_with_rank_one_idempotents(&scalar, 20, &mut rng));
        assert!(!commutes_with_rank_one_idempotents(
            &e(3, 1, 2),
            20,
            &mut rng
        ));
        let diag = {
            let mut m = RatMatrix::zeros(2, 2);
            m.set(0, 0, rat_int(1));
            m.set(1, 1, rat_int(2));
            m
        };
        assert!(!commutes_with_rank_one_idempotents(&diag, 20, &mut rng));
    }

    #[test]
    fn slot_map_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = standard_poly(3).unwrap();
        let mats: Vec<RatMatrix> = (0..3)
            .map(|_| random_int_matrix(3, -2, 2, &mut rng))
            .collect();
        for slot in 1..=3usize {
            let rep = slot_map(&f, &mats, slot).unwrap();
            for _ in 0..3 {
                let z = random_int_matrix(3, -2, 2, &mut rng);
                let mut subst = mats.clone();
                subst[slot - 1] = z.clone();
                let direct = evaluate(&f, &MatrixTuple::new(subst).unwrap()).unwrap();
                let via_map = RatMatrix::from_flat(3, &rep.mul_vec(&z.to_vec()));
                assert_eq!(direct, via_map);
            }
        }
    }
}
