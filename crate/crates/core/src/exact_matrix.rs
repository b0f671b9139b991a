//! Dense matrices over arbitrary-precision rationals, exact elimination,
//! and the special matrix constructions used throughout the crate: matrix
//! units, staircase sequences, rank-one idempotents and their corner unit
//! grids, and the trace bilinear form.
//!
//! Conventions fixed once for the whole crate:
//! * matrix entries are addressed 0-based via `get`/`set`;
//! * matrix units `e_ij` are addressed 1-based, matching the usual algebra
//!   notation;
//! * the basis of `M_n` as a vector space is `e_11, e_12, …, e_1n, e_21, …,
//!   e_nn` (row-major), and every flattened representation (kernel vectors,
//!   linear-map matrices, Gram matrices, JSON files) uses that order.

use crate::rat::{rat_from_str, rat_to_string, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index ({i},{j}) out of range for dimension {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("input is not a rank-one idempotent")]
    NotRankOneIdempotent,
    #[error("staircase needs d < 2n, got d={d}, n={n}")]
    StaircaseDegree { d: usize, n: usize },
}

/// Dense matrix over exact rationals. Immutable in normal use; all
/// arithmetic allocates fresh matrices.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        RatMatrix {
            rows,
            cols,
            entries: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn scalar(n: usize, c: &Rat) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        if r == 0 {
            return Err(MatrixError::DimensionMismatch("no rows".into()));
        }
        let c = rows[0].len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(MatrixError::DimensionMismatch(
                "ragged or empty rows".into(),
            ));
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer literal constructor, mostly for tests and fixtures.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| crate::rat::rat_int(v)).collect())
                .collect(),
        )
        .expect("literal rows must be rectangular")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix. Panics on non-square input.
    pub fn n(&self) -> usize {
        assert!(self.is_square(), "matrix is not square");
        self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        assert!(i < self.rows);
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// `Some(c)` iff the matrix equals `c·1` (square only).
    pub fn as_scalar(&self) -> Option<Rat> {
        if !self.is_square() {
            return None;
        }
        let c = self.get(0, 0).clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { &c } else { &Rat::zero() } as &Rat;
                if self.get(i, j) != want {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> Rat {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * c)
    }

    /// Matrix-vector product `self · v`.
    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Flattened coordinates in the fixed row-major basis order.
    pub fn to_vec(&self) -> Vec<Rat> {
        self.entries.clone()
    }

    pub fn from_flat(n: usize, v: &[Rat]) -> Self {
        assert_eq!(v.len(), n * n, "flat vector has wrong length");
        RatMatrix {
            rows: n,
            cols: n,
            entries: v.to_vec(),
        }
    }

    pub fn determinant(&self) -> Result<Rat, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        // Clear denominators row by row, then run fraction-free Bareiss
        // elimination over the integers.
        let mut denom = BigInt::one();
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let lcm = self
                .row(i)
                .iter()
                .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
            denom *= &lcm;
            m.push(
                self.row(i)
                    .iter()
                    .map(|e| e.numer() * (&lcm / e.denom()))
                    .collect(),
            );
        }
        let mut sign = 1i64;
        let mut prev = BigInt::one();
        for k in 0..n {
            let pivot = (k..n).find(|&r| !m[r][k].is_zero());
            let Some(p) = pivot else {
                return Ok(Rat::zero());
            };
            if p != k {
                m.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    debug_assert!((&num % &prev).is_zero());
                    m[i][j] = num / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        Ok(Rat::new(
            m[n - 1][n - 1].clone() * BigInt::from(sign),
            denom,
        ))
    }

    pub fn rank(&self) -> usize {
        let mut red = RowReducer::new(self.cols);
        for i in 0..self.rows {
            red.add_row(self.row(i).to_vec());
        }
        red.rank()
    }

    /// Exact basis of the right nullspace `{v : M v = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let mut red = RowReducer::new(self.cols);
        for i in 0..self.rows {
            red.add_row(self.row(i).to_vec());
        }
        red.kernel_basis()
    }

    pub fn inverse(&self) -> Result<RatMatrix, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        // Gauss-Jordan on [M | I].
        let mut aug: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
                row
            })
            .collect();
        for k in 0..n {
            let pivot = (k..n).find(|&r| !aug[r][k].is_zero());
            let Some(p) = pivot else {
                return Err(MatrixError::Singular);
            };
            aug.swap(p, k);
            let inv = aug[k][k].recip();
            for v in aug[k].iter_mut() {
                *v *= &inv;
            }
            for i in 0..n {
                if i != k && !aug[i][k].is_zero() {
                    let factor = aug[i][k].clone();
                    for j in 0..2 * n {
                        let delta = &factor * &aug[k][j];
                        aug[i][j] -= delta;
                    }
                }
            }
        }
        Ok(Self::from_fn(n, n, |i, j| aug[i][n + j].clone()))
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", rat_to_string(self.get(i, j)))?;
            }
        }
        write!(f, "]")
    }
}

macro_rules! impl_entrywise {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &RatMatrix {
            type Output = RatMatrix;
            fn $method(self, rhs: &RatMatrix) -> RatMatrix {
                assert_eq!(
                    (self.rows, self.cols),
                    (rhs.rows, rhs.cols),
                    "entrywise op dimension mismatch"
                );
                RatMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) $op rhs.get(i, j))
            }
        }
    };
}

impl_entrywise!(Add, add, +);
impl_entrywise!(Sub, sub, -);

impl Neg for &RatMatrix {
    type Output = RatMatrix;
    fn neg(self) -> RatMatrix {
        RatMatrix::from_fn(self.rows, self.cols, |i, j| -self.get(i, j).clone())
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        RatMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self.get(i, k) * rhs.get(k, j)).sum()
        })
    }
}

/// Commutator `ab - ba`.
pub fn commutator(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    &(a * b) - &(b * a)
}

/// Rank-one product `col · row`.
pub fn outer(col: &[Rat], row: &[Rat]) -> RatMatrix {
    RatMatrix::from_fn(col.len(), row.len(), |i, j| &col[i] * &row[j])
}

// ---------------------------------------------------------------------------
// Fixed basis bookkeeping
// ---------------------------------------------------------------------------

/// Flat index of `e_ij` (1-based i, j) in the fixed row-major basis order.
pub fn unit_index(n: usize, i: usize, j: usize) -> usize {
    assert!((1..=n).contains(&i) && (1..=n).contains(&j));
    (i - 1) * n + (j - 1)
}

/// Inverse of [`unit_index`]; returns 1-based `(i, j)`.
pub fn unit_position(n: usize, idx: usize) -> (usize, usize) {
    assert!(idx < n * n);
    (idx / n + 1, idx % n + 1)
}

/// The matrix unit `e_ij` (1-based indices).
pub fn matrix_unit(n: usize, i: usize, j: usize) -> Result<RatMatrix, MatrixError> {
    if !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return Err(MatrixError::IndexOutOfRange { i, j, n });
    }
    let mut m = RatMatrix::zeros(n, n);
    m.set(i - 1, j - 1, Rat::one());
    Ok(m)
}

// ---------------------------------------------------------------------------
// Incremental exact row reduction
// ---------------------------------------------------------------------------

/// Maintains a reduced-row-echelon set of constraint rows over the
/// rationals. Rows can be fed one at a time, which lets callers stop as
/// soon as the rank (equivalently the kernel) is pinned down.
pub struct RowReducer {
    ncols: usize,
    /// Sorted by pivot column; each row has a leading 1 at its pivot and
    /// zeros in every other pivot column.
    pivots: Vec<(usize, Vec<Rat>)>,
}

impl RowReducer {
    pub fn new(ncols: usize) -> Self {
        RowReducer {
            ncols,
            pivots: Vec::new(),
        }
    }

    /// Reduces `row` against the current pivots and stores it if it is
    /// independent. Returns `true` iff the rank increased.
    pub fn add_row(&mut self, mut row: Vec<Rat>) -> bool {
        assert_eq!(row.len(), self.ncols);
        for (pcol, prow) in &self.pivots {
            if !row[*pcol].is_zero() {
                let factor = row[*pcol].clone();
                for (r, p) in row.iter_mut().zip(prow.iter()) {
                    let delta = &factor * p;
                    *r -= delta;
                }
            }
        }
        let Some(lead) = row.iter().position(|v| !v.is_zero()) else {
            return false;
        };
        let inv = row[lead].recip();
        for v in row.iter_mut() {
            *v *= &inv;
        }
        for (_, prow) in self.pivots.iter_mut() {
            if !prow[lead].is_zero() {
                let factor = prow[lead].clone();
                for (p, r) in prow.iter_mut().zip(row.iter()) {
                    let delta = &factor * r;
                    *p -= delta;
                }
            }
        }
        let pos = self.pivots.partition_point(|(c, _)| *c < lead);
        self.pivots.insert(pos, (lead, row));
        true
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// True iff every stored constraint row annihilates `v`.
    pub fn annihilates(&self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.ncols);
        self.pivots
            .iter()
            .all(|(_, row)| row.iter().zip(v).map(|(a, b)| a * b).sum::<Rat>().is_zero())
    }

    /// Canonical basis of the solution space of the accumulated rows; each
    /// vector is rescaled to primitive integer form.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let pivot_cols: Vec<usize> = self.pivots.iter().map(|(c, _)| *c).collect();
        let mut basis = Vec::new();
        for free in 0..self.ncols {
            if pivot_cols.binary_search(&free).is_ok() {
                continue;
            }
            let mut v = vec![Rat::zero(); self.ncols];
            v[free] = Rat::one();
            for (pcol, prow) in &self.pivots {
                v[*pcol] = -prow[free].clone();
            }
            basis.push(primitive_integer_form(&v));
        }
        basis
    }
}

// ---------------------------------------------------------------------------
// Special constructions
// ---------------------------------------------------------------------------

/// 1-based positions `(i, j)` of the staircase unit sequence of length `d`
/// inside `M_n`: `e_11, e_12, e_22, e_23, e_33, …`, ending with `e_{k-1,k}`
/// for even `d` (k = d/2 + 1) and with `e_kk` for odd `d` (k = (d+1)/2).
pub fn staircase_positions(d: usize, n: usize) -> Result<Vec<(usize, usize)>, MatrixError> {
    if d == 0 || d >= 2 * n {
        return Err(MatrixError::StaircaseDegree { d, n });
    }
    let k = if d.is_multiple_of(2) { d / 2 + 1 } else { d.div_ceil(2) };
    debug_assert!(k <= n);
    let mut seq = Vec::with_capacity(d);
    for m in 1..k {
        seq.push((m, m));
        seq.push((m, m + 1));
    }
    if d % 2 == 1 {
        seq.push((k, k));
    }
    debug_assert_eq!(seq.len(), d);
    Ok(seq)
}

/// The staircase sequence as actual matrices. Their product is nonzero
/// (equal to `e_{1,k}`) in the listed order and zero in every other order.
pub fn staircase_units(d: usize, n: usize) -> Result<Vec<RatMatrix>, MatrixError> {
    Ok(staircase_positions(d, n)?
        .into_iter()
        .map(|(i, j)| matrix_unit(n, i, j).expect("staircase positions are in range"))
        .collect())
}

/// Random matrix with integer entries drawn uniformly from `lo..=hi`.
pub fn random_int_matrix<R: Rng + ?Sized>(n: usize, lo: i64, hi: i64, rng: &mut R) -> RatMatrix {
    RatMatrix::from_fn(n, n, |_, _| crate::rat::rat_int(rng.gen_range(lo..=hi)))
}

/// Random invertible matrix with entries in `{-2,…,2}`; redraws on
/// singular candidates so rational growth stays small downstream.
pub fn random_invertible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RatMatrix {
    loop {
        let m = random_int_matrix(n, -2, 2, rng);
        if !m.determinant().expect("square").is_zero() {
            return m;
        }
    }
}

/// Random rank-one idempotent, produced as `g · e_11 · g^{-1}` for a random
/// invertible `g` with small integer entries.
pub fn random_rank_one_idempotent<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RatMatrix {
    assert!(n >= 2, "rank-one idempotents need n >= 2");
    let g = random_invertible(n, rng);
    let ginv = g.inverse().expect("g is invertible");
    let e11 = matrix_unit(n, 1, 1).expect("in range");
    &(&g * &e11) * &ginv
}

fn is_rank_one_idempotent(e: &RatMatrix) -> bool {
    e.is_square() && e.rank() == 1 && &(e * e) == e
}

/// Matrix units of the corner algebra `(1-e) M_n (1-e)` for a rank-one
/// idempotent `e`: a grid `h_ij`, `1 <= i,j <= n-1`, with
/// `h_ij h_kl = δ_jk h_il` and `Σ h_kk = 1 - e`.
///
/// Returned as a `(n-1) x (n-1)` grid; `grid[i-1][j-1]` is `h_ij`.
pub fn corner_units(e: &RatMatrix) -> Result<Vec<Vec<RatMatrix>>, MatrixError> {
    if !is_rank_one_idempotent(e) {
        return Err(MatrixError::NotRankOneIdempotent);
    }
    let n = e.n();
    if n < 2 {
        return Err(MatrixError::NotRankOneIdempotent);
    }
    // Write e = v wᵀ with wᵀ v = 1, then change basis so e becomes e_11.
    let j0 = (0..n)
        .find(|&j| (0..n).any(|i| !e.get(i, j).is_zero()))
        .expect("rank-one matrix is nonzero");
    let v: Vec<Rat> = (0..n).map(|i| e.get(i, j0).clone()).collect();
    let i0 = v.iter().position(|x| !x.is_zero()).expect("column nonzero");
    let w: Vec<Rat> = (0..n).map(|j| e.get(i0, j) / &v[i0]).collect();
    let w_matrix = RatMatrix::from_rows(vec![w]).expect("one row");
    let kernel = w_matrix.kernel_basis();
    debug_assert_eq!(kernel.len(), n - 1);
    let p = RatMatrix::from_fn(n, n, |i, j| {
        if j == 0 {
            v[i].clone()
        } else {
            kernel[j - 1][i].clone()
        }
    });
    let pinv = p.inverse().expect("basis change is invertible");
    // h_ij = P e_{i+1,j+1} P⁻¹ = (column i+1 of P) · (row j+1 of P⁻¹).
    let grid = (1..n)
        .map(|i| {
            (1..n)
                .map(|j| {
                    let col: Vec<Rat> = (0..n).map(|r| p.get(r, i).clone()).collect();
                    outer(&col, pinv.row(j))
                })
                .collect()
        })
        .collect();
    Ok(grid)
}

/// Rescales a rational vector to its primitive integer form (denominators
/// cleared, content divided out). Zero vectors pass through unchanged.
pub fn primitive_integer_form(v: &[Rat]) -> Vec<Rat> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = scaled
        .iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return v.to_vec();
    }
    scaled
        .into_iter()
        .map(|x| Rat::from_integer(x / &gcd))
        .collect()
}

/// Writes a nonzero matrix as `c · P` with `P` primitive integer; the pair
/// `(c, P)` is returned. Zero matrices yield `(1, 0)`.
pub fn primitive_factor(m: &RatMatrix) -> (Rat, RatMatrix) {
    let flat = m.to_vec();
    let prim = primitive_integer_form(&flat);
    let scalar = flat
        .iter()
        .zip(&prim)
        .find(|(orig, _)| !orig.is_zero())
        .map(|(orig, p)| orig / p)
        .unwrap_or_else(Rat::one);
    (
        scalar,
        RatMatrix {
            rows: m.rows,
            cols: m.cols,
            entries: prim,
        },
    )
}

/// Gram matrix of the trace form `(x, y) ↦ tr(xy)` in the fixed basis:
/// `gram[(i,j),(k,l)] = tr(e_ij e_kl)`, which is 1 iff `k = j` and `l = i`.
#[derive(Clone, Debug)]
pub struct TraceFormGram {
    pub n: usize,
    pub gram: RatMatrix,
}

pub fn trace_form_gram(n: usize) -> TraceFormGram {
    assert!(n >= 1);
    let gram = RatMatrix::from_fn(n * n, n * n, |a, b| {
        let (i, j) = unit_position(n, a);
        let (k, l) = unit_position(n, b);
        if k == j && l == i {
            Rat::one()
        } else {
            Rat::zero()
        }
    });
    TraceFormGram { n, gram }
}

// ---------------------------------------------------------------------------
// JSON form: { "n": int, "entries": [["p/q", …], …] }, row-major
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    entries: Vec<Vec<String>>,
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        if !self.is_square() {
            return Err(serde::ser::Error::custom(
                "only square matrices serialize to the matrix JSON form",
            ));
        }
        let entries = (0..self.rows)
            .map(|i| self.row(i).iter().map(rat_to_string).collect())
            .collect();
        MatrixJson {
            n: self.rows,
            entries,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(de)?;
        if raw.n == 0 {
            return Err(D::Error::custom("matrix dimension must be positive"));
        }
        if raw.entries.len() != raw.n || raw.entries.iter().any(|r| r.len() != raw.n) {
            return Err(D::Error::custom(format!(
                "entries must form an {0}x{0} grid",
                raw.n
            )));
        }
        let mut m = RatMatrix::zeros(raw.n, raw.n);
        for (i, row) in raw.entries.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                m.set(i, j, rat_from_str(s).map_err(D::Error::custom)?);
            }
        }
        Ok(m)
    }
}
