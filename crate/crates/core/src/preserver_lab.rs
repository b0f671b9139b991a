//! Linear maps on matrix space: standard-form assembly, zero-set sampling,
//! zero-preservation checking, structure recovery, and the checkable
//! consequences of the coefficient-sum conditions.
//!
//! A map is stored as its n²×n² matrix in the fixed row-major basis order,
//! so composition is matrix multiplication. The standard form is
//! `x ↦ α·a·x̃·a⁻¹ + g(x)·1` with `x̃` either `x` or its transpose and `g`
//! a linear functional; the assembled map is invertible iff `g(1) ≠ -α`.
//! (In the standard-form literature the functional is often written `f`;
//! it is called `g` throughout this crate to avoid colliding with the
//! polynomial `f`.)

use crate::exact_matrix::RowReducer;
use crate::exact_matrix::{
    commutator, matrix_unit, random_int_matrix, random_invertible, unit_position, MatrixError,
    RatMatrix,
};
use crate::free_algebra::{classify, MultilinearPoly};
use crate::pi_lab::{evaluate, slot_map, MatrixTuple, PiError};
use crate::rat::{rat_int, Rat};
use num_traits::{One, Zero};
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PreserverError {
    #[error("map representation side {side} is not a perfect square")]
    RepNotSquareDimension { side: usize },
    #[error("map is singular")]
    SingularMap,
    #[error("invalid standard-form parameters: {0}")]
    InvalidParams(String),
    #[error("g(1) = -alpha makes the standard map singular")]
    SingularParams,
    #[error("zero sampling exhausted its retry budget ({retries} attempts)")]
    SamplingExhausted { retries: usize },
    #[error("map does not send 1 to a nonzero scalar multiple of 1")]
    UnityNotScalar,
    #[error("polynomial satisfies neither condition (A) nor condition (B)")]
    UnsupportedCondition,
    #[error(transparent)]
    Pi(#[from] PiError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Algebra(#[from] crate::free_algebra::FreeAlgebraError),
}

// ---------------------------------------------------------------------------
// Linear maps on M_n
// ---------------------------------------------------------------------------

/// Invertible-or-not linear transformation of `M_n`, stored as its n²×n²
/// coordinate matrix. Serializes as the plain matrix JSON with side n².
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixLinearMap {
    n: usize,
    rep: RatMatrix,
}

impl MatrixLinearMap {
    pub fn from_rep(rep: RatMatrix) -> Result<Self, PreserverError> {
        let side = rep.n();
        let n = (1..=side).find(|k| k * k == side);
        match n {
            Some(n) => Ok(MatrixLinearMap { n, rep }),
            None => Err(PreserverError::RepNotSquareDimension { side }),
        }
    }

    pub fn identity(n: usize) -> Self {
        MatrixLinearMap {
            n,
            rep: RatMatrix::identity(n * n),
        }
    }

    /// Builds the map from the images of the basis units in order: the
    /// column at index `(i,j)` is the flattened image of `e_ij`.
    pub fn from_images(n: usize, images: &[RatMatrix]) -> Self {
        assert_eq!(images.len(), n * n, "one image per basis unit");
        let rep = RatMatrix::from_fn(n * n, n * n, |r, c| images[c].to_vec()[r].clone());
        MatrixLinearMap { n, rep }
    }

    /// `x ↦ a x a⁻¹`.
    pub fn conjugation(a: &RatMatrix) -> Result<Self, PreserverError> {
        let n = a.n();
        let ainv = a.inverse().map_err(PreserverError::Matrix)?;
        let images: Vec<RatMatrix> = (0..n * n)
            .map(|idx| {
                let (i, j) = unit_position(n, idx);
                let u = matrix_unit(n, i, j).expect("in range");
                &(a * &u) * &ainv
            })
            .collect();
        Ok(Self::from_images(n, &images))
    }

    /// The transposition map τ.
    pub fn transpose_map(n: usize) -> Self {
        let images: Vec<RatMatrix> = (0..n * n)
            .map(|idx| {
                let (i, j) = unit_position(n, idx);
                matrix_unit(n, j, i).expect("in range")
            })
            .collect();
        Self::from_images(n, &images)
    }

    /// `x ↦ c·x`.
    pub fn scalar_map(n: usize, c: &Rat) -> Self {
        MatrixLinearMap {
            n,
            rep: RatMatrix::scalar(n * n, c),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rep(&self) -> &RatMatrix {
        &self.rep
    }

    pub fn det(&self) -> Rat {
        self.rep.determinant().expect("rep is square")
    }

    pub fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }

    pub fn apply(&self, x: &RatMatrix) -> RatMatrix {
        assert_eq!(x.n(), self.n, "map applied to wrong dimension");
        RatMatrix::from_flat(self.n, &self.rep.mul_vec(&x.to_vec()))
    }

    pub fn apply_tuple(&self, t: &MatrixTuple) -> MatrixTuple {
        // factor the representation once and run the products over plain
        // integers; the rational scalars multiply back in at the end
        let n = self.n;
        let n2 = n * n;
        let (c_rep, int_rep) = crate::exact_matrix::primitive_factor(&self.rep);
        let rep_ints: Vec<num_bigint::BigInt> =
            int_rep.to_vec().iter().map(|x| x.numer().clone()).collect();
        t.map(|x| {
            let (c_x, int_x) = crate::exact_matrix::primitive_factor(x);
            if int_x.is_zero() {
                return RatMatrix::zeros(n, n);
            }
            let xv: Vec<num_bigint::BigInt> =
                int_x.to_vec().iter().map(|e| e.numer().clone()).collect();
            let entries: Vec<Rat> = (0..n2)
                .map(|r| {
                    let mut acc = num_bigint::BigInt::from(0);
                    for (k, xk) in xv.iter().enumerate() {
                        if !xk.is_zero() {
                            acc += &rep_ints[r * n2 + k] * xk;
                        }
                    }
                    Rat::from_integer(acc)
                })
                .collect();
            RatMatrix::from_flat(n, &entries).scale(&(&c_rep * &c_x))
        })
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MatrixLinearMap) -> MatrixLinearMap {
        assert_eq!(self.n, inner.n);
        MatrixLinearMap {
            n: self.n,
            rep: &self.rep * &inner.rep,
        }
    }

    pub fn inverse(&self) -> Result<MatrixLinearMap, PreserverError> {
        let rep = self
            .rep
            .inverse()
            .map_err(|_| PreserverError::SingularMap)?;
        Ok(MatrixLinearMap { n: self.n, rep })
    }
}

impl Serialize for MatrixLinearMap {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.rep.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for MatrixLinearMap {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rep = RatMatrix::deserialize(de)?;
        MatrixLinearMap::from_rep(rep).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Standard form
// ---------------------------------------------------------------------------

/// Parameters `(α, a, g, transpose)` of the standard form
/// `x ↦ α·a·x̃·a⁻¹ + g(x)·1`. Construction validates `α ≠ 0`, `a`
/// invertible, and `g(1) ≠ -α` (so the assembled map is invertible).
#[derive(Clone, Debug, PartialEq)]
pub struct StandardFormParams {
    alpha: Rat,
    a: RatMatrix,
    g: Vec<Rat>,
    transpose: bool,
}

impl StandardFormParams {
    pub fn new(
        alpha: Rat,
        a: RatMatrix,
        g: Vec<Rat>,
        transpose: bool,
    ) -> Result<Self, PreserverError> {
        if alpha.is_zero() {
            return Err(PreserverError::InvalidParams(
                "alpha must be nonzero".into(),
            ));
        }
        if !a.is_square() {
            return Err(PreserverError::InvalidParams("a must be square".into()));
        }
        let n = a.n();
        if g.len() != n * n {
            return Err(PreserverError::InvalidParams(format!(
                "g must have n² = {} coordinates, found {}",
                n * n,
                g.len()
            )));
        }
        if a.determinant().expect("square").is_zero() {
            return Err(PreserverError::InvalidParams("a must be invertible".into()));
        }
        let params = StandardFormParams {
            alpha,
            a,
            g,
            transpose,
        };
        if params.g_at_identity() == -params.alpha.clone() {
            return Err(PreserverError::SingularParams);
        }
        Ok(params)
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn alpha(&self) -> &Rat {
        &self.alpha
    }

    pub fn a(&self) -> &RatMatrix {
        &self.a
    }

    pub fn g(&self) -> &[Rat] {
        &self.g
    }

    pub fn transpose(&self) -> bool {
        self.transpose
    }

    /// `g(x) = Σ g_ij x_ij` in the fixed basis order.
    pub fn g_of(&self, x: &RatMatrix) -> Rat {
        self.g.iter().zip(x.to_vec()).map(|(gc, xc)| gc * &xc).sum()
    }

    pub fn g_at_identity(&self) -> Rat {
        let n = self.n();
        (0..n).map(|i| &self.g[i * n + i]).sum()
    }

    pub fn assemble(&self) -> MatrixLinearMap {
        assemble_standard_map(&self.alpha, &self.a, &self.g, self.transpose)
            .expect("validated parameters assemble")
    }
}

/// Assembles `x ↦ α·a·x̃·a⁻¹ + g(x)·1` without the invertibility gate, so
/// boundary cases `g(1) = -α` (singular maps) can be built and inspected.
pub fn assemble_standard_map(
    alpha: &Rat,
    a: &RatMatrix,
    g: &[Rat],
    transpose: bool,
) -> Result<MatrixLinearMap, PreserverError> {
    let n = a.n();
    if g.len() != n * n {
        return Err(PreserverError::InvalidParams(format!(
            "g must have n² = {} coordinates, found {}",
            n * n,
            g.len()
        )));
    }
    let ainv = a
        .inverse()
        .map_err(|_| PreserverError::InvalidParams("a must be invertible".into()))?;
    let one = RatMatrix::identity(n);
    let images: Vec<RatMatrix> = (0..n * n)
        .map(|idx| {
            let (i, j) = unit_position(n, idx);
            let u = if transpose {
                matrix_unit(n, j, i).expect("in range")
            } else {
                matrix_unit(n, i, j).expect("in range")
            };
            let conj = (&(a * &u) * &ainv).scale(alpha);
            &conj + &one.scale(&g[idx])
        })
        .collect();
    Ok(MatrixLinearMap::from_images(n, &images))
}

/// Assembles validated parameters into their (invertible) map.
pub fn standard_map(p: &StandardFormParams) -> MatrixLinearMap {
    p.assemble()
}

#[derive(Serialize, Deserialize)]
struct ParamsJson {
    alpha: String,
    a: RatMatrix,
    g: Vec<String>,
    transpose: bool,
}

impl Serialize for StandardFormParams {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ParamsJson {
            alpha: crate::rat::rat_to_string(&self.alpha),
            a: self.a.clone(),
            g: self.g.iter().map(crate::rat::rat_to_string).collect(),
            transpose: self.transpose,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for StandardFormParams {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = ParamsJson::deserialize(de)?;
        let alpha = crate::rat::rat_from_str(&raw.alpha).map_err(D::Error::custom)?;
        let g = raw
            .g
            .iter()
            .map(|s| crate::rat::rat_from_str(s).map_err(D::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        StandardFormParams::new(alpha, raw.a, g, raw.transpose).map_err(D::Error::custom)
    }
}

/// Random validated standard-form parameters with small integer data.
pub fn random_standard_params<R: Rng + ?Sized>(
    n: usize,
    transpose: bool,
    rng: &mut R,
) -> StandardFormParams {
    loop {
        let alpha = loop {
            let v = rng.gen_range(-3i64..=3);
            if v != 0 {
                break rat_int(v);
            }
        };
        let a = random_invertible(n, rng);
        let g: Vec<Rat> = (0..n * n).map(|_| rat_int(rng.gen_range(-2..=2))).collect();
        if let Ok(p) = StandardFormParams::new(alpha, a, g, transpose) {
            return p;
        }
    }
}

// ---------------------------------------------------------------------------
// Zero sampling
// ---------------------------------------------------------------------------

use crate::exact_matrix::primitive_integer_form;

fn random_kernel_element<R: Rng + ?Sized>(
    kernel: &[Vec<Rat>],
    n: usize,
    rng: &mut R,
) -> Option<RatMatrix> {
    if kernel.is_empty() {
        return None;
    }
    for _ in 0..8 {
        let mut v = vec![Rat::zero(); n * n];
        for b in kernel {
            let c = rat_int(rng.gen_range(-2..=2));
            if c.is_zero() {
                continue;
            }
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += &c * bi;
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            return Some(RatMatrix::from_flat(n, &primitive_integer_form(&v)));
        }
    }
    // deterministic last resort: the first basis vector
    Some(RatMatrix::from_flat(n, &primitive_integer_form(&kernel[0])))
}

/// Exact zero of `f` on `M_n`: draws all but one slot, solves the
/// remaining slot inside the kernel of the induced linear map, and rotates
/// the solved slot and the draw style across retries. Falls back to a
/// conjugated nilpotent tuple, all of whose monomials vanish.
pub fn sample_zero<R: Rng + ?Sized>(
    f: &MultilinearPoly,
    n: usize,
    rng: &mut R,
) -> Result<MatrixTuple, PreserverError> {
    let d = f.degree();
    if d == 0 {
        return Err(PiError::DegreeTooSmall(0).into());
    }
    if d == 1 {
        // the slot map of c·x1 is injective for nonzero f; the only zero
        // is the zero matrix
        return Ok(MatrixTuple::new(vec![RatMatrix::zeros(n, n)])?);
    }
    let retries = 3 * d;
    for attempt in 0..retries {
        let solved_slot = attempt % d + 1;
        let style = (attempt / d) % 3;
        // ±1 draws keep the slot-map minors (hence the kernel entries)
        // near word size
        let mats: Vec<RatMatrix> = (0..d)
            .map(|_| match style {
                0 => random_int_matrix(n, -1, 1, rng),
                1 => {
                    let col: Vec<Rat> = (0..n).map(|_| rat_int(rng.gen_range(-1..=1))).collect();
                    let row: Vec<Rat> = (0..n).map(|_| rat_int(rng.gen_range(-1..=1))).collect();
                    crate::exact_matrix::outer(&col, &row)
                }
                _ => {
                    let i = rng.gen_range(1..=n);
                    let j = rng.gen_range(1..=n);
                    matrix_unit(n, i, j).expect("in range")
                }
            })
            .collect();
        let rep = slot_map(f, &mats, solved_slot)?;
        let kernel = rep.kernel_basis();
        if let Some(z) = random_kernel_element(&kernel, n, rng) {
            let mut full = mats;
            full[solved_slot - 1] = z;
            let tuple = MatrixTuple::new(full)?;
            let value = evaluate(f, &tuple)?;
            assert!(value.is_zero(), "slot-kernel element must be a zero");
            return Ok(tuple);
        }
    }
    // Conjugates of a square-zero unit: every monomial of a multilinear
    // polynomial of degree >= 2 repeats the unit, hence vanishes.
    let g = random_invertible(n, rng);
    let ginv = g.inverse().expect("invertible");
    let c = &(&g * &matrix_unit(n, 1, 2).expect("n >= 2 here")) * &ginv;
    let scales: [i64; 4] = [-2, -1, 1, 2];
    let mats: Vec<RatMatrix> = (0..d)
        .map(|_| c.scale(&rat_int(scales[rng.gen_range(0..4)])))
        .collect();
    let tuple = MatrixTuple::new(mats)?;
    let value = evaluate(f, &tuple)?;
    if !value.is_zero() {
        return Err(PreserverError::SamplingExhausted { retries });
    }
    Ok(tuple)
}

// ---------------------------------------------------------------------------
// Zero preservation
// ---------------------------------------------------------------------------

/// Outcome of a sampled zero-preservation check. A failed verdict always
/// carries a counterexample `(t, v)` with `f(t) = 0` and
/// `v = f(L(t)) ≠ 0`, both exact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PreserveVerdict {
    pub passed: bool,
    pub trials_run: usize,
    pub counterexample: Option<(MatrixTuple, RatMatrix)>,
}

fn is_violation(
    f: &MultilinearPoly,
    map: &MatrixLinearMap,
    t: &MatrixTuple,
) -> Result<bool, PreserverError> {
    Ok(evaluate(f, t)?.is_zero() && !evaluate(f, &map.apply_tuple(t))?.is_zero())
}

/// Replaces a sampled counterexample by the lexicographically first
/// violating matrix-unit tuple when the unit-tuple space is small enough
/// to scan, else greedily swaps single slots for units.
fn minimize_counterexample(
    f: &MultilinearPoly,
    map: &MatrixLinearMap,
    start: MatrixTuple,
) -> Result<MatrixTuple, PreserverError> {
    let n = start.dim();
    let d = start.len();
    let n2 = n * n;
    let space: usize = n2.checked_pow(d as u32).unwrap_or(usize::MAX);
    let units: Vec<RatMatrix> = (0..n2)
        .map(|idx| {
            let (i, j) = unit_position(n, idx);
            matrix_unit(n, i, j).expect("in range")
        })
        .collect();
    if space <= 20_000 {
        let mut digits = vec![0usize; d];
        loop {
            let tuple = MatrixTuple::new(digits.iter().map(|&u| units[u].clone()).collect())?;
            if is_violation(f, map, &tuple)? {
                return Ok(tuple);
            }
            let mut k = d;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < n2 {
                    break;
                }
                digits[k] = 0;
                if k == 0 {
                    k = usize::MAX;
                    break;
                }
            }
            if k == usize::MAX {
                break;
            }
        }
        return Ok(start);
    }
    let mut current = start;
    for _pass in 0..2 {
        for slot in 0..d {
            for u in &units {
                let mut mats = current.mats().to_vec();
                mats[slot] = u.clone();
                let candidate = MatrixTuple::new(mats)?;
                if is_violation(f, map, &candidate)? {
                    current = candidate;
                    break;
                }
            }
        }
    }
    Ok(current)
}

/// Samples zeros of `f` and checks that their images under `map` are still
/// zeros; stops at the first violation and reports a minimized exact
/// counterexample.
pub fn check_preserves_zeros<R: Rng + ?Sized>(
    f: &MultilinearPoly,
    map: &MatrixLinearMap,
    trials: usize,
    rng: &mut R,
) -> Result<PreserveVerdict, PreserverError> {
    let n = map.n();
    for trial in 0..trials {
        let t = sample_zero(f, n, rng)?;
        let image_value = evaluate(f, &map.apply_tuple(&t))?;
        if !image_value.is_zero() {
            let minimized = minimize_counterexample(f, map, t)?;
            let value = evaluate(f, &map.apply_tuple(&minimized))?;
            debug_assert!(evaluate(f, &minimized)?.is_zero());
            debug_assert!(!value.is_zero());
            return Ok(PreserveVerdict {
                passed: false,
                trials_run: trial + 1,
                counterexample: Some((minimized, value)),
            });
        }
    }
    Ok(PreserveVerdict {
        passed: true,
        trials_run: trials,
        counterexample: None,
    })
}

// ---------------------------------------------------------------------------
// Orthogonal pairs and lemma consequences
// ---------------------------------------------------------------------------

/// Random pair `(a, b)` with `ab = ba = 0` exactly: complementary corners
/// of a random diagonal idempotent, conjugated by a random invertible.
pub fn sample_orthogonal_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (RatMatrix, RatMatrix) {
    assert!(n >= 2, "orthogonal pairs need n >= 2");
    loop {
        // random proper nonempty diagonal idempotent
        let mask: Vec<bool> = loop {
            let m: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            let ones = m.iter().filter(|&&b| b).count();
            if ones > 0 && ones < n {
                break m;
            }
        };
        let p = RatMatrix::from_fn(n, n, |i, j| {
            if i == j && mask[i] {
                Rat::one()
            } else {
                Rat::zero()
            }
        });
        let q = &RatMatrix::identity(n) - &p;
        let x = random_int_matrix(n, -2, 2, rng);
        let y = random_int_matrix(n, -2, 2, rng);
        let pxp = &(&p * &x) * &p;
        let qyq = &(&q * &y) * &q;
        if pxp.is_zero() || qyq.is_zero() {
            continue;
        }
        let g = random_invertible(n, rng);
        let ginv = g.inverse().expect("invertible");
        let a = &(&g * &pxp) * &ginv;
        let b = &(&g * &qyq) * &ginv;
        debug_assert!((&a * &b).is_zero() && (&b * &a).is_zero());
        return (a, b);
    }
}

/// For `f` satisfying condition (A) (resp. (B)) and a map with
/// `L(1) = λ̂·1`, checks on sampled orthogonal pairs that the images under
/// `(1/λ̂)·L` anticommute (resp. commute). This samples a consequence of
/// the conditions; it cannot prove zero preservation.
pub fn check_orthogonality_consequence<R: Rng + ?Sized>(
    f: &MultilinearPoly,
    map: &MatrixLinearMap,
    trials: usize,
    rng: &mut R,
) -> Result<bool, PreserverError> {
    let report = classify(f)?;
    if !report.cond_a && !report.cond_b {
        return Err(PreserverError::UnsupportedCondition);
    }
    let n = map.n();
    let unity_image = map.apply(&RatMatrix::identity(n));
    let lambda_hat = unity_image
        .as_scalar()
        .filter(|c| !c.is_zero())
        .ok_or(PreserverError::UnityNotScalar)?;
    let scale = lambda_hat.recip();
    for _ in 0..trials {
        let (a, b) = sample_orthogonal_pair(n, rng);
        let fa = map.apply(&a).scale(&scale);
        let fb = map.apply(&b).scale(&scale);
        let holds = if report.cond_a {
            (&(&fa * &fb) + &(&fb * &fa)).is_zero()
        } else {
            (&(&fa * &fb) - &(&fb * &fa)).is_zero()
        };
        if !holds {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks `L(1) = α·1` for nonzero `α` and then samples the squaring
/// condition `θ(x²) = θ(x)²` for `θ = (1/α)·L`. A `false` is exact; a
/// `true` is a sampling verdict.
pub fn is_scalar_multiple_of_jordan<R: Rng + ?Sized>(
    map: &MatrixLinearMap,
    trials: usize,
    rng: &mut R,
) -> (bool, Option<Rat>) {
    let n = map.n();
    let unity_image = map.apply(&RatMatrix::identity(n));
    let Some(alpha) = unity_image.as_scalar().filter(|c| !c.is_zero()) else {
        return (false, None);
    };
    let scale = alpha.recip();
    for _ in 0..trials {
        let x = random_int_matrix(n, -2, 2, rng);
        let lhs = map.apply(&(&x * &x)).scale(&scale);
        let theta_x = map.apply(&x).scale(&scale);
        if lhs != &theta_x * &theta_x {
            return (false, None);
        }
    }
    (true, Some(alpha))
}

// ---------------------------------------------------------------------------
// Decomposition (structure recovery)
// ---------------------------------------------------------------------------

fn traceless_part(x: &RatMatrix) -> RatMatrix {
    let n = x.n();
    let shift = x.trace() / rat_int(n as i64);
    x - &RatMatrix::scalar(n, &shift)
}

/// Ratio `b = c·r` over matrices, if a consistent scalar exists and `r` is
/// nonzero.
fn matrix_ratio(b: &RatMatrix, r: &RatMatrix) -> Option<Rat> {
    let n = r.rows();
    let mut c: Option<Rat> = None;
    for i in 0..n {
        for j in 0..r.cols() {
            if !r.get(i, j).is_zero() {
                c = Some(b.get(i, j) / r.get(i, j));
                break;
            }
        }
        if c.is_some() {
            break;
        }
    }
    let c = c?;
    if b == &r.scale(&c) {
        Some(c)
    } else {
        None
    }
}

/// Attempts to write an invertible map as `x ↦ α·a·x̃·a⁻¹ + g(x)·1`.
/// Returns `Ok(None)` when the map is not of this form. The recovered `a`
/// is normalized so its first nonzero entry in basis order is 1.
pub fn decompose_standard(
    map: &MatrixLinearMap,
) -> Result<Option<StandardFormParams>, PreserverError> {
    let n = map.n();
    if !map.is_invertible() {
        return Err(PreserverError::SingularMap);
    }
    if n == 1 {
        let alpha = map.rep().get(0, 0).clone();
        let params =
            StandardFormParams::new(alpha, RatMatrix::identity(1), vec![Rat::zero()], false)?;
        return Ok(Some(params));
    }
    // Probe for ±α via [L(x), L(y)] = ±α · (traceless part of L([x,y])).
    let probes: [((usize, usize), (usize, usize)); 3] =
        [((1, 2), (2, 2)), ((1, 2), (2, 1)), ((2, 1), (1, 1))];
    let mut ratio: Option<Rat> = None;
    for ((i1, j1), (i2, j2)) in probes {
        let x = matrix_unit(n, i1, j1)?;
        let y = matrix_unit(n, i2, j2)?;
        let bracket_image = commutator(&map.apply(&x), &map.apply(&y));
        let image_bracket = traceless_part(&map.apply(&commutator(&x, &y)));
        if image_bracket.is_zero() {
            if !bracket_image.is_zero() {
                return Ok(None);
            }
            continue;
        }
        match matrix_ratio(&bracket_image, &image_bracket) {
            Some(c) if !c.is_zero() => {
                ratio = Some(c);
                break;
            }
            _ => return Ok(None),
        }
    }
    let Some(c) = ratio else {
        return Ok(None);
    };
    let one = RatMatrix::identity(n);
    for alpha in [c.clone(), -c] {
        // g is forced by traces: tr(L(x)) = α·tr(x) + n·g(x)
        let g: Vec<Rat> = (0..n * n)
            .map(|idx| {
                let (i, j) = unit_position(n, idx);
                let u = matrix_unit(n, i, j).expect("in range");
                let tr_unit = if i == j { Rat::one() } else { Rat::zero() };
                (map.apply(&u).trace() - &alpha * tr_unit) / rat_int(n as i64)
            })
            .collect();
        let alpha_inv = alpha.recip();
        let psi: Vec<RatMatrix> = (0..n * n)
            .map(|idx| {
                let (i, j) = unit_position(n, idx);
                let u = matrix_unit(n, i, j).expect("in range");
                (&map.apply(&u) - &one.scale(&g[idx])).scale(&alpha_inv)
            })
            .collect();
        for transpose in [false, true] {
            // solve ψ(x)·a = a·x̃ over all basis x
            let mut reducer = RowReducer::new(n * n);
            'feed: for idx in 0..n * n {
                let (i, j) = unit_position(n, idx);
                let xt = if transpose {
                    matrix_unit(n, j, i).expect("in range")
                } else {
                    matrix_unit(n, i, j).expect("in range")
                };
                for r in 0..n {
                    for s in 0..n {
                        let mut row = vec![Rat::zero(); n * n];
                        for k in 0..n {
                            row[k * n + s] += psi[idx].get(r, k);
                            row[r * n + k] -= xt.get(k, s);
                        }
                        if row.iter().any(|v| !v.is_zero()) {
                            reducer.add_row(row);
                        }
                        if reducer.rank() == n * n {
                            break 'feed;
                        }
                    }
                }
                if reducer.rank() == n * n - 1 {
                    break;
                }
            }
            for v in reducer.kernel_basis() {
                let cand = RatMatrix::from_flat(n, &v);
                if cand.determinant().expect("square").is_zero() {
                    continue;
                }
                let lead = v
                    .iter()
                    .find(|x| !x.is_zero())
                    .expect("kernel vector nonzero")
                    .clone();
                let a_norm = cand.scale(&lead.recip());
                let Ok(params) =
                    StandardFormParams::new(alpha.clone(), a_norm, g.clone(), transpose)
                else {
                    continue;
                };
                if params.assemble().rep() == map.rep() {
                    return Ok(Some(params));
                }
            }
        }
    }
    Ok(None)
}
