//! Membership predicates for the classical subgroups of `GL(n²)` acting on
//! matrix space (similarity transformations, central shifts, scalar-pair
//! maps, and the orthogonal groups of the trace form), plus the four-unit
//! basis swap θ and its zero-set breaking witness.

use crate::exact_matrix::{matrix_unit, trace_form_gram, unit_position, MatrixError, RatMatrix};
use crate::free_algebra::MultilinearPoly;
use crate::pi_lab::{evaluate, nonidentity_witness, MatrixTuple, PiError};
use crate::preserver_lab::MatrixLinearMap;
use crate::rat::Rat;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("map is singular")]
    SingularMap,
    #[error("construction needs n >= {need}, got n = {n}")]
    DimensionTooSmall { n: usize, need: usize },
    #[error("need 2 <= d < 2n, got d = {d}, n = {n}")]
    DegreeOutOfRange { d: usize, n: usize },
    #[error("witness verification failed; the staircase/θ invariants do not hold")]
    WitnessInvariantViolated,
    #[error(transparent)]
    Pi(#[from] PiError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Exact membership flags for one invertible linear transformation of
/// `M_n`, decided by finite linear-algebra tests in the fixed basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupMembershipReport {
    /// Similarity transformations `x ↦ a x a⁻¹` (unital + multiplicative).
    pub in_g: bool,
    /// Acts trivially on the traceless space and on its quotient.
    pub in_p: bool,
    /// `x ↦ x + g(x)·1` with `g(1) = 0`.
    pub in_q: bool,
    /// Scalar on the traceless space and scalar on the identity line.
    pub in_t: bool,
    pub in_t1: bool,
    /// Preserves the trace form `tr(xy)`.
    pub in_o_full: bool,
    /// Preserves the trace form and fixes the identity matrix.
    pub in_o_fix1: bool,
    pub in_so_full: bool,
    pub in_so_fix1: bool,
    #[serde(with = "crate::rat::rat_string")]
    pub det: Rat,
    pub fixes_unity: bool,
    pub preserves_scalars: bool,
}

fn proportional(image: &RatMatrix, base: &RatMatrix) -> Option<Rat> {
    let mut ratio: Option<Rat> = None;
    'find: for i in 0..base.rows() {
        for j in 0..base.cols() {
            if !base.get(i, j).is_zero() {
                ratio = Some(image.get(i, j) / base.get(i, j));
                break 'find;
            }
        }
    }
    let ratio = ratio?;
    if image == &base.scale(&ratio) {
        Some(ratio)
    } else {
        None
    }
}

fn traceless_basis(n: usize) -> Vec<RatMatrix> {
    let mut basis = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                basis.push(matrix_unit(n, i, j).expect("in range"));
            }
        }
    }
    for i in 1..n {
        let diff = &matrix_unit(n, i, i).expect("in range")
            - &matrix_unit(n, i + 1, i + 1).expect("in range");
        basis.push(diff);
    }
    basis
}

pub fn membership_report(map: &MatrixLinearMap) -> Result<GroupMembershipReport, GroupError> {
    let n = map.n();
    let det = map.det();
    if det.is_zero() {
        return Err(GroupError::SingularMap);
    }
    let one = RatMatrix::identity(n);
    let unity_image = map.apply(&one);
    let fixes_unity = unity_image == one;
    let preserves_scalars = unity_image
        .as_scalar()
        .map(|c| !c.is_zero())
        .unwrap_or(false);

    let unit_images: Vec<RatMatrix> = (0..n * n)
        .map(|idx| {
            let (i, j) = unit_position(n, idx);
            map.apply(&matrix_unit(n, i, j).expect("in range"))
        })
        .collect();

    // G: unital and multiplicative on all basis pairs; an invertible
    // unital algebra endomorphism of M_n is an inner automorphism.
    let mut in_g = fixes_unity;
    'mult: for a in 0..n * n {
        if !in_g {
            break;
        }
        let (i, j) = unit_position(n, a);
        for b in 0..n * n {
            let (k, l) = unit_position(n, b);
            let lhs = if j == k {
                unit_images[(i - 1) * n + (l - 1)].clone()
            } else {
                RatMatrix::zeros(n, n)
            };
            if lhs != &unit_images[a] * &unit_images[b] {
                in_g = false;
                break 'mult;
            }
        }
    }

    let traceless = traceless_basis(n);
    let in_p = traceless.iter().all(|x| map.apply(x) == *x)
        && unity_image.trace() == Rat::from_integer((n as i64).into());

    let in_q = fixes_unity
        && (0..n * n).all(|idx| {
            let (i, j) = unit_position(n, idx);
            let u = matrix_unit(n, i, j).expect("in range");
            (&unit_images[idx] - &u).as_scalar().is_some()
        });

    let in_t = preserves_scalars && {
        let mut beta: Option<Rat> = None;
        let mut ok = true;
        for x in &traceless {
            match proportional(&map.apply(x), x) {
                Some(c) => match &beta {
                    Some(b) if *b != c => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        if c.is_zero() {
                            ok = false;
                            break;
                        }
                        beta = Some(c);
                    }
                },
                None => {
                    ok = false;
                    break;
                }
            }
        }
        ok && beta.is_some()
    };
    let in_t1 = in_t && det == Rat::one();

    let gram = trace_form_gram(n).gram;
    let rep = map.rep();
    let in_o_full = &(&rep.transpose() * &gram) * rep == gram;
    let in_o_fix1 = in_o_full && fixes_unity;
    let in_so_full = in_o_full && det == Rat::one();
    let in_so_fix1 = in_o_fix1 && det == Rat::one();

    Ok(GroupMembershipReport {
        in_g,
        in_p,
        in_q,
        in_t,
        in_t1,
        in_o_full,
        in_o_fix1,
        in_so_full,
        in_so_fix1,
        det,
        fixes_unity,
        preserves_scalars,
    })
}

/// The involution θ: swaps `e_12 ↔ e_21` and `e_11 ↔ e_33`, fixes all
/// other matrix units. Needs `n >= 3`; lies in `SO(n²-1)`.
pub fn build_theta(n: usize) -> Result<MatrixLinearMap, GroupError> {
    if n < 3 {
        return Err(GroupError::DimensionTooSmall { n, need: 3 });
    }
    let images: Vec<RatMatrix> = (0..n * n)
        .map(|idx| {
            let (i, j) = unit_position(n, idx);
            let (ti, tj) = match (i, j) {
                (1, 2) => (2, 1),
                (2, 1) => (1, 2),
                (1, 1) => (3, 3),
                (3, 3) => (1, 1),
                other => other,
            };
            matrix_unit(n, ti, tj).expect("in range")
        })
        .collect();
    Ok(MatrixLinearMap::from_images(n, &images))
}

/// Produces the pair `(t, θt)` for the staircase witness `t` of `f`:
/// `f(t) ≠ 0` while `f(θt) = 0`, both verified exactly before returning.
/// A verification failure is a hard error.
pub fn theta_breaks_zero_set(
    f: &MultilinearPoly,
    n: usize,
) -> Result<(MatrixTuple, MatrixTuple), GroupError> {
    let d = f.degree();
    if d < 2 || d >= 2 * n {
        return Err(GroupError::DegreeOutOfRange { d, n });
    }
    let theta = build_theta(n)?;
    let witness = nonidentity_witness(f, n)?;
    let image = theta.apply_tuple(&witness);
    let value = evaluate(f, &witness)?;
    let image_value = evaluate(f, &image)?;
    if value.is_zero() || !image_value.is_zero() {
        return Err(GroupError::WitnessInvariantViolated);
    }
    Ok((witness, image))
}
