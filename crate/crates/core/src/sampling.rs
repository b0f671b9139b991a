//! Seeded random generators for polynomials used by the randomized
//! verification suites. Coefficients are kept small so that downstream
//! exact arithmetic stays cheap.

use crate::exact_matrix::RowReducer;
use crate::free_algebra::{MultilinearPoly, Perm};
use crate::rat::{rat_int, Rat};
use itertools::Itertools;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random nonzero multilinear polynomial of degree `d` with integer
/// coefficients in `{-3,…,3}` on at most `max_terms` random permutations.
pub fn random_multilinear<R: Rng + ?Sized>(
    d: usize,
    max_terms: usize,
    rng: &mut R,
) -> MultilinearPoly {
    assert!(d >= 1);
    loop {
        let terms = rng.gen_range(1..=max_terms.max(1));
        let coeffs: Vec<(Perm, Rat)> = (0..terms)
            .map(|_| {
                let mut images: Vec<u8> = (1..=d as u8).collect();
                images.shuffle(rng);
                let perm = Perm::from_one_line(images).expect("shuffled identity");
                (perm, rat_int(rng.gen_range(-3..=3)))
            })
            .collect();
        let f = MultilinearPoly::from_coeffs(d, coeffs).expect("degrees match");
        if !f.is_zero() {
            return f;
        }
    }
}

/// Basis of the subspace of degree-`d` multilinear polynomials whose unit
/// substitution vanishes in every slot (the multilinear part of the
/// subalgebra generated by 1 and Lie polynomials). Computed by exact
/// elimination on the substitution constraints; intended for small degrees
/// (the system has d! columns).
pub fn lie_multilinear_basis(d: usize) -> Vec<MultilinearPoly> {
    assert!((2..=6).contains(&d), "basis computed for 2 <= d <= 6");
    let perms: Vec<Perm> = (1..=d as u8)
        .permutations(d)
        .map(|im| Perm::from_one_line(im).expect("permutation"))
        .collect();
    let col_of = |p: &Perm| perms.binary_search(p).expect("known permutation");
    let reduced: Vec<Perm> = (1..=(d - 1) as u8)
        .permutations(d - 1)
        .map(|im| Perm::from_one_line(im).expect("permutation"))
        .collect();
    let mut reducer = RowReducer::new(perms.len());
    for slot in 1..=d {
        for rho in &reduced {
            let mut row = vec![Rat::zero(); perms.len()];
            for p in &perms {
                let images: Vec<u8> = p
                    .images()
                    .iter()
                    .filter(|&&v| v as usize != slot)
                    .map(|&v| if v as usize > slot { v - 1 } else { v })
                    .collect();
                if images == rho.images() {
                    row[col_of(p)] += rat_int(1);
                }
            }
            reducer.add_row(row);
        }
    }
    reducer
        .kernel_basis()
        .into_iter()
        .map(|v| {
            MultilinearPoly::from_coeffs(d, perms.iter().cloned().zip(v).collect::<Vec<_>>())
                .expect("degrees match")
        })
        .collect()
}

/// Random nonzero polynomial from [`lie_multilinear_basis`], with small
/// integer combination coefficients. Every unit substitution of the result
/// vanishes; for `d < 2n` such a polynomial is never an identity of `M_n`,
/// so its central-solutions space is exactly the scalars.
pub fn random_lie_multilinear<R: Rng + ?Sized>(d: usize, rng: &mut R) -> MultilinearPoly {
    let basis = lie_multilinear_basis(d);
    assert!(
        !basis.is_empty(),
        "vanishing-substitution space is nonzero for d >= 2"
    );
    loop {
        let mut f = MultilinearPoly::zero(d);
        for b in &basis {
            let c = rat_int(rng.gen_range(-2..=2));
            if !c.is_zero() {
                f = f.add(&b.scale(&c)).expect("same degree");
            }
        }
        if !f.is_zero() {
            return f;
        }
    }
}
