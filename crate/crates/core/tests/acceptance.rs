//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its headline numbers. Everything is exact arithmetic; randomized
//! parts use fixed seeds.

use std::time::Instant;

use itertools::Itertools;
use num_traits::{One, Zero};
use preserver_core::exact_matrix::random_invertible;
use preserver_core::exact_matrix::staircase_positions;
use preserver_core::free_algebra::{
    classify, parse_poly, standard_poly, symbolic_lemma31_identity, symbolic_lemma32_identity,
    MultilinearPoly,
};
use preserver_core::group_lab::{build_theta, membership_report, theta_breaks_zero_set};
use preserver_core::pi_lab::{central_solutions, evaluate, is_identity, nonidentity_witness};
use preserver_core::preserver_lab::{
    assemble_standard_map, check_preserves_zeros, decompose_standard, random_standard_params,
    sample_zero, standard_map, MatrixLinearMap, StandardFormParams,
};
use preserver_core::rat::{rat_int, Rat};
use preserver_core::sampling::{random_lie_multilinear, random_multilinear};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ml(s: &str) -> MultilinearPoly {
    MultilinearPoly::try_from(&parse_poly(s).unwrap()).unwrap()
}

#[test]
fn criterion_1_amitsur_levitzki_desk_check() {
    let start = Instant::now();
    for n in [2usize, 3] {
        let s2n = standard_poly(2 * n).unwrap();
        assert!(is_identity(&s2n, n), "s_{} must vanish on M_{n}", 2 * n);
        for d in 1..2 * n {
            let sd = standard_poly(d).unwrap();
            assert!(!is_identity(&sd, n), "s_{d} is not an identity of M_{n}");
            let witness = nonidentity_witness(&sd, n).unwrap();
            let value = evaluate(&sd, &witness).unwrap();
            assert!(
                !value.is_zero(),
                "witness for s_{d} at n={n} must be nonzero"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 300,
        "enumeration must finish in under 5 minutes, took {elapsed:?}"
    );
    println!(
        "[PASS] criterion 1: s_2n identities and all shorter-degree witnesses verified for n in {{2,3}} in {elapsed:?}"
    );
}

#[test]
fn criterion_2_classification_fixtures() {
    let a = classify(&ml("x1 x2")).unwrap();
    assert_eq!(a.lambda, rat_int(1));
    assert_eq!(a.mu, rat_int(1));
    assert_eq!(a.collapse, vec![rat_int(0), rat_int(1)]);
    assert!(a.cond_a && !a.cond_b && !a.cond_c);

    let b = classify(&standard_poly(3).unwrap()).unwrap();
    assert_eq!(b.lambda, rat_int(0));
    assert_eq!(b.mu, rat_int(1));
    assert_eq!(b.collapse, vec![rat_int(0), rat_int(0), rat_int(0)]);
    assert!(!b.cond_a && b.cond_b && !b.cond_c);

    let lie = ml("x1 x2 x3 - x1 x3 x2 - x2 x3 x1 + x3 x2 x1");
    let c = classify(&lie).unwrap();
    assert_eq!(c.lambda, rat_int(0));
    assert_eq!(c.mu, rat_int(0));
    assert_eq!(c.collapse, vec![rat_int(1), rat_int(-2), rat_int(1)]);
    assert!(!c.cond_a && !c.cond_b && c.cond_c);

    println!("[PASS] criterion 2: classification fixtures match hand values exactly");
}

#[test]
fn criterion_3_staircase_order_uniqueness() {
    let mut total_orders = 0usize;
    for d in 2..=8usize {
        let n = d / 2 + 1; // minimal n with d < 2n
        let positions = staircase_positions(d, n).unwrap();
        let k = if d % 2 == 0 { d / 2 + 1 } else { d.div_ceil(2) };
        let chain = |order: &[usize]| -> Option<(usize, usize)> {
            let mut cur = positions[order[0]];
            for &idx in &order[1..] {
                let (r, c) = positions[idx];
                if cur.1 != r {
                    return None;
                }
                cur = (cur.0, c);
            }
            Some(cur)
        };
        let mut nonzero_orders = Vec::new();
        for order in (0..d).permutations(d) {
            if let Some(value) = chain(&order) {
                nonzero_orders.push((order, value));
            }
            total_orders += 1;
        }
        assert_eq!(
            nonzero_orders.len(),
            1,
            "exactly one nonzero order for d={d}, n={n}"
        );
        let (order, value) = &nonzero_orders[0];
        assert_eq!(order, &(0..d).collect::<Vec<_>>(), "the listed order");
        assert_eq!(*value, (1, k), "product is e_1k");
    }
    println!(
        "[PASS] criterion 3: staircase product nonzero in exactly the listed order for d in 2..=8 ({total_orders} orders checked)"
    );
}

#[test]
fn criterion_4_theta_witness_suite() {
    let start = Instant::now();
    let mut cases = 0usize;
    for n in [3usize, 5] {
        let theta = build_theta(n).unwrap();
        let report = membership_report(&theta).unwrap();
        assert!(report.in_o_fix1, "θ preserves the trace form and fixes 1");
        assert_eq!(report.det, Rat::one());
        assert!(report.fixes_unity);
        assert!(report.in_so_fix1, "θ lies in SO(n²-1) at n={n}");
        for d in [4usize, 5, 6] {
            if d >= 2 * n {
                continue; // no staircase witness exists
            }
            for f in [MultilinearPoly::monomial(d), standard_poly(d).unwrap()] {
                let (t, tt) = theta_breaks_zero_set(&f, n).unwrap();
                assert!(!evaluate(&f, &t).unwrap().is_zero());
                assert!(evaluate(&f, &tt).unwrap().is_zero());
                cases += 1;
            }
        }
    }
    println!(
        "[PASS] criterion 4: θ in SO(n²-1) and {cases} zero-set breaking witness pairs verified in {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_5_central_solutions_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    // 10 random vanishing-substitution polynomials (1 is then a solution,
    // and d < 2n rules out identities, so the space is exactly the scalars)
    for trial in 0..10 {
        let d = 2 + trial % 4;
        let f = random_lie_multilinear(d, &mut rng);
        let start = Instant::now();
        let basis = central_solutions(&f, 3);
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs() < 60, "instance must finish within 60s");
        assert_eq!(basis.len(), 1, "degree {d} trial {trial}");
        let scalar = basis[0].as_scalar().expect("basis spans the scalars");
        assert!(!scalar.is_zero());
    }
    // identity case: every c solves the equations
    let basis = central_solutions(&standard_poly(4).unwrap(), 2);
    assert_eq!(basis.len(), 4);
    println!(
        "[PASS] criterion 5: central solutions are exactly span{{1}} for 10 random vanishing-substitution polynomials, and all of M_2 for s4 at n=2"
    );
}

#[test]
fn criterion_6_symbolic_lemma_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(601);
    for _ in 0..100 {
        let d = rng.gen_range(2..=6);
        let f = random_multilinear(d, 15, &mut rng);
        assert!(symbolic_lemma31_identity(&f).unwrap());
        assert!(symbolic_lemma32_identity(&f).unwrap());
    }
    println!(
        "[PASS] criterion 6: both symbolic lemma identities hold for 100 random multilinear polynomials of degree <= 6"
    );
}

#[test]
fn criterion_7_preserver_positive_negative_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(701);
    let polys = [
        ("commutator", ml("x1 x2 - x2 x1")),
        ("s3", standard_poly(3).unwrap()),
        ("s4", standard_poly(4).unwrap()),
    ];
    for (name, f) in &polys {
        for n in [3usize, 5] {
            let zeros: Vec<_> = (0..100)
                .map(|_| sample_zero(f, n, &mut rng).unwrap())
                .collect();
            for z in &zeros {
                assert!(evaluate(f, z).unwrap().is_zero());
            }
            for _ in 0..20 {
                let alpha = loop {
                    let v = rng.gen_range(-3i64..=3);
                    if v != 0 {
                        break rat_int(v);
                    }
                };
                let a = random_invertible(n, &mut rng);
                let params =
                    StandardFormParams::new(alpha, a, vec![Rat::zero(); n * n], false).unwrap();
                let map = standard_map(&params);
                for z in &zeros {
                    assert!(
                        evaluate(f, &map.apply_tuple(z)).unwrap().is_zero(),
                        "conjugation-scaling map must preserve zeros of {name} at n={n}"
                    );
                }
            }
            if f.is_lie_generated() {
                for _ in 0..5 {
                    let params = loop {
                        let p = random_standard_params(n, false, &mut rng);
                        if p.g().iter().any(|c| !c.is_zero()) {
                            break p;
                        }
                    };
                    let map = standard_map(&params);
                    for z in &zeros {
                        assert!(
                            evaluate(f, &map.apply_tuple(z)).unwrap().is_zero(),
                            "full standard map must preserve zeros of {name} at n={n}"
                        );
                    }
                }
            }
        }
    }
    // the negative case: transposition breaks x1 x2, with the exact
    // two-unit counterexample
    let f = ml("x1 x2");
    let tau = MatrixLinearMap::transpose_map(2);
    let verdict = check_preserves_zeros(&f, &tau, 100, &mut rng).unwrap();
    assert!(!verdict.passed);
    let (t, v) = verdict.counterexample.expect("failure carries a witness");
    let e11 = preserver_core::exact_matrix::matrix_unit(2, 1, 1).unwrap();
    let e21 = preserver_core::exact_matrix::matrix_unit(2, 2, 1).unwrap();
    let e12 = preserver_core::exact_matrix::matrix_unit(2, 1, 2).unwrap();
    assert_eq!(t.mats(), &[e11, e21]);
    assert_eq!(v, e12);
    println!(
        "[PASS] criterion 7: 100 zeros x 20 conjugation-scaling maps preserved per configuration, central shifts pass on vanishing-substitution polynomials, and (x1 x2, τ) fails with counterexample (e11, e21) in {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_8_decomposition_round_trip() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(801);
    for n in [3usize, 4, 5] {
        for i in 0..50 {
            let transpose = i % 2 == 1;
            let params = random_standard_params(n, transpose, &mut rng);
            let map = standard_map(&params);
            let recovered = decompose_standard(&map)
                .unwrap()
                .expect("standard maps must decompose");
            assert_eq!(
                recovered.assemble().rep(),
                map.rep(),
                "reassembly must be entry-exact at n={n}"
            );
        }
        for _ in 0..20 {
            let map = MatrixLinearMap::from_rep(random_invertible(n * n, &mut rng)).unwrap();
            assert!(
                decompose_standard(&map).unwrap().is_none(),
                "generic invertible maps are not standard at n={n}"
            );
        }
    }
    println!(
        "[PASS] criterion 8: 150 standard maps round-trip entry-exactly and 60 generic maps fail to decompose in {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_9_invertibility_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(901);
    let mut boundary_cases = 0usize;
    for trial in 0..100 {
        let n = if trial % 2 == 0 { 2 } else { 3 };
        let a = random_invertible(n, &mut rng);
        let alpha = loop {
            let v = rng.gen_range(-3i64..=3);
            if v != 0 {
                break rat_int(v);
            }
        };
        let mut g: Vec<Rat> = (0..n * n).map(|_| rat_int(rng.gen_range(-2..=2))).collect();
        if trial < 10 {
            // force g(1) = -alpha
            let tail: Rat = (1..n).map(|i| g[i * n + i].clone()).sum();
            g[0] = -alpha.clone() - tail;
            boundary_cases += 1;
        }
        let g1: Rat = (0..n).map(|i| g[i * n + i].clone()).sum();
        let map = assemble_standard_map(&alpha, &a, &g, trial % 4 == 3).unwrap();
        assert_eq!(
            map.det().is_zero(),
            g1 == -alpha.clone(),
            "assembled map is singular exactly when g(1) = -alpha"
        );
    }
    assert_eq!(boundary_cases, 10);
    println!(
        "[PASS] criterion 9: singularity occurs exactly on g(1) = -alpha over 100 random parameter sets including 10 forced boundary cases"
    );
}
