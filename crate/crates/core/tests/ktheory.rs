mod common;

use fell_core::catalog;
use fell_core::ktheory::{
    circle_k_theory, cokernel, duality_check, finite_set_k_theory, k_homology, kernel, matrix_rank,
    pinch_k_theory, pinch_strata_oracle, smith_normal_form, solve_six_term, vertex_class_boundary,
    EdgeEnd, EndIncidence, FgAbGroup, IntMatrix, KTheoryError, OneDStratified, StratifiedEdge,
    TwoStrataSes,
};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn z(n: usize) -> FgAbGroup {
    FgAbGroup::free(n)
}

fn delta0() -> IntMatrix {
    IntMatrix::from_rows(&[[-1, 1, 0], [1, -1, 0]])
}

#[test]
fn smith_form_examples() {
    let r = smith_normal_form(&IntMatrix::from_rows(&[[2, 4], [6, 8]]));
    assert_eq!(r.s, IntMatrix::from_rows(&[[2, 0], [0, 4]]));
    // d1 = gcd of entries, d1 d2 = |det|.
    assert_eq!(
        common::invariant_factors_by_minors(&IntMatrix::from_rows(&[[2, 4], [6, 8]])),
        vec![BigInt::from(2), BigInt::from(4)]
    );
    let r = smith_normal_form(&delta0());
    assert_eq!(r.s, IntMatrix::from_rows(&[[1, 0, 0], [0, 0, 0]]));
    assert_eq!(
        r.rank(),
        common::invariant_factors_by_minors(&delta0()).len()
    );
    assert_eq!(
        smith_normal_form(&IntMatrix::identity(3)).s,
        IntMatrix::identity(3)
    );
}

#[test]
fn kernel_and_cokernel_examples() {
    assert_eq!(kernel(&delta0()), z(2));
    assert_eq!(cokernel(&delta0()), z(1));
    assert_eq!(cokernel(&delta0().transpose()), z(2));
    assert_eq!(kernel(&delta0().transpose()), z(1));
    assert_eq!(kernel(&IntMatrix::zeros(0, 4)), z(4));
    let c = cokernel(&IntMatrix::from_rows(&[[2]]));
    assert_eq!(c, FgAbGroup::new(0, vec![BigInt::from(2)]).unwrap());
    assert_eq!(c.to_string(), "Z/2");
}

#[test]
fn six_term_examples() {
    assert_eq!(
        solve_six_term(&catalog::aab_ab_ses()).unwrap(),
        (z(2), z(1))
    );
    let (k0, k1) = solve_six_term(&catalog::broken_heart_ses()).unwrap();
    assert!(k0.is_trivial() && k1.is_trivial());
    let s = TwoStrataSes::from_ranks(2, 1, 3, 4, None, None).unwrap();
    assert_eq!(solve_six_term(&s).unwrap(), (z(5), z(5)));
}

#[test]
fn torsion_input_is_unsupported() {
    let s: TwoStrataSes = serde_json::from_str(
        r#"{"k0_ideal":0,"k1_ideal":{"rank":0,"torsion":[3]},"k0_quotient":0,"k1_quotient":0}"#,
    )
    .unwrap();
    assert!(matches!(
        solve_six_term(&s),
        Err(KTheoryError::Unsupported(_))
    ));
}

fn one_edge(ends: &[(EdgeEnd, usize)], classes: usize) -> OneDStratified {
    OneDStratified {
        edges: vec![StratifiedEdge {
            name: "e".into(),
            rank: 1,
        }],
        vertex_classes: (0..classes).map(|i| format!("v{i}")).collect(),
        incidence: ends
            .iter()
            .map(|&(end, class)| EndIncidence {
                edge: 0,
                end,
                class,
                multiplicity: 1,
            })
            .collect(),
    }
}

#[test]
fn boundary_generator_examples() {
    assert_eq!(
        vertex_class_boundary(&catalog::aab_ab_incidence()).unwrap(),
        delta0()
    );
    let loop_ = one_edge(&[(EdgeEnd::Start, 0), (EdgeEnd::End, 0)], 1);
    assert_eq!(
        vertex_class_boundary(&loop_).unwrap(),
        IntMatrix::from_rows(&[[0]])
    );
    // Both ends are needed for validity; the start alone lands on class 1.
    let split = one_edge(&[(EdgeEnd::Start, 1), (EdgeEnd::End, 0)], 2);
    assert_eq!(
        vertex_class_boundary(&split).unwrap(),
        IntMatrix::from_rows(&[[-1, 1]])
    );
    let dangling = one_edge(&[(EdgeEnd::Start, 0)], 1);
    assert!(matches!(
        vertex_class_boundary(&dangling),
        Err(KTheoryError::Validation(_))
    ));
}

#[test]
fn k_homology_and_duality_examples() {
    let (h0, h1) = k_homology(&delta0());
    assert_eq!((h0.clone(), h1.clone()), (z(2), z(1)));
    let d = duality_check(&z(2), &z(1), &h0, &h1);
    assert!(d.even_self_dual && !d.odd_self_dual_rationally);
    assert_eq!(k_homology(&IntMatrix::zeros(2, 3)), (z(3), z(2)));
    let (b0, b1) = k_homology(&IntMatrix::from_rows(&[[1]]));
    assert!(b0.is_trivial() && b1.is_trivial());
    let zero = FgAbGroup::zero();
    let d = duality_check(&zero, &zero, &zero, &zero);
    assert!(d.even_self_dual && d.odd_self_dual_rationally);
    let d = duality_check(&z(1), &z(1), &z(1), &z(1));
    assert!(d.even_self_dual && d.odd_self_dual_rationally);
}

#[test]
fn pinch_examples() {
    for m in 0..=6 {
        let formula = pinch_k_theory(&circle_k_theory(), &finite_set_k_theory(m), 2).unwrap();
        assert_eq!(formula, (z(1 + m), z(1)));
    }
    let none = (FgAbGroup::zero(), FgAbGroup::zero());
    assert_eq!(
        pinch_k_theory(&circle_k_theory(), &none, 2).unwrap(),
        circle_k_theory()
    );
    assert_eq!(pinch_strata_oracle(3, 2).unwrap(), (z(4), z(1)));
    assert_eq!(pinch_strata_oracle(1, 3).unwrap(), (z(3), z(1)));
    assert_eq!(pinch_strata_oracle(0, 3).unwrap(), (z(1), z(1)));
    assert!(matches!(
        pinch_k_theory(&circle_k_theory(), &none, 1),
        Err(KTheoryError::Parameter(_))
    ));
}

#[test]
fn pinch_rank_is_unbounded_in_the_number_of_points() {
    let ranks: Vec<usize> = (1..=200)
        .map(|m| pinch_strata_oracle(m, 2).unwrap().0.rank())
        .collect();
    assert!(ranks.windows(2).all(|w| w[1] == w[0] + 1));
    assert_eq!(ranks[199], 201);
}

fn matrix() -> impl Strategy<Value = IntMatrix> {
    (0usize..=6, 0usize..=6).prop_flat_map(|(m, n)| {
        proptest::collection::vec(-20i64..=20, m * n).prop_map(move |v| {
            IntMatrix::new(m, n, v.into_iter().map(BigInt::from).collect()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_is_exact(a in matrix()) {
        let r = smith_normal_form(&a);
        prop_assert_eq!(common::snf_postconditions(&a, &r), Ok(()));
        prop_assert_eq!(r.invariant_factors(), common::invariant_factors_by_minors(&a));
    }

    #[test]
    fn rank_nullity(a in matrix()) {
        let r = matrix_rank(&a);
        prop_assert_eq!(kernel(&a).rank() + r, a.cols());
        prop_assert_eq!(cokernel(&a).rank() + r, a.rows());
        prop_assert!(kernel(&a).is_free());
    }

    #[test]
    fn groups_do_not_depend_on_bases(a in matrix(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_unimodular(&mut rng, a.rows());
        let q = common::random_unimodular(&mut rng, a.cols());
        let b = &(&p * &a) * &q;
        prop_assert_eq!(kernel(&a), kernel(&b));
        prop_assert_eq!(cokernel(&a), cokernel(&b));
    }

    #[test]
    fn swapping_degrees_swaps_answers(
        (i0, i1, q0, q1) in (0usize..4, 0usize..4, 0usize..4, 0usize..4),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d0 = common::random_matrix(&mut rng, i1, q0, 5);
        let d1 = common::random_matrix(&mut rng, i0, q1, 5);
        let s = TwoStrataSes::from_ranks(i0, i1, q0, q1, Some(d0.clone()), Some(d1.clone())).unwrap();
        let t = TwoStrataSes::from_ranks(i1, i0, q1, q0, Some(d1), Some(d0)).unwrap();
        let (k0, k1) = solve_six_term(&s).unwrap();
        let (t0, t1) = solve_six_term(&t).unwrap();
        prop_assert_eq!(k0, t1);
        prop_assert_eq!(k1, t0);
    }

    #[test]
    fn pinch_formula_matches_strata(m in 0usize..12, k in 2usize..8) {
        let formula = pinch_k_theory(&circle_k_theory(), &finite_set_k_theory(m), k).unwrap();
        prop_assert_eq!(formula, pinch_strata_oracle(m, k).unwrap());
    }
}
