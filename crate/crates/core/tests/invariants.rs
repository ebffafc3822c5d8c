use proptest::prelude::*;
use qslocc4::field::{Field, Gaussian};
use qslocc4::invariants::{det4, invariant_vector, lmn_matrices};
use qslocc4::oracles::{quartic_multiset, random_state, same_multiset, seeded};
use qslocc4::state::{random_sl2_quadruple, Permutation, State};

fn small_state() -> impl Strategy<Value = State<Gaussian>> {
    prop::array::uniform16((-3i64..=3, -2i64..=2))
        .prop_filter_map("nonzero", |a| State::new(a.map(|(re, im)| Gaussian::from_parts(re, 1, im, 1))).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariants_are_slocc_invariant(s in small_state(), seed in any::<u64>()) {
        let g = random_sl2_quadruple::<Gaussian>(seed, 3);
        prop_assert!(g.is_sl2());
        prop_assert_eq!(invariant_vector(&s.apply_local(&g)), invariant_vector(&s));
    }

    #[test]
    fn quartic_multiset_is_relabeling_invariant(s in small_state(), k in 0usize..24) {
        let sigma = &Permutation::all()[k];
        prop_assert!(same_multiset(&quartic_multiset(&s.permute_qubits(sigma)), &quartic_multiset(&s)));
    }

    #[test]
    fn invariants_are_homogeneous(s in small_state(), n in 1i64..5) {
        let lam = Gaussian::from_parts(n, 1, 1, 1);
        let (a, b) = (invariant_vector(&s), invariant_vector(&s.scale(&lam)));
        prop_assert_eq!(b.b, a.b * lam.pow(2));
        prop_assert_eq!(b.l, a.l * lam.pow(4));
        prop_assert_eq!(b.m, a.m * lam.pow(4));
        prop_assert_eq!(b.dxy, a.dxy * lam.pow(6));
    }
}

#[test]
fn l_m_n_sum_to_zero() {
    let mut rng = seeded(11);
    for _ in 0..20 {
        let iv = invariant_vector(&random_state(&mut rng, 9));
        assert!((iv.l.clone() + iv.m.clone() + iv.n.clone()).is_zero());
    }
}

#[test]
fn lmn_are_flattening_determinants() {
    let mut rng = seeded(12);
    for _ in 0..20 {
        let s = random_state(&mut rng, 9);
        let iv = invariant_vector(&s);
        let d: Vec<Gaussian> = lmn_matrices(&s).iter().map(det4).collect();
        assert_eq!(d, vec![iv.l, iv.m, iv.n]);
    }
}

#[test]
fn product_states_are_nilpotent() {
    // |0000⟩ and a generic product state.
    let q = Gaussian::from_i64;
    let s = State::from_terms(&[("0000", q(1))]).unwrap();
    assert!(invariant_vector(&s).delta.is_zero());
    let g = random_sl2_quadruple::<Gaussian>(5, 4);
    let iv = invariant_vector(&s.apply_local(&g));
    assert!([iv.b, iv.l, iv.m, iv.dxy].iter().all(|v| v.is_zero()));
}
