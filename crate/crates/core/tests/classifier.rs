use num_complex::Complex64;
use proptest::prelude::*;
use qslocc4::classifier::{canonicalize_d4, recover_parameters, Classifier, TypeFamily, Verdict};
use qslocc4::covariants::CASE_TABLES;
use qslocc4::field::{Field, Gaussian};
use qslocc4::normal_forms::{gen_g, FamilyId, Specialization};
use qslocc4::oracles::{is_known_conflict, seeded, specialized_state, worked_examples};
use qslocc4::state::{random_sl2_quadruple, Permutation, State};
use qslocc4::Error;
use rand::Rng;

fn q(n: i64) -> Gaussian {
    Gaussian::from_i64(n)
}

fn classifier() -> Classifier {
    Classifier::load().unwrap()
}

fn ghz() -> State<Gaussian> {
    State::from_terms(&[("0000", q(1)), ("1111", q(1))]).unwrap()
}

#[test]
fn worked_examples_classify() {
    let c = classifier();
    for (name, s, _, label) in worked_examples() {
        assert_eq!(c.classify(&s).unwrap().label, label, "{name}");
    }
    let r = c.classify(&worked_examples()[0].1).unwrap();
    assert_eq!(r.type_string(), "[L_abc2; a=b, c=0]");
    assert_eq!(r.case_path, ["3", "3(c)"]);
    assert_eq!(r.ev.unwrap().bits, [0, 1, 1, 0]);
}

#[test]
fn generic_g_is_case_1a() {
    let r = classifier().classify(&gen_g(q(1), q(2), q(3), q(5)).unwrap()).unwrap();
    assert_eq!(r.type_string(), "[G_abcd; ∅]");
    assert_eq!(r.case_path, ["1", "1(a)"]);
    assert!(r.stratum.generic);
}

#[test]
fn table_rows_classify_to_themselves() {
    let c = classifier();
    let mut rng = seeded(31);
    for t in CASE_TABLES.iter() {
        for row in t.rows {
            let s = specialized_state(row.family, &row.specialization(), &mut rng).unwrap();
            let r = c.classify(&s).unwrap();
            if is_known_conflict(t.case, row.label) {
                assert_eq!(r.label, "L_aa0_2");
            } else {
                assert_eq!(r.label, row.label, "{}", t.case);
            }
            assert_eq!(r.case_path[1], t.case);
        }
    }
}

/// Relabeling, SLOCC and rescaling leave the classification unchanged.
#[test]
fn classification_is_robust() {
    let c = classifier();
    let mut rng = seeded(32);
    let perms = Permutation::all();
    let scales = [q(2), q(-3), Gaussian::i()];
    for (k, t) in CASE_TABLES.iter().enumerate() {
        for row in t.rows {
            let s = specialized_state(row.family, &row.specialization(), &mut rng).unwrap();
            let base = c.classify(&s).unwrap();
            for (j, lam) in scales.iter().enumerate() {
                let sigma = &perms[rng.gen_range(0..24)];
                let g = random_sl2_quadruple::<Gaussian>((10 * k + j) as u64, 2);
                let r = c.classify(&s.permute_qubits(sigma).apply_local(&g).scale(lam)).unwrap();
                assert!(r.same_type(&base), "{} under {sigma}: {} vs {}", row.label, r.label, base.label);
            }
        }
    }
}

#[test]
fn nilpotent_families() {
    let c = classifier();
    for f in [FamilyId::L0_5p3, FamilyId::L0_7p1, FamilyId::L0_3p1_0_3p1] {
        let r = c.classify(&specialized_state(f, &Specialization::none(), &mut seeded(0)).unwrap()).unwrap();
        assert_eq!(r.family, TypeFamily::Nilpotent);
        assert_eq!(r.type_string(), "nilpotent (nullcone)");
    }
}

#[test]
fn float_backend_agrees() {
    let c = classifier();
    let mut rng = seeded(33);
    for f in FamilyId::ALL {
        let s = specialized_state(f, &Specialization::none(), &mut rng).unwrap();
        let fs = s.map(|a| a.to_c64());
        assert!(c.classify(&fs).unwrap().same_type(&c.classify(&s).unwrap()), "{f}");
    }
}

fn close(a: [Complex64; 4], b: [Complex64; 4]) -> bool {
    (0..4).all(|k| (a[k] - b[k]).norm() < 1e-8)
}

fn c4(v: [f64; 4]) -> [Complex64; 4] {
    v.map(|x| Complex64::new(x, 0.0))
}

#[test]
fn recover_generic_parameters() {
    let p = recover_parameters(&gen_g(q(1), q(2), q(3), q(5)).unwrap()).unwrap();
    assert!(close(p, canonicalize_d4(c4([1.0, 2.0, 3.0, 5.0]))));
    // D4 moves stay in the orbit: swap and two sign changes.
    let p2 = recover_parameters(&gen_g(q(-2), q(1), q(-3), q(5)).unwrap()).unwrap();
    assert!(close(p, p2));
}

#[test]
fn recover_on_the_boundary() {
    let c = classifier();
    assert!(matches!(recover_parameters(&ghz()), Err(Error::Unsupported(_))));
    let p = c.recover_parameters(&ghz()).unwrap();
    assert!(close(p, canonicalize_d4(c4([1.0, 0.0, 0.0, 1.0]))));
    // G(a,a,a,a) is the orbit of G(2a,0,0,0).
    let r = c.classify(&gen_g(q(1), q(1), q(1), q(1)).unwrap()).unwrap();
    assert_eq!(r.label, "G_a000");
    let p = c.recover_parameters(&gen_g(q(1), q(1), q(1), q(1)).unwrap()).unwrap();
    let g = c.classify(&gen_g(p[0], p[1], p[2], p[3]).unwrap()).unwrap();
    assert!(g.same_type(&r));
}

#[test]
fn recover_rejects_l_types() {
    let s = specialized_state(FamilyId::Labc2, &Specialization::none(), &mut seeded(34)).unwrap();
    match classifier().recover_parameters(&s) {
        Err(Error::Unsupported(m)) => assert!(m.starts_with("not of G type"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn equivalence() {
    let c = classifier();
    let g = random_sl2_quadruple::<Gaussian>(35, 3);
    let moved = ghz().apply_local(&g).permute_qubits(&Permutation::parse("2413").unwrap()).scale(&q(7));
    assert_eq!(c.equivalent(&ghz(), &moved).unwrap().verdict, Verdict::Equivalent);

    let a = gen_g(q(1), q(2), q(3), q(5)).unwrap();
    let b = gen_g(q(-2), q(1), q(-3), q(5)).unwrap().scale(&Gaussian::i());
    assert_eq!(c.equivalent(&a, &b).unwrap().verdict, Verdict::Equivalent);
    let d = gen_g(q(1), q(2), q(3), q(6)).unwrap();
    assert_eq!(c.equivalent(&a, &d).unwrap().verdict, Verdict::Inequivalent);
    assert_eq!(c.equivalent(&a, &ghz()).unwrap().verdict, Verdict::Inequivalent);

    let n1 = specialized_state(FamilyId::L0_7p1, &Specialization::none(), &mut seeded(0)).unwrap();
    let n2 = specialized_state(FamilyId::L0_5p3, &Specialization::none(), &mut seeded(0)).unwrap();
    assert_eq!(c.equivalent(&n1, &n2).unwrap().verdict, Verdict::Undecided);
}

#[test]
fn report_serializes() {
    let r = classifier().classify(&ghz()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["family"], "G_abcd");
    assert_eq!(v["label"], "G_00aa");
    assert!(v["parameters"].is_array());
}

fn d4_image(p: [f64; 4], perm: usize, signs: usize) -> [f64; 4] {
    let sigma = Permutation::all()[perm];
    let mut v = sigma.move_vector(p);
    // The sign flips of pairs (0,1), (0,2), (0,3) generate all even sign changes.
    let pairs = [[0, 1], [0, 2], [0, 3]];
    for (k, pr) in pairs.iter().enumerate() {
        if signs >> k & 1 == 1 {
            v[pr[0]] = -v[pr[0]];
            v[pr[1]] = -v[pr[1]];
        }
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_form_is_d4_invariant(
        p in prop::array::uniform4(-50i32..=50),
        perm in 0usize..24,
        signs in 0usize..8,
    ) {
        let p = p.map(|x| x as f64 / 7.0);
        let a = canonicalize_d4(c4(p));
        let b = canonicalize_d4(c4(d4_image(p, perm, signs)));
        prop_assert!(close(a, b), "{:?} vs {:?}", a, b);
    }
}
