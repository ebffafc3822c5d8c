//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the output.
//! The process fails only on unexplained failures; a criterion whose every
//! mismatch is a listed known conflict prints FAIL with the analysis and
//! does not abort the run.

use num_complex::Complex64;
use qslocc4::classifier::{canonicalize_d4, Classifier, TypeFamily};
use qslocc4::covariants::{check_row, CASE_TABLES};
use qslocc4::field::{Field, Gaussian};
use qslocc4::geometry::{multirank, so8_checks, stratum, MultiRank};
use qslocc4::invariants::{apolar_catalecticant, invariant_vector, ZeroPolicy};
use qslocc4::normal_forms::{free_parameter_count, gen_family, gen_g, FamilyId, Specialization};
use qslocc4::oracles::{
    closed_form_suite, coincidence_suite, example_suite, is_known_conflict, random_rational, random_state, seeded,
    specialized_state, worked_examples,
};
use qslocc4::quartics::{build_quartics, numeric_roots};
use qslocc4::state::{random_sl2_quadruple, Permutation, State};
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
    /// Every failure is a listed known conflict.
    explained: bool,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into(), explained: false }
}

fn q(n: i64) -> Gaussian {
    Gaussian::from_i64(n)
}

fn exact() -> ZeroPolicy {
    ZeroPolicy::exact()
}

// 1 -------------------------------------------------------------------------

fn closed_forms() -> Outcome {
    let r = closed_form_suite(100, 101);
    outcome(r.failed == 0, format!("{}/100 tuples match B, L, M, N, Dxy exactly {:?}", r.passed, r.failures))
}

// 2 -------------------------------------------------------------------------

fn poly_from_roots(roots: &[Gaussian]) -> Vec<Gaussian> {
    let mut p = vec![q(1)];
    for r in roots {
        let mut next = vec![Gaussian::zero(); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k] += c;
            next[k + 1] -= &(c.clone() * r.clone());
        }
        p = next;
    }
    p
}

fn quartic_identities() -> Outcome {
    let mut rng = seeded(102);
    let mut bad = Vec::new();
    for _ in 0..100 {
        let p: Vec<Gaussian> = (0..4).map(|_| random_rational(&mut rng, 100)).collect();
        let s = gen_g(p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone()).unwrap();
        let q1 = build_quartics(&invariant_vector(&s))[0].0.to_vec();
        let squares: Vec<Gaussian> = p.iter().map(|v| v.square()).collect();
        if q1 != poly_from_roots(&squares) {
            bad.push(format!("Q1 ≠ ∏(x−a²) at {p:?}"));
        }
    }
    for _ in 0..100 {
        let s = random_state(&mut rng, 9);
        let iv = invariant_vector(&s);
        let qs = build_quartics(&iv);
        let pairs: Vec<(Gaussian, Gaussian)> = qs.iter().map(|x| apolar_catalecticant(&x.0)).collect();
        if pairs.iter().any(|pr| pr.0 != iv.i2 || pr.1 != iv.i3) {
            bad.push("I2/I3 disagree across the quartics".into());
        }
    }
    let mut checked = 0;
    while checked < 20 {
        let s = random_state(&mut rng, 9);
        let iv = invariant_vector(&s);
        if iv.delta.is_zero() {
            continue;
        }
        checked += 1;
        if iv.delta != iv.i2.pow(3) - q(27) * iv.i3.square() {
            bad.push("Δ ≠ I2³ − 27 I3²".into());
        }
        let qf = build_quartics(&invariant_vector(&s.map(|a| a.to_c64())))[0].clone();
        let r: Vec<Complex64> = numeric_roots(&qf, 1e-12)
            .roots
            .iter()
            .flat_map(|(c, m)| std::iter::repeat_n(Complex64::new(c[0], c[1]), *m as usize))
            .collect();
        let mut prod = Complex64::new(1.0, 0.0);
        for i in 0..4 {
            for j in i + 1..4 {
                prod *= (r[i] - r[j]).powi(2);
            }
        }
        let want = iv.delta.to_c64();
        let rel = (prod / 256.0 - want).norm() / want.norm();
        if rel > 1e-8 {
            bad.push(format!("root-difference product off by {rel:e}"));
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            "Q1 roots are a² (100 tuples); I2, I3 agree on Q1..Q3 (100 states); Δ = I2³−27I3² = disc/256 (20 states)"
                .into()
        } else {
            bad.join("; ")
        },
    )
}

// 3 -------------------------------------------------------------------------

fn examples(c: &Classifier) -> Outcome {
    let r = example_suite(c);
    let names: Vec<&str> = worked_examples().iter().map(|e| e.3).collect();
    outcome(r.failed == 0, format!("{} checks passed ({}) {:?}", r.passed, names.join(", "), r.failures))
}

// 4 -------------------------------------------------------------------------

fn ev_tables(c: &Classifier) -> Outcome {
    let mut rng = seeded(104);
    let (mut rows, mut points) = (0, 0);
    let (mut unexplained, mut known) = (Vec::new(), Vec::new());
    for table in CASE_TABLES.iter() {
        for row in table.rows {
            rows += 1;
            let n = free_parameter_count(row.family, &row.specialization()).unwrap();
            let mut misses = 0;
            for _ in 0..20 {
                let free: Vec<Gaussian> = (0..n).map(|_| random_rational(&mut rng, 100)).collect();
                points += 1;
                match check_row(&c.catalog, table, row, &free) {
                    Ok(r) if r.matches() => {}
                    Ok(r) => {
                        misses += 1;
                        if misses == 1 {
                            let msg =
                                format!("{} {}: expected {:?}, got {:?}", table.case, row.label, r.expected, r.got);
                            if is_known_conflict(table.case, row.label) {
                                known.push(msg);
                            } else {
                                unexplained.push(msg);
                            }
                        }
                    }
                    Err(e) => unexplained.push(format!("{} {}: {e}", table.case, row.label)),
                }
            }
            if misses > 1 {
                let list = if is_known_conflict(table.case, row.label) { &mut known } else { &mut unexplained };
                if let Some(last) = list.last_mut() {
                    *last = format!("{last} (at {misses}/20 points)");
                }
            }
        }
    }
    let pass = unexplained.is_empty() && known.is_empty();
    let mut detail = format!("{rows} rows × 20 points = {points} checks");
    if !known.is_empty() {
        detail += &format!("; known conflict: {}; the two L_abc2 rows of 3(c) lie in one orbit up to relabeling, so no relabeling-closed quantity separates them", known.join("; "));
    }
    if !unexplained.is_empty() {
        detail += &format!("; mismatches: {}", unexplained.join("; "));
    }
    Outcome { pass, detail, explained: !pass && unexplained.is_empty() }
}

// 5 -------------------------------------------------------------------------

fn test_states(rng: &mut impl rand::Rng) -> Vec<(String, State<Gaussian>)> {
    let mut out: Vec<(String, State<Gaussian>)> = FamilyId::ALL
        .iter()
        .map(|&f| (f.name().to_string(), specialized_state(f, &Specialization::none(), rng).unwrap()))
        .collect();
    for (f, spec) in [
        (FamilyId::Gabcd, &["a=b=0", "c=d"][..]),
        (FamilyId::Labc2, &["a=b", "c=0"][..]),
        (FamilyId::Gabcd, &["c=d=0"][..]),
    ] {
        let sp = Specialization::of(spec);
        out.push((format!("{f} [{sp}]"), specialized_state(f, &sp, rng).unwrap()));
    }
    out
}

fn slocc_invariance(c: &Classifier) -> Outcome {
    let mut rng = seeded(105);
    let states = test_states(&mut rng);
    let mut bad = Vec::new();
    for (k, (name, s)) in states.iter().enumerate() {
        let iv = invariant_vector(s);
        let base = c.classify(s).unwrap();
        for j in 0..50 {
            let g = random_sl2_quadruple::<Gaussian>(1000 * k as u64 + j, 3);
            let t = s.apply_local(&g);
            if invariant_vector(&t) != iv {
                bad.push(format!("{name}: invariants moved"));
                break;
            }
            match c.classify(&t) {
                Ok(r) if r.same_classification(&base) => {}
                Ok(r) => {
                    bad.push(format!("{name}: {} became {}", base.label, r.label));
                    break;
                }
                Err(e) => {
                    bad.push(format!("{name}: {e}"));
                    break;
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{} states × 50 SL2 quadruples {:?}", states.len(), bad))
}

// 6 -------------------------------------------------------------------------

fn so8() -> Outcome {
    let mut rng = seeded(106);
    let mut bad = 0;
    for _ in 0..50 {
        let s = random_state(&mut rng, 9);
        if !so8_checks(&s, &invariant_vector(&s), 0.0).all_hold() {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("h2, h4, h6, Pf (scales 4, 16, 64, 16) exact on {}/50 states", 50 - bad))
}

// 7 -------------------------------------------------------------------------

fn multiranks() -> Outcome {
    let mut rng = seeded(107);
    let mut bad = Vec::new();
    let mr = |s: &State<Gaussian>| multirank(s, &exact());
    let mut row = |f: FamilyId, perm: Option<&str>, want: [u8; 3]| {
        let mut s = specialized_state(f, &Specialization::none(), &mut rng).unwrap();
        if let Some(p) = perm {
            s = s.permute_qubits(&Permutation::parse(p).unwrap());
        }
        let got = mr(&s);
        if got != MultiRank(want) {
            bad.push(format!(
                "{f}{} has {:?}, expected {want:?}",
                perm.map_or(String::new(), |p| format!("^{p}")),
                got.0
            ));
        }
    };
    row(FamilyId::Gabcd, None, [4, 4, 4]);
    row(FamilyId::Labc2, None, [4, 4, 4]);
    row(FamilyId::Lab3, None, [4, 4, 4]);
    row(FamilyId::La2b2, None, [4, 3, 4]);
    row(FamilyId::La4, None, [4, 3, 4]);
    row(FamilyId::La2b2, Some("4231"), [3, 4, 4]);
    row(FamilyId::La4, Some("2134"), [4, 4, 3]);
    row(FamilyId::La2_0_3p1, None, [3, 3, 3]);
    row(FamilyId::L0_7p1, None, [3, 3, 3]);
    row(FamilyId::L0_3p1_0_3p1, None, [2, 2, 2]);
    let members = test_states(&mut rng);
    for k in 0..20 {
        let (name, s) = &members[k % members.len()];
        let t = s.apply_local(&random_sl2_quadruple::<Gaussian>(7000 + k as u64, 4));
        if mr(s) != mr(&t) {
            bad.push(format!("{name}: multirank moved under SLOCC"));
        }
    }
    outcome(bad.is_empty(), format!("table rows [4,4,4] … [2,2,2]; invariant under SLOCC on 20 states {bad:?}"))
}

// 8 -------------------------------------------------------------------------

fn strata() -> Outcome {
    let mut rng = seeded(108);
    let z = exact();
    let mut bad = Vec::new();
    let rec = |s: &State<Gaussian>| stratum(&invariant_vector(s), multirank(s, &z), &z);
    for _ in 0..5 {
        let s = specialized_state(FamilyId::Lab3, &Specialization::none(), &mut rng).unwrap();
        let iv = invariant_vector(&s);
        if !(iv.i2.is_zero() && iv.i3.is_zero()) {
            bad.push("L_ab3 off the cusp".to_string());
        }
        let s = specialized_state(FamilyId::La4, &Specialization::none(), &mut rng).unwrap();
        if rec(&s).cusp3.len() != 1 {
            bad.push(format!("L_a4 cusp3 triples {:?}", rec(&s).cusp3));
        }
    }
    let mut nilpotents = 0;
    for f in FamilyId::ALL {
        let zeros = vec![Gaussian::zero(); f.arity()];
        let Ok(s) = gen_family(f, &zeros) else { continue };
        nilpotents += 1;
        let iv = invariant_vector(&s);
        if ![&iv.b, &iv.l, &iv.m, &iv.dxy].iter().all(|v| v.is_zero()) {
            bad.push(format!("{f} at zero parameters is not nilpotent"));
        }
    }
    let mut violations = 0;
    let mut levels = std::collections::BTreeSet::new();
    for _ in 0..1000 {
        if !rec(&random_state(&mut rng, 3)).chain_respected() {
            violations += 1;
        }
    }
    let mut family_members: Vec<State<Gaussian>> = Vec::new();
    for t in CASE_TABLES.iter() {
        for r in t.rows {
            family_members.push(specialized_state(r.family, &r.specialization(), &mut rng).unwrap());
        }
    }
    for f in FamilyId::ALL {
        family_members.push(specialized_state(f, &Specialization::none(), &mut rng).unwrap());
    }
    for s in &family_members {
        let r = rec(s);
        for (name, on) in [
            ("generic", r.generic),
            ("dual", r.dual),
            ("node", !r.node.is_empty()),
            ("node3", r.node3),
            ("cusp", r.cusp),
            ("cusp3", !r.cusp3.is_empty()),
            ("nullcone", r.nullcone),
        ] {
            if on {
                levels.insert(name);
            }
        }
        if !r.chain_respected() {
            violations += 1;
        }
    }
    if violations > 0 {
        bad.push(format!("{violations} chain violations"));
    }
    outcome(
        bad.is_empty(),
        format!(
            "L_ab3 cusp, L_a4 one cusp3 triple, {nilpotents} nilpotent representatives, chain on 1000 random + {} family states (levels hit: {}) {bad:?}",
            family_members.len(),
            levels.into_iter().collect::<Vec<_>>().join(", ")
        ),
    )
}

// 9 -------------------------------------------------------------------------

fn coincidences() -> Outcome {
    let r = coincidence_suite(20, 109);
    outcome(r.failed == 0, format!("{}/100 multiset equalities {:?}", r.passed, r.failures))
}

// 10 ------------------------------------------------------------------------

fn round_trip(c: &Classifier) -> Outcome {
    let mut rng = seeded(110);
    let mut bad = Vec::new();
    for f in FamilyId::ALL {
        for _ in 0..5 {
            let s = specialized_state(f, &Specialization::none(), &mut rng).unwrap();
            let want = if f.is_nilpotent() { TypeFamily::Nilpotent } else { TypeFamily::Family(f) };
            match c.classify(&s) {
                Ok(r) if r.family == want && r.specialization.is_empty() => {}
                Ok(r) => bad.push(format!("{f} classified as {}", r.type_string())),
                Err(e) => bad.push(format!("{f}: {e}")),
            }
        }
    }
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p: Vec<Gaussian> = (0..4).map(|_| random_rational(&mut rng, 100)).collect();
        let s = gen_g(p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone()).unwrap();
        let want = canonicalize_d4(std::array::from_fn(|k| p[k].to_c64()));
        match c.recover_parameters(&s) {
            Ok(got) => {
                let scale = want.iter().map(|v| v.norm()).fold(0.0, f64::max);
                let err = (0..4).map(|k| (got[k] - want[k]).norm() / scale).fold(0.0, f64::max);
                worst = worst.max(err);
                if err > 1e-6 {
                    bad.push(format!("G{p:?} recovered as {got:?}"));
                }
            }
            Err(e) => bad.push(format!("G{p:?}: {e}")),
        }
    }
    outcome(
        bad.is_empty(),
        format!("9 families × 5 draws classify to themselves; 50 G tuples recovered up to D4 (worst rel. error {worst:.1e}) {bad:?}"),
    )
}

fn main() {
    let c = Classifier::load().expect("catalog loads");
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("closed forms", Box::new(closed_forms)),
        ("quartic identities", Box::new(quartic_identities)),
        ("worked examples", Box::new(|| examples(&c))),
        ("ev tables", Box::new(|| ev_tables(&c))),
        ("SLOCC invariance", Box::new(|| slocc_invariance(&c))),
        ("so(8) identities", Box::new(so8)),
        ("multirank strata", Box::new(multiranks)),
        ("stratum predicates", Box::new(strata)),
        ("quartic coincidences", Box::new(coincidences)),
        ("round trip", Box::new(|| round_trip(&c))),
    ];
    let mut unexplained = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status}  {name} [{:.1?}]: {}", k + 1, t0.elapsed(), o.detail);
        if !o.pass && !o.explained {
            unexplained += 1;
        }
    }
    if unexplained > 0 {
        println!("{unexplained} criteria failed without a known explanation");
        std::process::exit(1);
    }
}
