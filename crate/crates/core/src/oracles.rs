//! Reference identities and the embedded self-test suites.
//!
//! Everything here is a check against closed forms or reference tables;
//! the same routines back the `selftest` subcommand and the acceptance
//! target.

use crate::classifier::Classifier;
use crate::covariants::{check_row, Catalog, CASE_TABLES};
use crate::error::Error;
use crate::field::{Field, Gaussian};
use crate::geometry::so8_checks;
use crate::invariants::invariant_vector;
use crate::normal_forms::{free_parameter_count, gen_family, gen_g, specialize, FamilyId};
use crate::quartics::build_quartics;
use crate::state::State;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// `B, L, M, N, D_xy` of `G_abcd` from their factored closed forms.
pub fn g_closed_forms<F: Field>(a: &F, b: &F, c: &F, d: &F) -> [F; 5] {
    let r = |n, d| F::from_ratio(n, d);
    let (a, b, c, d) = (a.clone(), b.clone(), c.clone(), d.clone());
    let (a2, b2, c2, d2) = (a.square(), b.square(), c.square(), d.square());
    let bb = r(1, 2) * (a2.clone() + b2.clone() + c2.clone() + d2.clone());
    let l = a.clone() * b.clone() * c.clone() * d.clone();
    let m = r(1, 16)
        * (a.clone() + b.clone() + c.clone() + d.clone())
        * (c.clone() + d.clone() - a.clone() - b.clone())
        * (a.clone() - b.clone() + c.clone() - d.clone())
        * (a.clone() - b.clone() + d.clone() - c.clone());
    let n = r(1, 16)
        * (a.clone() + b.clone() + c.clone() - d.clone())
        * (a.clone() - b.clone() - c.clone() - d.clone())
        * (a.clone() - b.clone() + c.clone() + d.clone())
        * (a + b - c + d);
    let dxy = r(1, 32)
        * (b2.clone() - a2.clone() + c2.clone() - d2.clone())
        * (a2.clone() - b2.clone() + c2.clone() - d2.clone())
        * (a2 + b2 - c2 - d2);
    [bb, l, m, n, dxy]
}

/// The quartic coincidences between the degenerate families and `G_abcd`:
/// `𝒬(family(p)) = 𝒬(G_{p[i0] p[i1] p[i2] p[i3]})`, `None` meaning 0.
pub const QUARTIC_COINCIDENCES: [(FamilyId, &str, [Option<usize>; 4]); 5] = [
    (FamilyId::Labc2, "G_abcc", [Some(0), Some(1), Some(2), Some(2)]),
    (FamilyId::Lab3, "G_aaab", [Some(0), Some(0), Some(0), Some(1)]),
    (FamilyId::La2b2, "G_aabb", [Some(0), Some(0), Some(1), Some(1)]),
    (FamilyId::La4, "G_aaaa", [Some(0), Some(0), Some(0), Some(0)]),
    (FamilyId::La2_0_3p1, "G_aa00", [Some(0), Some(0), None, None]),
];

/// `𝒬(s)` as a multiset of coefficient vectors.
pub fn quartic_multiset<F: Field>(s: &State<F>) -> Vec<[F; 5]> {
    build_quartics(&invariant_vector(s)).into_iter().map(|q| q.0).collect()
}

/// Multiset equality of two triples.
pub fn same_multiset<T: PartialEq>(x: &[T], y: &[T]) -> bool {
    let mut used = vec![false; y.len()];
    x.len() == y.len()
        && x.iter().all(|a| match (0..y.len()).find(|&j| !used[j] && y[j] == *a) {
            Some(j) => {
                used[j] = true;
                true
            }
            None => false,
        })
}

/// Checks one coincidence row at the given family parameters.
pub fn check_coincidence(row: usize, params: &[Gaussian]) -> Result<bool, Error> {
    let (family, _, map) = &QUARTIC_COINCIDENCES[row];
    let s = gen_family(*family, params)?;
    let g: Vec<Gaussian> = map.iter().map(|m| m.map_or_else(Gaussian::zero, |k| params[k].clone())).collect();
    let t = gen_g(g[0].clone(), g[1].clone(), g[2].clone(), g[3].clone())?;
    Ok(same_multiset(&quartic_multiset(&s), &quartic_multiset(&t)))
}

/// A nonzero rational `p/q` with `|p|, q ≤ bound`.
pub fn random_rational(rng: &mut impl Rng, bound: i64) -> Gaussian {
    loop {
        let n = rng.gen_range(-bound..=bound);
        if n != 0 {
            return Gaussian::from_parts(n, rng.gen_range(1..=bound), 0, 1);
        }
    }
}

/// A Gaussian rational with small random real and imaginary parts.
pub fn random_gaussian(rng: &mut impl Rng, bound: i64) -> Gaussian {
    Gaussian::from_parts(
        rng.gen_range(-bound..=bound),
        rng.gen_range(1..=bound),
        rng.gen_range(-bound..=bound),
        rng.gen_range(1..=bound),
    )
}

/// A state with random Gaussian-rational amplitudes.
pub fn random_state(rng: &mut impl Rng, bound: i64) -> State<Gaussian> {
    loop {
        if let Ok(s) = State::new(std::array::from_fn(|_| random_gaussian(rng, bound))) {
            return s;
        }
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Self-test
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub failures: Vec<String>,
    /// Mismatches against reference rows listed in [`KNOWN_CONFLICTS`];
    /// reported, but not counted as failures.
    pub known: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult { name, ..Default::default() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            self.failures.push(what());
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.failed == 0)
    }
}

pub fn closed_form_suite(samples: usize, seed: u64) -> SuiteResult {
    let mut out = SuiteResult::new("closed forms on G_abcd");
    let mut rng = seeded(seed);
    for _ in 0..samples {
        let p: Vec<Gaussian> = (0..4).map(|_| random_rational(&mut rng, 100)).collect();
        let iv = invariant_vector(&gen_g(p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone()).expect("nonzero"));
        let want = g_closed_forms(&p[0], &p[1], &p[2], &p[3]);
        let got = [iv.b, iv.l, iv.m, iv.n, iv.dxy];
        out.record(got == want, || format!("G({}, {}, {}, {})", p[0], p[1], p[2], p[3]));
    }
    out
}

/// Reference rows that no relabeling-closed quantity can reproduce, with
/// the reason. `L_00c2(c)` is carried to `−L_aa0_2(c)` by `iX` on qubits 2
/// and 4 followed by swapping qubits 2 and 4, so the two rows share every
/// ev bit; the table separates them by `𝓖` alone.
pub const KNOWN_CONFLICTS: [(&str, &str, &str); 1] =
    [("3(c)", "L_00c2", "same orbit as L_aa0_2 up to a qubit relabeling")];

pub fn is_known_conflict(case: &str, label: &str) -> bool {
    KNOWN_CONFLICTS.iter().any(|(c, l, _)| *c == case && *l == label)
}

/// Every reference ev row at `samples` random parameter points.
pub fn ev_table_suite(catalog: &Catalog, samples: usize, seed: u64) -> SuiteResult {
    let mut out = SuiteResult::new("ev tables");
    let mut rng = seeded(seed);
    for table in CASE_TABLES.iter() {
        for row in table.rows {
            let n = free_parameter_count(row.family, &row.specialization()).expect("table rows parse");
            for _ in 0..samples {
                let free: Vec<Gaussian> = (0..n).map(|_| random_rational(&mut rng, 100)).collect();
                match check_row(catalog, table, row, &free) {
                    Ok(c) => {
                        let what = format!(
                            "{} {} at {:?}: expected {:?}, got {:?}",
                            c.case, c.label, c.params, c.expected, c.got
                        );
                        if !c.matches() && is_known_conflict(c.case, c.label) {
                            out.known.push(what);
                        } else {
                            out.record(c.matches(), || what);
                        }
                    }
                    Err(e) => out.record(false, || format!("{} {}: {e}", table.case, row.label)),
                }
            }
        }
    }
    out
}

pub fn coincidence_suite(samples: usize, seed: u64) -> SuiteResult {
    let mut out = SuiteResult::new("quartic coincidences");
    let mut rng = seeded(seed);
    for (k, (family, partner, _)) in QUARTIC_COINCIDENCES.iter().enumerate() {
        for _ in 0..samples {
            let p: Vec<Gaussian> = (0..family.arity()).map(|_| random_rational(&mut rng, 100)).collect();
            let ok = check_coincidence(k, &p).unwrap_or(false);
            out.record(ok, || format!("Q({family}) = Q({partner}) at {p:?}"));
        }
    }
    out
}

pub fn so8_suite(samples: usize, seed: u64) -> SuiteResult {
    let mut out = SuiteResult::new("so(8) identities");
    let mut rng = seeded(seed);
    for _ in 0..samples {
        let s = random_state(&mut rng, 9);
        let r = so8_checks(&s, &invariant_vector(&s), 0.0);
        out.record(r.all_hold(), || {
            format!("{:?}", r.identities.iter().filter(|i| !i.holds).map(|i| i.name).collect::<Vec<_>>())
        });
    }
    out
}

/// A worked example: name, state, expected quartic multiset (as
/// coefficient vectors) and expected type label.
pub type WorkedExample = (&'static str, State<Gaussian>, Vec<[i64; 5]>, &'static str);

pub fn worked_examples() -> Vec<WorkedExample> {
    let q = Gaussian::from_i64;
    let st = |t: &[(&str, i64)]| {
        State::from_terms(&t.iter().map(|(l, c)| (*l, q(*c))).collect::<Vec<_>>()).expect("nonzero")
    };
    vec![
        (
            "2|0100>+|1101>+4|1111>+3|0010>",
            st(&[("0100", 2), ("1101", 1), ("1111", 4), ("0010", 3)]),
            // x²(x+3y)²
            vec![[1, 6, 9, 0, 0]; 3],
            "L_aa0_2",
        ),
        (
            "GHZ",
            st(&[("0000", 1), ("1111", 1)]),
            // x²(x−y)²
            vec![[1, -2, 1, 0, 0]; 3],
            "G_00aa",
        ),
        (
            "EPR⊗EPR",
            st(&[("0000", 1), ("0011", 1), ("1100", 1), ("1111", 1)]),
            // (x−y)⁴ twice and x³(x−4y)
            vec![[1, -4, 6, -4, 1], [1, -4, 6, -4, 1], [1, -4, 0, 0, 0]],
            "G_a000",
        ),
    ]
}

pub fn example_suite(classifier: &Classifier) -> SuiteResult {
    let mut out = SuiteResult::new("worked examples");
    for (name, s, quartics, label) in worked_examples() {
        let want: Vec<[Gaussian; 5]> = quartics.iter().map(|c| c.map(Gaussian::from_i64)).collect();
        let got = quartic_multiset(&s);
        out.record(same_multiset(&got, &want), || format!("{name}: quartics"));
        match classifier.classify(&s) {
            Ok(r) => out.record(r.label == label, || format!("{name}: type {} instead of {label}", r.label)),
            Err(e) => out.record(false, || format!("{name}: {e}")),
        }
    }
    out
}

/// The embedded oracle suites at small, fixed sample sizes.
pub fn selftest(classifier: &Classifier) -> SelftestReport {
    SelftestReport {
        suites: vec![
            closed_form_suite(20, 1),
            example_suite(classifier),
            ev_table_suite(&classifier.catalog, 2, 2),
            coincidence_suite(5, 3),
            so8_suite(5, 4),
        ],
    }
}

/// A member of a (specialized) family at random rational free parameters.
pub fn specialized_state(
    family: FamilyId,
    spec: &crate::normal_forms::Specialization,
    rng: &mut impl Rng,
) -> Result<State<Gaussian>, Error> {
    let n = free_parameter_count(family, spec)?;
    let free: Vec<Gaussian> = (0..n).map(|_| random_rational(rng, 100)).collect();
    specialize(family, spec, &free)
}
