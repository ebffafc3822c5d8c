//! The decision tree: Verstraete type, parameter recovery in the generic
//! case, and SLOCC equivalence up to qubit permutation.

use crate::covariants::{case_table, evaluate_quantity, frame, Catalog, Quantity, QuantityValue};
use crate::error::Error;
use crate::field::Field;
use crate::geometry::{multirank, stratum, StratumRecord};
use crate::invariants::{invariant_vector, InvariantVector, ZeroPolicy, DEFAULT_TOL};
use crate::normal_forms::{gen_g, FamilyId, Specialization};
use crate::quartics::{build_quartics, numeric_roots, root_profile, RootProfile};
use crate::scalar::format_complex;
use crate::state::{AnyState, Permutation, State};
use num_complex::Complex64;
use num_integer::Integer;
use serde::{Serialize, Serializer};
use std::fmt;

/// A Verstraete family, or the nullcone marker for nilpotent states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeFamily {
    Family(FamilyId),
    Nilpotent,
}

impl TypeFamily {
    pub fn name(&self) -> &'static str {
        match self {
            TypeFamily::Family(f) => f.name(),
            TypeFamily::Nilpotent => "nilpotent (nullcone)",
        }
    }
}

impl Serialize for TypeFamily {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl fmt::Display for TypeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileTrace {
    /// 1-based quartic label.
    pub quartic: u8,
    pub partition: Vec<u8>,
    pub zero_multiplicity: u8,
}

impl From<(usize, &RootProfile)> for ProfileTrace {
    fn from((k, p): (usize, &RootProfile)) -> Self {
        ProfileTrace { quartic: k as u8 + 1, partition: p.partition.clone(), zero_multiplicity: p.zero_multiplicity }
    }
}

/// The covariant vector consumed by a case and its vanishing pattern.
#[derive(Clone, Debug, Serialize)]
pub struct EvTrace {
    pub vector: Vec<Quantity>,
    pub bits: Vec<u8>,
    pub values: Vec<QuantityValue>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeReport {
    pub family: TypeFamily,
    pub specialization: Specialization,
    /// Subscript label of the type, e.g. `L_aa0_2`.
    pub label: String,
    /// Cases traversed, outermost first, e.g. `["3", "3(c)"]`.
    pub case_path: Vec<String>,
    pub profiles: Vec<ProfileTrace>,
    pub ev: Option<EvTrace>,
    /// `(a, b, c, d)` up to the demitesseract reflection group, when the
    /// state is generic enough for them to be identifiable.
    pub parameters: Option<Vec<String>>,
    pub stratum: StratumRecord,
}

impl TypeReport {
    /// `[family; constraints]`.
    pub fn type_string(&self) -> String {
        match self.family {
            TypeFamily::Nilpotent => self.family.name().to_string(),
            TypeFamily::Family(f) if self.specialization.is_empty() => format!("[{f}; ∅]"),
            TypeFamily::Family(f) => format!("[{f}; {}]", self.specialization),
        }
    }

    pub fn same_type(&self, o: &TypeReport) -> bool {
        self.family == o.family && self.specialization == o.specialization && self.label == o.label
    }

    /// Everything a relabeling-free SLOCC transformation must preserve:
    /// the type, the case path, the ev bits and the stratum.
    pub fn same_classification(&self, o: &TypeReport) -> bool {
        self.same_type(o)
            && self.case_path == o.case_path
            && self.ev.as_ref().map(|e| &e.bits) == o.ev.as_ref().map(|e| &e.bits)
            && self.stratum == o.stratum
    }
}

/// Verdict of [`Classifier::equivalent`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Equivalent,
    Inequivalent,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct Equivalence {
    pub verdict: Verdict,
    pub reason: String,
    /// The relabeling of the second state that matched, if any.
    pub permutation: Option<String>,
}

pub struct Classifier {
    pub catalog: Catalog,
    /// Relative tolerance of the float backend.
    pub tol: f64,
}

fn policy<F: Field>(s: &State<F>, tol: f64) -> ZeroPolicy {
    if F::EXACT {
        ZeroPolicy::exact()
    } else {
        ZeroPolicy::for_state(s, tol)
    }
}

impl Classifier {
    pub fn new(catalog: Catalog, tol: f64) -> Self {
        Classifier { catalog, tol }
    }

    /// The catalog from [`Catalog::load`] and the default tolerance.
    pub fn load() -> Result<Self, Error> {
        Ok(Classifier::new(Catalog::load()?, DEFAULT_TOL))
    }

    pub fn classify_any(&self, s: &AnyState) -> Result<TypeReport, Error> {
        match s {
            AnyState::Exact(s) => self.classify(s),
            AnyState::Float(s) => self.classify(s),
        }
    }

    /// The Verstraete type of `s`.
    ///
    /// Nilpotent states short-circuit. Otherwise the case is read from
    /// which quartics have a zero root (none, exactly one, or all three,
    /// since `L+M+N = 0`) and the root multiplicities, and the case's
    /// covariant vector selects the table row.
    pub fn classify<F: Field>(&self, s: &State<F>) -> Result<TypeReport, Error> {
        let z = policy(s, self.tol);
        let iv = invariant_vector(s);
        let strat = stratum(&iv, multirank(s, &z), &z);
        if iv.is_nilpotent(&z) {
            return Ok(TypeReport {
                family: TypeFamily::Nilpotent,
                specialization: Specialization::none(),
                label: "nullcone".into(),
                case_path: vec!["nilpotent".into()],
                profiles: Vec::new(),
                ev: None,
                parameters: None,
                stratum: strat,
            });
        }
        let qs = build_quartics(&iv);
        let profiles: Vec<RootProfile> = (0..3).map(|k| root_profile(&qs[k], &iv, k + 1, &z)).collect();
        let traces: Vec<ProfileTrace> = profiles.iter().enumerate().map(ProfileTrace::from).collect();
        let with_zero: Vec<usize> = (0..3).filter(|&k| profiles[k].zero_multiplicity > 0).collect();
        let w = &profiles[0].witnesses;
        let no_match = |why: String| Error::NoMatch(format!("{why}; profiles {traces:?}"));

        let (top, case, special) = match with_zero.len() {
            0 => {
                let case = if w.delta_nonzero {
                    "1(a)"
                } else if !w.i2_nonzero && !w.i3_nonzero {
                    "1(c)"
                } else {
                    "1(b)"
                };
                ("1", case, None)
            }
            1 => {
                let k = with_zero[0];
                let p = &profiles[k];
                let case = match (p.zero_multiplicity, p.partition.as_slice()) {
                    (1, [1, 1, 1, 1]) => "2(a)",
                    (2, [2, 1, 1]) => "2(b)",
                    (3, [3, 1]) => "2(c)",
                    (1, [2, 1, 1]) => "2(d)",
                    (1, [3, 1]) => "2(e)",
                    _ => return Err(no_match(format!("case 2: unlisted profile of Q{}", k + 1))),
                };
                ("2", case, Some(k))
            }
            3 => {
                let all = |m: u8, part: &[u8]| profiles.iter().all(|p| p.zero_multiplicity == m && p.partition == part);
                let case = if w.delta_nonzero {
                    "3(a)"
                } else if all(1, &[2, 1, 1]) {
                    "3(b)"
                } else if profiles.iter().all(|p| p.zero_multiplicity == 2) {
                    "3(c)"
                } else {
                    return Err(no_match("case 3: unlisted root profiles".into()));
                };
                ("3", case, None)
            }
            _ => return Err(no_match("exactly two quartics with a zero root".into())),
        };
        let case_path = vec![top.to_string(), case.to_string()];

        let (family, specialization, label, ev) = match case {
            "1(a)" => (FamilyId::Gabcd, Specialization::none(), "G_abcd".to_string(), None),
            "2(a)" | "3(a)" => (FamilyId::Gabcd, Specialization::of(&["d=0"]), "G_abc0".to_string(), None),
            _ => {
                let table = case_table(case).expect("every remaining case has a table");
                let fr = frame(special);
                let values: Vec<QuantityValue> =
                    table.vector.iter().map(|&q| evaluate_quantity(&self.catalog, q, s, &fr, &z)).collect();
                let bits: Vec<u8> = values.iter().map(|v| v.nonzero as u8).collect();
                let row = table.rows.iter().find(|r| r.bits == bits.as_slice()).ok_or_else(|| {
                    no_match(format!(
                        "case {case}: ev[{}] = {bits:?}",
                        table.vector.iter().map(|q| q.symbol()).collect::<Vec<_>>().join(",")
                    ))
                })?;
                let ev = EvTrace { vector: table.vector.to_vec(), bits, values };
                (row.family, row.specialization(), row.label.to_string(), Some(ev))
            }
        };
        let parameters = if family == FamilyId::Gabcd {
            self.recover_g(s).ok().map(|p| p.iter().map(|c| format_complex(*c)).collect())
        } else {
            None
        };
        Ok(TypeReport {
            family: TypeFamily::Family(family),
            specialization,
            label,
            case_path,
            profiles: traces,
            ev,
            parameters,
            stratum: strat,
        })
    }

    /// Whether `t` can be brought to `s` by a qubit relabeling and SLOCC,
    /// up to scale: same type, and for some relabeling `σ` the invariants
    /// of `σ(t)` equal those of `s` after the weighted rescaling
    /// `(B, L, M, D_xy) ↦ (λ²B, λ⁴L, λ⁴M, λ⁶D_xy)`.
    pub fn equivalent<F: Field>(&self, s: &State<F>, t: &State<F>) -> Result<Equivalence, Error> {
        let (ts, tt) = (self.classify(s)?, self.classify(t)?);
        let nil = |r: &TypeReport| r.family == TypeFamily::Nilpotent;
        if nil(&ts) && nil(&tt) {
            return Ok(Equivalence {
                verdict: Verdict::Undecided,
                reason: "both states are nilpotent; their fine classification is not implemented".into(),
                permutation: None,
            });
        }
        if !ts.same_type(&tt) {
            return Ok(Equivalence {
                verdict: Verdict::Inequivalent,
                reason: format!(
                    "types differ: {} ({}) vs {} ({})",
                    ts.type_string(),
                    ts.label,
                    tt.type_string(),
                    tt.label
                ),
                permutation: None,
            });
        }
        let (zs, zt) = (policy(s, self.tol), policy(t, self.tol));
        let ivs = invariant_vector(s);
        for sigma in Permutation::all() {
            let ivt = invariant_vector(&t.permute_qubits(&sigma));
            if weighted_equal(&ivs, &zs, &ivt, &zt, self.tol) {
                return Ok(Equivalence {
                    verdict: Verdict::Equivalent,
                    reason: format!("same type {} and invariants agree up to scale after relabeling {sigma}", ts.label),
                    permutation: Some(sigma.to_string()),
                });
            }
        }
        Ok(Equivalence {
            verdict: Verdict::Inequivalent,
            reason: format!("same type {} but no relabeling matches the invariants up to scale", ts.label),
            permutation: None,
        })
    }
}

/// Equality in the weighted projective space with weights `(1, 2, 2, 3)`
/// (half the amplitude degrees of `B, L, M, D_xy`). Pairwise conditions
/// `x_iʷʲ y_jʷⁱ = y_iʷʲ x_jʷⁱ` with exponents divided by `gcd(w_i, w_j)`
/// suffice over ℂ.
fn weighted_equal<F: Field>(
    x: &InvariantVector<F>,
    zx: &ZeroPolicy,
    y: &InvariantVector<F>,
    zy: &ZeroPolicy,
    tol: f64,
) -> bool {
    let xs = [(&x.b, 1u32), (&x.l, 2), (&x.m, 2), (&x.dxy, 3)];
    let ys = [&y.b, &y.l, &y.m, &y.dxy];
    let support: Vec<usize> = (0..4).filter(|&i| !zx.is_zero(xs[i].0, 2 * xs[i].1)).collect();
    if (0..4).any(|i| support.contains(&i) == zy.is_zero(ys[i], 2 * xs[i].1)) {
        return false;
    }
    for (n, &i) in support.iter().enumerate() {
        for &j in &support[n + 1..] {
            let (wi, wj) = (xs[i].1, xs[j].1);
            let g = wi.gcd(&wj);
            let lhs = xs[i].0.pow(wj / g) * ys[j].pow(wi / g);
            let rhs = ys[i].pow(wj / g) * xs[j].0.pow(wi / g);
            let same = if F::EXACT {
                lhs == rhs
            } else {
                (lhs.clone() - rhs.clone()).modulus() <= tol * lhs.modulus().max(rhs.modulus())
            };
            if !same {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Parameter recovery
// ---------------------------------------------------------------------------

/// Canonical representative under permutations and even sign changes:
/// each entry is moved to the right half-plane (`re > 0`, or `re = 0` and
/// `im ≥ 0`), entries are sorted by modulus then argument, and if an odd
/// number of signs had to change, the first entry carries the sign.
pub fn canonicalize_d4(p: [Complex64; 4]) -> [Complex64; 4] {
    let scale = p.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let eps = 1e-9 * scale;
    let clean = |v: f64| if v.abs() <= eps { 0.0 } else { v };
    let mut flips = 0;
    let mut v: Vec<Complex64> = p
        .iter()
        .map(|c| {
            let c = Complex64::new(clean(c.re), clean(c.im));
            if c.re < 0.0 || (c.re == 0.0 && c.im < 0.0) {
                flips += 1;
                -c
            } else {
                c
            }
        })
        .collect();
    let key = |c: &Complex64| ((c.norm() / scale * 1e8).round() as i64, (c.arg() * 1e8).round() as i64);
    v.sort_by_key(key);
    if flips % 2 == 1 {
        v[0] = -v[0];
    }
    [v[0], v[1], v[2], v[3]]
}

/// Candidate parameters from a multiset of squares: square roots, with
/// the sign parity fixed by `L = abcd`, scored by the worst relative
/// deviation of `B, L, M, D_xy`.
fn candidate(ivf: &InvariantVector<Complex64>, squares: &[Complex64]) -> Result<(f64, [Complex64; 4]), Error> {
    let mut p: [Complex64; 4] = std::array::from_fn(|k| squares[k].sqrt());
    let prod = p[0] * p[1] * p[2] * p[3];
    if (prod + ivf.l).norm() < (prod - ivf.l).norm() {
        p[0] = -p[0];
    }
    let ivg = invariant_vector(&gen_g(p[0], p[1], p[2], p[3])?);
    let pairs = [(ivf.b, ivg.b, 2), (ivf.l, ivg.l, 4), (ivf.m, ivg.m, 4), (ivf.dxy, ivg.dxy, 6)];
    let scale = p.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let err = pairs.iter().map(|(w, g, d)| (w - g).norm() / scale.powi(*d)).fold(0.0, f64::max);
    Ok((err, p))
}

/// Roots of `q` as a multiset matching `expected` multiplicities, widening
/// the clustering tolerance until the partition agrees. A root of
/// multiplicity `m` is a simple root of the `(m−1)`-th derivative, where
/// Newton's method polishes the cluster mean.
fn roots_with_partition(q: &crate::quartics::BinaryQuartic<Complex64>, expected: &[u8]) -> Option<Vec<Complex64>> {
    let derivative = |c: &[Complex64]| -> Vec<Complex64> {
        let n = c.len() - 1;
        c[..n].iter().enumerate().map(|(k, v)| v * (n - k) as f64).collect()
    };
    let eval = |c: &[Complex64], x: Complex64| c.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc * x + v);
    let polish = |x: Complex64, m: u8| {
        let mut c = q.0.to_vec();
        for _ in 1..m {
            c = derivative(&c);
        }
        let dc = derivative(&c);
        let mut x = x;
        for _ in 0..8 {
            let d = eval(&dc, x);
            if d.norm() == 0.0 {
                break;
            }
            let step = eval(&c, x) / d;
            if !step.is_finite() {
                break;
            }
            x -= step;
        }
        x
    };
    [1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-3, 1e-2].iter().find_map(|&tol| {
        let r = numeric_roots(q, tol);
        (r.partition() == expected).then(|| {
            r.roots
                .iter()
                .flat_map(|(c, m)| std::iter::repeat_n(polish(Complex64::new(c[0], c[1]), *m), *m as usize))
                .collect()
        })
    })
}

fn recover_from<F: Field>(s: &State<F>, partitions: [Vec<u8>; 3]) -> Result<[Complex64; 4], Error> {
    let f = s.map(|a| a.to_c64());
    let ivf = invariant_vector(&f);
    let mut best: Option<(f64, [Complex64; 4])> = None;
    for (q, expected) in build_quartics(&ivf).iter().zip(&partitions) {
        let Some(squares) = roots_with_partition(q, expected) else { continue };
        let (err, p) = candidate(&ivf, &squares)?;
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, p));
        }
    }
    match best {
        Some((err, p)) if err <= 1e-6 => Ok(canonicalize_d4(p)),
        _ => Err(Error::Unsupported("no parameter candidate reproduces the invariants".into())),
    }
}

/// Parameters `(a, b, c, d)` with `invariant_vector(gen_G(a,b,c,d))` equal
/// to that of `s`, canonicalized by [`canonicalize_d4`]. Requires `Δ ≠ 0`.
///
/// The squares are the roots of a diagnostic quartic (all three labels are
/// tried); the square roots are fixed up to an even number of sign changes
/// by `L = abcd`, and a candidate is accepted only if its invariant vector
/// matches.
pub fn recover_parameters<F: Field>(s: &State<F>) -> Result<[Complex64; 4], Error> {
    let z = policy(s, DEFAULT_TOL);
    let iv = invariant_vector(s);
    if z.is_zero(&iv.delta, 24) {
        return Err(Error::Unsupported(
            "not of G type with Δ ≠ 0: parameters are not identifiable from the quartic roots".into(),
        ));
    }
    recover_from(s, std::array::from_fn(|_| vec![1, 1, 1, 1]))
}

impl Classifier {
    /// [`recover_parameters`], extended to `G`-type states on `Δ = 0`: the
    /// classifier certifies the type, and the exact root multiplicities
    /// guide the clustering of the repeated squares.
    pub fn recover_parameters<F: Field>(&self, s: &State<F>) -> Result<[Complex64; 4], Error> {
        let r = self.classify(s)?;
        if r.family != TypeFamily::Family(FamilyId::Gabcd) {
            return Err(Error::Unsupported(format!("not of G type: {}", r.type_string())));
        }
        self.recover_g(s)
    }

    fn recover_g<F: Field>(&self, s: &State<F>) -> Result<[Complex64; 4], Error> {
        let z = policy(s, self.tol);
        let iv = invariant_vector(s);
        let qs = build_quartics(&iv);
        recover_from(s, std::array::from_fn(|k| root_profile(&qs[k], &iv, k + 1, &z).partition))
    }
}
