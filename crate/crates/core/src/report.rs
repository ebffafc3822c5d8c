//! JSON and text renderings of the analysis results.

use crate::classifier::{TypeFamily, TypeReport};
use crate::field::Field;
use crate::geometry::{multirank, so8_checks, stratum};
use crate::invariants::{invariant_vector, ZeroPolicy, INVARIANT_NAMES};
use crate::quartics::{build_quartics, root_profile};
use crate::state::{AnyState, State};
use serde_json::{json, Map, Value};
use std::fmt::Write;

fn policy<F: Field>(s: &State<F>, tol: f64) -> ZeroPolicy {
    if F::EXACT {
        ZeroPolicy::exact()
    } else {
        ZeroPolicy::for_state(s, tol)
    }
}

/// The twelve invariants and the three quartics with their root profiles.
pub fn invariants_report<F: Field>(s: &State<F>, tol: f64) -> Value {
    let z = policy(s, tol);
    let iv = invariant_vector(s);
    let mut inv = Map::new();
    for ((name, _), v) in INVARIANT_NAMES.iter().zip(iv.values()) {
        inv.insert(name.to_string(), Value::String(v.render()));
    }
    let quartics: Vec<Value> = build_quartics(&iv)
        .iter()
        .enumerate()
        .map(|(k, q)| {
            let p = root_profile(q, &iv, k + 1, &z);
            json!({
                "label": format!("Q{}", k + 1),
                "coefficients": q.0.iter().map(|c| c.render()).collect::<Vec<_>>(),
                "partition": p.partition,
                "zero_multiplicity": p.zero_multiplicity,
                "witnesses": p.witnesses,
            })
        })
        .collect();
    json!({ "invariants": inv, "quartics": quartics, "nilpotent": iv.is_nilpotent(&z) })
}

/// Stratum flags, multirank and the so(8) identity checks.
pub fn strata_report<F: Field>(s: &State<F>, tol: f64) -> Value {
    let z = policy(s, tol);
    let iv = invariant_vector(s);
    let rec = stratum(&iv, multirank(s, &z), &z);
    let so8 = so8_checks(s, &iv, 1e-9);
    json!({ "stratum": rec, "chain_respected": rec.chain_respected(), "so8": so8, "so8_holds": so8.all_hold() })
}

pub fn invariants_any(s: &AnyState, tol: f64) -> Value {
    match s {
        AnyState::Exact(s) => invariants_report(s, tol),
        AnyState::Float(s) => invariants_report(s, tol),
    }
}

pub fn strata_any(s: &AnyState, tol: f64) -> Value {
    match s {
        AnyState::Exact(s) => strata_report(s, tol),
        AnyState::Float(s) => strata_report(s, tol),
    }
}

/// The decision trace as an indented case path.
pub fn pretty_type(r: &TypeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "type {}  ({})", r.type_string(), r.label);
    for p in &r.profiles {
        let _ = writeln!(out, "  Q{}: roots {:?}, zero multiplicity {}", p.quartic, p.partition, p.zero_multiplicity);
    }
    for (depth, case) in r.case_path.iter().enumerate() {
        let _ = writeln!(out, "{}case {case}", "  ".repeat(depth + 1));
    }
    let depth = r.case_path.len() + 1;
    if let Some(ev) = &r.ev {
        let names: Vec<&str> = ev.vector.iter().map(|q| q.symbol()).collect();
        let _ = writeln!(out, "{}ev[{}] = {:?}", "  ".repeat(depth), names.join(", "), ev.bits);
    }
    if r.family == TypeFamily::Nilpotent {
        let _ = writeln!(out, "{}B = L = M = Dxy = 0", "  ".repeat(depth));
    }
    if let Some(p) = &r.parameters {
        let _ = writeln!(out, "parameters (a, b, c, d) = ({})", p.join(", "));
    }
    let st = &r.stratum;
    let _ = writeln!(
        out,
        "multirank {:?}; dual {}; cusp {}; node {:?}; cusp3 {:?}; nullcone {}",
        st.secant.multirank.0, st.dual, st.cusp, st.node, st.cusp3, st.nullcone
    );
    out
}
