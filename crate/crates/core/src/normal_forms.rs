//! The nine Verstraete families, their specializations, and generators.

use crate::error::Error;
use crate::field::Field;
use crate::state::State;
use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FamilyId {
    #[serde(rename = "G_abcd")]
    Gabcd,
    #[serde(rename = "L_abc2")]
    Labc2,
    #[serde(rename = "L_a2b2")]
    La2b2,
    #[serde(rename = "L_ab3")]
    Lab3,
    #[serde(rename = "L_a4")]
    La4,
    #[serde(rename = "L_a2_0_3+1")]
    La2_0_3p1,
    #[serde(rename = "L_0_5+3")]
    L0_5p3,
    #[serde(rename = "L_0_7+1")]
    L0_7p1,
    #[serde(rename = "L_0_3+1_0_3+1")]
    L0_3p1_0_3p1,
}

impl FamilyId {
    pub const ALL: [FamilyId; 9] = [
        FamilyId::Gabcd,
        FamilyId::Labc2,
        FamilyId::La2b2,
        FamilyId::Lab3,
        FamilyId::La4,
        FamilyId::La2_0_3p1,
        FamilyId::L0_5p3,
        FamilyId::L0_7p1,
        FamilyId::L0_3p1_0_3p1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Gabcd => "G_abcd",
            FamilyId::Labc2 => "L_abc2",
            FamilyId::La2b2 => "L_a2b2",
            FamilyId::Lab3 => "L_ab3",
            FamilyId::La4 => "L_a4",
            FamilyId::La2_0_3p1 => "L_a2_0_3+1",
            FamilyId::L0_5p3 => "L_0_5+3",
            FamilyId::L0_7p1 => "L_0_7+1",
            FamilyId::L0_3p1_0_3p1 => "L_0_3+1_0_3+1",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            FamilyId::Gabcd => 4,
            FamilyId::Labc2 => 3,
            FamilyId::La2b2 | FamilyId::Lab3 => 2,
            FamilyId::La4 | FamilyId::La2_0_3p1 => 1,
            _ => 0,
        }
    }

    /// Parameter names in order.
    pub fn parameters(self) -> &'static [char] {
        &['a', 'b', 'c', 'd'][..self.arity()]
    }

    /// Accepts canonical names and a few short aliases (`G`, `Labc2`, ...).
    pub fn parse(s: &str) -> Result<FamilyId, Error> {
        let key: String = s.chars().filter(|c| !matches!(c, '_' | '{' | '}')).collect::<String>().to_ascii_lowercase();
        let found = match key.as_str() {
            "g" | "gabcd" => FamilyId::Gabcd,
            "labc2" => FamilyId::Labc2,
            "la2b2" => FamilyId::La2b2,
            "lab3" => FamilyId::Lab3,
            "la4" => FamilyId::La4,
            "la203+1" | "la2031" => FamilyId::La2_0_3p1,
            "l05+3" | "l053" => FamilyId::L0_5p3,
            "l07+1" | "l071" => FamilyId::L0_7p1,
            "l03+103+1" | "l031031" => FamilyId::L0_3p1_0_3p1,
            _ => return Err(Error::UnknownFamily(s.to_string())),
        };
        Ok(found)
    }

    pub fn is_nilpotent(self) -> bool {
        matches!(self, FamilyId::L0_5p3 | FamilyId::L0_7p1 | FamilyId::L0_3p1_0_3p1)
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn half<F: Field>(v: F) -> F {
    v * F::from_ratio(1, 2)
}

/// `½(a+d)(|0000⟩+|1111⟩) + ½(a−d)(|0011⟩+|1100⟩) + ½(b+c)(|0101⟩+|1010⟩)
///  + ½(b−c)(|0110⟩+|1001⟩)`.
pub fn gen_g<F: Field>(a: F, b: F, c: F, d: F) -> Result<State<F>, Error> {
    let p = half(a.clone() + d.clone());
    let q = half(a - d);
    let r = half(b.clone() + c.clone());
    let s = half(b - c);
    State::from_terms(&[
        ("0000", p.clone()),
        ("1111", p),
        ("0011", q.clone()),
        ("1100", q),
        ("0101", r.clone()),
        ("1010", r),
        ("0110", s.clone()),
        ("1001", s),
    ])
}

pub fn gen_family<F: Field>(id: FamilyId, params: &[F]) -> Result<State<F>, Error> {
    if params.len() != id.arity() {
        return Err(Error::Arity { family: id.name().into(), expected: id.arity(), got: params.len() });
    }
    let one = F::one;
    let i = F::i;
    let p = |k: usize| params[k].clone();
    match id {
        FamilyId::Gabcd => gen_g(p(0), p(1), p(2), p(3)),
        FamilyId::Labc2 => {
            let s = half(p(0) + p(1));
            let t = half(p(0) - p(1));
            State::from_terms(&[
                ("0000", s.clone()),
                ("1111", s),
                ("0011", t.clone()),
                ("1100", t),
                ("0101", p(2)),
                ("1010", p(2)),
                ("0110", one()),
            ])
        }
        FamilyId::La2b2 => State::from_terms(&[
            ("0000", p(0)),
            ("1111", p(0)),
            ("0101", p(1)),
            ("1010", p(1)),
            ("0110", one()),
            ("0011", one()),
        ]),
        FamilyId::Lab3 => {
            let s = half(p(0) + p(1));
            let t = half(p(0) - p(1));
            State::from_terms(&[
                ("0000", p(0)),
                ("1111", p(0)),
                ("0101", s.clone()),
                ("1010", s),
                ("0110", t.clone()),
                ("1001", t),
                ("0001", i()),
                ("0010", i()),
                ("0111", -i()),
                ("1011", -i()),
            ])
        }
        FamilyId::La4 => State::from_terms(&[
            ("0000", p(0)),
            ("0101", p(0)),
            ("1010", p(0)),
            ("1111", p(0)),
            ("0001", i()),
            ("0110", one()),
            ("1011", -i()),
        ]),
        FamilyId::La2_0_3p1 => {
            State::from_terms(&[("0000", p(0)), ("1111", p(0)), ("0011", one()), ("0101", one()), ("0110", one())])
        }
        FamilyId::L0_5p3 => State::from_terms(&[("0000", one()), ("0101", one()), ("1000", one()), ("1110", one())]),
        FamilyId::L0_7p1 => State::from_terms(&[("0000", one()), ("1011", one()), ("1101", one()), ("1110", one())]),
        FamilyId::L0_3p1_0_3p1 => State::from_terms(&[("0000", one()), ("0111", one())]),
    }
}

/// A linear constraint `Σ coeffs[k]·param_k = 0` among family parameters.
#[derive(Clone, Debug, PartialEq)]
struct Equation(Vec<(i64, i64)>);

/// A specialization of a family: a list of constraints such as `c=d`,
/// `a=b=0`, `c=-2a` or `c=b/2`. Constraints of the form `x^2=y^2` select the
/// branch `x=y`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct Specialization(pub Vec<String>);

impl Specialization {
    pub fn none() -> Self {
        Specialization(Vec::new())
    }

    pub fn of(constraints: &[&str]) -> Self {
        Specialization(constraints.iter().map(|s| s.to_string()).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Specialization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("∅")
        } else {
            f.write_str(&self.0.join(", "))
        }
    }
}

/// Parses `expr` as a rational linear combination of parameters, returned
/// as (numerator, denominator) per parameter plus nothing for constants
/// (constants other than 0 are rejected: specializations are homogeneous).
fn parse_linear(expr: &str, names: &[char], whole: &str) -> Result<Vec<(i64, i64)>, Error> {
    let bad = || Error::Specialization(whole.to_string());
    let mut coeffs = vec![(0i64, 1i64); names.len()];
    let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad());
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (k, ch) in s.char_indices() {
        if k > 0 && (ch == '+' || ch == '-') {
            terms.push(&s[start..k]);
            start = k;
        }
    }
    terms.push(&s[start..]);
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(b) => (-1, b),
            None => (1, term.strip_prefix('+').unwrap_or(term)),
        };
        let var = body.chars().find(|c| c.is_ascii_alphabetic());
        let numeric: String = body.chars().filter(|c| !c.is_ascii_alphabetic() && *c != '*').collect();
        // forms: "3", "2a", "a", "a/2", "3a/2", "3/2a"
        let (n, d) = match numeric.split_once('/') {
            Some((n, d)) => {
                let n = if n.is_empty() { 1 } else { n.parse::<i64>().map_err(|_| bad())? };
                (n, d.parse::<i64>().map_err(|_| bad())?)
            }
            None if numeric.is_empty() => (1, 1),
            None => (numeric.parse::<i64>().map_err(|_| bad())?, 1),
        };
        if d == 0 {
            return Err(bad());
        }
        match var {
            Some(v) => {
                let k = names.iter().position(|&c| c == v).ok_or_else(bad)?;
                let (cn, cd) = coeffs[k];
                // cn/cd + sign·n/d
                coeffs[k] = (cn * d + sign * n * cd, cd * d);
            }
            None if n == 0 => {}
            None => return Err(bad()),
        }
    }
    Ok(coeffs)
}

fn parse_constraint(c: &str, names: &[char]) -> Result<Vec<Equation>, Error> {
    let bad = || Error::Specialization(c.to_string());
    let cleaned = c.replace("^2", "").replace('²', "");
    let sides: Vec<&str> = cleaned.split('=').collect();
    if sides.len() < 2 {
        return Err(bad());
    }
    let exprs = sides.iter().map(|s| parse_linear(s, names, c)).collect::<Result<Vec<_>, _>>()?;
    Ok(exprs
        .windows(2)
        .map(|w| Equation(w[0].iter().zip(&w[1]).map(|(&(an, ad), &(bn, bd))| (an * bd - bn * ad, ad * bd)).collect()))
        .collect())
}

/// Solves the constraints, assigns `free` to the unconstrained parameters
/// in alphabetical order, and generates the state.
pub fn specialize<F: Field>(id: FamilyId, spec: &Specialization, free: &[F]) -> Result<State<F>, Error> {
    let names = id.parameters();
    let n = names.len();
    let mut rows: Vec<Vec<F>> = Vec::new();
    for c in &spec.0 {
        for eq in parse_constraint(c, names)? {
            rows.push(eq.0.iter().map(|&(a, b)| F::from_ratio(a, b)).collect());
        }
    }
    // Eliminate on reversed columns so later parameters are expressed
    // through earlier ones and the free ones come first alphabetically.
    let mut rev: Vec<Vec<F>> = rows.iter().map(|r| r.iter().rev().cloned().collect()).collect();
    let rev_pivots = crate::linalg::rref(&mut rev);
    let rows: Vec<Vec<F>> = rev.iter().map(|r| r.iter().rev().cloned().collect()).collect();
    let pivots: Vec<usize> = rev_pivots.iter().map(|&c| n - 1 - c).collect();
    let free_cols: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if free.len() != free_cols.len() {
        return Err(Error::Arity {
            family: format!("{} [{}]", id.name(), spec),
            expected: free_cols.len(),
            got: free.len(),
        });
    }
    let mut params = vec![F::zero(); n];
    for (k, &c) in free_cols.iter().enumerate() {
        params[c] = free[k].clone();
    }
    for (row, &pc) in pivots.iter().enumerate() {
        let mut v = F::zero();
        for &c in &free_cols {
            let t = rows[row][c].clone() * params[c].clone();
            v -= &t;
        }
        params[pc] = v;
    }
    gen_family(id, &params)
}

/// Number of free parameters left by a specialization.
pub fn free_parameter_count(id: FamilyId, spec: &Specialization) -> Result<usize, Error> {
    let names = id.parameters();
    let mut eqs = Vec::new();
    for c in &spec.0 {
        eqs.extend(parse_constraint(c, names)?);
    }
    // Rank over ℚ via the exact field.
    let rows: Vec<Vec<crate::field::Gaussian>> =
        eqs.iter().map(|e| e.0.iter().map(|&(a, b)| crate::field::Gaussian::from_ratio(a, b)).collect()).collect();
    Ok(names.len() - crate::linalg::rank(rows))
}
