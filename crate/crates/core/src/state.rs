//! Four-qubit states and the two group actions on them.

use crate::error::Error;
use crate::field::{Field, Gaussian};
use crate::scalar::{format_complex, Backend, Scalar};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::fmt;

/// Amplitudes `a_{ijkl}`, stored at position `8i + 4j + 2k + l`.
#[derive(Clone, PartialEq)]
pub struct State<F> {
    amps: [F; 16],
}

pub fn linear_index(idx: [u8; 4]) -> usize {
    (idx[0] as usize) << 3 | (idx[1] as usize) << 2 | (idx[2] as usize) << 1 | idx[3] as usize
}

pub fn bits_of(m: usize) -> [u8; 4] {
    [(m >> 3 & 1) as u8, (m >> 2 & 1) as u8, (m >> 1 & 1) as u8, (m & 1) as u8]
}

pub fn label(m: usize) -> String {
    bits_of(m).iter().map(|b| char::from(b'0' + b)).collect()
}

impl<F: Field> State<F> {
    /// Builds a state, rejecting the zero vector.
    pub fn new(amps: [F; 16]) -> Result<Self, Error> {
        if amps.iter().all(|a| a.is_zero()) {
            return Err(Error::ZeroState);
        }
        Ok(State { amps })
    }

    /// Sum of `coefficient · |label⟩` terms; repeated labels accumulate.
    pub fn from_terms(terms: &[(&str, F)]) -> Result<Self, Error> {
        let mut amps: [F; 16] = std::array::from_fn(|_| F::zero());
        for (l, c) in terms {
            amps[parse_label(l)?] += c;
        }
        Self::new(amps)
    }

    pub fn amp(&self, idx: [u8; 4]) -> &F {
        &self.amps[linear_index(idx)]
    }

    pub fn amplitudes(&self) -> &[F; 16] {
        &self.amps
    }

    /// Nonzero amplitudes with their index.
    pub fn iter(&self) -> impl Iterator<Item = ([u8; 4], &F)> {
        self.amps.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(m, a)| (bits_of(m), a))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> State<G> {
        State { amps: std::array::from_fn(|m| f(&self.amps[m])) }
    }

    pub fn scale(&self, k: &F) -> Self {
        self.map(|a| {
            let mut v = a.clone();
            v *= k;
            v
        })
    }

    /// Largest amplitude modulus.
    pub fn scale_magnitude(&self) -> f64 {
        self.amps.iter().map(|a| a.modulus()).fold(0.0, f64::max)
    }

    /// `(A1 ⊗ A2 ⊗ A3 ⊗ A4)|φ⟩`.
    pub fn apply_local(&self, g: &LocalOperator<F>) -> Self {
        let mut cur = self.amps.clone();
        for q in 0..4 {
            let bit = 3 - q;
            let m = &g.0[q];
            let mut next: [F; 16] = std::array::from_fn(|_| F::zero());
            for (idx, slot) in next.iter_mut().enumerate() {
                let i = idx >> bit & 1;
                let base = idx & !(1 << bit);
                for (j, row) in m[i].iter().enumerate() {
                    let src = &cur[base | j << bit];
                    if !src.is_zero() && !row.is_zero() {
                        let mut t = row.clone();
                        t *= src;
                        *slot += &t;
                    }
                }
            }
            cur = next;
        }
        State { amps: cur }
    }

    /// Output amplitude at `(i1,i2,i3,i4)` is the input amplitude at
    /// `(i_{σ(1)}, i_{σ(2)}, i_{σ(3)}, i_{σ(4)})`, so input qubit `q` ends up
    /// in position `σ(q)`, and `permute(permute(s, σ), τ) = permute(s, τ∘σ)`.
    pub fn permute_qubits(&self, sigma: &Permutation) -> Self {
        State {
            amps: std::array::from_fn(|m| {
                let out = bits_of(m);
                let src = [out[sigma.image(0)], out[sigma.image(1)], out[sigma.image(2)], out[sigma.image(3)]];
                self.amps[linear_index(src)].clone()
            }),
        }
    }
}

impl<F: Field + fmt::Display> fmt::Display for State<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, a) in self.amps.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({a})|{}⟩", label(m))?;
        }
        Ok(())
    }
}

impl<F: fmt::Debug> fmt::Debug for State<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.amps.iter().enumerate()).finish()
    }
}

fn parse_label(l: &str) -> Result<usize, Error> {
    if l.len() != 4 || !l.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::State(format!("bad index {l:?}")));
    }
    Ok(usize::from_str_radix(l, 2).expect("binary label"))
}

/// A permutation of the four qubits, stored 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation([usize; 4]);

impl Permutation {
    pub const IDENTITY: Permutation = Permutation([0, 1, 2, 3]);

    pub fn new(images: [usize; 4]) -> Result<Self, Error> {
        let mut seen = [false; 4];
        for &v in &images {
            if v > 3 || seen[v] {
                return Err(Error::Permutation(format!("{images:?}")));
            }
            seen[v] = true;
        }
        Ok(Permutation(images))
    }

    /// One-line notation with 1-based images, e.g. `"1324"`.
    pub fn parse(word: &str) -> Result<Self, Error> {
        let bad = || Error::Permutation(word.to_string());
        let digits: Vec<usize> =
            word.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect::<Result<_, _>>()?;
        if digits.len() != 4 || digits.iter().any(|&d| d == 0 || d > 4) {
            return Err(bad());
        }
        Self::new([digits[0] - 1, digits[1] - 1, digits[2] - 1, digits[3] - 1]).map_err(|_| bad())
    }

    pub fn image(&self, p: usize) -> usize {
        self.0[p]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(std::array::from_fn(|p| self.0[other.0[p]]))
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = [0; 4];
        for p in 0..4 {
            inv[self.0[p]] = p;
        }
        Permutation(inv)
    }

    /// All 24 permutations in lexicographic order.
    pub fn all() -> Vec<Permutation> {
        let mut out = Vec::with_capacity(24);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        if let Ok(p) = Permutation::new([a, b, c, d]) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    /// Applies the relabeling `p ↦ σ(p)` to a vector indexed by qubit.
    pub fn move_vector<T: Copy + Default>(&self, v: [T; 4]) -> [T; 4] {
        let mut out = [T::default(); 4];
        for p in 0..4 {
            out[self.0[p]] = v[p];
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.0 {
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

/// Four 2×2 matrices `(A1, A2, A3, A4)`, one per qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator<F>(pub [[[F; 2]; 2]; 4]);

impl<F: Field> LocalOperator<F> {
    pub fn identity() -> Self {
        LocalOperator(std::array::from_fn(|_| [[F::one(), F::zero()], [F::zero(), F::one()]]))
    }

    pub fn determinants(&self) -> [F; 4] {
        std::array::from_fn(|q| {
            let m = &self.0[q];
            m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone()
        })
    }

    pub fn is_sl2(&self) -> bool {
        self.determinants().iter().all(|d| (d.clone() - F::one()).is_zero())
    }

    /// Componentwise product `self · other`: acting by `other` then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        LocalOperator(std::array::from_fn(|q| {
            let (a, b) = (&self.0[q], &other.0[q]);
            std::array::from_fn(|i| {
                std::array::from_fn(|j| a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone())
            })
        }))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> LocalOperator<G> {
        LocalOperator(std::array::from_fn(|q| std::array::from_fn(|i| std::array::from_fn(|j| f(&self.0[q][i][j])))))
    }
}

/// Four integer SL2 matrices, each a product of three elementary shears
/// with entries drawn from `[-bound, bound]`; deterministic in `seed`.
pub fn random_sl2_quadruple<F: Field>(seed: u64, bound: i64) -> LocalOperator<F> {
    let bound = bound.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    LocalOperator(std::array::from_fn(|_| {
        let mut m = [[1i128, 0], [0, 1]];
        for step in 0..3 {
            let k = rng.gen_range(-bound..=bound) as i128;
            m = if step % 2 == 0 {
                // m · [[1, k], [0, 1]]
                [[m[0][0], m[0][0] * k + m[0][1]], [m[1][0], m[1][0] * k + m[1][1]]]
            } else {
                // m · [[1, 0], [k, 1]]
                [[m[0][0] + m[0][1] * k, m[0][1]], [m[1][0] + m[1][1] * k, m[1][1]]]
            };
        }
        std::array::from_fn(|i| std::array::from_fn(|j| F::from_i128(m[i][j])))
    }))
}

/// A parsed state in whichever backend its serialization requested.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq)]
pub enum AnyState {
    Exact(State<Gaussian>),
    Float(State<Complex64>),
}

impl AnyState {
    pub fn backend(&self) -> Backend {
        match self {
            AnyState::Exact(_) => Backend::Exact,
            AnyState::Float(_) => Backend::Float,
        }
    }

    pub fn to_float(&self) -> State<Complex64> {
        match self {
            AnyState::Exact(s) => s.map(|g| g.to_complex()),
            AnyState::Float(s) => s.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyState::Exact(s) => serialize_state(s, Backend::Exact, |g| g.to_string()),
            AnyState::Float(s) => serialize_state(s, Backend::Float, |c| format_complex(*c)),
        }
    }
}

fn serialize_state<F: Field>(s: &State<F>, backend: Backend, fmt: impl Fn(&F) -> String) -> Value {
    let amps: Map<String, Value> = s
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .map(|(m, a)| (label(m), Value::String(fmt(a))))
        .collect();
    let mut obj = Map::new();
    obj.insert("amplitudes".into(), Value::Object(amps));
    obj.insert("backend".into(), Value::String(backend.to_string()));
    Value::Object(obj)
}

pub fn serialize_exact(s: &State<Gaussian>) -> String {
    AnyState::Exact(s.clone()).to_json().to_string()
}

/// Parses the JSON state serialization. A bare amplitude map (without the
/// `"amplitudes"` wrapper) is also accepted. `backend` overrides the
/// document's own tag; otherwise exact is used whenever it parses.
pub fn parse_state(text: &str, backend: Option<Backend>) -> Result<AnyState, Error> {
    let duplicate = find_duplicate_key(text);
    let v: Value = serde_json::from_str(text).map_err(|e| Error::State(e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| Error::State("expected a JSON object".into()))?;
    let (amps, tag) = match obj.get("amplitudes") {
        Some(a) => {
            let tag = match obj.get("backend") {
                Some(Value::String(b)) => Some(b.parse::<Backend>()?),
                Some(_) => return Err(Error::State("backend must be a string".into())),
                None => None,
            };
            (a.as_object().ok_or_else(|| Error::State("amplitudes must be an object".into()))?, tag)
        }
        None => (obj, None),
    };
    if let Some(k) = duplicate {
        return Err(Error::DuplicateIndex(k));
    }
    let mut entries: BTreeMap<usize, String> = BTreeMap::new();
    for (k, val) in amps {
        let m = parse_label(k)?;
        let lit = match val {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(Error::State(format!("amplitude {k} must be a string"))),
        };
        entries.insert(m, lit);
    }
    let backend = backend.or(tag).unwrap_or(Backend::Exact);
    match backend {
        Backend::Exact => {
            let mut amps: [Gaussian; 16] = std::array::from_fn(|_| Gaussian::zero());
            for (m, lit) in &entries {
                match Scalar::parse(lit, Backend::Exact)? {
                    Scalar::Exact(g) => amps[*m] = g,
                    Scalar::Float(_) => unreachable!(),
                }
            }
            Ok(AnyState::Exact(State::new(amps)?))
        }
        Backend::Float => {
            let mut amps = [Complex64::new(0.0, 0.0); 16];
            for (m, lit) in &entries {
                amps[*m] = Scalar::parse(lit, Backend::Float)?.to_complex();
            }
            Ok(AnyState::Float(State::new(amps)?))
        }
    }
}

/// serde_json silently keeps the last of repeated keys; scan for them first.
fn find_duplicate_key(text: &str) -> Option<String> {
    let mut seen: Vec<std::collections::HashSet<String>> = Vec::new();
    let mut chars = text.chars().peekable();
    let mut expect_key = false;
    while let Some(c) = chars.next() {
        match c {
            '{' => {
                seen.push(Default::default());
                expect_key = true;
            }
            '}' => {
                seen.pop();
                expect_key = false;
            }
            ',' => expect_key = true,
            '"' => {
                let mut s = String::new();
                while let Some(d) = chars.next() {
                    match d {
                        '\\' => {
                            if let Some(e) = chars.next() {
                                s.push(e);
                            }
                        }
                        '"' => break,
                        _ => s.push(d),
                    }
                }
                if expect_key {
                    if let Some(set) = seen.last_mut() {
                        if !set.insert(s.clone()) {
                            return Some(s);
                        }
                    }
                    expect_key = false;
                }
            }
            '[' => {
                seen.push(Default::default());
                expect_key = false;
            }
            ']' => {
                seen.pop();
            }
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> Gaussian {
        Gaussian::from_i64(n)
    }

    #[test]
    fn parse_examples() {
        let s = parse_state(r#"{"0000":"1","1111":"1"}"#, None).unwrap();
        match s {
            AnyState::Exact(s) => {
                assert_eq!(*s.amp([0, 0, 0, 0]), g(1));
                assert_eq!(*s.amp([1, 1, 1, 1]), g(1));
                assert_eq!(s.iter().count(), 2);
            }
            _ => panic!(),
        }
        let s = parse_state(r#"{"amplitudes":{"0000":"1/2+1/2i"}}"#, None).unwrap();
        assert_eq!(s, AnyState::Exact(State::from_terms(&[("0000", Gaussian::from_parts(1, 2, 1, 2))]).unwrap()));
        assert_eq!(parse_state("{}", None), Err(Error::ZeroState));
        assert_eq!(parse_state(r#"{"0000":"1","0000":"2"}"#, None), Err(Error::DuplicateIndex("0000".into())));
        assert!(parse_state(r#"{"0000":"x"}"#, None).is_err());
        assert!(parse_state(r#"{"00000":"1"}"#, None).is_err());
    }

    #[test]
    fn permutation_example() {
        let one = g(1);
        let phi1 = State::from_terms(&[
            ("0000", one.clone()),
            ("0011", one.clone()),
            ("1100", one.clone()),
            ("1111", one.clone()),
        ])
        .unwrap();
        let phi2 =
            State::from_terms(&[("0000", one.clone()), ("0101", one.clone()), ("1010", one.clone()), ("1111", one)])
                .unwrap();
        assert_eq!(phi1.permute_qubits(&Permutation::parse("1324").unwrap()), phi2);
    }

    #[test]
    fn permutation_moves_qubit() {
        // |1000⟩ under σ with σ(1) = 3 becomes |0010⟩.
        let s = State::from_terms(&[("1000", g(1))]).unwrap();
        let sigma = Permutation::parse("3124").unwrap();
        assert_eq!(s.permute_qubits(&sigma), State::from_terms(&[("0010", g(1))]).unwrap());
    }

    #[test]
    fn shears_have_unit_determinant() {
        for seed in 0..20 {
            let op: LocalOperator<Gaussian> = random_sl2_quadruple(seed, 5);
            assert!(op.is_sl2());
        }
        let a: LocalOperator<Gaussian> = random_sl2_quadruple(7, 5);
        let b: LocalOperator<Gaussian> = random_sl2_quadruple(7, 5);
        assert_eq!(a, b);
    }

    #[test]
    fn ghz_is_flip_symmetric() {
        let ghz = State::from_terms(&[("0000", g(1)), ("1111", g(1))]).unwrap();
        let x = [[Gaussian::zero(), g(1)], [g(1), Gaussian::zero()]];
        let op = LocalOperator([x.clone(), x.clone(), x.clone(), x]);
        assert_eq!(ghz.apply_local(&op), ghz);
        assert_eq!(ghz.apply_local(&LocalOperator::identity()), ghz);
    }

    #[test]
    fn serialization_round_trip() {
        let s = State::from_terms(&[("0110", Gaussian::from_parts(-3, 7, 2, 5)), ("1001", g(4))]).unwrap();
        let text = serialize_exact(&s);
        assert_eq!(parse_state(&text, None).unwrap(), AnyState::Exact(s));
    }
}
