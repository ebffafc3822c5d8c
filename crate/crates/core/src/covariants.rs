//! The discriminating covariant quantities and the reference vanishing
//! tables they must reproduce.

use crate::error::Error;
use crate::field::{Field, Fp};
use crate::invariants::ZeroPolicy;
use crate::multiform::{transvectant, MultiForm};
use crate::normal_forms::{FamilyId, Specialization};
use crate::state::{Permutation, State};
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;

/// The eight symmetrized quantities used by the decision tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Quantity {
    C,
    D,
    K5,
    K3,
    L,
    Gbar,
    G,
    H,
}

/// How positional variants are combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combine {
    /// `Σ_p X_p` (or `Σ_p X_p²`): zero iff every variant is zero.
    Sum,
    /// `Π_p X_p`: zero iff some variant is zero.
    Product,
}

impl Quantity {
    pub const ALL: [Quantity; 8] =
        [Quantity::C, Quantity::D, Quantity::K5, Quantity::K3, Quantity::L, Quantity::Gbar, Quantity::G, Quantity::H];

    pub fn symbol(self) -> &'static str {
        match self {
            Quantity::C => "C",
            Quantity::D => "D",
            Quantity::K5 => "K5",
            Quantity::K3 => "K3",
            Quantity::L => "L",
            Quantity::Gbar => "Gbar",
            Quantity::G => "G",
            Quantity::H => "H",
        }
    }

    pub fn parse(s: &str) -> Option<Quantity> {
        Quantity::ALL.into_iter().find(|q| q.symbol() == s)
    }

    /// Coefficient degree and base multidegree of the constituent covariant.
    pub fn cell(self) -> (u8, [u8; 4]) {
        match self {
            Quantity::C => (3, [1, 1, 1, 1]),
            Quantity::D => (4, [4, 0, 0, 0]),
            Quantity::K5 => (11, [5, 1, 1, 1]),
            Quantity::K3 => (11, [3, 3, 1, 1]),
            Quantity::L => (12, [6, 0, 0, 0]),
            Quantity::Gbar | Quantity::G => (7, [3, 1, 1, 1]),
            Quantity::H => (8, [2, 2, 2, 0]),
        }
    }

    pub fn combine(self) -> Combine {
        match self {
            Quantity::Gbar => Combine::Product,
            _ => Combine::Sum,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One reference row: a (specialized) family and its expected ev-bits.
#[derive(Clone, Copy, Debug)]
pub struct TableRow {
    /// Subscript notation of the row, e.g. `L_ab0_2`.
    pub label: &'static str,
    pub family: FamilyId,
    pub constraints: &'static [&'static str],
    pub bits: &'static [u8],
}

impl TableRow {
    pub fn specialization(&self) -> Specialization {
        Specialization::of(self.constraints)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CaseTable {
    pub case: &'static str,
    pub vector: &'static [Quantity],
    pub rows: &'static [TableRow],
}

const fn row(
    label: &'static str,
    family: FamilyId,
    constraints: &'static [&'static str],
    bits: &'static [u8],
) -> TableRow {
    TableRow { label, family, constraints, bits }
}

use FamilyId::*;
use Quantity as Q;

/// The discrimination tables of the decision tree, by case.
pub const CASE_TABLES: [CaseTable; 8] = [
    CaseTable {
        case: "1(b)",
        vector: &[Q::L],
        rows: &[row("G_abcc", Gabcd, &["c=d"], &[0]), row("L_abc2", Labc2, &[], &[1])],
    },
    CaseTable {
        case: "1(c)",
        vector: &[Q::K5, Q::L],
        rows: &[
            row("G_abbb", Gabcd, &["b=c=d"], &[0, 0]),
            row("L_abb2", Labc2, &["b=c"], &[1, 0]),
            row("L_ab3", Lab3, &[], &[1, 1]),
        ],
    },
    CaseTable {
        case: "2(b)",
        vector: &[Q::K3, Q::L],
        rows: &[
            row("G_ab00", Gabcd, &["c=d=0"], &[0, 0]),
            row("L_ab0_2", Labc2, &["c=0"], &[1, 0]),
            row("L_a2b2", La2b2, &[], &[1, 1]),
        ],
    },
    CaseTable {
        case: "2(c)",
        vector: &[Q::C, Q::D, Q::K5, Q::L],
        rows: &[
            row("G_a000", Gabcd, &["b=c=d=0"], &[0, 0, 0, 0]),
            row("L_a00_2", Labc2, &["b=c=0"], &[1, 0, 0, 0]),
            row("L_0b3", Lab3, &["a=0"], &[1, 1, 1, 0]),
            row("L_a2a2", La2b2, &["a=b"], &[1, 1, 0, 0]),
            row("L_a4", La4, &[], &[1, 1, 1, 1]),
        ],
    },
    CaseTable {
        case: "2(d)",
        vector: &[Q::L],
        rows: &[row("G_abb0", Gabcd, &["b=c", "d=0"], &[0]), row("L_a0c2", Labc2, &["b=0"], &[1])],
    },
    CaseTable {
        case: "2(e)",
        vector: &[Q::D, Q::L],
        rows: &[
            row("G_aaa0", Gabcd, &["a=b=c", "d=0"], &[0, 0]),
            row("L_0cc2", Labc2, &["a=0", "b=c"], &[1, 0]),
            row("L_a0_3", Lab3, &["b=0"], &[1, 1]),
        ],
    },
    CaseTable {
        case: "3(b)",
        vector: &[Q::L],
        rows: &[
            row("G_aa(-2a)0", Gabcd, &["b=a", "c=-2a", "d=0"], &[0]),
            row("L_0(2b)b_2", Labc2, &["a=0", "c=b/2"], &[1]),
        ],
    },
    CaseTable {
        case: "3(c)",
        vector: &[Q::Gbar, Q::G, Q::H, Q::L],
        rows: &[
            row("G_00aa", Gabcd, &["a=b=0", "c=d"], &[0, 0, 0, 0]),
            row("L_aa0_2", Labc2, &["a=b", "c=0"], &[0, 1, 1, 0]),
            row("L_00c2", Labc2, &["a=b=0"], &[0, 0, 1, 0]),
            row("L_0_2a_2", La2b2, &["a=0"], &[1, 1, 1, 0]),
            row("L_a2_0_3+1", La2_0_3p1, &[], &[1, 1, 1, 1]),
        ],
    },
];

pub fn case_table(case: &str) -> Option<&'static CaseTable> {
    CASE_TABLES.iter().find(|t| t.case == case)
}

/// Every `(row, expected bit)` constraint on one quantity across all tables.
pub fn constraints_for(q: Quantity) -> Vec<(&'static str, &'static TableRow, u8)> {
    let mut out = Vec::new();
    for t in CASE_TABLES.iter() {
        if let Some(k) = t.vector.iter().position(|&v| v == q) {
            for r in t.rows {
                out.push((t.case, r, r.bits[k]));
            }
        }
    }
    out
}

/// The qubit pairing separated by each quartic's flattening:
/// `Q1 ↔ 12|34`, `Q2 ↔ 13|24`, `Q3 ↔ 14|23`.
pub const PAIRINGS: [[usize; 2]; 3] = [[0, 1], [0, 2], [0, 3]];

/// Index of the pairing that quartic `k` is carried to by a qubit permutation.
pub fn pairing_image(sigma: &Permutation, k: usize) -> usize {
    let [a, b] = PAIRINGS[k];
    let (x, y) = (sigma.image(a), sigma.image(b));
    // The pairing is determined by the partner of qubit 0.
    let partner = if x == 0 {
        y
    } else if y == 0 {
        x
    } else {
        // {x, y} avoids 0, so 0 sits in the complementary pair.
        (1..4).find(|&q| q != x && q != y).expect("three candidates")
    };
    partner - 1
}

/// Quartic slot used as the reference frame when exactly one quartic has
/// a zero root.
pub const FRAME_QUARTIC: usize = 0;

/// Indices into [`Permutation::all`] over which quantities are closed: all
/// 24 permutations, or, when quartic `special` is distinguished, those
/// carrying it to [`FRAME_QUARTIC`].
pub fn frame(special: Option<usize>) -> Vec<usize> {
    let all = Permutation::all();
    match special {
        None => (0..all.len()).collect(),
        Some(k) => (0..all.len()).filter(|&i| pairing_image(&all[i], k) == FRAME_QUARTIC).collect(),
    }
}

// ---------------------------------------------------------------------------
// Recipe catalog
// ---------------------------------------------------------------------------

/// The catalog shipped with the crate.
pub const BUILTIN_CATALOG: &str = include_str!("../data/recipes.txt");

/// Environment variable naming an alternative catalog file.
pub const CATALOG_ENV: &str = "QSLOCC4_RECIPES";

/// `coeff · (…((A, A)^{r_1}, A)^{r_2} …, A)^{r_k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: (i64, i64),
    pub orders: Vec<[u8; 4]>,
}

impl Term {
    /// Multidegree reached after every step, or the first illegal step.
    fn multidegree(&self) -> Result<[u8; 4], String> {
        let mut md = [1u8; 4];
        for (k, r) in self.orders.iter().enumerate() {
            for p in 0..4 {
                if r[p] > 1 || r[p] > md[p] {
                    return Err(format!("step {} order {:?} exceeds multidegree {:?}", k + 1, r, md));
                }
                md[p] = md[p] + 1 - 2 * r[p];
            }
        }
        Ok(md)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recipe {
    pub quantity: Quantity,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub version: u32,
    pub recipes: Vec<Recipe>,
    /// SHA-256 of the catalog text, hex encoded.
    pub sha256: String,
}

fn parse_orders(w: &str) -> Option<[u8; 4]> {
    let b = w.as_bytes();
    if b.len() != 4 || !b.iter().all(|c| *c == b'0' || *c == b'1') {
        return None;
    }
    Some(std::array::from_fn(|k| b[k] - b'0'))
}

fn parse_coeff(w: &str) -> Option<(i64, i64)> {
    let (n, d) = match w.split_once('/') {
        Some((n, d)) => (n.parse().ok()?, d.parse().ok()?),
        None => (w.parse().ok()?, 1),
    };
    (d > 0).then_some((n, d))
}

impl Catalog {
    /// Parses and validates a catalog: every quantity must be present and
    /// every term must reach the quantity's base multidegree and degree.
    pub fn parse(text: &str) -> Result<Catalog, Error> {
        use sha2::{Digest, Sha256};
        let sha256 = hex::encode(Sha256::digest(text.as_bytes()));
        let mut version = None;
        let mut recipes: Vec<Recipe> = Quantity::ALL.iter().map(|&q| Recipe { quantity: q, terms: vec![] }).collect();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |m: String| Error::Catalog(format!("line {}: {m}", ln + 1));
            let words: Vec<&str> = line.split_whitespace().collect();
            if words[0] == "version" {
                let v = words.get(1).and_then(|v| v.parse().ok()).ok_or_else(|| bad("bad version".into()))?;
                version = Some(v);
                continue;
            }
            let q = Quantity::parse(words[0]).ok_or_else(|| bad(format!("unknown quantity {:?}", words[0])))?;
            let coeff = words
                .get(1)
                .and_then(|w| parse_coeff(w))
                .ok_or_else(|| bad("missing or malformed coefficient".into()))?;
            let orders = words[2..]
                .iter()
                .map(|w| parse_orders(w).ok_or_else(|| bad(format!("malformed order vector {w:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let term = Term { coeff, orders };
            let (deg, md) = q.cell();
            let got = term.multidegree().map_err(bad)?;
            if got != md || term.orders.len() + 1 != deg as usize {
                return Err(bad(format!(
                    "{q} term has degree {} and multidegree {:?}; expected {deg} and {md:?}",
                    term.orders.len() + 1,
                    got
                )));
            }
            recipes.iter_mut().find(|r| r.quantity == q).expect("all quantities").terms.push(term);
        }
        let version = version.ok_or_else(|| Error::Catalog("missing version line".into()))?;
        if let Some(r) = recipes.iter().find(|r| r.terms.is_empty()) {
            return Err(Error::Catalog(format!("no recipe for {}", r.quantity)));
        }
        Ok(Catalog { version, recipes, sha256 })
    }

    /// The built-in catalog, or the file named by [`CATALOG_ENV`].
    pub fn load() -> Result<Catalog, Error> {
        match std::env::var_os(CATALOG_ENV) {
            Some(path) => {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Catalog(format!("{}: {e}", path.to_string_lossy())))?;
                Catalog::parse(&text)
            }
            None => Catalog::parse(BUILTIN_CATALOG),
        }
    }

    pub fn recipe(&self, q: Quantity) -> &Recipe {
        self.recipes.iter().find(|r| r.quantity == q).expect("validated catalog")
    }
}

impl Recipe {
    /// Runs the recipe on a state, sharing common step prefixes.
    pub fn evaluate<F: Field>(&self, s: &State<F>) -> MultiForm<F> {
        let ground = MultiForm::ground(s);
        let mut memo: HashMap<&[[u8; 4]], MultiForm<F>> = HashMap::new();
        let (_, md) = self.quantity.cell();
        let mut total = MultiForm::zero(md);
        for term in &self.terms {
            // Longest cached prefix.
            let mut k = term.orders.len();
            while k > 0 && !memo.contains_key(&term.orders[..k]) {
                k -= 1;
            }
            let mut f = if k == 0 { ground.clone() } else { memo[&term.orders[..k]].clone() };
            for j in k..term.orders.len() {
                f = transvectant(&f, &ground, term.orders[j]).expect("validated orders");
                memo.insert(&term.orders[..=j], f.clone());
            }
            let c = F::from_ratio(term.coeff.0, term.coeff.1);
            total = total.add(&f.scale(&c)).expect("same multidegree");
        }
        total
    }
}

// ---------------------------------------------------------------------------
// Evaluation of the quantities
// ---------------------------------------------------------------------------

/// A quantity evaluated on a state.
#[derive(Clone, Debug, Serialize)]
pub struct QuantityValue {
    pub quantity: Quantity,
    pub nonzero: bool,
    /// The relabeling that decided the bit: the first nonzero one for sums,
    /// the first vanishing one for products.
    pub witness: Option<String>,
    /// Number of relabelings the quantity is closed over.
    pub frame: usize,
}

fn form_is_zero<F: Field>(f: &MultiForm<F>, deg: u32, z: &ZeroPolicy) -> bool {
    f.terms().all(|(_, c)| z.is_zero(c, deg))
}

/// Whether the constituent covariant vanishes on `s`. Exact values whose
/// reduction modulo the prime is nonzero are decided without exact
/// arithmetic.
fn constituent_zero<F: Field>(recipe: &Recipe, s: &State<F>, z: &ZeroPolicy) -> bool {
    if F::EXACT {
        let reduced: Option<Vec<Fp>> = s.amplitudes().iter().map(|a| a.reduce()).collect();
        if let Some(r) = reduced {
            let fs = State::new(std::array::from_fn(|m| r[m])).ok();
            if let Some(fs) = fs {
                if !recipe.evaluate(&fs).is_zero() {
                    return false;
                }
            }
        }
    }
    let deg = recipe.quantity.cell().0 as u32;
    form_is_zero(&recipe.evaluate(s), deg, z)
}

/// Evaluates one quantity, closed over the relabelings in `frame`
/// (indices into [`Permutation::all`]).
pub fn evaluate_quantity<F: Field>(
    catalog: &Catalog,
    q: Quantity,
    s: &State<F>,
    frame: &[usize],
    z: &ZeroPolicy,
) -> QuantityValue {
    let recipe = catalog.recipe(q);
    let perms = Permutation::all();
    let mut witness = None;
    let nonzero = match q.combine() {
        Combine::Sum => frame.iter().any(|&k| {
            let nz = !constituent_zero(recipe, &s.permute_qubits(&perms[k]), z);
            if nz {
                witness = Some(perms[k].to_string());
            }
            nz
        }),
        Combine::Product => frame.iter().all(|&k| {
            let zero = constituent_zero(recipe, &s.permute_qubits(&perms[k]), z);
            if zero {
                witness = Some(perms[k].to_string());
            }
            !zero
        }),
    };
    QuantityValue { quantity: q, nonzero, witness, frame: frame.len() }
}

/// Evaluates all eight quantities with the frame of `special` (see [`frame`]).
pub fn build_catalog<F: Field>(
    catalog: &Catalog,
    s: &State<F>,
    special: Option<usize>,
    z: &ZeroPolicy,
) -> Vec<QuantityValue> {
    let fr = frame(special);
    Quantity::ALL.iter().map(|&q| evaluate_quantity(catalog, q, s, &fr, z)).collect()
}

/// `ev(V)[i] = 0` iff `V[i] = 0`.
pub fn ev_bits(values: &[QuantityValue]) -> Vec<u8> {
    values.iter().map(|v| v.nonzero as u8).collect()
}

// ---------------------------------------------------------------------------
// Table verification
// ---------------------------------------------------------------------------

/// Index of the unique quartic with a zero root (`L`, `M` or `N` zero).
pub fn special_quartic<F: Field>(s: &State<F>, z: &ZeroPolicy) -> Option<usize> {
    let (l, m, n) = crate::invariants::inv_lmn(s);
    let zeros: Vec<usize> = [l, m, n].iter().enumerate().filter(|(_, v)| z.is_zero(*v, 4)).map(|(k, _)| k).collect();
    (zeros.len() == 1).then(|| zeros[0])
}

/// Outcome of checking one reference row at one parameter point.
#[derive(Clone, Debug, Serialize)]
pub struct RowCheck {
    pub case: &'static str,
    pub label: &'static str,
    pub params: Vec<String>,
    pub expected: Vec<u8>,
    pub got: Vec<u8>,
}

impl RowCheck {
    pub fn matches(&self) -> bool {
        self.expected == self.got
    }
}

/// Evaluates a table's vector on one row at the given free parameters.
pub fn check_row(
    catalog: &Catalog,
    table: &CaseTable,
    row: &TableRow,
    free: &[crate::field::Gaussian],
) -> Result<RowCheck, Error> {
    let s = crate::normal_forms::specialize(row.family, &row.specialization(), free)?;
    let z = ZeroPolicy::exact();
    let special = if table.case.starts_with('2') { special_quartic(&s, &z) } else { None };
    let fr = frame(special);
    let got = table.vector.iter().map(|&q| evaluate_quantity(catalog, q, &s, &fr, &z).nonzero as u8).collect();
    Ok(RowCheck {
        case: table.case,
        label: row.label,
        params: free.iter().map(|p| p.to_string()).collect(),
        expected: row.bits.to_vec(),
        got,
    })
}
