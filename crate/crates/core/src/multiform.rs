//! Multihomogeneous forms in four binary variable pairs and the
//! transvectant (Cayley Omega) calculus on them.
//!
//! A monomial `x0^(d1-e1) x1^e1 · y0^(d2-e2) y1^e2 · z0^.. z1^.. · t0^.. t1^..`
//! is keyed by the exponent vector `[e1, e2, e3, e4]` of the second variable
//! in each pair; the multidegree `[d1, d2, d3, d4]` is stored once per form.

use crate::error::Error;
use crate::field::Field;
use crate::state::{Permutation, State};
use std::collections::BTreeMap;

pub type Exps = [u8; 4];
pub type MultiDegree = [u8; 4];

#[derive(Clone, Debug, PartialEq)]
pub struct MultiForm<F> {
    md: MultiDegree,
    coeffs: BTreeMap<Exps, F>,
}

impl<F: Field> MultiForm<F> {
    pub fn zero(md: MultiDegree) -> Self {
        MultiForm { md, coeffs: BTreeMap::new() }
    }

    /// The constant form with value `c`.
    pub fn constant(c: F) -> Self {
        let mut f = Self::zero([0; 4]);
        f.add_term([0; 4], c);
        f
    }

    /// The ground form `Σ a_{ijkl} x_i y_j z_k t_l` of a state.
    pub fn ground(state: &State<F>) -> Self {
        let mut f = Self::zero([1; 4]);
        for (idx, a) in state.iter() {
            f.add_term(idx, a.clone());
        }
        f
    }

    pub fn multidegree(&self) -> MultiDegree {
        self.md
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: &Exps) -> Option<&F> {
        self.coeffs.get(e)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &F)> {
        self.coeffs.iter()
    }

    /// Constant value of a multidegree-zero form.
    pub fn scalar_value(&self) -> Option<F> {
        if self.md != [0; 4] {
            return None;
        }
        Some(self.coeffs.get(&[0; 4]).cloned().unwrap_or_else(F::zero))
    }

    /// Adds `c` to the coefficient of `e`, dropping the entry if it cancels.
    pub fn add_term(&mut self, e: Exps, c: F) {
        debug_assert!((0..4).all(|p| e[p] <= self.md[p]));
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&e) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.coeffs.remove(&e);
                }
            }
            None => {
                self.coeffs.insert(e, c);
            }
        }
    }

    pub fn scale(&self, k: &F) -> Self {
        let mut out = Self::zero(self.md);
        for (e, c) in &self.coeffs {
            let mut v = c.clone();
            v *= k;
            out.add_term(*e, v);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.md != other.md {
            return Err(Error::Multidegree(format!(
                "cannot add forms of multidegree {:?} and {:?}",
                self.md, other.md
            )));
        }
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    /// Polynomial product.
    pub fn mul(&self, other: &Self) -> Self {
        let md = sum_md(self.md, other.md);
        let mut out = Self::zero(md);
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let mut v = ca.clone();
                v *= cb;
                out.add_term(sum_md(*ea, *eb), v);
            }
        }
        out
    }

    /// Relabels the variable pairs: pair `p` of `self` becomes pair
    /// `sigma(p)` of the result. This is the effect on covariants of
    /// [`State::permute_qubits`].
    pub fn permute_pairs(&self, sigma: &Permutation) -> Self {
        let move_vec = |v: [u8; 4]| {
            let mut out = [0u8; 4];
            for p in 0..4 {
                out[sigma.image(p)] = v[p];
            }
            out
        };
        let mut out = Self::zero(move_vec(self.md));
        for (e, c) in &self.coeffs {
            out.coeffs.insert(move_vec(*e), c.clone());
        }
        out
    }

    /// Evaluates the form at a point `[(x0,x1),(y0,y1),(z0,z1),(t0,t1)]`.
    pub fn evaluate(&self, point: &[(F, F); 4]) -> F {
        let mut total = F::zero();
        for (e, c) in &self.coeffs {
            let mut term = c.clone();
            for p in 0..4 {
                term *= &point[p].0.pow((self.md[p] - e[p]) as u32);
                term *= &point[p].1.pow(e[p] as u32);
            }
            total += &term;
        }
        total
    }

    /// Converts coefficients into another field.
    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> MultiForm<G> {
        let mut out = MultiForm::zero(self.md);
        for (e, c) in &self.coeffs {
            out.add_term(*e, f(c));
        }
        out
    }

    /// Largest coefficient modulus, 0 for the zero form.
    pub fn max_modulus(&self) -> f64 {
        self.coeffs.values().map(|c| c.modulus()).fold(0.0, f64::max)
    }
}

fn sum_md(a: [u8; 4], b: [u8; 4]) -> [u8; 4] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

fn falling(n: i128, k: i128) -> i128 {
    (0..k).fold(1, |acc, j| acc * (n - j))
}

fn binomial(n: i128, k: i128) -> i128 {
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

/// Single-pair Omega coefficient: applying `Ω^r` to `u^{(df-ef, ef)} · u'^{(dg-eg, eg)}`
/// and identifying `u' = u` yields this integer times the monomial with
/// second-variable exponent `ef + eg - r`.
fn omega_coefficient(df: u8, ef: u8, dg: u8, eg: u8, r: u8) -> i128 {
    let (df, ef, dg, eg, r) = (df as i128, ef as i128, dg as i128, eg as i128, r as i128);
    let mut total = 0i128;
    for k in 0..=r {
        // f receives ∂0^(r-k) ∂1^k, g receives ∂0^k ∂1^(r-k).
        if df - ef < r - k || ef < k || dg - eg < k || eg < r - k {
            continue;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        total +=
            sign * binomial(r, k) * falling(df - ef, r - k) * falling(ef, k) * falling(dg - eg, k) * falling(eg, r - k);
    }
    total
}

/// The transvectant `(f, g)^(r1,r2,r3,r4)`: the Omega operator of pair `k`
/// is applied `r_k` times to `f(u)·g(u')` before identifying `u' = u`.
/// No factorial normalization is applied.
pub fn transvectant<F: Field>(f: &MultiForm<F>, g: &MultiForm<F>, orders: [u8; 4]) -> Result<MultiForm<F>, Error> {
    for p in 0..4 {
        if orders[p] > f.md[p].min(g.md[p]) {
            return Err(Error::TransvectantOrder { orders, left: f.md, right: g.md });
        }
    }
    let md = [
        f.md[0] + g.md[0] - 2 * orders[0],
        f.md[1] + g.md[1] - 2 * orders[1],
        f.md[2] + g.md[2] - 2 * orders[2],
        f.md[3] + g.md[3] - 2 * orders[3],
    ];
    // tables[p][ef][eg]
    let tables: Vec<Vec<Vec<i128>>> = (0..4)
        .map(|p| {
            (0..=f.md[p])
                .map(|ef| (0..=g.md[p]).map(|eg| omega_coefficient(f.md[p], ef, g.md[p], eg, orders[p])).collect())
                .collect()
        })
        .collect();

    let strides = [
        (md[1] as usize + 1) * (md[2] as usize + 1) * (md[3] as usize + 1),
        (md[2] as usize + 1) * (md[3] as usize + 1),
        md[3] as usize + 1,
        1,
    ];
    let size = strides[0] * (md[0] as usize + 1);
    let mut acc: Vec<Option<F>> = vec![None; size];

    for (ef, cf) in &f.coeffs {
        for (eg, cg) in &g.coeffs {
            let mut factors = [0i128; 4];
            let mut idx = 0usize;
            let mut skip = false;
            for p in 0..4 {
                let c = tables[p][ef[p] as usize][eg[p] as usize];
                if c == 0 {
                    skip = true;
                    break;
                }
                factors[p] = c;
                idx += (ef[p] + eg[p] - orders[p]) as usize * strides[p];
            }
            if skip {
                continue;
            }
            let mut term = cf.clone();
            term *= cg;
            match factors.iter().try_fold(1i128, |a, &b| a.checked_mul(b)) {
                Some(k) => term = term.scale_i128(k),
                None => {
                    for k in factors {
                        term = term.scale_i128(k);
                    }
                }
            }
            match &mut acc[idx] {
                Some(v) => *v += &term,
                slot @ None => *slot = Some(term),
            }
        }
    }

    let mut out = MultiForm::zero(md);
    for (idx, v) in acc.into_iter().enumerate() {
        if let Some(v) = v {
            if v.is_zero() {
                continue;
            }
            let mut rem = idx;
            let mut e = [0u8; 4];
            for p in 0..4 {
                e[p] = (rem / strides[p]) as u8;
                rem %= strides[p];
            }
            out.coeffs.insert(e, v);
        }
    }
    Ok(out)
}
