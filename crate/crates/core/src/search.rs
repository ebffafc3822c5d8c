//! Bounded search for covariant recipes.
//!
//! Every covariant of degree `d` is a linear combination of transvectants
//! `(C, A)^r`, `r ∈ {0,1}⁴`, of degree-`(d−1)` covariants `C` with the
//! ground form `A`. The search grows, degree by degree, a basis of each
//! needed `(degree, multidegree)` cell from such transvectants, detecting
//! linear dependence on random probe states over a prime field. Cells are
//! pruned to those from which a target cell is reachable, with multidegree
//! components capped.
//!
//! Selection then looks, inside a target cell, for a combination whose
//! qubit-permutation-closed vanishing pattern matches prescribed rows.

use crate::covariants::{constraints_for, frame, Combine, Quantity};
use crate::field::{Field, Fp};
use crate::normal_forms::{free_parameter_count, specialize};
use crate::state::{Permutation, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet, HashMap};

pub type Cell = (u8, [u8; 4]);

/// A dense multiform over `Fp`, exponent-major in pair order.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub md: [u8; 4],
    pub data: Vec<Fp>,
}

fn strides(md: [u8; 4]) -> [usize; 4] {
    let w = |p: usize| md[p] as usize + 1;
    [w(1) * w(2) * w(3), w(2) * w(3), w(3), 1]
}

fn size(md: [u8; 4]) -> usize {
    md.iter().map(|&m| m as usize + 1).product()
}

impl Dense {
    pub fn ground(amps: &[Fp; 16]) -> Dense {
        Dense { md: [1; 4], data: amps.to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    /// `(self, A)^r` with `A` the ground form and `r ∈ {0,1}⁴`.
    pub fn step(&self, a: &[Fp; 16], r: [u8; 4]) -> Dense {
        let md: [u8; 4] = std::array::from_fn(|p| self.md[p] + 1 - 2 * r[p]);
        let so = strides(self.md);
        let sn = strides(md);
        let mut out = vec![Fp::zero(); size(md)];
        // Per pair: for source exponent e and ground bit j, the target
        // exponent and the integer factor (0 = no contribution).
        let table: Vec<Vec<[(i64, usize); 2]>> = (0..4)
            .map(|p| {
                (0..=self.md[p] as i64)
                    .map(|e| {
                        std::array::from_fn(|j| {
                            if r[p] == 0 {
                                (1, (e as usize) + j)
                            } else if j == 1 {
                                (self.md[p] as i64 - e, e as usize)
                            } else {
                                (-e, (e.max(1) - 1) as usize)
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        for (idx, v) in self.data.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let e = [
                idx / so[0],
                idx / so[1] % (self.md[1] as usize + 1),
                idx / so[2] % (self.md[2] as usize + 1),
                idx % (self.md[3] as usize + 1),
            ];
            for (j, av) in a.iter().enumerate() {
                if av.is_zero() {
                    continue;
                }
                let bits = [j >> 3 & 1, j >> 2 & 1, j >> 1 & 1, j & 1];
                let mut factor = 1i64;
                let mut target = 0usize;
                for p in 0..4 {
                    let (f, t) = table[p][e[p]][bits[p]];
                    factor *= f;
                    target += t * sn[p];
                }
                if factor == 0 {
                    continue;
                }
                let mut t = *v * *av;
                t = t.scale_i128(factor as i128);
                out[target] += &t;
            }
        }
        Dense { md, data: out }
    }

    /// Relabels pairs: pair `p` becomes pair `sigma(p)`.
    pub fn permute(&self, sigma: &Permutation) -> Dense {
        let md = sigma.move_vector(self.md);
        let so = strides(self.md);
        let sn = strides(md);
        let mut out = vec![Fp::zero(); size(md)];
        for (idx, v) in self.data.iter().enumerate() {
            let mut t = 0;
            for p in 0..4 {
                let e = idx / so[p] % (self.md[p] as usize + 1);
                t += e * sn[sigma.image(p)];
            }
            out[t] = *v;
        }
        Dense { md, data: out }
    }
}

/// How a basis element was produced: `(parent, A)^r`, or the ground form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Ground,
    Step { parent: usize, orders: [u8; 4] },
}

#[derive(Clone, Debug)]
pub struct Element {
    pub cell: Cell,
    pub origin: Origin,
}

/// Incremental row echelon basis over `Fp`.
#[derive(Default, Clone)]
struct Echelon {
    rows: Vec<(usize, Vec<Fp>)>,
}

impl Echelon {
    /// Inserts `v` if independent; returns whether it was.
    fn insert(&mut self, mut v: Vec<Fp>) -> bool {
        for (piv, row) in &self.rows {
            let f = v[*piv];
            if !f.is_zero() {
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x = *x - f * *y;
                    }
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(piv) => {
                let inv = v[piv].inv().expect("nonzero");
                for x in v.iter_mut() {
                    *x = *x * inv;
                }
                self.rows.push((piv, v));
                true
            }
            None => false,
        }
    }
}

pub struct SearchConfig {
    pub max_component: u8,
    pub probes: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_component: 6, probes: 4, seed: 0x5eed }
    }
}

pub fn random_fp_state(rng: &mut ChaCha8Rng) -> [Fp; 16] {
    std::array::from_fn(|_| Fp::new(rng.gen_range(1..Fp::MODULUS)))
}

/// Cells from which some target is reachable by `(·, A)^r` steps.
pub fn needed_cells(targets: &[Cell], cap: u8) -> BTreeSet<Cell> {
    let mut need: BTreeSet<Cell> = targets.iter().copied().collect();
    let max_deg = targets.iter().map(|c| c.0).max().unwrap_or(1);
    for d in (2..=max_deg).rev() {
        let layer: Vec<Cell> = need.iter().filter(|c| c.0 == d).copied().collect();
        for (_, md) in layer {
            for r in 0..16u8 {
                let r = [r >> 3 & 1, r >> 2 & 1, r >> 1 & 1, r & 1];
                let prev: Option<[u8; 4]> = (0..4)
                    .map(|p| {
                        let v = md[p] as i16 - 1 + 2 * r[p] as i16;
                        (v >= 0 && v <= cap as i16 && v <= (d - 1) as i16).then_some(v as u8)
                    })
                    .collect::<Option<Vec<u8>>>()
                    .map(|v| [v[0], v[1], v[2], v[3]]);
                if let Some(pm) = prev {
                    need.insert((d - 1, pm));
                }
            }
        }
    }
    need
}

/// The grown basis: elements with their values on the probe states.
pub struct Basis {
    pub elements: Vec<Element>,
    pub by_cell: BTreeMap<Cell, Vec<usize>>,
    pub probes: Vec<[Fp; 16]>,
}

impl Basis {
    pub fn grow(targets: &[Cell], cfg: &SearchConfig) -> Basis {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let probes: Vec<[Fp; 16]> = (0..cfg.probes).map(|_| random_fp_state(&mut rng)).collect();
        let need = needed_cells(targets, cfg.max_component);
        let mut elements = vec![Element { cell: (1, [1; 4]), origin: Origin::Ground }];
        let mut values: Vec<Vec<Dense>> = vec![probes.iter().map(Dense::ground).collect()];
        let mut by_cell: BTreeMap<Cell, Vec<usize>> = BTreeMap::new();
        by_cell.insert((1, [1; 4]), vec![0]);
        let max_deg = targets.iter().map(|c| c.0).max().unwrap_or(1);
        for d in 2..=max_deg {
            let cells: Vec<Cell> = need.iter().filter(|c| c.0 == d).copied().collect();
            for cell in cells {
                let mut ech = Echelon::default();
                let mut members = Vec::new();
                let parents: Vec<(usize, [u8; 4])> = by_cell
                    .iter()
                    .filter(|(c, _)| c.0 == d - 1)
                    .filter_map(|(c, ids)| {
                        let r: Option<Vec<u8>> = (0..4)
                            .map(|p| {
                                let diff = c.1[p] as i16 + 1 - cell.1[p] as i16;
                                match diff {
                                    0 => Some(0),
                                    2 => Some(1),
                                    _ => None,
                                }
                            })
                            .collect();
                        r.map(|r| (ids.clone(), [r[0], r[1], r[2], r[3]]))
                    })
                    .flat_map(|(ids, r)| ids.into_iter().map(move |i| (i, r)))
                    .collect();
                for (parent, r) in parents {
                    let vals: Vec<Dense> = values[parent].iter().zip(&probes).map(|(v, a)| v.step(a, r)).collect();
                    let flat: Vec<Fp> = vals.iter().flat_map(|v| v.data.iter().copied()).collect();
                    if ech.insert(flat) {
                        members.push(elements.len());
                        elements.push(Element { cell, origin: Origin::Step { parent, orders: r } });
                        values.push(vals);
                    }
                }
                if !members.is_empty() {
                    by_cell.insert(cell, members);
                }
            }
        }
        Basis { elements, by_cell, probes }
    }

    /// Evaluates every element (in index order) on a state.
    pub fn evaluate_all(&self, amps: &[Fp; 16], upto: Option<&BTreeSet<usize>>) -> HashMap<usize, Dense> {
        let mut out: HashMap<usize, Dense> = HashMap::new();
        for (i, e) in self.elements.iter().enumerate() {
            if let Some(keep) = upto {
                if !keep.contains(&i) {
                    continue;
                }
            }
            let v = match e.origin {
                Origin::Ground => Dense::ground(amps),
                Origin::Step { parent, orders } => out[&parent].step(amps, orders),
            };
            out.insert(i, v);
        }
        out
    }

    /// Indices of `ids` and all their ancestors.
    pub fn ancestors(&self, ids: &[usize]) -> BTreeSet<usize> {
        let mut keep = BTreeSet::new();
        let mut stack: Vec<usize> = ids.to_vec();
        while let Some(i) = stack.pop() {
            if keep.insert(i) {
                if let Origin::Step { parent, .. } = self.elements[i].origin {
                    stack.push(parent);
                }
            }
        }
        keep
    }
}

/// Converts an exact state with Gaussian-rational amplitudes to `Fp`.
pub fn to_fp(s: &State<crate::field::Gaussian>) -> [Fp; 16] {
    std::array::from_fn(|m| s.amplitudes()[m].to_fp())
}

/// Values of a cell's members on the 24 qubit permutations of a state,
/// indexed `[σ][member]` with `σ` in [`Permutation::all`] order.
pub type Orbit = Vec<Vec<Dense>>;

impl Basis {
    pub fn orbit_values(&self, cell: &Cell, state: &State<Fp>) -> Orbit {
        let ids = &self.by_cell[cell];
        let keep = self.ancestors(ids);
        Permutation::all()
            .iter()
            .map(|s| {
                let amps = *state.permute_qubits(s).amplitudes();
                let vals = self.evaluate_all(&amps, Some(&keep));
                ids.iter().map(|i| vals[i].clone()).collect()
            })
            .collect()
    }
}

fn vanishing_rows(orbit: &Orbit, sigmas: &[usize], out: &mut Vec<Vec<Fp>>) {
    for &s in sigmas {
        let members = &orbit[s];
        for k in 0..members[0].data.len() {
            out.push(members.iter().map(|m| m.data[k]).collect());
        }
    }
}

fn combination_zero_at(orbit: &Orbit, coeffs: &[Fp], s: usize) -> bool {
    let members = &orbit[s];
    (0..members[0].data.len())
        .all(|k| members.iter().zip(coeffs).fold(Fp::zero(), |acc, (m, c)| acc + m.data[k] * *c).is_zero())
}

/// A sampled table row: orbit values at several random parameter points,
/// each with the permutations its quantities are closed over.
pub struct RowSample {
    pub label: &'static str,
    pub expected_nonzero: bool,
    pub orbits: Vec<(Orbit, Vec<usize>)>,
}

/// Whether a combination counts as nonzero on every point of a sample.
/// `Sum`: nonzero somewhere on the frame. `Product`: nonzero everywhere.
pub fn combination_pattern(sample: &RowSample, coeffs: &[Fp], combine: Combine) -> bool {
    sample.orbits.iter().all(|(o, frame)| match combine {
        Combine::Sum => !frame.iter().all(|&s| combination_zero_at(o, coeffs, s)),
        Combine::Product => frame.iter().all(|&s| !combination_zero_at(o, coeffs, s)),
    })
}

/// Index of the single quartic with a zero root (`L`, `M`, `N` vanishing).
pub fn special_quartic(state: &State<Fp>) -> Option<usize> {
    let (l, m, n) = crate::invariants::inv_lmn(state);
    let zeros: Vec<usize> = [l, m, n].iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(k, _)| k).collect();
    (zeros.len() == 1).then(|| zeros[0])
}

/// Samples every reference row constraining `q`. Rows of the cases with a
/// single distinguished quartic are closed over the frame of that quartic.
pub fn sample_rows(basis: &Basis, q: Quantity, points: usize, rng: &mut ChaCha8Rng) -> Vec<RowSample> {
    let cell = q.cell();
    constraints_for(q)
        .into_iter()
        .map(|(case, row, bit)| {
            let spec = row.specialization();
            let n = free_parameter_count(row.family, &spec).expect("valid row");
            let orbits = (0..points)
                .map(|_| {
                    let free: Vec<Fp> = (0..n).map(|_| Fp::new(rng.gen_range(1..Fp::MODULUS))).collect();
                    let st = specialize(row.family, &spec, &free).expect("row state");
                    let special = if case.starts_with('2') { special_quartic(&st) } else { None };
                    (basis.orbit_values(&cell, &st), frame(special))
                })
                .collect();
            RowSample { label: row.label, expected_nonzero: bit == 1, orbits }
        })
        .collect()
}

/// Outcome of the selection inside one target cell.
pub struct Selection {
    /// Basis of combinations vanishing on every required-zero row.
    pub kernel: Vec<Vec<Fp>>,
    /// A kernel element matching every row, if one was found.
    pub chosen: Option<Vec<Fp>>,
    /// Rows that no kernel element makes nonzero.
    pub unreachable: Vec<&'static str>,
}

/// Finds combinations reproducing the rows. For product quantities a zero
/// row only needs one vanishing frame element; `picks[z]` chooses it (as a
/// position in the frame) for the `z`-th zero row.
pub fn select(samples: &[RowSample], combine: Combine, picks: &[usize], width: usize) -> Selection {
    let mut rows = Vec::new();
    for (zi, s) in samples.iter().filter(|s| !s.expected_nonzero).enumerate() {
        for (o, frame) in &s.orbits {
            match combine {
                Combine::Sum => vanishing_rows(o, frame, &mut rows),
                Combine::Product => vanishing_rows(o, &[frame[picks[zi]]], &mut rows),
            }
        }
    }
    let kernel = crate::linalg::nullspace(rows, width);
    let unreachable: Vec<&'static str> = samples
        .iter()
        .filter(|s| s.expected_nonzero && !kernel.iter().any(|v| combination_pattern(s, v, combine)))
        .map(|s| s.label)
        .collect();
    let good = |v: &Vec<Fp>| samples.iter().all(|s| combination_pattern(s, v, combine) == s.expected_nonzero);
    let mut chosen = kernel.iter().find(|v| good(v)).cloned();
    if chosen.is_none() && unreachable.is_empty() && !kernel.is_empty() {
        // Small integer combinations of kernel vectors.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let mut v = vec![Fp::zero(); width];
            for k in &kernel {
                let c = Fp::from_i64(rng.gen_range(-3..=3));
                for (x, y) in v.iter_mut().zip(k) {
                    *x = *x + c * *y;
                }
            }
            if good(&v) {
                chosen = Some(v);
                break;
            }
        }
    }
    Selection { kernel, chosen, unreachable }
}

/// The transvection orders leading from the ground form to an element.
pub fn chain(basis: &Basis, mut id: usize) -> Vec<[u8; 4]> {
    let mut out = Vec::new();
    while let Origin::Step { parent, orders } = basis.elements[id].origin {
        out.push(orders);
        id = parent;
    }
    out.reverse();
    out
}

/// Recovers `n/d` with `|n|, d < sqrt(p/2)` from its image in `Fp`.
pub fn rational_reconstruct(x: Fp) -> Option<(i64, i64)> {
    let p = Fp::MODULUS as i128;
    let bound = ((p / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (p, x.value() as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    let (n, d) = if t1 < 0 { (-r1, -t1) } else { (r1, t1) };
    Some((n as i64, d as i64))
}

/// The sparsest combination found that reproduces every sample: single
/// members first, then kernel basis vectors, then sums of two of them.
pub fn sparsest(samples: &[RowSample], combine: Combine, kernel: &[Vec<Fp>], width: usize) -> Option<Vec<Fp>> {
    let good = |v: &Vec<Fp>| samples.iter().all(|s| combination_pattern(s, v, combine) == s.expected_nonzero);
    let support = |v: &Vec<Fp>| v.iter().filter(|x| !x.is_zero()).count();
    let mut candidates: Vec<Vec<Fp>> =
        (0..width).map(|i| (0..width).map(|k| if k == i { Fp::one() } else { Fp::zero() }).collect()).collect();
    let mut basis: Vec<Vec<Fp>> = kernel.to_vec();
    basis.sort_by_key(|v| support(v));
    candidates.extend(basis.iter().cloned());
    for (a, u) in basis.iter().enumerate() {
        for v in &basis[a + 1..] {
            candidates.push(u.iter().zip(v).map(|(x, y)| *x + *y).collect());
        }
    }
    candidates
        .into_iter()
        .filter(|v| v.iter().all(|x| rational_reconstruct(*x).is_some()))
        .filter(|v| good(v))
        .min_by_key(|v| support(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiform::{transvectant, MultiForm};

    #[test]
    fn dense_step_matches_general_transvectant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let amps = random_fp_state(&mut rng);
        let a = Dense::ground(&amps);
        let b = a.step(&amps, [0, 0, 1, 1]).step(&amps, [1, 0, 0, 0]);

        let mut s = MultiForm::<Fp>::zero([1; 4]);
        for (m, a) in amps.iter().enumerate() {
            s.add_term([(m >> 3 & 1) as u8, (m >> 2 & 1) as u8, (m >> 1 & 1) as u8, (m & 1) as u8], *a);
        }
        let t = transvectant(&transvectant(&s, &s, [0, 0, 1, 1]).unwrap(), &s, [1, 0, 0, 0]).unwrap();
        assert_eq!(t.multidegree(), b.md);
        let st = strides(b.md);
        for (idx, v) in b.data.iter().enumerate() {
            let e: [u8; 4] = std::array::from_fn(|p| (idx / st[p] % (b.md[p] as usize + 1)) as u8);
            assert_eq!(t.coeff(&e).copied().unwrap_or(Fp::zero()), *v);
        }
    }

    #[test]
    fn degree_two_cells() {
        let basis = Basis::grow(&[(2, [0; 4]), (2, [2, 2, 0, 0]), (2, [2, 0, 0, 0])], &SearchConfig::default());
        assert_eq!(basis.by_cell.get(&(2, [0; 4])).map(|v| v.len()), Some(1));
        assert_eq!(basis.by_cell.get(&(2, [2, 2, 0, 0])).map(|v| v.len()), Some(1));
        // (A, A)^r with an odd number of ones vanishes identically.
        assert!(!basis.by_cell.contains_key(&(2, [2, 0, 0, 0])));
    }
}
