//! Flattenings, multiranks, the so(8) embedding and dual-variety strata.

use crate::field::Field;
use crate::invariants::{lmn_matrices, InvariantVector, ZeroPolicy};
use crate::linalg;
use crate::state::State;
use serde::Serialize;

/// `det 𝓜_i = SIGN_i · (L, M, N)_i`. The flattenings are the labeled
/// determinant matrices themselves, so every sign is `+1`; the constant is
/// kept so that a test pins it.
pub const FLATTENING_SIGNS: [i64; 3] = [1, 1, 1];

/// The three 4×4 flattenings, for the pairings `12|34`, `13|24`, `14|23`.
pub fn flattenings<F: Field>(s: &State<F>) -> [[[F; 4]; 4]; 3] {
    lmn_matrices(s)
}

fn rows<F: Field>(m: &[[F; 4]; 4]) -> Vec<Vec<F>> {
    m.iter().map(|r| r.to_vec()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct MultiRank(pub [u8; 3]);

/// Rank of a flattening: exact elimination, or singular values above the
/// policy's degree-1 threshold for floats.
fn flattening_rank<F: Field>(m: &[[F; 4]; 4], z: &ZeroPolicy) -> u8 {
    if F::EXACT {
        return linalg::rank(rows(m)) as u8;
    }
    let a = nalgebra::Matrix4::from_fn(|r, c| m[r][c].to_c64());
    let sv = a.singular_values();
    sv.iter().filter(|v| **v > z.threshold(1)).count() as u8
}

pub fn multirank<F: Field>(s: &State<F>, z: &ZeroPolicy) -> MultiRank {
    let f = flattenings(s);
    MultiRank(std::array::from_fn(|k| flattening_rank(&f[k], z)))
}

// ---------------------------------------------------------------------------
// so(8)
// ---------------------------------------------------------------------------

/// `√2·T` and `(√2·T)†`, entries in `ℤ[i]`.
fn t_scaled<F: Field>() -> ([[F; 4]; 4], [[F; 4]; 4]) {
    let (o, z, i) = (F::one(), F::zero(), F::i());
    let t = [
        [o.clone(), z.clone(), z.clone(), o.clone()],
        [z.clone(), i.clone(), i.clone(), z.clone()],
        [z.clone(), -o.clone(), o.clone(), z.clone()],
        [i.clone(), z.clone(), z.clone(), -i.clone()],
    ];
    // Conjugate transpose, written out: conj(i) = −i.
    let conj = |v: &F| {
        if *v == i {
            -i.clone()
        } else if *v == -i.clone() {
            i.clone()
        } else {
            v.clone()
        }
    };
    let td = std::array::from_fn(|r| std::array::from_fn(|c| conj(&t[c][r])));
    (t, td)
}

fn mat_mul<F: Field>(a: &[[F; 4]; 4], b: &[[F; 4]; 4]) -> [[F; 4]; 4] {
    std::array::from_fn(|r| {
        std::array::from_fn(|c| {
            let mut acc = F::zero();
            for k in 0..4 {
                acc += &(a[r][k].clone() * b[k][c].clone());
            }
            acc
        })
    })
}

/// The skew matrix `[[0, R], [−Rᵗ, 0]]` with `R = (√2T) M_φ (√2T)†`.
pub fn so8_matrix<F: Field>(s: &State<F>) -> Vec<Vec<F>> {
    let (t, td) = t_scaled::<F>();
    let r = mat_mul(&mat_mul(&t, &flattenings(s)[0]), &td);
    let mut k = vec![vec![F::zero(); 8]; 8];
    for a in 0..4 {
        for b in 0..4 {
            k[a][4 + b] = r[a][b].clone();
            k[4 + b][a] = -r[a][b].clone();
        }
    }
    k
}

/// Pfaffian by expansion along the first row.
pub fn pfaffian<F: Field>(k: &[Vec<F>]) -> F {
    fn rec<F: Field>(k: &[Vec<F>], idx: &[usize]) -> F {
        if idx.is_empty() {
            return F::one();
        }
        let mut total = F::zero();
        for j in 1..idx.len() {
            let v = &k[idx[0]][idx[j]];
            if v.is_zero() {
                continue;
            }
            let rest: Vec<usize> = idx[1..].iter().enumerate().filter(|(p, _)| p + 1 != j).map(|(_, &x)| x).collect();
            let t = v.clone() * rec(k, &rest);
            if j % 2 == 1 {
                total += &t;
            } else {
                total -= &t;
            }
        }
        total
    }
    let idx: Vec<usize> = (0..k.len()).collect();
    rec(k, &idx)
}

/// Sums of the `j×j` principal minors, `j = 0..=n`.
pub fn principal_minor_sums<F: Field>(k: &[Vec<F>]) -> Vec<F> {
    let n = k.len();
    let mut sums = vec![F::zero(); n + 1];
    for mask in 0u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|&b| mask >> b & 1 == 1).collect();
        let sub: Vec<Vec<F>> = idx.iter().map(|&r| idx.iter().map(|&c| k[r][c].clone()).collect()).collect();
        let d = if idx.is_empty() { F::one() } else { linalg::det(sub) };
        sums[idx.len()] += &d;
    }
    sums
}

/// One so(8) identity: the computed value, the invariant expression it
/// should equal, and the power-of-two scale from conjugating by `√2·T`.
#[derive(Clone, Debug, Serialize)]
pub struct So8Identity {
    pub name: &'static str,
    pub scale: i64,
    pub computed: String,
    pub expected: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct So8Report {
    pub identities: Vec<So8Identity>,
    /// Odd principal-minor sums vanish and `det = Pf²`, so the degree-8
    /// characteristic polynomial is the quartic in `x = t²`.
    pub charpoly_is_quartic_in_t2: bool,
}

impl So8Report {
    pub fn all_hold(&self) -> bool {
        self.charpoly_is_quartic_in_t2 && self.identities.iter().all(|i| i.holds)
    }
}

fn close<F: Field>(a: &F, b: &F, rel: f64) -> bool {
    if F::EXACT {
        a == b
    } else {
        let d = (a.clone() - b.clone()).modulus();
        d <= rel * a.modulus().max(b.modulus()).max(1.0)
    }
}

/// Checks `h₂ = 2B`, `h₄ = B²+2L+4M`, `h₆ = 2BL+4BM−4D_xy`, `Pf = L` on the
/// radical-free matrix, whose `h_{2k}` carry a factor `4^k` and `Pf` `16`.
/// `rel` is the relative tolerance for float states.
pub fn so8_checks<F: Field>(s: &State<F>, iv: &InvariantVector<F>, rel: f64) -> So8Report {
    let k = so8_matrix(s);
    let e = principal_minor_sums(&k);
    let pf = pfaffian(&k);
    let c = |v: i64| F::from_i64(v);
    let (b, l, m, d) = (&iv.b, &iv.l, &iv.m, &iv.dxy);
    let targets: [(&'static str, i64, F, F); 4] = [
        ("h2 = 2B", 4, e[2].clone(), c(2) * b.clone()),
        ("h4 = B^2+2L+4M", 16, e[4].clone(), b.square() + c(2) * l.clone() + c(4) * m.clone()),
        (
            "h6 = 2BL+4BM-4Dxy",
            64,
            e[6].clone(),
            c(2) * b.clone() * l.clone() + c(4) * b.clone() * m.clone() - c(4) * d.clone(),
        ),
        ("Pf = L", 16, pf.clone(), l.clone()),
    ];
    let identities = targets
        .into_iter()
        .map(|(name, scale, got, want)| {
            let want = want * c(scale);
            So8Identity { name, scale, computed: got.render(), expected: want.render(), holds: close(&got, &want, rel) }
        })
        .collect();
    let zero = F::zero();
    let odd_vanish = [1, 3, 5, 7].iter().all(|&j| close(&e[j], &zero, rel));
    let charpoly_is_quartic_in_t2 = odd_vanish && close(&e[8], &pf.square(), rel);
    So8Report { identities, charpoly_is_quartic_in_t2 }
}

// ---------------------------------------------------------------------------
// Strata
// ---------------------------------------------------------------------------

/// Placement in the flattening secant strata: for each pairing `i`, whether
/// the state lies in `σ_k(Seg_i(ℙ³×ℙ³))` (rank ≤ k).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SecantPlacement {
    pub multirank: MultiRank,
    pub sigma3: [bool; 3],
    pub sigma2: [bool; 3],
    pub segre: [bool; 3],
    /// `∩_i σ3(Seg_i) = σ3(ℙ¹×ℙ¹×ℙ¹×ℙ¹)`.
    pub sigma3_x: bool,
}

impl SecantPlacement {
    pub fn new(mr: MultiRank) -> Self {
        let r = mr.0;
        let below = |k: u8| std::array::from_fn(|i| r[i] <= k);
        let sigma3: [bool; 3] = below(3);
        SecantPlacement {
            multirank: mr,
            sigma3,
            sigma2: below(2),
            segre: below(1),
            sigma3_x: sigma3.iter().all(|&b| b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumRecord {
    /// `Δ ≠ 0`.
    pub generic: bool,
    /// `Δ = 0`: the state lies on the dual variety `X*`.
    pub dual: bool,
    /// `I2 = I3 = 0`.
    pub cusp: bool,
    /// Quartics (1-based) whose triple `L=P=S1=0` / `M=Dxy=S2=0` / `N=Dxy=S3=0` holds.
    pub cusp3: Vec<u8>,
    /// `B = L = M = Dxy = 0`.
    pub nullcone: bool,
    /// Quartics whose pair `L=P=0` / `M=Dxy=0` / `N=Dxy=0` holds.
    pub node: Vec<u8>,
    /// `L = M = Dxy = 0`.
    pub node3: bool,
    /// Membership in the dual of the secant variety of the Segre product
    /// is not decided by these invariants.
    pub sigma_x_dual: &'static str,
    pub secant: SecantPlacement,
}

impl StratumRecord {
    /// The inclusion chain nullcone ⇒ cusp₃ ⇒ cusp ⇒ X* and node₃ ⇒ node ⇒ X*.
    pub fn chain_respected(&self) -> bool {
        let imp = |a: bool, b: bool| !a || b;
        imp(self.nullcone, !self.cusp3.is_empty())
            && imp(!self.cusp3.is_empty(), self.cusp)
            && imp(self.cusp, self.dual)
            && imp(self.node3, !self.node.is_empty())
            && imp(!self.node.is_empty(), self.dual)
    }
}

pub fn stratum<F: Field>(iv: &InvariantVector<F>, mr: MultiRank, z: &ZeroPolicy) -> StratumRecord {
    let zero = |v: &F, d: u32| z.is_zero(v, d);
    let (b, l, m, n, d, p) =
        (zero(&iv.b, 2), zero(&iv.l, 4), zero(&iv.m, 4), zero(&iv.n, 4), zero(&iv.dxy, 6), zero(&iv.p, 6));
    let (s1, s2, s3) = (zero(&iv.s1, 4), zero(&iv.s2, 4), zero(&iv.s3, 4));
    let dual = zero(&iv.delta, 24);
    let pick = |flags: [bool; 3]| (1..=3u8).filter(|&k| flags[k as usize - 1]).collect::<Vec<u8>>();
    StratumRecord {
        generic: !dual,
        dual,
        cusp: zero(&iv.i2, 8) && zero(&iv.i3, 12),
        cusp3: pick([l && p && s1, m && d && s2, n && d && s3]),
        nullcone: b && l && m && d,
        node: pick([l && p, m && d, n && d]),
        node3: l && m && d,
        sigma_x_dual: "not evaluated",
        secant: SecantPlacement::new(mr),
    }
}
