//! The generators `B, L, M, N, D_xy` of the SLOCC invariant ring and the
//! derived invariants built from them.

use crate::field::Field;
use crate::state::State;
use serde::Serialize;

/// Decides whether a computed quantity vanishes.
///
/// Exact fields compare with zero. For floating backends, a quantity of
/// amplitude degree `deg` is zero iff `|q| ≤ tol · max(1, scale)^deg`, where
/// `scale` is the largest amplitude modulus of the state it came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroPolicy {
    pub tol: f64,
    pub scale: f64,
}

pub const DEFAULT_TOL: f64 = 1e-9;

impl ZeroPolicy {
    pub fn exact() -> Self {
        ZeroPolicy { tol: 0.0, scale: 1.0 }
    }

    pub fn for_state<F: Field>(s: &State<F>, tol: f64) -> Self {
        ZeroPolicy { tol, scale: s.scale_magnitude() }
    }

    pub fn threshold(&self, deg: u32) -> f64 {
        self.tol * self.scale.max(1.0).powi(deg as i32)
    }

    pub fn is_zero<F: Field>(&self, v: &F, deg: u32) -> bool {
        if F::EXACT {
            v.is_zero()
        } else {
            v.modulus() <= self.threshold(deg)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantVector<F> {
    pub b: F,
    pub l: F,
    pub m: F,
    pub n: F,
    pub dxy: F,
    pub p: F,
    pub s1: F,
    pub s2: F,
    pub s3: F,
    pub i2: F,
    pub i3: F,
    pub delta: F,
}

/// Report names and amplitude degrees, in [`InvariantVector::values`] order.
pub const INVARIANT_NAMES: [(&str, u32); 12] = [
    ("B", 2),
    ("L", 4),
    ("M", 4),
    ("N", 4),
    ("Dxy", 6),
    ("P", 6),
    ("S1", 4),
    ("S2", 4),
    ("S3", 4),
    ("I2", 8),
    ("I3", 12),
    ("Delta", 24),
];

impl<F: Field> InvariantVector<F> {
    pub fn values(&self) -> [&F; 12] {
        [
            &self.b,
            &self.l,
            &self.m,
            &self.n,
            &self.dxy,
            &self.p,
            &self.s1,
            &self.s2,
            &self.s3,
            &self.i2,
            &self.i3,
            &self.delta,
        ]
    }

    /// `B = L = M = D_xy = 0`.
    pub fn is_nilpotent(&self, z: &ZeroPolicy) -> bool {
        z.is_zero(&self.b, 2) && z.is_zero(&self.l, 4) && z.is_zero(&self.m, 4) && z.is_zero(&self.dxy, 6)
    }
}

/// `½ ε_{ii'} ε_{jj'} ε_{kk'} ε_{ll'} a_{ijkl} a_{i'j'k'l'}`.
///
/// Only complementary index pairs survive, with sign `(-1)^{|I|}`; each
/// unordered pair appears twice, cancelling the ½.
pub fn inv_b<F: Field>(s: &State<F>) -> F {
    let a = s.amplitudes();
    let mut total = F::zero();
    for idx in 0..8usize {
        let t = a[idx].clone() * a[15 - idx].clone();
        if idx.count_ones() % 2 == 0 {
            total += &t;
        } else {
            total -= &t;
        }
    }
    total
}

const L_ROWS: [[&str; 4]; 4] = [
    ["0000", "0010", "0001", "0011"],
    ["1000", "1010", "1001", "1011"],
    ["0100", "0110", "0101", "0111"],
    ["1100", "1110", "1101", "1111"],
];
const M_ROWS: [[&str; 4]; 4] = [
    ["0000", "0001", "0100", "0101"],
    ["1000", "1001", "1100", "1101"],
    ["0010", "0011", "0110", "0111"],
    ["1010", "1011", "1110", "1111"],
];
const N_ROWS: [[&str; 4]; 4] = [
    ["0000", "1000", "0001", "1001"],
    ["0100", "1100", "0101", "1101"],
    ["0010", "1010", "0011", "1011"],
    ["0110", "1110", "0111", "1111"],
];

/// The three labeled 4×4 amplitude matrices whose determinants are `L, M, N`.
pub fn lmn_matrices<F: Field>(s: &State<F>) -> [[[F; 4]; 4]; 3] {
    let a = s.amplitudes();
    let build = |rows: &[[&str; 4]; 4]| {
        std::array::from_fn(|r| std::array::from_fn(|c| a[usize::from_str_radix(rows[r][c], 2).unwrap()].clone()))
    };
    [build(&L_ROWS), build(&M_ROWS), build(&N_ROWS)]
}

pub fn det3<F: Field>(m: &[[F; 3]; 3]) -> F {
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
        m[r1][c1].clone() * m[r2][c2].clone() - m[r1][c2].clone() * m[r2][c1].clone()
    };
    m[0][0].clone() * minor(1, 2, 1, 2) - m[0][1].clone() * minor(1, 2, 0, 2) + m[0][2].clone() * minor(1, 2, 0, 1)
}

/// Laplace expansion along the first row.
pub fn det4<F: Field>(m: &[[F; 4]; 4]) -> F {
    let mut total = F::zero();
    for c in 0..4 {
        if m[0][c].is_zero() {
            continue;
        }
        let sub: [[F; 3]; 3] =
            std::array::from_fn(|r| std::array::from_fn(|k| m[r + 1][if k < c { k } else { k + 1 }].clone()));
        let t = m[0][c].clone() * det3(&sub);
        if c % 2 == 0 {
            total += &t;
        } else {
            total -= &t;
        }
    }
    total
}

pub fn inv_lmn<F: Field>(s: &State<F>) -> (F, F, F) {
    let [ml, mm, mn] = lmn_matrices(s);
    (det4(&ml), det4(&mm), det4(&mn))
}

/// `b_xy = det(∂²f/∂z_k∂t_l)` as a 3×3 matrix in the bases
/// `[x0², x0x1, x1²]` and `[y0², y0y1, y1²]`.
pub fn bxy_matrix<F: Field>(s: &State<F>) -> [[F; 3]; 3] {
    let a = s.amplitudes();
    let amp = |i: usize, j: usize, k: usize, l: usize| &a[8 * i + 4 * j + 2 * k + l];
    let mut out: [[F; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| F::zero()));
    // det = m00·m11 − m01·m10 with m_kl = Σ a_{ijkl} x_i y_j
    for (k1, l1, k2, l2, sign) in [(0, 0, 1, 1, true), (0, 1, 1, 0, false)] {
        for i in 0..2 {
            for j in 0..2 {
                let u = amp(i, j, k1, l1);
                if u.is_zero() {
                    continue;
                }
                for i2 in 0..2 {
                    for j2 in 0..2 {
                        let v = amp(i2, j2, k2, l2);
                        if v.is_zero() {
                            continue;
                        }
                        let t = u.clone() * v.clone();
                        let slot = &mut out[i + i2][j + j2];
                        if sign {
                            *slot += &t;
                        } else {
                            *slot -= &t;
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn inv_dxy<F: Field>(s: &State<F>) -> F {
    -det3(&bxy_matrix(s))
}

/// Coefficients `[c4, c3, c2, c1, c0]` of the three diagnostic quartics.
pub fn quartic_coefficients<F: Field>(b: &F, l: &F, m: &F, dxy: &F) -> [[F; 5]; 3] {
    let k = |v: i64| F::from_i64(v);
    let n = -(l.clone() + m.clone());
    let b2 = b.square();
    let one = F::one();
    let lin = k(-2) * b.clone();
    let q1 = [
        one.clone(),
        lin.clone(),
        b2.clone() + k(2) * l.clone() + k(4) * m.clone(),
        k(4) * dxy.clone() - k(4) * b.clone() * m.clone() - k(2) * b.clone() * l.clone(),
        l.square(),
    ];
    let q2 = [
        one.clone(),
        lin.clone(),
        b2.clone() - k(4) * l.clone() - k(2) * m.clone(),
        k(4) * dxy.clone() - k(2) * m.clone() * b.clone(),
        m.square(),
    ];
    let q3 = [
        one,
        lin,
        b2 + k(2) * l.clone() - k(2) * m.clone(),
        k(4) * dxy.clone() - k(2) * l.clone() * b.clone() - k(2) * m.clone() * b.clone(),
        n.square(),
    ];
    [q1, q2, q3]
}

/// `(I2, I3)` of a binary quartic `c4 x⁴ + c3 x³y + c2 x²y² + c1 xy³ + c0 y⁴`,
/// written as `α x⁴ − 4β x³y + 6γ x²y² − 4δ xy³ + ω y⁴`.
pub fn apolar_catalecticant<F: Field>(c: &[F; 5]) -> (F, F) {
    let alpha = c[0].clone();
    let beta = c[1].clone() * F::from_ratio(-1, 4);
    let gamma = c[2].clone() * F::from_ratio(1, 6);
    let delta = c[3].clone() * F::from_ratio(-1, 4);
    let omega = c[4].clone();
    let i2 =
        alpha.clone() * omega.clone() - F::from_i64(4) * beta.clone() * delta.clone() + F::from_i64(3) * gamma.square();
    let i3 =
        alpha.clone() * gamma.clone() * omega.clone() - alpha * delta.square() - beta.square() * omega - gamma.pow(3)
            + F::from_i64(2) * beta * gamma * delta;
    (i2, i3)
}

pub fn derived_invariants<F: Field>(b: F, l: F, m: F, n: F, dxy: F) -> InvariantVector<F> {
    let b2 = b.square();
    let four = F::from_i64(4);
    let p = dxy.clone() - b.clone() * m.clone();
    let s1 = b2.clone() + four.clone() * m.clone();
    let s2 = b2.clone() - four.clone() * l.clone();
    let s3 = b2 - four * m.clone();
    let [q1, _, _] = quartic_coefficients(&b, &l, &m, &dxy);
    let (i2, i3) = apolar_catalecticant(&q1);
    let delta = i2.pow(3) - F::from_i64(27) * i3.square();
    InvariantVector { b, l, m, n, dxy, p, s1, s2, s3, i2, i3, delta }
}

pub fn invariant_vector<F: Field>(s: &State<F>) -> InvariantVector<F> {
    let b = inv_b(s);
    let (l, m, n) = inv_lmn(s);
    let dxy = inv_dxy(s);
    derived_invariants(b, l, m, n, dxy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Gaussian;
    use crate::normal_forms::gen_g;

    fn q(n: i64) -> Gaussian {
        Gaussian::from_i64(n)
    }

    #[test]
    fn g1234_values() {
        let iv = invariant_vector(&gen_g(q(1), q(2), q(3), q(4)).unwrap());
        assert_eq!(iv.b, q(15));
        assert_eq!(iv.l, q(24));
        assert_eq!(iv.m, q(0));
        assert_eq!(iv.n, q(-24));
        assert_eq!(iv.dxy, q(-25));
        assert_eq!(iv.s2, q(129));
        assert_eq!(iv.delta, q(89_302_500));
    }

    #[test]
    fn b_single_pair() {
        let s = State::from_terms(&[("0000", q(1)), ("0111", q(2)), ("1000", q(3))]).unwrap();
        assert_eq!(inv_b(&s), q(-6));
        let ghz = State::from_terms(&[("0000", q(1)), ("1111", q(1))]).unwrap();
        let iv = invariant_vector(&ghz);
        assert_eq!(iv.b, q(1));
        assert_eq!(iv.l, q(0));
        assert_eq!(iv.dxy, q(0));
        assert_eq!(iv.p, q(0));
    }

    #[test]
    fn zero_policy_scales_with_degree() {
        let z = ZeroPolicy { tol: 1e-9, scale: 10.0 };
        assert!(z.is_zero(&num_complex::Complex64::new(5e-8, 0.0), 2));
        assert!(!z.is_zero(&num_complex::Complex64::new(5e-8, 0.0), 1));
        assert!(!ZeroPolicy::exact().is_zero(&Gaussian::from_parts(1, 1_000_000, 0, 1), 2));
    }
}
