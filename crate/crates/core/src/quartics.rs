//! The diagnostic quartics `Q1, Q2, Q3`, their covariants, and root
//! multiplicity analysis.

use crate::field::Field;
use crate::invariants::{apolar_catalecticant, quartic_coefficients, InvariantVector, ZeroPolicy};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt;

/// A binary form `Σ c[k] x^{d-k} y^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryForm<F>(pub Vec<F>);

impl<F: Field> BinaryForm<F> {
    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn dx(&self) -> Self {
        let d = self.degree();
        BinaryForm((0..d).map(|k| self.0[k].scale_i128((d - k) as i128)).collect())
    }

    pub fn dy(&self) -> Self {
        let d = self.degree();
        BinaryForm((0..d).map(|k| self.0[k + 1].scale_i128((k + 1) as i128)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = vec![F::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                let t = a.clone() * b.clone();
                out[i + j] += &t;
            }
        }
        BinaryForm(out)
    }

    pub fn sub(&self, o: &Self) -> Self {
        BinaryForm(self.0.iter().zip(&o.0).map(|(a, b)| a.clone() - b.clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Zero under a policy where coefficient `k` has amplitude degree `w0 + 2k`.
    pub fn is_zero_weighted(&self, z: &ZeroPolicy, w0: u32) -> bool {
        self.0.iter().enumerate().all(|(k, c)| z.is_zero(c, w0 + 2 * k as u32))
    }
}

/// `c4 x⁴ + c3 x³y + c2 x²y² + c1 xy³ + c0 y⁴`, stored as `[c4, c3, c2, c1, c0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryQuartic<F>(pub [F; 5]);

#[derive(Clone, Debug, PartialEq)]
pub struct QuarticCovariants<F> {
    pub i2: F,
    pub i3: F,
    pub delta: F,
    pub hess: BinaryForm<F>,
    pub t: BinaryForm<F>,
}

impl<F: Field> BinaryQuartic<F> {
    pub fn form(&self) -> BinaryForm<F> {
        BinaryForm(self.0.to_vec())
    }

    /// Value at `(x, 1)`.
    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for c in &self.0 {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn hessian(&self) -> BinaryForm<F> {
        let f = self.form();
        let (fx, fy) = (f.dx(), f.dy());
        fx.dx().mul(&fy.dy()).sub(&fx.dy().mul(&fx.dy()))
    }

    pub fn covariants(&self) -> QuarticCovariants<F> {
        let (i2, i3) = apolar_catalecticant(&self.0);
        let delta = i2.pow(3) - F::from_i64(27) * i3.square();
        let f = self.form();
        let hess = self.hessian();
        let t = f.dx().mul(&hess.dy()).sub(&f.dy().mul(&hess.dx()));
        QuarticCovariants { i2, i3, delta, hess, t }
    }
}

impl<F: Field + fmt::Display> fmt::Display for BinaryQuartic<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mono = ["x^4", "x^3*y", "x^2*y^2", "x*y^3", "y^4"];
        let parts: Vec<String> =
            self.0.iter().zip(mono).filter(|(c, _)| !c.is_zero()).map(|(c, m)| format!("({c})*{m}")).collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// `(Q1, Q2, Q3)`; constant terms are `L², M², N²`.
pub fn build_quartics<F: Field>(iv: &InvariantVector<F>) -> [BinaryQuartic<F>; 3] {
    let [a, b, c] = quartic_coefficients(&iv.b, &iv.l, &iv.m, &iv.dxy);
    [BinaryQuartic(a), BinaryQuartic(b), BinaryQuartic(c)]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witnesses {
    pub delta_nonzero: bool,
    pub t_nonzero: bool,
    pub i2_nonzero: bool,
    pub i3_nonzero: bool,
    pub hess_nonzero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootProfile {
    /// Multiplicities of the distinct roots, in decreasing order.
    pub partition: Vec<u8>,
    pub zero_multiplicity: u8,
    pub witnesses: Witnesses,
}

impl RootProfile {
    pub fn partition_label(&self) -> String {
        format!("{:?}", self.partition)
    }
}

/// Root multiplicities from the covariant cascade:
/// `Δ≠0` four simple roots; `I2=I3=0, Hess≠0` a triple root; `Hess=0` a
/// quadruple root; otherwise `T≠0` one double root and `T=0` two double roots.
///
/// Zero roots of `Q_which` are read from the invariants: for `Q1` a zero
/// root iff `L=0`, double iff also `P=0`, triple iff also `S1=0` (and `B=0`
/// for a quadruple one); `Q2` uses `M, D_xy, S2` and `Q3` uses `N, D_xy, S3`.
pub fn root_profile<F: Field>(
    q: &BinaryQuartic<F>,
    iv: &InvariantVector<F>,
    which: usize,
    z: &ZeroPolicy,
) -> RootProfile {
    let cov = q.covariants();
    let witnesses = Witnesses {
        delta_nonzero: !z.is_zero(&cov.delta, 24),
        t_nonzero: !cov.t.is_zero_weighted(z, 6),
        i2_nonzero: !z.is_zero(&cov.i2, 8),
        i3_nonzero: !z.is_zero(&cov.i3, 12),
        hess_nonzero: !cov.hess.is_zero_weighted(z, 4),
    };
    // A triple root also has T ≠ 0, so the I2 = I3 = 0 test comes first.
    let partition = if witnesses.delta_nonzero {
        vec![1, 1, 1, 1]
    } else if !witnesses.i2_nonzero && !witnesses.i3_nonzero {
        if witnesses.hess_nonzero {
            vec![3, 1]
        } else {
            vec![4]
        }
    } else if witnesses.t_nonzero {
        vec![2, 1, 1]
    } else {
        vec![2, 2]
    };
    let (first, second, third) = match which {
        1 => ((&iv.l, 4), (&iv.p, 6), (&iv.s1, 4)),
        2 => ((&iv.m, 4), (&iv.dxy, 6), (&iv.s2, 4)),
        3 => ((&iv.n, 4), (&iv.dxy, 6), (&iv.s3, 4)),
        _ => panic!("quartic index must be 1, 2 or 3"),
    };
    let chain = [first, second, third, (&iv.b, 2)];
    let zero_multiplicity = chain.iter().take_while(|(v, d)| z.is_zero(*v, *d)).count() as u8;
    RootProfile { partition, zero_multiplicity, witnesses }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericRoots {
    /// `(root, multiplicity)` with roots given as `[re, im]`.
    pub roots: Vec<([f64; 2], u8)>,
    /// Set when some root distances fall near the clustering tolerance.
    pub ill_conditioned: bool,
}

impl NumericRoots {
    pub fn partition(&self) -> Vec<u8> {
        let mut p: Vec<u8> = self.roots.iter().map(|r| r.1).collect();
        p.sort_unstable_by(|a, b| b.cmp(a));
        p
    }
}

/// Roots of `q(x, 1)` by Aberth iteration, clustered at relative tolerance
/// `tol`. The leading coefficient must be nonzero.
pub fn numeric_roots(q: &BinaryQuartic<Complex64>, tol: f64) -> NumericRoots {
    let lead = q.0[0];
    let c: Vec<Complex64> = q.0.iter().map(|v| v / lead).collect();
    let p = |x: Complex64| c.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc * x + v);
    let dp = |x: Complex64| {
        c[..4].iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (k, v)| acc * x + v * (4 - k) as f64)
    };
    let radius = 1.0 + c[1..].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> =
        (0..4).map(|k| Complex64::from_polar(radius, 0.4 + k as f64 * std::f64::consts::FRAC_PI_2)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..4 {
            let pk = p(z[k]);
            if pk.norm() == 0.0 {
                continue;
            }
            let ratio = pk / dp(z[k]);
            let repulsion: Complex64 = (0..4).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    // Greedy clustering by relative distance.
    let scale = z.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    let mut ill = false;
    for r in z {
        let mut placed = false;
        for cl in clusters.iter_mut() {
            let d = (cl[0] - r).norm() / scale;
            if d <= tol {
                cl.push(r);
                placed = true;
                break;
            }
            if d <= 100.0 * tol {
                ill = true;
            }
        }
        if !placed {
            clusters.push(vec![r]);
        }
    }
    let mut roots: Vec<([f64; 2], u8)> = clusters
        .iter()
        .map(|cl| {
            let mean: Complex64 = cl.iter().sum::<Complex64>() / cl.len() as f64;
            let clean = |v: f64| if v.abs() <= tol * scale { 0.0 } else { v };
            ([clean(mean.re), clean(mean.im)], cl.len() as u8)
        })
        .collect();
    roots.sort_by(|a, b| b.1.cmp(&a.1).then(a.0[0].total_cmp(&b.0[0])).then(a.0[1].total_cmp(&b.0[1])));
    NumericRoots { roots, ill_conditioned: ill }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Gaussian;
    use crate::invariants::invariant_vector;
    use crate::normal_forms::gen_g;

    fn q(n: i64) -> Gaussian {
        Gaussian::from_i64(n)
    }

    fn quartic(c: [i64; 5]) -> BinaryQuartic<Gaussian> {
        BinaryQuartic(c.map(q))
    }

    #[test]
    fn q1_of_g1234() {
        let iv = invariant_vector(&gen_g(q(1), q(2), q(3), q(4)).unwrap());
        let [q1, _, _] = build_quartics(&iv);
        assert_eq!(q1, quartic([1, -30, 273, -820, 576]));
        let cov = q1.covariants();
        assert_eq!(cov.delta, q(89_302_500));
        let p = root_profile(&q1, &iv, 1, &ZeroPolicy::exact());
        assert_eq!(p.partition, vec![1, 1, 1, 1]);
        assert_eq!(p.zero_multiplicity, 0);
    }

    #[test]
    fn degenerate_quartics() {
        // (x − y)⁴
        let f = quartic([1, -4, 6, -4, 1]);
        assert!(f.covariants().hess.is_zero());
        // x²(x + 3y)² = x⁴ + 6x³y + 9x²y²
        let g = quartic([1, 6, 9, 0, 0]);
        let cov = g.covariants();
        assert!(cov.t.is_zero());
        assert!(!cov.i2.is_zero());
    }

    #[test]
    fn numeric_root_clusters() {
        let to_c = |f: &BinaryQuartic<Gaussian>| BinaryQuartic(f.0.clone().map(|g| g.to_complex()));
        let close = |r: [f64; 2], re: f64| (r[0] - re).abs() < 1e-6 && r[1].abs() < 1e-6;

        let r = numeric_roots(&to_c(&quartic([1, 6, 9, 0, 0])), 1e-6);
        assert_eq!(r.partition(), vec![2, 2]);
        assert!(close(r.roots[0].0, -3.0) && close(r.roots[1].0, 0.0));

        let r = numeric_roots(&to_c(&quartic([1, -4, 6, -4, 1])), 1e-3);
        assert_eq!(r.partition(), vec![4]);
        assert!((r.roots[0].0[0] - 1.0).abs() < 1e-3);

        let r = numeric_roots(&to_c(&quartic([1, -30, 273, -820, 576])), 1e-6);
        assert_eq!(r.partition(), vec![1, 1, 1, 1]);
        for (root, want) in r.roots.iter().zip([1.0, 4.0, 9.0, 16.0]) {
            assert!(close(root.0, want), "{root:?}");
        }
    }
}
