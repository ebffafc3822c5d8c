//! Small dense linear algebra over a [`Field`].

use crate::field::Field;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(rows: &mut [Vec<F>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&k| !rows[k][col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][col].inv().expect("nonzero pivot");
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    let t = f.clone() * p.clone();
                    *v -= &t;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(mut rows: Vec<Vec<F>>) -> usize {
    rref(&mut rows).len()
}

/// Determinant by elimination. Float entries pivot on the largest modulus.
pub fn det<F: Field>(mut m: Vec<Vec<F>>) -> F {
    let n = m.len();
    let mut d = F::one();
    for col in 0..n {
        let p = if F::EXACT {
            (col..n).find(|&r| !m[r][col].is_zero())
        } else {
            (col..n).max_by(|&a, &b| m[a][col].modulus().total_cmp(&m[b][col].modulus()))
        };
        let Some(p) = p.filter(|&p| !m[p][col].is_zero()) else { return F::zero() };
        if p != col {
            m.swap(p, col);
            d = -d;
        }
        d *= &m[col][col];
        let inv = m[col][col].inv().expect("nonzero pivot");
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() * inv.clone();
            let (top, rest) = m.split_at_mut(r);
            for (dst, src) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *dst -= &(f.clone() * src.clone());
            }
        }
    }
    d
}

/// A basis of `{v : rows · v = 0}`.
pub fn nullspace<F: Field>(mut rows: Vec<Vec<F>>, ncols: usize) -> Vec<Vec<F>> {
    if rows.is_empty() {
        return (0..ncols).map(|c| (0..ncols).map(|k| if k == c { F::one() } else { F::zero() }).collect()).collect();
    }
    let pivots = rref(&mut rows);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); ncols];
            v[f] = F::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -rows[r][f].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Gaussian;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Gaussian>> {
        rows.iter().map(|r| r.iter().map(|&v| Gaussian::from_i64(v)).collect()).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(a.clone()), 2);
        let ker = nullspace(a.clone(), 3);
        assert_eq!(ker.len(), 1);
        for row in &a {
            let dot = row.iter().zip(&ker[0]).fold(Gaussian::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
            assert!(dot.is_zero());
        }
    }
}
