//! Exact dense linear algebra over ℚ.
//!
//! Ranks use fraction-free (Bareiss) elimination on integerized rows,
//! pivoting on the entry of smallest numerator magnitude. Kernels use
//! rational Gauss-Jordan reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Rat;

/// Row-major dense matrix.
pub type Matrix = Vec<Vec<Rat>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Rat::zero(); cols]; rows]
}

fn integerize(row: &[Rat]) -> Vec<BigInt> {
    let l = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| x.numer() * (&l / x.denom()))
        .collect()
}

/// Rank of the matrix whose rows are `rows`.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| integerize(r))
        .collect();
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let pivot = (r..m.len())
            .filter(|&i| !m[i][c].is_zero())
            .min_by(|&a, &b| m[a][c].abs().cmp(&m[b][c].abs()));
        let Some(p) = pivot else { continue };
        m.swap(r, p);
        let (head, tail) = m.split_at_mut(r + 1);
        let prow = &head[r];
        for row in tail.iter_mut() {
            for j in (c + 1)..cols {
                row[j] = (&prow[c] * &row[j] - &row[c] * &prow[j]) / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rat::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let prow = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{x : M x = 0}` for an `rows × cols` matrix.
pub fn nullspace(m: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let mut a: Matrix = m.to_vec();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -a[i][f].clone();
            }
            v
        })
        .collect()
}

pub fn transpose(m: &[Vec<Rat>], cols: usize) -> Matrix {
    (0..cols)
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn mat_vec(m: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    m.iter()
        .map(|r| {
            r.iter()
                .zip(v)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

/// `a · b` for `a: p × q`, `b: q × r`.
pub fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>], r: usize) -> Matrix {
    a.iter()
        .map(|row| {
            let mut out = vec![Rat::zero(); r];
            for (k, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (o, y) in out.iter_mut().zip(&b[k]) {
                    if !y.is_zero() {
                        *o += x * y;
                    }
                }
            }
            out
        })
        .collect()
}

pub fn is_zero_matrix(m: &[Vec<Rat>]) -> bool {
    m.iter().all(|r| r.iter().all(Zero::is_zero))
}

/// Determinant by fraction-free elimination.
pub fn det(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    if n == 0 {
        return Rat::one();
    }
    let mut a: Matrix = m.to_vec();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d *= &piv;
        let prow = a[c].clone();
        for row in a.iter_mut().skip(c + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &piv;
            for (x, y) in row.iter_mut().zip(&prow).skip(c) {
                *x -= &f * y;
            }
        }
    }
    d
}

/// Indices of a maximal linearly independent subset of `rows`, chosen
/// greedily in order.
pub fn independent_rows(rows: &[Vec<Rat>]) -> Vec<usize> {
    let mut basis: Matrix = Vec::new();
    let mut chosen = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        basis.push(r.clone());
        if rank(&basis) == basis.len() {
            chosen.push(i);
        } else {
            basis.pop();
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{int, rat};

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect()
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let k = nullspace(&a, 3);
        assert_eq!(k.len(), 1);
        assert!(mat_vec(&a, &k[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn rational_entries() {
        let a = vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(3, 2), int(1)],
        ];
        assert_eq!(rank(&a), 1);
        assert_eq!(det(&a), int(0));
        assert_eq!(det(&m(&[&[2, 1], &[1, 3]])), int(5));
    }

    #[test]
    fn greedy_independent() {
        let a = m(&[&[1, 0], &[2, 0], &[0, 1], &[1, 1]]);
        assert_eq!(independent_rows(&a), vec![0, 2]);
    }
}
