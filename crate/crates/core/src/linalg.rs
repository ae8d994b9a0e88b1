//! Exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactnum::Rational;

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
pub fn rank_bareiss(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..nrows {
            for c in col + 1..ncols {
                let v = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                // exact by Sylvester's identity
                m[r][c] = v / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Clears denominators row by row (scaling a row does not change the row space).
pub fn integer_rows(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    rank_bareiss(&integer_rows(rows))
}

/// Reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rref {
    pub rows: Vec<Vec<Rational>>,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn empty() -> Self {
        Rref {
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        v
    }

    /// Inserts an already-reduced nonzero vector, keeping the form reduced.
    /// Returns the pivot column.
    fn insert_reduced(&mut self, mut v: Vec<Rational>) -> usize {
        let p = v.iter().position(|x| !x.is_zero()).expect("nonzero vector");
        let inv = v[p].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, r) in row.iter_mut().zip(&v) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        p
    }

    /// Adds a row; returns the reduced remainder's pivot, or `None` when the
    /// row was already in the span.
    pub fn push(&mut self, v: &[Rational]) -> Option<usize> {
        let r = self.reduce(v);
        if r.iter().all(Zero::is_zero) {
            None
        } else {
            Some(self.insert_reduced(r))
        }
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Self {
        let mut out = Rref::empty();
        for r in rows {
            out.push(r);
        }
        out
    }

    /// Basis of `{x : rows · x = 0}` in `ncols` unknowns, one vector per free column.
    pub fn nullspace(&self, ncols: usize) -> Vec<Vec<Rational>> {
        let mut out = Vec::new();
        for free in (0..ncols).filter(|c| !self.pivots.contains(c)) {
            let mut x = vec![Rational::zero(); ncols];
            x[free] = Rational::one();
            for (row, &p) in self.rows.iter().zip(&self.pivots) {
                x[p] = -row[free].clone();
            }
            out.push(x);
        }
        out
    }
}

/// Divides by the gcd of the entries.
fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if !g.is_zero() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
}

/// Fraction-free reduced row-echelon form: every row is a primitive integer
/// vector with positive pivot, and pivot columns are zero in the other rows.
/// Like the rational RREF it is unique for a given row space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntRref {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

impl IntRref {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Primitive remainder of `v` after eliminating all pivot columns.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut v = v.to_vec();
        let mut touched = false;
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let g = row[p].gcd(&v[p]);
            let a = &row[p] / &g;
            let b = &v[p] / &g;
            for (x, r) in v.iter_mut().zip(row) {
                let t = &a * &*x;
                *x = if r.is_zero() { t } else { t - &b * r };
            }
            touched = true;
        }
        if touched {
            make_primitive(&mut v);
        }
        v
    }

    fn insert_reduced(&mut self, mut v: Vec<BigInt>) -> usize {
        let p = v.iter().position(|x| !x.is_zero()).expect("nonzero vector");
        if v[p].is_negative() {
            v.iter_mut().for_each(|x| *x = -&*x);
        }
        make_primitive(&mut v);
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let g = v[p].gcd(&row[p]);
            let a = &v[p] / &g;
            let b = &row[p] / &g;
            for (x, r) in row.iter_mut().zip(&v) {
                let t = &a * &*x;
                *x = if r.is_zero() { t } else { t - &b * r };
            }
            make_primitive(row);
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        p
    }

    /// Adds a row; returns the pivot of its remainder, or `None` when it was
    /// already in the span.
    pub fn push(&mut self, v: &[BigInt]) -> Option<usize> {
        let r = self.reduce(v);
        if r.iter().all(Zero::is_zero) {
            None
        } else {
            Some(self.insert_reduced(r))
        }
    }

    /// Rational RREF with the same row space.
    pub fn to_rational(&self) -> Rref {
        Rref {
            rows: self
                .rows
                .iter()
                .zip(&self.pivots)
                .map(|(row, &p)| {
                    row.iter()
                        .map(|x| Rational::new(x.clone(), row[p].clone()))
                        .collect()
                })
                .collect(),
            pivots: self.pivots.clone(),
        }
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Determinant by Gaussian elimination over the rationals.
pub fn det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(p, col);
            d = -d;
        }
        d *= &a[col][col];
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                let v = &f * &a[col][c];
                a[r][c] -= v;
            }
        }
    }
    d
}

/// Gram matrix of the given row vectors.
pub fn gram(vs: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    vs.iter()
        .map(|a| vs.iter().map(|b| dot(a, b)).collect())
        .collect()
}

/// Exact square root of a non-negative rational, when it is a perfect square.
pub fn exact_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{q, q_frac};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect()
    }

    #[test]
    fn bareiss_rank() {
        assert_eq!(rank(&m(&[&[1, 0, 1], &[0, 1, 1]])), 2);
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&m(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&m(&[&[2, 1, 1], &[1, 3, 2], &[1, 0, 0]])), 3);
        let frac = vec![vec![q_frac(1, 2), q_frac(1, 3)], vec![q_frac(3, 2), q(1)]];
        assert_eq!(rank(&frac), 1);
    }

    #[test]
    fn rref_and_nullspace() {
        let r = Rref::from_rows(&m(&[&[1, 1, 0], &[0, 1, 1]]));
        assert_eq!(r.pivots, vec![0, 1]);
        let ns = r.nullspace(3);
        assert_eq!(ns, m(&[&[1, -1, 1]]));
        for row in &r.rows {
            assert!(dot(row, &ns[0]).is_zero());
        }
    }

    #[test]
    fn rref_is_canonical() {
        let a = Rref::from_rows(&m(&[&[1, 2, 3], &[4, 5, 6]]));
        let b = Rref::from_rows(&m(&[&[5, 7, 9], &[3, 3, 3]]));
        assert_eq!(a, b);
    }

    #[test]
    fn integer_rref_matches_rational() {
        let rows = m(&[&[2, 4, 6, 1], &[3, 5, 7, 0], &[5, 9, 13, 1]]);
        let mut ir = IntRref::default();
        for r in integer_rows(&rows) {
            ir.push(&r);
        }
        assert_eq!(ir.to_rational(), Rref::from_rows(&rows));
        let other = m(&[&[5, 9, 13, 1], &[1, 1, 1, -1]]);
        let mut ir2 = IntRref::default();
        for r in integer_rows(&other) {
            ir2.push(&r);
        }
        assert_eq!(ir, ir2);
    }

    #[test]
    fn determinant_and_sqrt() {
        assert_eq!(det(&m(&[&[2, 1], &[1, 3]])), q(5));
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]])), q(-1));
        assert_eq!(exact_sqrt(&q_frac(9, 4)), Some(q_frac(3, 2)));
        assert_eq!(exact_sqrt(&q(2)), None);
    }
}
