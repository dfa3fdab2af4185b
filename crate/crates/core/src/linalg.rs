//! Small dense matrices over a [`Scalar`] and null-space extraction.
//!
//! Rational matrices are reduced with Bareiss' fraction-free elimination over
//! the integers, so rank decisions are exact. Extended-precision matrices use
//! partial pivoting and treat pivots below `1e-20` of the largest entry as zero.

use std::fmt;

use dashu::integer::IBig;

use crate::scalar::{Rational, Real, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Matrix {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (a, x)| acc + a.clone() * x.clone())
            })
            .collect()
    }

    /// `self - s * other`
    pub fn sub_scaled(&self, s: &S, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - s.clone() * b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for i in 0..self.rows {
            list.entry(&self.row(i).iter().map(ToString::to_string).collect::<Vec<_>>());
        }
        list.finish()
    }
}

/// Basis of the right null space.
pub trait NullSpace: Scalar {
    fn null_space(m: &Matrix<Self>) -> Vec<Vec<Self>>;
}

/// Echelon form as (pivot column per pivot row, reduced rows).
struct Echelon<S> {
    pivots: Vec<usize>,
    rows: Vec<Vec<S>>,
}

fn back_substitute<S: Scalar>(echelon: &Echelon<S>, cols: usize) -> Vec<Vec<S>> {
    let free: Vec<usize> = (0..cols).filter(|j| !echelon.pivots.contains(j)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![S::zero(); cols];
            x[f] = S::one();
            for (r, &p) in echelon.pivots.iter().enumerate().rev() {
                let row = &echelon.rows[r];
                let acc = ((p + 1)..cols)
                    .filter(|&j| !row[j].is_zero() && !x[j].is_zero())
                    .fold(S::zero(), |acc, j| acc + row[j].clone() * x[j].clone());
                x[p] = -acc / row[p].clone();
            }
            x
        })
        .collect()
}

impl NullSpace for Rational {
    fn null_space(m: &Matrix<Rational>) -> Vec<Vec<Rational>> {
        let echelon = bareiss(m);
        let rows = echelon
            .rows
            .iter()
            .map(|r| r.iter().map(|v| Rational::from_parts(v.clone(), 1u8.into())).collect())
            .collect();
        back_substitute(
            &Echelon {
                pivots: echelon.pivots,
                rows,
            },
            m.cols(),
        )
    }
}

/// Fraction-free row echelon form of `m` after clearing each row's
/// denominators.
fn bareiss(m: &Matrix<Rational>) -> Echelon<IBig> {
    let mut rows: Vec<Vec<IBig>> = (0..m.rows()).map(|i| integer_row(m.row(i))).collect();
    let cols = m.cols();
    let mut pivots = Vec::new();
    let mut prev = IBig::ONE;
    let mut r = 0;
    for col in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][col] != IBig::ZERO) else {
            continue;
        };
        rows.swap(r, sel);
        let pivot = rows[r][col].clone();
        let (top, below) = rows.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in below.iter_mut() {
            let factor = row[col].clone();
            for (x, p) in row[col..cols].iter_mut().zip(&pivot_row[col..cols]) {
                *x = (&pivot * &*x - &factor * p) / &prev;
            }
        }
        prev = pivot;
        pivots.push(col);
        r += 1;
    }
    rows.truncate(pivots.len());
    Echelon { pivots, rows }
}

fn integer_row(row: &[Rational]) -> Vec<IBig> {
    let lcm = row.iter().fold(IBig::ONE, |acc, v| {
        let d = IBig::from(v.denominator().clone());
        let g = dashu::base::Gcd::gcd(&acc, &d);
        &acc * &d / IBig::from(g)
    });
    row.iter()
        .map(|v| v.numerator() * (&lcm / IBig::from(v.denominator().clone())))
        .collect()
}

/// Relative pivot threshold for extended-precision rank decisions.
pub const REAL_RANK_TOLERANCE: f64 = 1e-20;

impl NullSpace for Real {
    fn null_space(m: &Matrix<Real>) -> Vec<Vec<Real>> {
        let mut rows: Vec<Vec<Real>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        let scale = m
            .data
            .iter()
            .map(Scalar::abs)
            .fold(Real::zero(), |acc, v| if v > acc { v } else { acc });
        if scale.is_zero() {
            return back_substitute(&Echelon { pivots: vec![], rows: vec![] }, m.cols());
        }
        let tol = scale * Real::from_f64(REAL_RANK_TOLERANCE);
        let cols = m.cols();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..cols {
            if r == rows.len() {
                break;
            }
            let (sel, best) = (r..rows.len())
                .map(|i| (i, rows[i][col].abs()))
                .fold((r, Real::zero()), |acc, cand| if cand.1 > acc.1 { cand } else { acc });
            if best <= tol {
                for row in rows.iter_mut().skip(r) {
                    row[col] = Real::zero();
                }
                continue;
            }
            rows.swap(r, sel);
            let (top, below) = rows.split_at_mut(r + 1);
            let pivot_row = &top[r];
            for row in below.iter_mut() {
                let factor = row[col].clone() / pivot_row[col].clone();
                for (x, p) in row[col..cols].iter_mut().zip(&pivot_row[col..cols]) {
                    *x = x.clone() - factor.clone() * p.clone();
                }
                row[col] = Real::zero();
            }
            pivots.push(col);
            r += 1;
        }
        rows.truncate(pivots.len());
        back_substitute(&Echelon { pivots, rows }, cols)
    }
}

/// Solves the square system `m x = rhs` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot vanishes.
pub fn solve_dense<S: Scalar>(m: &Matrix<S>, rhs: &[S]) -> Option<Vec<S>> {
    let n = m.rows();
    assert_eq!(n, m.cols(), "square system required");
    assert_eq!(n, rhs.len());
    let mut rows: Vec<Vec<S>> = (0..n)
        .map(|i| {
            let mut r = m.row(i).to_vec();
            r.push(rhs[i].clone());
            r
        })
        .collect();
    for col in 0..n {
        let sel = (col..n).fold(col, |best, i| {
            if rows[i][col].abs() > rows[best][col].abs() {
                i
            } else {
                best
            }
        });
        if rows[sel][col].is_zero() {
            return None;
        }
        rows.swap(col, sel);
        let (top, below) = rows.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in below.iter_mut().take(n - col - 1) {
            let factor = row[col].clone() / pivot_row[col].clone();
            for (x, p) in row[col..=n].iter_mut().zip(&pivot_row[col..=n]) {
                *x = x.clone() - factor.clone() * p.clone();
            }
        }
    }
    let mut x = vec![S::zero(); n];
    for i in (0..n).rev() {
        let acc = ((i + 1)..n).fold(rows[i][n].clone(), |acc, j| acc - rows[i][j].clone() * x[j].clone());
        x[i] = acc / rows[i][i].clone();
    }
    Some(x)
}

/// Dimension of the right null space.
pub fn nullity<S: NullSpace>(m: &Matrix<S>) -> usize {
    S::null_space(m).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn rational_null_space_of_rank_deficient_matrix() {
        let m = Matrix::from_rows(vec![
            vec![q(1, 2), q(1, 3), q(1, 1)],
            vec![q(1, 1), q(2, 3), q(2, 1)],
            vec![q(0, 1), q(1, 1), q(-1, 4)],
        ]);
        let ns = Rational::null_space(&m);
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(Scalar::is_zero));
    }

    #[test]
    fn full_rank_has_trivial_null_space() {
        let m = Matrix::from_rows(vec![
            vec![q(2, 1), q(1, 1)],
            vec![q(1, 1), q(3, 1)],
            vec![q(5, 7), q(-1, 9)],
        ]);
        assert_eq!(nullity(&m), 0);
    }

    #[test]
    fn zero_matrix_is_all_null() {
        let m: Matrix<Rational> = Matrix::zeros(2, 3);
        assert_eq!(nullity(&m), 3);
        let r: Matrix<Real> = Matrix::zeros(2, 3);
        assert_eq!(nullity(&r), 3);
    }

    #[test]
    fn real_null_space_matches_rational() {
        let rows = vec![
            vec![q(3, 1), q(-1, 2), q(2, 3), q(0, 1)],
            vec![q(6, 1), q(-1, 1), q(4, 3), q(0, 1)],
            vec![q(1, 1), q(1, 1), q(1, 1), q(1, 1)],
        ];
        let m = Matrix::from_rows(rows.clone());
        let mr = Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(Scalar::to_real).collect())
                .collect(),
        );
        let exact = Rational::null_space(&m);
        let approx = Real::null_space(&mr);
        assert_eq!(exact.len(), approx.len());
        assert_eq!(exact.len(), 2);
        for v in &approx {
            let res = mr.mul_vec(v);
            assert!(res.iter().all(|x| x.abs().to_f64() < 1e-55));
        }
    }

    #[test]
    fn bareiss_keeps_integer_entries_exact() {
        // Hilbert-like matrix; singular after appending a dependent row.
        let mut rows: Vec<Vec<Rational>> = (1..=5)
            .map(|i| (1..=6).map(|j| q(1, i + j - 1)).collect())
            .collect();
        let dep: Vec<Rational> = (0..6).map(|j| rows[0][j].clone() - rows[3][j].clone()).collect();
        rows.push(dep);
        let m = Matrix::from_rows(rows);
        let ns = Rational::null_space(&m);
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(Scalar::is_zero));
    }

    #[test]
    fn dense_solve() {
        let m = Matrix::from_rows(vec![
            vec![q(0, 1), q(2, 1), q(1, 1)],
            vec![q(1, 1), q(1, 1), q(0, 1)],
            vec![q(3, 1), q(0, 1), q(1, 2)],
        ]);
        let rhs = vec![q(5, 1), q(3, 1), q(7, 2)];
        let x = solve_dense(&m, &rhs).unwrap();
        assert_eq!(m.mul_vec(&x), rhs);
        let singular = Matrix::from_rows(vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]]);
        assert!(solve_dense(&singular, &[q(1, 1), q(1, 1)]).is_none());
    }
}
