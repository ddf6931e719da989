//! Exact integer and rational linear algebra: Smith normal form, cokernels,
//! presented abelian groups, subgroup membership.
//!
//! Convention, fixed once for every caller in this crate: a matrix with
//! `rows` rows and `cols` columns is the homomorphism `Z^cols -> Z^rows`
//! sending a column vector `x` to `A x`. Columns index the source. Cokernels
//! are `Z^rows / (column span)`, and a relation matrix for a presented group
//! stores one relation per *row* over the group's generators.

mod group;

pub use group::{
    subgroup_membership, quotient, Canonicalized, FinAbGroup, GroupMap, PresentedGroup,
};
pub(crate) use group::lattice_membership;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("map is not well defined: relation {relation} does not land in the target relation lattice")]
    IllDefinedMap { relation: usize },
    #[error("element has {got} coordinates, ambient group has {want}")]
    BadElementLength { got: usize, want: usize },
}

/// Dense matrix of arbitrary-precision integers, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, ExactalgError> {
        if entries.len() != rows * cols {
            return Err(ExactalgError::Dimension(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Convenience constructor from machine-integer rows, mostly for tests.
    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Result<Self, ExactalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ExactalgError::Dimension("ragged rows".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| BigInt::from(rows[i][j])))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, ExactalgError> {
        if self.cols != rhs.rows {
            return Err(ExactalgError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = BigInt::zero();
            for k in 0..self.cols {
                acc += self.at(i, k) * rhs.at(k, j);
            }
            acc
        }))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.at(i, j).is_zero()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let e = self.at_mut(i, j);
            *e = -std::mem::take(e);
        }
    }

    /// row_i -= q * row_t
    fn row_submul(&mut self, i: usize, t: usize, q: &BigInt) {
        for j in 0..self.cols {
            let sub = q * self.at(t, j);
            *self.at_mut(i, j) -= sub;
        }
    }

    /// col_j -= q * col_t
    fn col_submul(&mut self, j: usize, t: usize, q: &BigInt) {
        for i in 0..self.rows {
            let sub = q * self.at(i, t);
            *self.at_mut(i, j) -= sub;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `u * a * v = s` with `u`, `v` unimodular and `s` in Smith normal form:
/// diagonal, nonnegative, each diagonal entry dividing the next.
pub struct SmithDecomposition {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal of `s`, length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s.at(i, i).clone()).collect()
    }
}

/// Smith normal form by repeated pivot reduction. Total: never fails.
///
/// Pivot choice is deterministic: the smallest-absolute-value nonzero entry
/// of the active block, ties broken by lowest row index, then lowest column
/// index. Snapshot tests rely on this ordering.
pub fn snf(a: &IntMatrix) -> SmithDecomposition {
    let mut s = a.clone();
    let mut u = IntMatrix::identity(a.rows());
    let mut v = IntMatrix::identity(a.cols());
    let n = a.rows().min(a.cols());

    for t in 0..n {
        'step: loop {
            // Deterministic pivot search over the active block.
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..s.rows() {
                for j in t..s.cols() {
                    let e = s.at(i, j);
                    if e.is_zero() {
                        continue;
                    }
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => e.abs() < s.at(pi, pj).abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                break 'step; // active block all zero
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..s.rows() {
                if !s.at(i, t).is_zero() {
                    let q = s.at(i, t) / s.at(t, t);
                    if !q.is_zero() {
                        s.row_submul(i, t, &q);
                        u.row_submul(i, t, &q);
                    }
                    if !s.at(i, t).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'step;
            }
            for j in t + 1..s.cols() {
                if !s.at(t, j).is_zero() {
                    let q = s.at(t, j) / s.at(t, t);
                    if !q.is_zero() {
                        s.col_submul(j, t, &q);
                        v.col_submul(j, t, &q);
                    }
                    if !s.at(t, j).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'step;
            }

            // Divisibility: the pivot must divide the whole remaining block.
            let p = s.at(t, t).clone();
            let mut offender = None;
            'scan: for i in t + 1..s.rows() {
                for j in t + 1..s.cols() {
                    if !(s.at(i, j) % &p).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                None => break 'step,
                Some(i) => {
                    // Fold the offending row into row t and reduce again.
                    let minus_one = -BigInt::one();
                    s.row_submul(t, i, &minus_one);
                    u.row_submul(t, i, &minus_one);
                }
            }
        }
    }

    for t in 0..n {
        if s.at(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithDecomposition { s, u, v }
}

/// Exact determinant by Bareiss fraction-free elimination.
pub fn det(a: &IntMatrix) -> Result<BigInt, ExactalgError> {
    if a.rows() != a.cols() {
        return Err(ExactalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m.at(k, k).is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m.at(i, k).is_zero()) else {
                return Ok(BigInt::zero());
            };
            m.swap_rows(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                *m.at_mut(i, j) = num / &prev;
            }
            *m.at_mut(i, k) = BigInt::zero();
        }
        prev = m.at(k, k).clone();
    }
    Ok(sign * m.at(n - 1, n - 1).clone())
}

pub fn is_unimodular(a: &IntMatrix) -> Result<bool, ExactalgError> {
    Ok(det(a)?.abs().is_one())
}

/// Exact rational solution of `A x = b`, or `None` when inconsistent.
pub fn solve_rational(
    a: &IntMatrix,
    b: &[BigRational],
) -> Result<Option<Vec<BigRational>>, ExactalgError> {
    if b.len() != a.rows() {
        return Err(ExactalgError::Dimension(format!(
            "rhs has {} entries, matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    let dec = snf(a);
    let n = a.rows().min(a.cols());
    // c = U b
    let c: Vec<BigRational> = (0..a.rows())
        .map(|i| {
            (0..a.rows())
                .map(|k| BigRational::from(dec.u.at(i, k).clone()) * &b[k])
                .sum()
        })
        .collect();
    let mut y = vec![BigRational::zero(); a.cols()];
    for (i, ci) in c.iter().enumerate() {
        if i < n && !dec.s.at(i, i).is_zero() {
            y[i] = ci / BigRational::from(dec.s.at(i, i).clone());
        } else if !ci.is_zero() {
            return Ok(None);
        }
    }
    // x = V y
    let x: Vec<BigRational> = (0..a.cols())
        .map(|i| {
            (0..a.cols())
                .map(|k| BigRational::from(dec.v.at(i, k).clone()) * &y[k])
                .sum()
        })
        .collect();
    Ok(Some(x))
}

/// Integer solution of `A x = b`, or `None` when none exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>, ExactalgError> {
    if b.len() != a.rows() {
        return Err(ExactalgError::Dimension(format!(
            "rhs has {} entries, matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    let dec = snf(a);
    let n = a.rows().min(a.cols());
    let c: Vec<BigInt> = (0..a.rows())
        .map(|i| (0..a.rows()).map(|k| dec.u.at(i, k) * &b[k]).sum())
        .collect();
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ci) in c.iter().enumerate() {
        if i < n && !dec.s.at(i, i).is_zero() {
            let (q, r) = num_integer::Integer::div_rem(ci, dec.s.at(i, i));
            if !r.is_zero() {
                return Ok(None);
            }
            y[i] = q;
        } else if !ci.is_zero() {
            return Ok(None);
        }
    }
    let x: Vec<BigInt> = (0..a.cols())
        .map(|i| (0..a.cols()).map(|k| dec.v.at(i, k) * &y[k]).sum())
        .collect();
    Ok(Some(x))
}

/// Cokernel `Z^rows / im(A)` in canonical invariant-factor form, plus the
/// projection sending each ambient basis vector to its class.
pub fn cokernel(a: &IntMatrix) -> (FinAbGroup, GroupMap) {
    group::cokernel_impl(a)
}
