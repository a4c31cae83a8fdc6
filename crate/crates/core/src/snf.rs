//! Smith normal form and column-echelon reductions over the integers.
//!
//! `smith_normal_form` returns unimodular `left`, `right` (and their inverses)
//! with `left * a * right = diag(d_0, d_1, ...)` and `d_i | d_{i+1}`. Pivots are
//! chosen deterministically: smallest nonzero absolute value in the active
//! block, ties broken row-major.
//!
//! The kernel, image and solve helpers use a one-sided column reduction
//! instead, which avoids carrying an `m x m` transform for tall matrices.

use serde::Serialize;

use crate::matrix::Matrix;
use crate::scalar::IntScalar;

#[derive(Clone, Debug, Serialize)]
pub struct SnfResult<T> {
    /// Diagonal entries, `min(rows, cols)` of them, nonnegative.
    pub diagonal: Vec<T>,
    pub left: Matrix<T>,
    pub right: Matrix<T>,
    pub left_inv: Matrix<T>,
    pub right_inv: Matrix<T>,
}

impl<T: IntScalar> SnfResult<T> {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }

    /// Nontrivial invariant factors of the cokernel `Z^rows / im(a)`,
    /// with 0 standing for a free factor.
    pub fn cokernel_invariants(&self) -> Vec<T> {
        let rows = self.left.rows();
        let mut out: Vec<T> = self.diagonal.iter().filter(|d| !d.is_one()).cloned().collect();
        out.extend(std::iter::repeat_n(T::zero(), rows - self.diagonal.len()));
        out
    }

    pub fn all_ones(&self) -> bool {
        self.diagonal.iter().all(|d| d.is_one())
    }

    /// Checks `left * a * right = diag`, unimodularity and the divisibility chain.
    pub fn verify(&self, a: &Matrix<T>) -> bool {
        let prod = self.left.mul(a).mul(&self.right);
        let diag_ok = (0..prod.rows()).all(|i| {
            (0..prod.cols()).all(|j| {
                if i == j {
                    prod[(i, j)] == self.diagonal[i]
                } else {
                    prod[(i, j)].is_zero()
                }
            })
        });
        let chain_ok = self.diagonal.windows(2).all(|w| {
            if w[0].is_zero() {
                w[1].is_zero()
            } else {
                (w[1].clone() % w[0].clone()).is_zero()
            }
        }) && self.diagonal.iter().all(|d| !d.is_negative());
        let inv_ok = self.left.mul(&self.left_inv).is_identity() && self.right.mul(&self.right_inv).is_identity();
        diag_ok && chain_ok && inv_ok && self.left.is_unimodular() && self.right.is_unimodular()
    }
}

struct Reducer<T> {
    a: Matrix<T>,
    left: Matrix<T>,
    left_inv: Matrix<T>,
    right: Matrix<T>,
    right_inv: Matrix<T>,
}

impl<T: IntScalar> Reducer<T> {
    // row[dst] += k row[src]; left accumulates the same op, left_inv the inverse op.
    fn row_add(&mut self, dst: usize, src: usize, k: &T) {
        self.a.add_row_multiple(dst, src, k);
        self.left.add_row_multiple(dst, src, k);
        self.left_inv.add_col_multiple(src, dst, &-k.clone());
    }

    fn col_add(&mut self, dst: usize, src: usize, k: &T) {
        self.a.add_col_multiple(dst, src, k);
        self.right.add_col_multiple(dst, src, k);
        self.right_inv.add_row_multiple(src, dst, &-k.clone());
    }

    fn row_swap(&mut self, x: usize, y: usize) {
        self.a.swap_rows(x, y);
        self.left.swap_rows(x, y);
        self.left_inv.swap_cols(x, y);
    }

    fn col_swap(&mut self, x: usize, y: usize) {
        self.a.swap_cols(x, y);
        self.right.swap_cols(x, y);
        self.right_inv.swap_rows(x, y);
    }

    fn row_negate(&mut self, i: usize) {
        self.a.negate_row(i);
        self.left.negate_row(i);
        self.left_inv.negate_col(i);
    }

    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let v = &self.a[(i, j)];
                if v.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.a[(bi, bj)].abs() <= v.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

pub fn smith_normal_form<T: IntScalar>(a: &Matrix<T>) -> SnfResult<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut r = Reducer {
        a: a.clone(),
        left: Matrix::identity(m),
        left_inv: Matrix::identity(m),
        right: Matrix::identity(n),
        right_inv: Matrix::identity(n),
    };
    let steps = m.min(n);
    let mut t = 0;
    while t < steps {
        let Some((pi, pj)) = r.pivot(t) else { break };
        r.row_swap(t, pi);
        r.col_swap(t, pj);
        loop {
            let p = r.a[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..m {
                if !r.a[(i, t)].is_zero() {
                    let q = r.a[(i, t)].clone() / p.clone();
                    r.row_add(i, t, &-q);
                    dirty |= !r.a[(i, t)].is_zero();
                }
            }
            for j in t + 1..n {
                if !r.a[(t, j)].is_zero() {
                    let q = r.a[(t, j)].clone() / p.clone();
                    r.col_add(j, t, &-q);
                    dirty |= !r.a[(t, j)].is_zero();
                }
            }
            if dirty {
                // a smaller remainder appeared in row or column t; move it to the pivot
                let (bi, bj) = r.pivot_line(t);
                r.row_swap(t, bi);
                r.col_swap(t, bj);
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let offending = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(r.a[(i, j)].clone() % p.clone()).is_zero()));
            match offending {
                Some(i) => r.row_add(t, i, &T::one()),
                None => break,
            }
        }
        if r.a[(t, t)].is_negative() {
            r.row_negate(t);
        }
        t += 1;
    }
    let diagonal = (0..steps).map(|i| r.a[(i, i)].clone()).collect();
    SnfResult { diagonal, left: r.left, right: r.right, left_inv: r.left_inv, right_inv: r.right_inv }
}

impl<T: IntScalar> Reducer<T> {
    /// Smallest nonzero entry in row t / column t (from position t on).
    fn pivot_line(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t);
        let mut best_abs: Option<T> = None;
        let mut consider = |i: usize, j: usize, v: &T| {
            if v.is_zero() {
                return;
            }
            if best_abs.as_ref().is_none_or(|b| v.abs() < *b) {
                best_abs = Some(v.abs());
                best = (i, j);
            }
        };
        for i in t..self.a.rows() {
            consider(i, t, &self.a[(i, t)]);
        }
        for j in t + 1..self.a.cols() {
            consider(t, j, &self.a[(t, j)]);
        }
        best
    }
}

/// Column echelon form: returns `(h, u)` with `a * u = h`, `u` unimodular, and the
/// first `rank` columns of `h` in echelon shape (strictly increasing pivot rows),
/// the remaining columns zero.
pub struct ColumnEchelon<T> {
    pub h: Matrix<T>,
    pub u: Matrix<T>,
    pub rank: usize,
    /// pivot row of each of the first `rank` columns
    pub pivots: Vec<usize>,
}

pub fn column_echelon<T: IntScalar>(a: &Matrix<T>) -> ColumnEchelon<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = Matrix::identity(n);
    let mut k = 0;
    let mut pivots = Vec::new();
    for i in 0..m {
        if k == n {
            break;
        }
        loop {
            // smallest nonzero |h[i][j]| among j >= k
            let mut best: Option<usize> = None;
            for j in k..n {
                if !h[(i, j)].is_zero() && best.is_none_or(|b| h[(i, j)].abs() < h[(i, b)].abs()) {
                    best = Some(j);
                }
            }
            let Some(b) = best else { break };
            h.swap_cols(k, b);
            u.swap_cols(k, b);
            let p = h[(i, k)].clone();
            let mut done = true;
            for j in k + 1..n {
                if !h[(i, j)].is_zero() {
                    let q = -(h[(i, j)].clone() / p.clone());
                    h.add_col_multiple(j, k, &q);
                    u.add_col_multiple(j, k, &q);
                    if !h[(i, j)].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                if h[(i, k)].is_negative() {
                    h.negate_col(k);
                    u.negate_col(k);
                }
                // reduce earlier pivot columns modulo this one to keep entries small
                for j in 0..k {
                    let q = h[(i, j)].div_floor(&h[(i, k)]);
                    if !q.is_zero() {
                        h.add_col_multiple(j, k, &-q.clone());
                        u.add_col_multiple(j, k, &-q);
                    }
                }
                pivots.push(i);
                k += 1;
                break;
            }
        }
    }
    ColumnEchelon { h, u, rank: k, pivots }
}

/// A Z-basis (as columns) of `{x : a x = 0}`. The result is saturated.
pub fn kernel_basis<T: IntScalar>(a: &Matrix<T>) -> Matrix<T> {
    let ce = column_echelon(a);
    let idx: Vec<usize> = (ce.rank..a.cols()).collect();
    ce.u.select_columns(&idx)
}

/// A Z-basis (as columns) of the column span of `a`.
pub fn image_basis<T: IntScalar>(a: &Matrix<T>) -> Matrix<T> {
    let ce = column_echelon(a);
    let idx: Vec<usize> = (0..ce.rank).collect();
    ce.h.select_columns(&idx)
}

/// An integer solution `x` of `a x = b`, if one exists.
pub fn solve<T: IntScalar>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    assert_eq!(a.rows(), b.len());
    let ce = column_echelon(a);
    let mut y = vec![T::zero(); ce.rank];
    let mut residual = b.to_vec();
    for (k, &pi) in ce.pivots.iter().enumerate() {
        // rows strictly between pivots must already be zero in the residual
        let p = &ce.h[(pi, k)];
        if !(residual[pi].clone() % p.clone()).is_zero() {
            return None;
        }
        let q = residual[pi].clone() / p.clone();
        for (i, r) in residual.iter_mut().enumerate() {
            let v = &ce.h[(i, k)];
            if !v.is_zero() {
                *r = r.clone() - q.clone() * v.clone();
            }
        }
        y[k] = q;
    }
    if residual.iter().any(|r| !r.is_zero()) {
        return None;
    }
    let mut x = vec![T::zero(); a.cols()];
    for (k, yk) in y.iter().enumerate() {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = xi.clone() + ce.u[(i, k)].clone() * yk.clone();
        }
    }
    Some(x)
}

/// Solves `a X = b` column by column.
pub fn solve_matrix<T: IntScalar>(a: &Matrix<T>, b: &Matrix<T>) -> Option<Matrix<T>> {
    let cols: Option<Vec<Vec<T>>> = (0..b.cols()).map(|j| solve(a, &b.column(j))).collect();
    cols.map(|c| Matrix::from_columns(&c, a.cols()))
}

/// Basis of `(Q-span of columns of b) ∩ Z^n`.
pub fn saturation<T: IntScalar>(b: &Matrix<T>) -> Matrix<T> {
    let orth = kernel_basis(&b.transpose());
    kernel_basis(&orth.transpose())
}

/// Rank over Q.
pub fn rank<T: IntScalar>(a: &Matrix<T>) -> usize {
    column_echelon(a).rank
}

/// True if every column of `sub` lies in the Z-span of the columns of `sup`.
pub fn span_contains<T: IntScalar>(sup: &Matrix<T>, sub: &Matrix<T>) -> bool {
    (0..sub.cols()).all(|j| solve(sup, &sub.column(j)).is_some())
}

/// Equality of Z-spans of columns.
pub fn same_span<T: IntScalar>(x: &Matrix<T>, y: &Matrix<T>) -> bool {
    span_contains(x, y) && span_contains(y, x)
}
