//! Compressed sparse row storage for symmetric finite-element matrices.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square sparse matrix in CSR layout with sorted, unique column indices.
///
/// Finite-element matrices keep both triangles explicitly; assembly inserts
/// `(i, j)` and `(j, i)` with identical values in identical order, so the
/// compressed result is symmetric bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    order: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

/// Coordinate-format accumulator. Duplicates are summed on compression.
#[derive(Debug, Clone)]
pub struct TripletBuilder<T> {
    order: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Real> TripletBuilder<T> {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(order: usize, capacity: usize) -> Self {
        Self {
            order,
            entries: Vec::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: T) {
        debug_assert!(row < self.order && col < self.order);
        self.entries.push((row, col, value));
    }

    /// Sorts by position (stable, so duplicates are summed in insertion order)
    /// and compresses.
    pub fn build(mut self) -> CsrMatrix<T> {
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.order + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<T> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("non-empty") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.order {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            order: self.order,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl<T: Real> CsrMatrix<T> {
    pub fn identity(order: usize) -> Self {
        Self::from_diagonal(&vec![T::one(); order])
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut b = TripletBuilder::new(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            b.push(i, i, d);
        }
        b.build()
    }

    /// Dense row-major input; exact zeros are dropped.
    pub fn from_dense(order: usize, dense: &[T]) -> Result<Self> {
        if dense.len() != order * order {
            return Err(Error::DimensionMismatch(format!(
                "dense input has {} entries, expected {}",
                dense.len(),
                order * order
            )));
        }
        let mut b = TripletBuilder::new(order);
        for i in 0..order {
            for j in 0..order {
                let v = dense[i * order + j];
                if v != T::zero() {
                    b.push(i, j, v);
                }
            }
        }
        Ok(b.build())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or(T::zero())
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.order).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> T {
        self.diagonal().into_iter().sum()
    }

    /// Sum of all entries, accumulated row by row.
    pub fn sum(&self) -> T {
        self.values.iter().copied().sum()
    }

    /// `y = A x`
    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.order);
        assert_eq!(y.len(), self.order);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.order];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `x^T A y`
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        (0..self.order)
            .map(|i| {
                let (cols, vals) = self.row(i);
                x[i] * cols.iter().zip(vals).map(|(&j, &v)| v * y[j]).sum::<T>()
            })
            .sum()
    }

    /// `alpha * self + beta * other` over the union of both patterns.
    pub fn linear_combination(&self, alpha: T, other: &CsrMatrix<T>, beta: T) -> Result<CsrMatrix<T>> {
        if self.order != other.order {
            return Err(Error::DimensionMismatch(format!(
                "orders {} and {} differ",
                self.order, other.order
            )));
        }
        let mut row_ptr = Vec::with_capacity(self.order + 1);
        let mut col_idx = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(col_idx.capacity());
        row_ptr.push(0);
        for i in 0..self.order {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let take_a = q >= cb.len() || (p < ca.len() && ca[p] <= cb[q]);
                let take_b = p >= ca.len() || (q < cb.len() && cb[q] <= ca[p]);
                let (col, v) = match (take_a, take_b) {
                    (true, true) => {
                        let r = (ca[p], alpha * va[p] + beta * vb[q]);
                        p += 1;
                        q += 1;
                        r
                    }
                    (true, false) => {
                        let r = (ca[p], alpha * va[p]);
                        p += 1;
                        r
                    }
                    _ => {
                        let r = (cb[q], beta * vb[q]);
                        q += 1;
                        r
                    }
                };
                col_idx.push(col);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(CsrMatrix {
            order: self.order,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn scaled(&self, alpha: T) -> CsrMatrix<T> {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v *= alpha;
        }
        out
    }

    pub fn transpose(&self) -> CsrMatrix<T> {
        let mut b = TripletBuilder::with_capacity(self.order, self.nnz());
        for i in 0..self.order {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                b.push(j, i, v);
            }
        }
        b.build()
    }

    /// Exact structural and numerical symmetry.
    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.order)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn to_dense(&self) -> Vec<T> {
        let n = self.order;
        let mut d = vec![T::zero(); n * n];
        for i in 0..n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[i * n + j] = v;
            }
        }
        d
    }

    pub fn map_scalar<U: Real>(&self) -> CsrMatrix<U> {
        CsrMatrix {
            order: self.order,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|v| U::of(v.to_f64_lossy())).collect(),
        }
    }
}
