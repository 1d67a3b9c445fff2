use crate::error::{Error, Result};
use crate::scalar::{dot, Real};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy)]
pub struct CgOptions<T> {
    /// Stop when `||b - A x|| <= rel_tol * ||b||`.
    pub rel_tol: T,
    pub max_iter: usize,
}

impl<T: Real> CgOptions<T> {
    pub fn new(rel_tol: T, max_iter: usize) -> Self {
        Self { rel_tol, max_iter }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CgReport<T> {
    pub iterations: usize,
    pub rel_residual: T,
}

/// Conjugate gradients with a diagonal (Jacobi) preconditioner, warm-started from `x`.
pub fn pcg<T: Real>(a: &CsrMatrix<T>, b: &[T], x: &mut [T], opts: &CgOptions<T>) -> Result<CgReport<T>> {
    let n = a.order();
    assert_eq!(b.len(), n);
    assert_eq!(x.len(), n);
    let b_norm = dot(b, b).sqrt();
    if b_norm == T::zero() {
        x.iter_mut().for_each(|v| *v = T::zero());
        return Ok(CgReport {
            iterations: 0,
            rel_residual: T::zero(),
        });
    }
    let diag = a.diagonal();
    if let Some((row, &d)) = diag.iter().enumerate().find(|(_, d)| !(**d > T::zero())) {
        return Err(Error::NotPositiveDefinite {
            row,
            pivot: d.to_f64_lossy(),
        });
    }
    let inv_diag: Vec<T> = diag.iter().map(|&d| T::one() / d).collect();

    let mut r = a.mul_vec(x);
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut z: Vec<T> = r.iter().zip(&inv_diag).map(|(&ri, &di)| ri * di).collect();
    let mut p = z.clone();
    let mut q = vec![T::zero(); n];
    let mut rz = dot(&r, &z);
    let target = opts.rel_tol * b_norm;
    let mut res = dot(&r, &r).sqrt();
    for it in 0..=opts.max_iter {
        if res <= target {
            return Ok(CgReport {
                iterations: it,
                rel_residual: res / b_norm,
            });
        }
        if it == opts.max_iter {
            break;
        }
        a.mul_vec_into(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                row: it,
                pivot: pq.to_f64_lossy(),
            });
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        res = dot(&r, &r).sqrt();
        if !res.is_finite() {
            break;
        }
    }
    Err(Error::LinearSolverNotConverged {
        iterations: opts.max_iter,
        residual: (res / b_norm).to_f64_lossy(),
    })
}
