use nalgebra::{DMatrix, RealField};

use super::{normalize_sign, residual_norms, Spectrum};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::CsrMatrix;

/// Largest order accepted by [`dense_generalized_eig`].
pub const DENSE_MAX_ORDER: usize = 2000;

/// Full spectrum of `A x = lambda M x` by Cholesky reduction to a standard
/// symmetric problem. Intended as a test oracle.
pub fn dense_generalized_eig<T: Real + RealField>(a: &CsrMatrix<T>, m: &CsrMatrix<T>) -> Result<Spectrum<T>> {
    let n = a.order();
    if m.order() != n {
        return Err(Error::DimensionMismatch(format!("A has order {n}, M has order {}", m.order())));
    }
    if n > DENSE_MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "dense eigensolver limited to order {DENSE_MAX_ORDER}, got {n}"
        )));
    }
    let ad = DMatrix::from_row_slice(n, n, &a.to_dense());
    let md = DMatrix::from_row_slice(n, n, &m.to_dense());
    let chol = md.cholesky().ok_or(Error::NotPositiveDefinite { row: 0, pivot: f64::NAN })?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or(Error::NotPositiveDefinite { row: 0, pivot: f64::NAN })?;
    let c = &l_inv * ad * l_inv.transpose();
    let c = (&c + c.transpose()) * T::of(0.5);
    let eig = c.symmetric_eigen();
    let x = l_inv.transpose() * eig.eigenvectors;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues: Vec<T> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors: Vec<Vec<T>> = order
        .iter()
        .map(|&i| {
            let mut v: Vec<T> = x.column(i).iter().copied().collect();
            normalize_sign(&mut v);
            v
        })
        .collect();
    let residuals = residual_norms(a, m, &eigenvalues, &eigenvectors);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        residuals,
        tolerance: T::epsilon(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_pencil_has_unit_spectrum() {
        let a = CsrMatrix::<f64>::from_dense(3, &[4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 2.0]).unwrap();
        let s = dense_generalized_eig(&a, &a).unwrap();
        for l in s.eigenvalues {
            assert!((l - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_by_two_hand_case() {
        let a = CsrMatrix::from_dense(2, &[2.0, -1.0, -1.0, 2.0]).unwrap();
        let s = dense_generalized_eig::<f64>(&a, &CsrMatrix::identity(2)).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn indefinite_mass_rejected() {
        let a = CsrMatrix::<f64>::identity(2);
        let m = CsrMatrix::from_dense(2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(dense_generalized_eig(&a, &m).is_err());
    }
}
