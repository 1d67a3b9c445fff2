//! Linear solvers for symmetric positive definite systems and a small dense
//! symmetric eigensolver.

mod cg;
mod cholesky;
mod jacobi;

pub use cg::{pcg, CgOptions, CgReport};
pub use cholesky::{reverse_cuthill_mckee, SkylineCholesky};
pub use jacobi::{symmetric_eigen, SymmetricEigen};

use crate::error::Result;
use crate::scalar::Real;
use crate::sparse::CsrMatrix;

/// Orders at or below this use the direct skyline factorization by default.
pub const DIRECT_SOLVE_THRESHOLD: usize = 20_000;

/// Solver for a fixed SPD matrix, chosen once and reused for many right-hand sides.
#[derive(Debug, Clone)]
pub enum SpdSolver<T> {
    Direct(SkylineCholesky<T>),
    Iterative {
        matrix: CsrMatrix<T>,
        options: CgOptions<T>,
    },
}

impl<T: Real> SpdSolver<T> {
    /// Direct factorization when `order <= threshold`, otherwise Jacobi-preconditioned CG.
    pub fn new(matrix: CsrMatrix<T>, options: CgOptions<T>, threshold: usize) -> Result<Self> {
        if matrix.order() <= threshold {
            Ok(Self::Direct(SkylineCholesky::factor(&matrix)?))
        } else {
            Ok(Self::Iterative { matrix, options })
        }
    }

    pub fn iterative(matrix: CsrMatrix<T>, options: CgOptions<T>) -> Self {
        Self::Iterative { matrix, options }
    }

    pub fn order(&self) -> usize {
        match self {
            Self::Direct(f) => f.order(),
            Self::Iterative { matrix, .. } => matrix.order(),
        }
    }

    /// Solves `K x = b`; `x` is used as the initial guess by the iterative path.
    pub fn solve_into(&self, b: &[T], x: &mut [T]) -> Result<()> {
        match self {
            Self::Direct(f) => {
                x.copy_from_slice(b);
                f.solve_in_place(x);
                Ok(())
            }
            Self::Iterative { matrix, options } => pcg(matrix, b, x, options).map(|_| ()),
        }
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let mut x = vec![T::zero(); b.len()];
        self.solve_into(b, &mut x)?;
        Ok(x)
    }
}
