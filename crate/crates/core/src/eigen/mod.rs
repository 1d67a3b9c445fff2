//! Smallest eigenpairs of the generalized problem `A x = lambda M x`.
//!
//! The iterative solver applies Krylov-Schur to `T = (A + sigma M)^-1 M`,
//! whose largest eigenvalues `theta` correspond to the smallest
//! `lambda = 1/theta - sigma`.

mod dense;
mod krylov_schur;

pub use dense::dense_generalized_eig;
pub use krylov_schur::{
    run_krylov_schur, CycleReport, KrylovOperator, KrylovSchur, KrylovSizes, RitzPair,
};

use crate::error::{Error, Result};
use crate::linalg::{CgOptions, SpdSolver, DIRECT_SOLVE_THRESHOLD};
use crate::scalar::{dot, Real};
use crate::sparse::CsrMatrix;

/// Eigenpairs sorted by ascending eigenvalue, eigenvectors `M`-orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Vec<Vec<T>>,
    /// `||A v - lambda M v||_2 / ||v||_2` per pair.
    pub residuals: Vec<T>,
    pub tolerance: T,
}

impl<T: Real> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalue(&self, i: usize) -> T {
        self.eigenvalues[i]
    }

    pub fn eigenvector(&self, i: usize) -> &[T] {
        &self.eigenvectors[i]
    }

    /// Keeps the first `count` pairs.
    pub fn truncated(mut self, count: usize) -> Self {
        self.eigenvalues.truncate(count);
        self.eigenvectors.truncate(count);
        self.residuals.truncate(count);
        self
    }

    /// Max-norm of `V^T M V - I`.
    pub fn orthonormality_error(&self, mass: &CsrMatrix<T>) -> T {
        let mv: Vec<Vec<T>> = self.eigenvectors.iter().map(|v| mass.mul_vec(v)).collect();
        let mut worst = T::zero();
        for (i, vi) in self.eigenvectors.iter().enumerate() {
            for (j, mvj) in mv.iter().enumerate() {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((dot(vi, mvj) - target).abs());
            }
        }
        worst
    }

    /// Index ranges of eigenvalues grouped so that consecutive members differ
    /// by less than `rel_gap` relative to the larger magnitude (absolute for values below 1).
    pub fn clusters(&self, rel_gap: T) -> Vec<std::ops::Range<usize>> {
        cluster_ranges(&self.eigenvalues, rel_gap)
    }
}

/// Groups a sorted sequence into runs separated by relative gaps of at least `rel_gap`.
pub fn cluster_ranges<T: Real>(values: &[T], rel_gap: T) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let split = i == values.len() || {
            let scale = values[i].abs().max(values[i - 1].abs()).max(T::one());
            (values[i] - values[i - 1]).abs() >= rel_gap * scale
        };
        if split {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Settings for [`smallest_eigenpairs_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions<T> {
    pub count: usize,
    /// Ritz pair accepted when `tau < tol * |theta|`.
    pub tol: T,
    pub seed: u64,
    pub max_restarts: usize,
    /// Orders up to this use a sparse Cholesky factorization for the inner solves.
    pub direct_threshold: usize,
}

impl<T: Real> EigenOptions<T> {
    pub fn new(count: usize, tol: T, seed: u64) -> Self {
        Self {
            count,
            tol,
            seed,
            max_restarts: 500,
            direct_threshold: DIRECT_SOLVE_THRESHOLD,
        }
    }
}

/// Default shift `1e-3 * tr(A) / tr(M)`.
pub fn default_shift<T: Real>(a: &CsrMatrix<T>, m: &CsrMatrix<T>) -> T {
    T::of(1e-3) * a.trace() / m.trace()
}

/// `T = (A + sigma M)^-1 M`, self-adjoint in the `M` inner product.
pub struct ShiftInvert<'a, T: Real> {
    mass: &'a CsrMatrix<T>,
    solver: SpdSolver<T>,
    shift: T,
}

impl<'a, T: Real> ShiftInvert<'a, T> {
    pub fn new(a: &CsrMatrix<T>, mass: &'a CsrMatrix<T>, shift: T, tol: T, direct_threshold: usize) -> Result<Self> {
        let shifted = a.linear_combination(T::one(), mass, shift)?;
        let n = shifted.order();
        let options = CgOptions::new(tol / T::of(100.0), 20 * n + 100);
        let solver = SpdSolver::new(shifted, options, direct_threshold)?;
        Ok(Self { mass, solver, shift })
    }

    pub fn shift(&self) -> T {
        self.shift
    }
}

impl<T: Real> KrylovOperator<T> for ShiftInvert<'_, T> {
    fn order(&self) -> usize {
        self.mass.order()
    }

    fn apply(&self, x: &[T], y: &mut [T]) -> Result<()> {
        let mx = self.mass.mul_vec(x);
        y.iter_mut().for_each(|v| *v = T::zero());
        self.solver.solve_into(&mx, y)
    }

    fn gram(&self, x: &[T], y: &mut [T]) {
        self.mass.mul_vec_into(x, y);
    }
}

/// Solves the shifted system `K x = rhs` (`K` SPD) to relative residual `rel_tol`,
/// by Cholesky for small orders and Jacobi-preconditioned CG otherwise.
pub fn inner_solve<T: Real>(shifted: &CsrMatrix<T>, rhs: &[T], rel_tol: T) -> Result<Vec<T>> {
    let n = shifted.order();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, matrix order {n}",
            rhs.len()
        )));
    }
    let solver = SpdSolver::new(shifted.clone(), CgOptions::new(rel_tol, 20 * n + 100), DIRECT_SOLVE_THRESHOLD)?;
    solver.solve(rhs)
}

/// The `count` smallest eigenpairs with default restart settings.
pub fn smallest_eigenpairs<T: Real>(
    a: &CsrMatrix<T>,
    m: &CsrMatrix<T>,
    count: usize,
    tol: T,
    seed: u64,
) -> Result<Spectrum<T>> {
    smallest_eigenpairs_with(a, m, &EigenOptions::new(count, tol, seed))
}

pub fn smallest_eigenpairs_with<T: Real>(
    a: &CsrMatrix<T>,
    m: &CsrMatrix<T>,
    opts: &EigenOptions<T>,
) -> Result<Spectrum<T>> {
    let n = a.order();
    if m.order() != n {
        return Err(Error::DimensionMismatch(format!("A has order {n}, M has order {}", m.order())));
    }
    if opts.count == 0 || opts.count >= n {
        return Err(Error::InvalidArgument(format!(
            "eigenpair count must lie in 1..{n}, got {}",
            opts.count
        )));
    }
    if !(opts.tol > T::zero()) {
        return Err(Error::InvalidArgument("eigensolver tolerance must be positive".into()));
    }
    let count = opts.count;
    let shift = default_shift(a, m);
    let op = ShiftInvert::new(a, m, shift, opts.tol, opts.direct_threshold)?;

    let sizes = KrylovSizes::for_count(count, n);
    let (first, _) = run_krylov_schur(&op, &[], sizes, opts.tol, opts.seed, opts.max_restarts)?;
    let mut pairs: Vec<(T, Vec<T>)> = first.into_iter().map(|r| (r.theta, r.vector)).collect();
    if pairs.len() < count {
        return Err(Error::EigenNotConverged {
            converged: pairs.len(),
            requested: count,
            restarts: opts.max_restarts,
        });
    }

    // A Krylov space started from one vector can miss copies of repeated
    // eigenvalues. Search the complement of the accepted vectors until nothing
    // beats the smallest accepted theta.
    let margin = T::one() + (T::of(100.0) * opts.tol).max(T::of(1e-10));
    let mut round = 0u64;
    loop {
        if pairs.len() >= n {
            break;
        }
        round += 1;
        let deflation: Vec<Vec<T>> = pairs.iter().map(|p| p.1.clone()).collect();
        let available = n - deflation.len();
        let nev = count.min(available.saturating_sub(1)).max(1);
        let sizes = KrylovSizes::for_count(nev, available);
        let seed = opts.seed.wrapping_add(round.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let (extra, _) = run_krylov_schur(&op, &deflation, sizes, opts.tol, seed, opts.max_restarts)?;
        let threshold = pairs.iter().map(|p| p.0).fold(T::infinity(), T::min) * margin;
        let better: Vec<(T, Vec<T>)> = extra
            .into_iter()
            .filter(|r| r.theta > threshold)
            .map(|r| (r.theta, r.vector))
            .collect();
        if better.is_empty() || round as usize > count + 10 {
            break;
        }
        pairs.extend(better);
        pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
        pairs.truncate(count);
    }

    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
    pairs.truncate(count);
    let (eigenvalues, eigenvectors): (Vec<T>, Vec<Vec<T>>) = pairs
        .into_iter()
        .map(|(theta, mut v)| {
            let lambda = T::one() / theta - shift;
            let norm = op.inner(&v, &v).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            normalize_sign(&mut v);
            (lambda, v)
        })
        .unzip();
    let residuals = residual_norms(a, m, &eigenvalues, &eigenvectors);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        residuals,
        tolerance: opts.tol,
    })
}

/// Flips `v` so that its largest-magnitude entry (first on ties) is positive.
pub fn normalize_sign<T: Real>(v: &mut [T]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < T::zero()) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// `||A v - lambda M v||_2 / ||v||_2` for each pair.
pub fn residual_norms<T: Real>(a: &CsrMatrix<T>, m: &CsrMatrix<T>, values: &[T], vectors: &[Vec<T>]) -> Vec<T> {
    values
        .iter()
        .zip(vectors)
        .map(|(&lambda, v)| {
            let av = a.mul_vec(v);
            let mv = m.mul_vec(v);
            let r: T = av
                .iter()
                .zip(&mv)
                .map(|(&x, &y)| (x - lambda * y).powi(2))
                .sum::<T>()
                .sqrt();
            r / dot(v, v).sqrt()
        })
        .collect()
}
