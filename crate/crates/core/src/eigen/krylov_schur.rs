//! Krylov-Schur iteration for operators that are self-adjoint in an inner
//! product `<x, y> = x^T G y`.
//!
//! For a self-adjoint operator the projected matrix of the Krylov
//! decomposition `T V = V B + v b^T` is symmetric, so the Schur form is a
//! diagonal of real Ritz values and restarting keeps the leading Ritz vectors
//! (thick-restart Lanczos). Converged Ritz vectors are locked: they stay in the
//! basis, new vectors are orthogonalized against them, but they no longer take
//! part in the projected eigenproblem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::symmetric_eigen;
use crate::scalar::{axpy, dot, Real};

/// Linear operator together with the Gram matrix of the inner product in
/// which it is self-adjoint.
pub trait KrylovOperator<T: Real> {
    fn order(&self) -> usize;
    /// `y = T x`
    fn apply(&self, x: &[T], y: &mut [T]) -> Result<()>;
    /// `y = G x`
    fn gram(&self, x: &[T], y: &mut [T]);

    fn inner(&self, x: &[T], y: &[T]) -> T {
        let mut gy = vec![T::zero(); y.len()];
        self.gram(y, &mut gy);
        dot(x, &gy)
    }
}

/// Sizes for one Krylov-Schur run: `nev` wanted pairs, maximum basis size `m`,
/// and `p` vectors (locked included) kept on restart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KrylovSizes {
    pub nev: usize,
    pub m: usize,
    pub p: usize,
}

impl KrylovSizes {
    /// `m = max(2 nev + 10, 20)` and `p = nev + min(nev, 10)`, clipped so that
    /// `m <= available` and `p <= (nev + m) / 2`.
    pub fn for_count(nev: usize, available: usize) -> Self {
        let m = (2 * nev + 10).max(20);
        let p = nev + nev.min(10);
        Self { nev, m, p }.clipped(available)
    }

    pub fn clipped(self, available: usize) -> Self {
        let m = self.m.min(available).max(1);
        let nev = self.nev.min(m);
        let p = self
            .p
            .min((nev + m) / 2)
            .min(m.saturating_sub(1))
            .max(nev.min(m.saturating_sub(1)));
        Self { nev, m, p }
    }
}

/// Ritz pair of the transformed operator.
#[derive(Debug, Clone)]
pub struct RitzPair<T> {
    pub theta: T,
    pub vector: Vec<T>,
    /// Residual estimate `|beta e_m^T y|`.
    pub residual_estimate: T,
}

/// Result of one expand/reduce/restart cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleReport {
    /// Locked plus newly converged pairs.
    pub converged: usize,
    pub done: bool,
}

/// Krylov decomposition `T V = V B + v_next b^T` with `V` orthonormal in the
/// operator's inner product and `B` symmetric.
pub struct KrylovSchur<'a, T: Real, Op: KrylovOperator<T>> {
    op: &'a Op,
    deflation: &'a [Vec<T>],
    sizes: KrylovSizes,
    tol: T,
    basis: Vec<Vec<T>>,
    /// Row-major `m x m`; only the leading `basis.len()` block is meaningful.
    projected: Vec<T>,
    next: Vec<T>,
    coupling: Vec<T>,
    beta: T,
    locked: usize,
    restarts: usize,
    exhausted: bool,
    rng: ChaCha8Rng,
    ritz: Vec<RitzPair<T>>,
}

impl<'a, T: Real, Op: KrylovOperator<T>> KrylovSchur<'a, T, Op> {
    /// Starts from a seeded random vector orthogonal to `deflation` (which must
    /// be orthonormal in the operator's inner product).
    pub fn new(op: &'a Op, deflation: &'a [Vec<T>], sizes: KrylovSizes, tol: T, seed: u64) -> Self {
        let available = op.order().saturating_sub(deflation.len());
        let sizes = sizes.clipped(available);
        let mut state = Self {
            op,
            deflation,
            sizes,
            tol,
            basis: Vec::with_capacity(sizes.m),
            projected: vec![T::zero(); sizes.m * sizes.m],
            next: Vec::new(),
            coupling: Vec::new(),
            beta: T::zero(),
            locked: 0,
            restarts: 0,
            exhausted: available == 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            ritz: Vec::new(),
        };
        if !state.exhausted {
            match state.random_orthogonal() {
                Some(v) => state.next = v,
                None => state.exhausted = true,
            }
        }
        state
    }

    pub fn sizes(&self) -> KrylovSizes {
        self.sizes
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    pub fn locked(&self) -> usize {
        self.locked
    }

    pub fn restarts(&self) -> usize {
        self.restarts
    }

    /// Leading `k x k` block of the projected matrix, row-major.
    pub fn projected(&self) -> Vec<T> {
        let k = self.basis.len();
        let m = self.sizes.m;
        (0..k * k).map(|idx| self.projected[(idx / k) * m + idx % k]).collect()
    }

    pub fn continuation(&self) -> (&[T], &[T]) {
        (&self.next, &self.coupling)
    }

    /// Latest Ritz pairs, largest `theta` first.
    pub fn ritz_pairs(&self) -> &[RitzPair<T>] {
        &self.ritz
    }

    fn b(&self, i: usize, j: usize) -> T {
        self.projected[i * self.sizes.m + j]
    }

    fn set_b(&mut self, i: usize, j: usize, v: T) {
        let m = self.sizes.m;
        self.projected[i * m + j] = v;
        self.projected[j * m + i] = v;
    }

    /// Orthogonalizes `w` against the deflation set and the basis (classical
    /// Gram-Schmidt, two passes). Returns basis coefficients and the remaining norm.
    fn orthogonalize(&self, w: &mut [T]) -> (Vec<T>, T) {
        let n = w.len();
        let mut coeffs = vec![T::zero(); self.basis.len()];
        let mut gw = vec![T::zero(); n];
        for _pass in 0..2 {
            self.op.gram(w, &mut gw);
            let dc: Vec<T> = self.deflation.iter().map(|d| dot(d, &gw)).collect();
            let bc: Vec<T> = self.basis.iter().map(|v| dot(v, &gw)).collect();
            for (d, &c) in self.deflation.iter().zip(&dc) {
                axpy(-c, d, w);
            }
            for ((v, &c), acc) in self.basis.iter().zip(&bc).zip(coeffs.iter_mut()) {
                axpy(-c, v, w);
                *acc += c;
            }
        }
        self.op.gram(w, &mut gw);
        let norm = dot(w, &gw).max(T::zero()).sqrt();
        (coeffs, norm)
    }

    fn random_orthogonal(&mut self) -> Option<Vec<T>> {
        let n = self.op.order();
        for _attempt in 0..3 {
            let mut v: Vec<T> = (0..n).map(|_| T::of(self.rng.random_range(-1.0..1.0))).collect();
            let start = self.op.inner(&v, &v).sqrt();
            let (_, norm) = self.orthogonalize(&mut v);
            if norm > start * T::of(1e-6) {
                v.iter_mut().for_each(|x| *x /= norm);
                return Some(v);
            }
        }
        None
    }

    /// Extends the basis to `m` vectors.
    fn expand(&mut self) -> Result<()> {
        let n = self.op.order();
        let breakdown = T::epsilon() * T::of(1e4);
        while self.basis.len() < self.sizes.m && !self.exhausted {
            let s = self.basis.len();
            let v = std::mem::take(&mut self.next);
            self.basis.push(v);
            let mut w = vec![T::zero(); n];
            self.op.apply(&self.basis[s], &mut w)?;
            let w_norm = self.op.inner(&w, &w).max(T::zero()).sqrt();
            let (h, beta) = self.orthogonalize(&mut w);
            for (i, &hi) in h.iter().enumerate() {
                let value = if i < self.locked { T::zero() } else { hi };
                self.set_b(i, s, value);
            }
            self.coupling = vec![T::zero(); s + 1];
            if beta > breakdown * w_norm && beta > T::zero() {
                w.iter_mut().for_each(|x| *x /= beta);
                self.next = w;
                self.beta = beta;
                self.coupling[s] = beta;
            } else {
                // Invariant subspace: continue with a fresh direction, no coupling.
                self.beta = T::zero();
                if self.deflation.len() + self.basis.len() >= n {
                    self.exhausted = true;
                } else {
                    match self.random_orthogonal() {
                        Some(v) => self.next = v,
                        None => self.exhausted = true,
                    }
                }
            }
        }
        Ok(())
    }

    /// One restart cycle: expand to `m` vectors, solve the projected problem,
    /// lock converged pairs (largest `theta` first) and truncate to `p` vectors.
    pub fn iterate(&mut self) -> Result<CycleReport> {
        self.expand()?;
        let s = self.basis.len();
        let k = self.locked;
        let active = s - k;
        let block: Vec<T> = (0..active * active)
            .map(|idx| self.b(k + idx / active, k + idx % active))
            .collect();
        let eig = symmetric_eigen(active, &block);
        let mut order: Vec<usize> = (0..active).collect();
        order.sort_by(|&a, &b| {
            eig.values[b]
                .partial_cmp(&eig.values[a])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let y = |row: usize, col: usize| eig.vectors[row * active + order[col]];
        let theta: Vec<T> = order.iter().map(|&c| eig.values[c]).collect();
        // After expansion the continuation vector couples only to the last basis vector.
        let last_row = active - 1;
        let tau: Vec<T> = (0..active)
            .map(|c| (self.beta * y(last_row, c)).abs())
            .collect();

        let mut newly = 0;
        while newly < active
            && self.locked + newly < self.sizes.nev
            && tau[newly] < self.tol * theta[newly].abs()
        {
            newly += 1;
        }
        let converged = self.locked + newly;
        let done = converged >= self.sizes.nev || self.exhausted;

        let wanted = (self.sizes.nev - self.locked).min(active);
        let keep = if done {
            wanted
        } else {
            (self.sizes.p.saturating_sub(self.locked))
                .max(newly + 1)
                .min(active.saturating_sub(1))
                .max(newly)
        };

        let n = self.op.order();
        let mut kept: Vec<Vec<T>> = Vec::with_capacity(keep);
        for c in 0..keep {
            let mut u = vec![T::zero(); n];
            for r in 0..active {
                axpy(y(r, c), &self.basis[k + r], &mut u);
            }
            kept.push(u);
        }

        self.ritz.clear();
        for i in 0..k {
            self.ritz.push(RitzPair {
                theta: self.b(i, i),
                vector: self.basis[i].clone(),
                residual_estimate: T::zero(),
            });
        }
        for (c, u) in kept.iter().enumerate().take(wanted.min(keep)) {
            self.ritz.push(RitzPair {
                theta: theta[c],
                vector: u.clone(),
                residual_estimate: tau[c],
            });
        }

        if done {
            self.locked = converged.min(self.sizes.nev);
            return Ok(CycleReport { converged, done });
        }

        // Truncate: locked vectors, then kept Ritz vectors with diagonal B.
        self.basis.truncate(k);
        self.basis.extend(kept);
        self.projected.iter_mut().for_each(|x| *x = T::zero());
        for i in 0..k {
            let t = self.ritz[i].theta;
            self.projected[i * self.sizes.m + i] = t;
        }
        self.coupling = vec![T::zero(); k + keep];
        for c in 0..keep {
            self.projected[(k + c) * self.sizes.m + k + c] = theta[c];
            if c >= newly {
                self.coupling[k + c] = self.beta * y(last_row, c);
            }
        }
        self.locked = converged;
        self.restarts += 1;
        Ok(CycleReport { converged, done })
    }

    /// Max-norm of `V^T G V - I`.
    pub fn orthonormality_error(&self) -> T {
        let mut worst = T::zero();
        for (i, vi) in self.basis.iter().enumerate() {
            for (j, vj) in self.basis.iter().enumerate() {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((self.op.inner(vi, vj) - target).abs());
            }
        }
        worst
    }

    /// Largest column norm of `T V - V B - v_next b^T` in the operator's inner product.
    pub fn decomposition_residual(&self) -> Result<T> {
        let n = self.op.order();
        let s = self.basis.len();
        let mut worst = T::zero();
        for j in 0..s {
            let mut r = vec![T::zero(); n];
            self.op.apply(&self.basis[j], &mut r)?;
            for i in 0..s {
                axpy(-self.b(i, j), &self.basis[i], &mut r);
            }
            if let Some(&bj) = self.coupling.get(j) {
                if !self.next.is_empty() {
                    axpy(-bj, &self.next, &mut r);
                }
            }
            worst = worst.max(self.op.inner(&r, &r).max(T::zero()).sqrt());
        }
        Ok(worst)
    }
}

/// Runs cycles until `nev` pairs converge or `max_restarts` is exceeded.
/// Returns the Ritz pairs (largest `theta` first) and the number of restarts.
pub fn run_krylov_schur<T: Real, Op: KrylovOperator<T>>(
    op: &Op,
    deflation: &[Vec<T>],
    sizes: KrylovSizes,
    tol: T,
    seed: u64,
    max_restarts: usize,
) -> Result<(Vec<RitzPair<T>>, usize)> {
    let mut ks = KrylovSchur::new(op, deflation, sizes, tol, seed);
    loop {
        let report = ks.iterate()?;
        if report.done {
            let restarts = ks.restarts();
            return Ok((std::mem::take(&mut ks.ritz), restarts));
        }
        if ks.restarts() >= max_restarts {
            return Err(crate::error::Error::EigenNotConverged {
                converged: report.converged,
                requested: ks.sizes().nev,
                restarts: ks.restarts(),
            });
        }
    }
}
