use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::CsrMatrix;

/// Reverse Cuthill-McKee ordering of the graph of a structurally symmetric
/// matrix. Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee<T: Real>(a: &CsrMatrix<T>) -> Vec<usize> {
    let n = a.order();
    let neighbours = |i: usize| a.row(i).0.iter().copied().filter(move |&j| j != i);
    let degree: Vec<usize> = (0..n).map(|i| neighbours(i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    // Breadth-first level structure from `root`; returns the last level.
    let last_level = |root: usize, visited: &[bool]| -> (usize, Vec<usize>) {
        let mut seen = visited.to_vec();
        seen[root] = true;
        let mut level = vec![root];
        let mut depth = 0;
        loop {
            let mut next = Vec::new();
            for &v in &level {
                for w in neighbours(v) {
                    if !seen[w] {
                        seen[w] = true;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return (depth, level);
            }
            depth += 1;
            level = next;
        }
    };

    while order.len() < n {
        let start = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i))
            .expect("unvisited vertex exists");
        // Pseudo-peripheral root.
        let mut root = start;
        let (mut ecc, mut level) = last_level(root, &visited);
        for _ in 0..8 {
            let cand = *level.iter().min_by_key(|&&v| (degree[v], v)).expect("non-empty level");
            let (e, l) = last_level(cand, &visited);
            if e > ecc {
                root = cand;
                ecc = e;
                level = l;
            } else {
                break;
            }
        }
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = neighbours(v).filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Envelope (skyline) Cholesky factorization `P K P^T = L L^T` under a
/// reverse Cuthill-McKee permutation.
#[derive(Debug, Clone)]
pub struct SkylineCholesky<T> {
    perm: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    data: Vec<T>,
}

impl<T: Real> SkylineCholesky<T> {
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self> {
        let n = a.order();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new, &old) in perm.iter().enumerate() {
            for &c in a.row(old).0 {
                first[new] = first[new].min(inv[c]);
            }
        }
        let mut offset = Vec::with_capacity(n + 1);
        offset.push(0);
        for i in 0..n {
            offset.push(offset[i] + (i - first[i] + 1));
        }
        let mut data = vec![T::zero(); offset[n]];
        let mut diag_scale = vec![T::zero(); n];
        for (new, &old) in perm.iter().enumerate() {
            let (cols, vals) = a.row(old);
            for (&c, &v) in cols.iter().zip(vals) {
                let j = inv[c];
                if j <= new {
                    data[offset[new] + j - first[new]] = v;
                }
                if j == new {
                    diag_scale[new] = v.abs();
                }
            }
        }
        let tiny = T::epsilon() * T::of(256.0);
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = data[offset[i] + j - fi];
                for k in k0..j {
                    s -= data[offset[i] + k - fi] * data[offset[j] + k - fj];
                }
                data[offset[i] + j - fi] = s / data[offset[j] + j - fj];
            }
            let mut d = data[offset[i] + i - fi];
            for k in fi..i {
                let l = data[offset[i] + k - fi];
                d -= l * l;
            }
            if !(d > tiny * diag_scale[i]) {
                return Err(Error::NotPositiveDefinite {
                    row: perm[i],
                    pivot: d.to_f64_lossy(),
                });
            }
            data[offset[i] + i - fi] = d.sqrt();
        }
        Ok(Self {
            perm,
            first,
            offset,
            data,
        })
    }

    pub fn order(&self) -> usize {
        self.perm.len()
    }

    /// Stored entries of the factor.
    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    #[inline]
    fn l(&self, i: usize, j: usize) -> T {
        self.data[self.offset[i] + j - self.first[i]]
    }

    /// Overwrites `b` with `K^{-1} b`.
    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.order();
        let mut y: Vec<T> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let mut s = y[i];
            for k in self.first[i]..i {
                s -= self.l(i, k) * y[k];
            }
            y[i] = s / self.l(i, i);
        }
        for i in (0..n).rev() {
            y[i] /= self.l(i, i);
            let yi = y[i];
            for k in self.first[i]..i {
                y[k] -= self.l(i, k) * yi;
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = y[new];
        }
    }
}
