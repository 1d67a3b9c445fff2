//! Agreement between a pattern and computed eigenspaces, measured in the
//! mass-matrix inner product after removing the mean.

use nalgebra::{DMatrix, DVector};

use crate::eigen::{cluster_ranges, Spectrum};
use crate::error::{Error, Result};
use crate::fem::m_inner;
use crate::scalar::Real;
use crate::sparse::CsrMatrix;

pub const DEFAULT_CLUSTER_GAP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport {
    pub best_index: usize,
    /// `||P q||_M` for the normalized, centred pattern `q` and the best cluster.
    pub correlation: f64,
    /// `||q - P q||_M` for the best cluster.
    pub projection_residual: f64,
    /// Indices of the best cluster.
    pub eigenspace: Vec<usize>,
    /// The pattern is constant up to rounding; all correlations are zero.
    pub uniform: bool,
    pub clusters: Vec<Vec<usize>>,
    pub cluster_correlations: Vec<f64>,
    /// `|<q, v_i>_M| / ||v_i||_M` per eigenvector.
    pub vector_correlations: Vec<f64>,
}

impl MatchReport {
    /// Correlation with the span of the first `n` clusters.
    pub fn span_correlation(&self, n: usize) -> f64 {
        self.cluster_correlations.iter().take(n).map(|c| c * c).sum::<f64>().sqrt().min(1.0)
    }
}

pub fn match_pattern<T: Real>(
    pattern: &[T],
    spectrum: &Spectrum<T>,
    mass: &CsrMatrix<T>,
    cluster_gap: T,
) -> Result<MatchReport> {
    let n = mass.order();
    if pattern.len() != n {
        return Err(Error::FieldLength {
            name: "pattern".into(),
            found: pattern.len(),
            expected: n,
        });
    }
    if let Some(v) = spectrum.eigenvectors.iter().find(|v| v.len() != n) {
        return Err(Error::FieldLength {
            name: "eigenvector".into(),
            found: v.len(),
            expected: n,
        });
    }
    if spectrum.is_empty() {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }

    let ones = vec![T::one(); n];
    let area = m_inner(mass, &ones, &ones)?.to_f64_lossy();
    let mean = m_inner(mass, pattern, &ones)?.to_f64_lossy() / area;
    let centred: Vec<f64> = pattern.iter().map(|p| p.to_f64_lossy() - mean).collect();
    let mass64: CsrMatrix<f64> = mass.map_scalar();
    let norm = mass_inner(&mass64, &centred, &centred).sqrt();
    let scale = pattern.iter().fold(0.0f64, |m, p| m.max(p.to_f64_lossy().abs())) * area.sqrt();
    let ranges = cluster_ranges(&spectrum.eigenvalues, cluster_gap);
    let clusters: Vec<Vec<usize>> = ranges.iter().map(|r| r.clone().collect()).collect();

    if !(norm > 1e-10 * scale) {
        let best = clusters.iter().position(|c| c.len() == 1 && c[0] != 0).unwrap_or(0);
        return Ok(MatchReport {
            best_index: clusters[best][0],
            correlation: 0.0,
            projection_residual: 0.0,
            eigenspace: clusters[best].clone(),
            uniform: true,
            cluster_correlations: vec![0.0; clusters.len()],
            vector_correlations: vec![0.0; spectrum.len()],
            clusters,
        });
    }
    let q: Vec<f64> = centred.iter().map(|x| x / norm).collect();
    let vectors: Vec<Vec<f64>> = spectrum
        .eigenvectors
        .iter()
        .map(|v| v.iter().map(|x| x.to_f64_lossy()).collect())
        .collect();
    let mq = mass64.mul_vec(&q);
    let coeffs: Vec<f64> = vectors.iter().map(|v| crate::scalar::dot(v, &mq)).collect();
    let vector_correlations: Vec<f64> = vectors
        .iter()
        .zip(&coeffs)
        .map(|(v, c)| c.abs() / mass_inner(&mass64, v, v).sqrt())
        .collect();

    let mut best = (0usize, f64::NEG_INFINITY, 0.0);
    let mut cluster_correlations = Vec::with_capacity(clusters.len());
    for (ci, members) in clusters.iter().enumerate() {
        let k = members.len();
        let gram = DMatrix::from_fn(k, k, |a, b| mass_inner(&mass64, &vectors[members[a]], &vectors[members[b]]));
        let rhs = DVector::from_iterator(k, members.iter().map(|&i| coeffs[i]));
        let x = gram
            .cholesky()
            .ok_or_else(|| Error::InvalidArgument(format!("eigenvectors of cluster {ci} are linearly dependent")))?
            .solve(&rhs);
        let mut residual = q.clone();
        for (a, &i) in members.iter().enumerate() {
            crate::scalar::axpy(-x[a], &vectors[i], &mut residual);
        }
        let res = mass_inner(&mass64, &residual, &residual).sqrt();
        let corr = x.dot(&rhs).max(0.0).sqrt().min(1.0);
        cluster_correlations.push(corr);
        if corr > best.1 {
            best = (ci, corr, res);
        }
    }
    let eigenspace = clusters[best.0].clone();
    let best_index = *eigenspace
        .iter()
        .max_by(|&&a, &&b| vector_correlations[a].total_cmp(&vector_correlations[b]))
        .expect("clusters are non-empty");
    Ok(MatchReport {
        best_index,
        correlation: best.1,
        projection_residual: best.2,
        eigenspace,
        uniform: false,
        clusters,
        cluster_correlations,
        vector_correlations,
    })
}

fn mass_inner(mass: &CsrMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    crate::scalar::dot(u, &mass.mul_vec(v))
}
