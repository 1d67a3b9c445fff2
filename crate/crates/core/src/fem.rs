//! Piecewise-linear (P1) finite elements on simplices: consistent mass and
//! stiffness matrices, nodal interpolation and the discrete L2 (mass) inner
//! product.
//!
//! On surface meshes the element gradients are taken in the plane of each
//! triangle, which is the tangential gradient of the affine element; the
//! resulting stiffness matrix discretizes the Laplace-Beltrami operator.

use crate::error::{Error, Result};
use crate::mesh::{sub, Mesh};
use crate::scalar::Real;
use crate::sparse::{CsrMatrix, TripletBuilder};

/// Vertex values of a P1 function.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField<T> {
    values: Vec<T>,
}

impl<T: Real> NodalField<T> {
    pub fn new(mesh: &Mesh<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != mesh.n_vertices() {
            return Err(Error::FieldLength {
                name: "nodal field".into(),
                found: values.len(),
                expected: mesh.n_vertices(),
            });
        }
        Ok(Self { values })
    }

    pub fn from_values(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn constant(mesh: &Mesh<T>, value: T) -> Self {
        Self {
            values: vec![value; mesh.n_vertices()],
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

/// Nodal interpolant: `values[i] = f(vertex_i)`.
pub fn interpolate<T: Real, F: Fn([T; 3]) -> T>(f: F, mesh: &Mesh<T>) -> NodalField<T> {
    NodalField {
        values: mesh.vertices().iter().map(|&p| f(p)).collect(),
    }
}

fn check_len<T: Real>(m: &CsrMatrix<T>, x: &[T], what: &str) -> Result<()> {
    if x.len() != m.order() {
        return Err(Error::DimensionMismatch(format!(
            "{what} has length {}, matrix order is {}",
            x.len(),
            m.order()
        )));
    }
    Ok(())
}

/// `u^T M v`
pub fn m_inner<T: Real>(mass: &CsrMatrix<T>, u: &[T], v: &[T]) -> Result<T> {
    check_len(mass, u, "first argument")?;
    check_len(mass, v, "second argument")?;
    Ok(mass.bilinear(u, v))
}

pub fn m_norm<T: Real>(mass: &CsrMatrix<T>, u: &[T]) -> Result<T> {
    Ok(m_inner(mass, u, u)?.max(T::zero()).sqrt())
}

/// Inverse of a symmetric `d x d` Gram matrix (`d <= 3`), row-major, and its determinant.
fn gram_inverse<T: Real>(d: usize, g: &[[T; 3]; 3]) -> ([[T; 3]; 3], T) {
    let mut inv = [[T::zero(); 3]; 3];
    match d {
        1 => {
            inv[0][0] = T::one() / g[0][0];
            (inv, g[0][0])
        }
        2 => {
            let det = g[0][0] * g[1][1] - g[0][1] * g[0][1];
            inv[0][0] = g[1][1] / det;
            inv[1][1] = g[0][0] / det;
            inv[0][1] = -g[0][1] / det;
            inv[1][0] = inv[0][1];
            (inv, det)
        }
        _ => {
            let c00 = g[1][1] * g[2][2] - g[1][2] * g[1][2];
            let c01 = g[0][2] * g[1][2] - g[0][1] * g[2][2];
            let c02 = g[0][1] * g[1][2] - g[0][2] * g[1][1];
            let c11 = g[0][0] * g[2][2] - g[0][2] * g[0][2];
            let c12 = g[0][1] * g[0][2] - g[0][0] * g[1][2];
            let c22 = g[0][0] * g[1][1] - g[0][1] * g[0][1];
            let det = g[0][0] * c00 + g[0][1] * c01 + g[0][2] * c02;
            let cof = [[c00, c01, c02], [c01, c11, c12], [c02, c12, c22]];
            for i in 0..3 {
                for j in 0..3 {
                    inv[i][j] = cof[i][j] / det;
                }
            }
            (inv, det)
        }
    }
}

/// Element stiffness `|K| grad(phi_i) . grad(phi_j)`, exactly symmetric.
fn element_stiffness<T: Real>(points: &[[T; 3]], measure: T) -> [[T; 4]; 4] {
    let d = points.len() - 1;
    let edges: Vec<[T; 3]> = (1..=d).map(|k| sub(points[k], points[0])).collect();
    let mut g = [[T::zero(); 3]; 3];
    for a in 0..d {
        for b in a..d {
            let v = edges[a][0] * edges[b][0] + edges[a][1] * edges[b][1] + edges[a][2] * edges[b][2];
            g[a][b] = v;
            g[b][a] = v;
        }
    }
    let (ginv, _) = gram_inverse(d, &g);
    let mut k = [[T::zero(); 4]; 4];
    for a in 0..d {
        for b in a..d {
            let v = measure * ginv[a][b];
            k[a + 1][b + 1] = v;
            k[b + 1][a + 1] = v;
        }
    }
    let mut corner = T::zero();
    for a in 1..=d {
        let v = -(1..=d).map(|b| k[a][b]).sum::<T>();
        k[0][a] = v;
        k[a][0] = v;
        corner -= v;
    }
    k[0][0] = corner;
    k
}

fn assemble<T: Real, F>(mesh: &Mesh<T>, local: F) -> Result<CsrMatrix<T>>
where
    F: Fn(&[[T; 3]], T) -> [[T; 4]; 4],
{
    let k = mesh.nodes_per_cell();
    let mut builder = TripletBuilder::with_capacity(mesh.n_vertices(), mesh.n_cells() * k * k);
    let mean = mesh.total_measure() / T::of_usize(mesh.n_cells());
    for (c, cell) in mesh.cells().enumerate() {
        let points = mesh.cell_points(c);
        let measure = mesh.cell_measure(c);
        if !(measure > mean * T::of(crate::mesh::DEGENERACY_RATIO)) {
            return Err(Error::DegenerateCell {
                cell: c,
                measure: measure.to_f64_lossy(),
                threshold: (mean * T::of(crate::mesh::DEGENERACY_RATIO)).to_f64_lossy(),
            });
        }
        let m = local(&points, measure);
        for a in 0..k {
            for b in 0..k {
                builder.push(cell[a], cell[b], m[a][b]);
            }
        }
    }
    Ok(builder.build())
}

/// Consistent P1 mass matrix `M_ij = integral of phi_i phi_j`.
pub fn assemble_mass<T: Real>(mesh: &Mesh<T>) -> Result<CsrMatrix<T>> {
    let d = mesh.intrinsic_dim();
    let denom = T::of_usize((d + 1) * (d + 2));
    assemble(mesh, |_, measure| {
        let off = measure / denom;
        let diag = off + off;
        let mut m = [[T::zero(); 4]; 4];
        for (a, row) in m.iter_mut().enumerate().take(d + 1) {
            for (b, v) in row.iter_mut().enumerate().take(d + 1) {
                *v = if a == b { diag } else { off };
            }
        }
        m
    })
}

/// P1 stiffness matrix `A_ij = integral of grad(phi_i) . grad(phi_j)`.
pub fn assemble_stiffness<T: Real>(mesh: &Mesh<T>) -> Result<CsrMatrix<T>> {
    assemble(mesh, element_stiffness)
}
