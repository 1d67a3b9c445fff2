//! Simplicial meshes: intervals, planar triangulations, tetrahedral volumes and
//! triangulated surfaces embedded in three dimensions.

mod generate;
pub mod io;
pub mod presets;

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use generate::{
    generate_ball, generate_disk, generate_icosphere, generate_interval, generate_rectangle,
    generate_tube,
};

/// Geometric flavour of a mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeshKind {
    /// Flat domain whose intrinsic dimension equals its embedding dimension (1 or 2).
    Planar,
    /// Tetrahedral volume in three dimensions.
    Volumetric,
    /// Triangulated two-dimensional surface in three dimensions.
    Surface,
}

/// Relative threshold below which a cell is considered degenerate.
pub const DEGENERACY_RATIO: f64 = 1e-12;

/// Immutable simplicial mesh.
///
/// Vertex coordinates are always stored as 3-tuples; components beyond the
/// embedding dimension are zero. Cells are stored flat with
/// `intrinsic_dim + 1` vertex indices each.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh<T> {
    vertices: Vec<[T; 3]>,
    cells: Vec<usize>,
    intrinsic_dim: usize,
    embedding_dim: usize,
    kind: MeshKind,
}

impl<T: Real> Mesh<T> {
    /// Builds a mesh and checks every structural invariant.
    pub fn new(
        kind: MeshKind,
        intrinsic_dim: usize,
        embedding_dim: usize,
        vertices: Vec<[T; 3]>,
        cells: Vec<usize>,
    ) -> Result<Self> {
        let mesh = Self {
            vertices,
            cells,
            intrinsic_dim,
            embedding_dim,
            kind,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    fn validate(&self) -> Result<()> {
        let (d, e) = (self.intrinsic_dim, self.embedding_dim);
        if !(1..=3).contains(&d) || !(1..=3).contains(&e) || d > e {
            return Err(Error::InvalidMesh(format!(
                "unsupported dimensions: intrinsic {d}, embedding {e}"
            )));
        }
        let kind_ok = match self.kind {
            MeshKind::Planar => d == e && d <= 2,
            MeshKind::Volumetric => d == 3 && e == 3,
            MeshKind::Surface => d == 2 && e == 3,
        };
        if !kind_ok {
            return Err(Error::InvalidMesh(format!(
                "{:?} mesh cannot have intrinsic dimension {d} in embedding dimension {e}",
                self.kind
            )));
        }
        if self.vertices.is_empty() {
            return Err(Error::InvalidMesh("mesh has no vertices".into()));
        }
        if self.cells.is_empty() || self.cells.len() % (d + 1) != 0 {
            return Err(Error::InvalidMesh(format!(
                "cell array of length {} is not a non-empty multiple of {}",
                self.cells.len(),
                d + 1
            )));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidMesh(format!("vertex {i} has non-finite coordinates")));
            }
            if v[e..].iter().any(|c| *c != T::zero()) {
                return Err(Error::InvalidMesh(format!(
                    "vertex {i} has non-zero coordinates beyond embedding dimension {e}"
                )));
            }
        }
        let nv = self.vertices.len();
        for (c, cell) in self.cells().enumerate() {
            if let Some(&bad) = cell.iter().find(|&&i| i >= nv) {
                return Err(Error::InvalidMesh(format!(
                    "cell {c} references vertex {bad} but mesh has {nv} vertices"
                )));
            }
        }
        self.check_degeneracy()?;
        if self.kind == MeshKind::Surface {
            self.check_manifold()?;
        }
        Ok(())
    }

    fn check_degeneracy(&self) -> Result<()> {
        let measures: Vec<T> = (0..self.n_cells()).map(|c| self.cell_measure(c)).collect();
        let mean = measures.iter().copied().sum::<T>() / T::of_usize(measures.len());
        let threshold = mean * T::of(DEGENERACY_RATIO);
        for (cell, &m) in measures.iter().enumerate() {
            if !(m > threshold) {
                return Err(Error::DegenerateCell {
                    cell,
                    measure: m.to_f64_lossy(),
                    threshold: threshold.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }

    /// Each edge is shared by at most two triangles and every directed edge
    /// occurs at most once (consistent orientation).
    fn check_manifold(&self) -> Result<()> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (c, t) in self.cells().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if a == b {
                    return Err(Error::InvalidMesh(format!("triangle {c} repeats vertex {a}")));
                }
                if let Some(prev) = directed.insert((a, b), c) {
                    return Err(Error::InvalidMesh(format!(
                        "directed edge ({a},{b}) used by triangles {prev} and {c}: \
                         non-manifold or inconsistently oriented"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> MeshKind {
        self.kind
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.intrinsic_dim
    }

    pub fn embedding_dim(&self) -> usize {
        self.embedding_dim
    }

    pub fn vertices(&self) -> &[[T; 3]] {
        &self.vertices
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn nodes_per_cell(&self) -> usize {
        self.intrinsic_dim + 1
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len() / self.nodes_per_cell()
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let k = self.nodes_per_cell();
        &self.cells[c * k..(c + 1) * k]
    }

    pub fn cells(&self) -> std::slice::ChunksExact<'_, usize> {
        self.cells.chunks_exact(self.nodes_per_cell())
    }

    /// Flat connectivity array.
    pub fn connectivity(&self) -> &[usize] {
        &self.cells
    }

    /// Length, area or volume of cell `c`.
    pub fn cell_measure(&self, c: usize) -> T {
        simplex_measure(&self.cell_points(c))
    }

    pub fn cell_points(&self, c: usize) -> Vec<[T; 3]> {
        self.cell(c).iter().map(|&i| self.vertices[i]).collect()
    }

    /// Sum of all cell measures, accumulated in cell order.
    pub fn total_measure(&self) -> T {
        (0..self.n_cells()).map(|c| self.cell_measure(c)).sum()
    }

    /// Facets (sub-simplices of dimension `intrinsic_dim - 1`) belonging to exactly
    /// one cell, with sorted vertex indices, in ascending order.
    pub fn boundary_facets(&self) -> Vec<Vec<usize>> {
        let k = self.nodes_per_cell();
        let mut count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for cell in self.cells() {
            for skip in 0..k {
                let mut facet: Vec<usize> = (0..k).filter(|&j| j != skip).map(|j| cell[j]).collect();
                facet.sort_unstable();
                *count.entry(facet).or_insert(0) += 1;
            }
        }
        count.into_iter().filter(|(_, n)| *n == 1).map(|(f, _)| f).collect()
    }

    /// Distinct edges as sorted vertex pairs, in ascending order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let k = self.nodes_per_cell();
        let mut edges = Vec::with_capacity(self.n_cells() * k * (k - 1) / 2);
        for cell in self.cells() {
            for a in 0..k {
                for b in a + 1..k {
                    let (i, j) = (cell[a], cell[b]);
                    edges.push((i.min(j), i.max(j)));
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Vertices lying on some boundary facet.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut on = vec![false; self.n_vertices()];
        for f in self.boundary_facets() {
            for i in f {
                on[i] = true;
            }
        }
        on
    }

    /// `V - E + F` for a two-dimensional mesh.
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.n_vertices() as i64;
        let e = self.edges().len() as i64;
        let f = self.n_cells() as i64;
        match self.intrinsic_dim {
            1 => v - f,
            2 => v - e + f,
            _ => {
                let faces = self.faces_count() as i64;
                v - e + faces - f
            }
        }
    }

    fn faces_count(&self) -> usize {
        let mut faces: Vec<[usize; 3]> = Vec::new();
        for cell in self.cells() {
            for skip in 0..4 {
                let mut f = [0; 3];
                let mut n = 0;
                for (j, &v) in cell.iter().enumerate() {
                    if j != skip {
                        f[n] = v;
                        n += 1;
                    }
                }
                f.sort_unstable();
                faces.push(f);
            }
        }
        faces.sort_unstable();
        faces.dedup();
        faces.len()
    }

    /// Number of connected components of the boundary of a two-dimensional mesh.
    pub fn boundary_loop_count(&self) -> usize {
        let facets = self.boundary_facets();
        let mut parent: HashMap<usize, usize> = HashMap::new();
        fn find(p: &mut HashMap<usize, usize>, x: usize) -> usize {
            let mut r = x;
            while let Some(&q) = p.get(&r) {
                if q == r {
                    break;
                }
                r = q;
            }
            p.insert(x, r);
            r
        }
        for f in &facets {
            for &v in f {
                parent.entry(v).or_insert(v);
            }
        }
        for f in &facets {
            for w in f.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                if a != b {
                    parent.insert(a.max(b), a.min(b));
                }
            }
        }
        let keys: Vec<usize> = parent.keys().copied().collect();
        let mut roots: Vec<usize> = keys.into_iter().map(|k| find(&mut parent, k)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Boundary of a volumetric mesh as a surface mesh (outward orientation is not
    /// guaranteed; vertex indices refer to the compacted vertex set).
    pub fn boundary_surface(&self) -> Result<Mesh<T>> {
        if self.kind != MeshKind::Volumetric {
            return Err(Error::InvalidArgument("boundary_surface needs a volumetric mesh".into()));
        }
        // Orient each boundary face so its normal points away from the opposite vertex.
        let mut count: HashMap<[usize; 3], (usize, [usize; 3])> = HashMap::new();
        for cell in self.cells() {
            for skip in 0..4 {
                let mut f = [0usize; 3];
                let mut n = 0;
                for (j, &v) in cell.iter().enumerate() {
                    if j != skip {
                        f[n] = v;
                        n += 1;
                    }
                }
                let opp = cell[skip];
                let p = |i: usize| self.vertices[i];
                let normal = cross(sub(p(f[1]), p(f[0])), sub(p(f[2]), p(f[0])));
                let oriented = if dot3(normal, sub(p(opp), p(f[0]))) > T::zero() {
                    [f[0], f[2], f[1]]
                } else {
                    f
                };
                let mut key = f;
                key.sort_unstable();
                count.entry(key).and_modify(|e| e.0 += 1).or_insert((1, oriented));
            }
        }
        let mut faces: Vec<([usize; 3], [usize; 3])> = count
            .into_iter()
            .filter(|(_, (n, _))| *n == 1)
            .map(|(k, (_, o))| (k, o))
            .collect();
        faces.sort_unstable();
        let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
        for (k, _) in &faces {
            for &v in k {
                remap.insert(v, 0);
            }
        }
        for (new, (_, slot)) in remap.iter_mut().enumerate() {
            *slot = new;
        }
        let vertices = remap.keys().map(|&v| self.vertices[v]).collect();
        let cells = faces.iter().flat_map(|(_, o)| o.iter().map(|v| remap[v])).collect();
        Mesh::new(MeshKind::Surface, 2, 3, vertices, cells)
    }

    /// Applies a smooth vertex deformation, keeping connectivity.
    pub fn map_vertices<F>(&self, map: F) -> Result<Mesh<T>>
    where
        F: Fn([T; 3]) -> [T; 3],
    {
        let vertices: Vec<[T; 3]> = self.vertices.iter().map(|&v| map(v)).collect();
        check_injective(&vertices)?;
        Mesh::new(
            self.kind,
            self.intrinsic_dim,
            self.embedding_dim,
            vertices,
            self.cells.clone(),
        )
    }
}

/// Fails when two points coincide within `1e-12` (max-norm).
fn check_injective<T: Real>(points: &[[T; 3]]) -> Result<()> {
    let tol = T::of(1e-12);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a][0]
            .partial_cmp(&points[b][0])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if points[j][0] - points[i][0] > tol {
                break;
            }
            let close = (0..3).all(|c| (points[j][c] - points[i][c]).abs() <= tol);
            if close {
                return Err(Error::NonInjectiveMap {
                    first: i.min(j),
                    second: i.max(j),
                });
            }
        }
    }
    Ok(())
}

pub(crate) fn sub<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot3<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm3<T: Real>(a: [T; 3]) -> T {
    dot3(a, a).sqrt()
}

/// Measure of a simplex given by 2, 3 or 4 points in three dimensions.
pub fn simplex_measure<T: Real>(points: &[[T; 3]]) -> T {
    match points.len() {
        2 => norm3(sub(points[1], points[0])),
        3 => {
            let n = cross(sub(points[1], points[0]), sub(points[2], points[0]));
            norm3(n) * T::of(0.5)
        }
        4 => {
            let e1 = sub(points[1], points[0]);
            let e2 = sub(points[2], points[0]);
            let e3 = sub(points[3], points[0]);
            dot3(e1, cross(e2, e3)).abs() / T::of(6.0)
        }
        n => panic!("simplex with {n} points is not supported"),
    }
}
