use std::collections::{BTreeSet, HashMap};

use super::{norm3, Mesh, MeshKind};
use crate::error::{Error, Result};
use crate::scalar::Real;

fn positive<T: Real>(name: &str, x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {x}")))
    }
}

fn count(name: &str, n: usize) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be at least 1")))
    }
}

/// Uniform partition of `[0, length]` into `n_cells` segments.
pub fn generate_interval<T: Real>(length: T, n_cells: usize) -> Result<Mesh<T>> {
    positive("length", length)?;
    count("n_cells", n_cells)?;
    let n = T::of_usize(n_cells);
    let vertices = (0..=n_cells)
        .map(|i| [length * T::of_usize(i) / n, T::zero(), T::zero()])
        .collect();
    let cells = (0..n_cells).flat_map(|i| [i, i + 1]).collect();
    Mesh::new(MeshKind::Planar, 1, 1, vertices, cells)
}

/// Structured `nx` by `ny` grid on `[0, lx] x [0, ly]`, each quad split along
/// its `(i, j) - (i+1, j+1)` diagonal.
pub fn generate_rectangle<T: Real>(lx: T, ly: T, nx: usize, ny: usize) -> Result<Mesh<T>> {
    positive("lx", lx)?;
    positive("ly", ly)?;
    count("nx", nx)?;
    count("ny", ny)?;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([
                lx * T::of_usize(i) / T::of_usize(nx),
                ly * T::of_usize(j) / T::of_usize(ny),
                T::zero(),
            ]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut cells = Vec::with_capacity(6 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            cells.extend_from_slice(&[a, b, c, a, c, d]);
        }
    }
    Mesh::new(MeshKind::Planar, 2, 2, vertices, cells)
}

/// Splits every triangle into four through its edge midpoints. `place` receives
/// the midpoint and whether the edge lies on the boundary, and returns the final
/// position of the new vertex.
fn quadrisect<T: Real, F>(vertices: &mut Vec<[T; 3]>, triangles: &[[usize; 3]], place: F) -> Vec<[usize; 3]>
where
    F: Fn([T; 3], bool) -> [T; 3],
{
    let mut edge_use: HashMap<(usize, usize), usize> = HashMap::new();
    for t in triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *edge_use.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
    let half = T::of(0.5);
    let mut mid = |a: usize, b: usize, vertices: &mut Vec<[T; 3]>| -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&m) = midpoint.get(&key) {
            return m;
        }
        let (p, q) = (vertices[a], vertices[b]);
        let m = [(p[0] + q[0]) * half, (p[1] + q[1]) * half, (p[2] + q[2]) * half];
        vertices.push(place(m, edge_use[&key] == 1));
        let idx = vertices.len() - 1;
        midpoint.insert(key, idx);
        idx
    };
    let mut out = Vec::with_capacity(triangles.len() * 4);
    for &[a, b, c] in triangles {
        let ab = mid(a, b, vertices);
        let bc = mid(b, c, vertices);
        let ca = mid(c, a, vertices);
        out.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
    }
    out
}

fn flatten3(triangles: &[[usize; 3]]) -> Vec<usize> {
    triangles.iter().flatten().copied().collect()
}

fn project_radial<T: Real>(p: [T; 3], radius: T) -> [T; 3] {
    let r = norm3(p);
    [p[0] * radius / r, p[1] * radius / r, p[2] * radius / r]
}

/// Triangulated disk: a hexagonal fan refined by quadrisection, with boundary
/// midpoints projected back onto the circle at every level.
pub fn generate_disk<T: Real>(radius: T, refinement: usize) -> Result<Mesh<T>> {
    positive("radius", radius)?;
    let mut vertices = vec![[T::zero(); 3]];
    for k in 0..6 {
        let a = T::of(std::f64::consts::PI * k as f64 / 3.0);
        vertices.push([radius * a.cos(), radius * a.sin(), T::zero()]);
    }
    let mut triangles: Vec<[usize; 3]> = (0..6).map(|k| [0, 1 + k, 1 + (k + 1) % 6]).collect();
    for _ in 0..refinement {
        triangles = quadrisect(&mut vertices, &triangles, |m, boundary| {
            if boundary {
                let r = (m[0] * m[0] + m[1] * m[1]).sqrt();
                [m[0] * radius / r, m[1] * radius / r, T::zero()]
            } else {
                m
            }
        });
    }
    Mesh::new(MeshKind::Planar, 2, 2, vertices, flatten3(&triangles))
}

fn icosahedron<T: Real>() -> (Vec<[T; 3]>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let vertices = raw
        .iter()
        .map(|p| project_radial([T::of(p[0]), T::of(p[1]), T::of(p[2])], T::one()))
        .collect();
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (vertices, faces)
}

fn icosphere_parts<T: Real>(refinement: usize) -> (Vec<[T; 3]>, Vec<[usize; 3]>) {
    let (mut vertices, mut faces) = icosahedron::<T>();
    for _ in 0..refinement {
        faces = quadrisect(&mut vertices, &faces, |m, _| project_radial(m, T::one()));
    }
    (vertices, faces)
}

/// Unit-sphere surface from a subdivided icosahedron (outward orientation).
pub fn generate_icosphere<T: Real>(refinement: usize) -> Result<Mesh<T>> {
    let (vertices, faces) = icosphere_parts::<T>(refinement);
    Mesh::new(MeshKind::Surface, 2, 3, vertices, flatten3(&faces))
}

/// Red (1:8) refinement of a tetrahedral mesh. Midpoints of edges lying on a
/// boundary face are handed to `project`.
fn refine_tets<T: Real, F>(vertices: &mut Vec<[T; 3]>, tets: &[[usize; 4]], project: F) -> Vec<[usize; 4]>
where
    F: Fn([T; 3]) -> [T; 3],
{
    let mut face_use: HashMap<[usize; 3], usize> = HashMap::new();
    for t in tets {
        for skip in 0..4 {
            let mut f = [0; 3];
            let mut n = 0;
            for (j, &v) in t.iter().enumerate() {
                if j != skip {
                    f[n] = v;
                    n += 1;
                }
            }
            f.sort_unstable();
            *face_use.entry(f).or_insert(0) += 1;
        }
    }
    let mut boundary_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (f, n) in &face_use {
        if *n == 1 {
            boundary_edges.insert((f[0], f[1]));
            boundary_edges.insert((f[0], f[2]));
            boundary_edges.insert((f[1], f[2]));
        }
    }
    let half = T::of(0.5);
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut mid = |a: usize, b: usize, vertices: &mut Vec<[T; 3]>| -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&m) = midpoint.get(&key) {
            return m;
        }
        let (p, q) = (vertices[a], vertices[b]);
        let mut m = [(p[0] + q[0]) * half, (p[1] + q[1]) * half, (p[2] + q[2]) * half];
        if boundary_edges.contains(&key) {
            m = project(m);
        }
        vertices.push(m);
        midpoint.insert(key, vertices.len() - 1);
        vertices.len() - 1
    };
    let dist2 = |vs: &Vec<[T; 3]>, a: usize, b: usize| {
        let d = super::sub(vs[a], vs[b]);
        super::dot3(d, d)
    };
    let mut out = Vec::with_capacity(tets.len() * 8);
    for &[v0, v1, v2, v3] in tets {
        let m01 = mid(v0, v1, vertices);
        let m02 = mid(v0, v2, vertices);
        let m03 = mid(v0, v3, vertices);
        let m12 = mid(v1, v2, vertices);
        let m13 = mid(v1, v3, vertices);
        let m23 = mid(v2, v3, vertices);
        out.push([v0, m01, m02, m03]);
        out.push([m01, v1, m12, m13]);
        out.push([m02, m12, v2, m23]);
        out.push([m03, m13, m23, v3]);
        // Inner octahedron: cut along its shortest diagonal.
        let pairs = [(m01, m23), (m02, m13), (m03, m12)];
        let best = (0..3)
            .min_by(|&a, &b| {
                let da = dist2(vertices, pairs[a].0, pairs[a].1);
                let db = dist2(vertices, pairs[b].0, pairs[b].1);
                da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(1);
        let (p, q) = pairs[best];
        let (a, a2) = pairs[(best + 1) % 3];
        let (b, b2) = pairs[(best + 2) % 3];
        for (x, y) in [(a, b), (b, a2), (a2, b2), (b2, a)] {
            out.push([p, q, x, y]);
        }
    }
    out
}

/// Tetrahedral unit ball: a cone from the origin over a once-refined
/// icosphere, refined 1:8 per level with boundary midpoints projected onto the
/// unit sphere.
pub fn generate_ball<T: Real>(refinement: usize) -> Result<Mesh<T>> {
    let (mut vertices, faces) = icosphere_parts::<T>(1);
    let center = vertices.len();
    vertices.push([T::zero(); 3]);
    let mut tets: Vec<[usize; 4]> = faces.iter().map(|f| [center, f[0], f[1], f[2]]).collect();
    for _ in 0..refinement {
        tets = refine_tets(&mut vertices, &tets, |m| project_radial(m, T::one()));
    }
    let cells = tets.iter().flatten().copied().collect();
    Mesh::new(MeshKind::Volumetric, 3, 3, vertices, cells)
}

/// Cylindrical surface of the given length and radius along the z axis. With
/// `closed_ends`, hemispherical caps are attached at both ends.
pub fn generate_tube<T: Real>(length: T, radius: T, closed_ends: bool, refinement: usize) -> Result<Mesh<T>> {
    positive("length", length)?;
    positive("radius", radius)?;
    let n_theta = 8usize << refinement;
    let pi = std::f64::consts::PI;
    let arc = 2.0 * pi * radius.to_f64_lossy() / n_theta as f64;
    let n_z = ((length.to_f64_lossy() / arc).round() as usize).max(1);

    // Rings as (z, ring radius); `None` radius marks a pole.
    let mut rings: Vec<(T, Option<T>)> = Vec::new();
    let n_cap = (n_theta / 4).max(2);
    if closed_ends {
        rings.push((-radius, None));
        for k in (1..n_cap).rev() {
            let psi = T::of(0.5 * pi * k as f64 / n_cap as f64);
            rings.push((-radius * psi.sin(), Some(radius * psi.cos())));
        }
    }
    for j in 0..=n_z {
        rings.push((length * T::of_usize(j) / T::of_usize(n_z), Some(radius)));
    }
    if closed_ends {
        for k in 1..n_cap {
            let psi = T::of(0.5 * pi * k as f64 / n_cap as f64);
            rings.push((length + radius * psi.sin(), Some(radius * psi.cos())));
        }
        rings.push((length + radius, None));
    }

    let mut vertices = Vec::new();
    let mut ring_start = Vec::with_capacity(rings.len());
    for &(z, r) in &rings {
        ring_start.push(vertices.len());
        match r {
            None => vertices.push([T::zero(), T::zero(), z]),
            Some(r) => {
                for i in 0..n_theta {
                    let a = T::of(2.0 * pi * i as f64 / n_theta as f64);
                    vertices.push([r * a.cos(), r * a.sin(), z]);
                }
            }
        }
    }
    let id = |ring: usize, i: usize| match rings[ring].1 {
        None => ring_start[ring],
        Some(_) => ring_start[ring] + i % n_theta,
    };
    let mut cells = Vec::new();
    for j in 0..rings.len() - 1 {
        for i in 0..n_theta {
            let (a, b, c, d) = (id(j, i), id(j, i + 1), id(j + 1, i + 1), id(j + 1, i));
            if rings[j].1.is_some() {
                cells.extend_from_slice(&[a, b, c]);
            }
            if rings[j + 1].1.is_some() {
                cells.extend_from_slice(&[a, c, d]);
            }
        }
    }
    Mesh::new(MeshKind::Surface, 2, 3, vertices, cells)
}
