//! OFF input and VTK legacy (3.0, ASCII, `UNSTRUCTURED_GRID`) input/output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Mesh, MeshKind};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Named per-vertex scalar field.
pub type NamedField<'a, T> = (&'a str, &'a [T]);

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Numbered, comment-stripped, non-empty lines.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_num<V: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<V> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from `{tok}`")))
}

/// Parses an ASCII OFF triangle mesh. `#` starts a comment anywhere on a line.
pub fn parse_off<T: Real>(text: &str) -> Result<Mesh<T>> {
    let mut lines = content_lines(text).peekable();
    let (first_line, first) = lines.next().ok_or_else(|| parse_err(1, "empty OFF file"))?;
    let header_rest = if let Some(rest) = first.strip_prefix("OFF") {
        rest.trim()
    } else {
        return Err(parse_err(first_line, "missing OFF header"));
    };
    let (count_line, counts) = if header_rest.is_empty() {
        lines.next().ok_or_else(|| parse_err(first_line, "missing element counts"))?
    } else {
        (first_line, header_rest)
    };
    let toks: Vec<&str> = counts.split_whitespace().collect();
    if toks.len() < 2 {
        return Err(parse_err(count_line, "expected `n_vertices n_faces [n_edges]`"));
    }
    let nv: usize = parse_num(toks[0], count_line, "vertex count")?;
    let nf: usize = parse_num(toks[1], count_line, "face count")?;

    let mut vertices = Vec::with_capacity(nv);
    for k in 0..nv {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(count_line, format!("expected {nv} vertices, found {k}")))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(parse_err(ln, "vertex needs three coordinates"));
        }
        let mut p = [T::zero(); 3];
        for c in 0..3 {
            p[c] = parse_num(toks[c], ln, "coordinate")?;
        }
        vertices.push(p);
    }
    let mut cells = Vec::with_capacity(3 * nf);
    for k in 0..nf {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(count_line, format!("expected {nf} faces, found {k}")))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        let n: usize = parse_num(toks[0], ln, "face size")?;
        if n != 3 {
            return Err(parse_err(ln, format!("only triangles are supported, face has {n} vertices")));
        }
        if toks.len() < 4 {
            return Err(parse_err(ln, "triangle needs three vertex indices"));
        }
        for tok in &toks[1..4] {
            let i: usize = parse_num(tok, ln, "vertex index")?;
            if i >= nv {
                return Err(parse_err(ln, format!("vertex index {i} out of range (n = {nv})")));
            }
            cells.push(i);
        }
    }
    Mesh::new(MeshKind::Surface, 2, 3, vertices, cells)
}

pub fn read_off<T: Real>(path: impl AsRef<Path>) -> Result<Mesh<T>> {
    parse_off(&fs::read_to_string(path)?)
}

fn vtk_cell_type(intrinsic_dim: usize) -> u8 {
    match intrinsic_dim {
        1 => 3,
        2 => 5,
        _ => 10,
    }
}

/// Renders a VTK legacy ASCII document. Floats use the shortest round-trip
/// representation, so reading the output back reproduces the values exactly.
pub fn format_vtk<T: Real>(mesh: &Mesh<T>, fields: &[NamedField<'_, T>], title: &str) -> Result<String> {
    for (name, values) in fields {
        if values.len() != mesh.n_vertices() {
            return Err(Error::FieldLength {
                name: name.to_string(),
                found: values.len(),
                expected: mesh.n_vertices(),
            });
        }
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!("invalid VTK field name `{name}`")));
        }
    }
    let ty = T::vtk_type_name();
    let title = title.replace('\n', " ");
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{title}");
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} {ty}", mesh.n_vertices());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
    }
    let k = mesh.nodes_per_cell();
    let _ = writeln!(s, "CELLS {} {}", mesh.n_cells(), mesh.n_cells() * (k + 1));
    for cell in mesh.cells() {
        let _ = write!(s, "{k}");
        for i in cell {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_TYPES {}", mesh.n_cells());
    let ct = vtk_cell_type(mesh.intrinsic_dim());
    for _ in 0..mesh.n_cells() {
        let _ = writeln!(s, "{ct}");
    }
    if !fields.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", mesh.n_vertices());
        for (name, values) in fields {
            let _ = writeln!(s, "SCALARS {name} {ty} 1");
            let _ = writeln!(s, "LOOKUP_TABLE default");
            for v in values.iter() {
                let _ = writeln!(s, "{v}");
            }
        }
    }
    Ok(s)
}

/// Writes a VTK file. Nothing is written if any field has the wrong length.
pub fn write_vtk<T: Real>(
    mesh: &Mesh<T>,
    fields: &[NamedField<'_, T>],
    title: &str,
    path: impl AsRef<Path>,
) -> Result<()> {
    let text = format_vtk(mesh, fields, title)?;
    fs::write(path, text)?;
    Ok(())
}

/// Mesh and point fields read back from a VTK legacy file.
#[derive(Debug, Clone)]
pub struct VtkData<T> {
    pub title: String,
    pub mesh: Mesh<T>,
    pub fields: Vec<(String, Vec<T>)>,
}

impl<T> VtkData<T> {
    pub fn field(&self, name: &str) -> Option<&[T]> {
        self.fields
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }
}

/// Parses the subset of VTK legacy ASCII produced by [`format_vtk`]. Surface
/// triangles are recognised by a non-zero z coordinate somewhere in the mesh.
fn take<'t>(toks: &mut impl Iterator<Item = (usize, &'t str)>, eof: usize, what: &str) -> Result<(usize, &'t str)> {
    toks.next()
        .ok_or_else(|| parse_err(eof, format!("unexpected end of file, expected {what}")))
}

pub fn parse_vtk<T: Real>(text: &str) -> Result<VtkData<T>> {
    let raw: Vec<&str> = text.lines().collect();
    if raw.len() < 4 || !raw[0].starts_with("# vtk DataFile") {
        return Err(parse_err(1, "missing VTK header"));
    }
    let title = raw[1].to_string();
    if raw[2].trim() != "ASCII" {
        return Err(parse_err(3, "only ASCII VTK files are supported"));
    }
    // Token stream with line numbers, after the three header lines.
    let mut toks = raw
        .iter()
        .enumerate()
        .skip(3)
        .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));
    let eof = raw.len();
    let expect = |got: (usize, &str), want: &str| {
        if got.1 == want {
            Ok(())
        } else {
            Err(parse_err(got.0, format!("expected `{want}`, found `{}`", got.1)))
        }
    };
    expect(take(&mut toks, eof, "DATASET")?, "DATASET")?;
    expect(take(&mut toks, eof, "UNSTRUCTURED_GRID")?, "UNSTRUCTURED_GRID")?;
    expect(take(&mut toks, eof, "POINTS")?, "POINTS")?;
    let (ln, t) = take(&mut toks, eof, "point count")?;
    let np: usize = parse_num(t, ln, "point count")?;
    take(&mut toks, eof, "point type")?;
    let mut vertices = Vec::with_capacity(np);
    for _ in 0..np {
        let mut p = [T::zero(); 3];
        for c in p.iter_mut() {
            let (ln, t) = take(&mut toks, eof, "coordinate")?;
            *c = parse_num(t, ln, "coordinate")?;
        }
        vertices.push(p);
    }
    expect(take(&mut toks, eof, "CELLS")?, "CELLS")?;
    let (ln, t) = take(&mut toks, eof, "cell count")?;
    let nc: usize = parse_num(t, ln, "cell count")?;
    take(&mut toks, eof, "cell list size")?;
    let mut cells = Vec::new();
    let mut k_all = None;
    for _ in 0..nc {
        let (ln, t) = take(&mut toks, eof, "cell size")?;
        let k: usize = parse_num(t, ln, "cell size")?;
        if !(2..=4).contains(&k) || k_all.is_some_and(|k0| k0 != k) {
            return Err(parse_err(ln, "cells must be simplices of a single dimension"));
        }
        k_all = Some(k);
        for _ in 0..k {
            let (ln, t) = take(&mut toks, eof, "vertex index")?;
            cells.push(parse_num::<usize>(t, ln, "vertex index")?);
        }
    }
    expect(take(&mut toks, eof, "CELL_TYPES")?, "CELL_TYPES")?;
    take(&mut toks, eof, "cell type count")?;
    for _ in 0..nc {
        take(&mut toks, eof, "cell type")?;
    }
    let k = k_all.ok_or_else(|| parse_err(ln, "no cells"))?;
    let dim = k - 1;
    let max_abs = |c: usize| vertices.iter().map(|p| p[c].abs()).fold(T::zero(), T::max);
    let (kind, emb) = match dim {
        3 => (MeshKind::Volumetric, 3),
        2 if max_abs(2) > T::zero() => (MeshKind::Surface, 3),
        2 => (MeshKind::Planar, 2),
        _ => {
            if max_abs(1) > T::zero() || max_abs(2) > T::zero() {
                return Err(parse_err(ln, "curves embedded in 2D/3D are not supported"));
            }
            (MeshKind::Planar, 1)
        }
    };
    let mesh = Mesh::new(kind, dim, emb, vertices, cells)?;

    let mut fields = Vec::new();
    if let Some((ln, t)) = toks.next() {
        expect((ln, t), "POINT_DATA")?;
        let (ln, t) = take(&mut toks, eof, "point data count")?;
        let n: usize = parse_num(t, ln, "point data count")?;
        if n != np {
            return Err(parse_err(ln, format!("POINT_DATA {n} does not match {np} points")));
        }
        while let Some((ln, t)) = toks.next() {
            expect((ln, t), "SCALARS")?;
            let (_, name) = take(&mut toks, eof, "field name")?;
            take(&mut toks, eof, "field type")?;
            let (ln, t) = take(&mut toks, eof, "component count")?;
            if t != "1" {
                return Err(parse_err(ln, "only single-component scalars are supported"));
            }
            expect(take(&mut toks, eof, "LOOKUP_TABLE")?, "LOOKUP_TABLE")?;
            take(&mut toks, eof, "lookup table name")?;
            let mut values = Vec::with_capacity(np);
            for _ in 0..np {
                let (ln, t) = take(&mut toks, eof, "field value")?;
                values.push(parse_num(t, ln, "field value")?);
            }
            fields.push((name.to_string(), values));
        }
    }
    Ok(VtkData { title, mesh, fields })
}

pub fn read_vtk<T: Real>(path: impl AsRef<Path>) -> Result<VtkData<T>> {
    parse_vtk(&fs::read_to_string(path)?)
}
