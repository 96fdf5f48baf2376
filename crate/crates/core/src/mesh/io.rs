use std::io::{BufRead, Write};

use super::{FaceKind, Mesh, MeshError};

/// Writes the plain-text mesh format:
///
/// ```text
/// vertices N / elements M / faces P
/// x y                 (N lines)
/// v0 v1 v2            (M lines)
/// a b kind            (P lines, kind = interior | boundary | slit)
/// slit ax ay bx by    (optional)
/// ```
pub fn write_text<W: Write>(mesh: &Mesh, mut w: W) -> Result<(), MeshError> {
    writeln!(w, "vertices {} / elements {} / faces {}", mesh.n_vertices(), mesh.n_elements(), mesh.n_faces())?;
    for v in &mesh.vertices {
        writeln!(w, "{:e} {:e}", v[0], v[1])?;
    }
    for el in &mesh.elements {
        writeln!(w, "{} {} {}", el.vertices[0], el.vertices[1], el.vertices[2])?;
    }
    for f in &mesh.faces {
        let kind = match f.kind {
            FaceKind::Interior => "interior",
            FaceKind::Boundary => "boundary",
            FaceKind::Slit => "slit",
        };
        writeln!(w, "{} {} {}", f.vertices[0], f.vertices[1], kind)?;
    }
    for s in &mesh.slits {
        writeln!(w, "slit {:e} {:e} {:e} {:e}", s[0][0], s[0][1], s[1][0], s[1][1])?;
    }
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse { line, message: message.into() }
}

fn numbers<T: std::str::FromStr>(line: &str, n: usize, lineno: usize) -> Result<Vec<T>, MeshError> {
    let out: Vec<T> = line
        .split_whitespace()
        .map(|t| t.parse::<T>().map_err(|_| parse_err(lineno, format!("bad number {t:?}"))))
        .collect::<Result<_, _>>()?;
    if out.len() != n {
        return Err(parse_err(lineno, format!("expected {n} values, found {}", out.len())));
    }
    Ok(out)
}

/// Reads the format produced by [`write_text`]. Connectivity is rebuilt from
/// the element list and checked against the stored face count.
pub fn read_text<R: BufRead>(r: R) -> Result<Mesh, MeshError> {
    let lines: Vec<String> = r.lines().collect::<Result<_, _>>()?;
    let mut it = lines.iter().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = it.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let tokens: Vec<&str> = header.split_whitespace().filter(|t| *t != "/").collect();
    let count = |name: &str| -> Result<usize, MeshError> {
        let p = tokens.iter().position(|t| *t == name).ok_or_else(|| parse_err(hl + 1, format!("missing {name}")))?;
        tokens
            .get(p + 1)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(hl + 1, format!("bad {name} count")))
    };
    let (nv, ne, nf) = (count("vertices")?, count("elements")?, count("faces")?);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (i, l) = it.next().ok_or_else(|| parse_err(lines.len(), "truncated vertex list"))?;
        let v: Vec<f64> = numbers(l, 2, i + 1)?;
        vertices.push([v[0], v[1]]);
    }
    let mut tris = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (i, l) = it.next().ok_or_else(|| parse_err(lines.len(), "truncated element list"))?;
        let v: Vec<usize> = numbers(l, 3, i + 1)?;
        tris.push([v[0], v[1], v[2]]);
    }
    for _ in 0..nf {
        it.next().ok_or_else(|| parse_err(lines.len(), "truncated face list"))?;
    }
    let mut mesh = Mesh::from_triangles(vertices, &tris)?;
    if mesh.n_faces() != nf {
        return Err(parse_err(hl + 1, format!("header declares {nf} faces, connectivity has {}", mesh.n_faces())));
    }
    for (i, l) in it {
        let rest = l
            .trim()
            .strip_prefix("slit")
            .ok_or_else(|| parse_err(i + 1, "unexpected trailing line"))?;
        let v: Vec<f64> = numbers(rest, 4, i + 1)?;
        mesh.add_slit([v[0], v[1]], [v[2], v[3]]);
    }
    Ok(mesh)
}

/// Named per-point scalar for VTK output.
#[derive(Debug, Clone)]
pub struct VtkField<'a> {
    pub name: &'a str,
    pub values: &'a [f64],
}

/// Writes a triangle soup as a legacy ASCII VTK unstructured grid.
pub fn write_vtk<W: Write>(
    mut w: W,
    title: &str,
    points: &[[f64; 2]],
    triangles: &[[usize; 3]],
    fields: &[VtkField<'_>],
) -> Result<(), MeshError> {
    writeln!(w, "# vtk DataFile Version 2.0")?;
    writeln!(w, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", points.len())?;
    for p in points {
        writeln!(w, "{:.12e} {:.12e} 0", p[0], p[1])?;
    }
    writeln!(w, "CELLS {} {}", triangles.len(), 4 * triangles.len())?;
    for t in triangles {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(w, "CELL_TYPES {}", triangles.len())?;
    for _ in triangles {
        writeln!(w, "5")?;
    }
    if !fields.is_empty() {
        writeln!(w, "POINT_DATA {}", points.len())?;
        for f in fields {
            assert_eq!(f.values.len(), points.len(), "field {} has wrong length", f.name);
            writeln!(w, "SCALARS {} double 1", f.name)?;
            writeln!(w, "LOOKUP_TABLE default")?;
            for v in f.values {
                writeln!(w, "{:.12e}", v)?;
            }
        }
    }
    Ok(())
}
