//! Text formats: meshes, sphere triangulations, OFF surfaces and
//! line-delimited JSON records.

use std::io::{BufRead, Write};

use serde::Serialize;

use crate::complex::{SphereTriangulation, TetMesh, Tri};
use crate::error::FormatError;
use crate::geom::{Point, Tolerance};

pub const RECORDS_HEADER: &str = "#wcmesh-records v1";

/// Unvalidated contents of a mesh file: coordinates plus cells, with every
/// index checked against the vertex count.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshFile {
    pub dim: usize,
    pub vertices: Vec<Point>,
    pub cells: Vec<Vec<usize>>,
}

impl MeshFile {
    pub fn into_mesh(self, tol: &Tolerance) -> Result<TetMesh, FormatError> {
        if self.dim != 3 {
            return Err(FormatError::Parse {
                line: 1,
                msg: format!("tetrahedral mesh needs dim 3, got {}", self.dim),
            });
        }
        let tets = self.cells.iter().map(|c| [c[0], c[1], c[2], c[3]]).collect();
        Ok(TetMesh::new(self.vertices, tets, tol)?)
    }
}

impl From<&TetMesh> for MeshFile {
    fn from(m: &TetMesh) -> Self {
        Self {
            dim: 3,
            vertices: m.vertices().to_vec(),
            cells: m.tets().iter().map(|t| t.to_vec()).collect(),
        }
    }
}

/// Non-empty lines with `#` comments stripped, paired with 1-based numbers.
struct Lines<R> {
    inner: std::iter::Enumerate<std::io::Lines<R>>,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Self {
            inner: r.lines().enumerate(),
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<String>), FormatError> {
        for (i, line) in self.inner.by_ref() {
            let line = line?;
            let body = line.split('#').next().unwrap_or("");
            let toks: Vec<String> = body.split_whitespace().map(str::to_string).collect();
            if !toks.is_empty() {
                return Ok((i + 1, toks));
            }
        }
        Err(FormatError::Truncated(what.to_string()))
    }

    fn expect_end(&mut self) -> Result<(), FormatError> {
        match self.next("") {
            Ok((line, _)) => Err(FormatError::Parse {
                line,
                msg: "unexpected trailing data".into(),
            }),
            Err(FormatError::Truncated(_)) => Ok(()),
            Err(e) => Err(e),
        }
    }
}

fn parse<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T, FormatError>
where
    T::Err: std::fmt::Display,
{
    tok.parse::<T>().map_err(|e| FormatError::Parse {
        line,
        msg: format!("{tok:?}: {e}"),
    })
}

fn arity(toks: &[String], n: usize, line: usize, what: &str) -> Result<(), FormatError> {
    if toks.len() != n {
        return Err(FormatError::Parse {
            line,
            msg: format!("{what}: expected {n} fields, got {}", toks.len()),
        });
    }
    Ok(())
}

/// Reads `dim nv nc`, then `nv` coordinate lines and `nc` lines of
/// `dim + 1` vertex indices.
pub fn read_mesh_file<R: BufRead>(r: R) -> Result<MeshFile, FormatError> {
    let mut lines = Lines::new(r);
    let (ln, h) = lines.next("header")?;
    arity(&h, 3, ln, "header")?;
    let dim: usize = parse(&h[0], ln)?;
    let nv: usize = parse(&h[1], ln)?;
    let nc: usize = parse(&h[2], ln)?;
    if dim == 0 {
        return Err(FormatError::Parse {
            line: ln,
            msg: "dimension must be positive".into(),
        });
    }
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, t) = lines.next("vertex")?;
        arity(&t, dim, ln, "vertex")?;
        let c: Vec<f64> = t.iter().map(|x| parse(x, ln)).collect::<Result<_, _>>()?;
        let p = Point::new(c).map_err(|e| FormatError::Parse {
            line: ln,
            msg: e.to_string(),
        })?;
        vertices.push(p);
    }
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, t) = lines.next("cell")?;
        arity(&t, dim + 1, ln, "cell")?;
        let c: Vec<usize> = t.iter().map(|x| parse(x, ln)).collect::<Result<_, _>>()?;
        if let Some(&bad) = c.iter().find(|&&i| i >= nv) {
            return Err(FormatError::Parse {
                line: ln,
                msg: format!("vertex index {bad} out of range (nv = {nv})"),
            });
        }
        cells.push(c);
    }
    lines.expect_end()?;
    Ok(MeshFile {
        dim,
        vertices,
        cells,
    })
}

pub fn read_mesh<R: BufRead>(r: R, tol: &Tolerance) -> Result<TetMesh, FormatError> {
    read_mesh_file(r)?.into_mesh(tol)
}

/// Coordinates use the shortest decimal that round-trips exactly.
pub fn write_mesh_file<W: Write>(m: &MeshFile, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{} {} {}", m.dim, m.vertices.len(), m.cells.len())?;
    for v in &m.vertices {
        let c: Vec<String> = v.coords().iter().map(|x| format!("{x:?}")).collect();
        writeln!(w, "{}", c.join(" "))?;
    }
    for c in &m.cells {
        let c: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        writeln!(w, "{}", c.join(" "))?;
    }
    Ok(())
}

pub fn write_mesh<W: Write>(m: &TetMesh, w: W) -> std::io::Result<()> {
    write_mesh_file(&MeshFile::from(m), w)
}

pub fn mesh_to_string(m: &TetMesh) -> String {
    let mut buf = Vec::new();
    write_mesh(m, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

/// Reads `m t` followed by `t` triangles.
pub fn read_link<R: BufRead>(r: R) -> Result<SphereTriangulation, FormatError> {
    let mut lines = Lines::new(r);
    let (ln, h) = lines.next("header")?;
    arity(&h, 2, ln, "header")?;
    let m: usize = parse(&h[0], ln)?;
    let t: usize = parse(&h[1], ln)?;
    let mut tris: Vec<Tri> = Vec::with_capacity(t);
    for _ in 0..t {
        let (ln, f) = lines.next("triangle")?;
        arity(&f, 3, ln, "triangle")?;
        tris.push([parse(&f[0], ln)?, parse(&f[1], ln)?, parse(&f[2], ln)?]);
    }
    lines.expect_end()?;
    Ok(SphereTriangulation::new(m, tris)?)
}

pub fn write_link<W: Write>(l: &SphereTriangulation, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{} {}", l.num_vertices(), l.triangles().len())?;
    for t in l.triangles() {
        writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

pub fn link_to_string(l: &SphereTriangulation) -> String {
    let mut buf = Vec::new();
    write_link(l, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

/// Triangulated surface from an OFF file. Only triangular faces are accepted.
#[derive(Clone, Debug, PartialEq)]
pub struct OffSurface {
    pub points: Vec<Point>,
    pub triangulation: SphereTriangulation,
}

pub fn read_off<R: BufRead>(r: R) -> Result<OffSurface, FormatError> {
    let mut lines = Lines::new(r);
    let (ln, h) = lines.next("OFF header")?;
    let mut rest: &[String] = &h;
    if h[0] != "OFF" {
        return Err(FormatError::Parse {
            line: ln,
            msg: "expected OFF".into(),
        });
    }
    rest = &rest[1..];
    let (ln, counts) = if rest.is_empty() {
        lines.next("counts")?
    } else {
        (ln, rest.to_vec())
    };
    arity(&counts, 3, ln, "counts")?;
    let nv: usize = parse(&counts[0], ln)?;
    let nf: usize = parse(&counts[1], ln)?;
    let mut points = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, t) = lines.next("vertex")?;
        arity(&t, 3, ln, "vertex")?;
        let c: Vec<f64> = t.iter().map(|x| parse(x, ln)).collect::<Result<_, _>>()?;
        points.push(Point::new(c).map_err(|e| FormatError::Parse {
            line: ln,
            msg: e.to_string(),
        })?);
    }
    let mut tris = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, t) = lines.next("face")?;
        if t.first().map(String::as_str) != Some("3") {
            return Err(FormatError::Parse {
                line: ln,
                msg: "only triangular faces are supported".into(),
            });
        }
        if t.len() < 4 {
            return Err(FormatError::Parse {
                line: ln,
                msg: "face: expected 3 indices".into(),
            });
        }
        tris.push([parse(&t[1], ln)?, parse(&t[2], ln)?, parse(&t[3], ln)?]);
    }
    Ok(OffSurface {
        triangulation: SphereTriangulation::new(points.len(), tris)?,
        points,
    })
}

/// Serializes one record as a single JSON line.
pub fn record_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("records are plain data")
}
