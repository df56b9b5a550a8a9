//! Audit of tetrahedral meshes of the unit cube: corner tets, faces split
//! into two right triangles, and triangle-count lower bounds.

use serde::{Deserialize, Serialize};

use crate::complex::{TetMesh, Tri};
use crate::error::AuditError;
use crate::geom::{Point, Tolerance};
use crate::predicates::{is_n_well_centered, Status};

/// Minimum triangles per cube face for 3- and 2-well-centered meshes.
pub const FACE_MIN_3WC: usize = 3;
pub const FACE_MIN_2WC: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeFaceReport {
    /// `"x=0"`, `"y=1"`, ...
    pub face: String,
    pub triangles: usize,
    pub two_right_triangles: bool,
    pub meets_3wc_count: bool,
    pub meets_2wc_count: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeAudit {
    pub num_tets: usize,
    /// Tets with three facets in cube faces.
    pub corner_tets: Vec<usize>,
    pub faces: Vec<CubeFaceReport>,
    /// Tets that are not 3-well-centered.
    pub not_3wc: Vec<usize>,
    pub lower_bound_3wc: usize,
    pub lower_bound_2wc: usize,
    pub below_3wc_bound: bool,
    pub below_2wc_bound: bool,
}

impl CubeAudit {
    pub fn flagged(&self) -> bool {
        !self.corner_tets.is_empty()
            || self.faces.iter().any(|f| f.two_right_triangles)
            || self.below_3wc_bound
    }
}

const FACES: [(usize, f64); 6] = [(0, 0.0), (0, 1.0), (1, 0.0), (1, 1.0), (2, 0.0), (2, 1.0)];

fn face_name(axis: usize, value: f64) -> String {
    format!("{}={}", ["x", "y", "z"][axis], value as u8)
}

fn on_face(p: &Point, axis: usize, value: f64, tol: &Tolerance) -> bool {
    (p.coords()[axis] - value).abs() <= tol.abs
}

fn cube_face_of(mesh: &TetMesh, t: &Tri, tol: &Tolerance) -> Option<usize> {
    FACES
        .iter()
        .position(|&(a, v)| t.iter().all(|&i| on_face(&mesh.vertices()[i], a, v, tol)))
}

/// Right angle at some vertex within the tolerance band.
fn right_angle_at(mesh: &TetMesh, t: &Tri, tol: &Tolerance) -> Option<usize> {
    (0..3).find(|&k| {
        let p = &mesh.vertices()[t[k]];
        let a = mesh.vertices()[t[(k + 1) % 3]].sub(p);
        let b = mesh.vertices()[t[(k + 2) % 3]].sub(p);
        let c = crate::linalg::dot(&a, &b)
            / (crate::linalg::dot(&a, &a).sqrt() * crate::linalg::dot(&b, &b).sqrt());
        c.abs() <= tol.band(1.0)
    })
}

/// Two right triangles sharing their common hypotenuse.
fn two_right_triangles(mesh: &TetMesh, tris: &[Tri], tol: &Tolerance) -> bool {
    if tris.len() != 2 {
        return false;
    }
    let hyp = |t: &Tri| {
        right_angle_at(mesh, t, tol).map(|k| {
            let (a, b) = (t[(k + 1) % 3], t[(k + 2) % 3]);
            (a.min(b), a.max(b))
        })
    };
    match (hyp(&tris[0]), hyp(&tris[1])) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

pub fn cube_audit(mesh: &TetMesh, tol: &Tolerance) -> Result<CubeAudit, AuditError> {
    let not_cube = |m: String| Err(AuditError::NotACube(m));
    for (i, p) in mesh.vertices().iter().enumerate() {
        if p.coords().iter().any(|&c| c < -tol.abs || c > 1.0 + tol.abs) {
            return not_cube(format!("vertex {i} lies outside the unit cube"));
        }
    }
    for corner in 0..8 {
        let c = [(corner & 1) as f64, ((corner >> 1) & 1) as f64, ((corner >> 2) & 1) as f64];
        let found = mesh
            .vertices()
            .iter()
            .any(|p| p.coords().iter().zip(&c).all(|(x, y)| (x - y).abs() <= tol.abs));
        if !found {
            return not_cube(format!("corner {c:?} is not a mesh vertex"));
        }
    }
    let boundary = mesh.boundary_faces();
    let mut per_face: Vec<Vec<Tri>> = vec![Vec::new(); 6];
    for t in &boundary {
        match cube_face_of(mesh, t, tol) {
            Some(f) => per_face[f].push(*t),
            None => return not_cube(format!("boundary triangle {t:?} is not in a cube face")),
        }
    }
    let vol = mesh.volume();
    if (vol - 1.0).abs() > tol.band(1.0) {
        return not_cube(format!("total volume is {vol}"));
    }
    let face_map = mesh.face_map();
    let mut corner_tets = Vec::new();
    for (i, t) in mesh.tets().iter().enumerate() {
        let in_faces = (0..4)
            .filter(|&skip| {
                let mut f = [0; 3];
                let mut k = 0;
                for (q, &v) in t.iter().enumerate() {
                    if q != skip {
                        f[k] = v;
                        k += 1;
                    }
                }
                f.sort_unstable();
                face_map.get(&f).map(Vec::len) == Some(1) && cube_face_of(mesh, &f, tol).is_some()
            })
            .count();
        if in_faces >= 3 {
            corner_tets.push(i);
        }
    }
    let faces: Vec<CubeFaceReport> = FACES
        .iter()
        .zip(&per_face)
        .map(|(&(a, v), tris)| CubeFaceReport {
            face: face_name(a, v),
            triangles: tris.len(),
            two_right_triangles: two_right_triangles(mesh, tris, tol),
            meets_3wc_count: tris.len() >= FACE_MIN_3WC,
            meets_2wc_count: tris.len() >= FACE_MIN_2WC,
        })
        .collect();
    let not_3wc = (0..mesh.num_tets())
        .filter(|&i| {
            is_n_well_centered(&mesh.tet_simplex(i), tol)
                .map(|v| v.status != Status::Satisfied)
                .unwrap_or(true)
        })
        .collect();
    // Each tet meets at most two cube faces in a triangle.
    let lower_bound_3wc = (faces.len() * FACE_MIN_3WC).div_ceil(2);
    let lower_bound_2wc = (faces.len() * FACE_MIN_2WC).div_ceil(2);
    Ok(CubeAudit {
        num_tets: mesh.num_tets(),
        corner_tets,
        faces,
        not_3wc,
        lower_bound_3wc,
        lower_bound_2wc,
        below_3wc_bound: mesh.num_tets() < lower_bound_3wc,
        below_2wc_bound: mesh.num_tets() < lower_bound_2wc,
    })
}

fn cube_vertices() -> Vec<Point> {
    (0..8)
        .map(|c| Point::from([(c & 1) as f64, ((c >> 1) & 1) as f64, ((c >> 2) & 1) as f64]))
        .collect()
}

/// Four corner tets around a central regular tet. Vertex `c` of the cube is
/// `(c & 1, (c >> 1) & 1, (c >> 2) & 1)`.
pub fn five_tet_cube() -> TetMesh {
    let tets = vec![
        [0, 1, 2, 4],
        [3, 1, 2, 7],
        [5, 1, 4, 7],
        [6, 2, 4, 7],
        [1, 2, 4, 7],
    ];
    TetMesh::new(cube_vertices(), tets, &Tolerance::default()).expect("valid cube split")
}

/// Six tets sharing the main diagonal from vertex 0 to vertex 7.
pub fn six_tet_cube() -> TetMesh {
    let paths = [[1, 3], [1, 5], [2, 3], [2, 6], [4, 5], [4, 6]];
    let tets = paths.iter().map(|p| [0, p[0], p[1], 7]).collect();
    TetMesh::new(cube_vertices(), tets, &Tolerance::default()).expect("valid cube split")
}
