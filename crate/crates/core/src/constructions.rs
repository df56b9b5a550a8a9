//! Generators: acute sphere triangulations from stacked k-gons, cones over
//! them, fixture meshes, and local vertex insertions that keep a star
//! well-centered or acute at its center.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::complex::{sorted3, DegreeList, SphereTriangulation, TetMesh, Tri};
use crate::error::ConstructionError;
use crate::geom::{circumcenter, Point, Simplex, Tolerance};
use crate::predicates::{is_completely_well_centered, is_n_well_centered};

/// Stacked out-of-phase regular k-gons between two poles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KgonSpec {
    pub k: usize,
    /// Height of the top ring.
    pub ring_height: f64,
    pub ring_radius: f64,
    pub rings: usize,
}

impl KgonSpec {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            ring_height: 0.352,
            ring_radius: 0.936,
            rings: 2,
        }
    }

    pub fn with_rings(mut self, rings: usize) -> Self {
        self.rings = rings;
        self
    }

    pub fn validate(&self) -> Result<(), ConstructionError> {
        if self.k < 4 {
            return Err(ConstructionError::KTooSmall(self.k));
        }
        if self.rings < 2 {
            return Err(ConstructionError::TooFewRings(self.rings));
        }
        let s = self.ring_radius.powi(2) + self.ring_height.powi(2);
        if (s - 1.0).abs() > 1e-12 {
            return Err(ConstructionError::OffSphere(s));
        }
        Ok(())
    }

    /// Ring heights, top to bottom. Two rings sit at `+-ring_height`; more
    /// rings split the sphere into bands of equal area (evenly spaced z).
    fn heights(&self) -> Vec<f64> {
        let n = self.rings;
        if n == 2 {
            return vec![self.ring_height, -self.ring_height];
        }
        (0..n)
            .map(|j| 1.0 - 2.0 * (j + 1) as f64 / (n + 1) as f64)
            .collect()
    }
}

/// Points on a sphere centered at the origin with a triangulation whose
/// triangles are oriented outward.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereSurface {
    pub points: Vec<Point>,
    pub triangulation: SphereTriangulation,
}

impl SphereSurface {
    /// Reorients triangles outward (positive determinant).
    pub fn new(points: Vec<Point>, triangles: Vec<Tri>) -> Result<Self, ConstructionError> {
        let tris = triangles
            .into_iter()
            .map(|t| {
                if det3(&points[t[0]], &points[t[1]], &points[t[2]]) < 0.0 {
                    [t[0], t[2], t[1]]
                } else {
                    t
                }
            })
            .collect();
        let triangulation = SphereTriangulation::new(points.len(), tris)?;
        Ok(Self {
            points,
            triangulation,
        })
    }

    /// Index of the first triangle that is not acute or whose plane is no
    /// farther than `radius / sqrt(2)` from the origin.
    pub fn first_non_acute(&self) -> Option<usize> {
        self.triangulation.triangles().iter().position(|t| {
            let p = [&self.points[t[0]], &self.points[t[1]], &self.points[t[2]]];
            let acute = (0..3).all(|i| {
                let a = p[(i + 1) % 3].sub(p[i]);
                let b = p[(i + 2) % 3].sub(p[i]);
                crate::linalg::dot(&a, &b) > 0.0
            });
            !acute || plane_distance(p[0], p[1], p[2]) <= p[0].norm() * FRAC_1_SQRT_2
        })
    }
}

fn det3(a: &Point, b: &Point, c: &Point) -> f64 {
    let (a, b, c) = (a.coords(), b.coords(), c.coords());
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Distance from the origin to the plane through three points.
pub fn plane_distance(a: &Point, b: &Point, c: &Point) -> f64 {
    let n = cross(&b.sub(a), &c.sub(a));
    let nn = crate::linalg::dot(&n, &n).sqrt();
    crate::linalg::dot(&n, a.coords()).abs() / nn
}

/// Poles, rings of `k` vertices with alternating phase, pole fans and
/// zigzag bands between consecutive rings. Vertex 0 is the north pole, ring
/// `j` occupies `1 + j*k .. 1 + (j+1)*k`, and the south pole is last.
pub fn kgon_sphere(spec: &KgonSpec) -> Result<SphereSurface, ConstructionError> {
    spec.validate()?;
    let k = spec.k;
    let heights = spec.heights();
    let mut points = vec![Point::from([0.0, 0.0, 1.0])];
    for (j, &z) in heights.iter().enumerate() {
        let r = if spec.rings == 2 {
            spec.ring_radius
        } else {
            (1.0 - z * z).sqrt()
        };
        for i in 0..k {
            let t = (2 * i + j % 2) as f64 * PI / k as f64;
            points.push(Point::from([r * t.cos(), r * t.sin(), z]));
        }
    }
    let south = points.len();
    points.push(Point::from([0.0, 0.0, -1.0]));
    let ring = |j: usize, i: usize| 1 + j * k + i % k;
    let mut tris = Vec::new();
    for i in 0..k {
        tris.push([0, ring(0, i), ring(0, i + 1)]);
        tris.push([south, ring(spec.rings - 1, i + 1), ring(spec.rings - 1, i)]);
    }
    for j in 0..spec.rings - 1 {
        // Merge both rings by angle; consecutive triples are the band triangles.
        let (first, second) = if j % 2 == 0 { (j, j + 1) } else { (j + 1, j) };
        let merged: Vec<usize> = (0..k).flat_map(|i| [ring(first, i), ring(second, i)]).collect();
        for t in 0..2 * k {
            tris.push([merged[t], merged[(t + 1) % (2 * k)], merged[(t + 2) % (2 * k)]]);
        }
    }
    let surface = SphereSurface::new(points, tris)?;
    if let Some(i) = surface.first_non_acute() {
        return Err(ConstructionError::NotAcute(i));
    }
    Ok(surface)
}

/// One tet per surface triangle with the origin as vertex 0; surface vertex
/// `i` becomes mesh vertex `i + 1`.
pub fn cone_to_origin(surface: &SphereSurface, tol: &Tolerance) -> Result<TetMesh, ConstructionError> {
    let expected = surface
        .points
        .first()
        .map(|p| p.norm())
        .ok_or(ConstructionError::Precondition("empty surface".into()))?;
    for (i, p) in surface.points.iter().enumerate() {
        let d = p.norm();
        if (d - expected).abs() > tol.band(expected) {
            return Err(ConstructionError::NotSpherical {
                vertex: i,
                dist: d,
                expected,
            });
        }
    }
    let mut vertices = vec![Point::from([0.0, 0.0, 0.0])];
    vertices.extend(surface.points.iter().cloned());
    let tets = surface
        .triangulation
        .triangles()
        .iter()
        .map(|t| [0, t[0] + 1, t[1] + 1, t[2] + 1])
        .collect();
    Ok(TetMesh::new(vertices, tets, tol)?)
}

/// Outcome of a vertex insertion.
#[derive(Clone, Debug, PartialEq)]
pub struct Insertion {
    pub mesh: TetMesh,
    pub new_vertex: usize,
    /// Indices of the tets created around the new vertex.
    pub new_tets: Vec<usize>,
    /// Parameter along the antipodal segment, when applicable.
    pub epsilon: Option<f64>,
}

fn precondition(msg: String) -> ConstructionError {
    ConstructionError::Precondition(msg)
}

fn angle_cos(apex: &Point, a: &Point, b: &Point) -> f64 {
    let x = a.sub(apex);
    let y = b.sub(apex);
    crate::linalg::dot(&x, &y)
        / (crate::linalg::dot(&x, &x).sqrt() * crate::linalg::dot(&y, &y).sqrt())
}

fn tet_simplex(p: [&Point; 4]) -> Simplex {
    Simplex::new(p.iter().map(|x| (*x).clone()).collect()).expect("3-simplex")
}

/// Grows the mesh across the boundary face opposite `u` in tet `tet`: a new
/// vertex near the antipode of `u` on the tet's circumsphere, joined to `u`
/// and the face, replaces one tet by three.
pub fn insert_degree3_3wc(
    mesh: &TetMesh,
    u: usize,
    tet: usize,
    tol: &Tolerance,
) -> Result<Insertion, ConstructionError> {
    let t = *mesh
        .tets()
        .get(tet)
        .ok_or_else(|| precondition(format!("tet {tet} out of range")))?;
    if !t.contains(&u) {
        return Err(precondition(format!("tet {tet} does not contain vertex {u}")));
    }
    let others: Vec<usize> = t.iter().copied().filter(|&x| x != u).collect();
    let face = sorted3([others[0], others[1], others[2]]);
    if mesh.face_map().get(&face).map(Vec::len) != Some(1) {
        return Err(precondition(format!("face {face:?} is not a boundary face")));
    }
    let sigma = mesh.tet_simplex(tet);
    if !is_n_well_centered(&sigma, tol)?.is_satisfied() {
        return Err(precondition(format!("tet {tet} is not 3-well-centered")));
    }
    let p = |i: usize| &mesh.vertices()[i];
    let pu = p(u);
    for &a in &others {
        for &b in &others {
            if a != b && angle_cos(p(a), pu, p(b)) <= tol.band(1.0) {
                return Err(precondition(format!(
                    "face angle at {a} in triangle [{u} {a} {b}] is not acute"
                )));
            }
        }
    }
    let c = circumcenter(&sigma, tol).center;
    let anti = pu.reflect_through(&c);
    let n = cross(&p(others[1]).sub(p(others[0])), &p(others[2]).sub(p(others[0])));
    let d = crate::linalg::dot(&n, p(others[0]).coords());
    let nu = crate::linalg::dot(&n, pu.coords());
    let na = crate::linalg::dot(&n, anti.coords());
    let eps0 = (d - na) / (nu - na);
    if !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(precondition(format!(
            "antipodal segment does not cross face {face:?}"
        )));
    }
    let (v2, v3, v4) = (others[0], others[1], others[2]);
    let mut eps = eps0 / 2.0;
    const HALVINGS: usize = 64;
    for _ in 0..HALVINGS {
        let v1 = Point::combination(&[anti.clone(), pu.clone()], &[1.0 - eps, eps]);
        let new = [[u, v2, v3], [u, v3, v4], [u, v4, v2]];
        let tets_ok = new.iter().all(|f| {
            is_n_well_centered(&tet_simplex([p(f[0]), p(f[1]), p(f[2]), &v1]), tol)
                .map(|v| v.is_satisfied())
                .unwrap_or(false)
        });
        let angles_ok = others.iter().all(|&vi| {
            angle_cos(&v1, pu, p(vi)) > tol.band(1.0) && angle_cos(p(vi), pu, &v1) > tol.band(1.0)
        });
        if tets_ok && angles_ok {
            let nv = mesh.num_vertices();
            let mut vertices = mesh.vertices().to_vec();
            vertices.push(v1);
            let mut tets: Vec<[usize; 4]> = mesh
                .tets()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != tet)
                .map(|(_, t)| *t)
                .collect();
            let first = tets.len();
            tets.extend(new.iter().map(|f| [f[0], f[1], f[2], nv]));
            return Ok(Insertion {
                mesh: TetMesh::new(vertices, tets, tol)?,
                new_vertex: nv,
                new_tets: (first..first + 3).collect(),
                epsilon: Some(eps),
            });
        }
        eps /= 2.0;
    }
    Err(ConstructionError::NoEpsilon(HALVINGS))
}

/// Every tet must contain `u`.
fn require_star(mesh: &TetMesh, u: usize) -> Result<(), ConstructionError> {
    if u >= mesh.num_vertices() {
        return Err(precondition(format!("vertex {u} out of range")));
    }
    if mesh.tets().iter().any(|t| !t.contains(&u)) || mesh.num_tets() == 0 {
        return Err(precondition(format!("mesh is not the star of vertex {u}")));
    }
    Ok(())
}

fn require_acute_at(mesh: &TetMesh, u: usize, tol: &Tolerance) -> Result<(), ConstructionError> {
    let v = crate::complex::face_angles_acute_at(mesh, u, tol);
    let failing = v.failing().next().map(|c| c.label.clone());
    match failing {
        Some(label) => Err(precondition(format!("face {label} is not acute at {u}"))),
        None => Ok(()),
    }
}

fn find_tet(mesh: &TetMesh, vs: [usize; 4]) -> Option<usize> {
    let mut key = vs;
    key.sort_unstable();
    mesh.tets().iter().position(|t| {
        let mut s = *t;
        s.sort_unstable();
        s == key
    })
}

fn replace_tets(
    mesh: &TetMesh,
    remove: &[usize],
    new_point: Option<Point>,
    add: Vec<[usize; 4]>,
    tol: &Tolerance,
) -> Result<(TetMesh, Vec<usize>), ConstructionError> {
    let mut vertices = mesh.vertices().to_vec();
    if let Some(p) = new_point {
        vertices.push(p);
    }
    let mut tets: Vec<[usize; 4]> = mesh
        .tets()
        .iter()
        .enumerate()
        .filter(|(i, _)| !remove.contains(i))
        .map(|(_, t)| *t)
        .collect();
    let first = tets.len();
    let count = add.len();
    tets.extend(add);
    Ok((TetMesh::new(vertices, tets, tol)?, (first..first + count).collect()))
}

fn mean_link_radius(mesh: &TetMesh, u: usize, vs: &[usize]) -> f64 {
    let pu = &mesh.vertices()[u];
    vs.iter().map(|&v| mesh.vertices()[v].dist(pu)).sum::<f64>() / vs.len() as f64
}

/// Splits the link triangle `face` of the star of `u` by a new link vertex
/// in the direction of the face centroid, at the mean distance of the face
/// vertices from `u`.
pub fn insert_degree3_2wc(
    mesh: &TetMesh,
    u: usize,
    face: [usize; 3],
    tol: &Tolerance,
) -> Result<Insertion, ConstructionError> {
    require_star(mesh, u)?;
    require_acute_at(mesh, u, tol)?;
    let [a, b, c] = face;
    let tet = find_tet(mesh, [u, a, b, c])
        .ok_or_else(|| precondition(format!("{face:?} is not a link triangle of {u}")))?;
    let pu = &mesh.vertices()[u];
    let mut dir = [0.0; 3];
    for &v in &face {
        let d = mesh.vertices()[v].sub(pu);
        let n = crate::linalg::dot(&d, &d).sqrt();
        for k in 0..3 {
            dir[k] += d[k] / n / 3.0;
        }
    }
    let n = crate::linalg::dot(&dir, &dir).sqrt();
    let r = mean_link_radius(mesh, u, &face);
    let v1 = pu.offset(&dir, r / n);
    let nv = mesh.num_vertices();
    let (out, new_tets) = replace_tets(
        mesh,
        &[tet],
        Some(v1),
        vec![[u, a, b, nv], [u, b, c, nv], [u, c, a, nv]],
        tol,
    )?;
    require_acute_at(&out, u, tol)?;
    Ok(Insertion {
        mesh: out,
        new_vertex: nv,
        new_tets,
        epsilon: None,
    })
}

/// Splits the link edge `(a, b)` of the star of `u` at its midpoint, pushed
/// out to the mean link radius.
pub fn insert_degree4_2wc(
    mesh: &TetMesh,
    u: usize,
    edge: (usize, usize),
    tol: &Tolerance,
) -> Result<Insertion, ConstructionError> {
    require_star(mesh, u)?;
    require_acute_at(mesh, u, tol)?;
    let (a, b) = edge;
    let around: Vec<usize> = mesh
        .tets()
        .iter()
        .enumerate()
        .filter(|(_, t)| t.contains(&a) && t.contains(&b))
        .map(|(i, _)| i)
        .collect();
    if around.len() != 2 || a == b {
        return Err(precondition(format!("({a}, {b}) is not a link edge of {u}")));
    }
    let apexes: Vec<usize> = around
        .iter()
        .map(|&i| {
            *mesh.tets()[i]
                .iter()
                .find(|&&x| x != u && x != a && x != b)
                .unwrap()
        })
        .collect();
    let link = mesh.link_of(u)?;
    let pu = &mesh.vertices()[u];
    let pa = mesh.vertices()[a].sub(pu);
    let pb = mesh.vertices()[b].sub(pu);
    let mid: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| (x + y) / 2.0).collect();
    let n = crate::linalg::dot(&mid, &mid).sqrt();
    let r = mean_link_radius(mesh, u, &link.vertices);
    let v1 = pu.offset(&mid, r / n);
    let nv = mesh.num_vertices();
    let (c, d) = (apexes[0], apexes[1]);
    let (out, new_tets) = replace_tets(
        mesh,
        &around,
        Some(v1),
        vec![[u, a, c, nv], [u, c, b, nv], [u, b, d, nv], [u, d, a, nv]],
        tol,
    )?;
    require_acute_at(&out, u, tol)?;
    Ok(Insertion {
        mesh: out,
        new_vertex: nv,
        new_tets,
        epsilon: None,
    })
}

/// Drops vertex `v` and renumbers the rest.
fn drop_vertex(
    mesh: &TetMesh,
    v: usize,
    keep: Vec<[usize; 4]>,
    tol: &Tolerance,
) -> Result<TetMesh, ConstructionError> {
    let vertices: Vec<Point> = mesh
        .vertices()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != v)
        .map(|(_, p)| p.clone())
        .collect();
    let re = |x: usize| if x > v { x - 1 } else { x };
    let tets = keep.into_iter().map(|t| t.map(re)).collect();
    Ok(TetMesh::new(vertices, tets, tol)?)
}

/// Removes a vertex `v` that lies in exactly three tets around the edge
/// `(u, v)`, merging them into one.
pub fn remove_degree3_vertex(
    mesh: &TetMesh,
    u: usize,
    v: usize,
    tol: &Tolerance,
) -> Result<TetMesh, ConstructionError> {
    let around = mesh.incident_tets(v);
    if around.len() != 3 || around.iter().any(|&i| !mesh.tets()[i].contains(&u)) {
        return Err(precondition(format!(
            "vertex {v} is not in exactly three tets around edge ({u}, {v})"
        )));
    }
    let rest: BTreeSet<usize> = around
        .iter()
        .flat_map(|&i| mesh.tets()[i])
        .filter(|&x| x != u && x != v)
        .collect();
    let r: Vec<usize> = rest.into_iter().collect();
    if r.len() != 3 {
        return Err(precondition(format!("tets around {v} do not close up")));
    }
    let mut keep: Vec<[usize; 4]> = mesh
        .tets()
        .iter()
        .enumerate()
        .filter(|(i, _)| !around.contains(i))
        .map(|(_, t)| *t)
        .collect();
    keep.push([u, r[0], r[1], r[2]]);
    drop_vertex(mesh, v, keep, tol)
}

/// Removes a vertex `v` in exactly four tets around `(u, v)`, replacing them
/// by two tets split along `diagonal`.
pub fn remove_degree4_vertex(
    mesh: &TetMesh,
    u: usize,
    v: usize,
    diagonal: (usize, usize),
    tol: &Tolerance,
) -> Result<TetMesh, ConstructionError> {
    let around = mesh.incident_tets(v);
    if around.len() != 4 || around.iter().any(|&i| !mesh.tets()[i].contains(&u)) {
        return Err(precondition(format!(
            "vertex {v} is not in exactly four tets around edge ({u}, {v})"
        )));
    }
    let rest: BTreeSet<usize> = around
        .iter()
        .flat_map(|&i| mesh.tets()[i])
        .filter(|&x| x != u && x != v)
        .collect();
    let (a, b) = diagonal;
    let other: Vec<usize> = rest.iter().copied().filter(|&x| x != a && x != b).collect();
    if rest.len() != 4 || !rest.contains(&a) || !rest.contains(&b) || other.len() != 2 {
        return Err(precondition(format!("({a}, {b}) is not a diagonal of the link of {v}")));
    }
    let mut keep: Vec<[usize; 4]> = mesh
        .tets()
        .iter()
        .enumerate()
        .filter(|(i, _)| !around.contains(i))
        .map(|(_, t)| *t)
        .collect();
    keep.push([u, a, b, other[0]]);
    keep.push([u, a, b, other[1]]);
    drop_vertex(mesh, v, keep, tol)
}

pub const FIXTURE_NAMES: [&str; 7] = [
    "wc3-deg5554443",
    "wc3-deg6555333",
    "cwc-deg555555444",
    "tet-A",
    "tet-B",
    "tet-C",
    "cube-corner",
];

/// How the connectivity of a fixture was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reconstruction {
    Explicit,
    ConvexHull,
    StarSearch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub mesh: TetMesh,
    pub method: Reconstruction,
    pub degree_list: Option<DegreeList>,
}

/// Which predicate the reconstructed star must satisfy.
#[derive(Clone, Copy)]
enum Target {
    Wc3,
    Complete,
}

struct StarTable {
    name: &'static str,
    link: &'static [[f64; 3]],
    degrees: &'static [usize],
    target: Target,
}

// Stars of a vertex at the origin; rows are the link vertices.
const STAR_TABLES: [StarTable; 3] = [
    StarTable {
        name: "wc3-deg5554443",
        link: &[
            [0.0, 0.0, 1.0],
            [-0.1041, -0.0601, 0.0117],
            [0.1041, -0.0601, 0.0117],
            [0.0, 0.1202, 0.0117],
            [0.0, -0.3622, -0.8656],
            [0.3137, 0.1811, -0.8656],
            [-0.3137, 0.1811, -0.8656],
        ],
        degrees: &[5, 5, 5, 4, 4, 4, 3],
        target: Target::Wc3,
    },
    StarTable {
        name: "wc3-deg6555333",
        link: &[
            [0.0, 0.0, 1.0],
            [0.0, 0.8334, -0.8588],
            [-0.7217, -0.4167, -0.8588],
            [0.7217, -0.4167, -0.8588],
            [0.0, -5.0494, 1.0696],
            [4.3729, 2.5247, 1.0696],
            [-4.3729, 2.5247, 1.0696],
        ],
        degrees: &[6, 5, 5, 5, 3, 3, 3],
        target: Target::Wc3,
    },
    StarTable {
        name: "cwc-deg555555444",
        link: &[
            [0.0, 0.0, 1.0],
            [0.0, 0.533, 0.164],
            [0.533, 0.0, 0.164],
            [0.0, -0.533, 0.164],
            [-0.533, 0.0, 0.164],
            [0.63, 0.63, -0.7],
            [-0.63, -0.63, -0.7],
            [0.594, -0.594, -0.9],
            [-0.594, 0.594, -0.9],
        ],
        degrees: &[5, 5, 5, 5, 5, 5, 4, 4, 4],
        target: Target::Complete,
    },
];

const SINGLE_TETS: [(&str, [[f64; 3]; 4]); 4] = [
    (
        "tet-A",
        [
            [-0.152, 0.864, -0.48],
            [-0.64, -0.6, -0.48],
            [0.6, -0.64, -0.48],
            [-0.192, -0.64, 0.744],
        ],
    ),
    (
        "tet-B",
        [
            [-0.01, -0.01, -0.01],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ],
    ),
    (
        "tet-C",
        [
            [0.224, -0.768, -0.6],
            [0.8, 0.0, -0.6],
            [0.224, 0.768, -0.6],
            [-0.28, 0.0, 0.96],
        ],
    ),
    (
        "cube-corner",
        [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    ),
];

pub fn load_fixture(name: &str) -> Result<TetMesh, ConstructionError> {
    Ok(load_fixture_detailed(name)?.mesh)
}

/// Fixture mesh plus how it was built. Star fixtures list only coordinates;
/// connectivity comes from the convex hull of the link when that matches
/// the expected degree list, and otherwise from an exhaustive search over
/// star-shaped triangulations, keeping the best-centered match.
pub fn load_fixture_detailed(name: &str) -> Result<Fixture, ConstructionError> {
    let tol = Tolerance::default();
    if let Some((n, coords)) = SINGLE_TETS.iter().find(|(n, _)| *n == name) {
        let vertices = coords.iter().map(|c| Point::from(*c)).collect();
        return Ok(Fixture {
            name: n,
            mesh: TetMesh::new(vertices, vec![[0, 1, 2, 3]], &tol)?,
            method: Reconstruction::Explicit,
            degree_list: None,
        });
    }
    let table = STAR_TABLES
        .iter()
        .find(|t| t.name == name)
        .ok_or_else(|| ConstructionError::UnknownFixture(name.to_string()))?;
    let expected = DegreeList::from(table.degrees);
    let link: Vec<[f64; 3]> = table.link.to_vec();
    let build = |tris: &[Tri]| -> Result<TetMesh, ConstructionError> {
        let mut vertices = vec![Point::from([0.0, 0.0, 0.0])];
        vertices.extend(link.iter().map(|c| Point::from(*c)));
        let tets = tris.iter().map(|t| [0, t[0] + 1, t[1] + 1, t[2] + 1]).collect();
        Ok(TetMesh::new(vertices, tets, &tol)?)
    };
    let score = |mesh: &TetMesh| -> f64 {
        (0..mesh.num_tets())
            .map(|i| {
                let s = mesh.tet_simplex(i);
                let v = match table.target {
                    Target::Wc3 => is_n_well_centered(&s, &tol),
                    Target::Complete => is_completely_well_centered(&s, &tol),
                };
                v.map(|v| v.margin).unwrap_or(f64::NEG_INFINITY)
            })
            .fold(f64::INFINITY, f64::min)
    };
    let accept = |tris: &[Tri]| -> Option<TetMesh> {
        let t = SphereTriangulation::new(link.len(), tris.to_vec()).ok()?;
        if t.degree_list() != expected {
            return None;
        }
        build(tris).ok()
    };
    if let Some(mesh) = convex_hull_triangles(&link).and_then(|h| accept(&h)) {
        if score(&mesh) > tol.band(1.0) {
            return Ok(Fixture {
                name: table.name,
                mesh,
                method: Reconstruction::ConvexHull,
                degree_list: Some(expected),
            });
        }
    }
    let mut best: Option<(f64, TetMesh)> = None;
    for tris in star_triangulations(&link) {
        if let Some(mesh) = accept(&tris) {
            let s = score(&mesh);
            if best.as_ref().is_none_or(|(b, _)| s > *b) {
                best = Some((s, mesh));
            }
        }
    }
    match best {
        Some((s, mesh)) if s > tol.band(1.0) => Ok(Fixture {
            name: table.name,
            mesh,
            method: Reconstruction::StarSearch,
            degree_list: Some(expected),
        }),
        Some((s, _)) => Err(ConstructionError::FixtureReconstruction(format!(
            "{name}: best triangulation with degree list {expected} has margin {s}"
        ))),
        None => Err(ConstructionError::FixtureReconstruction(format!(
            "{name}: no star-shaped triangulation has degree list {expected}"
        ))),
    }
}

/// Hull facets of points in general position, oriented outward; `None` if
/// some four points are coplanar on the hull or the hull is degenerate.
pub fn convex_hull_triangles(pts: &[[f64; 3]]) -> Option<Vec<Tri>> {
    let n = pts.len();
    let p: Vec<Point> = pts.iter().map(|c| Point::from(*c)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let nrm = cross(&p[j].sub(&p[i]), &p[k].sub(&p[i]));
                let scale = crate::linalg::dot(&nrm, &nrm).sqrt();
                if scale == 0.0 {
                    return None;
                }
                let (mut pos, mut neg, mut zero) = (0, 0, 0);
                for (l, q) in p.iter().enumerate() {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    let s = crate::linalg::dot(&nrm, &q.sub(&p[i])) / scale;
                    if s > 1e-12 {
                        pos += 1;
                    } else if s < -1e-12 {
                        neg += 1;
                    } else {
                        zero += 1;
                    }
                }
                if pos == 0 || neg == 0 {
                    if zero > 0 {
                        return None;
                    }
                    out.push(if pos == 0 { [i, j, k] } else { [i, k, j] });
                }
            }
        }
    }
    Some(out)
}

fn solid_angle(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    let unit = |v: &[f64; 3]| {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    };
    let (a, b, c) = (unit(a), unit(b), unit(c));
    let d = |x: &[f64; 3], y: &[f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    let num = d(&a, &cross(&b, &c));
    2.0 * num.atan2(1.0 + d(&a, &b) + d(&b, &c) + d(&c, &a))
}

/// All triangulations of the sphere of directions around the origin whose
/// cone tets are positively oriented and cover each direction once.
pub fn star_triangulations(pts: &[[f64; 3]]) -> Vec<Vec<Tri>> {
    let m = pts.len();
    let p: Vec<Point> = pts.iter().map(|c| Point::from(*c)).collect();
    let mut by_edge: std::collections::HashMap<(usize, usize), Vec<(Tri, f64)>> =
        std::collections::HashMap::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let d = det3(&p[i], &p[j], &p[k]);
                let t = if d > 1e-12 {
                    [i, j, k]
                } else if d < -1e-12 {
                    [i, k, j]
                } else {
                    continue;
                };
                let w = solid_angle(&pts[t[0]], &pts[t[1]], &pts[t[2]]);
                for e in 0..3 {
                    by_edge.entry((t[e], t[(e + 1) % 3])).or_default().push((t, w));
                }
            }
        }
    }
    let f = 2 * (m - 2);
    let mut found: BTreeSet<Vec<Tri>> = BTreeSet::new();
    let mut results = Vec::new();
    let mut starts: Vec<(Tri, f64)> = by_edge
        .iter()
        .filter(|((a, _), _)| *a == 0)
        .flat_map(|(_, ts)| ts.iter().copied())
        .collect();
    starts.sort_by(|a, b| a.0.cmp(&b.0));
    starts.dedup_by(|a, b| a.0 == b.0);
    struct Dfs<'a> {
        by_edge: &'a std::collections::HashMap<(usize, usize), Vec<(Tri, f64)>>,
        used: BTreeSet<(usize, usize)>,
        chosen: Vec<Tri>,
        area: f64,
        f: usize,
    }
    impl Dfs<'_> {
        fn run(&mut self, out: &mut Vec<Vec<Tri>>) {
            if self.chosen.len() > self.f || self.area > 4.0 * PI + 1e-9 {
                return;
            }
            let open = self
                .used
                .iter()
                .filter(|(a, b)| !self.used.contains(&(*b, *a)))
                .map(|(a, b)| (*b, *a))
                .min();
            let Some(e) = open else {
                if self.chosen.len() == self.f && (self.area - 4.0 * PI).abs() < 1e-6 {
                    out.push(self.chosen.clone());
                }
                return;
            };
            let Some(cands) = self.by_edge.get(&e) else {
                return;
            };
            for &(t, w) in cands {
                let es = [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])];
                if es.iter().any(|x| self.used.contains(x)) {
                    continue;
                }
                es.iter().for_each(|x| {
                    self.used.insert(*x);
                });
                self.chosen.push(t);
                self.area += w;
                self.run(out);
                self.area -= w;
                self.chosen.pop();
                es.iter().for_each(|x| {
                    self.used.remove(x);
                });
            }
        }
    }
    for (t, w) in starts {
        let mut dfs = Dfs {
            by_edge: &by_edge,
            used: [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])].into_iter().collect(),
            chosen: vec![t],
            area: w,
            f,
        };
        let mut out = Vec::new();
        dfs.run(&mut out);
        for tris in out {
            let mut key: Vec<Tri> = tris.iter().map(|t| sorted3(*t)).collect();
            key.sort_unstable();
            if found.insert(key) {
                results.push(tris);
            }
        }
    }
    results
}
