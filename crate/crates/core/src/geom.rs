//! Coordinate-level primitives: points, simplices, circumcenters and the
//! bordered Gram system whose determinants drive the polynomial region test.
//!
//! The circumcenter of `[v_0 ... v_n]` is written `c = sum_i alpha_i v_i`
//! with `sum_i alpha_i = 1`. Subtracting `v_0` from every vertex leaves the
//! barycentric coordinates unchanged and reduces the bordered
//! `(n + 2) x (n + 2)` system to the `n x n` system `2 Vt^T Vt a = d`, where
//! the columns of `Vt` are the edge vectors `v_i - v_0` expressed in an
//! orthonormal basis of `aff(sigma)` and `d_i = |v_i - v_0|^2`.

use serde::{Deserialize, Serialize};

use crate::error::GeomError;
use crate::linalg;

/// Tolerance band used to turn strict inequalities into three-valued verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative tolerance (dimensionless).
    pub rel: f64,
    /// Absolute floor.
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-9,
            abs: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self, GeomError> {
        if rel > 0.0 && abs > 0.0 && rel.is_finite() && abs.is_finite() {
            Ok(Self { rel, abs })
        } else {
            Err(GeomError::InvalidTolerance { rel, abs })
        }
    }

    /// Width of the boundary band for a quantity measured at `scale`.
    pub fn band(&self, scale: f64) -> f64 {
        self.rel * scale.abs() + self.abs
    }
}

/// A point with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl TryFrom<Vec<f64>> for Point {
    type Error = GeomError;

    fn try_from(coords: Vec<f64>) -> Result<Self, Self::Error> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    /// Panics on non-finite input; use [`Point::new`] for untrusted data.
    fn from(c: [f64; N]) -> Self {
        Point::new(c.to_vec()).expect("non-finite coordinate")
    }
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeomError> {
        if coords.iter().all(|c| c.is_finite()) {
            Ok(Self(coords))
        } else {
            Err(GeomError::NonFinite)
        }
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn sub(&self, other: &Point) -> Vec<f64> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    pub fn dot(&self, other: &Point) -> f64 {
        linalg::dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        let d = self.sub(other);
        linalg::dot(&d, &d).sqrt()
    }

    /// `self + s * v`
    pub fn offset(&self, v: &[f64], s: f64) -> Point {
        Point(self.0.iter().zip(v).map(|(a, b)| a + s * b).collect())
    }

    /// Reflection of `self` through `center`.
    pub fn reflect_through(&self, center: &Point) -> Point {
        Point(
            self.0
                .iter()
                .zip(&center.0)
                .map(|(p, c)| 2.0 * c - p)
                .collect(),
        )
    }

    /// Affine combination `sum_i w_i p_i`.
    pub fn combination(points: &[Point], weights: &[f64]) -> Point {
        let dim = points.first().map_or(0, Point::dim);
        let mut out = vec![0.0; dim];
        for (p, w) in points.iter().zip(weights) {
            for (o, c) in out.iter_mut().zip(&p.0) {
                *o += w * c;
            }
        }
        Point(out)
    }
}

/// An ordered list of `dim + 1` vertices in a common ambient space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Simplex {
    vertices: Vec<Point>,
}

impl Simplex {
    /// Builds a simplex of dimension `vertices.len() - 1`.
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeomError> {
        let first = vertices.first().ok_or(GeomError::Empty)?;
        let ambient = first.dim();
        if vertices.iter().any(|v| v.dim() != ambient) {
            return Err(GeomError::MixedDimensions);
        }
        let dim = vertices.len() - 1;
        if ambient < dim {
            return Err(GeomError::AmbientTooSmall { ambient, dim });
        }
        Ok(Self { vertices })
    }

    /// Builds a simplex and checks that its vertex count is `dim + 1`.
    pub fn with_dim(dim: usize, vertices: Vec<Point>) -> Result<Self, GeomError> {
        if vertices.len() != dim + 1 {
            return Err(GeomError::VertexCount {
                dim,
                got: vertices.len(),
            });
        }
        Self::new(vertices)
    }

    pub fn from_coords<const N: usize>(coords: &[[f64; N]]) -> Result<Self, GeomError> {
        Self::new(coords.iter().map(|c| Point::new(c.to_vec())).collect::<Result<_, _>>()?)
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i]
    }

    /// The face spanned by the given vertex indices (in the given order).
    pub fn face(&self, indices: &[usize]) -> Simplex {
        Simplex {
            vertices: indices.iter().map(|&i| self.vertices[i].clone()).collect(),
        }
    }

    /// The facet opposite vertex `i`.
    pub fn facet(&self, i: usize) -> Simplex {
        let idx: Vec<usize> = (0..=self.dim()).filter(|&j| j != i).collect();
        self.face(&idx)
    }

    /// `cone(apex, self)` with the apex as the last vertex.
    pub fn cone(&self, apex: &Point) -> Result<Simplex, GeomError> {
        let mut v = self.vertices.clone();
        v.push(apex.clone());
        Simplex::new(v)
    }

    /// Index lists of all `k`-dimensional faces in lexicographic order.
    pub fn face_indices(&self, k: usize) -> Vec<Vec<usize>> {
        combinations(self.dim() + 1, k + 1)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                d = d.max(self.vertices[i].dist(&self.vertices[j]));
            }
        }
        d
    }

    fn edge_vectors(&self) -> Vec<Vec<f64>> {
        let v0 = &self.vertices[0];
        self.vertices[1..].iter().map(|v| v.sub(v0)).collect()
    }

    /// Orthonormal frame of `aff(self)` and the reduced edge matrix `Vt`.
    fn frame(&self) -> Frame {
        let (basis, r) = linalg::gram_schmidt(&self.edge_vectors());
        let n = self.dim();
        let det_vt: f64 = (0..n).map(|i| r[i * n + i]).product();
        Frame { basis, r, det_vt }
    }

    /// Whether the vertices are affinely dependent within `tol`:
    /// `|det(Vt)| < rel * diam^n`.
    pub fn is_degenerate(&self, tol: &Tolerance) -> bool {
        let n = self.dim();
        if n == 0 {
            return false;
        }
        let frame = self.frame();
        frame.det_vt.abs() < tol.rel * self.diameter().powi(n as i32) || frame.det_vt == 0.0
    }
}

struct Frame {
    basis: Vec<Vec<f64>>,
    r: Vec<f64>,
    det_vt: f64,
}

/// Circumcenter data of a simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircumData {
    /// Barycentric coordinates of the circumcenter, summing to one.
    pub barycentric: Vec<f64>,
    /// `R^2 - |c|^2` in the caller's coordinates.
    pub lambda: f64,
    pub center: Point,
    pub radius: f64,
    /// Set when the vertices are affinely dependent; the other fields are
    /// then NaN (center, barycentric) or infinite (radius).
    pub degenerate: bool,
}

/// Circumcenter, circumradius and barycentric coordinates of the circumcenter.
pub fn circumcenter(simplex: &Simplex, tol: &Tolerance) -> CircumData {
    let n = simplex.dim();
    let v0 = simplex.vertex(0);
    if n == 0 {
        return CircumData {
            barycentric: vec![1.0],
            lambda: -v0.dot(v0),
            center: v0.clone(),
            radius: 0.0,
            degenerate: false,
        };
    }
    let degenerate_result = || CircumData {
        barycentric: vec![f64::NAN; n + 1],
        lambda: f64::NAN,
        center: Point(vec![f64::NAN; simplex.ambient_dim()]),
        radius: f64::INFINITY,
        degenerate: true,
    };
    if simplex.is_degenerate(tol) {
        return degenerate_result();
    }
    let Frame { r, .. } = simplex.frame();
    // B = 2 Vt^T Vt with Vt = r (upper triangular, columns are edges in the frame).
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..n).map(|k| r[k * n + i] * r[k * n + j]).sum();
            b[i * n + j] = 2.0 * s;
        }
    }
    let rhs: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|k| r[k * n + j] * r[k * n + j]).sum())
        .collect();
    let Some(a) = linalg::solve(&b, &rhs, n) else {
        return degenerate_result();
    };
    let mut barycentric = Vec::with_capacity(n + 1);
    barycentric.push(1.0 - a.iter().sum::<f64>());
    barycentric.extend_from_slice(&a);
    let center = Point::combination(simplex.vertices(), &barycentric);
    let radius = center.dist(v0);
    let lambda = radius * radius - center.dot(&center);
    CircumData {
        barycentric,
        lambda,
        center,
        radius,
        degenerate: false,
    }
}

/// The bordered Gram matrix `A` of `cone(apex, facet)` (facet vertices first,
/// apex last), translated so the first facet vertex is the origin, together
/// with the right-hand side `b`.
fn bordered_system(facet: &Simplex, apex: &Point) -> (Vec<f64>, Vec<f64>, usize) {
    let v0 = facet.vertex(0);
    let mut w: Vec<Vec<f64>> = facet.vertices().iter().map(|v| v.sub(v0)).collect();
    w.push(apex.sub(v0));
    let size = w.len() + 1;
    let mut a = vec![0.0; size * size];
    let mut b = vec![0.0; size];
    for i in 0..w.len() {
        for j in 0..w.len() {
            a[i * size + j] = 2.0 * linalg::dot(&w[i], &w[j]);
        }
        a[i * size + size - 1] = 1.0;
        a[(size - 1) * size + i] = 1.0;
        b[i] = linalg::dot(&w[i], &w[i]);
    }
    b[size - 1] = 1.0;
    (a, b, size)
}

/// `det(A)` for the simplex `cone(apex, facet)`. Never positive; zero iff the
/// apex lies in `aff(facet)` or the facet is degenerate.
pub fn det_a(facet: &Simplex, apex: &Point) -> f64 {
    let (a, _, size) = bordered_system(facet, apex);
    linalg::det(&a, size)
}

/// `det(A_i)`: `A` with column `i` (0-based, vertex order facet..., apex)
/// replaced by `b`. Cubic in the apex coordinates; `alpha_i = det(A_i) / det(A)`.
pub fn det_ai(facet: &Simplex, apex: &Point, i: usize) -> f64 {
    let (mut a, b, size) = bordered_system(facet, apex);
    assert!(i + 1 < size, "vertex index {i} out of range");
    for (row, bv) in b.iter().enumerate() {
        a[row * size + i] = *bv;
    }
    linalg::det(&a, size)
}

/// Orthogonal projection of `point` onto `aff(simplex)`.
pub fn project_to_aff(point: &Point, simplex: &Simplex) -> Result<Point, GeomError> {
    project_with(point, simplex, &Tolerance::default())
}

pub(crate) fn project_with(
    point: &Point,
    simplex: &Simplex,
    tol: &Tolerance,
) -> Result<Point, GeomError> {
    if point.dim() != simplex.ambient_dim() {
        return Err(GeomError::MixedDimensions);
    }
    if simplex.is_degenerate(tol) {
        return Err(GeomError::Degenerate);
    }
    let v0 = simplex.vertex(0);
    let d = point.sub(v0);
    let frame = simplex.frame();
    let mut out = v0.clone();
    for q in &frame.basis {
        let c = linalg::dot(q, &d);
        out = out.offset(q, c);
    }
    Ok(out)
}

/// Barycentric coordinates of the projection of `point` onto `aff(simplex)`.
pub fn barycentric_of(
    point: &Point,
    simplex: &Simplex,
    tol: &Tolerance,
) -> Result<Vec<f64>, GeomError> {
    if simplex.is_degenerate(tol) {
        return Err(GeomError::Degenerate);
    }
    let n = simplex.dim();
    let frame = simplex.frame();
    let d = point.sub(simplex.vertex(0));
    // Solve Vt a = (Q^T d), Vt upper triangular.
    let y: Vec<f64> = frame.basis.iter().map(|q| linalg::dot(q, &d)).collect();
    let mut a = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= frame.r[i * n + k] * a[k];
        }
        a[i] = s / frame.r[i * n + i];
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0 - a.iter().sum::<f64>());
    out.extend(a);
    Ok(out)
}

/// Signed n-volume of an n-simplex in n-space: `det(v_1 - v_0, ..., v_n - v_0) / n!`.
pub fn signed_volume(simplex: &Simplex) -> Result<f64, GeomError> {
    let n = simplex.dim();
    if simplex.ambient_dim() != n {
        return Err(GeomError::NotFullDimensional {
            ambient: simplex.ambient_dim(),
            dim: n,
        });
    }
    let edges = simplex.edge_vectors();
    let mut m = vec![0.0; n * n];
    for (j, e) in edges.iter().enumerate() {
        for (i, c) in e.iter().enumerate() {
            m[i * n + j] = *c;
        }
    }
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(linalg::det(&m, n) / fact)
}

/// Unsigned n-volume of an n-simplex in any ambient dimension.
pub fn volume(simplex: &Simplex) -> f64 {
    let n = simplex.dim();
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    simplex.frame().det_vt.abs() / fact
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}
