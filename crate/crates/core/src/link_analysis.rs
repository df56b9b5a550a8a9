//! Combinatorial obstructions for vertex links: certificate complexes, the
//! degree obstruction to acute face angles, edge-count audits, and a
//! numerical search for acute ray arrangements.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{sorted3, DegreeList, SphereTriangulation, TetMesh, Tri};
use crate::error::LinkError;
use crate::geom::{circumcenter, Point, Simplex, Tolerance};

/// Abstract tetrahedral complex on link vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateComplex {
    pub tets: Vec<[usize; 4]>,
}

impl CertificateComplex {
    pub fn vertices(&self) -> BTreeSet<usize> {
        self.tets.iter().flatten().copied().collect()
    }

    /// Sorted face -> number of tets containing it.
    fn face_counts(&self) -> BTreeMap<Tri, usize> {
        let mut c = BTreeMap::new();
        for t in &self.tets {
            for f in tet_faces(t) {
                *c.entry(f).or_default() += 1;
            }
        }
        c
    }
}

fn tet_faces(t: &[usize; 4]) -> [Tri; 4] {
    [
        sorted3([t[1], t[2], t[3]]),
        sorted3([t[0], t[2], t[3]]),
        sorted3([t[0], t[1], t[3]]),
        sorted3([t[0], t[1], t[2]]),
    ]
}

/// First reason a complex fails to certify a link.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CertificateFailure {
    #[error("complex has no tetrahedra")]
    Empty,
    #[error("vertex {0} of the complex is not a link vertex")]
    ForeignVertex(usize),
    #[error("tet {0} has a repeated vertex")]
    RepeatedVertex(usize),
    #[error("tet {0} is listed twice")]
    DuplicateTet(usize),
    #[error("tet {tet} has only {count} faces in the link")]
    TooFewLinkFaces { tet: usize, count: usize },
    #[error("triangle {0:?} lies in more than two tets")]
    OverfullFace(Tri),
    #[error("boundary triangle {0:?} is not a link triangle")]
    ExtraBoundary(Tri),
    #[error("link triangle {0:?} is not on the boundary")]
    MissingBoundary(Tri),
    #[error("link of edge ({0}, {1}) is not a path or cycle")]
    EdgeLink(usize, usize),
    #[error("link of vertex {0} is not a disk or sphere")]
    VertexLink(usize),
}

/// Checks that `k` is a 3-manifold with boundary whose boundary is exactly
/// `link` and whose tets each have at least two faces in `link`.
pub fn verify_certificate(
    k: &CertificateComplex,
    link: &SphereTriangulation,
) -> Result<(), CertificateFailure> {
    if k.tets.is_empty() {
        return Err(CertificateFailure::Empty);
    }
    if let Some(&v) = k.vertices().iter().find(|&&v| v >= link.num_vertices()) {
        return Err(CertificateFailure::ForeignVertex(v));
    }
    let lset = link.triangle_set();
    let mut seen = BTreeSet::new();
    for (i, t) in k.tets.iter().enumerate() {
        let mut s = *t;
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(CertificateFailure::RepeatedVertex(i));
        }
        if !seen.insert(s) {
            return Err(CertificateFailure::DuplicateTet(i));
        }
        let count = tet_faces(t).iter().filter(|f| lset.contains(*f)).count();
        if count < 2 {
            return Err(CertificateFailure::TooFewLinkFaces { tet: i, count });
        }
    }
    let counts = k.face_counts();
    if let Some((f, _)) = counts.iter().find(|(_, &c)| c > 2) {
        return Err(CertificateFailure::OverfullFace(*f));
    }
    for (f, &c) in &counts {
        if c == 1 && !lset.contains(f) {
            return Err(CertificateFailure::ExtraBoundary(*f));
        }
    }
    for f in &lset {
        if counts.get(f) != Some(&1) {
            return Err(CertificateFailure::MissingBoundary(*f));
        }
    }
    // Edge links: the opposite edges of tets around an edge.
    let mut edge_links: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for t in &k.tets {
        for i in 0..4 {
            for j in i + 1..4 {
                let rest: Vec<usize> = (0..4).filter(|&q| q != i && q != j).map(|q| t[q]).collect();
                edge_links
                    .entry((t[i].min(t[j]), t[i].max(t[j])))
                    .or_default()
                    .push((rest[0], rest[1]));
            }
        }
    }
    for (&(a, b), edges) in &edge_links {
        if !is_path_or_cycle(edges) {
            return Err(CertificateFailure::EdgeLink(a, b));
        }
    }
    for v in k.vertices() {
        let tris: Vec<Tri> = k
            .tets
            .iter()
            .filter(|t| t.contains(&v))
            .map(|t| {
                let r: Vec<usize> = t.iter().copied().filter(|&x| x != v).collect();
                [r[0], r[1], r[2]]
            })
            .collect();
        if !is_disk_or_sphere(&tris) {
            return Err(CertificateFailure::VertexLink(v));
        }
    }
    Ok(())
}

fn is_path_or_cycle(edges: &[(usize, usize)]) -> bool {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if adj.values().any(|n| n.len() > 2) {
        return false;
    }
    connected(&adj)
}

fn connected(adj: &BTreeMap<usize, Vec<usize>>) -> bool {
    let Some(&start) = adj.keys().next() else {
        return true;
    };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &y in &adj[&x] {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen.len() == adj.len()
}

/// Connected surface with Euler characteristic 1 (with boundary) or 2 (closed).
fn is_disk_or_sphere(tris: &[Tri]) -> bool {
    let mut edge_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for t in tris {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *edge_count.entry((a.min(b), a.max(b))).or_default() += 1;
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
    }
    if edge_count.values().any(|&c| c > 2) || !connected(&adj) {
        return false;
    }
    let boundary = edge_count.values().any(|&c| c == 1);
    let chi = adj.len() as i64 - edge_count.len() as i64 + tris.len() as i64;
    chi == if boundary { 1 } else { 2 }
}

/// Default cap on the candidate pool of [`search_certificate`].
pub const DEFAULT_POOL_CAP: usize = 64;

/// Candidate tets: unions of two link triangles sharing an edge.
fn candidate_pool(link: &SphereTriangulation) -> Vec<[usize; 4]> {
    let mut by_edge: BTreeMap<(usize, usize), Vec<Tri>> = BTreeMap::new();
    for t in link.triangles() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            by_edge.entry((a.min(b), a.max(b))).or_default().push(sorted3(*t));
        }
    }
    let mut pool = BTreeSet::new();
    for tris in by_edge.values() {
        let mut vs: Vec<usize> = tris.iter().flatten().copied().collect();
        vs.sort_unstable();
        vs.dedup();
        if vs.len() == 4 {
            pool.insert([vs[0], vs[1], vs[2], vs[3]]);
        }
    }
    pool.into_iter().collect()
}

/// Exhaustive search for a certificate complex. Every tet of a certificate
/// has two faces in the link that share an edge, so the pool below is
/// complete and `Ok(None)` means no certificate exists.
pub fn search_certificate(
    link: &SphereTriangulation,
    max_pool: usize,
) -> Result<Option<CertificateComplex>, LinkError> {
    let pool = candidate_pool(link);
    if pool.len() > max_pool {
        return Err(LinkError::SearchCapExceeded {
            pool: pool.len(),
            cap: max_pool,
        });
    }
    let lset = link.triangle_set();
    let faces: Vec<[Tri; 4]> = pool.iter().map(tet_faces).collect();
    let mut by_face: HashMap<Tri, Vec<usize>> = HashMap::new();
    for (i, fs) in faces.iter().enumerate() {
        for f in fs {
            by_face.entry(*f).or_default().push(i);
        }
    }
    let mut state = Search {
        link,
        lset: &lset,
        faces: &faces,
        by_face: &by_face,
        counts: HashMap::new(),
        used: vec![false; pool.len()],
        chosen: Vec::new(),
    };
    Ok(state.dfs().map(|idx| CertificateComplex {
        tets: idx.into_iter().map(|i| pool[i]).collect(),
    }))
}

struct Search<'a> {
    link: &'a SphereTriangulation,
    lset: &'a BTreeSet<Tri>,
    faces: &'a [[Tri; 4]],
    by_face: &'a HashMap<Tri, Vec<usize>>,
    counts: HashMap<Tri, usize>,
    used: Vec<bool>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn cap(&self, f: &Tri) -> usize {
        if self.lset.contains(f) {
            1
        } else {
            2
        }
    }

    fn fits(&self, t: usize) -> bool {
        !self.used[t]
            && self.faces[t]
                .iter()
                .all(|f| self.counts.get(f).copied().unwrap_or(0) < self.cap(f))
    }

    /// Deficient face with the fewest fitting tets; `None` when closed.
    fn pick(&self) -> Option<(Tri, Vec<usize>)> {
        let mut best: Option<(Tri, Vec<usize>)> = None;
        let deficient = self
            .lset
            .iter()
            .filter(|f| !self.counts.contains_key(*f))
            .chain(
                self.counts
                    .iter()
                    .filter(|(f, &c)| c == 1 && !self.lset.contains(*f))
                    .map(|(f, _)| f),
            );
        let mut all: Vec<&Tri> = deficient.collect();
        all.sort_unstable();
        for f in all {
            let opts: Vec<usize> = self
                .by_face
                .get(f)
                .map(|v| v.iter().copied().filter(|&t| self.fits(t)).collect())
                .unwrap_or_default();
            if best.as_ref().is_none_or(|(_, b)| opts.len() < b.len()) {
                let empty = opts.is_empty();
                best = Some((*f, opts));
                if empty {
                    break;
                }
            }
        }
        best
    }

    fn dfs(&mut self) -> Option<Vec<usize>> {
        match self.pick() {
            None => {
                let k = CertificateComplex {
                    tets: self.chosen.iter().map(|&i| tet_of(self.faces[i])).collect(),
                };
                verify_certificate(&k, self.link).ok().map(|_| {
                    let mut c = self.chosen.clone();
                    c.sort_unstable();
                    c
                })
            }
            Some((_, opts)) => {
                for t in opts {
                    self.used[t] = true;
                    self.chosen.push(t);
                    for f in self.faces[t] {
                        *self.counts.entry(f).or_default() += 1;
                    }
                    if let Some(r) = self.dfs() {
                        return Some(r);
                    }
                    for f in self.faces[t] {
                        let c = self.counts.get_mut(&f).unwrap();
                        *c -= 1;
                        if *c == 0 {
                            self.counts.remove(&f);
                        }
                    }
                    self.chosen.pop();
                    self.used[t] = false;
                }
                None
            }
        }
    }
}

fn tet_of(faces: [Tri; 4]) -> [usize; 4] {
    let mut v: Vec<usize> = faces.iter().flatten().copied().collect();
    v.sort_unstable();
    v.dedup();
    [v[0], v[1], v[2], v[3]]
}

/// Degree obstruction: a vertex of degree at least `m - 3` rules out acute
/// face angles at the center.
pub fn nminus3_test(link: &SphereTriangulation) -> bool {
    link.degree_list().max_degree() + 3 >= link.num_vertices()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeAuditEntry {
    pub vertex: usize,
    pub incident_edges: usize,
    /// Fewer than 7 incident edges: no 3-well-centered star.
    pub below_3wc_bound: bool,
    /// Fewer than 9 incident edges: no 2-well-centered star.
    pub below_2wc_bound: bool,
}

pub const MIN_EDGES_3WC: usize = 7;
pub const MIN_EDGES_2WC: usize = 9;

/// Incident-edge counts for every interior vertex.
pub fn min_edge_audit(mesh: &TetMesh) -> Vec<EdgeAuditEntry> {
    mesh.interior_vertices()
        .into_iter()
        .map(|v| {
            let e = mesh.incident_edge_count(v);
            EdgeAuditEntry {
                vertex: v,
                incident_edges: e,
                below_3wc_bound: e < MIN_EDGES_3WC,
                below_2wc_bound: e < MIN_EDGES_2WC,
            }
        })
        .collect()
}

/// `m - 2` tets closed around the edge `(0, 1)`, with ring vertices `2..m`,
/// and the boundary of that complex.
pub fn generate_band_family(
    m: usize,
) -> Result<(CertificateComplex, SphereTriangulation), LinkError> {
    if m < 6 {
        return Err(LinkError::BandSize { m, min: 6 });
    }
    let r = m - 2;
    let ring = |i: usize| 2 + i % r;
    let tets = (0..r).map(|i| [0, 1, ring(i), ring(i + 1)]).collect();
    let mut tris = Vec::with_capacity(2 * r);
    for i in 0..r {
        tris.push([0, ring(i), ring(i + 1)]);
        tris.push([1, ring(i + 1), ring(i)]);
    }
    Ok((CertificateComplex { tets }, SphereTriangulation::new(m, tris)?))
}

/// The band with one tet removed: `m - 3` tets around an edge, open fan.
pub fn generate_open_band(m: usize) -> Result<(CertificateComplex, SphereTriangulation), LinkError> {
    if m < 6 {
        return Err(LinkError::BandSize { m, min: 6 });
    }
    let r = m - 2;
    let tets = (0..r - 1).map(|i| [0, 1, 2 + i, 3 + i]).collect();
    let mut tris = Vec::with_capacity(2 * r);
    for i in 0..r - 1 {
        tris.push([0, 2 + i, 3 + i]);
        tris.push([1, 3 + i, 2 + i]);
    }
    tris.push([0, 1, 2]);
    tris.push([1, 0, m - 1]);
    Ok((CertificateComplex { tets }, SphereTriangulation::new(m, tris)?))
}

/// Parameters of [`acute_link_embedding`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingOptions {
    pub margin: f64,
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for EmbeddingOptions {
    fn default() -> Self {
        Self {
            margin: 0.05,
            restarts: 64,
            max_iter: 5000,
            seed: 0,
        }
    }
}

/// Unit vectors for the link vertices with every adjacent pair at positive
/// inner product and every link triangle positively oriented.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub points: Vec<[f64; 3]>,
    pub min_adjacent_dot: f64,
    pub restart: usize,
}

type V3 = [f64; 3];

fn dot3(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &V3, b: &V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn det3(a: &V3, b: &V3, c: &V3) -> f64 {
    dot3(a, &cross(b, c))
}

fn normalize(v: V3) -> V3 {
    let n = dot3(&v, &v).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Solid angle of the cone over a spherical triangle of unit vectors.
fn solid_angle(a: &V3, b: &V3, c: &V3) -> f64 {
    let num = det3(a, b, c);
    let den = 1.0 + dot3(a, b) + dot3(b, c) + dot3(c, a);
    2.0 * num.atan2(den)
}

fn random_unit(rng: &mut ChaCha8Rng) -> V3 {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n = dot3(&v, &v);
        if n > 1e-4 && n <= 1.0 {
            return normalize(v);
        }
    }
}

struct Objective {
    edges: Vec<(usize, usize)>,
    far: Vec<(usize, usize)>,
    tris: Vec<Tri>,
    margin: f64,
}

const ORIENT_FLOOR: f64 = 1e-2;
/// Barycentric floor at which the 3-WC position search stops ascending.
const WC3_TARGET: f64 = 1e-2;
const SPREAD_CAP: f64 = 0.5;
const SPREAD_WEIGHT: f64 = 0.1;

impl Objective {
    fn new(link: &SphereTriangulation, margin: f64) -> Self {
        let edges: Vec<(usize, usize)> = link.edges().into_iter().collect();
        let eset: BTreeSet<_> = edges.iter().copied().collect();
        let m = link.num_vertices();
        let far = (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .filter(|e| !eset.contains(e))
            .collect();
        Self {
            edges,
            far,
            tris: link.oriented(),
            margin,
        }
    }

    fn eval(&self, p: &[V3], grad: Option<&mut [V3]>) -> f64 {
        let mut f = 0.0;
        let mut g = vec![[0.0; 3]; p.len()];
        let add = |g: &mut Vec<V3>, i: usize, s: f64, v: &V3| {
            for k in 0..3 {
                g[i][k] += s * v[k];
            }
        };
        for &(i, j) in &self.edges {
            let h = self.margin - dot3(&p[i], &p[j]);
            if h > 0.0 {
                f += h * h;
                add(&mut g, i, -2.0 * h, &p[j]);
                add(&mut g, j, -2.0 * h, &p[i]);
            }
        }
        for &(i, j) in &self.far {
            let h = dot3(&p[i], &p[j]) - SPREAD_CAP;
            if h > 0.0 {
                f += SPREAD_WEIGHT * h * h;
                add(&mut g, i, 2.0 * SPREAD_WEIGHT * h, &p[j]);
                add(&mut g, j, 2.0 * SPREAD_WEIGHT * h, &p[i]);
            }
        }
        for t in &self.tris {
            let (a, b, c) = (&p[t[0]], &p[t[1]], &p[t[2]]);
            let h = ORIENT_FLOOR - det3(a, b, c);
            if h > 0.0 {
                f += h * h;
                add(&mut g, t[0], -2.0 * h, &cross(b, c));
                add(&mut g, t[1], -2.0 * h, &cross(c, a));
                add(&mut g, t[2], -2.0 * h, &cross(a, b));
            }
        }
        if let Some(out) = grad {
            out.copy_from_slice(&g);
        }
        f
    }

    fn accept(&self, p: &[V3]) -> Option<f64> {
        let min_dot = self
            .edges
            .iter()
            .map(|&(i, j)| dot3(&p[i], &p[j]))
            .fold(f64::INFINITY, f64::min);
        if min_dot < self.margin {
            return None;
        }
        let mut total = 0.0;
        for t in &self.tris {
            let (a, b, c) = (&p[t[0]], &p[t[1]], &p[t[2]]);
            if det3(a, b, c) <= 0.0 {
                return None;
            }
            total += solid_angle(a, b, c);
        }
        ((total - 4.0 * std::f64::consts::PI).abs() < 1e-6).then_some(min_dot)
    }
}

/// Projected gradient descent with backtracking on the unit sphere.
fn descend(obj: &Objective, mut p: Vec<V3>, max_iter: usize) -> Vec<V3> {
    let mut g = vec![[0.0; 3]; p.len()];
    let mut f = obj.eval(&p, Some(&mut g));
    let mut step = 0.5;
    for _ in 0..max_iter {
        if f == 0.0 || obj.accept(&p).is_some() {
            break;
        }
        let tangent: Vec<V3> = p
            .iter()
            .zip(&g)
            .map(|(x, gx)| {
                let d = dot3(x, gx);
                [gx[0] - d * x[0], gx[1] - d * x[1], gx[2] - d * x[2]]
            })
            .collect();
        let gnorm2: f64 = tangent.iter().map(|t| dot3(t, t)).sum();
        if gnorm2 < 1e-30 {
            break;
        }
        let mut improved = false;
        for _ in 0..40 {
            let trial: Vec<V3> = p
                .iter()
                .zip(&tangent)
                .map(|(x, t)| {
                    normalize([x[0] - step * t[0], x[1] - step * t[1], x[2] - step * t[2]])
                })
                .collect();
            let ft = obj.eval(&trial, None);
            if ft < f - 1e-4 * step * gnorm2 {
                p = trial;
                f = obj.eval(&p, Some(&mut g));
                step = (step * 1.5).min(4.0);
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    p
}

/// Searches for an arrangement of rays, one per link vertex, with every face
/// angle at the center at least `acos(margin)` short of a right angle and the
/// link triangles tiling the sphere once. `None` is inconclusive.
pub fn acute_link_embedding(
    link: &SphereTriangulation,
    opts: &EmbeddingOptions,
) -> Option<Embedding> {
    let obj = Objective::new(link, opts.margin);
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
        let init: Vec<V3> = (0..link.num_vertices()).map(|_| random_unit(&mut rng)).collect();
        let p = descend(&obj, init, opts.max_iter);
        if let Some(min_dot) = obj.accept(&p) {
            return Some(Embedding {
                points: p,
                min_adjacent_dot: min_dot,
                restart: r,
            });
        }
    }
    None
}

/// Checks a given arrangement of unit vectors against the acceptance test
/// of [`acute_link_embedding`].
pub fn check_embedding(link: &SphereTriangulation, points: &[V3], margin: f64) -> Option<f64> {
    let p: Vec<V3> = points.iter().map(|v| normalize(*v)).collect();
    Objective::new(link, margin).accept(&p)
}

/// Barycentric coordinates of the circumcenter of (0, a, b, c), in that order.
fn cone_barycentrics(a: &V3, b: &V3, c: &V3) -> [f64; 4] {
    let d = det3(a, b, c);
    let (bc, ca, ab) = (cross(b, c), cross(c, a), cross(a, b));
    let (na, nb, nc) = (dot3(a, a), dot3(b, b), dot3(c, c));
    let x: V3 = std::array::from_fn(|k| (na * bc[k] + nb * ca[k] + nc * ab[k]) / (2.0 * d));
    let la = det3(&x, b, c) / d;
    let lb = det3(a, &x, c) / d;
    let lc = det3(a, b, &x) / d;
    [1.0 - la - lb - lc, la, lb, lc]
}

/// Soft minimum (and hard minimum) over the normalized orientations and
/// circumcenter barycentrics of every cone tet.
fn wc3_objective(tris: &[Tri], p: &[V3], beta: f64) -> (f64, f64) {
    let mut terms = Vec::with_capacity(5 * tris.len());
    for t in tris {
        let (a, b, c) = (&p[t[0]], &p[t[1]], &p[t[2]]);
        let o = det3(a, b, c) / (dot3(a, a) * dot3(b, b) * dot3(c, c)).sqrt();
        terms.push(o);
        if o > 1e-6 {
            terms.extend(cone_barycentrics(a, b, c));
        } else {
            terms.push(-1.0);
        }
    }
    let mn = terms.iter().copied().fold(f64::INFINITY, f64::min);
    let s: f64 = terms.iter().map(|x| (-beta * (x - mn)).exp()).sum();
    (mn - s.ln() / beta, mn)
}

/// Tutte layout with `outer` as the boundary face, lifted to the sphere by
/// inverse stereographic projection.
fn tutte_sphere(link: &SphereTriangulation, tris: &[Tri], outer: usize, scale: f64) -> Vec<V3> {
    let m = link.num_vertices();
    let o = tris[outer];
    let mut nb = vec![Vec::new(); m];
    for (i, j) in link.edges() {
        nb[i].push(j);
        nb[j].push(i);
    }
    let mut q = vec![[0.0f64; 2]; m];
    for (s, &v) in o.iter().enumerate() {
        let a = std::f64::consts::TAU * s as f64 / 3.0;
        q[v] = [a.cos(), a.sin()];
    }
    for _ in 0..2000 {
        for v in 0..m {
            if o.contains(&v) || nb[v].is_empty() {
                continue;
            }
            let n = nb[v].len() as f64;
            let sx: f64 = nb[v].iter().map(|&w| q[w][0]).sum();
            let sy: f64 = nb[v].iter().map(|&w| q[w][1]).sum();
            q[v] = [sx / n, sy / n];
        }
    }
    let mut p: Vec<V3> = q
        .iter()
        .map(|&[x, y]| {
            let (x, y) = (x * scale, y * scale);
            let r2 = x * x + y * y;
            [2.0 * x / (r2 + 1.0), 2.0 * y / (r2 + 1.0), (1.0 - r2) / (r2 + 1.0)]
        })
        .collect();
    let neg = tris
        .iter()
        .filter(|t| det3(&p[t[0]], &p[t[1]], &p[t[2]]) < 0.0)
        .count();
    if neg * 2 > tris.len() {
        for v in &mut p {
            v[0] = -v[0];
        }
    }
    p
}

fn wc3_ascend(tris: &[Tri], mut p: Vec<V3>, beta: f64, iters: usize) -> Vec<V3> {
    let m = p.len();
    let (mut f, _) = wc3_objective(tris, &p, beta);
    let mut step = 0.05;
    let h = 1e-7;
    for _ in 0..iters {
        let mut g = vec![[0.0; 3]; m];
        for i in 0..m {
            for k in 0..3 {
                let old = p[i][k];
                p[i][k] = old + h;
                let fp = wc3_objective(tris, &p, beta).0;
                p[i][k] = old - h;
                let fm = wc3_objective(tris, &p, beta).0;
                p[i][k] = old;
                g[i][k] = (fp - fm) / (2.0 * h);
            }
        }
        let mut improved = false;
        for _ in 0..40 {
            let trial: Vec<V3> = p
                .iter()
                .zip(&g)
                .map(|(x, gx)| [x[0] + step * gx[0], x[1] + step * gx[1], x[2] + step * gx[2]])
                .collect();
            let ft = wc3_objective(tris, &trial, beta).0;
            if ft > f {
                p = trial;
                f = ft;
                step *= 1.5;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved || wc3_objective(tris, &p, beta).1 > WC3_TARGET {
            break;
        }
    }
    p
}

/// Searches for positions of the link vertices (center at the origin) that
/// make every cone tet 3-well-centered. Starts from Tutte layouts with
/// randomized radii, then ascends a soft minimum of the barycentrics using a
/// numerical gradient. Intended only as a cross-check against certificates.
pub fn wc3_star_search(
    link: &SphereTriangulation,
    opts: &EmbeddingOptions,
) -> Option<Vec<[f64; 3]>> {
    const REPS: usize = 12;
    let tris = link.oriented();
    if tris.is_empty() {
        return None;
    }
    let degrees = link.degrees();
    let iters = (opts.max_iter / 3).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for r in 0..opts.restarts {
        let outer = r % tris.len();
        let rep = (r / tris.len()) % REPS;
        let mut p = tutte_sphere(link, &tris, outer, [0.5, 1.0, 2.0][rep % 3]);
        for (v, x) in p.iter_mut().enumerate() {
            let mut s: f64 = rng.gen_range(0.5..2.0);
            if rep % 2 == 0 {
                s *= (5.0 / degrees[v].max(1) as f64).powi(2);
            }
            for c in x.iter_mut() {
                *c *= s;
            }
        }
        for beta in [10.0, 40.0, 150.0] {
            p = wc3_ascend(&tris, p, beta, iters);
        }
        if wc3_objective(&tris, &p, 1.0).1 > 0.0 && cones_3wc(&tris, &p) && solid_total(&tris, &p) {
            return Some(p);
        }
    }
    None
}

fn cones_3wc(tris: &[Tri], p: &[V3]) -> bool {
    let tol = Tolerance::default();
    let o = Point::from([0.0, 0.0, 0.0]);
    tris.iter().all(|t| {
        let Ok(s) = Simplex::new(vec![
            o.clone(),
            Point::from(p[t[0]]),
            Point::from(p[t[1]]),
            Point::from(p[t[2]]),
        ]) else {
            return false;
        };
        circumcenter(&s, &tol)
            .barycentric
            .iter()
            .all(|&a| a > tol.band(1.0))
    })
}

fn solid_total(tris: &[Tri], p: &[V3]) -> bool {
    let total: f64 = tris
        .iter()
        .map(|t| {
            solid_angle(
                &normalize(p[t[0]]),
                &normalize(p[t[1]]),
                &normalize(p[t[2]]),
            )
        })
        .sum();
    (total - 4.0 * std::f64::consts::PI).abs() < 1e-6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Wc3Status {
    Blocked { certificate: CertificateComplex },
    Unknown,
    Realized { witness: Vec<[f64; 3]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Wc2Status {
    Blocked { max_degree: usize },
    Unknown,
    Feasible { embedding: Vec<[f64; 3]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkClassification {
    pub link: SphereTriangulation,
    pub canonical_form: String,
    pub degree_list: DegreeList,
    pub wc3: Wc3Status,
    pub wc2: Wc2Status,
    pub wc2_degree_blocked: bool,
    pub notes: Vec<String>,
}

impl LinkClassification {
    pub fn wc3_certificate(&self) -> Option<&CertificateComplex> {
        match &self.wc3 {
            Wc3Status::Blocked { certificate } => Some(certificate),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub max_pool: usize,
    /// Run the acute-embedding search when the degree test is silent.
    pub embedding: Option<EmbeddingOptions>,
    /// Run the 3-WC position search when no certificate exists.
    pub wc3_search: Option<EmbeddingOptions>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            max_pool: DEFAULT_POOL_CAP,
            embedding: Some(EmbeddingOptions::default()),
            wc3_search: None,
        }
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn classify_link(
    link: &SphereTriangulation,
    opts: &ClassifyOptions,
) -> Result<LinkClassification, LinkError> {
    let mut notes = Vec::new();
    let wc3 = match search_certificate(link, opts.max_pool)? {
        Some(certificate) => Wc3Status::Blocked { certificate },
        None => {
            notes.push("no certificate complex".to_string());
            match &opts.wc3_search {
                Some(o) => match wc3_star_search(link, o) {
                    Some(witness) => Wc3Status::Realized { witness },
                    None => {
                        notes.push("3-wc position search failed".to_string());
                        Wc3Status::Unknown
                    }
                },
                None => Wc3Status::Unknown,
            }
        }
    };
    let blocked = nminus3_test(link);
    let wc2 = if blocked {
        Wc2Status::Blocked {
            max_degree: link.degree_list().max_degree(),
        }
    } else {
        match &opts.embedding {
            Some(o) => match acute_link_embedding(link, o) {
                Some(e) => Wc2Status::Feasible {
                    embedding: e.points,
                },
                None => {
                    notes.push("acute embedding search failed".to_string());
                    Wc2Status::Unknown
                }
            },
            None => Wc2Status::Unknown,
        }
    };
    Ok(LinkClassification {
        link: link.clone(),
        canonical_form: hex(&link.canonical_form()),
        degree_list: link.degree_list(),
        wc3,
        wc2,
        wc2_degree_blocked: blocked,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{enumerate_sphere_triangulations, tetrahedron_boundary};

    fn double_pyramid() -> SphereTriangulation {
        // Apexes 0 and 4 around the triangle 1, 2, 3.
        SphereTriangulation::new(
            5,
            vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [4, 2, 1], [4, 3, 2], [4, 1, 3]],
        )
        .unwrap()
    }

    #[test]
    fn hand_certificates() {
        let t = tetrahedron_boundary();
        assert_eq!(verify_certificate(&CertificateComplex { tets: vec![[0, 1, 2, 3]] }, &t), Ok(()));
        let dp = double_pyramid();
        let k = CertificateComplex {
            tets: vec![[0, 1, 2, 3], [1, 2, 3, 4]],
        };
        assert_eq!(verify_certificate(&k, &dp), Ok(()));
        let (band, oct) = generate_band_family(6).unwrap();
        assert_eq!(band.tets.len(), 4);
        assert_eq!(verify_certificate(&band, &oct), Ok(()));
        assert_eq!(oct.degree_list(), DegreeList(vec![4; 6]));
    }

    #[test]
    fn rejects_bad_complexes() {
        let dp = double_pyramid();
        let one = CertificateComplex {
            tets: vec![[0, 1, 2, 3]],
        };
        assert!(matches!(verify_certificate(&one, &dp), Err(CertificateFailure::ExtraBoundary(_))));
        let foreign = CertificateComplex {
            tets: vec![[0, 1, 2, 9]],
        };
        assert_eq!(
            verify_certificate(&foreign, &dp),
            Err(CertificateFailure::ForeignVertex(9))
        );
        assert_eq!(
            verify_certificate(&CertificateComplex { tets: vec![] }, &dp),
            Err(CertificateFailure::Empty)
        );
    }

    #[test]
    fn search_small_links() {
        for m in 4..=6 {
            for l in enumerate_sphere_triangulations(m).unwrap() {
                let k = search_certificate(&l, DEFAULT_POOL_CAP).unwrap().unwrap();
                assert_eq!(verify_certificate(&k, &l), Ok(()));
            }
        }
        let l = enumerate_sphere_triangulations(7).unwrap();
        assert!(matches!(
            search_certificate(&l[0], 3),
            Err(LinkError::SearchCapExceeded { cap: 3, .. })
        ));
    }

    #[test]
    fn band_degree_lists() {
        let (_, l) = generate_band_family(8).unwrap();
        assert_eq!(l.degree_list().to_string(), "(6,6,4,4,4,4,4,4)");
        let (k, l) = generate_open_band(8).unwrap();
        assert_eq!(l.degree_list().to_string(), "(7,7,4,4,4,4,3,3)");
        assert_eq!(verify_certificate(&k, &l), Ok(()));
        assert_eq!(generate_band_family(5).unwrap_err(), LinkError::BandSize { m: 5, min: 6 });
    }

    #[test]
    fn degree_obstruction() {
        assert!(nminus3_test(&tetrahedron_boundary()));
        for l in enumerate_sphere_triangulations(8).unwrap() {
            assert!(nminus3_test(&l));
        }
    }

    #[test]
    fn tetrahedron_has_no_acute_embedding() {
        let opts = EmbeddingOptions {
            restarts: 8,
            max_iter: 500,
            ..Default::default()
        };
        assert!(acute_link_embedding(&tetrahedron_boundary(), &opts).is_none());
    }

    #[test]
    fn classification_is_consistent() {
        let c = classify_link(&double_pyramid(), &ClassifyOptions::default()).unwrap();
        assert!(c.wc3_certificate().is_some());
        assert!(matches!(c.wc2, Wc2Status::Blocked { max_degree: 4 }));
        assert!(c.wc2_degree_blocked);
    }
}
