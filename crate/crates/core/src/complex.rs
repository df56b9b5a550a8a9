//! Embedded tetrahedral meshes and abstract triangulations of the 2-sphere.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MeshError, SphereError};
use crate::geom::{signed_volume, Point, Simplex, Tolerance};
use crate::predicates::{Status, WcVerdict};

pub type Tet = [usize; 4];
pub type Tri = [usize; 3];

pub(crate) fn sorted3(mut t: Tri) -> Tri {
    t.sort_unstable();
    t
}

fn sorted4(mut t: Tet) -> Tet {
    t.sort_unstable();
    t
}

/// Parity of the permutation that sorts `v` (true = odd).
fn odd_permutation(v: &[usize]) -> bool {
    let mut inv = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

/// A tetrahedral mesh in R^3. Tets are stored positively oriented.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TetMesh {
    vertices: Vec<Point>,
    tets: Vec<Tet>,
}

impl TetMesh {
    /// Validates indices, nondegeneracy, uniqueness and face incidence, and
    /// reorders each tet to positive orientation.
    pub fn new(vertices: Vec<Point>, tets: Vec<Tet>, tol: &Tolerance) -> Result<Self, MeshError> {
        for v in &vertices {
            if v.dim() != 3 {
                return Err(MeshError::Geom(crate::GeomError::NotFullDimensional {
                    ambient: v.dim(),
                    dim: 3,
                }));
            }
        }
        let mut seen: HashMap<Tet, usize> = HashMap::new();
        let mut out = Vec::with_capacity(tets.len());
        for (i, t) in tets.iter().enumerate() {
            for &v in t {
                if v >= vertices.len() {
                    return Err(MeshError::IndexOutOfRange {
                        tet: i,
                        vertex: v,
                        count: vertices.len(),
                    });
                }
            }
            let key = sorted4(*t);
            if key.windows(2).any(|w| w[0] == w[1]) {
                return Err(MeshError::RepeatedVertex(i));
            }
            if let Some(&j) = seen.get(&key) {
                return Err(MeshError::DuplicateTet(j, i));
            }
            seen.insert(key, i);
            let s = simplex_of(&vertices, t);
            if s.is_degenerate(tol) {
                return Err(MeshError::DegenerateTet(i));
            }
            let mut t = *t;
            if signed_volume(&s)? < 0.0 {
                t.swap(2, 3);
            }
            out.push(t);
        }
        let mesh = Self {
            vertices,
            tets: out,
        };
        if let Some((f, _)) = mesh.face_map().into_iter().find(|(_, ts)| ts.len() > 2) {
            return Err(MeshError::OverfullFace(f));
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn tets(&self) -> &[Tet] {
        &self.tets
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn tet_simplex(&self, i: usize) -> Simplex {
        simplex_of(&self.vertices, &self.tets[i])
    }

    /// Sorted triangle -> incident tets.
    pub fn face_map(&self) -> BTreeMap<Tri, Vec<usize>> {
        let mut m: BTreeMap<Tri, Vec<usize>> = BTreeMap::new();
        for (i, t) in self.tets.iter().enumerate() {
            for skip in 0..4 {
                let f = tri_without(t, skip);
                m.entry(sorted3(f)).or_default().push(i);
            }
        }
        m
    }

    /// Triangles in exactly one tet, sorted.
    pub fn boundary_faces(&self) -> Vec<Tri> {
        self.face_map()
            .into_iter()
            .filter(|(_, ts)| ts.len() == 1)
            .map(|(f, _)| f)
            .collect()
    }

    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        let mut e = BTreeSet::new();
        for t in &self.tets {
            for i in 0..4 {
                for j in i + 1..4 {
                    e.insert((t[i].min(t[j]), t[i].max(t[j])));
                }
            }
        }
        e
    }

    pub fn incident_tets(&self, v: usize) -> Vec<usize> {
        (0..self.tets.len()).filter(|&i| self.tets[i].contains(&v)).collect()
    }

    pub fn incident_edge_count(&self, v: usize) -> usize {
        self.edges().iter().filter(|(a, b)| *a == v || *b == v).count()
    }

    /// Triangles opposite `v` in the tets around `v`, oriented so that each
    /// `(v, a, b, c)` is positively oriented.
    pub fn link_of(&self, v: usize) -> Result<VertexLink, MeshError> {
        if v >= self.vertices.len() {
            return Err(MeshError::VertexOutOfRange(v));
        }
        let mut triangles = Vec::new();
        for t in &self.tets {
            if let Some(pos) = t.iter().position(|&x| x == v) {
                let mut f = tri_without(t, pos);
                let mut order = vec![v];
                order.extend_from_slice(&f);
                let parity_tet = odd_permutation(t);
                if odd_permutation(&order) != parity_tet {
                    f.swap(1, 2);
                }
                triangles.push(f);
            }
        }
        let mut vertices: Vec<usize> = triangles.iter().flatten().copied().collect();
        vertices.sort_unstable();
        vertices.dedup();
        let index: HashMap<usize, usize> =
            vertices.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let local: Vec<Tri> = triangles
            .iter()
            .map(|t| [index[&t[0]], index[&t[1]], index[&t[2]]])
            .collect();
        let triangulation = SphereTriangulation::new(vertices.len(), local).ok();
        Ok(VertexLink {
            center: v,
            vertices,
            triangles,
            triangulation,
        })
    }

    /// Vertices whose link is a 2-sphere.
    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.link_of(v).map(|l| l.is_interior()).unwrap_or(false))
            .collect()
    }

    /// Total unsigned volume.
    pub fn volume(&self) -> f64 {
        (0..self.tets.len())
            .map(|i| signed_volume(&self.tet_simplex(i)).unwrap_or(0.0).abs())
            .sum()
    }
}

fn tri_without(t: &Tet, skip: usize) -> Tri {
    let mut f = [0; 3];
    let mut k = 0;
    for (i, &v) in t.iter().enumerate() {
        if i != skip {
            f[k] = v;
            k += 1;
        }
    }
    f
}

fn simplex_of(vertices: &[Point], t: &Tet) -> Simplex {
    Simplex::new(t.iter().map(|&i| vertices[i].clone()).collect())
        .expect("four points in R^3 form a 3-simplex")
}

/// Link of a mesh vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexLink {
    pub center: usize,
    /// Mesh indices of link vertices, ascending. Local index `i` of
    /// `triangulation` refers to `vertices[i]`.
    pub vertices: Vec<usize>,
    /// Oriented triangles in mesh indices.
    pub triangles: Vec<Tri>,
    /// Present iff the link validates as a triangulated sphere.
    pub triangulation: Option<SphereTriangulation>,
}

impl VertexLink {
    pub fn is_interior(&self) -> bool {
        self.triangulation.is_some()
    }
}

/// Sorted (descending) vertex degrees.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DegreeList(pub Vec<usize>);

impl DegreeList {
    pub fn max_degree(&self) -> usize {
        self.0.first().copied().unwrap_or(0)
    }
}

impl fmt::Display for DegreeList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<&[usize]> for DegreeList {
    fn from(v: &[usize]) -> Self {
        let mut v = v.to_vec();
        v.sort_unstable_by(|a, b| b.cmp(a));
        DegreeList(v)
    }
}

/// An abstract triangulation of S^2 on vertices `0..m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereTriangulation {
    m: usize,
    triangles: Vec<Tri>,
}

impl SphereTriangulation {
    pub fn new(m: usize, triangles: Vec<Tri>) -> Result<Self, SphereError> {
        validate_sphere(m, &triangles)?;
        Ok(Self { m, triangles })
    }

    pub fn num_vertices(&self) -> usize {
        self.m
    }

    pub fn triangles(&self) -> &[Tri] {
        &self.triangles
    }

    pub fn num_edges(&self) -> usize {
        3 * self.triangles.len() / 2
    }

    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        let mut e = BTreeSet::new();
        for t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                e.insert((a.min(b), a.max(b)));
            }
        }
        e
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.m];
        for (a, b) in self.edges() {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn degree_list(&self) -> DegreeList {
        let dl = DegreeList::from(&self.degrees()[..]);
        debug_assert_eq!(dl.0.iter().sum::<usize>(), 6 * (self.m - 2));
        dl
    }

    pub fn has_triangle(&self, t: Tri) -> bool {
        let t = sorted3(t);
        self.triangles.iter().any(|x| sorted3(*x) == t)
    }

    /// Sorted triangle set.
    pub fn triangle_set(&self) -> BTreeSet<Tri> {
        self.triangles.iter().map(|t| sorted3(*t)).collect()
    }

    /// Applies `new = perm[old]`.
    pub fn relabel(&self, perm: &[usize]) -> SphereTriangulation {
        SphereTriangulation {
            m: self.m,
            triangles: self
                .triangles
                .iter()
                .map(|t| [perm[t[0]], perm[t[1]], perm[t[2]]])
                .collect(),
        }
    }

    /// Triangles reoriented coherently (first triangle keeps its order).
    pub fn oriented(&self) -> Vec<Tri> {
        let f = self.triangles.len();
        let mut edge_tris: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edge_tris.entry((a.min(b), a.max(b))).or_default().push(i);
            }
        }
        let mut out: Vec<Option<Tri>> = vec![None; f];
        out[0] = Some(self.triangles[0]);
        let mut queue = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            let t = out[i].unwrap();
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                for &j in &edge_tris[&(a.min(b), a.max(b))] {
                    if out[j].is_some() {
                        continue;
                    }
                    let mut s = self.triangles[j];
                    // Neighbor must traverse the shared edge as b -> a.
                    let has_ab = (0..3).any(|q| s[q] == a && s[(q + 1) % 3] == b);
                    if has_ab {
                        s.swap(1, 2);
                    }
                    out[j] = Some(s);
                    queue.push_back(j);
                }
            }
        }
        out.into_iter().map(|t| t.unwrap()).collect()
    }

    /// Cyclic neighbor order around each vertex, following the coherent
    /// orientation of [`oriented`](Self::oriented).
    pub fn rotation_system(&self) -> Vec<Vec<usize>> {
        let mut next: Vec<HashMap<usize, usize>> = vec![HashMap::new(); self.m];
        for t in self.oriented() {
            for k in 0..3 {
                next[t[k]].insert(t[(k + 1) % 3], t[(k + 2) % 3]);
            }
        }
        next.iter()
            .map(|nx| {
                let start = *nx.keys().min().unwrap();
                let mut cyc = vec![start];
                let mut cur = nx[&start];
                while cur != start {
                    cyc.push(cur);
                    cur = nx[&cur];
                }
                cyc
            })
            .collect()
    }

    /// Isomorphism-invariant encoding: the lexicographically least BFS code
    /// over all directed-edge roots and both orientations.
    pub fn canonical_form(&self) -> Vec<u8> {
        self.canonical_labeling().0
    }

    /// Canonical code and a labeling `perm[old] = new` attaining it.
    pub fn canonical_labeling(&self) -> (Vec<u8>, Vec<usize>) {
        let rot = self.rotation_system();
        let rev: Vec<Vec<usize>> = rot
            .iter()
            .map(|c| {
                let mut r = c.clone();
                r.reverse();
                r
            })
            .collect();
        let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
        for r in [&rot, &rev] {
            for u in 0..self.m {
                for &w in &r[u] {
                    let (code, perm) = bfs_code(r, u, w, best.as_ref().map(|b| &b.0));
                    if let Some(code) = code {
                        best = Some((code, perm));
                    }
                }
            }
        }
        let (code, perm) = best.expect("nonempty triangulation");
        let mut bytes = Vec::with_capacity(2 * code.len() + 2);
        bytes.extend_from_slice(&(self.m as u16).to_be_bytes());
        for c in code {
            bytes.extend_from_slice(&(c as u16).to_be_bytes());
        }
        (bytes, perm)
    }

    /// Relabeled copy in canonical labeling with sorted triangles.
    pub fn canonicalize(&self) -> SphereTriangulation {
        let (_, perm) = self.canonical_labeling();
        let mut t: Vec<Tri> = self
            .relabel(&perm)
            .triangles
            .into_iter()
            .map(sorted3)
            .collect();
        t.sort_unstable();
        SphereTriangulation {
            m: self.m,
            triangles: t,
        }
    }

    pub fn is_isomorphic(&self, other: &SphereTriangulation) -> bool {
        self.m == other.m && self.canonical_form() == other.canonical_form()
    }

    /// Splits vertex `v` along its rotation: neighbors `rot[i] ..= rot[j]`
    /// (cyclically) move to a new vertex `m`, which is joined to `v`.
    /// Adjacent `i, j` insert a degree-3 vertex.
    pub fn split_vertex(&self, v: usize, i: usize, j: usize) -> SphereTriangulation {
        let rot = &self.rotation_system()[v];
        split_with_rotation(self, rot, v, i, j)
    }
}

fn split_with_rotation(
    tri: &SphereTriangulation,
    rot: &[usize],
    v: usize,
    i: usize,
    j: usize,
) -> SphereTriangulation {
    let d = rot.len();
    assert!(i < d && j < d && i != j, "split indices out of range");
    let nv = tri.m;
    let mut moved = BTreeSet::new();
    let mut k = i;
    while k != j {
        moved.insert((rot[k], rot[(k + 1) % d]));
        k = (k + 1) % d;
    }
    let mut out: Vec<Tri> = Vec::with_capacity(tri.triangles.len() + 2);
    for t in &tri.triangles {
        if let Some(p) = t.iter().position(|&x| x == v) {
            let (a, b) = (t[(p + 1) % 3], t[(p + 2) % 3]);
            if moved.contains(&(a, b)) || moved.contains(&(b, a)) {
                let mut s = *t;
                s[p] = nv;
                out.push(s);
                continue;
            }
        }
        out.push(*t);
    }
    out.push([v, nv, rot[i]]);
    out.push([v, nv, rot[j]]);
    SphereTriangulation {
        m: nv + 1,
        triangles: out,
    }
}

/// BFS code from root `u` with first neighbor `w`; returns `None` as soon as
/// the code exceeds `bound`.
fn bfs_code(
    rot: &[Vec<usize>],
    u: usize,
    w: usize,
    bound: Option<&Vec<u32>>,
) -> (Option<Vec<u32>>, Vec<usize>) {
    const SEP: u32 = u32::MAX;
    let m = rot.len();
    let mut label = vec![usize::MAX; m];
    let mut reference = vec![usize::MAX; m];
    let mut order = Vec::with_capacity(m);
    label[u] = 0;
    reference[u] = w;
    order.push(u);
    let mut code: Vec<u32> = Vec::new();
    let mut head = 0;
    let mut less = false;
    while head < order.len() {
        let x = order[head];
        head += 1;
        let r = &rot[x];
        let start = r.iter().position(|&y| y == reference[x]).unwrap();
        for k in 0..r.len() {
            let y = r[(start + k) % r.len()];
            if label[y] == usize::MAX {
                label[y] = order.len();
                reference[y] = x;
                order.push(y);
            }
            code.push(label[y] as u32);
            if !check_prefix(&code, bound, &mut less) {
                return (None, label);
            }
        }
        code.push(SEP);
        if !check_prefix(&code, bound, &mut less) {
            return (None, label);
        }
    }
    if let Some(b) = bound {
        if !less && code >= *b {
            return (None, label);
        }
    }
    (Some(code), label)
}

/// Keeps going while the code could still be strictly smaller than `bound`.
fn check_prefix(code: &[u32], bound: Option<&Vec<u32>>, less: &mut bool) -> bool {
    let Some(b) = bound else { return true };
    if *less {
        return true;
    }
    let i = code.len() - 1;
    match code[i].cmp(&b[i]) {
        std::cmp::Ordering::Less => {
            *less = true;
            true
        }
        std::cmp::Ordering::Equal => true,
        std::cmp::Ordering::Greater => false,
    }
}

/// Checks every sphere-triangulation invariant and reports the first failure.
pub fn validate_sphere(m: usize, triangles: &[Tri]) -> Result<(), SphereError> {
    if m < 4 {
        return Err(SphereError::TooFewVertices(m));
    }
    let mut seen = HashMap::new();
    for (i, t) in triangles.iter().enumerate() {
        if t.iter().any(|&v| v >= m) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            return Err(SphereError::BadTriangle(i));
        }
        if seen.insert(sorted3(*t), i).is_some() {
            return Err(SphereError::DuplicateTriangle(i));
        }
    }
    let mut used = vec![false; m];
    triangles.iter().flatten().for_each(|&v| used[v] = true);
    if let Some(v) = used.iter().position(|u| !u) {
        return Err(SphereError::UnusedVertex(v));
    }
    let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *edges.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    if let Some((&(a, b), &c)) = edges.iter().find(|(_, &c)| c != 2) {
        return Err(SphereError::EdgeMultiplicity(a, b, c));
    }
    let mut adj = vec![Vec::new(); m];
    for &(a, b) in edges.keys() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; m];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(SphereError::Disconnected);
    }
    let chi = m as i64 - edges.len() as i64 + triangles.len() as i64;
    if chi != 2 {
        return Err(SphereError::Euler(chi));
    }
    for v in 0..m {
        let link: Vec<(usize, usize)> = triangles
            .iter()
            .filter_map(|t| {
                let p = t.iter().position(|&x| x == v)?;
                Some((t[(p + 1) % 3], t[(p + 2) % 3]))
            })
            .collect();
        if !is_single_cycle(&link) {
            return Err(SphereError::VertexLink(v));
        }
    }
    Ok(())
}

/// Whether undirected edges form exactly one cycle through all their vertices.
fn is_single_cycle(edges: &[(usize, usize)]) -> bool {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if adj.len() < 3 || adj.values().any(|n| n.len() != 2) {
        return false;
    }
    let start = *adj.keys().next().unwrap();
    let (mut prev, mut cur) = (start, adj[&start][0]);
    let mut len = 1;
    while cur != start {
        let n = &adj[&cur];
        let nxt = if n[0] == prev { n[1] } else { n[0] };
        prev = cur;
        cur = nxt;
        len += 1;
        if len > adj.len() {
            return false;
        }
    }
    len == adj.len()
}

/// Boundary of the tetrahedron on vertices `0..4`.
pub fn tetrahedron_boundary() -> SphereTriangulation {
    SphereTriangulation::new(4, vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]])
        .expect("tetrahedron boundary is valid")
}

/// Nonisomorphic triangulations of S^2 with `m` vertices, `4 <= m <= 10`,
/// in canonical labeling, ordered by degree list (descending) then code.
pub fn enumerate_sphere_triangulations(
    m: usize,
) -> Result<Vec<SphereTriangulation>, crate::error::LinkError> {
    use rayon::prelude::*;
    if !(4..=10).contains(&m) {
        return Err(crate::error::LinkError::EnumerationRange(m));
    }
    let mut level = vec![tetrahedron_boundary().canonicalize()];
    for _ in 4..m {
        let children: Vec<(Vec<u8>, SphereTriangulation)> = level
            .par_iter()
            .flat_map_iter(|t| {
                let rots = t.rotation_system();
                let mut out = Vec::new();
                for (v, rot) in rots.iter().enumerate() {
                    for i in 0..rot.len() {
                        for j in 0..rot.len() {
                            if i != j {
                                let c = split_with_rotation(t, rot, v, i, j);
                                out.push((c.canonical_form(), c));
                            }
                        }
                    }
                }
                out
            })
            .collect();
        let mut unique: BTreeMap<Vec<u8>, SphereTriangulation> = BTreeMap::new();
        for (code, t) in children {
            unique.entry(code).or_insert(t);
        }
        level = unique.into_values().map(|t| t.canonicalize()).collect();
    }
    let mut keyed: Vec<(DegreeList, Vec<u8>, SphereTriangulation)> = level
        .into_iter()
        .map(|t| (t.degree_list(), t.canonical_form(), t))
        .collect();
    keyed.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    Ok(keyed.into_iter().map(|(_, _, t)| t).collect())
}

/// Face angles at `u`: every triangle `[u v_i v_j]` of a tet around `u` must
/// have `<v_i - u, v_j - u> > 0`. Margin is the least cosine.
pub fn face_angles_acute_at(mesh: &TetMesh, u: usize, tol: &Tolerance) -> WcVerdict {
    let pu = &mesh.vertices()[u];
    let mut pairs = BTreeSet::new();
    for t in mesh.tets().iter().filter(|t| t.contains(&u)) {
        let others: Vec<usize> = t.iter().copied().filter(|&x| x != u).collect();
        for a in 0..3 {
            for b in a + 1..3 {
                pairs.insert((others[a].min(others[b]), others[a].max(others[b])));
            }
        }
    }
    let detail = pairs
        .into_iter()
        .map(|(i, j)| {
            let a = mesh.vertices()[i].sub(pu);
            let b = mesh.vertices()[j].sub(pu);
            let cos = crate::linalg::dot(&a, &b)
                / (crate::linalg::dot(&a, &a).sqrt() * crate::linalg::dot(&b, &b).sqrt());
            crate::predicates::Check {
                label: format!("angle[{i},{u},{j}]"),
                margin: cos,
                status: Status::classify(cos, tol),
            }
        })
        .collect();
    WcVerdict::from_checks(detail)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn octahedron() -> SphereTriangulation {
        // Poles 0, 5; equator 1..=4.
        let mut t = Vec::new();
        for i in 0..4 {
            let (a, b) = (1 + i, 1 + (i + 1) % 4);
            t.push([0, a, b]);
            t.push([5, b, a]);
        }
        SphereTriangulation::new(6, t).unwrap()
    }

    fn unit_tet_mesh() -> TetMesh {
        let v = vec![
            Point::from([0.0, 0.0, 0.0]),
            Point::from([1.0, 0.0, 0.0]),
            Point::from([0.0, 1.0, 0.0]),
            Point::from([0.0, 0.0, 1.0]),
        ];
        TetMesh::new(v, vec![[0, 2, 1, 3]], &Tolerance::default()).unwrap()
    }

    #[test]
    fn mesh_reorients_and_validates() {
        let m = unit_tet_mesh();
        assert!(signed_volume(&m.tet_simplex(0)).unwrap() > 0.0);
        let v = m.vertices().to_vec();
        let tol = Tolerance::default();
        assert_eq!(
            TetMesh::new(v.clone(), vec![[0, 1, 2, 4]], &tol),
            Err(MeshError::IndexOutOfRange { tet: 0, vertex: 4, count: 4 })
        );
        assert_eq!(
            TetMesh::new(v.clone(), vec![[0, 1, 2, 3], [3, 2, 1, 0]], &tol),
            Err(MeshError::DuplicateTet(0, 1))
        );
        assert_eq!(TetMesh::new(v, vec![[0, 1, 1, 3]], &tol), Err(MeshError::RepeatedVertex(0)));
        let flat = vec![
            Point::from([0.0, 0.0, 0.0]),
            Point::from([1.0, 0.0, 0.0]),
            Point::from([0.0, 1.0, 0.0]),
            Point::from([1.0, 1.0, 0.0]),
        ];
        assert_eq!(TetMesh::new(flat, vec![[0, 1, 2, 3]], &tol), Err(MeshError::DegenerateTet(0)));
    }

    #[test]
    fn single_tet_link_is_not_interior() {
        let m = unit_tet_mesh();
        for v in 0..4 {
            let l = m.link_of(v).unwrap();
            assert_eq!(l.triangles.len(), 1);
            assert!(!l.is_interior());
        }
        assert_eq!(m.link_of(9), Err(MeshError::VertexOutOfRange(9)));
    }

    #[test]
    fn link_triangles_face_outward() {
        // Cone over the octahedron: link of the center is oriented outward.
        let o = octahedron();
        let pts = [
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, -1.0],
        ];
        let mut v = vec![Point::from([0.0, 0.0, 0.0])];
        v.extend(pts.iter().map(|p| Point::from(*p)));
        let tets = o.triangles().iter().map(|t| [0, t[0] + 1, t[1] + 1, t[2] + 1]).collect();
        let mesh = TetMesh::new(v, tets, &Tolerance::default()).unwrap();
        let l = mesh.link_of(0).unwrap();
        assert!(l.is_interior());
        for t in &l.triangles {
            let s = Simplex::new(vec![
                Point::from([0.0, 0.0, 0.0]),
                mesh.vertices()[t[0]].clone(),
                mesh.vertices()[t[1]].clone(),
                mesh.vertices()[t[2]].clone(),
            ])
            .unwrap();
            assert!(signed_volume(&s).unwrap() > 0.0);
        }
        assert_eq!(mesh.interior_vertices(), vec![0]);
        assert_eq!(mesh.incident_edge_count(0), 6);
        assert!(l.triangulation.unwrap().is_isomorphic(&o));
    }

    #[test]
    fn validation_diagnostics() {
        let o = octahedron();
        assert_eq!(o.num_edges(), 12);
        assert_eq!(o.degree_list(), DegreeList(vec![4; 6]));
        let mut t = o.triangles().to_vec();
        t.pop();
        assert!(matches!(validate_sphere(6, &t), Err(SphereError::EdgeMultiplicity(_, _, 1))));
        assert_eq!(validate_sphere(3, &t), Err(SphereError::TooFewVertices(3)));
        assert_eq!(validate_sphere(7, o.triangles()), Err(SphereError::UnusedVertex(6)));
        // Two tetrahedra glued at a vertex: edges fine, Euler fails.
        let mut two = tetrahedron_boundary().triangles().to_vec();
        two.extend([[0, 5, 4], [0, 4, 6], [0, 6, 5], [4, 5, 6]]);
        assert_eq!(validate_sphere(7, &two), Err(SphereError::Euler(3)));
        assert_eq!(tetrahedron_boundary().degree_list().to_string(), "(3,3,3,3)");
    }

    #[test]
    fn canonical_form_ignores_labels_and_orientation() {
        let o = octahedron();
        let perm = [3, 5, 0, 2, 4, 1];
        assert_eq!(o.canonical_form(), o.relabel(&perm).canonical_form());
        let mirrored = SphereTriangulation::new(
            6,
            o.triangles().iter().map(|t| [t[0], t[2], t[1]]).collect(),
        )
        .unwrap();
        assert_eq!(o.canonical_form(), mirrored.canonical_form());
        let c = o.canonicalize();
        assert_eq!(c.canonical_form(), o.canonical_form());
    }

    #[test]
    fn six_vertex_triangulations_differ() {
        let six = enumerate_sphere_triangulations(6).unwrap();
        assert_eq!(six.len(), 2);
        assert_ne!(six[0].canonical_form(), six[1].canonical_form());
        let lists: Vec<String> = six.iter().map(|t| t.degree_list().to_string()).collect();
        assert_eq!(lists, vec!["(5,5,4,4,3,3)", "(4,4,4,4,4,4)"]);
    }

    #[test]
    fn small_counts() {
        let counts: Vec<usize> = (4..=8)
            .map(|m| enumerate_sphere_triangulations(m).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 14]);
        assert!(enumerate_sphere_triangulations(3).is_err());
        assert!(enumerate_sphere_triangulations(11).is_err());
    }

    #[test]
    fn face_angles_at_corner() {
        let m = unit_tet_mesh();
        let tol = Tolerance::default();
        assert_eq!(face_angles_acute_at(&m, 0, &tol).status, Status::Boundary);
        assert_eq!(face_angles_acute_at(&m, 1, &tol).status, Status::Satisfied);
    }
}
