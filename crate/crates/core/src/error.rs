use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("simplex has no vertices")]
    Empty,
    #[error("a {dim}-simplex needs {} vertices, got {got}", dim + 1)]
    VertexCount { dim: usize, got: usize },
    #[error("vertices have different ambient dimensions")]
    MixedDimensions,
    #[error("ambient dimension {ambient} is smaller than simplex dimension {dim}")]
    AmbientTooSmall { ambient: usize, dim: usize },
    #[error("operation needs a full-dimensional simplex (ambient {ambient}, dim {dim})")]
    NotFullDimensional { ambient: usize, dim: usize },
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("degenerate affine hull")]
    Degenerate,
    #[error("apex in facet plane")]
    ApexInFacetPlane,
    #[error("not isosceles: facet vertex {vertex} is at distance {dist} from the apex, expected {expected}")]
    NotIsosceles {
        vertex: usize,
        dist: f64,
        expected: f64,
    },
    #[error("k = {k} is outside 1..={dim}")]
    FaceDimension { k: usize, dim: usize },
    #[error("empty bounding box")]
    EmptyBox,
    #[error("grid resolution must be at least 2 per axis")]
    Resolution,
    #[error("invalid tolerance (rel {rel}, abs {abs}); both must be positive")]
    InvalidTolerance { rel: f64, abs: f64 },
}

/// First violated invariant of a candidate sphere triangulation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SphereError {
    #[error("a triangulation of S^2 needs at least 4 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("triangle {0} has a repeated or out-of-range vertex")]
    BadTriangle(usize),
    #[error("triangle {0} is listed twice")]
    DuplicateTriangle(usize),
    #[error("vertex {0} is not used by any triangle")]
    UnusedVertex(usize),
    #[error("edge ({0}, {1}) lies in {2} triangles, expected 2")]
    EdgeMultiplicity(usize, usize, usize),
    #[error("edge graph is not connected")]
    Disconnected,
    #[error("Euler characteristic m - e + f = {0}, expected 2")]
    Euler(i64),
    #[error("link of vertex {0} is not a single cycle")]
    VertexLink(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("tet {tet} references vertex {vertex}, but the mesh has {count} vertices")]
    IndexOutOfRange {
        tet: usize,
        vertex: usize,
        count: usize,
    },
    #[error("tet {0} has a repeated vertex")]
    RepeatedVertex(usize),
    #[error("tet {0} is degenerate")]
    DegenerateTet(usize),
    #[error("tets {0} and {1} have the same vertex set")]
    DuplicateTet(usize, usize),
    #[error("triangle {0:?} is shared by more than two tets")]
    OverfullFace([usize; 3]),
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error("certificate search cap exceeded: candidate pool has {pool} tets, cap is {cap}")]
    SearchCapExceeded { pool: usize, cap: usize },
    #[error("triangulation sizes outside 4..=10 are not enumerated (got {0})")]
    EnumerationRange(usize),
    #[error("band family needs m >= {min}, got {m}")]
    BandSize { m: usize, min: usize },
    #[error(transparent)]
    Sphere(#[from] SphereError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("k-gon construction needs k >= 4, got {0}")]
    KTooSmall(usize),
    #[error("ring count must be at least 2, got {0}")]
    TooFewRings(usize),
    #[error("ring radius and height do not put the ring on the unit sphere (r^2 + h^2 = {0})")]
    OffSphere(f64),
    #[error("surface vertex {vertex} is at distance {dist} from the center, expected {expected}")]
    NotSpherical {
        vertex: usize,
        dist: f64,
        expected: f64,
    },
    #[error("constructed triangle {0} is not acute or too close to the center")]
    NotAcute(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no epsilon found after {0} halvings")]
    NoEpsilon(usize),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("fixture reconstruction failed: {0}")]
    FixtureReconstruction(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
}

/// Parse errors carry 1-based line numbers.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unexpected end of input: {0}")]
    Truncated(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
}

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("mesh is not a triangulation of the unit cube: {0}")]
    NotACube(String),
}
