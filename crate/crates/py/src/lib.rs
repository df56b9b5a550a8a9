//! Python bindings. Nested reports cross the boundary as JSON strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use wcmesh::complex as cx;
use wcmesh::constructions as cs;
use wcmesh::link_analysis as la;
use wcmesh::predicates as pr;
use wcmesh::{geom, io as wio, Point, Tolerance};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn tolerance(rel: f64, abs: f64) -> PyResult<Tolerance> {
    Tolerance::new(rel, abs).map_err(err)
}

fn points(coords: Vec<Vec<f64>>) -> PyResult<Vec<Point>> {
    coords.into_iter().map(|c| Point::new(c).map_err(err)).collect()
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

/// Outcome of a predicate: status string, signed margin, labelled checks.
#[pyclass(name = "Verdict", module = "wcmesh", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyVerdict {
    #[pyo3(get)]
    status: String,
    #[pyo3(get)]
    margin: f64,
    #[pyo3(get)]
    detail: Vec<(String, f64, String)>,
}

impl From<pr::WcVerdict> for PyVerdict {
    fn from(v: pr::WcVerdict) -> Self {
        Self {
            status: v.status.as_str().to_string(),
            margin: v.margin,
            detail: v
                .detail
                .into_iter()
                .map(|c| (c.label, c.margin, c.status.as_str().to_string()))
                .collect(),
        }
    }
}

#[pymethods]
impl PyVerdict {
    fn __bool__(&self) -> bool {
        self.status == "SATISFIED"
    }

    fn __repr__(&self) -> String {
        format!("Verdict({}, margin={:e})", self.status, self.margin)
    }
}

#[pyclass(name = "Simplex", module = "wcmesh", frozen)]
struct PySimplex {
    inner: geom::Simplex,
}

#[pymethods]
impl PySimplex {
    #[new]
    fn new(coords: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: geom::Simplex::new(points(coords)?).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner.vertices().iter().map(|p| p.coords().to_vec()).collect()
    }

    /// `(center, radius, barycentric)`.
    fn circumsphere(&self) -> PyResult<(Vec<f64>, f64, Vec<f64>)> {
        let c = geom::circumcenter(&self.inner, &Tolerance::default());
        if c.degenerate {
            return Err(PyValueError::new_err("degenerate simplex"));
        }
        Ok((c.center.coords().to_vec(), c.radius, c.barycentric))
    }

    #[pyo3(signature = (k=None, rel=1e-9, abs=1e-12))]
    fn well_centered(&self, k: Option<usize>, rel: f64, abs: f64) -> PyResult<PyVerdict> {
        let tol = tolerance(rel, abs)?;
        let v = match k {
            None => pr::is_n_well_centered(&self.inner, &tol),
            Some(k) => pr::is_k_well_centered(&self.inner, k, &tol),
        };
        v.map(Into::into).map_err(err)
    }

    #[pyo3(signature = (rel=1e-9, abs=1e-12))]
    fn completely_well_centered(&self, rel: f64, abs: f64) -> PyResult<PyVerdict> {
        pr::is_completely_well_centered(&self.inner, &tolerance(rel, abs)?)
            .map(Into::into)
            .map_err(err)
    }

    #[pyo3(signature = (rel=1e-9, abs=1e-12))]
    fn equatorial_ball_test(&self, rel: f64, abs: f64) -> PyResult<PyVerdict> {
        pr::equatorial_ball_test(&self.inner, &tolerance(rel, abs)?)
            .map(Into::into)
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Simplex(dim={}, vertices={:?})", self.inner.dim(), self.vertices())
    }
}

fn facet_apex(facet: Vec<Vec<f64>>, apex: Vec<f64>) -> PyResult<(geom::Simplex, Point)> {
    Ok((
        geom::Simplex::new(points(facet)?).map_err(err)?,
        Point::new(apex).map_err(err)?,
    ))
}

macro_rules! facet_predicate {
    ($name:ident, $f:path) => {
        #[pyfunction]
        #[pyo3(signature = (facet, apex, rel=1e-9, abs=1e-12))]
        fn $name(facet: Vec<Vec<f64>>, apex: Vec<f64>, rel: f64, abs: f64) -> PyResult<PyVerdict> {
            let (f, a) = facet_apex(facet, apex)?;
            $f(&f, &a, &tolerance(rel, abs)?).map(Into::into).map_err(err)
        }
    };
}

facet_predicate!(prism_condition, pr::prism_condition);
facet_predicate!(cylinder_condition, pr::cylinder_condition);
facet_predicate!(polynomial_region_test, pr::polynomial_region_test);
facet_predicate!(one_facet_equatorial_ball, pr::one_facet_equatorial_ball);

#[pyclass(name = "SphereTriangulation", module = "wcmesh", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySphere {
    inner: cx::SphereTriangulation,
}

#[pymethods]
impl PySphere {
    #[new]
    fn new(m: usize, triangles: Vec<[usize; 3]>) -> PyResult<Self> {
        Ok(Self {
            inner: cx::SphereTriangulation::new(m, triangles).map_err(err)?,
        })
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn triangles(&self) -> Vec<[usize; 3]> {
        self.inner.triangles().to_vec()
    }

    fn degree_list(&self) -> Vec<usize> {
        self.inner.degree_list().0
    }

    /// Hex string; equal for isomorphic triangulations.
    fn canonical_form(&self) -> String {
        la::hex(&self.inner.canonical_form())
    }

    fn is_isomorphic(&self, other: &PySphere) -> bool {
        self.inner.is_isomorphic(&other.inner)
    }

    /// Certificate tets, or None.
    #[pyo3(signature = (max_pool=la::DEFAULT_POOL_CAP))]
    fn certificate(&self, max_pool: usize) -> PyResult<Option<Vec<[usize; 4]>>> {
        Ok(la::search_certificate(&self.inner, max_pool)
            .map_err(err)?
            .map(|c| c.tets))
    }

    /// Full classification as a JSON object.
    #[pyo3(signature = (embed=true, seed=0))]
    fn classify(&self, py: Python<'_>, embed: bool, seed: u64) -> PyResult<String> {
        let opts = la::ClassifyOptions {
            embedding: embed.then(|| la::EmbeddingOptions {
                seed,
                ..Default::default()
            }),
            ..Default::default()
        };
        let inner = self.inner.clone();
        let c = py.detach(move || la::classify_link(&inner, &opts)).map_err(err)?;
        Ok(to_json(&c))
    }

    fn to_string(&self) -> String {
        wio::link_to_string(&self.inner)
    }

    #[staticmethod]
    fn from_string(s: &str) -> PyResult<Self> {
        Ok(Self {
            inner: wio::read_link(s.as_bytes()).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("SphereTriangulation(m={}, degrees={})", self.inner.num_vertices(), self.inner.degree_list())
    }
}

#[pyfunction]
fn enumerate_sphere_triangulations(py: Python<'_>, m: usize) -> PyResult<Vec<PySphere>> {
    let all = py.detach(|| cx::enumerate_sphere_triangulations(m)).map_err(err)?;
    Ok(all.into_iter().map(|inner| PySphere { inner }).collect())
}

/// `(certificate tets, link)` for the band family.
#[pyfunction]
#[pyo3(signature = (m, open=false))]
fn band_family(m: usize, open: bool) -> PyResult<(Vec<[usize; 4]>, PySphere)> {
    let (c, l) = if open {
        la::generate_open_band(m)
    } else {
        la::generate_band_family(m)
    }
    .map_err(err)?;
    Ok((c.tets, PySphere { inner: l }))
}

#[pyclass(name = "TetMesh", module = "wcmesh", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMesh {
    inner: cx::TetMesh,
}

#[pymethods]
impl PyMesh {
    #[new]
    #[pyo3(signature = (vertices, tets, rel=1e-9, abs=1e-12))]
    fn new(vertices: Vec<[f64; 3]>, tets: Vec<[usize; 4]>, rel: f64, abs: f64) -> PyResult<Self> {
        let pts = vertices.into_iter().map(Point::from).collect();
        Ok(Self {
            inner: cx::TetMesh::new(pts, tets, &tolerance(rel, abs)?).map_err(err)?,
        })
    }

    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        Ok(Self {
            inner: cs::load_fixture(name).map_err(err)?,
        })
    }

    /// Coned k-gon sphere.
    #[staticmethod]
    #[pyo3(signature = (k, rings=2))]
    fn kgon(k: usize, rings: usize) -> PyResult<Self> {
        let s = cs::kgon_sphere(&cs::KgonSpec::new(k).with_rings(rings)).map_err(err)?;
        Ok(Self {
            inner: cs::cone_to_origin(&s, &Tolerance::default()).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_string(s: &str) -> PyResult<Self> {
        Ok(Self {
            inner: wio::read_mesh(s.as_bytes(), &Tolerance::default()).map_err(err)?,
        })
    }

    fn to_string(&self) -> String {
        wio::mesh_to_string(&self.inner)
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner.vertices().iter().map(|p| p.coords().to_vec()).collect()
    }

    #[getter]
    fn tets(&self) -> Vec<[usize; 4]> {
        self.inner.tets().to_vec()
    }

    fn tet(&self, i: usize) -> PyResult<PySimplex> {
        if i >= self.inner.num_tets() {
            return Err(PyValueError::new_err(format!("tet {i} out of range")));
        }
        Ok(PySimplex {
            inner: self.inner.tet_simplex(i),
        })
    }

    fn link(&self, v: usize) -> PyResult<Option<PySphere>> {
        let l = self.inner.link_of(v).map_err(err)?;
        Ok(l.triangulation.map(|inner| PySphere { inner }))
    }

    fn face_angles_acute_at(&self, u: usize) -> PyVerdict {
        cx::face_angles_acute_at(&self.inner, u, &Tolerance::default()).into()
    }

    /// Audit records (line-delimited JSON with a header) and the exit code.
    #[pyo3(signature = (k=None, parallel=false))]
    fn check(&self, py: Python<'_>, k: Option<usize>, parallel: bool) -> (String, i32) {
        let opts = wcmesh::report::CheckOptions {
            ks: k.into_iter().collect(),
            parallel,
            ..Default::default()
        };
        let file = wio::MeshFile::from(&self.inner);
        let r = py.detach(|| wcmesh::report::check_mesh_file(&file, &opts));
        (r.to_records(), r.exit_code())
    }

    fn cube_audit(&self) -> PyResult<String> {
        let a = wcmesh::cube::cube_audit(&self.inner, &Tolerance::default()).map_err(err)?;
        Ok(to_json(&a))
    }

    /// `(mesh, new_vertex, epsilon)`.
    fn insert_degree3_3wc(&self, u: usize, tet: usize) -> PyResult<(PyMesh, usize, Option<f64>)> {
        let i = cs::insert_degree3_3wc(&self.inner, u, tet, &Tolerance::default()).map_err(err)?;
        Ok((PyMesh { inner: i.mesh }, i.new_vertex, i.epsilon))
    }

    fn insert_degree3_2wc(&self, u: usize, face: [usize; 3]) -> PyResult<(PyMesh, usize)> {
        let i = cs::insert_degree3_2wc(&self.inner, u, face, &Tolerance::default()).map_err(err)?;
        Ok((PyMesh { inner: i.mesh }, i.new_vertex))
    }

    fn insert_degree4_2wc(&self, u: usize, edge: (usize, usize)) -> PyResult<(PyMesh, usize)> {
        let i = cs::insert_degree4_2wc(&self.inner, u, edge, &Tolerance::default()).map_err(err)?;
        Ok((PyMesh { inner: i.mesh }, i.new_vertex))
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_tets(&self) -> usize {
        self.inner.num_tets()
    }

    fn __repr__(&self) -> String {
        format!("TetMesh(vertices={}, tets={})", self.inner.num_vertices(), self.inner.num_tets())
    }
}

#[pymodule]
#[pyo3(name = "wcmesh")]
fn wcmesh_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyVerdict>()?;
    m.add_class::<PySimplex>()?;
    m.add_class::<PySphere>()?;
    m.add_class::<PyMesh>()?;
    m.add_function(wrap_pyfunction!(prism_condition, m)?)?;
    m.add_function(wrap_pyfunction!(cylinder_condition, m)?)?;
    m.add_function(wrap_pyfunction!(polynomial_region_test, m)?)?;
    m.add_function(wrap_pyfunction!(one_facet_equatorial_ball, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_sphere_triangulations, m)?)?;
    m.add_function(wrap_pyfunction!(band_family, m)?)?;
    m.add("FIXTURE_NAMES", cs::FIXTURE_NAMES.to_vec())?;
    Ok(())
}
