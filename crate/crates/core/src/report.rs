//! Mesh audit reports: per-cell k-well-centeredness, per-vertex link
//! classification and summary counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::TetMesh;
use crate::geom::{Simplex, Tolerance};
use crate::io::{record_line, MeshFile, RECORDS_HEADER};
use crate::link_analysis::{hex, nminus3_test, search_certificate, DEFAULT_POOL_CAP};
use crate::predicates::{is_k_well_centered, is_n_well_centered, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CellStatus {
    Satisfied,
    Violated,
    Boundary,
    Degenerate,
}

impl From<Status> for CellStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Satisfied => CellStatus::Satisfied,
            Status::Violated => CellStatus::Violated,
            Status::Boundary => CellStatus::Boundary,
        }
    }
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Satisfied => "SATISFIED",
            CellStatus::Violated => "VIOLATED",
            CellStatus::Boundary => "BOUNDARY",
            CellStatus::Degenerate => "DEGENERATE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub cell: usize,
    pub vertices: Vec<usize>,
    pub k: usize,
    pub status: CellStatus,
    /// Absent for degenerate cells.
    pub margin: Option<f64>,
    pub failing: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub vertex: usize,
    pub degree_list: String,
    pub canonical_form: String,
    /// `BLOCKED`, `REALIZED` or `UNKNOWN`.
    pub wc3: String,
    /// `BLOCKED`, `FEASIBLE` or `UNKNOWN`.
    pub wc2: String,
    /// Certificate tets in mesh vertex indices.
    pub certificate: Option<Vec<[usize; 4]>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KSummary {
    pub k: usize,
    pub total: usize,
    pub satisfied: usize,
    pub violated: usize,
    pub boundary: usize,
    pub degenerate: usize,
    pub worst_margin: Option<f64>,
    pub worst_cell: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cells: usize,
    pub per_k: Vec<KSummary>,
    pub interior_vertices: usize,
    pub wc3_blocked: usize,
    pub wc3_realized: usize,
    pub wc3_unknown: usize,
    pub wc2_blocked: usize,
    pub wc2_feasible: usize,
    pub wc2_unknown: usize,
    /// Why links were skipped, if they were.
    pub mesh_error: Option<String>,
    pub all_satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub cells: Vec<CellRecord>,
    pub vertices: Vec<VertexRecord>,
    pub summary: Summary,
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Record<'a> {
    Cell(&'a CellRecord),
    Vertex(&'a VertexRecord),
    Summary(&'a Summary),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOptions {
    /// Face dimensions to test; empty means `1..=dim`.
    pub ks: Vec<usize>,
    pub tol: Tolerance,
    pub parallel: bool,
    pub links: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            ks: Vec::new(),
            tol: Tolerance::default(),
            parallel: false,
            links: true,
        }
    }
}

fn cell_records(file: &MeshFile, idx: usize, ks: &[usize], tol: &Tolerance) -> Vec<CellRecord> {
    let verts = file.cells[idx].clone();
    let pts = verts.iter().map(|&i| file.vertices[i].clone()).collect();
    let simplex = Simplex::new(pts).ok().filter(|s| !s.is_degenerate(tol));
    ks.iter()
        .map(|&k| {
            let verdict = simplex.as_ref().map(|s| is_k_well_centered(s, k, tol));
            match verdict {
                Some(Ok(v)) => CellRecord {
                    cell: idx,
                    vertices: verts.clone(),
                    k,
                    status: v.status.into(),
                    margin: Some(v.margin),
                    failing: v.failing().map(|c| c.label.clone()).collect(),
                },
                _ => CellRecord {
                    cell: idx,
                    vertices: verts.clone(),
                    k,
                    status: CellStatus::Degenerate,
                    margin: None,
                    failing: Vec::new(),
                },
            }
        })
        .collect()
}

fn vertex_record(mesh: &TetMesh, v: usize, tol: &Tolerance) -> Option<VertexRecord> {
    let link = mesh.link_of(v).ok()?;
    let tri = link.triangulation.as_ref()?;
    let star_wc = mesh.incident_tets(v).iter().all(|&t| {
        is_n_well_centered(&mesh.tet_simplex(t), tol).is_ok_and(|r| r.status == Status::Satisfied)
    });
    let certificate = if star_wc {
        None
    } else {
        search_certificate(tri, DEFAULT_POOL_CAP).ok().flatten().map(|c| {
            c.tets
                .iter()
                .map(|t| t.map(|i| link.vertices[i]))
                .collect::<Vec<_>>()
        })
    };
    let wc3 = if star_wc {
        "REALIZED"
    } else if certificate.is_some() {
        "BLOCKED"
    } else {
        "UNKNOWN"
    };
    let acute = crate::complex::face_angles_acute_at(mesh, v, tol).is_satisfied();
    let wc2 = if acute {
        "FEASIBLE"
    } else if nminus3_test(tri) {
        "BLOCKED"
    } else {
        "UNKNOWN"
    };
    Some(VertexRecord {
        vertex: v,
        degree_list: tri.degree_list().to_string(),
        canonical_form: hex(&tri.canonical_form()),
        wc3: wc3.into(),
        wc2: wc2.into(),
        certificate,
    })
}

/// Audits every cell of `file` for each requested `k`. Degenerate cells get
/// their own records; links are classified only when the cells form a valid
/// tetrahedral mesh.
pub fn check_mesh_file(file: &MeshFile, opts: &CheckOptions) -> AuditReport {
    let tol = &opts.tol;
    let ks: Vec<usize> = if opts.ks.is_empty() {
        (1..=file.dim).collect()
    } else {
        opts.ks.iter().copied().filter(|&k| k >= 1 && k <= file.dim).collect()
    };
    let n = file.cells.len();
    let cells: Vec<CellRecord> = if opts.parallel {
        (0..n)
            .into_par_iter()
            .flat_map_iter(|i| cell_records(file, i, &ks, tol))
            .collect()
    } else {
        (0..n).flat_map(|i| cell_records(file, i, &ks, tol)).collect()
    };

    let mut vertices = Vec::new();
    let mut mesh_error = None;
    if opts.links && file.dim == 3 && n > 0 {
        match file.clone().into_mesh(tol) {
            Ok(mesh) => {
                let interior = mesh.interior_vertices();
                vertices = if opts.parallel {
                    interior
                        .par_iter()
                        .filter_map(|&v| vertex_record(&mesh, v, tol))
                        .collect()
                } else {
                    interior
                        .iter()
                        .filter_map(|&v| vertex_record(&mesh, v, tol))
                        .collect()
                };
            }
            Err(e) => mesh_error = Some(e.to_string()),
        }
    }
    let summary = summarize(n, &ks, &cells, &vertices, mesh_error);
    AuditReport {
        cells,
        vertices,
        summary,
    }
}

fn summarize(
    n: usize,
    ks: &[usize],
    cells: &[CellRecord],
    vertices: &[VertexRecord],
    mesh_error: Option<String>,
) -> Summary {
    let per_k: Vec<KSummary> = ks
        .iter()
        .map(|&k| {
            let mut s = KSummary {
                k,
                ..Default::default()
            };
            for r in cells.iter().filter(|r| r.k == k) {
                s.total += 1;
                match r.status {
                    CellStatus::Satisfied => s.satisfied += 1,
                    CellStatus::Violated => s.violated += 1,
                    CellStatus::Boundary => s.boundary += 1,
                    CellStatus::Degenerate => s.degenerate += 1,
                }
                if let Some(m) = r.margin {
                    if s.worst_margin.is_none_or(|w| m < w) {
                        s.worst_margin = Some(m);
                        s.worst_cell = Some(r.cell);
                    }
                }
            }
            s
        })
        .collect();
    let count = |f: &dyn Fn(&VertexRecord) -> bool| vertices.iter().filter(|v| f(v)).count();
    Summary {
        cells: n,
        all_satisfied: per_k.iter().all(|s| s.satisfied == s.total),
        per_k,
        interior_vertices: vertices.len(),
        wc3_blocked: count(&|v| v.wc3 == "BLOCKED"),
        wc3_realized: count(&|v| v.wc3 == "REALIZED"),
        wc3_unknown: count(&|v| v.wc3 == "UNKNOWN"),
        wc2_blocked: count(&|v| v.wc2 == "BLOCKED"),
        wc2_feasible: count(&|v| v.wc2 == "FEASIBLE"),
        wc2_unknown: count(&|v| v.wc2 == "UNKNOWN"),
        mesh_error,
    }
}

impl AuditReport {
    /// 0 iff every requested verdict is SATISFIED.
    pub fn exit_code(&self) -> i32 {
        if self.summary.all_satisfied {
            0
        } else {
            1
        }
    }

    pub fn to_records(&self) -> String {
        let mut out = String::new();
        out.push_str(RECORDS_HEADER);
        out.push('\n');
        for c in &self.cells {
            out.push_str(&record_line(&Record::Cell(c)));
            out.push('\n');
        }
        for v in &self.vertices {
            out.push_str(&record_line(&Record::Vertex(v)));
            out.push('\n');
        }
        out.push_str(&record_line(&Record::Summary(&self.summary)));
        out.push('\n');
        out
    }

    pub fn to_text(&self) -> String {
        let s = &self.summary;
        let mut out = format!("cells: {}\n", s.cells);
        for k in &s.per_k {
            out.push_str(&format!(
                "k={}: {} satisfied, {} violated, {} boundary, {} degenerate",
                k.k, k.satisfied, k.violated, k.boundary, k.degenerate
            ));
            if let (Some(m), Some(c)) = (k.worst_margin, k.worst_cell) {
                out.push_str(&format!("; worst margin {m:.6e} at cell {c}"));
            }
            out.push('\n');
        }
        let listed = |status: CellStatus| {
            self.cells
                .iter()
                .filter(move |r| r.status == status)
                .map(|r| format!("  cell {} k={} {:?}", r.cell, r.k, r.vertices))
        };
        for status in [CellStatus::Violated, CellStatus::Boundary, CellStatus::Degenerate] {
            let items: Vec<String> = listed(status).collect();
            if !items.is_empty() {
                out.push_str(&format!("{}:\n{}\n", status.as_str(), items.join("\n")));
            }
        }
        if let Some(e) = &s.mesh_error {
            out.push_str(&format!("links skipped: {e}\n"));
        }
        if s.interior_vertices > 0 {
            out.push_str(&format!(
                "interior vertices: {} (3-WC: {} blocked, {} realized, {} unknown; \
                 2-WC: {} blocked, {} feasible, {} unknown)\n",
                s.interior_vertices,
                s.wc3_blocked,
                s.wc3_realized,
                s.wc3_unknown,
                s.wc2_blocked,
                s.wc2_feasible,
                s.wc2_unknown
            ));
            for v in &self.vertices {
                out.push_str(&format!(
                    "  vertex {} link {} wc3 {} wc2 {}\n",
                    v.vertex, v.degree_list, v.wc3, v.wc2
                ));
            }
        }
        out.push_str(if s.all_satisfied { "OK\n" } else { "FAIL\n" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::load_fixture;

    fn file_of(name: &str) -> MeshFile {
        MeshFile::from(&load_fixture(name).unwrap())
    }

    #[test]
    fn completely_wc_fixture_passes() {
        let r = check_mesh_file(&file_of("cwc-deg555555444"), &CheckOptions::default());
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.summary.per_k.len(), 3);
        assert!(r.summary.per_k.iter().all(|k| k.satisfied == 14));
        assert_eq!(r.vertices.len(), 1);
        assert_eq!(r.vertices[0].wc3, "REALIZED");
        assert_eq!(r.vertices[0].wc2, "FEASIBLE");
    }

    #[test]
    fn summary_matches_records() {
        let r = check_mesh_file(&file_of("wc3-deg6555333"), &CheckOptions::default());
        for k in &r.summary.per_k {
            let n = r.cells.iter().filter(|c| c.k == k.k).count();
            assert_eq!(k.satisfied + k.violated + k.boundary + k.degenerate, n);
        }
    }

    #[test]
    fn degenerate_cell_reported() {
        let mut f = file_of("tet-C");
        f.vertices.push(crate::geom::Point::from([0.5, 0.5, 0.0]));
        f.vertices.push(crate::geom::Point::from([1.0, 1.0, 0.0]));
        f.vertices.push(crate::geom::Point::from([2.0, 2.0, 0.0]));
        f.cells.push(vec![0, 4, 5, 6]);
        let r = check_mesh_file(&f, &CheckOptions::default());
        assert!(r.cells.iter().any(|c| c.cell == 1 && c.status == CellStatus::Degenerate));
        assert!(r.summary.mesh_error.is_some());
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn empty_mesh() {
        let f = MeshFile {
            dim: 3,
            vertices: vec![],
            cells: vec![],
        };
        let r = check_mesh_file(&f, &CheckOptions::default());
        assert_eq!(r.exit_code(), 0);
        assert!(r.summary.per_k.iter().all(|k| k.total == 0));
    }

    #[test]
    fn parallel_is_identical() {
        let f = file_of("wc3-deg5554443");
        let a = check_mesh_file(&f, &CheckOptions::default());
        let b = check_mesh_file(
            &f,
            &CheckOptions {
                parallel: true,
                ..Default::default()
            },
        );
        assert_eq!(a.to_records(), b.to_records());
    }
}
