//! Well-centeredness predicates.
//!
//! Every test returns a [`WcVerdict`] whose margin is dimensionless (scaled by
//! the governing circumradius or expressed as a barycentric coordinate), so a
//! single tolerance band decides SATISFIED / VIOLATED / BOUNDARY.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FormatError, GeomError};
use crate::geom::{
    barycentric_of, circumcenter, det_a, det_ai, project_with, CircumData, Point, Simplex,
    Tolerance,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Satisfied,
    Violated,
    Boundary,
}

impl Status {
    pub fn classify(margin: f64, tol: &Tolerance) -> Status {
        let band = tol.band(1.0);
        if margin > band {
            Status::Satisfied
        } else if margin < -band {
            Status::Violated
        } else {
            Status::Boundary
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Satisfied => "SATISFIED",
            Status::Violated => "VIOLATED",
            Status::Boundary => "BOUNDARY",
        }
    }

    /// Conjunction: any violation wins, then any boundary.
    fn and(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Violated, _) | (_, Violated) => Violated,
            (Boundary, _) | (_, Boundary) => Boundary,
            _ => Satisfied,
        }
    }
}

/// One labelled sub-result of a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub margin: f64,
    pub status: Status,
}

impl Check {
    pub fn new(label: impl Into<String>, margin: f64, tol: &Tolerance) -> Self {
        Self {
            label: label.into(),
            margin,
            status: Status::classify(margin, tol),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WcVerdict {
    pub status: Status,
    /// Signed slack; positive means the strict inequality holds.
    pub margin: f64,
    pub detail: Vec<Check>,
}

impl WcVerdict {
    /// Conjunction of all checks; margin is the worst one.
    pub fn from_checks(detail: Vec<Check>) -> Self {
        let margin = detail.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
        let status = detail
            .iter()
            .map(|c| c.status)
            .fold(Status::Satisfied, Status::and);
        Self {
            status,
            margin,
            detail,
        }
    }

    pub fn is_satisfied(&self) -> bool {
        self.status == Status::Satisfied
    }

    /// Checks whose status is not SATISFIED.
    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.detail.iter().filter(|c| c.status != Status::Satisfied)
    }
}

fn nondegenerate_circum(s: &Simplex, tol: &Tolerance) -> Result<CircumData, GeomError> {
    let c = circumcenter(s, tol);
    if c.degenerate {
        Err(GeomError::Degenerate)
    } else {
        Ok(c)
    }
}

/// Circumcenter strictly inside: every barycentric coordinate positive.
pub fn is_n_well_centered(simplex: &Simplex, tol: &Tolerance) -> Result<WcVerdict, GeomError> {
    let c = nondegenerate_circum(simplex, tol)?;
    Ok(WcVerdict::from_checks(
        c.barycentric
            .iter()
            .enumerate()
            .map(|(i, a)| Check::new(format!("alpha[{i}]"), *a, tol))
            .collect(),
    ))
}

/// Every k-face is k-well-centered.
pub fn is_k_well_centered(
    simplex: &Simplex,
    k: usize,
    tol: &Tolerance,
) -> Result<WcVerdict, GeomError> {
    let n = simplex.dim();
    if k == 0 || k > n {
        return Err(GeomError::FaceDimension { k, dim: n });
    }
    if simplex.is_degenerate(tol) {
        return Err(GeomError::Degenerate);
    }
    let mut detail = Vec::new();
    for idx in simplex.face_indices(k) {
        let v = is_n_well_centered(&simplex.face(&idx), tol)?;
        detail.push(Check {
            label: format!("face{idx:?}"),
            margin: v.margin,
            status: v.status,
        });
    }
    Ok(WcVerdict::from_checks(detail))
}

/// k-well-centered for every `1 <= k <= n`.
pub fn is_completely_well_centered(
    simplex: &Simplex,
    tol: &Tolerance,
) -> Result<WcVerdict, GeomError> {
    let mut detail = Vec::new();
    for k in 1..=simplex.dim() {
        let v = is_k_well_centered(simplex, k, tol)?;
        detail.push(Check {
            label: format!("k={k}"),
            margin: v.margin,
            status: v.status,
        });
    }
    Ok(WcVerdict::from_checks(detail))
}

/// Outside-the-ball slack of `point` relative to the equatorial ball of `facet`,
/// in units of the facet circumradius.
fn equatorial_slack(facet: &Simplex, point: &Point, tol: &Tolerance) -> Result<f64, GeomError> {
    let c = nondegenerate_circum(facet, tol)?;
    let d = point.dist(&c.center);
    if c.radius == 0.0 {
        // 0-dimensional facet: the ball is a point.
        return Ok(d / facet.diameter().max(d).max(f64::MIN_POSITIVE));
    }
    Ok((d - c.radius) / c.radius)
}

/// Every vertex lies strictly outside the equatorial ball of its opposite facet.
pub fn equatorial_ball_test(simplex: &Simplex, tol: &Tolerance) -> Result<WcVerdict, GeomError> {
    if simplex.is_degenerate(tol) {
        return Err(GeomError::Degenerate);
    }
    let mut detail = Vec::new();
    for i in 0..=simplex.dim() {
        let slack = equatorial_slack(&simplex.facet(i), simplex.vertex(i), tol)?;
        detail.push(Check::new(format!("vertex[{i}]"), slack, tol));
    }
    Ok(WcVerdict::from_checks(detail))
}

/// The apex lies strictly outside the equatorial ball of `facet`.
pub fn one_facet_equatorial_ball(
    facet: &Simplex,
    apex: &Point,
    tol: &Tolerance,
) -> Result<WcVerdict, GeomError> {
    let slack = equatorial_slack(facet, apex, tol)?;
    Ok(WcVerdict::from_checks(vec![Check::new("outside_equatorial_ball", slack, tol)]))
}

/// Raw quantities behind the cylinder test.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderMeasure {
    pub projection: Point,
    pub facet_center: Point,
    /// `|P(apex) - c(facet)|`
    pub distance: f64,
    pub radius: f64,
}

pub fn cylinder_measure(
    facet: &Simplex,
    apex: &Point,
    tol: &Tolerance,
) -> Result<CylinderMeasure, GeomError> {
    let c = nondegenerate_circum(facet, tol)?;
    let projection = project_with(apex, facet, tol)?;
    Ok(CylinderMeasure {
        distance: projection.dist(&c.center),
        projection,
        facet_center: c.center,
        radius: c.radius,
    })
}

/// The apex projects into the open circumball of `facet`.
pub fn cylinder_condition(
    facet: &Simplex,
    apex: &Point,
    tol: &Tolerance,
) -> Result<WcVerdict, GeomError> {
    let m = cylinder_measure(facet, apex, tol)?;
    let margin = (m.radius - m.distance) / m.radius;
    Ok(WcVerdict::from_checks(vec![Check::new("projects_inside_circumball", margin, tol)]))
}

/// Sufficient condition: (a) facet well-centered, (b) apex outside the
/// equatorial ball, (c) reflection of the projected apex through the facet
/// circumcenter interior to the facet.
pub fn prism_condition(
    facet: &Simplex,
    apex: &Point,
    tol: &Tolerance,
) -> Result<WcVerdict, GeomError> {
    let c = nondegenerate_circum(facet, tol)?;
    let facet_wc = is_n_well_centered(facet, tol)?;
    let outside = (apex.dist(&c.center) - c.radius) / c.radius;
    let projection = project_with(apex, facet, tol)?;
    let reflected = projection.reflect_through(&c.center);
    let bary = barycentric_of(&reflected, facet, tol)?;
    let interior = bary.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(WcVerdict::from_checks(vec![
        Check::new("a:facet_well_centered", facet_wc.margin, tol),
        Check::new("b:outside_equatorial_ball", outside, tol),
        Check::new("c:reflection_interior", interior, tol),
    ]))
}

/// Sign test on the cubic polynomials `det(A_i)`: well-centered iff all are
/// negative. Margin is `min_i det(A_i) / det(A)`.
pub fn polynomial_region_test(
    facet: &Simplex,
    apex: &Point,
    tol: &Tolerance,
) -> Result<WcVerdict, GeomError> {
    if facet.is_degenerate(tol) {
        return Err(GeomError::Degenerate);
    }
    if facet.cone(apex)?.is_degenerate(tol) {
        return Err(GeomError::ApexInFacetPlane);
    }
    let da = det_a(facet, apex);
    if da == 0.0 {
        return Err(GeomError::ApexInFacetPlane);
    }
    let detail = (0..=facet.dim() + 1)
        .map(|i| Check::new(format!("det_A[{i}]"), -det_ai(facet, apex, i) / da.abs(), tol))
        .collect();
    Ok(WcVerdict::from_checks(detail))
}

/// Isosceles cone over a facet whose vertices are equidistant (= r) from the
/// apex: well-centered when the facet is and the facet plane is farther than
/// `r / sqrt(2)` from the apex.
pub fn isosceles_cone_test(
    apex: &Point,
    facet: &Simplex,
    tol: &Tolerance,
) -> Result<WcVerdict, GeomError> {
    let dists: Vec<f64> = facet.vertices().iter().map(|v| v.dist(apex)).collect();
    let r = dists.iter().sum::<f64>() / dists.len() as f64;
    for (i, d) in dists.iter().enumerate() {
        if (d - r).abs() > tol.band(r) {
            return Err(GeomError::NotIsosceles {
                vertex: i,
                dist: *d,
                expected: r,
            });
        }
    }
    let facet_wc = if facet.dim() == 0 {
        1.0
    } else {
        is_n_well_centered(facet, tol)?.margin
    };
    let foot = project_with(apex, facet, tol)?;
    let height = apex.dist(&foot) / r - std::f64::consts::FRAC_1_SQRT_2;
    let cone = facet.cone(apex)?;
    let cone_wc = if cone.is_degenerate(tol) {
        -1.0
    } else {
        is_n_well_centered(&cone, tol)?.margin
    };
    Ok(WcVerdict::from_checks(vec![
        Check::new("facet_well_centered", facet_wc, tol),
        Check::new("plane_distance", height, tol),
        Check::new("cone_well_centered", cone_wc, tol),
    ]))
}

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl BBox {
    pub fn new(min: [f64; 3], max: [f64; 3]) -> Result<Self, GeomError> {
        if (0..3).any(|i| !(max[i] > min[i]) || !min[i].is_finite() || !max[i].is_finite()) {
            return Err(GeomError::EmptyBox);
        }
        Ok(Self { min, max })
    }
}

/// Samples of `max_i det(A_i)` over a grid of apex positions for a fixed facet.
/// Negative values mark apex positions giving a well-centered simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionGrid {
    pub bbox: BBox,
    pub resolution: [usize; 3],
    pub facet: [[f64; 3]; 3],
    /// z-major: index `(iz * ny + iy) * nx + ix`.
    pub values: Vec<f64>,
}

impl RegionGrid {
    pub fn node(&self, ix: usize, iy: usize, iz: usize) -> [f64; 3] {
        node_coord(&self.bbox, &self.resolution, [ix, iy, iz])
    }

    pub fn value(&self, ix: usize, iy: usize, iz: usize) -> f64 {
        let [nx, ny, _] = self.resolution;
        self.values[(iz * ny + iy) * nx + ix]
    }

    /// Text form: a versioned header, the box, resolution and facet, then one
    /// row of `nx` values per `(iz, iy)` pair with `iz` outermost.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let [nx, ny, nz] = self.resolution;
        writeln!(w, "wcmesh-region 1")?;
        writeln!(
            w,
            "bbox {} {} {} {} {} {}",
            self.bbox.min[0],
            self.bbox.min[1],
            self.bbox.min[2],
            self.bbox.max[0],
            self.bbox.max[1],
            self.bbox.max[2]
        )?;
        writeln!(w, "res {nx} {ny} {nz}")?;
        for v in &self.facet {
            writeln!(w, "facet {} {} {}", v[0], v[1], v[2])?;
        }
        for row in self.values.chunks(nx) {
            let line: Vec<String> = row.iter().map(|x| format!("{x:e}")).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self, FormatError> {
        let mut lines = r.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String), FormatError> {
            for (i, l) in lines.by_ref() {
                let l = l?;
                if !l.trim().is_empty() {
                    return Ok((i + 1, l));
                }
            }
            Err(FormatError::Truncated(what.to_string()))
        };
        let (ln, magic) = next("header")?;
        if magic.trim() != "wcmesh-region 1" {
            return Err(parse_err(ln, "expected 'wcmesh-region 1'"));
        }
        let (ln, l) = next("bbox")?;
        let b = floats_after(&l, "bbox", 6, ln)?;
        let bbox = BBox::new([b[0], b[1], b[2]], [b[3], b[4], b[5]])
            .map_err(|e| parse_err(ln, &e.to_string()))?;
        let (ln, l) = next("res")?;
        let r = floats_after(&l, "res", 3, ln)?;
        let resolution = [r[0] as usize, r[1] as usize, r[2] as usize];
        let mut facet = [[0.0; 3]; 3];
        for v in &mut facet {
            let (ln, l) = next("facet")?;
            let f = floats_after(&l, "facet", 3, ln)?;
            *v = [f[0], f[1], f[2]];
        }
        let [nx, ny, nz] = resolution;
        let mut values = Vec::with_capacity(nx * ny * nz);
        for _ in 0..ny * nz {
            let (ln, l) = next("grid row")?;
            let row: Vec<f64> = l
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| parse_err(ln, &e.to_string())))
                .collect::<Result<_, _>>()?;
            if row.len() != nx {
                return Err(parse_err(ln, &format!("expected {nx} values, got {}", row.len())));
            }
            values.extend(row);
        }
        Ok(Self {
            bbox,
            resolution,
            facet,
            values,
        })
    }
}

fn parse_err(line: usize, msg: &str) -> FormatError {
    FormatError::Parse {
        line,
        msg: msg.to_string(),
    }
}

fn floats_after(line: &str, key: &str, n: usize, ln: usize) -> Result<Vec<f64>, FormatError> {
    let mut it = line.split_whitespace();
    if it.next() != Some(key) {
        return Err(parse_err(ln, &format!("expected '{key}'")));
    }
    let v: Vec<f64> = it
        .map(|t| t.parse::<f64>().map_err(|e| parse_err(ln, &e.to_string())))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(parse_err(ln, &format!("expected {n} numbers after '{key}'")));
    }
    Ok(v)
}

fn node_coord(bbox: &BBox, res: &[usize; 3], idx: [usize; 3]) -> [f64; 3] {
    let mut p = [0.0; 3];
    for a in 0..3 {
        let t = idx[a] as f64 / (res[a] - 1) as f64;
        p[a] = bbox.min[a] + t * (bbox.max[a] - bbox.min[a]);
    }
    p
}

/// `max_i det(A_i)` for `cone(apex, facet)`; negative iff well-centered
/// (for apex off the facet plane).
pub fn region_value(facet: &Simplex, apex: &Point) -> f64 {
    (0..=facet.dim() + 1)
        .map(|i| det_ai(facet, apex, i))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Evaluates [`region_value`] on a regular grid over `bbox`.
pub fn sample_region(
    facet: &Simplex,
    bbox: BBox,
    resolution: [usize; 3],
    tol: &Tolerance,
) -> Result<RegionGrid, GeomError> {
    if facet.ambient_dim() != 3 || facet.dim() != 2 {
        return Err(GeomError::NotFullDimensional {
            ambient: facet.ambient_dim(),
            dim: facet.dim() + 1,
        });
    }
    if resolution.iter().any(|&r| r < 2) {
        return Err(GeomError::Resolution);
    }
    BBox::new(bbox.min, bbox.max)?;
    if facet.is_degenerate(tol) {
        return Err(GeomError::Degenerate);
    }
    let [nx, ny, nz] = resolution;
    let values: Vec<f64> = (0..nz * ny)
        .into_par_iter()
        .flat_map_iter(|row| {
            let (iz, iy) = (row / ny, row % ny);
            (0..nx).map(move |ix| {
                let p = node_coord(&bbox, &resolution, [ix, iy, iz]);
                region_value(facet, &Point::from(p))
            })
        })
        .collect();
    let mut fv = [[0.0; 3]; 3];
    for (dst, v) in fv.iter_mut().zip(facet.vertices()) {
        dst.copy_from_slice(v.coords());
    }
    Ok(RegionGrid {
        bbox,
        resolution,
        facet: fv,
        values,
    })
}
