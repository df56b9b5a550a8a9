//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fail.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use wcmesh::complex::{enumerate_sphere_triangulations, face_angles_acute_at, TetMesh};
use wcmesh::constructions::{
    cone_to_origin, insert_degree3_2wc, insert_degree3_3wc, insert_degree4_2wc, kgon_sphere,
    load_fixture, KgonSpec,
};
use wcmesh::cube::{cube_audit, five_tet_cube, six_tet_cube};
use wcmesh::geom::{circumcenter, project_to_aff};
use wcmesh::link_analysis::{min_edge_audit, search_certificate, DEFAULT_POOL_CAP};
use wcmesh::predicates::{
    cylinder_condition, cylinder_measure, equatorial_ball_test, is_completely_well_centered,
    is_n_well_centered, one_facet_equatorial_ball, polynomial_region_test, prism_condition,
};
use wcmesh::{Point, Simplex, Status, Tolerance};

type Outcome = Result<String, String>;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller.
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// Half uniform in a cube, half jittered points on a sphere.
fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Simplex {
    loop {
        let on_sphere = rng.gen_bool(0.5);
        let pts: Vec<Point> = (0..=n)
            .map(|_| {
                let c: Vec<f64> = if on_sphere {
                    let g: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
                    let r = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let s = 1.0 + rng.gen_range(-0.1..0.1);
                    g.iter().map(|x| s * x / r).collect()
                } else {
                    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
                };
                Point::new(c).unwrap()
            })
            .collect();
        let s = Simplex::new(pts).unwrap();
        if !s.is_degenerate(&tol()) {
            return s;
        }
    }
}

fn split(s: &Simplex, i: usize) -> (Simplex, Point) {
    (s.facet(i), s.vertex(i).clone())
}

fn corpus(seed: u64) -> Vec<Simplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for n in [2, 3, 4] {
        for _ in 0..10_000 {
            out.push(random_simplex(&mut rng, n));
        }
    }
    out
}

fn c1_equivalence() -> Outcome {
    let start = Instant::now();
    let simplices = corpus(1);
    let t = tol();
    let mut compared = 0;
    let mut satisfied = 0;
    for s in &simplices {
        let n = s.dim();
        let (f, a) = split(s, n);
        let v = [
            is_n_well_centered(s, &t).map_err(|e| e.to_string())?.status,
            equatorial_ball_test(s, &t).map_err(|e| e.to_string())?.status,
            polynomial_region_test(&f, &a, &t).map_err(|e| e.to_string())?.status,
        ];
        if v.contains(&Status::Boundary) {
            continue;
        }
        compared += 1;
        satisfied += usize::from(v[0] == Status::Satisfied);
        ensure(
            v[0] == v[1] && v[1] == v[2],
            format!("disagreement {v:?} on {:?}", s.vertices()),
        )?;
    }
    let el = start.elapsed();
    ensure(el < Duration::from_secs(30), format!("took {el:?}"))?;
    Ok(format!(
        "{compared} simplices compared ({satisfied} well-centered), 0 disagreements, {:.1}s",
        el.as_secs_f64()
    ))
}

fn c2_sandwich() -> Outcome {
    let t = tol();
    let mut prism_hits = 0;
    for s in corpus(1).iter().filter(|s| s.dim() == 3) {
        let wc = is_n_well_centered(s, &t).unwrap().status;
        for i in 0..=s.dim() {
            let (f, a) = split(s, i);
            if prism_condition(&f, &a, &t).unwrap().status == Status::Satisfied {
                prism_hits += 1;
                ensure(wc == Status::Satisfied, "prism condition without well-centeredness")?;
            }
            if wc == Status::Satisfied {
                ensure(
                    cylinder_condition(&f, &a, &t).unwrap().status != Status::Violated,
                    "well-centered but cylinder violated",
                )?;
                ensure(
                    one_facet_equatorial_ball(&f, &a, &t).unwrap().status != Status::Violated,
                    "well-centered but inside an equatorial ball",
                )?;
            }
        }
    }
    for name in ["tet-A", "tet-B"] {
        let m = load_fixture(name).unwrap();
        let s = Simplex::new(m.vertices().to_vec()).unwrap();
        ensure(
            is_n_well_centered(&s, &t).unwrap().status == Status::Violated,
            format!("{name} should not be 3-WC"),
        )?;
        let mut eq_passes = 0;
        for i in 0..4 {
            let (f, a) = split(&s, i);
            ensure(
                cylinder_condition(&f, &a, &t).unwrap().status == Status::Satisfied,
                format!("{name}: cylinder fails at vertex {i}"),
            )?;
            eq_passes +=
                usize::from(one_facet_equatorial_ball(&f, &a, &t).unwrap().status == Status::Satisfied);
        }
        if name == "tet-A" {
            ensure(eq_passes == 3, format!("tet-A: {eq_passes} equatorial-ball passes"))?;
        }
    }
    Ok(format!(
        "0 counterexamples ({prism_hits} prism-certified pairs); both counterexample tets behave"
    ))
}

fn c3_tet_c() -> Outcome {
    let t = tol();
    let m = load_fixture("tet-C").unwrap();
    let v = m.vertices();
    let facet = Simplex::new(v[..3].to_vec()).unwrap();
    let u = &v[3];
    let c = circumcenter(&facet, &t);
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9);
    ensure(close(c.center.coords(), &[0.0, 0.0, -0.6]), format!("center {:?}", c.center))?;
    ensure((c.radius - 0.8).abs() < 1e-9, format!("radius {}", c.radius))?;
    let d2 = u.dist(&c.center).powi(2);
    ensure((d2 - 2.512).abs() < 1e-9, format!("|u - c|^2 = {d2}"))?;
    let p = project_to_aff(&u.reflect_through(&c.center), &facet).unwrap();
    ensure(close(p.coords(), &[0.28, 0.0, -0.6]), format!("P(-u) = {p:?}"))?;
    let prism = prism_condition(&facet, u, &t).unwrap();
    let st: BTreeMap<&str, Status> =
        prism.detail.iter().map(|c| (&c.label[..1], c.status)).collect();
    ensure(st["a"] == Status::Violated, "prism (a) should fail")?;
    ensure(st["b"] == Status::Satisfied && st["c"] == Status::Satisfied, "prism (b), (c) should pass")?;
    let whole = Simplex::new(v.to_vec()).unwrap();
    ensure(!is_n_well_centered(&whole, &t).unwrap().is_satisfied(), "tet-C is 3-WC")?;
    Ok("c = (0,0,-0.6), R = 0.8, |u-c|^2 = 2.512, P(-u) = (0.28,0,-0.6); prism a fails, b and c pass".into())
}

fn c4_enumeration() -> Outcome {
    let start = Instant::now();
    let counts: Vec<usize> = (4..=9)
        .map(|m| enumerate_sphere_triangulations(m).unwrap().len())
        .collect();
    let el = start.elapsed();
    ensure(counts == [1, 1, 2, 5, 14, 50], format!("counts {counts:?}"))?;
    ensure(el < Duration::from_secs(300), format!("took {el:?}"))?;
    Ok(format!("counts {counts:?} for m = 4..9 in {:.2}s", el.as_secs_f64()))
}

fn c5_certificates() -> Outcome {
    let mut summary = Vec::new();
    for m in 4..=8 {
        let links = enumerate_sphere_triangulations(m).unwrap();
        let certified: Vec<bool> = links
            .iter()
            .map(|l| search_certificate(l, DEFAULT_POOL_CAP).unwrap().is_some())
            .collect();
        let k = certified.iter().filter(|&&c| c).count();
        summary.push(format!("m={m}: {k}/{}", links.len()));
        match m {
            4..=6 => ensure(k == links.len(), format!("m={m}: only {k} certified"))?,
            7 => {
                ensure(k == 3, format!("m=7: {k} certified"))?;
                let mut open: Vec<String> = links
                    .iter()
                    .zip(&certified)
                    .filter(|(_, &c)| !c)
                    .map(|(l, _)| l.degree_list().to_string())
                    .collect();
                open.sort();
                ensure(
                    open == ["(5,5,5,4,4,4,3)", "(6,5,5,5,3,3,3)"],
                    format!("m=7 uncertified {open:?}"),
                )?;
            }
            8 => {
                ensure(k == 5, format!("m=8: {k} certified"))?;
                let mut by_degrees: BTreeMap<String, (bool, bool)> = BTreeMap::new();
                for (l, &c) in links.iter().zip(&certified) {
                    let e = by_degrees.entry(l.degree_list().to_string()).or_default();
                    if c {
                        e.0 = true;
                    } else {
                        e.1 = true;
                    }
                }
                let pairs: Vec<&String> =
                    by_degrees.iter().filter(|(_, &(a, b))| a && b).map(|(d, _)| d).collect();
                ensure(
                    !pairs.is_empty(),
                    "m=8: no degree list is shared by a certified and an uncertified link",
                )?;
                summary.push(format!("shared degree lists {pairs:?}"));
            }
            _ => {}
        }
    }
    Ok(summary.join(", "))
}

fn star_is(mesh: &TetMesh, complete: bool) -> bool {
    (0..mesh.num_tets()).all(|i| {
        let s = mesh.tet_simplex(i);
        let v = if complete {
            is_completely_well_centered(&s, &tol())
        } else {
            is_n_well_centered(&s, &tol())
        };
        v.is_ok_and(|v| v.is_satisfied())
    })
}

fn link_degrees(mesh: &TetMesh) -> String {
    mesh.link_of(0).unwrap().triangulation.unwrap().degree_list().to_string()
}

fn c6_witnesses() -> Outcome {
    for (name, degrees, complete) in [
        ("wc3-deg5554443", "(5,5,5,4,4,4,3)", false),
        ("wc3-deg6555333", "(6,5,5,5,3,3,3)", false),
        ("cwc-deg555555444", "(5,5,5,5,5,5,4,4,4)", true),
    ] {
        let m = load_fixture(name).map_err(|e| e.to_string())?;
        ensure(star_is(&m, complete), format!("{name} fails its predicate"))?;
        let d = link_degrees(&m);
        ensure(d == degrees, format!("{name}: link degrees {d}"))?;
        if complete {
            ensure(
                face_angles_acute_at(&m, 0, &tol()).is_satisfied(),
                format!("{name}: face angle at u not acute"),
            )?;
        }
    }
    Ok("two 3-WC stars and one completely WC star verified; link degree lists match".into())
}

fn c7_min_edges() -> Outcome {
    let a = min_edge_audit(&load_fixture("wc3-deg5554443").unwrap());
    ensure(
        a.len() == 1 && a[0].incident_edges == 7 && !a[0].below_3wc_bound,
        format!("wc3 fixture audit {a:?}"),
    )?;
    let b = min_edge_audit(&load_fixture("cwc-deg555555444").unwrap());
    ensure(
        b.len() == 1 && b[0].incident_edges == 9 && !b[0].below_2wc_bound,
        format!("cwc fixture audit {b:?}"),
    )?;
    let mut verts = vec![Point::from([0.0, 0.0, 0.0])];
    for axis in 0..3 {
        for s in [1.0, -1.0] {
            let mut c = [0.0; 3];
            c[axis] = s;
            verts.push(Point::from(c));
        }
    }
    // Octahedron vertices 1..=6 as +x, -x, +y, -y, +z, -z.
    let mut tets = Vec::new();
    for x in [1, 2] {
        for y in [3, 4] {
            for z in [5, 6] {
                tets.push([0, x, y, z]);
            }
        }
    }
    let oct = TetMesh::new(verts, tets, &tol()).unwrap();
    let c = min_edge_audit(&oct);
    ensure(
        c.len() == 1 && c[0].below_3wc_bound && c[0].below_2wc_bound,
        format!("coned octahedron audit {c:?}"),
    )?;
    Ok("7 edges (tight) on the 3-WC fixture, 9 (tight) on the complete one; octahedron flagged".into())
}

fn acute_and_far(p: [&Point; 3]) -> bool {
    let acute = (0..3).all(|i| {
        let a = p[(i + 1) % 3].sub(p[i]);
        let b = p[(i + 2) % 3].sub(p[i]);
        a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() > 0.0
    });
    let ab = p[1].sub(p[0]);
    let ac = p[2].sub(p[0]);
    let n = [
        ab[1] * ac[2] - ab[2] * ac[1],
        ab[2] * ac[0] - ab[0] * ac[2],
        ab[0] * ac[1] - ab[1] * ac[0],
    ];
    let nn = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    let d = n.iter().zip(p[0].coords()).map(|(x, y)| x * y).sum::<f64>().abs() / nn;
    acute && d > std::f64::consts::FRAC_1_SQRT_2
}

fn c8_kgon() -> Outcome {
    for k in 4..=16 {
        let s = kgon_sphere(&KgonSpec::new(k)).map_err(|e| format!("k={k}: {e}"))?;
        for t in s.triangulation.triangles() {
            let p = [&s.points[t[0]], &s.points[t[1]], &s.points[t[2]]];
            ensure(acute_and_far(p), format!("k={k}: triangle {t:?}"))?;
        }
        let m = cone_to_origin(&s, &tol()).map_err(|e| e.to_string())?;
        ensure(star_is(&m, true), format!("k={k}: cone not completely WC"))?;
        if k == 7 {
            ensure(
                s.points.len() == 16 && s.triangulation.triangles().len() == 28,
                "k=7 topology",
            )?;
        }
    }
    Ok("k = 4..16 acute, planes beyond 1/sqrt(2), cones completely WC; k=7 has 16 vertices, 28 triangles".into())
}

fn c9_partition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let t = tol();
    let mut hist = [0usize; 5];
    for _ in 0..10_000 {
        let s = random_simplex(&mut rng, 3);
        let w: Vec<f64> = (0..4).map(|_| rng.gen_range(0.01..1.0)).collect();
        let sum: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / sum).collect();
        let u = Point::combination(s.vertices(), &w);
        let mut count = 0;
        for i in 0..4 {
            if let Ok(cone) = s.facet(i).cone(&u) {
                if !cone.is_degenerate(&t) && is_n_well_centered(&cone, &t).unwrap().is_satisfied() {
                    count += 1;
                }
            }
        }
        hist[count] += 1;
    }
    ensure(hist[2..].iter().all(|&c| c == 0), format!("histogram {hist:?}"))?;
    Ok(format!("10000 pairs; cones 3-WC per pair: 0 -> {}, 1 -> {}", hist[0], hist[1]))
}

fn c10_insertions() -> Outcome {
    let t = tol();
    let s = kgon_sphere(&KgonSpec::new(7)).unwrap();
    let mut mesh = cone_to_origin(&s, &t).unwrap();
    let mut tet = 0;
    for step in 1..=5 {
        let ins = insert_degree3_3wc(&mesh, 0, tet, &t).map_err(|e| format!("step {step}: {e}"))?;
        ensure(star_is(&ins.mesh, false), format!("step {step}: mesh not 3-WC"))?;
        let links = |m: &TetMesh| m.link_of(0).unwrap().vertices.len();
        ensure(
            ins.mesh.num_tets() == mesh.num_tets() + 2 && links(&ins.mesh) == links(&mesh) + 1,
            format!("step {step}: counts"),
        )?;
        let p = |i: usize| &ins.mesh.vertices()[i];
        let angle = |at: usize, a: usize, b: usize| -> f64 {
            let x = p(a).sub(p(at));
            let y = p(b).sub(p(at));
            x.iter().zip(&y).map(|(i, j)| i * j).sum()
        };
        let v1 = ins.new_vertex;
        let old = mesh.tets()[tet];
        for &vi in old.iter().filter(|&&x| x != 0) {
            ensure(
                angle(v1, 0, vi) > 0.0 && angle(vi, 0, v1) > 0.0,
                format!("step {step}: new face angle at {v1} or {vi} not acute"),
            )?;
        }
        tet = *ins
            .new_tets
            .iter()
            .find(|&&nt| step == 5 || insert_degree3_3wc(&ins.mesh, 0, nt, &t).is_ok())
            .ok_or(format!("step {step}: no new tet admits another insertion"))?;
        mesh = ins.mesh;
    }

    let cwc = load_fixture("cwc-deg555555444").unwrap();
    let link = cwc.link_of(0).unwrap();
    let (mut ok3, mut ok4) = (0, 0);
    for tri in &link.triangles {
        let ins = insert_degree3_2wc(&cwc, 0, *tri, &t).map_err(|e| format!("deg3 {tri:?}: {e}"))?;
        ensure(face_angles_acute_at(&ins.mesh, 0, &t).is_satisfied(), format!("deg3 {tri:?}"))?;
        ok3 += 1;
    }
    let mut edges: Vec<(usize, usize)> = link
        .triangles
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort();
    edges.dedup();
    for &e in &edges {
        let ins = insert_degree4_2wc(&cwc, 0, e, &t).map_err(|err| format!("deg4 {e:?}: {err}"))?;
        ensure(face_angles_acute_at(&ins.mesh, 0, &t).is_satisfied(), format!("deg4 {e:?}"))?;
        ok4 += 1;
    }
    Ok(format!(
        "5 iterated 3-WC insertions on k=7; {ok3} degree-3 and {ok4} degree-4 2-WC insertions keep face angles at u acute"
    ))
}

fn c11_cube() -> Outcome {
    let t = tol();
    let five = cube_audit(&five_tet_cube(), &t).map_err(|e| e.to_string())?;
    ensure(five.corner_tets.len() == 4 && five.flagged(), "5-tet split not flagged for corners")?;
    ensure(!five.not_3wc.is_empty(), "5-tet split reported 3-WC")?;
    let six = cube_audit(&six_tet_cube(), &t).map_err(|e| e.to_string())?;
    ensure(
        six.faces.iter().all(|f| f.two_right_triangles) && six.flagged(),
        "6-tet split faces not flagged",
    )?;
    for a in [&five, &six] {
        ensure(
            a.lower_bound_3wc == 9 && a.lower_bound_2wc == 24,
            format!("bounds {} / {}", a.lower_bound_3wc, a.lower_bound_2wc),
        )?;
    }
    let corner = load_fixture("cube-corner").unwrap();
    let v = corner.vertices();
    let facet = Simplex::new(v[..3].to_vec()).unwrap();
    let st = cylinder_condition(&facet, &v[3], &t).unwrap().status;
    let m = cylinder_measure(&facet, &v[3], &t).unwrap();
    let gap = (m.distance - m.radius).abs();
    ensure(st == Status::Boundary && gap < 1e-12, format!("corner cylinder {st:?}, gap {gap:e}"))?;
    Ok(format!("both splits flagged; bounds 9 / 24; corner cylinder BOUNDARY, gap {gap:.1e}"))
}

fn c12_determinism() -> Outcome {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let path = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let run = |args: &[&str]| -> Result<(Vec<u8>, Option<i32>), String> {
        let o = Command::new(env!("CARGO_BIN_EXE_wcmesh"))
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        Ok((o.stdout, o.status.code()))
    };
    let (k7, cwc, cube) = (path("k7.mesh"), path("cwc.mesh"), path("cube.mesh"));
    run(&["generate", "kgon", "--k", "7", "-o", &k7])?;
    run(&["generate", "fixture", "cwc-deg555555444", "-o", &cwc])?;
    run(&["generate", "cube", "--tets", "5", "-o", &cube])?;
    let commands: Vec<Vec<&str>> = vec![
        vec!["check", &cwc],
        vec!["check", &k7, "--k", "3"],
        vec!["classify-link", "--enumerate", "8"],
        vec!["classify-link", "--enumerate", "9"],
        vec!["classify-link", "--enumerate", "7", "--wc3-search"],
        vec!["generate", "kgon", "--k", "11", "--rings", "3"],
        vec!["generate", "band", "--m", "9"],
        vec!["generate", "insert-deg3", "--mesh", &k7, "--u", "0", "--tet", "0", "--iterate", "3"],
        vec!["generate", "insert-deg4", "--mesh", &cwc, "--u", "0", "--edge", "1,2"],
        vec!["region", "--facet", "1,0,0,0,1,0,0,0,0.3", "--bbox", "-1,-1,-1,1,1,1", "--res", "6"],
        vec!["cube-audit", &cube],
    ];
    for c in &commands {
        let mut a = c.clone();
        a.extend(["--format", "records", "--seed", "42"]);
        let first = run(&a)?;
        let second = run(&a)?;
        ensure(first == second, format!("{c:?} differs between runs"))?;
        ensure(
            first.1.is_some_and(|code| code < 2),
            format!("{c:?} failed with {:?}", first.1),
        )?;
        a.push("--parallel");
        ensure(run(&a)?.0 == first.0, format!("{c:?} differs with --parallel"))?;
    }
    Ok(format!("{} commands byte-identical across reruns and with --parallel", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("predicate equivalence", c1_equivalence),
        ("necessary/sufficient sandwich", c2_sandwich),
        ("tet-C worked example", c3_tet_c),
        ("enumeration counts", c4_enumeration),
        ("certificate classification", c5_certificates),
        ("realizability witnesses", c6_witnesses),
        ("minimum-edge bounds", c7_min_edges),
        ("k-gon construction suite", c8_kgon),
        ("partition property", c9_partition),
        ("insertion suite", c10_insertions),
        ("cube audit", c11_cube),
        ("determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("PASS {:>2} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
