use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn wcmesh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcmesh"))
        .args(args)
        .output()
        .expect("run wcmesh")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture(dir: &Path, name: &str) -> PathBuf {
    let p = dir.join(format!("{name}.mesh"));
    let o = wcmesh(&["generate", "fixture", name, "-o", p.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    p
}

fn records(o: &Output) -> Vec<serde_json::Value> {
    let s = stdout(o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("#wcmesh-records v1"));
    lines.map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn check_completely_wc_fixture() {
    let dir = TempDir::new().unwrap();
    let p = fixture(dir.path(), "cwc-deg555555444");
    let o = wcmesh(&["check", p.to_str().unwrap(), "--k", "all", "--format", "records"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    let summary = recs.last().unwrap();
    assert_eq!(summary["record"], "summary");
    for k in summary["per_k"].as_array().unwrap() {
        assert_eq!(k["satisfied"], 14);
        assert_eq!(k["total"], 14);
    }
}

#[test]
fn check_single_violated_tet() {
    let dir = TempDir::new().unwrap();
    let p = fixture(dir.path(), "tet-A");
    let o = wcmesh(&["check", p.to_str().unwrap(), "--k", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("k=3: 0 satisfied, 1 violated"));
}

#[test]
fn check_empty_mesh() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("empty.mesh");
    std::fs::write(&p, "3 0 0\n").unwrap();
    let o = wcmesh(&["check", p.to_str().unwrap(), "--format", "records"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["cells"], 0);
}

#[test]
fn check_parse_error_has_line_number() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.mesh");
    std::fs::write(&p, "3 4 1\n0 0 0\n1 0 0\n0 1 x\n0 0 1\n0 1 2 3\n").unwrap();
    let o = wcmesh(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn check_reports_degenerate_cells() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("flat.mesh");
    std::fs::write(
        &p,
        "3 5 2\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n1 1 0\n0 1 2 3\n0 1 2 4\n",
    )
    .unwrap();
    let o = wcmesh(&["check", p.to_str().unwrap(), "--k", "3", "--format", "records"]);
    assert_eq!(o.status.code(), Some(1));
    let recs = records(&o);
    assert_eq!(recs[1]["cell"], 1);
    assert_eq!(recs[1]["status"], "DEGENERATE");
}

#[test]
fn classify_enumerated_links() {
    let o = wcmesh(&["classify-link", "--enumerate", "8", "--format", "records"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    let links: Vec<_> = recs.iter().filter(|r| r["record"] == "link").collect();
    assert_eq!(links.len(), 14);
    let blocked3 = links.iter().filter(|r| r["wc3"]["status"] == "BLOCKED").count();
    let blocked2 = links.iter().filter(|r| r["wc2"]["status"] == "BLOCKED").count();
    assert_eq!((blocked3, blocked2), (5, 14));

    let recs = records(&wcmesh(&["classify-link", "--enumerate", "6", "--format", "records"]));
    assert_eq!(recs.len(), 3);
    assert!(recs[..2].iter().all(|r| r["wc3"]["status"] == "BLOCKED"));
}

#[test]
fn classify_band_file_echoes_certificate() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("band.link");
    let o = wcmesh(&["generate", "band", "--m", "10", "-o", p.to_str().unwrap()]);
    assert!(o.status.success());
    let recs = records(&wcmesh(&["classify-link", p.to_str().unwrap(), "--format", "records"]));
    assert_eq!(recs[0]["wc3"]["status"], "BLOCKED");
    assert_eq!(recs[0]["wc3"]["certificate"]["tets"].as_array().unwrap().len(), 8);
}

#[test]
fn generate_kgon_and_fixtures() {
    let o = wcmesh(&["generate", "kgon", "--k", "7"]);
    assert_eq!(stdout(&o).lines().next(), Some("3 17 28"));

    let o = wcmesh(&["generate", "fixture", "tet-C"]);
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "3 4 1");
    assert_eq!(lines[1], "0.224 -0.768 -0.6");
    assert_eq!(lines[4], "-0.28 0.0 0.96");

    let o = wcmesh(&["generate", "band", "--m", "8"]);
    let link = wcmesh::io::read_link(stdout(&o).as_bytes()).unwrap();
    assert_eq!(link.degree_list().0, vec![6, 6, 4, 4, 4, 4, 4, 4]);

    let o = wcmesh(&["generate", "fixture", "no-such"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generate_rejects_bad_parameters() {
    assert_eq!(wcmesh(&["generate", "kgon", "--k", "3"]).status.code(), Some(2));
    assert_eq!(wcmesh(&["generate", "band", "--m", "5"]).status.code(), Some(2));
}

#[test]
fn insertion_commands() {
    let dir = TempDir::new().unwrap();
    let k7 = dir.path().join("k7.mesh");
    wcmesh(&["generate", "kgon", "--k", "7", "-o", k7.to_str().unwrap()]);
    let out = dir.path().join("k7i.mesh");
    let o = wcmesh(&[
        "generate", "insert-deg3", "--mesh", k7.to_str().unwrap(), "--u", "0", "--tet", "0",
        "--iterate", "5", "-o", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = wcmesh(&["check", out.to_str().unwrap(), "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));

    let cwc = fixture(dir.path(), "cwc-deg555555444");
    let o = wcmesh(&[
        "generate", "insert-deg3-2wc", "--mesh", cwc.to_str().unwrap(), "--u", "0", "--face",
        "1,2,3",
    ]);
    let s = stdout(&o);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(s.contains("\n3 11 16\n"));
}

#[test]
fn region_grid_signs() {
    let h = 3f64.sqrt() / 2.0;
    let facet = format!("1,0,0,-0.5,{h},0,-0.5,-{h},0");
    let o = wcmesh(&["region", "--facet", &facet, "--bbox", "-2,-2,-2,2,2,2", "--res", "9"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let g = wcmesh::predicates::RegionGrid::read_from(stdout(&o).as_bytes()).unwrap();
    // (0, 0, 2) is over the circumcenter and high enough for the prism test.
    assert_eq!(g.node(4, 4, 8), [0.0, 0.0, 2.0]);
    assert!(g.value(4, 4, 8) < 0.0);
    // (0, 0, 0.5) is inside the equatorial ball.
    assert!(g.value(4, 4, 5) > 0.0);
    // Mirror in z.
    for iy in 0..9 {
        for ix in 0..9 {
            assert_eq!(g.value(ix, iy, 0), g.value(ix, iy, 8));
        }
    }
}

#[test]
fn cube_audit_splits() {
    let dir = TempDir::new().unwrap();
    for (n, corners) in [("5", 4), ("6", 0)] {
        let p = dir.path().join(format!("cube{n}.mesh"));
        wcmesh(&["generate", "cube", "--tets", n, "-o", p.to_str().unwrap()]);
        let o = wcmesh(&["cube-audit", p.to_str().unwrap(), "--format", "records"]);
        assert_eq!(o.status.code(), Some(1));
        let r = &records(&o)[0];
        assert_eq!(r["flagged"], true);
        assert_eq!(r["corner_tets"].as_array().unwrap().len(), corners);
        assert_eq!(r["lower_bound_3wc"], 9);
        assert_eq!(r["lower_bound_2wc"], 24);
    }
    let tet = fixture(dir.path(), "tet-C");
    assert_eq!(wcmesh(&["cube-audit", tet.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn records_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let cwc = fixture(dir.path(), "wc3-deg6555333");
    let cube = dir.path().join("cube.mesh");
    wcmesh(&["generate", "cube", "--tets", "6", "-o", cube.to_str().unwrap()]);
    let runs: Vec<Vec<&str>> = vec![
        vec!["check", cwc.to_str().unwrap()],
        vec!["classify-link", "--enumerate", "9"],
        vec!["cube-audit", cube.to_str().unwrap()],
        vec!["generate", "kgon", "--k", "9"],
        vec!["region", "--facet", "1,0,0,0,1,0,0,0,0", "--bbox", "-1,-1,-1,1,1,1", "--res", "4"],
    ];
    for args in runs {
        let mut a = args.clone();
        a.extend(["--format", "records", "--seed", "7"]);
        let first = wcmesh(&a);
        let second = wcmesh(&a);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        assert_eq!(first.status.code(), second.status.code());
        a.push("--parallel");
        assert_eq!(wcmesh(&a).stdout, first.stdout, "{args:?} --parallel");
    }
}
