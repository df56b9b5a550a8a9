use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wcmesh::complex::{enumerate_sphere_triangulations, SphereTriangulation, TetMesh};
use wcmesh::constructions::{
    cone_to_origin, insert_degree3_2wc, insert_degree3_3wc, insert_degree4_2wc, kgon_sphere,
    load_fixture, Insertion, KgonSpec, FIXTURE_NAMES,
};
use wcmesh::cube::{cube_audit, five_tet_cube, six_tet_cube};
use wcmesh::io::{self as wio, record_line, RECORDS_HEADER};
use wcmesh::link_analysis::{
    classify_link, generate_band_family, generate_open_band, ClassifyOptions, EmbeddingOptions,
    LinkClassification, Wc2Status, Wc3Status, DEFAULT_POOL_CAP,
};
use wcmesh::predicates::{sample_region, BBox};
use wcmesh::report::{check_mesh_file, CheckOptions};
use wcmesh::{Point, Simplex, Tolerance};

#[derive(Parser)]
#[command(name = "wcmesh", version, about = "Well-centeredness checks for simplicial meshes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Relative tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Absolute tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    abs_tol: f64,
    /// Seed for randomized searches.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Analyze independent items in parallel.
    #[arg(long, global = true)]
    parallel: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// k-well-centeredness of every cell, plus vertex-link classification.
    Check {
        /// Mesh file, or `-` for stdin.
        mesh: PathBuf,
        /// 1, 2, 3 or `all`.
        #[arg(long, default_value = "all")]
        k: String,
    },
    /// Classify sphere triangulations as vertex links.
    ClassifyLink {
        /// Link file (`.off` files are read as surfaces).
        #[arg(conflicts_with = "enumerate", required_unless_present = "enumerate")]
        file: Option<PathBuf>,
        /// Classify every triangulation with this many vertices.
        #[arg(long)]
        enumerate: Option<usize>,
        /// Cap on the certificate candidate pool.
        #[arg(long, default_value_t = DEFAULT_POOL_CAP)]
        max_pool: usize,
        /// Skip the acute-embedding search.
        #[arg(long)]
        no_embed: bool,
        /// Also search for 3-well-centered star positions.
        #[arg(long)]
        wc3_search: bool,
    },
    /// Write a mesh or link file.
    Generate {
        #[command(subcommand)]
        what: Generate,
        /// Output file; stdout if absent.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Sample the region polynomial of a facet on a grid.
    Region {
        /// Nine comma-separated facet coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        facet: Vec<f64>,
        /// xmin,ymin,zmin,xmax,ymax,zmax
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        bbox: Vec<f64>,
        /// One resolution for all axes, or nx,ny,nz.
        #[arg(long, value_delimiter = ',', default_value = "32")]
        res: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Audit a tetrahedral mesh of the unit cube.
    CubeAudit { mesh: PathBuf },
}

#[derive(Subcommand)]
enum Generate {
    /// Coned k-gon sphere mesh.
    Kgon {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        rings: usize,
    },
    /// Band-family link with `m` vertices.
    Band {
        #[arg(long)]
        m: usize,
        /// The open band with one tet removed.
        #[arg(long)]
        open: bool,
    },
    /// A named fixture mesh.
    Fixture { name: String },
    /// Unit cube split into 5 or 6 tets.
    Cube {
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u8).range(5..=6))]
        tets: u8,
    },
    /// Degree-3 vertex insertion keeping tets 3-well-centered.
    InsertDeg3 {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        u: usize,
        #[arg(long)]
        tet: usize,
        /// Repeat on the newly created tets.
        #[arg(long, default_value_t = 1)]
        iterate: usize,
    },
    /// Degree-3 vertex insertion keeping face angles at `u` acute.
    InsertDeg3_2wc {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        u: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        face: Vec<usize>,
    },
    /// Degree-4 vertex insertion splitting a link edge.
    InsertDeg4 {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        u: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        edge: Vec<usize>,
    },
}

fn open_input(path: &Path) -> Result<Box<dyn BufRead>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        return Ok(Box::new(io::Cursor::new(buf)));
    }
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(Box::new(BufReader::new(f)))
}

fn write_output(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).with_context(|| format!("cannot write {}", p.display())),
        None => {
            io::stdout().lock().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn tolerance(g: &Global) -> Result<Tolerance> {
    Ok(Tolerance::new(g.tol, g.abs_tol)?)
}

fn read_tet_mesh(path: &Path, tol: &Tolerance) -> Result<TetMesh> {
    wio::read_mesh(open_input(path)?, tol).with_context(|| format!("reading {}", path.display()))
}

fn cmd_check(g: &Global, mesh: &Path, k: &str) -> Result<u8> {
    let file = wio::read_mesh_file(open_input(mesh)?)
        .with_context(|| format!("reading {}", mesh.display()))?;
    let ks = match k {
        "all" => Vec::new(),
        s => {
            let k: usize = s.parse().map_err(|_| anyhow!("--k must be 1, 2, 3 or all"))?;
            if k == 0 || k > file.dim {
                bail!("--k {k} is outside 1..={}", file.dim);
            }
            vec![k]
        }
    };
    let opts = CheckOptions {
        ks,
        tol: tolerance(g)?,
        parallel: g.parallel,
        links: true,
    };
    let report = check_mesh_file(&file, &opts);
    let body = match g.format {
        Format::Text => report.to_text(),
        Format::Records => report.to_records(),
    };
    write_output(None, &body)?;
    Ok(report.exit_code() as u8)
}

#[derive(Serialize)]
struct LinkRecord<'a> {
    record: &'static str,
    index: usize,
    #[serde(flatten)]
    classification: &'a LinkClassification,
}

#[derive(Serialize, Default)]
struct LinkSummary {
    record: &'static str,
    m: Option<usize>,
    count: usize,
    wc3_blocked: usize,
    wc3_realized: usize,
    wc3_unknown: usize,
    wc2_blocked: usize,
    wc2_feasible: usize,
    wc2_unknown: usize,
}

fn load_link(path: &Path) -> Result<SphereTriangulation> {
    let r = open_input(path)?;
    let is_off = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("off"));
    let link = if is_off {
        wio::read_off(r).map(|s| s.triangulation)
    } else {
        wio::read_link(r)
    };
    link.with_context(|| format!("reading {}", path.display()))
}

fn cmd_classify(
    g: &Global,
    file: Option<&Path>,
    enumerate: Option<usize>,
    max_pool: usize,
    no_embed: bool,
    wc3_search: bool,
) -> Result<u8> {
    let links = match (file, enumerate) {
        (_, Some(m)) => enumerate_sphere_triangulations(m)?,
        (Some(p), None) => vec![load_link(p)?],
        (None, None) => bail!("give a link file or --enumerate M"),
    };
    let search = EmbeddingOptions {
        seed: g.seed,
        ..Default::default()
    };
    let opts = ClassifyOptions {
        max_pool,
        embedding: (!no_embed).then(|| search.clone()),
        wc3_search: wc3_search.then_some(search),
    };
    let classify = |l: &SphereTriangulation| classify_link(l, &opts);
    let results: Vec<LinkClassification> = if g.parallel {
        use rayon::prelude::*;
        links.par_iter().map(classify).collect::<Result<_, _>>()?
    } else {
        links.iter().map(classify).collect::<Result<_, _>>()?
    };

    let mut s = LinkSummary {
        record: "summary",
        m: enumerate,
        count: results.len(),
        ..Default::default()
    };
    for c in &results {
        match c.wc3 {
            Wc3Status::Blocked { .. } => s.wc3_blocked += 1,
            Wc3Status::Realized { .. } => s.wc3_realized += 1,
            Wc3Status::Unknown => s.wc3_unknown += 1,
        }
        match c.wc2 {
            Wc2Status::Blocked { .. } => s.wc2_blocked += 1,
            Wc2Status::Feasible { .. } => s.wc2_feasible += 1,
            Wc2Status::Unknown => s.wc2_unknown += 1,
        }
    }

    let mut out = String::new();
    match g.format {
        Format::Records => {
            out.push_str(RECORDS_HEADER);
            out.push('\n');
            for (index, classification) in results.iter().enumerate() {
                out.push_str(&record_line(&LinkRecord {
                    record: "link",
                    index,
                    classification,
                }));
                out.push('\n');
            }
            out.push_str(&record_line(&s));
            out.push('\n');
        }
        Format::Text => {
            for (i, c) in results.iter().enumerate() {
                let wc3 = match &c.wc3 {
                    Wc3Status::Blocked { certificate } => {
                        let tets: Vec<String> = certificate
                            .tets
                            .iter()
                            .map(|t| format!("[{} {} {} {}]", t[0], t[1], t[2], t[3]))
                            .collect();
                        format!("BLOCKED {}", tets.join(" "))
                    }
                    Wc3Status::Realized { .. } => "REALIZED".into(),
                    Wc3Status::Unknown => "UNKNOWN".into(),
                };
                let wc2 = match &c.wc2 {
                    Wc2Status::Blocked { max_degree } => format!("BLOCKED (max degree {max_degree})"),
                    Wc2Status::Feasible { .. } => "FEASIBLE".into(),
                    Wc2Status::Unknown => "UNKNOWN".into(),
                };
                out.push_str(&format!("{i:>4} {}  wc3 {wc3}  wc2 {wc2}\n", c.degree_list));
            }
            out.push_str(&format!(
                "{} links; 3-WC: {} blocked, {} realized, {} unknown; \
                 2-WC: {} blocked, {} feasible, {} unknown\n",
                s.count,
                s.wc3_blocked,
                s.wc3_realized,
                s.wc3_unknown,
                s.wc2_blocked,
                s.wc2_feasible,
                s.wc2_unknown
            ));
        }
    }
    write_output(None, &out)?;
    Ok(0)
}

fn insertion_note(ins: &Insertion) -> String {
    match ins.epsilon {
        Some(e) => format!("# inserted vertex {} (epsilon {e:?})\n", ins.new_vertex),
        None => format!("# inserted vertex {}\n", ins.new_vertex),
    }
}

fn cmd_generate(g: &Global, what: &Generate, output: Option<&Path>) -> Result<u8> {
    let tol = tolerance(g)?;
    let body = match what {
        Generate::Kgon { k, rings } => {
            let surface = kgon_sphere(&KgonSpec::new(*k).with_rings(*rings))?;
            wio::mesh_to_string(&cone_to_origin(&surface, &tol)?)
        }
        Generate::Band { m, open } => {
            let (cert, link) = if *open {
                generate_open_band(*m)?
            } else {
                generate_band_family(*m)?
            };
            let mut s = wio::link_to_string(&link);
            for t in &cert.tets {
                s.push_str(&format!("# complex tet {} {} {} {}\n", t[0], t[1], t[2], t[3]));
            }
            s
        }
        Generate::Fixture { name } => {
            if !FIXTURE_NAMES.contains(&name.as_str()) {
                bail!("unknown fixture {name:?}; known: {}", FIXTURE_NAMES.join(", "));
            }
            wio::mesh_to_string(&load_fixture(name)?)
        }
        Generate::Cube { tets } => wio::mesh_to_string(&if *tets == 5 {
            five_tet_cube()
        } else {
            six_tet_cube()
        }),
        Generate::InsertDeg3 {
            mesh,
            u,
            tet,
            iterate,
        } => {
            let mut current = read_tet_mesh(mesh, &tol)?;
            let mut tet = *tet;
            let mut notes = String::new();
            for step in 0..*iterate {
                let ins = insert_degree3_3wc(&current, *u, tet, &tol)
                    .with_context(|| format!("insertion step {}", step + 1))?;
                notes.push_str(&insertion_note(&ins));
                let next = ins.new_tets.iter().copied().find(|&t| {
                    step + 1 == *iterate || insert_degree3_3wc(&ins.mesh, *u, t, &tol).is_ok()
                });
                current = ins.mesh;
                match next {
                    Some(t) => tet = t,
                    None if step + 1 < *iterate => {
                        bail!("no new tet admits a further insertion after step {}", step + 1)
                    }
                    None => {}
                }
            }
            notes + &wio::mesh_to_string(&current)
        }
        Generate::InsertDeg3_2wc { mesh, u, face } => {
            if face.len() != 3 {
                bail!("--face takes three vertex indices");
            }
            let m = read_tet_mesh(mesh, &tol)?;
            let ins = insert_degree3_2wc(&m, *u, [face[0], face[1], face[2]], &tol)?;
            insertion_note(&ins) + &wio::mesh_to_string(&ins.mesh)
        }
        Generate::InsertDeg4 { mesh, u, edge } => {
            if edge.len() != 2 {
                bail!("--edge takes two vertex indices");
            }
            let m = read_tet_mesh(mesh, &tol)?;
            let ins = insert_degree4_2wc(&m, *u, (edge[0], edge[1]), &tol)?;
            insertion_note(&ins) + &wio::mesh_to_string(&ins.mesh)
        }
    };
    write_output(output, &body)?;
    Ok(0)
}

fn cmd_region(
    g: &Global,
    facet: &[f64],
    bbox: &[f64],
    res: &[usize],
    output: Option<&Path>,
) -> Result<u8> {
    let tol = tolerance(g)?;
    if facet.len() != 9 || bbox.len() != 6 {
        bail!("--facet takes 9 numbers and --bbox takes 6");
    }
    let pts: Vec<Point> = facet
        .chunks(3)
        .map(|c| Point::from([c[0], c[1], c[2]]))
        .collect();
    let simplex = Simplex::new(pts)?;
    let bbox = BBox::new([bbox[0], bbox[1], bbox[2]], [bbox[3], bbox[4], bbox[5]])?;
    let res = match res {
        [n] => [*n; 3],
        [x, y, z] => [*x, *y, *z],
        _ => bail!("--res takes one value or three"),
    };
    let grid = sample_region(&simplex, bbox, res, &tol)?;
    let mut buf = Vec::new();
    grid.write_to(&mut buf)?;
    write_output(output, std::str::from_utf8(&buf)?)?;
    Ok(0)
}

fn cmd_cube_audit(g: &Global, mesh: &Path) -> Result<u8> {
    let tol = tolerance(g)?;
    let m = read_tet_mesh(mesh, &tol)?;
    let a = cube_audit(&m, &tol)?;
    let body = match g.format {
        Format::Records => {
            #[derive(Serialize)]
            struct Rec<'a> {
                record: &'static str,
                flagged: bool,
                #[serde(flatten)]
                audit: &'a wcmesh::cube::CubeAudit,
            }
            format!(
                "{RECORDS_HEADER}\n{}\n",
                record_line(&Rec {
                    record: "cube_audit",
                    flagged: a.flagged(),
                    audit: &a,
                })
            )
        }
        Format::Text => {
            let mut s = format!("tets: {}\n", a.num_tets);
            s.push_str(&format!("corner tets: {:?}\n", a.corner_tets));
            for f in &a.faces {
                s.push_str(&format!(
                    "face {}: {} triangles{}{}\n",
                    f.face,
                    f.triangles,
                    if f.two_right_triangles { ", two right triangles" } else { "" },
                    if f.meets_3wc_count { "" } else { ", below 3" },
                ));
            }
            s.push_str(&format!("tets not 3-WC: {:?}\n", a.not_3wc));
            s.push_str(&format!(
                "lower bounds: {} (3-WC){}, {} (2-WC){}\n",
                a.lower_bound_3wc,
                if a.below_3wc_bound { " BELOW" } else { "" },
                a.lower_bound_2wc,
                if a.below_2wc_bound { " BELOW" } else { "" },
            ));
            s.push_str(if a.flagged() { "FLAGGED\n" } else { "OK\n" });
            s
        }
    };
    write_output(None, &body)?;
    Ok(u8::from(a.flagged()))
}

fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    match &cli.command {
        Command::Check { mesh, k } => cmd_check(g, mesh, k),
        Command::ClassifyLink {
            file,
            enumerate,
            max_pool,
            no_embed,
            wc3_search,
        } => cmd_classify(g, file.as_deref(), *enumerate, *max_pool, *no_embed, *wc3_search),
        Command::Generate { what, output } => cmd_generate(g, what, output.as_deref()),
        Command::Region {
            facet,
            bbox,
            res,
            output,
        } => cmd_region(g, facet, bbox, res, output.as_deref()),
        Command::CubeAudit { mesh } => cmd_cube_audit(g, mesh),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
