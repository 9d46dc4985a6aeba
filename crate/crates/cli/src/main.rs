//! Command-line driver: assemble gluing equations, gate representations,
//! spin solutions, verify, and compare holonomy.
//!
//! Exit codes: 0 success, 1 unusable input (I/O, parse, shape mismatch),
//! 2 mathematical failure (gate violated, residual too large, no
//! convergence, distinct holonomy).

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use glueq::fundamental_group::{check_representation, input_tolerance, Presentation, Representation};
use glueq::gluing::{default_tolerance, GluingSystem, ShapeAssignment};
use glueq::holonomy::{conjugacy_check, recover_representation, ConjugacyVerdict};
use glueq::spinning::Spinner;
use glueq::tolerances;
use glueq::triangulation::Triangulation;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "glueq", disable_version_flag = true)]
#[command(about = "Gluing equations on triangulated 3-manifolds: solutions from representations and back")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Output {
    /// Output format
    #[arg(long, value_enum, default_value = "text", global = false)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a triangulation: tetrahedra, edge and vertex classes
    Info {
        triangulation: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Print the edge-path presentation of the fundamental group
    Presentation {
        triangulation: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Check a representation: relators and the loop-edge gate
    CheckRep {
        triangulation: PathBuf,
        representation: PathBuf,
        /// Relator tolerance (loop-edge gate is fixed at 1e-6)
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Spin solutions of the gluing equations out of a representation
    Spin {
        triangulation: PathBuf,
        representation: PathBuf,
        /// Base seed; solution k uses seed + k
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of solutions
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Residual each solution must meet
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Check a solution against the gluing equations
    Verify {
        triangulation: PathBuf,
        solution: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Volumes of solutions, with mean and spread over several files
    Volume {
        #[arg(required = true)]
        solutions: Vec<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Recover the holonomy representation of a solution
    Holonomy {
        triangulation: PathBuf,
        solution: PathBuf,
        /// Relator tolerance for the recovered representation
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Compare two representations by their trace battery
    Compare {
        representation_a: PathBuf,
        representation_b: PathBuf,
        /// Seed of the random word battery
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Newton-refine a starting assignment to a solution
    Solve {
        triangulation: PathBuf,
        start: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// 15 significant digits, the text-mode float form.
fn sig(x: f64) -> String {
    format!("{x:.14e}")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_triangulation(path: &Path) -> Result<Triangulation> {
    Triangulation::from_json_str(&read(path)?)
        .with_context(|| format!("parsing triangulation {}", path.display()))
}

fn load_representation(path: &Path) -> Result<Representation> {
    Representation::from_json_str(&read(path)?)
        .with_context(|| format!("parsing representation {}", path.display()))
}

fn load_solution(path: &Path) -> Result<ShapeAssignment> {
    ShapeAssignment::from_json_str(&read(path)?)
        .with_context(|| format!("parsing solution {}", path.display()))
}

/// Mathematical failure: diagnostic on stderr, exit code 2.
fn math_fail(msg: &str) -> Result<u8> {
    eprintln!("{msg}");
    Ok(2)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Info { triangulation, out } => info(&triangulation, out.format),
        Command::Presentation { triangulation, out } => presentation(&triangulation, out.format),
        Command::CheckRep { triangulation, representation, tol, out } => {
            check_rep(&triangulation, &representation, tol, out.format)
        }
        Command::Spin { triangulation, representation, seed, count, tol, out } => {
            spin(&triangulation, &representation, seed, count, tol, out.format)
        }
        Command::Verify { triangulation, solution, tol, out } => {
            verify(&triangulation, &solution, tol, out.format)
        }
        Command::Volume { solutions, out } => volume(&solutions, out.format),
        Command::Holonomy { triangulation, solution, tol, out } => {
            holonomy(&triangulation, &solution, tol, out.format)
        }
        Command::Compare { representation_a, representation_b, seed, tol, out } => {
            compare(&representation_a, &representation_b, seed, tol, out.format)
        }
        Command::Solve { triangulation, start, tol, out } => {
            solve(&triangulation, &start, tol, out.format)
        }
    }
}

fn info(tri_path: &Path, format: Format) -> Result<u8> {
    let tri = load_triangulation(tri_path)?;
    let degrees: Vec<usize> = tri.edge_classes().iter().map(|c| c.degree()).collect();
    let chis = tri.vertex_link_characteristics();
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Wire {
                num_tetrahedra: usize,
                edge_degrees: Vec<usize>,
                num_vertex_classes: usize,
                vertex_link_characteristics: Vec<i64>,
                closed: bool,
                manifold: bool,
            }
            println!(
                "{}",
                serde_json::to_string(&Wire {
                    num_tetrahedra: tri.num_tetrahedra(),
                    edge_degrees: degrees,
                    num_vertex_classes: tri.vertex_classes().len(),
                    vertex_link_characteristics: chis,
                    closed: true,
                    manifold: tri.is_manifold(),
                })?
            );
        }
        Format::Text => {
            println!("tetrahedra: {}", tri.num_tetrahedra());
            let ds: Vec<String> = degrees.iter().map(|d| d.to_string()).collect();
            println!("edge classes: {} (degrees {})", degrees.len(), ds.join(", "));
            let cs: Vec<String> = chis.iter().map(|c| c.to_string()).collect();
            println!(
                "vertex classes: {} (link Euler characteristics {})",
                tri.vertex_classes().len(),
                cs.join(", ")
            );
            println!("closed: yes (every face glued)");
            println!(
                "manifold: {}",
                if tri.is_manifold() { "yes (all vertex links are spheres)" } else { "no (some vertex link is not a sphere)" }
            );
        }
    }
    Ok(0)
}

fn presentation(tri_path: &Path, format: Format) -> Result<u8> {
    let tri = load_triangulation(tri_path)?;
    let pres = Presentation::from_triangulation(&tri)?;
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct GenWire {
                name: String,
                edge_class: usize,
                tet: usize,
                edge: usize,
                from_vertex_class: usize,
                to_vertex_class: usize,
            }
            #[derive(Serialize)]
            struct Wire {
                generators: Vec<GenWire>,
                relators: Vec<String>,
            }
            let generators = (0..pres.num_generators())
                .map(|k| {
                    let e = pres.generator_edge(k);
                    let (tet, edge) = tri.edge_classes()[e].representative();
                    let (from, to) = pres.edge_ends(e);
                    GenWire {
                        name: format!("g{k}"),
                        edge_class: e,
                        tet,
                        edge,
                        from_vertex_class: from,
                        to_vertex_class: to,
                    }
                })
                .collect();
            let relators = pres.relators().iter().map(|r| r.to_string()).collect();
            println!("{}", serde_json::to_string(&Wire { generators, relators })?);
        }
        Format::Text => {
            println!("generators: {}", pres.num_generators());
            for k in 0..pres.num_generators() {
                let e = pres.generator_edge(k);
                let (tet, edge) = tri.edge_classes()[e].representative();
                let (from, to) = pres.edge_ends(e);
                println!("  g{k} = edge class {e} (tet {tet} edge {edge}), vertex {from} -> vertex {to}");
            }
            println!("relators: {}", pres.relators().len());
            for (i, r) in pres.relators().iter().enumerate() {
                let w = if r.is_empty() { "1".to_string() } else { r.to_string() };
                println!("  r{i}: {w}");
            }
        }
    }
    Ok(0)
}

fn check_rep(tri_path: &Path, rep_path: &Path, tol: Option<f64>, format: Format) -> Result<u8> {
    let tri = load_triangulation(tri_path)?;
    let pres = Presentation::from_triangulation(&tri)?;
    let rep = load_representation(rep_path)?;
    let tol = tol.unwrap_or_else(input_tolerance);
    let check = check_representation(&pres, &rep)?;
    let pass = check.passes(tol);
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Wire {
                max_relator_deviation: f64,
                min_loop_edge_distance: f64,
                failing_loop_edges: Vec<usize>,
                pass: bool,
            }
            println!(
                "{}",
                serde_json::to_string(&Wire {
                    max_relator_deviation: check.max_deviation,
                    min_loop_edge_distance: check.min_loop_edge_distance,
                    failing_loop_edges: check.failing_loop_edges(),
                    pass,
                })?
            );
        }
        Format::Text => {
            println!("max relator deviation: {}", sig(check.max_deviation));
            if check.min_loop_edge_distance.is_finite() {
                println!("min loop-edge distance: {}", sig(check.min_loop_edge_distance));
            } else {
                println!("min loop-edge distance: none (no loop edges)");
            }
            println!("{}", if pass { "PASS" } else { "FAIL" });
        }
    }
    if pass {
        return Ok(0);
    }
    if let Some(&e) = check.failing_loop_edges().first() {
        return math_fail(&format!(
            "loop edge {e} maps within {:.0e} of the identity: the gate for spinning fails",
            tolerances::EDGE_NONTRIVIALITY
        ));
    }
    math_fail(&format!(
        "relator deviation {} exceeds tolerance {}",
        sig(check.max_deviation),
        sig(tol)
    ))
}

#[derive(Serialize)]
struct SpinRecord {
    seed: u64,
    solution: serde_json::Value,
    base_points: Vec<glueq::geometry::IdealPoint>,
    volume: f64,
}

fn spin(
    tri_path: &Path,
    rep_path: &Path,
    seed: u64,
    count: u64,
    tol: Option<f64>,
    format: Format,
) -> Result<u8> {
    let tri = load_triangulation(tri_path)?;
    let pres = Presentation::from_triangulation(&tri)?;
    let rep = load_representation(rep_path)?;
    let check = check_representation(&pres, &rep)?;
    if !check.passes(input_tolerance()) {
        return math_fail("representation rejected: run check-rep for the diagnosis");
    }
    let tol = tol.unwrap_or_else(default_tolerance);
    let spinner = Spinner::new(&tri, &pres);
    let seeds: Vec<u64> = (seed..seed + count).collect();
    let mut records = Vec::with_capacity(seeds.len());
    for (s, outcome) in seeds.iter().zip(spinner.spin_batch(&rep, &seeds)) {
        let out = match outcome {
            Ok(out) => out,
            Err(e) => return math_fail(&format!("seed {s}: {e}")),
        };
        if out.residual > tol {
            return math_fail(&format!(
                "seed {s}: residual {} exceeds tolerance {}",
                sig(out.residual),
                sig(tol)
            ));
        }
        records.push((*s, out));
    }
    match format {
        Format::Json => {
            let wire: Vec<SpinRecord> = records
                .into_iter()
                .map(|(seed, out)| SpinRecord {
                    seed,
                    solution: serde_json::from_str(&out.assignment.to_json_string())
                        .expect("solution serialization is valid json"),
                    base_points: out.placement,
                    volume: out.assignment.volume(),
                })
                .collect();
            println!("{}", serde_json::to_string(&wire)?);
        }
        Format::Text => {
            for (seed, out) in records {
                println!(
                    "seed {seed}: residual {}, volume {}",
                    sig(out.residual),
                    sig(out.assignment.volume())
                );
                for (t, z) in out.assignment.slot0s().iter().enumerate() {
                    println!("  z[{t}] = {} {:+.14e} i", sig(z.re), z.im);
                }
            }
        }
    }
    Ok(0)
}

fn verify(tri_path: &Path, sol_path: &Path, tol: Option<f64>, format: Format) -> Result<u8> {
    let tri = load_triangulation(tri_path)?;
    let shapes = load_solution(sol_path)?;
    let system = GluingSystem::new(&tri);
    if shapes.len() != system.num_tetrahedra() {
        anyhow::bail!(
            "solution has {} shapes, triangulation has {} tetrahedra",
            shapes.len(),
            system.num_tetrahedra()
        );
    }
    let tol = tol.unwrap_or_else(default_tolerance);
    let residuals: Vec<f64> = system.residuals(&shapes).iter().map(|r| r.norm()).collect();
    let max = residuals.iter().cloned().fold(0.0, f64::max);
    let pass = max <= tol;
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Wire {
                edge_residuals: Vec<f64>,
                max_residual: f64,
                pass: bool,
            }
            println!("{}", serde_json::to_string(&Wire { edge_residuals: residuals, max_residual: max, pass })?);
        }
        Format::Text => {
            for (e, r) in residuals.iter().enumerate() {
                println!("edge {e}: residual {}", sig(*r));
            }
            println!("max residual: {}", sig(max));
            println!("{}", if pass { "PASS" } else { "FAIL" });
        }
    }
    if pass {
        Ok(0)
    } else {
        math_fail(&format!("max residual {} exceeds tolerance {}", sig(max), sig(tol)))
    }
}

fn volume(sol_paths: &[PathBuf], format: Format) -> Result<u8> {
    let mut volumes = Vec::with_capacity(sol_paths.len());
    for p in sol_paths {
        volumes.push(load_solution(p)?.volume());
    }
    let mean = volumes.iter().sum::<f64>() / volumes.len() as f64;
    let stdev = if volumes.len() > 1 {
        (volumes.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (volumes.len() - 1) as f64)
            .sqrt()
    } else {
        0.0
    };
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Wire {
                volumes: Vec<f64>,
                mean: f64,
                stdev: f64,
            }
            println!("{}", serde_json::to_string(&Wire { volumes, mean, stdev })?);
        }
        Format::Text => {
            for (p, v) in sol_paths.iter().zip(&volumes) {
                println!("{}: {}", p.display(), sig(*v));
            }
            println!("mean: {}", sig(mean));
            println!("stdev: {}", sig(stdev));
        }
    }
    Ok(0)
}

fn holonomy(tri_path: &Path, sol_path: &Path, tol: Option<f64>, format: Format) -> Result<u8> {
    let tri = load_triangulation(tri_path)?;
    let pres = Presentation::from_triangulation(&tri)?;
    let shapes = load_solution(sol_path)?;
    let tol = tol.unwrap_or(tolerances::RELATOR_RECOVERED);
    let rec = match recover_representation(&tri, &pres, &shapes) {
        Ok(rec) => rec,
        Err(e) => return math_fail(&format!("cannot develop the solution: {e}")),
    };
    if rec.max_relator_deviation > tol {
        return math_fail(&format!(
            "recovered representation violates the relators: deviation {} (link defect {})",
            sig(rec.max_relator_deviation),
            sig(rec.link_defect)
        ));
    }
    match format {
        Format::Json => println!("{}", rec.rep.to_json_string()),
        Format::Text => {
            println!("max relator deviation: {}", sig(rec.max_relator_deviation));
            println!("link defect: {}", sig(rec.link_defect));
            println!("flatness: {}", sig(rec.flatness));
            for k in 0..rec.rep.num_generators() {
                let [a, b, c, d] = rec.rep.image(k).entries();
                println!("g{k}:");
                println!("  [{} {:+.14e} i, {} {:+.14e} i]", sig(a.re), a.im, sig(b.re), b.im);
                println!("  [{} {:+.14e} i, {} {:+.14e} i]", sig(c.re), c.im, sig(d.re), d.im);
            }
        }
    }
    Ok(0)
}

fn compare(a_path: &Path, b_path: &Path, seed: u64, tol: Option<f64>, format: Format) -> Result<u8> {
    let a = load_representation(a_path)?;
    let b = load_representation(b_path)?;
    let tol = tol.unwrap_or(tolerances::CONJUGACY);
    let report = conjugacy_check(&a, &b, seed)?;
    let verdict_failed = report.verdict == ConjugacyVerdict::Distinct || report.trace_gap > tol;
    let verdict = match report.verdict {
        _ if verdict_failed => "distinct",
        ConjugacyVerdict::Conjugate => "conjugate",
        ConjugacyVerdict::ReducibleInconclusive => "reducible-flag",
        ConjugacyVerdict::Distinct => unreachable!(),
    };
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Wire {
                verdict: &'static str,
                max_trace_deviation: f64,
            }
            println!("{}", serde_json::to_string(&Wire { verdict, max_trace_deviation: report.trace_gap })?);
        }
        Format::Text => {
            println!("verdict: {verdict}");
            println!("max trace deviation: {}", sig(report.trace_gap));
        }
    }
    if verdict_failed {
        math_fail(&format!("trace batteries disagree by {}", sig(report.trace_gap)))
    } else {
        Ok(0)
    }
}

fn solve(tri_path: &Path, start_path: &Path, tol: Option<f64>, format: Format) -> Result<u8> {
    let tri = load_triangulation(tri_path)?;
    let start = load_solution(start_path)?;
    let system = GluingSystem::new(&tri);
    if start.len() != system.num_tetrahedra() {
        anyhow::bail!(
            "start has {} shapes, triangulation has {} tetrahedra",
            start.len(),
            system.num_tetrahedra()
        );
    }
    let tol = tol.unwrap_or_else(default_tolerance);
    let out = match system.newton_refine(&start, tol, 100) {
        Ok(out) => out,
        Err(e) => return math_fail(&format!("{e}")),
    };
    match format {
        Format::Json => println!("{}", out.assignment.to_json_string()),
        Format::Text => {
            println!("iterations: {}", out.iterations);
            println!("residual: {}", sig(out.residual));
            for (t, z) in out.assignment.slot0s().iter().enumerate() {
                println!("z[{t}] = {} {:+.14e} i", sig(z.re), z.im);
            }
        }
    }
    Ok(0)
}
