use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use irreducible::baselines::EdgeOrder;
use irreducible::bench::{self, Algorithm, BenchRow, Family, SuiteSpec};
use irreducible::irreducer::EngineOptions;
use irreducible::meshgen::{self, GenError};
use irreducible::meshio::{self, OffError};
use irreducible::{topo, MeshError, MeshF64, SoupF64};

#[derive(Parser)]
#[command(name = "irreducible", version, about = "Reduce closed surface triangulations to irreducible ones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a mesh to an irreducible triangulation.
    Reduce {
        #[arg(long, value_enum, default_value_t = Algo::Rs)]
        algo: Algo,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: Option<PathBuf>,
        /// Seed for the brute-force edge shuffle.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append a statistics row to this CSV file.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Write the contraction sequence to this file.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Certify the output and check the Euler characteristic.
        #[arg(long)]
        verify: bool,
    },
    /// Report topology and irreducibility of a mesh.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Generate a mesh.
    Gen {
        #[command(subcommand)]
        shape: Shape,
        /// Apply 1-to-4 refinement this many times.
        #[arg(long, global = true, default_value_t = 0)]
        refine: u32,
        #[arg(long = "out", global = true)]
        output: Option<PathBuf>,
    },
    /// Run a benchmark family and write CSV.
    Bench {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "rs,schipper,bf")]
        algos: String,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Rs,
    Schipper,
    Bf,
}

impl From<Algo> for Algorithm {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Rs => Algorithm::Rs,
            Algo::Schipper => Algorithm::Schipper,
            Algo::Bf => Algorithm::Bf,
        }
    }
}

#[derive(Subcommand)]
enum Shape {
    Tet,
    Octahedron,
    Icosahedron,
    Torus7,
    Torus { p: usize, q: usize },
    Brick {
        rows: usize,
        cols: usize,
        /// Row-major cell kinds over F (flat), C (cavity), H (hole).
        #[arg(long)]
        cells: String,
    },
    Badcase { m: usize },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn topology(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn verification(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<OffError> for Failure {
    fn from(e: OffError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<MeshError> for Failure {
    fn from(e: MeshError) -> Self {
        Failure::topology(e.to_string())
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is our topology-error code.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Reduce { algo, input, output, seed, stats, log, verify } => {
            cmd_reduce(algo.into(), &input, output.as_deref(), seed, stats.as_deref(), log.as_deref(), verify)
        }
        Command::Verify { input } => cmd_verify(&input),
        Command::Gen { shape, refine, output } => cmd_gen(shape, refine, output.as_deref()),
        Command::Bench { family, algos, reps, seed_base, output } => {
            cmd_bench(&family, &algos, reps, seed_base, output.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path) -> Result<MeshF64, Failure> {
    let soup: SoupF64 = meshio::read_off_file(path)?;
    Ok(soup.build()?)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_reduce(
    algorithm: Algorithm,
    input: &Path,
    output: Option<&Path>,
    seed: u64,
    stats_path: Option<&Path>,
    log_path: Option<&Path>,
    verify: bool,
) -> Result<u8, Failure> {
    let mesh = load(input)?;
    let before = topo::euler_genus(&mesh).map_err(|e| Failure::topology(e.to_string()))?;
    let n_in = (mesh.n_vertices(), mesh.n_edges(), mesh.n_faces());
    let r = bench::run_algorithm(mesh, algorithm, EdgeOrder::Shuffled(seed), EngineOptions::unchecked());

    if let Some(path) = log_path {
        let mut text = String::new();
        for rec in &r.log {
            text.push_str(&rec.to_string());
            text.push('\n');
        }
        std::fs::write(path, text)?;
    }
    if let Some(path) = stats_path {
        let row = BenchRow {
            mesh: input.display().to_string(),
            n_v: n_in.0,
            n_e: n_in.1,
            n_f: n_in.2,
            genus: before.genus,
            algorithm: algorithm.to_string(),
            seed: if algorithm == Algorithm::Bf { seed.to_string() } else { "-".into() },
            link_tests: r.stats.link_tests as f64,
            retested_edges: r.stats.retested_edges as f64,
            contractions: r.stats.contractions as f64,
            output_n_v: r.mesh.n_vertices() as f64,
            elapsed_ns: r.stats.elapsed().as_nanos() as f64,
            link_work: r.stats.link_work as f64,
            error: String::new(),
        };
        append_stats(path, &row)?;
    }
    if verify {
        let after = topo::euler_genus(&r.mesh).map_err(|e| Failure::verification(e.to_string()))?;
        if after.euler != before.euler {
            return Err(Failure::verification(format!(
                "Euler characteristic changed from {} to {}",
                before.euler, after.euler
            )));
        }
        if !topo::certify_irreducible(&r.mesh) {
            return Err(Failure::verification("output is not irreducible"));
        }
    }
    write_text(output, &meshio::write_mesh_off(&r.mesh))?;
    eprintln!(
        "{}: {} -> {} vertices, {} contractions, {} link tests",
        algorithm,
        n_in.0,
        r.mesh.n_vertices(),
        r.stats.contractions,
        r.stats.link_tests
    );
    Ok(0)
}

fn append_stats(path: &Path, row: &BenchRow) -> Result<(), Failure> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut buf = Vec::new();
    bench::write_csv(std::slice::from_ref(row), &mut buf).map_err(|e| Failure::usage(e.to_string()))?;
    let text = String::from_utf8_lossy(&buf);
    let body = if fresh { &text[..] } else { text.split_once('\n').map_or("", |(_, rest)| rest) };
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(body.as_bytes())?;
    Ok(())
}

fn cmd_verify(input: &Path) -> Result<u8, Failure> {
    let mesh = load(input)?;
    let report = topo::euler_genus(&mesh).map_err(|e| Failure::topology(e.to_string()))?;
    println!("vertices: {}", report.n_v);
    println!("edges: {}", report.n_e);
    println!("faces: {}", report.n_f);
    println!("euler: {}", report.euler);
    println!("genus: {}", report.genus);
    println!("t4: {}", if report.is_t4 { "yes" } else { "no" });
    println!("critical cycles per edge:");
    for (cycles, edges) in topo::critical_cycle_histogram(&mesh) {
        println!("  {cycles}: {edges}");
    }
    let contractible = if report.is_t4 { Vec::new() } else { topo::contractible_edges(&mesh) };
    if contractible.is_empty() {
        println!("irreducible: yes, genus {}", report.genus);
        Ok(0)
    } else {
        println!("irreducible: no, {} contractible edges", contractible.len());
        for e in contractible {
            let (a, b) = mesh.endpoints(e);
            println!("  [{a},{b}]");
        }
        Ok(1)
    }
}

fn cmd_gen(shape: Shape, refine: u32, output: Option<&Path>) -> Result<u8, Failure> {
    let soup: SoupF64 = match shape {
        Shape::Tet => meshgen::gen_tetrahedron(),
        Shape::Octahedron => meshgen::gen_octahedron(),
        Shape::Icosahedron => meshgen::gen_icosahedron(),
        Shape::Torus7 => meshgen::gen_torus7(),
        Shape::Torus { p, q } => meshgen::gen_torus_grid(p, q)?,
        Shape::Brick { rows, cols, cells } => meshgen::gen_brick(rows, cols, &meshgen::parse_cells(&cells)?)?,
        Shape::Badcase { m } => meshgen::gen_badcase_sphere(m)?,
    };
    let soup = meshgen::refine(&soup, refine);
    write_text(output, &meshio::write_off(&soup))?;
    Ok(0)
}

fn cmd_bench(family: &str, algos: &str, reps: usize, seed_base: u64, output: Option<&Path>) -> Result<u8, Failure> {
    let family: Family = family.parse().map_err(Failure::usage)?;
    let algorithms = algos
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<Algorithm>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::usage)?;
    if algorithms.is_empty() {
        return Err(Failure::usage("no algorithms given"));
    }
    let rows = bench::run_suite(&SuiteSpec { family, algorithms, reps, seed_base });
    let result = match output {
        Some(p) => bench::write_csv(&rows, File::create(p)?),
        None => bench::write_csv(&rows, io::stdout().lock()),
    };
    result.map_err(|e| Failure::usage(e.to_string()))?;
    Ok(0)
}
