//! Benchmark driver: runs the reducers over generated mesh families and
//! produces one CSV row per run.
//!
//! Timings cover only the reduction itself; meshes are built once and
//! cloned before each timed run. Deterministic reducers are repeated
//! `reps` times and report the fastest run. Brute-force runs report one
//! row per seed plus a `mean` row when `reps > 1`.

use std::fmt;
use std::io;
use std::str::FromStr;

use crate::baselines::{self, EdgeOrder};
use crate::irreducer::{Engine, EngineOptions, Reduction};
use crate::meshgen::{self, Cell, GenError};
use crate::topo;
use crate::{Mesh, TriangleSoup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Rs,
    Schipper,
    Bf,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rs => "rs",
            Algorithm::Schipper => "schipper",
            Algorithm::Bf => "bf",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rs" => Ok(Algorithm::Rs),
            "schipper" | "s" => Ok(Algorithm::Schipper),
            "bf" => Ok(Algorithm::Bf),
            _ => Err(format!("unknown algorithm {s:?} (expected rs, schipper or bf)")),
        }
    }
}

/// Runs one reducer on a mesh.
pub fn run_algorithm(mesh: Mesh<f64>, algorithm: Algorithm, order: EdgeOrder, options: EngineOptions) -> Reduction<f64> {
    match algorithm {
        Algorithm::Rs => Engine::with_options(mesh, options).run(),
        Algorithm::Schipper => baselines::schipper_reduce(mesh),
        Algorithm::Bf => baselines::brute_force_reduce_ordered(mesh, order),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// All-Cavity brick at increasing refinement levels (genus 0).
    Genus0Sweep,
    /// All-Hole 8 × 8 brick at increasing refinement levels (genus 64).
    FixedGenusSweep,
    /// 30 × 30 brick with `g` scattered Holes and Cavities elsewhere; the
    /// face count is the same for every `g`.
    GenusSweep,
    /// Bad-case spheres for m in {8, 16, 32, 64}; brute force uses the
    /// adversarial order.
    Badcase,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Genus0Sweep => "genus0-sweep",
            Family::FixedGenusSweep => "fixed-genus-sweep",
            Family::GenusSweep => "genus-sweep",
            Family::Badcase => "badcase",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "genus0-sweep" => Ok(Family::Genus0Sweep),
            "fixed-genus-sweep" => Ok(Family::FixedGenusSweep),
            "genus-sweep" => Ok(Family::GenusSweep),
            "badcase" => Ok(Family::Badcase),
            _ => Err(format!(
                "unknown family {s:?} (expected genus0-sweep, fixed-genus-sweep, genus-sweep or badcase)"
            )),
        }
    }
}

/// `holes` tunnels spread over `cells` grid cells, Cavities elsewhere.
/// Cell `i` is a Hole when `i · stride mod cells < holes` for a stride
/// coprime to `cells`, which scatters the tunnels instead of packing them
/// row by row.
pub fn sweep_cells(cells: usize, holes: usize) -> Vec<Cell> {
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let stride = (7..).find(|&s| gcd(s, cells) == 1).expect("some stride is coprime");
    (0..cells).map(|i| if (i * stride) % cells < holes { Cell::Hole } else { Cell::Cavity }).collect()
}

/// Side of the square brick used by the genus sweep.
pub const GENUS_SWEEP_SIDE: usize = 30;
pub const GENUS_SWEEP: [usize; 7] = [0, 150, 300, 450, 600, 750, 900];
pub const BADCASE_SIZES: [usize; 4] = [8, 16, 32, 64];

/// The named meshes of a family. Generation failures are returned in
/// place so the suite can record them.
pub fn family_meshes(family: Family) -> Vec<(String, Result<TriangleSoup<f64>, GenError>)> {
    match family {
        Family::Genus0Sweep => {
            let base = meshgen::gen_brick(3, 3, &[Cell::Cavity; 9]);
            (0..=4)
                .map(|k| (format!("brick3x3-cavity-r{k}"), base.clone().map(|b| meshgen::refine(&b, k))))
                .collect()
        }
        Family::FixedGenusSweep => {
            let base = meshgen::gen_brick(8, 8, &[Cell::Hole; 64]);
            (0..=3)
                .map(|k| (format!("brick8x8-hole-r{k}"), base.clone().map(|b| meshgen::refine(&b, k))))
                .collect()
        }
        Family::GenusSweep => GENUS_SWEEP
            .iter()
            .map(|&g| {
                let n = GENUS_SWEEP_SIDE;
                (format!("brick{n}x{n}-g{g}"), meshgen::gen_brick(n, n, &sweep_cells(n * n, g)))
            })
            .collect(),
        Family::Badcase => BADCASE_SIZES
            .iter()
            .map(|&m| (format!("badcase-{m}"), meshgen::gen_badcase_sphere(m)))
            .collect(),
    }
}

#[derive(Clone, Debug)]
pub struct SuiteSpec {
    pub family: Family,
    pub algorithms: Vec<Algorithm>,
    pub reps: usize,
    pub seed_base: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchRow {
    pub mesh: String,
    pub n_v: usize,
    pub n_e: usize,
    pub n_f: usize,
    pub genus: u32,
    pub algorithm: String,
    /// Seed for brute-force rows, `mean` for their aggregate, `-` otherwise.
    pub seed: String,
    pub link_tests: f64,
    pub retested_edges: f64,
    pub contractions: f64,
    pub output_n_v: f64,
    pub elapsed_ns: f64,
    pub link_work: f64,
    /// Empty unless the run failed or its output failed verification.
    pub error: String,
}

pub const CSV_HEADER: [&str; 14] = [
    "mesh",
    "n_v",
    "n_e",
    "n_f",
    "genus",
    "algorithm",
    "seed",
    "link_tests",
    "retested_edges",
    "contractions",
    "output_n_v",
    "elapsed_ns",
    "link_work",
    "error",
];

impl BenchRow {
    fn fields(&self) -> [String; 14] {
        let num = |x: f64| if x.fract() == 0.0 { format!("{x:.0}") } else { format!("{x:.2}") };
        [
            self.mesh.clone(),
            self.n_v.to_string(),
            self.n_e.to_string(),
            self.n_f.to_string(),
            self.genus.to_string(),
            self.algorithm.clone(),
            self.seed.clone(),
            num(self.link_tests),
            num(self.retested_edges),
            num(self.contractions),
            num(self.output_n_v),
            num(self.elapsed_ns),
            num(self.link_work),
            self.error.clone(),
        ]
    }
}

/// Runs one reducer on one mesh and checks its output.
pub fn measure(name: &str, input: &Mesh<f64>, algorithm: Algorithm, order: EdgeOrder, reps: usize) -> BenchRow {
    let report = topo::euler_genus(input);
    let mut row = BenchRow {
        mesh: name.to_string(),
        n_v: input.n_vertices(),
        n_e: input.n_edges(),
        n_f: input.n_faces(),
        genus: report.as_ref().map(|r| r.genus).unwrap_or(0),
        algorithm: algorithm.to_string(),
        seed: match (algorithm, order) {
            (Algorithm::Bf, EdgeOrder::Shuffled(s)) => s.to_string(),
            (Algorithm::Bf, EdgeOrder::Adversarial) => "adversarial".into(),
            _ => "-".into(),
        },
        ..Default::default()
    };
    let mut best: Option<Reduction<f64>> = None;
    for _ in 0..reps.max(1) {
        let mesh = input.clone();
        let r = run_algorithm(mesh, algorithm, order, EngineOptions::unchecked());
        if best.as_ref().is_none_or(|b| r.stats.elapsed() < b.stats.elapsed()) {
            best = Some(r);
        }
    }
    let r = best.expect("at least one repetition");
    row.link_tests = r.stats.link_tests as f64;
    row.retested_edges = r.stats.retested_edges as f64;
    row.contractions = r.stats.contractions as f64;
    row.output_n_v = r.mesh.n_vertices() as f64;
    row.elapsed_ns = r.stats.elapsed().as_nanos() as f64;
    row.link_work = r.stats.link_work as f64;

    let mut problems = Vec::new();
    match (report, topo::euler_genus(&r.mesh)) {
        (Ok(a), Ok(b)) if a.euler == b.euler => {}
        _ => problems.push("genus changed"),
    }
    if !topo::certify_irreducible(&r.mesh) {
        problems.push("output not irreducible");
    }
    if algorithm == Algorithm::Rs && (r.stats.retested_edges != 0 || r.stats.link_tests > input.n_edges() as u64) {
        problems.push("edge tested more than once");
    }
    row.error = problems.join("; ");
    row
}

fn mean_row(rows: &[BenchRow]) -> BenchRow {
    let n = rows.len() as f64;
    let avg = |f: fn(&BenchRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
    let mut out = rows[0].clone();
    out.seed = "mean".into();
    out.link_tests = avg(|r| r.link_tests);
    out.retested_edges = avg(|r| r.retested_edges);
    out.contractions = avg(|r| r.contractions);
    out.output_n_v = avg(|r| r.output_n_v);
    out.elapsed_ns = avg(|r| r.elapsed_ns);
    out.link_work = avg(|r| r.link_work);
    out.error = rows
        .iter()
        .filter(|r| !r.error.is_empty())
        .map(|r| r.error.clone())
        .collect::<Vec<_>>()
        .join("; ");
    out
}

/// Runs every algorithm of `spec` over its family.
pub fn run_suite(spec: &SuiteSpec) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for (name, soup) in family_meshes(spec.family) {
        let mesh = match soup.map_err(|e| e.to_string()).and_then(|s| s.build().map_err(|e| e.to_string())) {
            Ok(m) => m,
            Err(error) => {
                rows.push(BenchRow { mesh: name, error, ..Default::default() });
                continue;
            }
        };
        for &algorithm in &spec.algorithms {
            match algorithm {
                Algorithm::Bf if spec.family == Family::Badcase => {
                    rows.push(measure(&name, &mesh, algorithm, EdgeOrder::Adversarial, 1));
                }
                Algorithm::Bf => {
                    let reps = spec.reps.max(1);
                    let seeded: Vec<BenchRow> = (0..reps as u64)
                        .map(|i| measure(&name, &mesh, algorithm, EdgeOrder::Shuffled(spec.seed_base + i), 1))
                        .collect();
                    let mean = (reps > 1).then(|| mean_row(&seeded));
                    rows.extend(seeded);
                    rows.extend(mean);
                }
                _ => rows.push(measure(&name, &mesh, algorithm, EdgeOrder::Shuffled(0), spec.reps)),
            }
        }
    }
    rows
}

pub fn write_csv<W: io::Write>(rows: &[BenchRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares line through `(x, y)`: returns `(slope, intercept, r²)`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

/// Slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    linear_fit(&logs).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_cells_place_exactly_the_requested_holes() {
        for (cells, holes) in [(25, 0), (25, 10), (25, 25), (900, 150), (900, 899), (14, 5)] {
            let c = sweep_cells(cells, holes);
            assert_eq!(c.len(), cells);
            assert_eq!(c.iter().filter(|&&k| k == Cell::Hole).count(), holes);
        }
    }

    #[test]
    fn names_round_trip() {
        for a in [Algorithm::Rs, Algorithm::Schipper, Algorithm::Bf] {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        for f in [Family::Genus0Sweep, Family::FixedGenusSweep, Family::GenusSweep, Family::Badcase] {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("fast".parse::<Algorithm>().is_err());
    }

    #[test]
    fn fits() {
        let (s, b, r2) = linear_fit(&[(1.0, 3.0), (2.0, 5.0), (3.0, 7.0)]);
        assert!((s - 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
        let q = loglog_slope(&[(2.0, 4.0), (4.0, 16.0), (8.0, 64.0)]);
        assert!((q - 2.0).abs() < 1e-12);
    }

    #[test]
    fn badcase_suite_rows() {
        let spec = SuiteSpec {
            family: Family::Badcase,
            algorithms: vec![Algorithm::Rs, Algorithm::Bf],
            reps: 1,
            seed_base: 0,
        };
        let rows = run_suite(&spec);
        assert_eq!(rows.len(), 8);
        for r in &rows {
            assert!(r.error.is_empty(), "{r:?}");
            assert_eq!(r.output_n_v, 4.0);
        }
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("mesh,n_v,n_e,n_f,genus,algorithm,seed,link_tests"));
        assert_eq!(text.lines().count(), 9);
    }

    #[test]
    fn bf_mean_rows() {
        let mesh = meshgen::gen_icosahedron::<f64>().build().unwrap();
        let rows: Vec<_> = (0..3).map(|s| measure("ico", &mesh, Algorithm::Bf, EdgeOrder::Shuffled(s), 1)).collect();
        let m = mean_row(&rows);
        assert_eq!(m.seed, "mean");
        assert_eq!(m.contractions, 8.0);
    }
}
