//! Acceptance checks. Prints one `criterion N: PASS|FAIL` line per
//! criterion and exits nonzero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use irreducible::baselines::{brute_force_reduce, brute_force_reduce_ordered, schipper_reduce, EdgeOrder};
use irreducible::bench::{self, Family};
use irreducible::irreducer::{fast_link_test, Engine, EngineOptions};
use irreducible::meshgen::{self, random, Cell};
use irreducible::topo::{certify_irreducible, critical_cycles_through, euler_genus, is_t4, link_condition_oracle};
use irreducible::{MeshF64, Reduction, SoupF64};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Every RS run in this file: (mesh, ℓ, ε, n_e).
static RS_RUNS: Mutex<Vec<(String, u64, u64, usize)>> = Mutex::new(Vec::new());

fn rs(name: &str, mesh: MeshF64, options: EngineOptions) -> Reduction<f64> {
    let n_e = mesh.n_edges();
    let r = Engine::with_options(mesh, options).run();
    RS_RUNS.lock().unwrap().push((name.to_string(), r.stats.link_tests, r.stats.retested_edges, n_e));
    r
}

fn build(soup: &SoupF64) -> MeshF64 {
    soup.build().expect("generated soup is valid")
}

fn panic_message(e: Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panic".into())
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn genus0_meshes() -> Vec<(String, SoupF64)> {
    let mut out = Vec::new();
    for k in 0..4 {
        out.push((format!("tet-r{k}"), meshgen::refine(&meshgen::gen_tetrahedron(), k)));
    }
    for k in 0..3 {
        out.push((format!("octahedron-r{k}"), meshgen::refine(&meshgen::gen_octahedron(), k)));
        out.push((format!("icosahedron-r{k}"), meshgen::refine(&meshgen::gen_icosahedron(), k)));
    }
    for (rows, cols) in [(1, 1), (2, 2), (3, 3), (2, 5)] {
        let b = meshgen::gen_brick(rows, cols, &vec![Cell::Cavity; rows * cols]).unwrap();
        out.push((format!("brick{rows}x{cols}-cavity"), b.clone()));
        out.push((format!("brick{rows}x{cols}-cavity-r1"), meshgen::refine(&b, 1)));
    }
    out.push(("brick2x2-flat".into(), meshgen::gen_brick(2, 2, &[Cell::Flat; 4]).unwrap()));
    for m in [3, 4, 8, 16, 32] {
        out.push((format!("badcase-{m}"), meshgen::gen_badcase_sphere(m).unwrap()));
    }
    for seed in 0..4 {
        out.push((format!("random-sphere-{seed}"), random::random_sphere(200 + 100 * seed as usize, seed)));
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let meshes = genus0_meshes();
    let mut bad = Vec::new();
    for (name, soup) in &meshes {
        let r = rs(name, build(soup), EngineOptions::unchecked());
        let m = &r.mesh;
        if (m.n_vertices(), m.n_edges(), m.n_faces()) != (4, 6, 4) || !is_t4(m) {
            bad.push(name.clone());
        }
    }
    let elapsed = start.elapsed();
    let pass = meshes.len() >= 20 && bad.is_empty() && elapsed < Duration::from_secs(10);
    Outcome::new(pass, format!("{} genus-0 meshes reduced to T4 in {:.2?}; failures {:?}", meshes.len(), elapsed, bad))
}

fn certification_meshes() -> Vec<(String, SoupF64)> {
    let mut out = vec![
        ("tetrahedron".to_string(), meshgen::gen_tetrahedron()),
        ("octahedron".to_string(), meshgen::gen_octahedron()),
        ("icosahedron-r2".to_string(), meshgen::refine(&meshgen::gen_icosahedron(), 2)),
        ("torus7".to_string(), meshgen::gen_torus7()),
        ("torus-3x3".to_string(), meshgen::gen_torus_grid(3, 3).unwrap()),
        ("torus-12x20-r1".to_string(), meshgen::refine(&meshgen::gen_torus_grid(12, 20).unwrap(), 1)),
        ("badcase-64".to_string(), meshgen::gen_badcase_sphere(64).unwrap()),
        ("random-sphere-3000".to_string(), random::random_sphere(3000, 11)),
    ];
    for g in [0, 1, 2, 3, 5, 8, 10, 15, 20, 25] {
        let b = meshgen::gen_brick(5, 5, &bench::sweep_cells(25, g)).unwrap();
        out.push((format!("brick5x5-g{g}-r1"), meshgen::refine(&b, 1)));
    }
    let g25 = meshgen::gen_brick(5, 5, &[Cell::Hole; 25]).unwrap();
    out.push(("brick5x5-g25-perturbed".into(), random::relabel(&random::perturb(&g25, 2000, 5), 5)));
    let g10 = meshgen::gen_brick(5, 5, &bench::sweep_cells(25, 10)).unwrap();
    out.push(("brick5x5-g10-r3".into(), meshgen::refine(&g10, 3)));
    out
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let meshes = certification_meshes();
    let mut bad = Vec::new();
    let mut runs = 0;
    let mut max_faces = 0;
    for (name, soup) in &meshes {
        let mesh = build(soup);
        max_faces = max_faces.max(mesh.n_faces());
        let euler = euler_genus(&mesh).unwrap().euler;
        let outputs = [
            ("rs", rs(name, mesh.clone(), EngineOptions::unchecked())),
            ("s", schipper_reduce(mesh.clone())),
            ("bf0", brute_force_reduce(mesh.clone(), 0)),
            ("bf1", brute_force_reduce(mesh.clone(), 1)),
        ];
        for (alg, r) in outputs {
            runs += 1;
            let kept = euler_genus(&r.mesh).map(|t| t.euler == euler).unwrap_or(false);
            if !kept || !certify_irreducible(&r.mesh) {
                bad.push(format!("{name}/{alg}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && elapsed < Duration::from_secs(120);
    Outcome::new(
        pass,
        format!(
            "{runs} runs over {} meshes (genus 0..25, up to {max_faces} faces) certified in {:.2?}; failures {:?}",
            meshes.len(),
            elapsed,
            bad
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut bad = Vec::new();
    let mut worst = Vec::new();
    for g in [1usize, 2, 5, 10, 25] {
        let mut variants = Vec::new();
        let packed = meshgen::gen_brick(5, 5, &bench::sweep_cells(25, g)).unwrap();
        variants.push(packed.clone());
        variants.push(meshgen::refine(&packed, 2));
        variants.push(random::relabel(&random::perturb(&packed, 500, g as u64), g as u64));
        let row = meshgen::gen_brick(1, g, &vec![Cell::Hole; g]).unwrap();
        variants.push(row.clone());
        variants.push(meshgen::refine(&row, 1));
        let mut largest = 0;
        for soup in &variants {
            let r = rs(&format!("genus-{g}"), build(soup), EngineOptions::unchecked());
            let nv = r.mesh.n_vertices();
            largest = largest.max(nv);
            if nv > 26 * g - 4 {
                bad.push(format!("genus {g}: {nv} vertices"));
            }
        }
        worst.push(format!("g{g}<={largest}"));
    }
    let mut tori: Vec<SoupF64> = vec![meshgen::gen_torus7()];
    for p in 3..9 {
        for q in 3..9 {
            tori.push(meshgen::gen_torus_grid(p, q).unwrap());
        }
    }
    let one_hole = meshgen::gen_brick(1, 1, &[Cell::Hole]).unwrap();
    for k in 0..3 {
        tori.push(meshgen::refine(&one_hole, k));
    }
    for seed in 0..20 {
        let base = meshgen::gen_torus_grid(6, 6).unwrap();
        tori.push(random::relabel(&random::perturb(&base, 100, seed), seed));
    }
    let mut sizes = std::collections::BTreeSet::new();
    for soup in &tori {
        let nv = rs("torus", build(soup), EngineOptions::unchecked()).mesh.n_vertices();
        sizes.insert(nv);
        if !(7..=10).contains(&nv) {
            bad.push(format!("torus: {nv} vertices"));
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!("max output sizes {}; {} tori gave sizes {:?}; failures {:?}", worst.join(" "), tori.len(), sizes, bad),
    )
}

fn criterion_4() -> Outcome {
    let runs = RS_RUNS.lock().unwrap();
    let bad: Vec<_> = runs
        .iter()
        .filter(|(_, l, eps, n_e)| *eps != 0 || *l > *n_e as u64)
        .map(|(name, l, eps, n_e)| format!("{name}: l={l} eps={eps} n_e={n_e}"))
        .collect();
    let total: u64 = runs.iter().map(|r| r.1).sum();
    Outcome::new(
        bad.is_empty() && !runs.is_empty(),
        format!("{} RS runs, {total} link tests, eps = 0 and l <= n_e everywhere; failures {:?}", runs.len(), bad),
    )
}

struct Stress {
    meshes: usize,
    contractions: u64,
    loop_checks: u64,
    counter_checks: u64,
    counters_compared: u64,
    decisions_compared: u64,
    failures: Vec<String>,
    elapsed: Duration,
}

fn stress_meshes() -> Vec<(String, SoupF64)> {
    let mut out = Vec::new();
    for seed in 0..250u64 {
        let n = 150 + (seed as usize * 37) % 250;
        out.push((format!("sphere-{n}-{seed}"), random::relabel(&random::random_sphere(n, seed), seed)));
    }
    for seed in 0..60u64 {
        let base = meshgen::gen_torus_grid(4 + seed as usize % 5, 5).unwrap();
        let soup = random::perturb(&base, 300 + (seed as usize * 13) % 200, seed);
        out.push((format!("torus-{seed}"), random::relabel(&soup, seed)));
    }
    for seed in 0..60u64 {
        let g = 2 + seed as usize % 5;
        let base = meshgen::gen_brick(2, 3, &[vec![Cell::Hole; g], vec![Cell::Cavity; 6 - g]].concat()).unwrap();
        let soup = random::perturb(&base, 400, seed);
        out.push((format!("brick-g{g}-{seed}"), random::relabel(&soup, seed)));
    }
    out
}

fn run_stress() -> Stress {
    let start = Instant::now();
    let meshes = stress_meshes();
    let mut s = Stress {
        meshes: meshes.len(),
        contractions: 0,
        loop_checks: 0,
        counter_checks: 0,
        counters_compared: 0,
        decisions_compared: 0,
        failures: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for (name, soup) in &meshes {
        let mesh = build(soup);
        match panic::catch_unwind(AssertUnwindSafe(|| rs(name, mesh, EngineOptions::checked()))) {
            Ok(r) => {
                s.contractions += r.stats.contractions;
                s.loop_checks += r.checks.loop_checks;
                s.counter_checks += r.checks.counter_checks;
                s.counters_compared += r.checks.counters_compared;
                s.decisions_compared += r.checks.decisions_compared;
            }
            Err(e) => s.failures.push(format!("{name}: {}", panic_message(e))),
        }
    }
    s.elapsed = start.elapsed();
    s
}

fn criterion_5(s: &Stress) -> Outcome {
    let pass = s.failures.is_empty() && s.contractions >= 100_000 && s.counter_checks > 0;
    Outcome::new(
        pass,
        format!(
            "{} checked runs, {} contractions, {} counter checkpoints, {} counters and {} decisions matched the oracle in {:.2?}; failures {:?}",
            s.meshes, s.contractions, s.counter_checks, s.counters_compared, s.decisions_compared, s.elapsed, s.failures
        ),
    )
}

fn criterion_6(s: &Stress) -> Outcome {
    let pass = s.failures.is_empty() && s.loop_checks > 0;
    Outcome::new(pass, format!("{} list invariant checks over {} runs; failures {:?}", s.loop_checks, s.meshes, s.failures))
}

/// Fastest RS time per mesh. Repetitions are interleaved across meshes in
/// a fresh random order each round, so drifts in machine speed and position
/// effects hit all meshes alike.
fn rs_times(meshes: &[(String, MeshF64)], reps: usize) -> Vec<Duration> {
    let mut best = vec![Duration::MAX; meshes.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(reps as u64);
    let mut order: Vec<usize> = (0..meshes.len()).collect();
    for _ in 0..reps {
        order.shuffle(&mut rng);
        for &i in &order {
            let (name, m) = &meshes[i];
            let r = rs(name, m.clone(), EngineOptions::unchecked());
            best[i] = best[i].min(r.stats.elapsed());
        }
    }
    best
}

fn family(f: Family) -> Vec<(String, MeshF64)> {
    bench::family_meshes(f).into_iter().map(|(name, soup)| (name, build(&soup.unwrap()))).collect()
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let sweep = family(Family::Genus0Sweep);
    let times = rs_times(&sweep, 7);
    let points: Vec<(f64, f64)> =
        sweep.iter().zip(&times).map(|((_, m), t)| (m.n_faces() as f64, t.as_secs_f64())).collect();
    let (_, _, r2) = bench::linear_fit(&points);
    let a = r2 >= 0.95;

    let genus = family(Family::GenusSweep);
    let faces: Vec<usize> = genus.iter().map(|(_, m)| m.n_faces()).collect();
    let gtimes = rs_times(&genus, 31);
    let b = faces.windows(2).all(|w| w[0] == w[1]) && gtimes.windows(2).all(|w| w[0] <= w[1]);

    let mut bf_work = Vec::new();
    let mut rs_tests = Vec::new();
    for m in bench::BADCASE_SIZES {
        let mesh = build(&meshgen::gen_badcase_sphere(m).unwrap());
        let bf = brute_force_reduce_ordered(mesh.clone(), EdgeOrder::Adversarial);
        bf_work.push(bf.stats.link_work as f64);
        rs_tests.push(rs(&format!("badcase-{m}"), mesh, EngineOptions::unchecked()).stats.link_tests as f64);
    }
    let ratios = |v: &[f64]| v.windows(2).map(|w| w[1] / w[0]).collect::<Vec<_>>();
    let (bf_r, rs_r) = (ratios(&bf_work), ratios(&rs_tests));
    // Doubling m should roughly quadruple the brute-force work; lower-order
    // terms keep small sizes below 4, so ask for growing ratios that end
    // above 2^1.8. RS test counts should double.
    let bf_quadratic = bf_r.windows(2).all(|w| w[1] >= w[0]) && *bf_r.last().unwrap() >= 2f64.powf(1.8);
    let rs_linear = rs_r.iter().all(|r| (1.7..=2.3).contains(r));
    let c = bf_quadratic && rs_linear;
    let elapsed = start.elapsed();

    let pass = a && b && c && elapsed < Duration::from_secs(300);
    let fmt_ratios = |v: &[f64]| v.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(",");
    Outcome::new(
        pass,
        format!(
            "(a) R^2 = {r2:.4} over n_f {:?} [{}]; (b) genus sweep at n_f = {} times {:?} [{}]; (c) BF work ratios {} RS test ratios {} [{}]; {:.2?}",
            points.iter().map(|p| p.0 as usize).collect::<Vec<_>>(),
            if a { "ok" } else { "fail" },
            faces[0],
            gtimes.iter().map(|t| format!("{:.2}ms", t.as_secs_f64() * 1e3)).collect::<Vec<_>>(),
            if b { "ok" } else { "fail" },
            fmt_ratios(&bf_r),
            fmt_ratios(&rs_r),
            if c { "ok" } else { "fail" },
            elapsed
        ),
    )
}

fn criterion_8() -> Outcome {
    let g0: Vec<u64> = family(Family::Genus0Sweep).into_iter().map(|(_, m)| schipper_reduce(m).stats.retested_edges).collect();
    let fixed = family(Family::FixedGenusSweep);
    let mut s_eps = Vec::new();
    let mut rs_eps = Vec::new();
    for (name, m) in fixed {
        s_eps.push(schipper_reduce(m.clone()).stats.retested_edges);
        rs_eps.push(rs(&name, m, EngineOptions::unchecked()).stats.retested_edges);
    }
    let small = g0.iter().all(|&e| e <= 16);
    let grows = s_eps.windows(2).all(|w| w[0] <= w[1]) && s_eps.last() > s_eps.first();
    let zero = rs_eps.iter().all(|&e| e == 0);
    Outcome::new(
        small && grows && zero,
        format!("Schipper eps genus 0 {g0:?}; fixed genus Schipper eps {s_eps:?}, RS eps {rs_eps:?}"),
    )
}

fn criterion_9() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for (name, soup) in meshgen::small_fixtures::<f64>() {
        let mesh = build(&soup);
        if mesh.n_vertices() > 12 {
            continue;
        }
        let t4 = is_t4(&mesh);
        for e in mesh.edges() {
            let oracle = link_condition_oracle(&mesh, e);
            if oracle != (critical_cycles_through(&mesh, e) == 0 && !t4) {
                bad.push(format!("{name} {e:?}: oracle disagrees with critical cycles"));
            }
            let (a, b) = mesh.endpoints(e);
            for u in [a, b] {
                let mut scratch = mesh.clone();
                checked += 1;
                if fast_link_test(&mut scratch, e, u) != oracle {
                    bad.push(format!("{name} {e:?} from {u:?}"));
                }
            }
        }
    }
    Outcome::new(bad.is_empty() && checked > 0, format!("{checked} edge decisions matched; failures {bad:?}"))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| Outcome::new(false, format!("panicked: {}", panic_message(e))))
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    results.push((1, guarded(criterion_1)));
    results.push((2, guarded(criterion_2)));
    results.push((3, guarded(criterion_3)));
    let stress = guarded_stress();
    results.push((5, stress.as_ref().map_or_else(|m| Outcome::new(false, m.clone()), criterion_5)));
    results.push((6, stress.as_ref().map_or_else(|m| Outcome::new(false, m.clone()), criterion_6)));
    results.push((7, guarded(criterion_7)));
    results.push((8, guarded(criterion_8)));
    results.push((9, guarded(criterion_9)));
    // Last, so it covers every RS run above.
    results.push((4, guarded(criterion_4)));
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (n, o) in &results {
        println!("criterion {n}: {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn guarded_stress() -> Result<Stress, String> {
    panic::catch_unwind(run_stress).map_err(|e| format!("stress suite panicked: {}", panic_message(e)))
}
