//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tpb::assess::{ecdf, hypervolume_2d, indicator_of, nondominated_filter, precision_targets, Archive, IndicatorTrace};
use tpb::bezier::{bernstein_basis, enumerate_multi_indices, fit_ols, simplex_grid, BezierSimplex, SimplexParam};
use tpb::dfo::OptimizerKind;
use tpb::problems::{make_problem, reference_front, FunctionKind, MultiObjectiveProblem};
use tpb::tpb::{phase_budget, run_algorithm, run_tpb, run_tpb1, run_tpb2, Algorithm, TpbConfig};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn random_param(rng: &mut ChaCha8Rng, m: usize) -> SimplexParam {
    let e: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = e.iter().sum();
    let mut t: Vec<f64> = e.iter().map(|v| v / s).collect();
    let drift: f64 = 1.0 - t.iter().sum::<f64>();
    t[0] = (t[0] + drift).max(0.0);
    SimplexParam::new(t).expect("valid simplex point")
}

fn c1_partition_of_unity() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let m = 2 + i % 2;
        let degree = 1 + (i / 2 % 3) as u32;
        let t = random_param(&mut rng, m);
        let sum: f64 = bernstein_basis(degree, &t).map_err(|e| e.to_string())?.iter().sum();
        worst = worst.max((sum - 1.0).abs());
    }
    ensure(worst <= 1e-12, || format!("max |Σ − 1| = {worst:e}"))?;
    within(Duration::from_secs(1), start)?;
    Ok(format!("max |Σ − 1| = {worst:.1e}"))
}

fn c2_exact_fit_recovery() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for n in [2usize, 10] {
        for _ in 0..20 {
            let indices = enumerate_multi_indices(2, 2).unwrap();
            let cps: Vec<Vec<f64>> = indices
                .iter()
                .map(|_| (0..n).map(|_| rng.random_range(-5.0..5.0)).collect())
                .collect();
            let model = BezierSimplex::new(2, 2, cps.clone()).unwrap();
            let samples: Vec<(SimplexParam, Vec<f64>)> = [[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]]
                .iter()
                .map(|t| {
                    let t = SimplexParam::new(t.to_vec()).unwrap();
                    let x = model.evaluate(&t).unwrap();
                    (t, x)
                })
                .collect();
            let fit = fit_ols(&samples, 2, 2, n).map_err(|e| e.to_string())?;
            ensure(!fit.rank_deficient, || "unexpected rank deficiency".into())?;
            for (a, b) in fit.model.control_points().iter().zip(&cps) {
                for (x, y) in a.iter().zip(b) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
    }
    ensure(worst <= 1e-8, || format!("max control-point error {worst:e}"))?;
    within(Duration::from_secs(1), start)?;
    Ok(format!("max control-point error {worst:.1e}"))
}

fn c3_budget_arithmetic() -> Check {
    let opt = phase_budget(40, 0.9, 3).map_err(|e| e.to_string())?;
    ensure(opt == 12, || format!("budget_opt {opt}"))?;
    ensure(3 * opt == 36, || "first-phase ceiling".into())?;
    let grid: Vec<Vec<f64>> = simplex_grid(2, 4, true)
        .unwrap()
        .into_iter()
        .map(SimplexParam::into_inner)
        .collect();
    let want = vec![vec![0.2, 0.8], vec![0.4, 0.6], vec![0.6, 0.4], vec![0.8, 0.2]];
    ensure(grid == want, || format!("T^int = {grid:?}"))?;

    let p = make_problem(FunctionKind::Sphere, FunctionKind::Sphere, 2, 1).unwrap();
    let run = run_tpb(&p, &TpbConfig::for_budget(40)).map_err(|e| e.to_string())?;
    ensure(run.meta.budget_1st <= 36, || format!("budget_1st {}", run.meta.budget_1st))?;
    if run.meta.budget_2nd == 4 {
        ensure(run.meta.t_int == want, || format!("run T^int {:?}", run.meta.t_int))?;
    }
    Ok(format!(
        "budget_opt 12, ceiling 36, T^int exact; run spent {} + {}",
        run.meta.budget_1st, run.meta.budget_2nd
    ))
}

fn random_config(rng: &mut ChaCha8Rng) -> Option<(FunctionKind, FunctionKind, usize, u64, Algorithm, TpbConfig)> {
    let kinds = FunctionKind::ALL;
    let f1 = kinds[rng.random_range(0..kinds.len())];
    let f2 = kinds[rng.random_range(0..kinds.len())];
    let n = rng.random_range(2..=8);
    let instance = rng.random_range(0..1000);
    let algorithm = Algorithm::ALL[rng.random_range(0..3)];
    let cfg = TpbConfig {
        k: rng.random_range(2..=5),
        degree: rng.random_range(1..=3),
        r_1st: rng.random_range(0.5..0.95),
        budget: rng.random_range(4..=40 * n),
        optimizer: if rng.random_bool(0.7) {
            OptimizerKind::TrustRegion
        } else {
            OptimizerKind::NelderMead
        },
        seed: rng.random(),
    };
    let feasible = cfg.budget >= cfg.k
        && phase_budget(cfg.budget, cfg.r_1st, cfg.k).is_ok()
        && (algorithm != Algorithm::Tpb2 || cfg.budget > 11 * n - 1);
    feasible.then_some((f1, f2, n, instance, algorithm, cfg))
}

fn c4_hard_budget_fuzz() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut done = 0;
    let mut evals = 0;
    while done < 200 {
        let Some((f1, f2, n, instance, algorithm, cfg)) = random_config(&mut rng) else {
            continue;
        };
        let p = make_problem(f1, f2, n, instance).unwrap();
        let ctx = || format!("{algorithm} {f1}/{f2} n={n} {cfg:?}");
        let run = run_algorithm(algorithm, &p, &cfg).map_err(|e| format!("{}: {e}", ctx()))?;
        ensure(run.ledger.len() <= cfg.budget, || format!("{}: {} evaluations", ctx(), run.ledger.len()))?;
        ensure(
            run.ledger.entries().iter().all(|e| p.bounds().contains(&e.x)),
            || format!("{}: out-of-bounds evaluation", ctx()),
        )?;
        let again = run_algorithm(algorithm, &p, &cfg).map_err(|e| e.to_string())?;
        ensure(again.ledger == run.ledger, || format!("{}: replay differs", ctx()))?;
        evals += run.ledger.len();
        done += 1;
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!("200 configurations, {evals} evaluations, all within budget and bounds, replay identical"))
}

/// Quadratic pairwise filter, independent of the library's sweep.
fn brute_force_front(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        let dominated = points
            .iter()
            .any(|q| q.iter().zip(p).all(|(a, b)| a <= b) && q.iter().zip(p).any(|(a, b)| a < b));
        if !dominated && !out.contains(p) {
            out.push(p.clone());
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

fn c5_archive_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for set in 0..100 {
        let size = rng.random_range(1..=500);
        let coarse = set % 3 == 0;
        let pts: Vec<Vec<f64>> = (0..size)
            .map(|_| {
                if coarse {
                    vec![rng.random_range(0..15) as f64, rng.random_range(0..15) as f64]
                } else {
                    vec![rng.random(), rng.random()]
                }
            })
            .collect();
        let mut archive = Archive::new();
        for p in &pts {
            archive.insert(vec![], p.clone());
        }
        let mut streamed: Vec<Vec<f64>> = archive.objectives().cloned().collect();
        streamed.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let oracle = brute_force_front(&pts);
        ensure(streamed == oracle, || format!("set {set}: archive {} vs oracle {}", streamed.len(), oracle.len()))?;
        ensure(nondominated_filter(&pts) == oracle, || format!("set {set}: filter mismatch"))?;
    }
    within(Duration::from_secs(10), start)?;
    Ok("100 sets: streaming archive = batch filter = brute force".into())
}

/// Fraction of `samples` Halton points of `[0,1]²` dominated by `points`,
/// using a prefix-minimum lookup.
fn sampled_area(points: &[Vec<f64>], samples: u64) -> f64 {
    let mut sorted: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let xs: Vec<f64> = sorted.iter().map(|p| p.0).collect();
    let mut prefix_min = Vec::with_capacity(sorted.len());
    let mut m = f64::INFINITY;
    for p in &sorted {
        m = m.min(p.1);
        prefix_min.push(m);
    }
    let mut hits = 0u64;
    for i in 1..=samples {
        let u = (i.reverse_bits() as f64) * (-64f64).exp2();
        let mut v = 0.0;
        let (mut k, mut scale) = (i, 1.0 / 3.0);
        while k > 0 {
            v += (k % 3) as f64 * scale;
            k /= 3;
            scale /= 3.0;
        }
        let count = xs.partition_point(|&x| x <= u);
        if count > 0 && prefix_min[count - 1] <= v {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

fn c6_hypervolume_oracle() -> Check {
    let start = Instant::now();
    let hand1 = hypervolume_2d(&[vec![0.25, 0.25]], &[1.0, 1.0]);
    let hand2 = hypervolume_2d(&[vec![0.2, 0.8], vec![0.8, 0.2]], &[1.0, 1.0]);
    ensure((hand1 - 0.5625).abs() < 1e-15, || format!("hand case 1: {hand1}"))?;
    ensure((hand2 - 0.28).abs() < 1e-15, || format!("hand case 2: {hand2}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for set in 0..20 {
        let pts: Vec<Vec<f64>> = (0..50).map(|_| vec![rng.random(), rng.random()]).collect();
        let hv = hypervolume_2d(&pts, &[1.0, 1.0]);
        let est = sampled_area(&pts, 10_000_000);
        worst = worst.max((hv - est).abs());
        ensure((hv - est).abs() <= 3e-3, || format!("set {set}: sweep {hv} vs sampled {est}"))?;
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("hand cases exact; 20 sets max |sweep − sampled| = {worst:.1e}"))
}

/// Ten times the largest deviation seen over reference instances 1001..=1050
/// (5.65e-15), rounded up.
const SEGMENT_TOLERANCE: f64 = 5.7e-14;

fn distance_to_segment(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(p, q)| q - p).collect();
    let dd: f64 = d.iter().map(|v| v * v).sum();
    let t = (x.iter().zip(a).zip(&d).map(|((x, a), d)| (x - a) * d).sum::<f64>() / dd).clamp(0.0, 1.0);
    x.iter()
        .zip(a)
        .zip(&d)
        .map(|((x, a), d)| (x - a - t * d).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn c7_bi_sphere_end_to_end() -> Check {
    let mut worst: f64 = 0.0;
    let mut smallest_margin = usize::MAX;
    for instance in 1..=15 {
        let start = Instant::now();
        let p = make_problem(FunctionKind::Sphere, FunctionKind::Sphere, 2, instance).unwrap();
        let cfg = TpbConfig::for_budget(40);
        let run = run_tpb(&p, &cfg).map_err(|e| e.to_string())?;
        let mut archive = Archive::new();
        for e in run.ledger.entries() {
            archive.insert(e.x.clone(), e.f.clone());
        }
        let need = cfg.k + run.meta.budget_2nd - 2;
        ensure(archive.len() >= need, || format!("instance {instance}: archive {} < {need}", archive.len()))?;
        smallest_margin = smallest_margin.min(archive.len() - need);
        for e in &run.ledger.entries()[run.meta.budget_1st..] {
            let d = distance_to_segment(&e.x, p.shift(0), p.shift(1));
            worst = worst.max(d);
            ensure(d <= SEGMENT_TOLERANCE, || format!("instance {instance}: deviation {d:e}"))?;
        }
        within(Duration::from_secs(5), start)?;
    }
    Ok(format!(
        "15 instances: archive margin ≥ {smallest_margin}, max segment deviation {worst:.1e} (tolerance {SEGMENT_TOLERANCE:e})"
    ))
}

fn c8_ablation_ordering() -> Check {
    let start = Instant::now();
    let mut notes = Vec::new();
    for (f1, f2) in [
        (FunctionKind::Sphere, FunctionKind::Sphere),
        (FunctionKind::Sphere, FunctionKind::Ellipsoid),
    ] {
        let mut wins = 0;
        let mut tpb = Vec::new();
        let mut tpb2 = Vec::new();
        for instance in 1..=15u64 {
            let p = make_problem(f1, f2, 10, instance).unwrap();
            let refdata = reference_front(&p, 100).map_err(|e| e.to_string())?;
            let cfg = TpbConfig {
                seed: instance,
                ..TpbConfig::for_budget(200)
            };
            let score = |run: tpb::tpb::TpbRun| indicator_of(run.ledger.objectives(), &refdata).unwrap();
            let a = score(run_tpb(&p, &cfg).map_err(|e| e.to_string())?);
            let b = score(run_tpb1(&p, &cfg).map_err(|e| e.to_string())?);
            let c = score(run_tpb2(&p, &cfg).map_err(|e| e.to_string())?);
            wins += usize::from(a <= b);
            tpb.push(a);
            tpb2.push(c);
        }
        tpb.sort_by(f64::total_cmp);
        tpb2.sort_by(f64::total_cmp);
        let (m, m2) = (tpb[7], tpb2[7]);
        ensure(wins >= 13, || format!("{f1}/{f2}: TPB ≤ TPB1 on only {wins}/15"))?;
        ensure(m < m2, || format!("{f1}/{f2}: median TPB {m} not below TPB2 {m2}"))?;
        notes.push(format!("{f1}/{f2} {wins}/15, medians {m:.4} vs {m2:.4}"));
    }
    within(Duration::from_secs(300), start)?;
    Ok(notes.join("; "))
}

fn c9_ecdf_sanity() -> Check {
    let targets = precision_targets(1.0);
    let at_one = IndicatorTrace::from_series(vec![(1, -1.0)], targets.clone());
    let curve = ecdf(&[at_one], &[1, 10, 100]).unwrap();
    ensure(curve.iter().all(|c| c.1 == 1.0), || format!("all-hit curve {curve:?}"))?;
    let never = IndicatorTrace::from_series(vec![(1, 9.0), (50, 8.0)], targets.clone());
    let curve = ecdf(&[never], &[1, 50]).unwrap();
    ensure(curve.iter().all(|c| c.1 == 0.0), || format!("no-hit curve {curve:?}"))?;

    // A hits target j (largest first) at evaluation j + 1; B hits the ten
    // largest targets at evaluation 5.
    let a = IndicatorTrace::from_series((1..=31).map(|e| (e, targets[31 - e])).collect(), targets.clone());
    let b = IndicatorTrace::from_series(vec![(1, 2.0), (5, targets[21])], targets.clone());
    let curve = ecdf(&[a, b], &[1, 4, 5, 10, 31]).unwrap();
    for ((e, got), hits) in curve.iter().zip([1.0, 4.0, 15.0, 20.0, 41.0]) {
        ensure((got - hits / 62.0).abs() < 1e-15, || format!("at {e}: {got} vs {hits}/62"))?;
    }

    let mut traces = Vec::new();
    for instance in 1..=5 {
        let p = make_problem(FunctionKind::Sphere, FunctionKind::Rosenbrock, 3, instance).unwrap();
        let refdata = reference_front(&p, 100).map_err(|e| e.to_string())?;
        let run = run_tpb(&p, &TpbConfig::for_budget(60)).map_err(|e| e.to_string())?;
        traces.push(IndicatorTrace::from_objectives(run.ledger.objectives(), &refdata).unwrap());
    }
    let grid: Vec<usize> = (1..=60).collect();
    let curve = ecdf(&traces, &grid).unwrap();
    ensure(curve.windows(2).all(|w| w[0].1 <= w[1].1), || "curve decreases".into())?;
    ensure(curve.iter().all(|c| (0.0..=1.0).contains(&c.1)), || "curve leaves [0, 1]".into())?;
    Ok(format!(
        "hand counts exact; run curve monotone, final fraction {:.3}",
        curve.last().unwrap().1
    ))
}

fn c10_framework_overhead() -> Check {
    let p = make_problem(FunctionKind::Sphere, FunctionKind::Ellipsoid, 20, 1).unwrap();
    let run = run_tpb(&p, &TpbConfig::for_budget(800)).map_err(|e| e.to_string())?;
    let overhead = run.meta.overhead_seconds();
    ensure(run.ledger.len() <= 800, || "budget exceeded".into())?;
    ensure(overhead < 1.0, || format!("overhead {overhead:.3} s"))?;
    Ok(format!("non-evaluation overhead {overhead:.3} s over {} evaluations", run.ledger.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("1 Bernstein partition of unity", c1_partition_of_unity),
        ("2 exact fit recovery", c2_exact_fit_recovery),
        ("3 budget arithmetic", c3_budget_arithmetic),
        ("4 hard budget fuzz", c4_hard_budget_fuzz),
        ("5 archive/dominance oracle", c5_archive_oracle),
        ("6 hypervolume oracle", c6_hypervolume_oracle),
        ("7 bi-sphere end-to-end", c7_bi_sphere_end_to_end),
        ("8 ablation ordering", c8_ablation_ordering),
        ("9 ECDF sanity", c9_ecdf_sanity),
        ("10 framework overhead", c10_framework_overhead),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.2} s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.2} s): {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
