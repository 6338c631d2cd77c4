//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line;
//! run with `--nocapture` to see them on success.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use dgmdiv::divergence::{
    bottleneck_distance, brute_force_divergence, distance_report, divergence, symmetrized_power_mean, wasserstein_distance,
};
use dgmdiv::persistence::{build_rips, compute_persistence, parse_filtration};
use dgmdiv::sample::{random_diagram, random_small_diagram};
use dgmdiv::vectorize::{
    extend, persistent_entropy, project_finite, projection_candidates, verify_projection_optimality, BasicStats, PersistentEntropy,
    Vectorization,
};
use dgmdiv::{DiagramPoint, DivergenceReport, ExtendedValue, Order, PersistenceDiagram, TameFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const INF: f64 = f64::INFINITY;

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xD1_5EED + criterion)
}

fn dgm(pairs: &[(f64, f64)]) -> PersistenceDiagram {
    PersistenceDiagram::from_pairs(pairs).unwrap()
}

fn div(a: &PersistenceDiagram, b: &PersistenceDiagram, f: &TameFunction, p: Order) -> DivergenceReport {
    divergence(a, b, f, p).unwrap()
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn within(actual: f64, expected: f64, tol: f64) -> bool {
    actual == expected || (actual - expected).abs() <= tol
}

/// `lhs ≤ rhs + tol`, where an infinite right-hand side absorbs everything.
fn at_most(lhs: ExtendedValue, rhs: ExtendedValue, tol: f64) -> bool {
    rhs.is_infinite() || (lhs.is_finite() && lhs.get() <= rhs.get() + tol)
}

fn example_one() -> (PersistenceDiagram, PersistenceDiagram) {
    (dgm(&[(2.0, 10.0), (5.0, INF)]), dgm(&[(3.0, 11.0)]))
}

fn example_three(x: f64, z: f64) -> (PersistenceDiagram, PersistenceDiagram) {
    (dgm(&[(1.0 - x, 1.0 + x)]), dgm(&[(1.0 - x + z, 1.0 + x + z)]))
}

fn timed(limit: Duration, body: impl FnOnce() -> Result<(), String>) -> Outcome {
    let start = Instant::now();
    body()?;
    let elapsed = start.elapsed();
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))?;
    Ok(format!("{:.3}s", elapsed.as_secs_f64()))
}

fn criterion_1() -> Outcome {
    timed(Duration::from_secs(1), || {
        let (a, b) = example_one();
        let f = TameFunction::logistic_translated();
        for p in [Order::Finite(1.0), Order::Finite(2.0), Order::Finite(3.0), Order::Infinity] {
            let forward = div(&a, &b, &f, p).value;
            ensure(forward.is_infinite(), || format!("D(A||B) = {forward} at p = {p}"))?;
        }
        for p in [1.0, 2.0, 3.0] {
            let backward = div(&b, &a, &f, Order::Finite(p)).value.get();
            let expected = 2f64.powf(1.0 / p);
            ensure(within(backward, expected, 1e-12), || format!("D(B||A) = {backward}, want {expected} at p = {p}"))?;
        }
        Ok(())
    })
}

fn criterion_2() -> Outcome {
    let (x, z) = (0.5, 2.0);
    let (a, b) = example_three(x, z);
    let f = TameFunction::zero();
    for p in [1.0, 2.0] {
        let order = Order::Finite(p);
        let (ab, ba) = (div(&a, &b, &f, order).value.get(), div(&b, &a, &f, order).value.get());
        let d = wasserstein_distance(&a, &b, p).unwrap().get();
        let mean = symmetrized_power_mean(&a, &b, &f, p).unwrap().get();
        ensure(within(ab, x, 1e-12) && within(ba, x, 1e-12), || format!("p = {p}: D = {ab}, {ba}"))?;
        ensure(within(d, 2f64.powf(1.0 / p) * x, 1e-12), || format!("p = {p}: d = {d}"))?;
        ensure(within(mean, d, 1e-12), || format!("p = {p}: lower bound {d} vs {mean}"))?;
    }
    Ok("D = 0.5 both ways, d_p = 2^(1/p)/2, lower bound tight".into())
}

fn criterion_3() -> Outcome {
    let mut rng = rng(3);
    let functions = [TameFunction::zero(), TameFunction::truncate(1.0).unwrap(), TameFunction::logistic_translated()];
    let mut checked = 0;
    timed(Duration::from_secs(30), || {
        for case in 0..500 {
            let total = rng.gen_range(0..=8);
            let left = rng.gen_range(0..=total);
            let a = random_small_diagram(&mut rng, left, 2, 6.0).expanded();
            let b = random_small_diagram(&mut rng, total - left, 2, 6.0).expanded();
            let (a, b) = (PersistenceDiagram::new(a), PersistenceDiagram::new(b));
            for f in &functions {
                for p in [Order::Finite(1.0), Order::Finite(2.0)] {
                    let solved = div(&a, &b, f, p);
                    let oracle = brute_force_divergence(&a, &b, f, p).unwrap();
                    ensure(solved.value == oracle.value && solved.recompute() == solved.value, || {
                        format!("case {case}, {} p = {p}: solver {} vs oracle {}", f.name(), solved.value, oracle.value)
                    })?;
                    checked += 1;
                }
            }
        }
        Ok(())
    })
    .map(|t| format!("{checked} instances, {t}"))
}

fn criterion_4() -> Outcome {
    let mut rng = rng(4);
    let f = TameFunction::logistic_translated();
    let mut absorbed = 0;
    for case in 0..200 {
        // mostly non-decreasing essential counts, so the right-hand side stays finite
        let mut counts = [0; 3].map(|_| rng.gen_range(0..=2usize));
        if case % 4 != 0 {
            counts.sort_unstable();
        }
        let [a, b, c] = counts.map(|k| {
            let n = rng.gen_range(0..=6 - k);
            random_diagram(&mut rng, n, k, 10.0)
        });
        for p in [Order::Finite(1.0), Order::Finite(2.0)] {
            let direct = div(&a, &c, &f, p).value;
            let via = div(&a, &b, &f, p).value + div(&b, &c, &f, p).value;
            absorbed += usize::from(via.is_infinite());
            ensure(at_most(direct, via, 1e-9), || format!("triple {case}, p = {p}: {direct} > {via}"))?;
        }
    }
    Ok(format!("400 checks, {absorbed} with infinite right-hand side"))
}

fn equal_count_pair(rng: &mut ChaCha8Rng, max_finite: usize) -> (PersistenceDiagram, PersistenceDiagram) {
    let k = rng.gen_range(0..=2);
    let (n, m) = (rng.gen_range(0..=max_finite), rng.gen_range(0..=max_finite));
    (random_diagram(rng, n, k, 10.0), random_diagram(rng, m, k, 10.0))
}

fn criterion_5() -> Outcome {
    let mut rng = rng(5);
    let functions = [TameFunction::zero(), TameFunction::truncate(1.0).unwrap(), TameFunction::logistic_translated()];
    for case in 0..200 {
        let (a, b) = equal_count_pair(&mut rng, 5);
        for p in [1.0, 2.0, 3.0] {
            let d = wasserstein_distance(&a, &b, p).unwrap().get();
            for f in &functions {
                let mean = symmetrized_power_mean(&a, &b, f, p).unwrap().get();
                ensure(d <= mean + 1e-9 && mean <= 2f64.powf(1.0 / p) * d + 1e-9, || {
                    format!("pair {case}, {} p = {p}: d = {d}, mean = {mean}", f.name())
                })?;
            }
        }
    }
    Ok("200 pairs, p in {1, 2, 3}, 3 functions".into())
}

fn criterion_6() -> Outcome {
    let mut rng = rng(6);
    let f = TameFunction::logistic_translated();
    let mut unequal = 0;
    for case in 0..200 {
        let (a, b) = if case % 4 == 3 {
            let k = rng.gen_range(0..=2);
            let n = rng.gen_range(0..=5);
            (random_diagram(&mut rng, n, k, 10.0), random_diagram(&mut rng, n, k + 1, 10.0))
        } else {
            equal_count_pair(&mut rng, 5)
        };
        let d = bottleneck_distance(&a, &b);
        let m = div(&a, &b, &f, Order::Infinity).value.max(div(&b, &a, &f, Order::Infinity).value);
        if a.infinite_count() == b.infinite_count() {
            ensure(d.is_finite() && within(m.get(), d.get(), 1e-12), || format!("pair {case}: max {m} vs d {d}"))?;
        } else {
            unequal += 1;
            ensure(m.is_infinite() && d.is_infinite(), || format!("pair {case}: expected inf, got {m} and {d}"))?;
        }
    }
    Ok(format!("{} equal-count, {unequal} unequal-count pairs", 200 - unequal))
}

fn criterion_7() -> Outcome {
    let mut rng = rng(7);
    let f = TameFunction::identity();
    for case in 0..100 {
        let (n, m) = (rng.gen_range(0..=7), rng.gen_range(0..=7));
        let (a, b) = (random_diagram(&mut rng, n, 0, 10.0), random_diagram(&mut rng, m, 0, 10.0));
        for p in [Order::Finite(1.0), Order::Finite(2.0), Order::Finite(2.5), Order::Infinity] {
            let (dv, ds) = (div(&a, &b, &f, p).value, distance_report(&a, &b, p).value);
            ensure(dv == ds, || format!("pair {case}, p = {p}: {dv} vs {ds}"))?;
        }
    }
    Ok("bit-identical on 400 instances".into())
}

fn criterion_8() -> Outcome {
    let mut rng = rng(8);
    let f = TameFunction::logistic_translated();
    let f_inf = f.evaluate(ExtendedValue::INFINITY).unwrap();
    let shifts = [-4.0, -2.0, -1.0, -0.5, -0.25, -0.1, -0.05, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0];
    let mut strict = 0;
    for case in 0..100 {
        let (n, k) = (rng.gen_range(0..=5), rng.gen_range(1..=2));
        let a = random_diagram(&mut rng, n, k, 10.0);
        // every truncation height must clear the infinite births too
        let top = a.iter().map(|q| if q.is_infinite() { q.birth() } else { q.death() }).fold(0.0, f64::max);
        let heights: Vec<f64> = (1..=5).map(|k| top + k as f64).collect();
        let candidates = projection_candidates(&a, &shifts, &heights).unwrap();
        ensure(candidates.len() >= 20, || format!("case {case}: {} candidates", candidates.len()))?;
        for p in [Order::Finite(1.0), Order::Finite(2.0), Order::Infinity] {
            let check = verify_projection_optimality(&a, &f, p, &candidates).unwrap();
            ensure(check.holds, || format!("case {case}, p = {p}: {:?}", check.best_candidate))?;
            let truncations = &candidates[candidates.len() - heights.len()..];
            for (c, &h) in truncations.iter().zip(&heights) {
                let report = div(c, &a, &f, p);
                let contribution = report
                    .matching
                    .iter()
                    .filter_map(|e| match e {
                        dgmdiv::divergence::MatchEntry::Matched { source, cost, .. }
                        | dgmdiv::divergence::MatchEntry::ToDiagonal { source, cost } if source.death() == h => {
                            Some(*cost)
                        }
                        _ => None,
                    })
                    .max()
                    .unwrap_or(ExtendedValue::ZERO);
                if f_inf < contribution.get() {
                    strict += 1;
                    ensure(report.value > check.projection_value, || {
                        format!("case {case}, p = {p}, h = {h}: truncation {} vs removal {}", report.value, check.projection_value)
                    })?;
                }
            }
        }
    }
    Ok(format!("300 checks, {strict} strict truncation comparisons"))
}

fn criterion_9() -> Outcome {
    let mut rng = rng(9);
    let f = TameFunction::logistic_translated();
    for case in 0..200 {
        let a = random_small_diagram(&mut rng, 6, 2, 10.0);
        let b = random_small_diagram(&mut rng, 6, 2, 10.0);
        let (pa, pb) = (project_finite(&a), project_finite(&b));
        for p in [Order::Finite(1.0), Order::Finite(2.0)] {
            let (lhs, rhs) = (div(&pa, &pb, &f, p).value, div(&a, &b, &f, p).value);
            ensure(at_most(lhs, rhs, 1e-9), || format!("pair {case}, p = {p}: divergence {lhs} > {rhs}"))?;
            let (lhs, rhs) = (distance_report(&pa, &pb, p).value, distance_report(&a, &b, p).value);
            ensure(at_most(lhs, rhs, 0.0), || format!("pair {case}, p = {p}: distance {lhs} > {rhs}"))?;
        }
    }
    Ok("400 checks".into())
}

fn criterion_10() -> Outcome {
    let triangle = parse_filtration("0;0\n1;0\n2;0\n0 1;1\n0 2;1\n1 2;1\n0 1 2;2\n").unwrap();
    let d = compute_persistence(&triangle, 1);
    ensure(d[0].points() == dgm(&[(0.0, INF), (0.0, 1.0), (0.0, 1.0)]).points(), || format!("triangle H0 {:?}", d[0]))?;
    ensure(d[1].points() == dgm(&[(1.0, 2.0)]).points(), || format!("triangle H1 {:?}", d[1]))?;

    let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]].map(|p| p.to_vec());
    let d = compute_persistence(&build_rips(&square, 2.0, 2).unwrap(), 1);
    let loops = d[1].expanded();
    ensure(
        loops.len() == 1 && loops[0].birth() == 1.0 && within(loops[0].death(), 2f64.sqrt(), 1e-12),
        || format!("square H1 {:?}", d[1]),
    )?;

    let mut rng = rng(10);
    for case in 0..50 {
        let n = rng.gen_range(1..=8);
        let points: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)]).collect();
        let filtration = build_rips(&points, rng.gen_range(0.5..3.0), 2).unwrap();
        let essential: i64 = compute_persistence(&filtration, 2)
            .iter()
            .enumerate()
            .map(|(k, d)| (1 - 2 * (k as i64 % 2)) * d.infinite_count() as i64)
            .sum();
        ensure(essential == filtration.euler_characteristic(), || {
            format!("filtration {case}: essential {essential} vs euler {}", filtration.euler_characteristic())
        })?;
    }
    Ok("triangle, square and 50 Euler checks".into())
}

fn criterion_11() -> Outcome {
    for n in 1..=8u32 {
        let stacked = PersistenceDiagram::new([DiagramPoint::with_multiplicity(0.0, 1.5, n).unwrap()]);
        let spread: PersistenceDiagram = (0..n).map(|i| DiagramPoint::new(i as f64, i as f64 + 1.5).unwrap()).collect();
        let expected = (n as f64).ln();
        for d in [&stacked, &spread] {
            let h = persistent_entropy(d).unwrap();
            ensure(within(h, expected, 1e-12), || format!("n = {n}: entropy {h}"))?;
        }
        if n == 1 {
            ensure(persistent_entropy(&stacked).unwrap() == 0.0, || "single bar entropy is not 0".into())?;
        }
    }
    let mut rng = rng(11);
    for case in 0..100 {
        let n = rng.gen_range(0..=8);
        let a = random_diagram(&mut rng, n, 0, 10.0);
        ensure(extend(PersistentEntropy).apply(&a) == PersistentEntropy.vectorize(&a).unwrap(), || format!("case {case}: entropy"))?;
        ensure(extend(BasicStats).apply(&a) == BasicStats.vectorize(&a).unwrap(), || format!("case {case}: stats"))?;
    }
    Ok("ln n for n = 1..8, extension exact on 100 diagrams".into())
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Command lines whose output is pinned in `tests/golden/<name>.out`.
const GOLDEN: &[(&str, &[&str])] = &[
    ("example1_div_forward", &["div", "@example1_a.dgm", "@example1_b.dgm", "--f", "logistic_translated", "--p", "2", "--verbose"]),
    ("example1_div_backward_p1", &["div", "@example1_b.dgm", "@example1_a.dgm", "--f", "logistic_translated", "--p", "1"]),
    ("example1_div_backward_p2", &["div", "@example1_b.dgm", "@example1_a.dgm", "--f", "logistic", "--p", "2", "--verbose"]),
    ("example1_div_backward_p3", &["div", "@example1_b.dgm", "@example1_a.dgm", "--f", "logistic_translated", "--p", "3"]),
    ("example1_div_bottleneck", &["div", "@example1_a.dgm", "@example1_b.dgm", "--f", "logistic_translated", "--p", "inf"]),
    ("example1_dist", &["dist", "@example1_a.dgm", "@example1_b.dgm", "--p", "2"]),
    ("example1_project", &["project", "@example1_a.dgm"]),
    ("example1_stats", &["stats", "@example1_a.dgm", "--measures", "mean,std,entropy"]),
    ("example3_dist_p1", &["dist", "@example3_a.dgm", "@example3_b.dgm", "--p", "1"]),
    ("example3_dist_p2", &["dist", "@example3_a.dgm", "@example3_b.dgm", "--p", "2", "--verbose"]),
    ("example3_dist_bottleneck", &["dist", "@example3_a.dgm", "@example3_b.dgm", "--metric", "bottleneck"]),
    ("example3_div_forward", &["div", "@example3_a.dgm", "@example3_b.dgm", "--f", "zero", "--p", "2", "--verbose"]),
    ("example3_div_backward", &["div", "@example3_b.dgm", "@example3_a.dgm", "--f", "zero", "--p", "1"]),
];

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let args: Vec<String> = args
        .iter()
        .map(|a| match a.strip_prefix('@') {
            Some(file) => data(file).display().to_string(),
            None => a.to_string(),
        })
        .collect();
    let out = Command::new(env!("CARGO_BIN_EXE_dgmdiv"))
        .args(&args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?} exited with {}", out.status))?;
    Ok(out.stdout)
}

fn criterion_12() -> Outcome {
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let outputs = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (name, args) in GOLDEN {
        let first = run_cli(args)?;
        let second = run_cli(args)?;
        ensure(first == second, || format!("{name}: runs differ"))?;
        std::fs::write(outputs.path().join(format!("{name}.out")), &first).map_err(|e| e.to_string())?;
        let expected = std::fs::read(golden_dir.join(format!("{name}.out"))).map_err(|e| format!("{name}: {e}"))?;
        ensure(first == expected, || {
            format!("{name}: got {:?}, golden {:?}", String::from_utf8_lossy(&first), String::from_utf8_lossy(&expected))
        })?;
    }

    let persist = |dir: &Path| -> Result<Vec<Vec<u8>>, String> {
        let flt = dir.join("square.flt");
        let csv = data("square.csv").display().to_string();
        let (flt_arg, dir_arg) = (flt.display().to_string(), dir.display().to_string());
        run_cli(&["rips", &csv, "--max-eps", "2", "--max-dim", "2", "-o", &flt_arg])?;
        run_cli(&["persistence", &flt_arg, "--max-dim", "1", "--out-dir", &dir_arg, "--prefix", "square"])?;
        ["square.flt", "square_H0.dgm", "square_H1.dgm"]
            .iter()
            .map(|f| std::fs::read(dir.join(f)).map_err(|e| e.to_string()))
            .collect()
    };
    let (one, two) = (tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?);
    let (first, second) = (persist(one.path())?, persist(two.path())?);
    ensure(first == second, || "rips/persistence outputs differ between runs".into())?;
    ensure(first[2] == b"1 1.4142135623730951\n", || format!("square H1 file {:?}", String::from_utf8_lossy(&first[2])))?;
    Ok(format!("{} golden invocations plus rips/persistence, byte-identical twice", GOLDEN.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("Example 1 reproduction", criterion_1),
        ("Example 3 tightness", criterion_2),
        ("oracle equivalence", criterion_3),
        ("triangle inequality", criterion_4),
        ("two-sided bounds", criterion_5),
        ("bottleneck identity", criterion_6),
        ("classical recovery", criterion_7),
        ("projection optimality", criterion_8),
        ("contraction", criterion_9),
        ("persistence correctness", criterion_10),
        ("vectorization conventions", criterion_11),
        ("CLI golden files", criterion_12),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] {:>2}. {name}: {detail}", i + 1),
            Err(why) => {
                println!("[FAIL] {:>2}. {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
