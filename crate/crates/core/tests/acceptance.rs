//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use hyperlens::data::{generate_synthetic, SlotBundle, SlotMode, SyntheticConfig};
use hyperlens::hierarchy::{build_hierarchies, BinarizationPolicy, LevelPair, DEFAULT_TAU_EXCL, PAPER_LEVELS};
use hyperlens::manifold::{exp_map_origin, lorentz_distance, lorentz_inner, Curvature, LorentzPoint, ManifoldSpec};
use hyperlens::metrics::{
    agreement_analysis, gromov_delta, gromov_delta_detailed, hyperbolicity_analysis, kde_overlap, retrieval_analysis,
    separation_analysis, DistanceMatrix, HyperbolicityScope,
};

type Outcome = Result<String, String>;

/// `2 Phi(-1)`, the overlap of N(0,1) and N(2,1), to 16 digits.
const OV_UNIT_SHIFT_TWO: f64 = 0.3173105078629141;

/// Slot norms of the paper's SlotContrast Euclidean row, by level.
const TABLE1_EUCLIDEAN: [(usize, f64); 5] = [(3, 1.446), (5, 1.254), (7, 1.193), (11, 1.146), (13, 1.137)];

const CURVATURES: [f64; 3] = [0.2, 0.5, 1.0];

fn gaussian_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn with_norm(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Vec<f64> {
    let v = gaussian_vec(rng, dim);
    let n = l2(&v);
    v.into_iter().map(|x| x * r / n).collect()
}

fn check(failures: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        failures.push(msg());
    }
}

fn verdict(failures: Vec<String>, detail: String) -> Outcome {
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", failures.join("; ")))
    }
}

fn planted(noise: f64, seed: u64) -> SlotBundle {
    generate_synthetic(&SyntheticConfig {
        n_scenes: 100,
        dim: 64,
        patches: 576,
        child_noise: noise,
        seed,
        ..SyntheticConfig::default()
    })
    .unwrap()
}

fn gaussian_bundle(n_scenes: usize, dim: usize, patches: usize, seed: u64) -> SlotBundle {
    generate_synthetic(&SyntheticConfig {
        n_scenes,
        dim,
        patches,
        mode: SlotMode::Gaussian,
        seed,
        ..SyntheticConfig::default()
    })
    .unwrap()
}

fn c1_manifold_constraints() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (lo, hi) = (1e-6f64, 20.0f64);
    let mut failures = Vec::new();
    let mut worst = (0.0f64, 0.0f64);
    for dim in [8, 64, 256] {
        for c in CURVATURES {
            let curvature = Curvature::new(c).unwrap();
            let origin = LorentzPoint::origin(dim, curvature);
            let (mut bad_constraint, mut bad_isometry) = (0, 0);
            let mut max_residual = 0.0f64;
            for i in 0..1000 {
                let r = match i {
                    0 => lo,
                    1 => hi,
                    _ => (lo.ln() + rng.gen::<f64>() * (hi / lo).ln()).exp(),
                };
                let s = with_norm(&mut rng, dim, r);
                let x = exp_map_origin(&s, c).unwrap();
                let residual = (c * lorentz_inner(x.coords(), x.coords()).unwrap() + 1.0).abs();
                max_residual = max_residual.max(residual);
                if !(residual < 1e-6) {
                    bad_constraint += 1;
                }
                let norm = l2(&s);
                let d = lorentz_distance(&origin, &x, c).unwrap();
                let rel = (d - norm).abs() / norm;
                worst.1 = worst.1.max(rel);
                if !(rel < 1e-8) {
                    bad_isometry += 1;
                }
            }
            worst.0 = worst.0.max(max_residual);
            check(&mut failures, bad_constraint == 0, || {
                format!("d={dim} c={c}: {bad_constraint}/1000 constraint violations (max |c<x,x>+1| = {max_residual:.3e})")
            });
            check(&mut failures, bad_isometry == 0, || {
                format!("d={dim} c={c}: {bad_isometry}/1000 radial isometry violations")
            });
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(&mut failures, secs < 5.0, || format!("took {secs:.2}s (limit 5s)"));
    verdict(
        failures,
        format!("max residual {:.3e}, max relative radial error {:.3e}, {secs:.2}s", worst.0, worst.1),
    )
}

fn c2_flat_limit() -> Outcome {
    let c = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let dim = rng.gen_range(2..=16);
        let (ru, rv) = (3.0 * rng.gen::<f64>(), 3.0 * rng.gen::<f64>());
        let u = with_norm(&mut rng, dim, ru);
        let v = with_norm(&mut rng, dim, rv);
        let flat = l2(&u.iter().zip(&v).map(|(a, b)| a - b).collect::<Vec<_>>());
        let d = lorentz_distance(&exp_map_origin(&u, c).unwrap(), &exp_map_origin(&v, c).unwrap(), c).unwrap();
        worst = worst.max((d - flat).abs() / flat);
    }
    let detail = format!("max relative deviation {worst:.3e} over 10^4 pairs");
    if worst < 1e-3 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c3_metric_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    let mut worst_slack = f64::NEG_INFINITY;
    for c in CURVATURES {
        let (mut asym, mut negative, mut triangle) = (0, 0, 0);
        for _ in 0..10_000 {
            let dim = rng.gen_range(2..=32);
            let p: Vec<LorentzPoint> = (0..3)
                .map(|_| {
                    let r = 5.0 * rng.gen::<f64>();
                    exp_map_origin(&with_norm(&mut rng, dim, r), c).unwrap()
                })
                .collect();
            let d = |i: usize, j: usize| lorentz_distance(&p[i], &p[j], c).unwrap();
            let (xy, yz, xz) = (d(0, 1), d(1, 2), d(0, 2));
            if xy != d(1, 0) || yz != d(2, 1) || xz != d(2, 0) {
                asym += 1;
            }
            if xy < 0.0 || yz < 0.0 || xz < 0.0 {
                negative += 1;
            }
            let slack = xz - (xy + yz);
            worst_slack = worst_slack.max(slack);
            if slack > 1e-9 {
                triangle += 1;
            }
        }
        check(&mut failures, asym + negative + triangle == 0, || {
            format!("c={c}: {asym} asymmetric, {negative} negative, {triangle} triangle violations")
        });
    }
    verdict(failures, format!("3 x 10^4 triples, largest d(x,z) - d(x,y) - d(y,z) = {worst_slack:.3e}"))
}

fn c4_hierarchy_oracle() -> Outcome {
    let bundle = planted(0.05, 4);
    let pairs = LevelPair::consecutive(&PAPER_LEVELS);
    let graphs = build_hierarchies(&bundle, &pairs, BinarizationPolicy::Argmax, DEFAULT_TAU_EXCL).unwrap();
    let (mut matched, mut total) = (0usize, 0usize);
    for (scene, graph) in bundle.scenes.iter().zip(&graphs) {
        let truth = &scene.planted.as_ref().expect("planted truth").parents;
        for a in &graph.assignments {
            let want = &truth[&a.level_pair];
            total += want.len();
            matched += a.parent_of.iter().zip(want).filter(|(x, y)| x == y).count();
        }
    }
    let detail = format!("{matched}/{total} fine slots match the planted parents");
    if matched == total && total == 100 * (5 + 7 + 11 + 13) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c5_retrieval_oracle() -> Outcome {
    let pairs = LevelPair::consecutive(&PAPER_LEVELS);
    let manifolds = ManifoldSpec::default_grid();
    let mut failures = Vec::new();

    let tight = planted(0.01, 5);
    let graphs = build_hierarchies(&tight, &pairs, BinarizationPolicy::Argmax, DEFAULT_TAU_EXCL).unwrap();
    let results = retrieval_analysis(&tight, &graphs, &pairs, &manifolds).unwrap();
    let min_planted = results.iter().filter_map(|r| r.hit_at_1).fold(f64::INFINITY, f64::min);
    for r in &results {
        check(&mut failures, r.hit_at_1.is_some_and(|h| h >= 99.0), || {
            format!("planted {} {}: Hit@1 {:?}", r.manifold, r.level_pair, r.hit_at_1)
        });
    }

    let iid = gaussian_bundle(1500, 16, 288, 5);
    let graphs = build_hierarchies(&iid, &pairs, BinarizationPolicy::Argmax, DEFAULT_TAU_EXCL).unwrap();
    let results = retrieval_analysis(&iid, &graphs, &pairs, &manifolds).unwrap();
    let mut worst_z = 0.0f64;
    for r in &results {
        let p = 1.0 / r.level_pair.coarse as f64;
        let se = 100.0 * (p * (1.0 - p) / r.n_evaluated as f64).sqrt();
        let z = (r.hit_at_1.unwrap_or(f64::NAN) - r.random_baseline) / se;
        worst_z = worst_z.max(z.abs());
        check(&mut failures, z.abs() <= 3.0, || {
            format!(
                "i.i.d. {} {}: Hit@1 {:.2} vs baseline {:.2} ({z:.2} SE, n = {})",
                r.manifold,
                r.level_pair,
                r.hit_at_1.unwrap_or(f64::NAN),
                r.random_baseline,
                r.n_evaluated
            )
        });
    }
    verdict(
        failures,
        format!("planted min Hit@1 {min_planted:.2}%, i.i.d. max |z| {worst_z:.2} over 16 cells"),
    )
}

fn c6_ov_calibration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a: Vec<f64> = (0..5000).map(|_| rng.sample(StandardNormal)).collect();
    let b: Vec<f64> = (0..5000).map(|_| 2.0 + rng.sample::<f64, _>(StandardNormal)).collect();
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    let sigma = (a.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (a.len() - 1) as f64).sqrt();
    let far: Vec<f64> = a.iter().map(|x| x + 1000.0 * sigma).collect();

    let same = kde_overlap(&a, &a).unwrap();
    let apart = kde_overlap(&a, &far).unwrap();
    let shifted = kde_overlap(&a, &b).unwrap();
    let mut failures = Vec::new();
    check(&mut failures, (same - 1.0).abs() <= 1e-3, || format!("identical OV {same}"));
    check(&mut failures, apart <= 0.01, || format!("1000 sigma OV {apart}"));
    check(&mut failures, (shifted - OV_UNIT_SHIFT_TWO).abs() <= 0.03, || {
        format!("N(0,1) vs N(2,1) OV {shifted}")
    });
    verdict(
        failures,
        format!("identical {same:.6}, 1000 sigma {apart:.3e}, N(0,1) vs N(2,1) {shifted:.4} (oracle {OV_UNIT_SHIFT_TWO:.4})"),
    )
}

fn c7_depth_ordering() -> Outcome {
    let bundle = generate_synthetic(&SyntheticConfig {
        norm_profile: TABLE1_EUCLIDEAN.into_iter().collect::<BTreeMap<_, _>>(),
        seed: 7,
        ..SyntheticConfig::default()
    })
    .unwrap();
    let results = separation_analysis(&bundle, &ManifoldSpec::default_grid()).unwrap();
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for r in &results {
        details.push(format!("{} {:.3}", r.manifold, r.spread_ratio));
        check(&mut failures, r.inverted && r.depth_order == PAPER_LEVELS, || {
            format!("{}: order {:?}, means {:?}", r.manifold, r.depth_order, r.level_means)
        });
    }
    verdict(failures, format!("coarse deepest under all manifolds; centroid spread {}", details.join(", ")))
}

fn c8_gromov_exactness() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    // path and random weighted trees, integer weights so sums are exact
    let mut tree_max = 0.0f64;
    for trial in 0..50 {
        let n = rng.gen_range(4..=20);
        let mut parent = vec![0usize; n];
        let mut depth = vec![0.0f64; n];
        for v in 1..n {
            parent[v] = if trial == 0 { v - 1 } else { rng.gen_range(0..v) };
            depth[v] = depth[parent[v]] + rng.gen_range(1..=9) as f64;
        }
        let ancestors = |mut v: usize| {
            let mut out = vec![v];
            while v != 0 {
                v = parent[v];
                out.push(v);
            }
            out
        };
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            let ai = ancestors(i);
            for j in 0..n {
                let lca = ancestors(j).into_iter().find(|a| ai.contains(a)).unwrap();
                rows[i][j] = depth[i] + depth[j] - 2.0 * depth[lca];
            }
        }
        tree_max = tree_max.max(gromov_delta(&DistanceMatrix::from_rows(&rows).unwrap()).unwrap());
    }
    check(&mut failures, tree_max == 0.0, || format!("tree metric delta_norm {tree_max}"));

    let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let sq = DistanceMatrix::from_points(&square, |a, b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()).unwrap();
    let sq_delta = gromov_delta(&sq).unwrap();
    check(&mut failures, (sq_delta - (2.0 - 2f64.sqrt())).abs() <= 1e-12, || {
        format!("unit square delta_norm {sq_delta}")
    });

    // scale invariance under exact rescaling
    let mut scale_mismatch = 0;
    for _ in 0..100 {
        let pts: Vec<Vec<f64>> = (0..12).map(|_| gaussian_vec(&mut rng, 5)).collect();
        let m = DistanceMatrix::from_points(&pts, |a, b| l2(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())).unwrap();
        let base = gromov_delta(&m).unwrap();
        let lambda = 2f64.powi(rng.gen_range(-20..=20));
        let rows: Vec<Vec<f64>> = (0..12).map(|i| (0..12).map(|j| lambda * m.get(i, j)).collect()).collect();
        if gromov_delta(&DistanceMatrix::from_rows(&rows).unwrap()).unwrap().to_bits() != base.to_bits() {
            scale_mismatch += 1;
        }
    }
    check(&mut failures, scale_mismatch == 0, || format!("{scale_mismatch}/100 scale mismatches"));

    let bundle = gaussian_bundle(300, 64, 576, 8);
    let start = Instant::now();
    let mut counts_ok = true;
    for scene in &bundle.scenes {
        let pts: Vec<&[f64]> = PAPER_LEVELS.iter().flat_map(|&n| scene.slots(n).unwrap()).collect();
        let m = DistanceMatrix::from_points(&pts, |a, b| l2(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())).unwrap();
        let g = gromov_delta_detailed(&m).unwrap();
        counts_ok &= pts.len() == 39 && (g.quadruples == 82_251 || 2.0 * g.delta >= g.diameter);
    }
    for m in ManifoldSpec::default_grid() {
        hyperbolicity_analysis(&bundle, m, HyperbolicityScope::Union).unwrap();
    }
    let secs = start.elapsed().as_secs_f64();
    check(&mut failures, counts_ok, || "quadruple count differs from 82251".into());
    check(&mut failures, secs < 30.0, || format!("300 scenes took {secs:.2}s"));
    verdict(
        failures,
        format!("trees 0, square {sq_delta:.15}, power-of-two scaling bit-exact, 300 scenes x 82251 quadruples x 5 passes in {secs:.2}s"),
    )
}

fn c9_hyperbolicity_trend() -> Outcome {
    let bundle = gaussian_bundle(300, 64, 576, 9);
    let means: Vec<(ManifoldSpec, f64)> = ManifoldSpec::default_grid()
        .into_iter()
        .map(|m| {
            let r = hyperbolicity_analysis(&bundle, m, HyperbolicityScope::Union).unwrap();
            (m, r.summary.unwrap().mean)
        })
        .collect();
    let detail = means
        .iter()
        .map(|(m, v)| format!("{m} {v:.4}"))
        .collect::<Vec<_>>()
        .join(" > ");
    if means.windows(2).all(|w| w[0].1 > w[1].1) {
        Ok(format!("mean delta_norm {detail}"))
    } else {
        Err(format!("not strictly decreasing: {detail}"))
    }
}

fn c10_agreement() -> Outcome {
    let bundle = planted(0.01, 10);
    let pairs = LevelPair::consecutive(&PAPER_LEVELS);
    let manifolds = ManifoldSpec::default_grid();
    let graphs = build_hierarchies(&bundle, &pairs, BinarizationPolicy::Argmax, DEFAULT_TAU_EXCL).unwrap();
    let m = agreement_analysis(&bundle, &graphs, &pairs, &manifolds).unwrap();
    let mut failures = Vec::new();
    for (i, label) in m.labels.iter().enumerate() {
        check(&mut failures, m.entries[i][i] == Some(1.0), || format!("diagonal {label} = {:?}", m.entries[i][i]));
    }
    let mut min_gt = f64::INFINITY;
    for mf in &manifolds {
        let v = m.get(&mf.to_string(), "gt");
        min_gt = min_gt.min(v.unwrap_or(f64::NAN));
        check(&mut failures, v.is_some_and(|v| v >= 0.99), || format!("{mf} vs gt = {v:?}"));
    }
    verdict(failures, format!("unit diagonal, min manifold-vs-gt {min_gt:.4} over {} fine slots", m.n_compared))
}

fn hyperlens(args: &[&str], dir: &Path) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_hyperlens"))
        .args(args)
        .current_dir(dir)
        .env_remove("HYPERLENS_WORKERS")
        .output()
        .expect("run hyperlens");
    assert!(out.status.success(), "hyperlens {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn tree_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn c11_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    hyperlens(&["gen", "--scenes", "40", "--seed", "11", "-o", "a"], dir);
    hyperlens(&["gen", "--scenes", "40", "--seed", "11", "-o", "b"], dir);
    hyperlens(&["analyze", "a", "--all", "--workers", "1", "-o", "r1.json", "-q"], dir);
    hyperlens(&["analyze", "a", "--all", "--workers", "8", "-o", "r8.json", "-q"], dir);
    let (a, b) = (tree_bytes(&dir.join("a")), tree_bytes(&dir.join("b")));
    let r1 = std::fs::read(dir.join("r1.json")).unwrap();
    let r8 = std::fs::read(dir.join("r8.json")).unwrap();
    let mut failures = Vec::new();
    check(&mut failures, a == b, || "bundles from the same seed differ".into());
    check(&mut failures, r1 == r8, || "reports differ between 1 and 8 workers".into());
    verdict(failures, format!("{} bundle files identical, {}-byte reports identical", a.len(), r1.len()))
}

fn c12_runtime() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let start = Instant::now();
    hyperlens(&["gen", "--scenes", "100", "--seed", "12", "-o", "bundle"], dir);
    hyperlens(
        &[
            "analyze",
            "bundle",
            "--manifolds",
            "euclidean,lorentz:0.2,lorentz:0.5,lorentz:1.0",
            "--all",
            "-o",
            "report.json",
            "-q",
        ],
        dir,
    );
    let secs = start.elapsed().as_secs_f64();
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap();
    let blocks = ["retrieval", "separation", "norms", "hyperbolicity", "agreement"];
    let missing: Vec<_> = blocks.iter().filter(|b| report[**b].is_null()).collect();
    let mut failures = Vec::new();
    check(&mut failures, missing.is_empty(), || format!("missing blocks {missing:?}"));
    check(&mut failures, secs < 60.0, || format!("took {secs:.2}s (limit 60s)"));
    verdict(failures, format!("gen + analyze (5 analyses x 4 manifolds) in {secs:.2}s"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("manifold constraint suite", c1_manifold_constraints),
        ("flat limit", c2_flat_limit),
        ("metric axioms", c3_metric_axioms),
        ("hierarchy oracle", c4_hierarchy_oracle),
        ("retrieval oracle", c5_retrieval_oracle),
        ("OV calibration", c6_ov_calibration),
        ("depth-ordering recovery", c7_depth_ordering),
        ("Gromov delta exactness", c8_gromov_exactness),
        ("hyperbolicity trend", c9_hyperbolicity_trend),
        ("agreement sanity", c10_agreement),
        ("determinism", c11_determinism),
        ("end-to-end runtime", c12_runtime),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
