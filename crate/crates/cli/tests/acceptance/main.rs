//! Acceptance criteria, one test each. Every test prints a single
//! `[acceptance] <n> PASS|FAIL ...` line to stderr (uncaptured) before asserting.

#[path = "../../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use gazewall::classifier::smo::solve;
use gazewall::classifier::{train_dual, KernelParams, SmoParams};
use gazewall::evaluation::{
    build_dataset, dual_window_combine, evaluate, spearman, Alert, AlertKind, EvalConfig, EvalReport, Verdict,
};
use gazewall::features::{extract_features, ZONE_THRESHOLDS};
use gazewall::geometry::{intersect_ray_plane, project_sample, wall_point_to_pixel};
use gazewall::heatmap::{gaussian_blur_raw, heatmap_from_hits, stamp_accumulate, Grid, Heatmap, TimeSpan};
use gazewall::synth::{make_corpus, CorpusConfig};
use gazewall::{FeatureConfig, GazeSample, HeatmapConfig, Label, Vec3, VirtualWall, WallHit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Prints the verdict line, then fails the test if any check failed.
fn report(n: u32, title: &str, elapsed: Duration, failures: Vec<String>, detail: String) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[acceptance] {n} {status} {title}: {detail} ({:.2} s)", elapsed.as_secs_f64());
    for f in &failures {
        let _ = writeln!(err, "[acceptance] {n}   {f}");
    }
    assert!(failures.is_empty(), "criterion {n} failed: {failures:?}");
}

fn check(failures: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok && failures.len() < 10 {
        failures.push(msg());
    }
}

#[test]
fn criterion_1_geometry_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();
    let (mut max_residual, mut max_round_trip, mut max_shift): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for case in 0..1000 {
        let normal = Vec3::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3), -1.0).normalized();
        let wall = VirtualWall {
            center: Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(2.0..8.0)),
            normal,
            ..VirtualWall::default()
        };
        let head = Vec3::new(rng.random_range(-0.5..0.5), rng.random_range(0.0..1.5), rng.random_range(-0.8..0.5));
        let (u, v) = (rng.random_range(-2.0..2.0), rng.random_range(-1.25..1.25));
        let s = GazeSample {
            timestamp_ms: 0,
            head_position: head,
            gaze_direction: (wall.local_to_point(u, v) - head).normalized(),
            valid: true,
        };

        let Some(p) = intersect_ray_plane(&s, &wall) else {
            check(&mut failures, false, || format!("case {case}: ray missed the plane"));
            continue;
        };
        let (t, ou, ov) = common::ray_wall_cramer(head, s.gaze_direction, &wall).unwrap();
        let residual = (p - (head + s.gaze_direction * t)).norm();
        max_residual = max_residual.max(residual);

        let (ex, ey) = common::pixel_of_local(ou, ov, &wall);
        match wall_point_to_pixel(p, &wall) {
            Ok(Some(px)) => {
                let back = wall.pixel_to_point(px.x, px.y);
                let again = wall_point_to_pixel(back, &wall).unwrap().unwrap();
                let err = (px.x - ex).abs().max((px.y - ey).abs()).max((again.x - px.x).abs()).max((again.y - px.y).abs());
                max_round_trip = max_round_trip.max(err);
            }
            other => check(&mut failures, false, || format!("case {case}: pixel lookup gave {other:?}")),
        }

        let shift = Vec3::new(rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0));
        let moved = GazeSample { head_position: head + shift, ..s };
        let moved_wall = VirtualWall { center: wall.center + shift, ..wall };
        match (project_sample(&s, &wall), project_sample(&moved, &moved_wall)) {
            (Some(a), Some(b)) => max_shift = max_shift.max((a.px - b.px).abs().max((a.py - b.py).abs())),
            (None, None) => {}
            other => check(&mut failures, false, || format!("case {case}: translation changed hit status {other:?}")),
        }
    }
    let elapsed = start.elapsed();
    check(&mut failures, max_residual < 1e-9, || format!("residual {max_residual:e} m"));
    check(&mut failures, max_round_trip < 1e-6, || format!("round trip {max_round_trip:e} px"));
    check(&mut failures, max_shift < 1e-9, || format!("translation {max_shift:e} px"));
    check(&mut failures, elapsed < Duration::from_secs(1), || format!("runtime {elapsed:?}"));
    let detail = format!(
        "1000 cases, residual {max_residual:.1e} m, round trip {max_round_trip:.1e} px, translation {max_shift:.1e} px"
    );
    report(1, "geometry oracle", elapsed, failures, detail);
}

#[test]
fn criterion_2_heatmap_invariants() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let wall = VirtualWall::default();
    let cfg = HeatmapConfig::default();
    let mut failures = Vec::new();
    let span = TimeSpan::new(0, 30_000);
    for w in 0..200 {
        let n = rng.random_range(0..=600);
        let hits = common::random_hits(&mut rng, &wall, n);
        let hm = heatmap_from_hits(&hits, span, &wall, &cfg, "d", None);
        check(&mut failures, hm.grid.data().iter().all(|v| (0.0..=1.0).contains(v)), || {
            format!("window {w}: intensity outside [0, 1]")
        });
        let again = heatmap_from_hits(&hits, span, &wall, &cfg, "d", None);
        let identical = hm.grid.data().iter().zip(again.grid.data()).all(|(a, b)| a.to_bits() == b.to_bits());
        check(&mut failures, identical && hm.lac.to_bits() == again.lac.to_bits(), || {
            format!("window {w}: re-run differs")
        });
        let cut = n / 2;
        let (a, b) = (
            stamp_accumulate(&hits[..cut], 640, 400, 15.0),
            stamp_accumulate(&hits[cut..], 640, 400, 15.0),
        );
        let all = stamp_accumulate(&hits, 640, 400, 15.0);
        let additive = (0..all.len()).all(|i| all.data()[i] == a.data()[i] + b.data()[i]);
        check(&mut failures, additive, || format!("window {w}: stamping not additive"));
    }
    let mut blur_err: f64 = 0.0;
    for c in [0.0, 0.25, 0.5, 1.0] {
        let out = gaussian_blur_raw(&Grid::filled(640, 400, c), 5.0, 21);
        blur_err = out.data().iter().map(|v| (v - c).abs()).fold(blur_err, f64::max);
    }
    check(&mut failures, blur_err < 1e-9, || format!("blur moved a constant by {blur_err:e}"));
    let lattice = common::lattice_disc_count(15.0);
    let single = stamp_accumulate(&[WallHit { timestamp_ms: 0, px: 320.5, py: 200.5 }], 640, 400, 15.0).support();
    check(&mut failures, lattice == 709 && single == 709, || {
        format!("single-hit support {single}, lattice count {lattice}, expected 709")
    });
    let elapsed = start.elapsed();
    check(&mut failures, elapsed < Duration::from_secs(10), || format!("runtime {elapsed:?}"));
    let detail = format!("200 windows, blur drift {blur_err:.1e}, single-hit support {single}");
    report(2, "heatmap invariants", elapsed, failures, detail);
}

#[test]
fn criterion_3_feature_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let wall = VirtualWall::default();
    let cfg = HeatmapConfig::default();
    let mut failures = Vec::new();
    for h in 0..100 {
        // half pipeline-built, half synthetic blobs with boundary-valued cells
        let hm = if h % 2 == 0 {
            let n = rng.random_range(0..=600);
            heatmap_from_hits(&common::random_hits(&mut rng, &wall, n), TimeSpan::new(0, 30_000), &wall, &cfg, "d", None)
        } else {
            Heatmap {
                grid: common::random_blob_grid(&mut rng, 640, 400),
                window_start_ms: 0,
                window_end_ms: 30_000,
                lac: rng.random_range(0.0..=1.0),
                driver_id: "d".into(),
                ground_truth: None,
            }
        };
        let fv = extract_features(&hm);
        let hist = common::naive_histogram(&hm.grid);
        check(&mut failures, fv.hist == hist, || format!("heatmap {h}: histogram {:?} vs {hist:?}", fv.hist));
        for (z, t) in ZONE_THRESHOLDS.iter().enumerate() {
            let got = fv.zones[z].to_array();
            let want = common::naive_zone(&hm.grid, *t);
            for k in 0..17 {
                let tol = if k < 4 { 1e-9 } else { 0.0 };
                check(&mut failures, (got[k] - want[k]).abs() <= tol, || {
                    format!("heatmap {h} zone {z} field {k}: {} vs {}", got[k], want[k])
                });
            }
        }
        let monotone = fv.zones.windows(2).all(|p| p[0].area >= p[1].area);
        check(&mut failures, monotone, || format!("heatmap {h}: zone areas not monotone"));
    }
    let elapsed = start.elapsed();
    report(3, "feature oracle equivalence", elapsed, failures, "100 heatmaps, 4 zones x 17 fields each".into());
}

#[test]
fn criterion_4_classifier_qp() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = Vec::new();
    let mut worst_gap: f64 = 0.0;
    let mut worst_decision: f64 = 0.0;
    for problem in 0..20 {
        let x: Vec<Vec<f64>> = (0..10).map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let mut labels: Vec<Label> =
            x.iter().map(|r| if r[0] + rng.random_range(-1.0..1.0) > 0.0 { Label::Distracted } else { Label::Neutral }).collect();
        labels[0] = Label::Neutral;
        labels[1] = Label::Distracted;
        let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
        let kp = KernelParams::new(rng.random_range(0.1..2.0), rng.random_range(0.1..10.0)).unwrap();
        let smo = SmoParams::default();

        let k: Vec<Vec<f64>> = x.iter().map(|a| x.iter().map(|b| common::rbf(a, b, kp.gamma)).collect()).collect();
        let reference = common::projected_gradient_dual(&k, &y, kp.c);
        let sol = solve(&x, &y, &kp, &smo);
        let gap = (common::dual_value(&k, &y, &sol.alpha) - common::dual_value(&k, &y, &reference)).abs();
        worst_gap = worst_gap.max(gap);
        check(&mut failures, gap < 1e-4, || format!("problem {problem}: objective gap {gap:e}"));

        let (model, sol) = train_dual(&x, &labels, &kp, &smo).unwrap();
        let feasible = sol.alpha.iter().all(|a| (0.0..=kp.c).contains(a));
        let balance: f64 = sol.alpha.iter().zip(&y).map(|(a, y)| a * y).sum();
        check(&mut failures, feasible && balance.abs() < 1e-6, || {
            format!("problem {problem}: infeasible dual, balance {balance:e}")
        });
        for (i, a) in sol.alpha.iter().enumerate() {
            let m = y[i] * model.decision_value(&x[i]).unwrap();
            let kkt = if *a <= 1e-8 {
                m >= 1.0 - 1e-3
            } else if *a >= kp.c - 1e-8 {
                m <= 1.0 + 1e-3
            } else {
                (m - 1.0).abs() <= 1e-3
            };
            check(&mut failures, kkt, || format!("problem {problem}: KKT violated at {i} (alpha {a}, margin {m})"));
        }
        for _ in 0..10 {
            let p: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            let brute: f64 = model.bias
                + model.support_vectors.iter().zip(&model.dual_coefs).map(|(sv, c)| c * common::rbf(sv, &p, kp.gamma)).sum::<f64>();
            let d = (model.decision_value(&p).unwrap() - brute).abs();
            worst_decision = worst_decision.max(d);
        }
    }
    check(&mut failures, worst_decision < 1e-9, || format!("decision mismatch {worst_decision:e}"));
    let elapsed = start.elapsed();
    let detail = format!("20 problems, objective gap {worst_gap:.1e}, decision mismatch {worst_decision:.1e}");
    report(4, "classifier QP equivalence", elapsed, failures, detail);
}

/// The synthetic study shared by criteria 5 and 6: 5 drivers x 2 laps of 300 s,
/// leave-one-driver-out, default generator profiles.
struct Study {
    rows: BTreeMap<u32, (EvalReport, Duration)>,
    synth_time: Duration,
}

const STUDY_SEED: u64 = 1;
const STUDY_DURATION_S: u32 = 300;
const STUDY_WINDOWS: [u32; 6] = [5, 10, 15, 20, 25, 30];

fn study() -> &'static Study {
    static STUDY: OnceLock<Study> = OnceLock::new();
    STUDY.get_or_init(|| {
        let t = Instant::now();
        let sessions = make_corpus(5, STUDY_SEED, &CorpusConfig::with_duration(STUDY_DURATION_S)).unwrap();
        let synth_time = t.elapsed();
        let mut rows = BTreeMap::new();
        // the 30 s row first so criterion 5 does not wait for the whole sweep
        for &w in STUDY_WINDOWS.iter().rev() {
            let t = Instant::now();
            let ds = build_dataset(&sessions, &HeatmapConfig::with_window(w), &FeatureConfig::default());
            let report = evaluate(&ds, &EvalConfig { window_s: w, ..EvalConfig::default() }).unwrap();
            rows.insert(w, (report, t.elapsed()));
        }
        Study { rows, synth_time }
    })
}

#[test]
fn criterion_5_end_to_end_study() {
    let s = study();
    let (r, t) = &s.rows[&30];
    let elapsed = s.synth_time + *t;
    let mut failures = Vec::new();
    check(&mut failures, r.folds.len() == 5 && r.skipped_folds.is_empty(), || {
        format!("{} folds evaluated, {} skipped", r.folds.len(), r.skipped_folds.len())
    });
    check(&mut failures, r.accuracy >= 80.0, || format!("accuracy {:.3} % < 80 %", r.accuracy));
    check(&mut failures, r.f1 >= 0.75, || format!("F1 {:.3} < 0.75", r.f1));
    check(&mut failures, elapsed < Duration::from_secs(300), || format!("runtime {elapsed:?}"));
    let detail = format!(
        "5 drivers x 2 x {STUDY_DURATION_S} s, 30 s windows, LODO: accuracy {:.3} %, F1 {:.3}",
        r.accuracy, r.f1
    );
    report(5, "end-to-end synthetic study", elapsed, failures, detail);
}

#[test]
fn criterion_6_window_sweep_trend() {
    let start = Instant::now();
    let s = study();
    let w: Vec<f64> = STUDY_WINDOWS.iter().map(|&w| f64::from(w)).collect();
    let acc: Vec<f64> = STUDY_WINDOWS.iter().map(|w| s.rows[w].0.accuracy).collect();
    let rho = spearman(&w, &acc);
    let mut failures = Vec::new();
    check(&mut failures, rho >= 0.8, || format!("Spearman {rho:.3} < 0.8"));
    let table: Vec<String> = STUDY_WINDOWS.iter().zip(&acc).map(|(w, a)| format!("{w}s={a:.1}")).collect();
    report(6, "window-sweep trend", start.elapsed(), failures, format!("Spearman {rho:.3} over [{}]", table.join(" ")));
}

#[test]
fn criterion_7_dual_window_combiner() {
    let start = Instant::now();
    let v = |items: &[(i64, bool)]| -> Vec<Verdict> {
        items
            .iter()
            .map(|&(t, d)| Verdict { time_ms: t * 1000, label: if d { Label::Distracted } else { Label::Neutral } })
            .collect()
    };
    // seconds; true = distracted
    let fast = v(&[
        (10, false), (11, true), (12, true), (13, false), (14, false),
        (20, true), (21, false),
        (30, true), (31, true), (37, false),
        (40, true), (45, false),
    ]);
    let slow = v(&[(10, false), (12, true), (14, false), (25, false), (36, true), (38, false), (40, true), (45, false)]);
    let expected: Vec<Alert> = [
        (11, AlertKind::Onset),
        (12, AlertKind::Confirmed),
        (14, AlertKind::Cleared),
        (20, AlertKind::Onset),
        (21, AlertKind::Cleared),
        (30, AlertKind::Onset),
        (38, AlertKind::Cleared),
        (40, AlertKind::Onset),
        (40, AlertKind::Confirmed),
        (45, AlertKind::Cleared),
    ]
    .iter()
    .map(|&(t, kind)| Alert { time_ms: t * 1000, kind })
    .collect();
    let got = dual_window_combine(&fast, &slow, 5000);
    let mut failures = Vec::new();
    check(&mut failures, got == expected, || format!("got {got:?}"));
    check(&mut failures, dual_window_combine(&v(&[(1, false)]), &v(&[(2, false)]), 5000).is_empty(), || {
        "quiet streams raised an alert".into()
    });
    report(7, "dual-window combiner", start.elapsed(), failures, format!("{} scripted alerts", expected.len()));
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_gazewall")).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

/// synth, heatmap, render, features, train, eval (CV and saved model) and sweep into `dir`.
fn pipeline(dir: &Path, jobs: &str) -> Result<(), String> {
    let d = |p: &str| dir.join(p).to_str().unwrap().to_owned();
    let (s, h) = (d("sessions"), d("heatmaps"));
    let neutral = dir.join("sessions/driver01_neutral.gaze");
    let first_pgm = dir.join("heatmaps/driver01_neutral_000000000.pgm");
    run_cli(&["--jobs", jobs, "synth", "--drivers", "3", "--seed", "11", "--duration", "45", "--out", &s])?;
    run_cli(&["--jobs", jobs, "heatmap", "--in", neutral.to_str().unwrap(), "--window", "10", "--out", &h])?;
    run_cli(&["--jobs", jobs, "render", "--in", first_pgm.to_str().unwrap(), "--out", &d("render.png")])?;
    run_cli(&["--jobs", jobs, "features", "--in", &s, "--window", "10", "--out", &d("features.csv")])?;
    run_cli(&["--jobs", jobs, "train", "--in", &s, "--window", "10", "--seed", "3", "--out", &d("m.model.json")])?;
    run_cli(&["--jobs", jobs, "eval", "--in", &s, "--window", "10", "--seed", "3", "--out", &d("cv.report.json")])?;
    let kfold = ["--jobs", jobs, "eval", "--in", &s, "--mode", "kfold", "--folds", "4", "--window", "10"];
    run_cli(&[&kfold[..], &["--seed", "3", "--out", &d("kfold.report.json")]].concat())?;
    let model = d("m.model.json");
    run_cli(&["--jobs", jobs, "eval", "--in", &s, "--window", "10", "--model", &model, "--out", &d("m.report.json")])?;
    run_cli(&["--jobs", jobs, "sweep", "--in", &s, "--windows", "5,10", "--out", &d("sweep.report.json")])?;
    Ok(())
}

fn all_files(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

#[test]
fn criterion_8_reproducibility() {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let mut failures = Vec::new();
    for (dir, jobs) in [(&a, "1"), (&b, "2")] {
        if let Err(e) = pipeline(dir, jobs) {
            failures.push(e);
        }
    }
    let (fa, fb) = (all_files(&a), all_files(&b));
    check(&mut failures, fa == fb, || format!("file sets differ: {} vs {}", fa.len(), fb.len()));
    let mut kinds = BTreeMap::new();
    for f in &fa {
        let same = fs::read(a.join(f)).ok() == fs::read(b.join(f)).ok();
        check(&mut failures, same, || format!("{} differs between runs", f.display()));
        let name = f.to_string_lossy();
        let kind = ["gaze", "pgm", "png", "csv", "model.json", "report.json", "json"]
            .into_iter()
            .find(|k| name.ends_with(k))
            .unwrap_or("other");
        *kinds.entry(kind).or_insert(0) += 1;
    }
    for k in ["gaze", "pgm", "png", "csv", "model.json", "report.json"] {
        check(&mut failures, kinds.contains_key(k), || format!("no {k} output produced"));
    }
    let detail = format!("{} files byte-identical across runs with --jobs 1 and 2 {kinds:?}", fa.len());
    report(8, "reproducibility", start.elapsed(), failures, detail);
}
