//! Acceptance suite. Runs without the libtest harness so every criterion's
//! PASS/FAIL line is always printed; exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::{
    bare_split, check_continual, golden_matches, golden_results, oracle, random_rearrange_case, random_series, rng,
    track_at, line_through, welford_trial,
};
use posevad::metrics::{auc_pr, auc_roc, compute_all, eer, ten_er, ScoreSeries};
use posevad::model::{Label, NUM_KEYPOINTS};
use posevad::preprocess::{interpolate_track, smooth_track, window_count, window_track};
use posevad::rearrange::{rearrange, verify, RearrangePlan};
use posevad::runner::report::{render_csv, render_markdown, render_scores_csv};
use posevad::runner::{
    generate_shift_scenario, generate_synthetic, run_continual, run_standard, Mode, RunConfig, SynthSpec,
};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, format!("took {elapsed:?}, limit {limit:?}"))
}

fn metric_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1001);
    let mut worst = [0.0f64; 4];
    for i in 0..1000 {
        let s = random_series(&mut r);
        let o = oracle(&s);
        let all = compute_all(&s).map_err(|e| e.to_string())?;
        let d = [
            (all.auc_roc - o.auc_roc).abs(),
            (all.auc_pr - o.auc_pr).abs(),
            (all.eer - o.eer).abs(),
            (all.ten_er - o.ten_er).abs(),
        ];
        ensure(d[0] <= 1e-9 && d[2] <= 1e-9 && d[3] <= 1e-9, format!("series {i}: deviations {d:?}"))?;
        ensure(d[1] <= 1e-6, format!("series {i}: AUC-PR deviation {}", d[1]))?;
        for (w, v) in worst.iter_mut().zip(d) {
            *w = w.max(v);
        }
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("1000 series, max deviations {:.1e} {:.1e} {:.1e} {:.1e}, {:?}", worst[0], worst[1], worst[2], worst[3], start.elapsed()))
}

fn metric_fixtures() -> Outcome {
    use Label::{Anomalous as A, Normal as N};
    let s = ScoreSeries::from_pairs([(0.9, A), (0.8, N), (0.7, A), (0.6, N)]);
    let err = |e: posevad::Error| e.to_string();
    let (roc, pr, e, t) = (auc_roc(&s).map_err(err)?, auc_pr(&s).map_err(err)?, eer(&s).map_err(err)?, ten_er(&s).map_err(err)?);
    ensure(roc == 0.75, format!("AUC-ROC {roc}"))?;
    ensure((pr - 0.8333).abs() <= 1e-4, format!("AUC-PR {pr}"))?;
    ensure(e == 0.5, format!("EER {e}"))?;
    ensure(t == 0.5, format!("10ER {t}"))?;
    Ok(format!("AUC-ROC {roc}, AUC-PR {pr:.4}, EER {e}, 10ER {t}"))
}

fn c0_fixture() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1003);
    // 509,313 normals in total: 483,220 train, 26,093 test.
    let split = bare_split("C0", 483_220, 26_093, 30_667, &mut r);
    let plan = RearrangePlan {
        seed: 0,
        inject_count: Some(4_615),
        test_normal_count: Some(26_093),
        ..Default::default()
    };
    let cs = rearrange(&split, &plan).map_err(|e| e.to_string())?;
    let (train, test) = verify(&cs).map_err(|e| e.to_string())?;
    ensure(train.frame_count == 487_835, format!("train total {}", train.frame_count))?;
    let pct = train.anomaly_percentage();
    ensure((pct - 0.95).abs() <= 0.005, format!("train anomaly percentage {pct}"))?;
    ensure(
        test.normal_frame_count() == 26_093 && test.anomaly_frame_count == 26_052,
        format!("test {}/{}", test.normal_frame_count(), test.anomaly_frame_count),
    )?;
    let balance = test.anomaly_percentage();
    ensure((balance - 49.96).abs() <= 0.05, format!("balance {balance}"))?;
    // Conservation by label counts and disjointness by index sets.
    let before = split.train.len() + split.test.len();
    ensure(before == cs.train_stream.len() + cs.test.len(), "frame count not conserved")?;
    let mut idx: Vec<u64> = cs.train_stream.iter().chain(cs.test.frames()).map(|f| f.frame_index).collect();
    idx.sort_unstable();
    let expect: Vec<u64> = (0..before as u64).collect();
    ensure(idx == expect, "frame identities not conserved or not disjoint")?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "train {} ({pct:.2}% anomalous), test {}/{} ({balance:.2}%), {:?}",
        train.frame_count,
        test.normal_frame_count(),
        test.anomaly_frame_count,
        start.elapsed()
    ))
}

fn rearrange_invariants() -> Outcome {
    let mut r = rng(1004);
    for i in 0..100 {
        let (split, plan) = random_rearrange_case(&mut r);
        check_continual(&split, &plan).map_err(|e| format!("case {i}: {e}"))?;
    }
    Ok("100 random splits".into())
}

fn preprocessing() -> Outcome {
    // Midpoint.
    let t = track_at(&[10, 12], |f, _| if f == 10 { (100.0, 200.0) } else { (110.0, 220.0) });
    let out = interpolate_track(&t, 14);
    let mid = &out.observations[1].1.keypoints[0];
    ensure(out.observations[1].0 == 11, "no frame 11")?;
    ensure((mid.x - 105.0).abs() < 1e-9 && (mid.y - 210.0).abs() < 1e-9 && mid.visibility.is_none(), "midpoint")?;
    // Linear-fit oracle.
    let mut r = rng(1005);
    for _ in 0..200 {
        let gap = r.random_range(1..=14u64);
        let (a, b): (Vec<f64>, Vec<f64>) = (0..NUM_KEYPOINTS).map(|_| (r.random_range(-1e3..1e3), r.random_range(-1e3..1e3))).unzip();
        let f1 = 3 + gap + 1;
        let t = track_at(&[3, f1], |f, j| if f == 3 { (a[j], -a[j]) } else { (b[j], -b[j]) });
        let out = interpolate_track(&t, 14);
        ensure(out.len() == 2 + gap as usize, "interpolated length")?;
        for (f, o) in &out.observations {
            for (j, k) in o.keypoints.iter().enumerate() {
                let x = line_through(3, a[j], f1, b[j], *f);
                ensure((k.x - x).abs() < 1e-9 && (k.y + x).abs() < 1e-9, "linear fit")?;
            }
        }
    }
    // Impulse.
    let frames: Vec<u64> = (0..31).collect();
    let t = track_at(&frames, |f, _| if f == 15 { (1.0, 0.0) } else { (0.0, 0.0) });
    let s = smooth_track(&t, 15).map_err(|e| e.to_string())?;
    let c = s.observations[15].1.keypoints[0].x;
    ensure((c - 1.0 / 15.0).abs() < 1e-12, format!("impulse center {c}"))?;
    // Window counts.
    for _ in 0..1000 {
        let (n, len, stride) = (r.random_range(0..150usize), r.random_range(1..50usize), r.random_range(1..15usize));
        let want = if n < len { 0 } else { (n - len) / stride + 1 };
        ensure(window_count(n, len, stride) == want, format!("count ({n},{len},{stride})"))?;
        let frames: Vec<u64> = (0..n as u64).collect();
        let t = track_at(&frames, |f, _| (f as f64, 1.0));
        let got = window_track(&t, len, stride).map_err(|e| e.to_string())?.len();
        ensure(got == want, format!("windows ({n},{len},{stride}) = {got}, want {want}"))?;
    }
    Ok("midpoint, 200 linear fits, impulse 1/15, 1000 window-count triples".into())
}

fn welford() -> Outcome {
    let mut r = rng(1006);
    let (mut wm, mut wv) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let (dm, dv) = welford_trial(&mut r);
        ensure(dm <= 1e-9 && dv <= 1e-6, format!("trial {i}: mean {dm:e}, variance {dv:e}"))?;
        wm = wm.max(dm);
        wv = wv.max(dv);
    }
    Ok(format!("100 trials, max mean deviation {wm:.1e}, variance {wv:.1e}"))
}

fn end_to_end_standard() -> Outcome {
    let start = Instant::now();
    let spec = SynthSpec {
        normal_frames: 5000,
        anomalous_frames: 500,
        seed: 0,
        ..Default::default()
    };
    let split = generate_synthetic(&spec).map_err(|e| e.to_string())?;
    let cfg = RunConfig::default();
    let r = run_standard(&split, &cfg).map_err(|e| e.to_string())?.report;
    ensure(r.auc_roc >= 0.95, format!("AUC-ROC {}", r.auc_roc))?;
    ensure(r.ten_er <= 0.2, format!("10ER {}", r.ten_er))?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("AUC-ROC {:.4}, 10ER {:.4}, {:?}", r.auc_roc, r.ten_er, start.elapsed()))
}

/// Reports and score dumps of one continual run, as bytes.
fn continual_artifacts() -> Result<(posevad::runner::ContinualResult, Vec<String>), String> {
    let sc = generate_shift_scenario(&SynthSpec::default(), 2000).map_err(|e| e.to_string())?;
    let cfg = RunConfig {
        mode: Mode::Continual,
        rearrange: Some(RearrangePlan {
            k: 9,
            ..Default::default()
        }),
        seed: 0,
        ..Default::default()
    };
    let out = run_continual(&[sc.origin], &sc.target, &cfg, None).map_err(|e| e.to_string())?;
    let results = posevad::runner::RunResults {
        config: cfg,
        cameras: vec![posevad::runner::CameraResult {
            camera_id: out.result.camera_id.clone(),
            outcome: posevad::runner::Outcome::Continual {
                result: out.result.clone(),
            },
        }],
    };
    let mut files = vec![
        render_csv(&results).map_err(|e| e.to_string())?,
        render_markdown(&results).map_err(|e| e.to_string())?,
        results.to_json(),
    ];
    for s in &out.step_scores {
        files.push(render_scores_csv(s).map_err(|e| e.to_string())?);
    }
    Ok((out.result, files))
}

fn end_to_end_continual() -> Outcome {
    let (res, files) = continual_artifacts()?;
    ensure(res.per_step.len() == 9, format!("{} steps", res.per_step.len()))?;
    let n = res.per_step.len() as f64;
    let metrics: [fn(&posevad::metrics::MetricReport) -> f64; 4] =
        [|r| r.auc_roc, |r| r.auc_pr, |r| r.eer, |r| r.ten_er];
    for (m, f) in metrics.iter().enumerate() {
        let vals: Vec<f64> = res.per_step.iter().map(f).collect();
        let mean = vals.iter().sum::<f64>() / n;
        ensure((f(&res.ucal_average) - mean).abs() <= 1e-9, format!("metric {m}: average"))?;
        let best = if m < 2 {
            vals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        } else {
            vals.iter().copied().fold(f64::INFINITY, f64::min)
        };
        ensure((f(&res.ucal_best) - best).abs() <= 1e-9, format!("metric {m}: best"))?;
        let dominates = if m < 2 { f(&res.ucal_best) >= f(&res.ucal_average) } else { f(&res.ucal_best) <= f(&res.ucal_average) };
        ensure(dominates, format!("metric {m}: best does not dominate average"))?;
    }
    let last = res.per_step.last().unwrap().auc_roc;
    ensure(last > res.baseline.auc_roc, format!("final step {last} <= baseline {}", res.baseline.auc_roc))?;
    let (_, again) = continual_artifacts()?;
    ensure(files == again, "rerun produced different report bytes")?;
    Ok(format!("baseline AUC-ROC {:.4} -> step 9 {last:.4}; rerun byte-identical", res.baseline.auc_roc))
}

fn golden_structure() -> Outcome {
    let results = golden_results();
    let md = render_markdown(&results).map_err(|e| e.to_string())?;
    let csv = render_csv(&results).map_err(|e| e.to_string())?;
    ensure(golden_matches("report.md", &md), "report.md differs from golden file")?;
    ensure(golden_matches("report.csv", &csv), "report.csv differs from golden file")?;
    let rows = md.lines().skip_while(|l| !l.starts_with("## C0")).skip(4).take_while(|l| l.starts_with("| ")).count();
    ensure(rows == 12, format!("{rows} data rows for k = 9"))?;
    Ok("markdown and CSV byte-identical to golden files; 12 data rows for k = 9; fixture values are inputs, no deep-model score is recomputed".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 metric oracle equivalence", metric_oracle_equivalence),
        ("2 metric fixtures", metric_fixtures),
        ("3 rearrangement fixture C0", c0_fixture),
        ("4 rearrangement invariants", rearrange_invariants),
        ("5 preprocessing properties", preprocessing),
        ("6 Welford consistency", welford),
        ("7 end-to-end standard", end_to_end_standard),
        ("8 end-to-end continual", end_to_end_continual),
        ("9 report structure vs golden", golden_structure),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                println!("FAIL  criterion {name}: {why}");
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
