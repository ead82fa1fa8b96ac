#![allow(dead_code)]

use posevad::metrics::ScoreSeries;
use posevad::model::{
    BoundingBox, CameraDataset, FrameRecord, Keypoint, Label, PersonObservation, SplitSet, NUM_KEYPOINTS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Series of 2..=50 entries with both labels and deliberate score ties.
pub fn random_series(rng: &mut ChaCha8Rng) -> ScoreSeries {
    let n = rng.random_range(2..=50);
    let levels = rng.random_range(1..=n);
    let mut pairs: Vec<(f64, Label)> = (0..n)
        .map(|_| {
            let score = rng.random_range(0..levels) as f64 / levels as f64;
            let label = if rng.random_bool(0.4) { Label::Anomalous } else { Label::Normal };
            (score, label)
        })
        .collect();
    pairs[0].1 = Label::Anomalous;
    pairs[1].1 = Label::Normal;
    ScoreSeries::from_pairs(pairs)
}

/// Metrics recomputed by brute force: every candidate threshold is tried
/// directly on the raw entries.
pub struct Oracle {
    pub auc_roc: f64,
    pub auc_pr: f64,
    pub eer: f64,
    pub ten_er: f64,
}

/// `(fpr, fnr, tp, fp)` when flagging every entry with score >= `t`.
fn confusion(s: &ScoreSeries, t: f64) -> (f64, f64, usize, usize) {
    let (mut tp, mut fp, mut pos, mut neg) = (0, 0, 0, 0);
    for e in &s.entries {
        let flagged = e.score >= t;
        if e.label.is_anomalous() {
            pos += 1;
            tp += flagged as usize;
        } else {
            neg += 1;
            fp += flagged as usize;
        }
    }
    (fp as f64 / neg as f64, (pos - tp) as f64 / pos as f64, tp, fp)
}

pub fn oracle(s: &ScoreSeries) -> Oracle {
    // Pairwise Mann-Whitney with ties counted one half.
    let pos: Vec<f64> = s.entries.iter().filter(|e| e.label.is_anomalous()).map(|e| e.score).collect();
    let neg: Vec<f64> = s.entries.iter().filter(|e| !e.label.is_anomalous()).map(|e| e.score).collect();
    let mut wins = 0.0;
    for p in &pos {
        for n in &neg {
            wins += if p > n {
                1.0
            } else if p == n {
                0.5
            } else {
                0.0
            };
        }
    }
    let auc_roc = wins / (pos.len() * neg.len()) as f64;

    // Candidate thresholds: every distinct score, plus one above the maximum.
    let mut thresholds: Vec<f64> = s.entries.iter().map(|e| e.score).collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let above = thresholds.first().copied().unwrap_or(0.0) + 1.0;
    let mut all = vec![above];
    all.extend(thresholds.iter().copied());

    // Average precision over thresholds from high to low.
    let mut auc_pr = 0.0;
    let mut prev_recall = 0.0;
    for &t in &thresholds {
        let (_, fnr, tp, fp) = confusion(s, t);
        let recall = 1.0 - fnr;
        if recall > prev_recall {
            auc_pr += (recall - prev_recall) * tp as f64 / (tp + fp) as f64;
            prev_recall = recall;
        }
    }

    // EER: exact rational comparison of |FPR - FNR|, cross-multiplied.
    let (np, nn) = (pos.len() as i128, neg.len() as i128);
    let mut best: Option<(i128, i128)> = None;
    let mut ten_er = f64::INFINITY;
    for &t in &all {
        let (fpr, fnr, tp, fp) = confusion(s, t);
        let fn_ = np - tp as i128;
        let gap = (fp as i128 * np - fn_ * nn).abs();
        let sum = fp as i128 * np + fn_ * nn;
        match best {
            Some((g, s)) if g < gap || (g == gap && s <= sum) => {}
            _ => best = Some((gap, sum)),
        }
        if fnr <= 0.10 {
            ten_er = ten_er.min(fpr);
        }
    }
    let eer = best.unwrap().1 as f64 / (2 * np * nn) as f64;
    Oracle {
        auc_roc,
        auc_pr,
        eer,
        ten_er,
    }
}

pub fn person(track_id: u64, cx: f64, cy: f64, h: f64, rng: &mut ChaCha8Rng) -> PersonObservation {
    let bbox = BoundingBox::new(cx - 0.2 * h, cy - 0.5 * h, cx + 0.2 * h, cy + 0.5 * h).unwrap();
    let keypoints = (0..NUM_KEYPOINTS)
        .map(|_| {
            let vis = if rng.random_bool(0.1) { None } else { Some(rng.random_range(0.0..1.0)) };
            Keypoint::new(
                cx + rng.random_range(-0.2..0.2) * h,
                cy + rng.random_range(-0.5..0.5) * h,
                vis,
            )
        })
        .collect();
    let mut p = PersonObservation::new(track_id, bbox, keypoints);
    p.interpolated = p.keypoints.iter().all(|k| k.visibility.is_none());
    p
}

/// Frames with random labels, persons and anomaly regions.
pub fn random_frames(rng: &mut ChaCha8Rng, camera: &str, n: usize) -> Vec<FrameRecord> {
    let mut frame_index = 0u64;
    (0..n)
        .map(|_| {
            frame_index += rng.random_range(1..4);
            let label = if rng.random_bool(0.2) { Label::Anomalous } else { Label::Normal };
            let mut f = FrameRecord::new(camera, frame_index, label);
            let persons = rng.random_range(0..6);
            f.persons = (0..persons)
                .map(|t| {
                    let (cx, cy) = (rng.random_range(100.0..1800.0), rng.random_range(100.0..900.0));
                    let h = rng.random_range(40.0..200.0);
                    person(t, cx, cy, h, rng)
                })
                .collect();
            if label == Label::Anomalous {
                f.anomaly_regions.push(BoundingBox::new(10.0, 20.0, 110.5, 220.25).unwrap());
            }
            f
        })
        .collect()
}

/// A standard split with `train_normals` training frames followed by a
/// shuffled test timeline. Frames carry no persons.
pub fn bare_split(camera: &str, train_normals: u64, test_normals: u64, test_anomalies: u64, rng: &mut ChaCha8Rng) -> SplitSet {
    let train = (0..train_normals).map(|i| FrameRecord::new(camera, i, Label::Normal)).collect();
    let mut labels: Vec<Label> = std::iter::repeat_n(Label::Normal, test_normals as usize)
        .chain(std::iter::repeat_n(Label::Anomalous, test_anomalies as usize))
        .collect();
    use rand::seq::SliceRandom;
    labels.shuffle(rng);
    let test = labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| FrameRecord::new(camera, train_normals + i as u64, label))
        .collect();
    SplitSet::new(
        CameraDataset::from_frames(camera, train).unwrap(),
        CameraDataset::from_frames(camera, test).unwrap(),
    )
    .unwrap()
}

/// A one-person track with the given frames; keypoint `j` of frame `f`
/// comes from `pos(f, j)` and the bbox is fixed.
pub fn track_at(frames: &[u64], pos: impl Fn(u64, usize) -> (f64, f64)) -> posevad::model::Track {
    let bbox = BoundingBox::new(0.0, 0.0, 40.0, 100.0).unwrap();
    posevad::model::Track {
        track_id: 1,
        camera_id: "C".into(),
        observations: frames
            .iter()
            .map(|&f| {
                let kps = (0..NUM_KEYPOINTS)
                    .map(|j| {
                        let (x, y) = pos(f, j);
                        Keypoint::new(x, y, Some(0.9))
                    })
                    .collect();
                (f, PersonObservation::new(1, bbox, kps))
            })
            .collect(),
    }
}

/// Per-axis straight line through two points, evaluated at `f`.
pub fn line_through(f0: u64, v0: f64, f1: u64, v1: f64, f: u64) -> f64 {
    let slope = (v1 - v0) / (f1 as f64 - f0 as f64);
    v0 + slope * (f as f64 - f0 as f64)
}

/// Draws a feasible random standard split for rearrangement.
pub fn random_rearrange_case(rng: &mut ChaCha8Rng) -> (SplitSet, posevad::rearrange::RearrangePlan) {
    let train = rng.random_range(300..3000u64);
    let anomalies = rng.random_range(10..200u64);
    let normals = anomalies + rng.random_range(0..400u64);
    let split = bare_split("R", train, normals, anomalies, rng);
    let plan = posevad::rearrange::RearrangePlan {
        seed: rng.random(),
        k: rng.random_range(1..=12),
        inject_count: if rng.random_bool(0.3) { Some(rng.random_range(0..3)) } else { None },
        ..Default::default()
    };
    (split, plan)
}

/// Checks every continual-split invariant independently of `verify`.
pub fn check_continual(
    split: &SplitSet,
    plan: &posevad::rearrange::RearrangePlan,
) -> std::result::Result<(), String> {
    use posevad::rearrange::{rearrange, verify};
    let cs = rearrange(split, plan).map_err(|e| e.to_string())?;
    verify(&cs).map_err(|e| e.to_string())?;

    // Slice partition: concatenation reproduces the stream, sizes differ by <= 1,
    // earlier slices are never smaller.
    let joined: Vec<&FrameRecord> = cs.slices().flatten().collect();
    if joined.len() != cs.train_stream.len() || joined.iter().zip(&cs.train_stream).any(|(a, b)| *a != b) {
        return Err("slices do not concatenate to the stream".into());
    }
    let sizes: Vec<usize> = cs.slices().map(|s| s.len()).collect();
    if sizes.len() != plan.k || sizes.windows(2).any(|w| w[0] < w[1] || w[0] - w[1] > 1) {
        return Err(format!("bad slice sizes {sizes:?}"));
    }

    // Anomaly cap and balance, counted directly.
    let anomalies = cs.train_stream.iter().filter(|f| f.label == Label::Anomalous).count();
    let cap = plan.target_train_anomaly_ratio * cs.train_stream.len() as f64;
    if (anomalies as f64).partial_cmp(&cap) != Some(std::cmp::Ordering::Less) {
        return Err(format!("cap: {anomalies} of {}", cs.train_stream.len()));
    }
    let (tn, ta) = cs.test.label_counts();
    if tn.abs_diff(ta) as f64 / (tn + ta) as f64 > plan.balance_tolerance {
        return Err(format!("balance: {tn}/{ta}"));
    }

    // Multiset conservation over frame identities.
    let mut before: Vec<(u64, Label)> = split
        .train
        .frames()
        .iter()
        .chain(split.test.frames())
        .map(|f| (f.frame_index, f.label))
        .collect();
    let mut after: Vec<(u64, Label)> = cs
        .train_stream
        .iter()
        .chain(cs.test.frames())
        .map(|f| (f.frame_index, f.label))
        .collect();
    before.sort();
    after.sort();
    if before != after {
        return Err("frame multiset changed".into());
    }

    // Original train normals keep their relative order at the stream head.
    let train_idx: Vec<u64> = cs
        .train_stream
        .iter()
        .map(|f| f.frame_index)
        .filter(|i| split.train.get(*i).is_some())
        .collect();
    let orig: Vec<u64> = split.train.frames().iter().map(|f| f.frame_index).collect();
    if train_idx != orig {
        return Err("original train normals reordered".into());
    }

    // Determinism.
    let again = rearrange(split, plan).map_err(|e| e.to_string())?;
    if again != cs {
        return Err("rerun differs".into());
    }
    Ok(())
}

/// Random window of `len` frames with coordinates around `offset`.
pub fn random_window(rng: &mut ChaCha8Rng, len: usize, offset: f64) -> posevad::preprocess::PoseWindow {
    let features = (0..len)
        .map(|_| std::array::from_fn(|_| [offset + rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)]))
        .collect();
    posevad::preprocess::PoseWindow {
        track_id: 0,
        camera_id: "C".into(),
        start_frame: 0,
        length: len,
        features,
        covered_frames: (0..len as u64).collect(),
    }
}

/// Whole-batch versus split-batch Gaussian fit; returns the largest mean and
/// variance deviations.
pub fn welford_trial(rng: &mut ChaCha8Rng) -> (f64, f64) {
    use posevad::scorer::GaussianScorer;
    let n = rng.random_range(4..120);
    let windows: Vec<_> = (0..n)
        .map(|_| {
            let offset = rng.random_range(-2.0..2.0);
            random_window(rng, 6, offset)
        })
        .collect();
    let mut whole = GaussianScorer::new();
    whole.fit(&windows);
    let mut parts = GaussianScorer::new();
    let mut cuts: Vec<usize> = (0..rng.random_range(1..5)).map(|_| rng.random_range(0..=n)).collect();
    cuts.push(0);
    cuts.push(n);
    cuts.sort_unstable();
    for w in cuts.windows(2) {
        parts.partial_fit(&windows[w[0]..w[1]]);
    }
    let dm = whole
        .moments
        .mean
        .iter()
        .zip(&parts.moments.mean)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let dv = whole
        .moments
        .variance()
        .iter()
        .zip(&parts.moments.variance())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    (dm, dv)
}

/// Fixed results covering both outcome kinds, used for golden reports.
pub fn golden_results() -> posevad::runner::RunResults {
    use posevad::metrics::MetricReport;
    use posevad::runner::{summarize, CameraResult, ContinualResult, Outcome, RunConfig};
    let m = |auc_roc, auc_pr, eer, ten_er| MetricReport {
        auc_roc,
        auc_pr,
        eer,
        ten_er,
        n_pos: 26052,
        n_neg: 26093,
    };
    let per_step = vec![
        m(0.5421, 0.5377, 0.4712, 0.8934),
        m(0.5986, 0.6012, 0.4233, 0.8511),
        m(0.6130, 0.6243, 0.4101, 0.8302),
        m(0.6072, 0.6198, 0.4150, 0.8420),
        m(0.6315, 0.6402, 0.3987, 0.8245),
        m(0.6250, 0.6371, 0.4012, 0.8199),
        m(0.6404, 0.6488, 0.3899, 0.8123),
        m(0.6388, 0.6501, 0.3921, 0.8150),
        m(0.6457, 0.6533, 0.3876, 0.8102),
    ];
    let (ucal_average, ucal_best) = summarize(&per_step).unwrap();
    posevad::runner::RunResults {
        config: RunConfig::default(),
        cameras: vec![
            CameraResult {
                camera_id: "C0".into(),
                outcome: Outcome::Continual {
                    result: ContinualResult {
                        camera_id: "C0".into(),
                        baseline: m(0.5012, 0.4987, 0.4990, 0.9001),
                        per_step,
                        ucal_average,
                        ucal_best,
                        normal_training: m(0.6601, 0.6677, 0.3799, 0.7988),
                        pretrain_windows: 1000,
                        step_windows: vec![10; 9],
                        windows_seen: (1..=9).map(|i| 1000 + 10 * i).collect(),
                    },
                },
            },
            CameraResult {
                camera_id: "C1".into(),
                outcome: Outcome::Standard {
                    report: MetricReport {
                        auc_roc: 0.7957,
                        auc_pr: 0.8123,
                        eer: 0.2841,
                        ten_er: 0.6016,
                        n_pos: 500,
                        n_neg: 2500,
                    },
                },
            },
        ],
    }
}

/// Compares `actual` with the golden file `name`; `UPDATE_GOLDEN=1`
/// rewrites the file instead.
pub fn golden_matches(name: &str, actual: &str) -> bool {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return true;
    }
    std::fs::read_to_string(&path).map(|g| g == actual).unwrap_or(false)
}
