//! Continual data rearrangement.
//!
//! Starting from a standard split (normal-only training frames, mixed test
//! frames), a small number of test anomalies are injected into an unlabeled
//! training stream, the remaining test set is balanced to roughly one normal
//! frame per anomalous frame, and surplus test normals are appended to the
//! stream. The stream is then cut into `k` contiguous slices, one per
//! continual training step.
//!
//! The published algorithm names the final stream "train normal" even though
//! it carries the injected anomalies; here the whole stream is
//! [`ContinualSplit::train_stream`].
//!
//! All sampling uses ChaCha8 seeded from [`RearrangePlan::seed`], so a plan
//! reproduces the same split on every platform.

use std::collections::BTreeSet;
use std::io::Write;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CameraDataset, FrameRecord, Label, SplitSet};
use crate::stats::{stats_for_frames, DatasetStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RearrangePlan {
    pub seed: u64,
    /// Number of test anomalies moved into the training stream. When absent,
    /// the largest count that keeps the stream under the anomaly cap is used.
    pub inject_count: Option<usize>,
    /// Number of test normals kept in the test set. Defaults to the number of
    /// remaining test anomalies (exact 1:1); an explicit count must stay
    /// within `balance_tolerance`.
    pub test_normal_count: Option<usize>,
    /// Strict upper bound on the training stream's anomalous share.
    pub target_train_anomaly_ratio: f64,
    pub k: usize,
    /// Maximum `|normals - anomalies| / |test|`.
    pub balance_tolerance: f64,
}

impl Default for RearrangePlan {
    fn default() -> Self {
        Self {
            seed: 0,
            inject_count: None,
            test_normal_count: None,
            target_train_anomaly_ratio: 0.01,
            k: 9,
            balance_tolerance: 0.002,
        }
    }
}

impl RearrangePlan {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("slice count k must be at least 1".into()));
        }
        if !(self.target_train_anomaly_ratio > 0.0 && self.target_train_anomaly_ratio < 1.0) {
            return Err(Error::Config(format!(
                "target_train_anomaly_ratio {} outside (0,1)",
                self.target_train_anomaly_ratio
            )));
        }
        if !(self.balance_tolerance >= 0.0 && self.balance_tolerance.is_finite()) {
            return Err(Error::Config("balance_tolerance must be a non-negative number".into()));
        }
        Ok(())
    }
}

/// Where a frame of the rearranged split came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    OrigTrainNormal,
    MovedTestNormal,
    InjectedAnomaly,
    TestNormal,
    TestAnomaly,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::OrigTrainNormal => "orig_train_normal",
            Origin::MovedTestNormal => "moved_test_normal",
            Origin::InjectedAnomaly => "injected_anomaly",
            Origin::TestNormal => "test_normal",
            Origin::TestAnomaly => "test_anomaly",
        }
    }

    pub fn is_train(self) -> bool {
        matches!(
            self,
            Origin::OrigTrainNormal | Origin::MovedTestNormal | Origin::InjectedAnomaly
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceEntry {
    pub frame_index: u64,
    pub origin: Origin,
    /// 1-based slice number for training frames.
    pub slice: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinualSplit {
    pub camera_id: String,
    pub plan: RearrangePlan,
    pub train_stream: Vec<FrameRecord>,
    /// Slice `i` is `train_stream[slice_bounds[i].clone()]`.
    pub slice_bounds: Vec<std::ops::Range<usize>>,
    pub test: CameraDataset,
    /// Stream entries first (stream order), then test entries (index order).
    pub provenance: Vec<ProvenanceEntry>,
}

impl ContinualSplit {
    pub fn slices(&self) -> impl Iterator<Item = &[FrameRecord]> + '_ {
        self.slice_bounds.iter().map(|r| &self.train_stream[r.clone()])
    }

    pub fn slice(&self, i: usize) -> &[FrameRecord] {
        &self.train_stream[self.slice_bounds[i].clone()]
    }

    pub fn train_anomaly_count(&self) -> usize {
        self.train_stream.iter().filter(|f| f.label.is_anomalous()).count()
    }

    /// Writes `frame_index,origin,slice` rows.
    pub fn write_provenance_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let to_err = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
        w.write_record(["frame_index", "origin", "slice"]).map_err(to_err)?;
        for p in &self.provenance {
            w.write_record([
                p.frame_index.to_string(),
                p.origin.as_str().to_string(),
                p.slice.map(|s| s.to_string()).unwrap_or_default(),
            ])
            .map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::InvalidInput(format!("csv: {e}")))
    }
}

/// Contiguous, order-preserving partition of `len` items into `k` slices
/// whose sizes differ by at most one; earlier slices take the remainder.
pub fn slice_bounds(len: usize, k: usize) -> Result<Vec<std::ops::Range<usize>>> {
    if k == 0 {
        return Err(Error::InvalidInput("slice count must be at least 1".into()));
    }
    if len < k {
        return Err(Error::InvalidInput(format!(
            "cannot cut {len} items into {k} non-empty slices"
        )));
    }
    let (base, rem) = (len / k, len % k);
    let mut bounds = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let size = base + usize::from(i < rem);
        bounds.push(start..start + size);
        start += size;
    }
    Ok(bounds)
}

/// Cuts `stream` into `k` slices; see [`slice_bounds`].
pub fn slice_stream<T>(stream: &[T], k: usize) -> Result<Vec<&[T]>> {
    Ok(slice_bounds(stream.len(), k)?
        .into_iter()
        .map(|r| &stream[r])
        .collect())
}

struct Sizes {
    train_normals: usize,
    test_normals: usize,
    test_anomalies: usize,
}

impl Sizes {
    fn kept_test_normals(&self, inject: usize, explicit: Option<usize>) -> usize {
        explicit.unwrap_or(self.test_anomalies - inject)
    }

    fn stream_len(&self, inject: usize, explicit: Option<usize>) -> usize {
        self.train_normals + self.test_normals - self.kept_test_normals(inject, explicit) + inject
    }

    fn under_cap(&self, inject: usize, explicit: Option<usize>, ratio: f64) -> bool {
        let len = self.stream_len(inject, explicit);
        len > 0 && (inject as f64) < ratio * len as f64
    }
}

/// Largest injection count keeping the stream under the cap while the test
/// side stays balanceable.
fn auto_inject_count(sizes: &Sizes, plan: &RearrangePlan) -> Result<usize> {
    if sizes.test_anomalies == 0 {
        return Err(Error::Rearrange("test set has no anomalies".into()));
    }
    let hi_bound = sizes.test_anomalies - 1;
    let lo = match plan.test_normal_count {
        Some(_) => 0,
        None => sizes.test_anomalies.saturating_sub(sizes.test_normals),
    };
    let ratio = plan.target_train_anomaly_ratio;
    if lo > hi_bound || !sizes.under_cap(lo, plan.test_normal_count, ratio) {
        return Err(Error::Rearrange(
            "no injection count satisfies the anomaly cap with a balanceable test set".into(),
        ));
    }
    // inject / stream_len(inject) is increasing in inject: binary search.
    let (mut ok, mut bad) = (lo, hi_bound + 1);
    while bad - ok > 1 {
        let mid = ok + (bad - ok) / 2;
        if sizes.under_cap(mid, plan.test_normal_count, ratio) {
            ok = mid;
        } else {
            bad = mid;
        }
    }
    Ok(ok)
}

/// Rearranges a standard split into a continual one.
pub fn rearrange(split: &SplitSet, plan: &RearrangePlan) -> Result<ContinualSplit> {
    plan.validate()?;
    if let Some(f) = split.train.frames().iter().find(|f| f.label.is_anomalous()) {
        return Err(Error::Rearrange(format!(
            "training frame {} is anomalous; expected a normal-only training set",
            f.frame_index
        )));
    }
    let (test_normals, test_anomalies): (Vec<&FrameRecord>, Vec<&FrameRecord>) =
        split.test.frames().iter().partition(|f| f.label == Label::Normal);
    let sizes = Sizes {
        train_normals: split.train.len(),
        test_normals: test_normals.len(),
        test_anomalies: test_anomalies.len(),
    };

    let inject = match plan.inject_count {
        Some(c) => c,
        None => auto_inject_count(&sizes, plan)?,
    };
    if inject >= sizes.test_anomalies {
        return Err(Error::Rearrange(format!(
            "inject_count {inject} leaves no test anomalies (only {} available)",
            sizes.test_anomalies
        )));
    }
    let kept_anomalies = sizes.test_anomalies - inject;
    let kept_normals = sizes.kept_test_normals(inject, plan.test_normal_count);
    if kept_normals > sizes.test_normals {
        return Err(Error::Rearrange(format!(
            "balancing needs {kept_normals} test normals but only {} exist",
            sizes.test_normals
        )));
    }
    if kept_normals == 0 {
        return Err(Error::Rearrange("balanced test set would have no normal frames".into()));
    }
    let test_total = kept_normals + kept_anomalies;
    let imbalance = kept_normals.abs_diff(kept_anomalies) as f64 / test_total as f64;
    if imbalance > plan.balance_tolerance {
        return Err(Error::Rearrange(format!(
            "test imbalance {imbalance:.6} exceeds tolerance {}",
            plan.balance_tolerance
        )));
    }
    let stream_len = sizes.stream_len(inject, plan.test_normal_count);
    if !below(inject as f64, plan.target_train_anomaly_ratio * stream_len as f64) {
        return Err(Error::Rearrange(format!(
            "injecting {inject} anomalies into a {stream_len}-frame stream breaks the {} cap",
            plan.target_train_anomaly_ratio
        )));
    }
    if stream_len < plan.k {
        return Err(Error::Rearrange(format!(
            "stream of {stream_len} frames is shorter than k = {}",
            plan.k
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);

    // Anomalies moved to the stream, kept in temporal order.
    let mut injected_idx = index::sample(&mut rng, sizes.test_anomalies, inject).into_vec();
    injected_idx.sort_unstable();
    let injected_set: BTreeSet<usize> = injected_idx.iter().copied().collect();

    let mut kept_normal_idx = index::sample(&mut rng, sizes.test_normals, kept_normals).into_vec();
    kept_normal_idx.sort_unstable();
    let kept_normal_set: BTreeSet<usize> = kept_normal_idx.iter().copied().collect();

    let mut normals_stream: Vec<(&FrameRecord, Origin)> = split
        .train
        .frames()
        .iter()
        .map(|f| (f, Origin::OrigTrainNormal))
        .collect();
    normals_stream.extend(
        test_normals
            .iter()
            .enumerate()
            .filter(|(i, _)| !kept_normal_set.contains(i))
            .map(|(_, f)| (*f, Origin::MovedTestNormal)),
    );

    let mut positions = index::sample(&mut rng, stream_len, inject).into_vec();
    positions.sort_unstable();
    let position_set: BTreeSet<usize> = positions.into_iter().collect();

    let mut stream: Vec<(&FrameRecord, Origin)> = Vec::with_capacity(stream_len);
    let mut normals = normals_stream.into_iter();
    let mut anomalies = injected_idx.iter().map(|&i| test_anomalies[i]);
    for pos in 0..stream_len {
        if position_set.contains(&pos) {
            stream.push((anomalies.next().expect("anomaly count"), Origin::InjectedAnomaly));
        } else {
            stream.push(normals.next().expect("normal count"));
        }
    }
    debug_assert!(normals.next().is_none() && anomalies.next().is_none());

    let bounds = slice_bounds(stream_len, plan.k)?;
    let mut provenance = Vec::with_capacity(stream_len + test_total);
    for (slice_no, range) in bounds.iter().enumerate() {
        for (f, origin) in &stream[range.clone()] {
            provenance.push(ProvenanceEntry {
                frame_index: f.frame_index,
                origin: *origin,
                slice: Some(slice_no + 1),
            });
        }
    }

    let mut kept: Vec<&FrameRecord> = kept_normal_idx.iter().map(|&i| test_normals[i]).collect();
    kept.extend(
        test_anomalies
            .iter()
            .enumerate()
            .filter(|(i, _)| !injected_set.contains(i))
            .map(|(_, f)| *f),
    );
    let test = CameraDataset::from_frames(
        split.test.camera_id.clone(),
        kept.into_iter().cloned().collect(),
    )?;
    provenance.extend(test.frames().iter().map(|f| ProvenanceEntry {
        frame_index: f.frame_index,
        origin: if f.label.is_anomalous() {
            Origin::TestAnomaly
        } else {
            Origin::TestNormal
        },
        slice: None,
    }));

    Ok(ContinualSplit {
        camera_id: split.train.camera_id.clone(),
        plan: RearrangePlan {
            inject_count: Some(inject),
            ..plan.clone()
        },
        train_stream: stream.into_iter().map(|(f, _)| f.clone()).collect(),
        slice_bounds: bounds,
        test,
        provenance,
    })
}

/// `a < b`; false when either side is NaN.
fn below(a: f64, b: f64) -> bool {
    a < b
}

/// Recomputes train/test statistics and checks every continual-split
/// invariant, naming the first one violated.
pub fn verify(cs: &ContinualSplit) -> Result<(DatasetStats, DatasetStats)> {
    let k = cs.slice_bounds.len();
    if k != cs.plan.k {
        return Err(Error::Invariant(format!(
            "slice partition: {k} slices but plan asks for {}",
            cs.plan.k
        )));
    }
    let mut expected = 0;
    for r in &cs.slice_bounds {
        if r.start != expected || r.end < r.start {
            return Err(Error::Invariant("slice partition: slices are not contiguous".into()));
        }
        expected = r.end;
    }
    if expected != cs.train_stream.len() {
        return Err(Error::Invariant(
            "slice partition: slices do not cover the training stream".into(),
        ));
    }

    let mut train_idx = BTreeSet::new();
    for f in &cs.train_stream {
        if !train_idx.insert(f.frame_index) {
            return Err(Error::Invariant(format!(
                "disjointness: frame {} appears twice in the training stream",
                f.frame_index
            )));
        }
    }
    if let Some(f) = cs.test.frames().iter().find(|f| train_idx.contains(&f.frame_index)) {
        return Err(Error::Invariant(format!(
            "disjointness: frame {} is in both the training stream and the test set",
            f.frame_index
        )));
    }

    let train = stats_for_frames(&cs.camera_id, &cs.train_stream)?;
    if !below(train.anomaly_fraction, cs.plan.target_train_anomaly_ratio) {
        return Err(Error::Invariant(format!(
            "anomaly cap: training stream is {:.4}% anomalous (cap {}%)",
            train.anomaly_percentage(),
            cs.plan.target_train_anomaly_ratio * 100.0
        )));
    }

    let test = stats_for_frames(&cs.camera_id, cs.test.frames())?;
    let imbalance = test.normal_frame_count().abs_diff(test.anomaly_frame_count) as f64
        / test.frame_count as f64;
    if imbalance > cs.plan.balance_tolerance {
        return Err(Error::Invariant(format!(
            "balance: test imbalance {imbalance:.6} exceeds {}",
            cs.plan.balance_tolerance
        )));
    }
    if test.anomaly_frame_count == 0 || test.normal_frame_count() == 0 {
        return Err(Error::Invariant("balance: test set lacks one of the labels".into()));
    }
    Ok((train, test))
}
