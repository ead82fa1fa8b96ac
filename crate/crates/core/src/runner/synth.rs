//! Seeded synthetic pose datasets for desk-scale validation.
//!
//! Normal people walk back and forth with a periodic limb swing plus
//! per-keypoint jitter. Anomalous events add a separate actor, present
//! only in the event's frames, who flails (velocity spike), freezes, or
//! collapses. All randomness comes from one ChaCha8 stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    BoundingBox, CameraDataset, FrameRecord, Keypoint, Label, PersonObservation, SplitSet,
    NUM_KEYPOINTS,
};

/// Standing pose relative to the bbox center, in units of body height.
const TEMPLATE: [[f64; 2]; NUM_KEYPOINTS] = [
    [0.0, -0.42],
    [-0.02, -0.44],
    [0.02, -0.44],
    [-0.04, -0.43],
    [0.04, -0.43],
    [-0.10, -0.30],
    [0.10, -0.30],
    [-0.13, -0.15],
    [0.13, -0.15],
    [-0.14, 0.00],
    [0.14, 0.00],
    [-0.07, 0.02],
    [0.07, 0.02],
    [-0.07, 0.22],
    [0.07, 0.22],
    [-0.07, 0.42],
    [0.07, 0.42],
];

/// Horizontal swing weight per joint: arms counter-phase to legs.
const SWING: [f64; NUM_KEYPOINTS] = [
    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, -0.5, 1.0, -1.0, 0.0, 0.0, -0.5, 0.5, -1.0, 1.0,
];

/// Whole-body swing: every joint at full weight, left and right opposed.
const FLAIL: [f64; NUM_KEYPOINTS] = [
    1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0,
];

const SCENE_WIDTH: f64 = 1920.0;

/// How a population of people moves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionProfile {
    /// Limb swing amplitude, as a fraction of body height.
    pub swing_amplitude: f64,
    /// Swing period in frames.
    pub swing_period: f64,
    /// Per-keypoint Gaussian jitter, as a fraction of body height.
    pub jitter: f64,
    /// Vertical offset applied to elbows and wrists (negative raises arms).
    pub arm_offset: f64,
    /// Swing every joint at full weight instead of only the limbs.
    #[serde(default)]
    pub whole_body: bool,
}

impl MotionProfile {
    pub fn walking() -> Self {
        Self {
            swing_amplitude: 0.04,
            swing_period: 30.0,
            jitter: 0.004,
            arm_offset: 0.0,
            whole_body: false,
        }
    }

    /// Flailing: every joint swings with `intensity` times the largest limb
    /// amplitude, and jitter grows by the same factor. The period is kept,
    /// so temporal smoothing attenuates both profiles equally and each
    /// joint's displacement is at least `intensity` times a walker's.
    pub fn agitated(&self, intensity: f64) -> Self {
        Self {
            swing_amplitude: self.swing_amplitude * intensity,
            swing_period: self.swing_period,
            jitter: self.jitter * intensity,
            arm_offset: self.arm_offset,
            whole_body: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyKind {
    VelocitySpike,
    Frozen,
    LimbCollapse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub camera_id: String,
    pub normal_frames: usize,
    pub anomalous_frames: usize,
    /// Share of the normal frames placed in the training split.
    pub train_fraction: f64,
    pub persons_per_frame: usize,
    pub anomaly_kinds: Vec<AnomalyKind>,
    /// Motion scale of velocity-spike actors relative to normal people.
    pub intensity: f64,
    /// Probability of a missed detection per person and frame.
    pub dropout: f64,
    pub profile: MotionProfile,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            camera_id: "SYN".into(),
            normal_frames: 5000,
            anomalous_frames: 500,
            train_fraction: 0.5,
            persons_per_frame: 3,
            anomaly_kinds: vec![AnomalyKind::VelocitySpike],
            intensity: 3.0,
            dropout: 0.01,
            profile: MotionProfile::walking(),
            seed: 0,
        }
    }
}

/// One person's motion state.
struct Walker {
    track_id: u64,
    height: f64,
    cx: f64,
    cy: f64,
    speed: f64,
    phase: f64,
    remaining: usize,
    shape: [[f64; 2]; NUM_KEYPOINTS],
}

impl Walker {
    fn spawn(rng: &mut ChaCha8Rng, track_id: u64) -> Self {
        let mut shape = TEMPLATE;
        for p in shape.iter_mut() {
            p[0] += rng.random_range(-0.01..0.01);
            p[1] += rng.random_range(-0.01..0.01);
        }
        let dir = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        Self {
            track_id,
            height: rng.random_range(120.0..180.0),
            cx: rng.random_range(150.0..SCENE_WIDTH - 150.0),
            cy: rng.random_range(200.0..880.0),
            speed: dir * rng.random_range(0.5..2.0),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
            remaining: rng.random_range(150..400),
            shape,
        }
    }

    fn advance(&mut self) {
        self.cx += self.speed;
        if self.cx < 100.0 || self.cx > SCENE_WIDTH - 100.0 {
            self.speed = -self.speed;
            self.cx = self.cx.clamp(100.0, SCENE_WIDTH - 100.0);
        }
        self.remaining = self.remaining.saturating_sub(1);
    }

    fn bbox(&self) -> BoundingBox {
        let h = self.height;
        BoundingBox {
            x1: self.cx - 0.2 * h,
            y1: self.cy - 0.5 * h,
            x2: self.cx + 0.2 * h,
            y2: self.cy + 0.5 * h,
        }
    }

    fn observe(
        &self,
        t: f64,
        profile: &MotionProfile,
        pose: PoseKind,
        rng: &mut ChaCha8Rng,
        noise: &Normal<f64>,
    ) -> PersonObservation {
        let h = self.height;
        let swing = profile.swing_amplitude
            * (std::f64::consts::TAU * t / profile.swing_period + self.phase).sin();
        let weights = if profile.whole_body { &FLAIL } else { &SWING };
        let keypoints = (0..NUM_KEYPOINTS)
            .map(|j| {
                let [mut x, mut y] = self.shape[j];
                match pose {
                    PoseKind::Moving => {
                        x += weights[j] * swing;
                        if (7..=10).contains(&j) {
                            y += profile.arm_offset;
                        }
                        x += profile.jitter * noise.sample(rng);
                        y += profile.jitter * noise.sample(rng);
                    }
                    PoseKind::Still => {}
                    PoseKind::Collapsed => {
                        // Lying down: the body axis turns horizontal near the floor.
                        let (bx, by) = (x, y);
                        x = by * 0.9;
                        y = 0.4 - bx.abs() * 0.5;
                        x += profile.jitter * noise.sample(rng);
                        y += profile.jitter * noise.sample(rng);
                    }
                }
                let vis = rng.random_range(0.5..1.0);
                Keypoint::new(self.cx + x * h, self.cy + y * h, Some(vis))
            })
            .collect();
        PersonObservation::new(self.track_id, self.bbox(), keypoints)
    }
}

#[derive(Clone, Copy)]
enum PoseKind {
    Moving,
    Still,
    Collapsed,
}

struct Scene {
    rng: ChaCha8Rng,
    noise: Normal<f64>,
    next_track: u64,
    slots: Vec<Walker>,
}

impl Scene {
    fn new(seed: u64, persons: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slots = (0..persons as u64).map(|id| Walker::spawn(&mut rng, id)).collect();
        Self {
            rng,
            noise: Normal::new(0.0, 1.0).expect("unit normal"),
            next_track: persons as u64,
            slots,
        }
    }

    fn new_track_id(&mut self) -> u64 {
        let id = self.next_track;
        self.next_track += 1;
        id
    }

    fn normal_persons(&mut self, t: f64, profile: &MotionProfile, dropout: f64) -> Vec<PersonObservation> {
        let mut out = Vec::with_capacity(self.slots.len());
        for i in 0..self.slots.len() {
            if self.slots[i].remaining == 0 {
                let id = self.new_track_id();
                self.slots[i] = Walker::spawn(&mut self.rng, id);
            }
            let w = &self.slots[i];
            let obs = w.observe(t, profile, PoseKind::Moving, &mut self.rng, &self.noise);
            if !self.rng.random_bool(dropout) {
                out.push(obs);
            }
            self.slots[i].advance();
        }
        out
    }
}

fn check_spec(spec: &SynthSpec) -> Result<()> {
    if spec.normal_frames == 0 {
        return Err(Error::InvalidInput("synthetic dataset needs at least one normal frame".into()));
    }
    if !(0.0..1.0).contains(&spec.train_fraction) {
        return Err(Error::InvalidInput("train_fraction must lie in [0,1)".into()));
    }
    if !(0.0..1.0).contains(&spec.dropout) {
        return Err(Error::InvalidInput("dropout must lie in [0,1)".into()));
    }
    if spec.anomalous_frames > 0 && spec.anomaly_kinds.is_empty() {
        return Err(Error::InvalidInput("anomalous frames requested without anomaly kinds".into()));
    }
    if !(spec.intensity.is_finite() && spec.intensity > 0.0) {
        return Err(Error::InvalidInput("intensity must be positive".into()));
    }
    Ok(())
}

/// Splits `total` anomalous frames into events of 36..=60 frames
/// (shorter only when fewer frames remain in total).
fn event_lengths(rng: &mut ChaCha8Rng, total: usize) -> Vec<usize> {
    const MIN: usize = 36;
    let mut out = Vec::new();
    let mut remaining = total;
    while remaining > 0 {
        let mut len = 36 + 6 * rng.random_range(0..5usize);
        if len > remaining || remaining - len < MIN {
            len = remaining;
        }
        out.push(len);
        remaining -= len;
    }
    out
}

/// Generates a standard split: normal-only training frames followed by a
/// test timeline with interleaved anomalous events. Label counts are exact.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<SplitSet> {
    check_spec(spec)?;
    let mut scene = Scene::new(spec.seed, spec.persons_per_frame);
    let train_normals = (spec.normal_frames as f64 * spec.train_fraction).round() as usize;
    let test_normals = spec.normal_frames - train_normals;

    let events = event_lengths(&mut scene.rng, spec.anomalous_frames);
    // Event i starts after `cuts[i]` test normals.
    let mut cuts: Vec<usize> = (0..events.len())
        .map(|_| scene.rng.random_range(0..=test_normals))
        .collect();
    cuts.sort_unstable();

    let mut train = Vec::with_capacity(train_normals);
    let mut test = Vec::with_capacity(test_normals + spec.anomalous_frames);
    let mut frame_index = 0u64;
    let emit_normal = |scene: &mut Scene, frame_index: &mut u64| {
        let mut f = FrameRecord::new(spec.camera_id.clone(), *frame_index, Label::Normal);
        f.persons = scene.normal_persons(*frame_index as f64, &spec.profile, spec.dropout);
        *frame_index += 1;
        f
    };

    for _ in 0..train_normals {
        train.push(emit_normal(&mut scene, &mut frame_index));
    }
    let mut normals_done = 0;
    for (event_no, (&len, &cut)) in events.iter().zip(&cuts).enumerate() {
        while normals_done < cut {
            test.push(emit_normal(&mut scene, &mut frame_index));
            normals_done += 1;
        }
        let kind = spec.anomaly_kinds[event_no % spec.anomaly_kinds.len()];
        let actor_id = scene.new_track_id();
        let mut actor = Walker::spawn(&mut scene.rng, actor_id);
        let agitated = spec.profile.agitated(spec.intensity);
        for _ in 0..len {
            let t = frame_index as f64;
            let mut persons = scene.normal_persons(t, &spec.profile, spec.dropout);
            let obs = match kind {
                AnomalyKind::VelocitySpike => {
                    let o = actor.observe(t, &agitated, PoseKind::Moving, &mut scene.rng, &scene.noise);
                    actor.advance();
                    o
                }
                AnomalyKind::Frozen => actor.observe(t, &spec.profile, PoseKind::Still, &mut scene.rng, &scene.noise),
                AnomalyKind::LimbCollapse => {
                    actor.observe(t, &spec.profile, PoseKind::Collapsed, &mut scene.rng, &scene.noise)
                }
            };
            let mut f = FrameRecord::new(spec.camera_id.clone(), frame_index, Label::Anomalous);
            f.anomaly_regions.push(obs.bbox);
            persons.push(obs);
            f.persons = persons;
            test.push(f);
            frame_index += 1;
        }
    }
    while normals_done < test_normals {
        test.push(emit_normal(&mut scene, &mut frame_index));
        normals_done += 1;
    }

    SplitSet::new(
        CameraDataset::from_frames(spec.camera_id.clone(), train)?,
        CameraDataset::from_frames(spec.camera_id.clone(), test)?,
    )
}

/// Normal-only footage from another environment, used for pretraining.
pub fn generate_origin(camera_id: &str, frames: usize, persons: usize, profile: &MotionProfile, seed: u64) -> Result<CameraDataset> {
    if frames == 0 {
        return Err(Error::InvalidInput("origin dataset needs at least one frame".into()));
    }
    let mut scene = Scene::new(seed, persons);
    let out = (0..frames as u64)
        .map(|i| {
            let mut f = FrameRecord::new(camera_id, i, Label::Normal);
            f.persons = scene.normal_persons(i as f64, profile, 0.0);
            f
        })
        .collect();
    CameraDataset::from_frames(camera_id, out)
}

/// A pretraining source whose normal motion resembles the target camera's
/// anomalies, so a scorer trained only on it ranks target frames badly.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftScenario {
    pub origin: CameraDataset,
    pub target: SplitSet,
}

pub fn generate_shift_scenario(target: &SynthSpec, origin_frames: usize) -> Result<ShiftScenario> {
    let split = generate_synthetic(target)?;
    let mut origin_profile = target.profile.agitated(target.intensity);
    origin_profile.arm_offset = -0.05;
    let origin = generate_origin(
        "ORIGIN",
        origin_frames,
        target.persons_per_frame,
        &origin_profile,
        target.seed ^ 0x9e37_79b9_7f4a_7c15,
    )?;
    Ok(ShiftScenario { origin, target: split })
}
