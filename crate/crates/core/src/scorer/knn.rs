//! k-nearest-neighbor scorer over flattened normalized windows, with a
//! bounded reservoir of stored vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::PoseWindow;

pub const DEFAULT_CAPACITY: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnScorer {
    pub k_nn: usize,
    pub capacity: usize,
    pub seed: u64,
    /// Vectors offered to the reservoir so far.
    pub seen: u64,
    pub stored: Vec<Vec<f64>>,
    #[serde(with = "rng_state")]
    rng: ChaCha8Rng,
}

/// ChaCha state as seed bytes, stream id and a 128-bit word position split
/// into two halves (JSON has no lossless 128-bit integers).
mod rng_state {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct State {
        seed: [u8; 32],
        stream: u64,
        word_pos_hi: u64,
        word_pos_lo: u64,
    }

    pub fn serialize<S: Serializer>(rng: &ChaCha8Rng, s: S) -> Result<S::Ok, S::Error> {
        let pos = rng.get_word_pos();
        State {
            seed: rng.get_seed(),
            stream: rng.get_stream(),
            word_pos_hi: (pos >> 64) as u64,
            word_pos_lo: pos as u64,
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ChaCha8Rng, D::Error> {
        let st = State::deserialize(d)?;
        let mut rng = ChaCha8Rng::from_seed(st.seed);
        rng.set_stream(st.stream);
        rng.set_word_pos(((st.word_pos_hi as u128) << 64) | st.word_pos_lo as u128);
        Ok(rng)
    }
}

impl KnnScorer {
    pub fn new(k_nn: usize, capacity: usize, seed: u64) -> Result<Self> {
        if k_nn == 0 {
            return Err(Error::Config("k_nn must be at least 1".into()));
        }
        if capacity == 0 {
            return Err(Error::Config("reservoir capacity must be at least 1".into()));
        }
        Ok(Self {
            k_nn,
            capacity,
            seed,
            seen: 0,
            stored: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn windows_seen(&self) -> u64 {
        self.seen
    }

    /// Clears the reservoir and reseeds before ingesting `windows`.
    pub fn fit(&mut self, windows: &[PoseWindow]) {
        self.seen = 0;
        self.stored.clear();
        self.rng = ChaCha8Rng::seed_from_u64(self.seed);
        self.partial_fit(windows);
    }

    pub fn partial_fit(&mut self, windows: &[PoseWindow]) {
        for w in windows {
            self.offer(w.flatten());
        }
    }

    /// Reservoir sampling (Algorithm R).
    pub fn offer(&mut self, v: Vec<f64>) {
        self.seen += 1;
        if self.stored.len() < self.capacity {
            self.stored.push(v);
        } else {
            let j = self.rng.random_range(0..self.seen);
            if (j as usize) < self.capacity {
                self.stored[j as usize] = v;
            }
        }
    }

    pub fn score(&self, window: &PoseWindow) -> Result<f64> {
        self.score_vector(&window.flatten())
    }

    /// Mean Euclidean distance to the `k_nn` closest stored vectors.
    pub fn score_vector(&self, q: &[f64]) -> Result<f64> {
        if self.stored.len() < self.k_nn {
            return Err(Error::Scorer(format!(
                "knn scorer needs {} stored vectors, has {}",
                self.k_nn,
                self.stored.len()
            )));
        }
        let mut dists: Vec<f64> = self
            .stored
            .iter()
            .map(|s| {
                if s.len() != q.len() {
                    return f64::INFINITY;
                }
                s.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
            })
            .collect();
        let k = self.k_nn;
        dists.select_nth_unstable_by(k - 1, f64::total_cmp);
        let nearest = &dists[..k];
        if nearest.iter().any(|d| d.is_infinite()) {
            return Err(Error::Scorer("query dimension does not match stored vectors".into()));
        }
        Ok(nearest.iter().sum::<f64>() / k as f64)
    }
}
