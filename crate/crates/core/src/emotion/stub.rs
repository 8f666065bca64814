use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{
    BackendKind, Emotion, EmotionBackend, EmotionError, EmotionVector, FaceAnnotation, Gender,
};
use crate::corpus::PaintingRecord;

/// Relative weights of 0, 1, 2, 3 and 4 faces per painting.
const FACE_COUNT_WEIGHTS: [u32; 5] = [30, 30, 20, 12, 8];

/// Offline backend. Identical `(seed, painting id)` pairs always produce
/// identical annotations; the painting id is the record's dedup key.
#[derive(Debug, Clone, Copy)]
pub struct StubBackend {
    pub seed: u64,
}

impl EmotionBackend for StubBackend {
    fn kind(&self) -> BackendKind {
        BackendKind::Stub
    }

    fn annotate(&self, record: &PaintingRecord) -> Result<Vec<FaceAnnotation>, EmotionError> {
        Ok(stub_annotate(self.seed, &record.dedup_key()))
    }
}

fn rng_for(seed: u64, painting_id: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(painting_id.as_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// Deterministic pseudo-random faces: 0 to 4 per painting, each with a random
/// gender and eight coefficients normalised to sum to one.
pub fn stub_annotate(seed: u64, painting_id: &str) -> Vec<FaceAnnotation> {
    let mut rng = rng_for(seed, painting_id);
    let total: u32 = FACE_COUNT_WEIGHTS.iter().sum();
    let mut pick = rng.gen_range(0..total);
    let mut count = 0;
    for (n, w) in FACE_COUNT_WEIGHTS.iter().enumerate() {
        if pick < *w {
            count = n;
            break;
        }
        pick -= w;
    }

    (0..count)
        .map(|_| {
            let gender = if rng.gen_bool(0.5) {
                Gender::Female
            } else {
                Gender::Male
            };
            // Unit-rate exponential draws normalise to a flat Dirichlet sample.
            let raw: [f64; 8] = std::array::from_fn(|_| -(1.0 - rng.gen::<f64>()).ln() + 1e-12);
            let sum: f64 = raw.iter().sum();
            let mut emotions = EmotionVector::default();
            for (e, v) in Emotion::ALL.iter().zip(raw) {
                emotions.set(*e, v / sum);
            }
            FaceAnnotation { gender, emotions }
        })
        .collect()
}
