//! Per-face gender and emotion annotation.
//!
//! A backend turns a painting into zero or more [`FaceAnnotation`]s. Two
//! backends exist: [`RemoteBackend`] speaks the Face-API style JSON contract
//! over HTTP, [`StubBackend`] derives annotations deterministically from a
//! seed and the painting id so the pipeline runs offline.

mod remote;
mod stub;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::PaintingRecord;

pub use remote::{
    HttpReply, RemoteBackend, RemoteConfig, ReqwestTransport, Transport, TransportError,
};
pub use stub::{stub_annotate, StubBackend};

#[derive(Debug, thiserror::Error)]
pub enum EmotionError {
    #[error("missing emotion key: {0}")]
    MissingEmotionKey(&'static str),
    #[error("emotion coefficient out of range: {key} = {value}")]
    CoefficientOutOfRange { key: &'static str, value: f64 },
    #[error("malformed face response: {0}")]
    Schema(String),
    #[error("http status {status} (not retryable)")]
    Rejected { status: u16, body: String },
    #[error("request failed after {attempts} attempts (last status: {})", status.map(|s| s.to_string()).unwrap_or_else(|| "none".into()))]
    RetriesExhausted {
        attempts: u32,
        status: Option<u16>,
        message: String,
    },
    #[error("painting has no usable url: {0}")]
    MissingUrl(String),
}

impl EmotionError {
    /// True for failures worth retrying at a later run (transport or rate limit).
    pub fn is_retryable(&self) -> bool {
        matches!(self, EmotionError::RetriesExhausted { .. })
    }

    pub fn http_status(&self) -> Option<u16> {
        match self {
            EmotionError::Rejected { status, .. } => Some(*status),
            EmotionError::RetriesExhausted { status, .. } => *status,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
}

impl Gender {
    pub fn swapped(self) -> Gender {
        match self {
            Gender::Male => Gender::Female,
            Gender::Female => Gender::Male,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Male => "male",
            Gender::Female => "female",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Emotion {
    Anger,
    Contempt,
    Disgust,
    Fear,
    Happiness,
    Neutral,
    Sadness,
    Surprise,
}

impl Emotion {
    pub const ALL: [Emotion; 8] = [
        Emotion::Anger,
        Emotion::Contempt,
        Emotion::Disgust,
        Emotion::Fear,
        Emotion::Happiness,
        Emotion::Neutral,
        Emotion::Sadness,
        Emotion::Surprise,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Emotion::Anger => "anger",
            Emotion::Contempt => "contempt",
            Emotion::Disgust => "disgust",
            Emotion::Fear => "fear",
            Emotion::Happiness => "happiness",
            Emotion::Neutral => "neutral",
            Emotion::Sadness => "sadness",
            Emotion::Surprise => "surprise",
        }
    }
}

/// The eight confidence coefficients of one face, in fixed key order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EmotionVector {
    pub anger: f64,
    pub contempt: f64,
    pub disgust: f64,
    pub fear: f64,
    pub happiness: f64,
    pub neutral: f64,
    pub sadness: f64,
    pub surprise: f64,
}

impl EmotionVector {
    pub fn get(&self, emotion: Emotion) -> f64 {
        match emotion {
            Emotion::Anger => self.anger,
            Emotion::Contempt => self.contempt,
            Emotion::Disgust => self.disgust,
            Emotion::Fear => self.fear,
            Emotion::Happiness => self.happiness,
            Emotion::Neutral => self.neutral,
            Emotion::Sadness => self.sadness,
            Emotion::Surprise => self.surprise,
        }
    }

    pub fn set(&mut self, emotion: Emotion, value: f64) {
        let slot = match emotion {
            Emotion::Anger => &mut self.anger,
            Emotion::Contempt => &mut self.contempt,
            Emotion::Disgust => &mut self.disgust,
            Emotion::Fear => &mut self.fear,
            Emotion::Happiness => &mut self.happiness,
            Emotion::Neutral => &mut self.neutral,
            Emotion::Sadness => &mut self.sadness,
            Emotion::Surprise => &mut self.surprise,
        };
        *slot = value;
    }

    pub fn sum(&self) -> f64 {
        Emotion::ALL.iter().map(|e| self.get(*e)).sum()
    }

    /// Checks every coefficient lies in `[0, 1]`.
    pub fn validate(&self) -> Result<(), EmotionError> {
        for e in Emotion::ALL {
            let value = self.get(e);
            if !(0.0..=1.0).contains(&value) {
                return Err(EmotionError::CoefficientOutOfRange {
                    key: e.key(),
                    value,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceAnnotation {
    pub gender: Gender,
    pub emotions: EmotionVector,
}

impl FaceAnnotation {
    /// Happiness intensity, the emotion index used by every analysis.
    pub fn happiness(&self) -> f64 {
        self.emotions.happiness
    }
}

/// Parses a Face-API style response: a JSON array whose elements carry
/// `faceAttributes.gender` and `faceAttributes.emotion`.
pub fn parse_face_response(body: &str) -> Result<Vec<FaceAnnotation>, EmotionError> {
    let doc: Value = serde_json::from_str(body)
        .map_err(|e| EmotionError::Schema(format!("invalid json: {e}")))?;
    let faces = doc
        .as_array()
        .ok_or_else(|| EmotionError::Schema("response is not a JSON array".into()))?;
    faces
        .iter()
        .enumerate()
        .map(|(i, face)| parse_face(i, face))
        .collect()
}

fn parse_face(index: usize, face: &Value) -> Result<FaceAnnotation, EmotionError> {
    let attrs = face
        .get("faceAttributes")
        .ok_or_else(|| EmotionError::Schema(format!("face {index}: missing faceAttributes")))?;
    let gender = match attrs.get("gender").and_then(Value::as_str) {
        Some("male") => Gender::Male,
        Some("female") => Gender::Female,
        Some(other) => {
            return Err(EmotionError::Schema(format!(
                "face {index}: unknown gender {other:?}"
            )))
        }
        None => {
            return Err(EmotionError::Schema(format!(
                "face {index}: missing gender"
            )))
        }
    };
    let emotion = attrs
        .get("emotion")
        .and_then(Value::as_object)
        .ok_or_else(|| EmotionError::Schema(format!("face {index}: missing emotion object")))?;

    let mut emotions = EmotionVector::default();
    for e in Emotion::ALL {
        let value = emotion
            .get(e.key())
            .ok_or(EmotionError::MissingEmotionKey(e.key()))?;
        let value = value.as_f64().ok_or_else(|| {
            EmotionError::Schema(format!("face {index}: {} is not a number", e.key()))
        })?;
        emotions.set(e, value);
    }
    emotions.validate()?;
    Ok(FaceAnnotation { gender, emotions })
}

/// Renders annotations in the same wire shape [`parse_face_response`] reads.
pub fn serialize_face_response(faces: &[FaceAnnotation]) -> String {
    let doc: Vec<Value> = faces
        .iter()
        .map(|face| {
            let emotion: serde_json::Map<String, Value> = Emotion::ALL
                .iter()
                .map(|e| (e.key().to_string(), Value::from(face.emotions.get(*e))))
                .collect();
            serde_json::json!({
                "faceAttributes": {
                    "gender": face.gender.as_str(),
                    "emotion": emotion,
                }
            })
        })
        .collect();
    Value::Array(doc).to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Remote,
    Stub,
}

/// Something that can annotate the faces of a painting.
pub trait EmotionBackend: Send + Sync {
    fn kind(&self) -> BackendKind;

    fn annotate(&self, record: &PaintingRecord) -> Result<Vec<FaceAnnotation>, EmotionError>;
}

/// Annotates one painting and re-checks the coefficient range on the way out.
pub fn annotate_painting(
    backend: &dyn EmotionBackend,
    record: &PaintingRecord,
) -> Result<Vec<FaceAnnotation>, EmotionError> {
    let faces = backend.annotate(record)?;
    for face in &faces {
        face.emotions.validate()?;
    }
    Ok(faces)
}

/// Annotates many paintings with at most `fan_out` requests in flight.
/// Results come back in input order.
pub fn annotate_many(
    backend: &dyn EmotionBackend,
    records: &[&PaintingRecord],
    fan_out: usize,
) -> Vec<Result<Vec<FaceAnnotation>, EmotionError>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(fan_out.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| {
        records
            .par_iter()
            .map(|r| annotate_painting(backend, r))
            .collect()
    })
}
