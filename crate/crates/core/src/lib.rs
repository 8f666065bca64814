//! Quantitative analysis of emotion in figure paintings.
//!
//! The crate is organised along the analysis pipeline:
//!
//! - [`corpus`]: metadata ingestion, deduplication, the NDJSON store and the
//!   temporal/spatial database split.
//! - [`emotion`]: per-face gender and eight-dimension emotion coefficients,
//!   obtained from a remote Face-API style service or a deterministic stub.
//! - [`color`]: nine-color HSV profiles of painting images.
//! - [`temporal`]: date normalisation, decade series, era aggregation through
//!   a natural cubic spline, and happiness intensity bands.
//! - [`gender`]: gender preference (GPT) and happiness difference (HDG) per decade.
//! - [`colorstats`]: color/happiness correlation with significance bands and
//!   cross-country coefficients of variation.
//! - [`spatial`]: country weights, global Moran's I, Moran scatter quadrants
//!   and choropleth export.

pub mod color;
pub mod colorstats;
pub mod corpus;
pub mod emotion;
pub mod gender;
pub mod spatial;
pub mod temporal;

pub use color::{ColorLabel, ColorProfile, HsvPixel};
pub use corpus::{CorpusStore, PaintingRecord};
pub use emotion::{Emotion, EmotionVector, FaceAnnotation, Gender};
