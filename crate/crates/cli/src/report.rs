//! Report rows and file writers. Every CSV starts with a header row, even
//! when it has no data rows.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DATABASE_SUMMARY: &str = "database_summary.csv";
pub const DECADE_SERIES: &str = "decade_series.csv";
pub const ERA_SERIES: &str = "era_series.csv";
pub const RAPID_CHANGE: &str = "rapid_change.json";
pub const BAND_WINDOWS: &str = "band_windows.csv";
pub const GENDER_SERIES: &str = "gender_series.csv";
pub const GENDER_SUMMARY: &str = "gender_summary.json";
pub const CORRELATION_LONG: &str = "correlation_long.csv";
pub const CORRELATION_PVALUES: &str = "correlation_pvalues.csv";
pub const CV_TABLE: &str = "cv_table.csv";
pub const CV_EXCLUDED: &str = "cv_excluded.csv";
pub const COLOR_BY_BAND: &str = "color_by_band.csv";
pub const CHOROPLETH: &str = "choropleth.csv";
pub const MORAN_SCATTER: &str = "moran_scatter.csv";
pub const MORAN_SUMMARY: &str = "moran_summary.json";
pub const ANALYSIS_SUMMARY: &str = "analysis_summary.json";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatabaseRow {
    pub database: String,
    pub continent: String,
    pub count: usize,
    pub percentage: f64,
    pub paintings_with_emotions: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecadeRow {
    pub start_year: i32,
    pub face_count: usize,
    pub mean_happiness: Option<f64>,
    pub p_low: Option<f64>,
    pub p_medium: Option<f64>,
    pub p_high: Option<f64>,
    pub painting_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EraRow {
    pub label: String,
    pub start_year: i32,
    pub end_year: i32,
    pub mean_happiness: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BandWindowRow {
    pub start_year: i32,
    pub end_year: i32,
    pub face_count: usize,
    pub p_low: Option<f64>,
    pub p_medium: Option<f64>,
    pub p_high: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenderRow {
    pub start_year: i32,
    pub n_female: usize,
    pub n_male: usize,
    pub gpt: f64,
    pub hdg: Option<f64>,
    pub nof: f64,
    pub nom: f64,
    pub ahf: Option<f64>,
    pub ahm: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub scale: String,
    pub unit: String,
    pub color: String,
    pub r: Option<f64>,
    pub p: Option<f64>,
    pub n: usize,
    pub band: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub color: String,
    pub band: String,
    pub n_countries: usize,
    pub std: f64,
    pub ave: f64,
    pub cv: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CvExcludedRow {
    pub country: String,
    pub band: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ColorBandRow {
    pub band: String,
    pub color: String,
    pub mean: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub country: String,
    pub z: f64,
    pub lag: f64,
    pub quadrant: String,
}

fn report_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Report {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Writes `rows` under an explicit header so empty tables keep their columns.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(header).map_err(|e| report_err(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| report_err(path, e))?;
    }
    let bytes = w.into_inner().map_err(|e| report_err(path, e))?;
    write_bytes(path, &bytes)
}

pub fn write_raw_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(header).map_err(|e| report_err(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| report_err(path, e))?;
    }
    let bytes = w.into_inner().map_err(|e| report_err(path, e))?;
    write_bytes(path, &bytes)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| report_err(path, e))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Reads a report written by `analyze`.
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    if !path.exists() {
        return Err(CliError::StageOrder {
            missing: "analyze",
            detail: format!("report {} not found", path.display()),
        });
    }
    let mut r = csv::Reader::from_path(path).map_err(|e| report_err(path, e))?;
    r.deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| report_err(path, e))
}

pub trait HasHeader {
    const HEADER: &'static [&'static str];
}

macro_rules! header {
    ($t:ty, [$($f:literal),* $(,)?]) => {
        impl HasHeader for $t {
            const HEADER: &'static [&'static str] = &[$($f),*];
        }
    };
}

header!(
    DatabaseRow,
    [
        "database",
        "continent",
        "count",
        "percentage",
        "paintings_with_emotions"
    ]
);
header!(
    DecadeRow,
    [
        "start_year",
        "face_count",
        "mean_happiness",
        "p_low",
        "p_medium",
        "p_high",
        "painting_count"
    ]
);
header!(
    EraRow,
    ["label", "start_year", "end_year", "mean_happiness"]
);
header!(
    BandWindowRow,
    [
        "start_year",
        "end_year",
        "face_count",
        "p_low",
        "p_medium",
        "p_high"
    ]
);
header!(
    GenderRow,
    [
        "start_year",
        "n_female",
        "n_male",
        "gpt",
        "hdg",
        "nof",
        "nom",
        "ahf",
        "ahm"
    ]
);
header!(
    CorrelationRow,
    ["scale", "unit", "color", "r", "p", "n", "band"]
);
header!(CvRow, ["color", "band", "n_countries", "std", "ave", "cv"]);
header!(CvExcludedRow, ["country", "band"]);
header!(ColorBandRow, ["band", "color", "mean", "n"]);
header!(ScatterRow, ["country", "z", "lag", "quadrant"]);

pub fn write_table<T: Serialize + HasHeader>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    write_csv(path, T::HEADER, rows)
}
