use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("path does not exist: {}", .0.display())]
    MissingPath(PathBuf),
    /// A command ran before a stage it depends on.
    #[error("{detail} (run `{missing}` first)")]
    StageOrder {
        missing: &'static str,
        detail: String,
    },
    #[error("empty series: {0}")]
    EmptySeries(String),
    #[error(transparent)]
    Corpus(#[from] paintmood_core::corpus::CorpusError),
    #[error(transparent)]
    Emotion(#[from] paintmood_core::emotion::EmotionError),
    #[error(transparent)]
    Spatial(#[from] paintmood_core::spatial::SpatialError),
    #[error(transparent)]
    Temporal(#[from] paintmood_core::temporal::TemporalError),
    #[error(transparent)]
    Stats(#[from] paintmood_core::colorstats::StatsError),
    #[error("report {path}: {message}")]
    Report { path: PathBuf, message: String },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Config(_) => "config",
            CliError::MissingPath(_) => "missing_path",
            CliError::StageOrder { .. } => "stage_order",
            CliError::EmptySeries(_) => "empty_series",
            CliError::Corpus(_) => "corpus",
            CliError::Emotion(_) => "emotion",
            CliError::Spatial(_) => "spatial",
            CliError::Temporal(_) => "temporal",
            CliError::Stats(_) => "stats",
            CliError::Report { .. } => "report",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::MissingPath(_) => 2,
            CliError::StageOrder { .. } => 3,
            _ => 1,
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            error: &'a str,
            kind: &'a str,
            #[serde(skip_serializing_if = "Option::is_none")]
            missing_stage: Option<&'a str>,
        }
        let message = self.to_string();
        let missing_stage = match self {
            CliError::StageOrder { missing, .. } => Some(*missing),
            _ => None,
        };
        serde_json::to_string(&Body {
            error: &message,
            kind: self.kind(),
            missing_stage,
        })
        .expect("serializable")
    }
}
