//! Command-line pipeline: ingest metadata, annotate faces, profile colors,
//! run the analyses and draw the charts.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod plot;
pub mod report;

pub use config::PipelineConfig;
pub use error::CliError;
pub use pipeline::{
    cmd_analyze, cmd_annotate, cmd_colors, cmd_ingest, cmd_plot, Analysis, PlotKind,
};
