//! Pipeline configuration, read from one TOML or JSON file.

use std::path::{Path, PathBuf};
use std::time::Duration;

use paintmood_core::emotion::RemoteConfig;
use paintmood_core::spatial::WeightScheme;
use paintmood_core::temporal::{default_eras, EraBound};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    Stub,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendChoice,
    pub seed: u64,
    pub endpoint: Option<String>,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub api_key_header: String,
    pub retry_budget: u32,
    pub backoff_ms: u64,
    pub timeout_secs: u64,
    /// Maximum concurrent annotation requests.
    pub fan_out: usize,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            kind: BackendChoice::Stub,
            seed: 0,
            endpoint: None,
            api_key_env: "PAINTMOOD_API_KEY".into(),
            api_key_header: "Ocp-Apim-Subscription-Key".into(),
            retry_budget: 3,
            backoff_ms: 1000,
            timeout_secs: 30,
            fan_out: 4,
        }
    }
}

impl BackendConfig {
    pub fn remote_config(&self) -> Result<RemoteConfig, CliError> {
        let endpoint = self
            .endpoint
            .clone()
            .ok_or_else(|| CliError::Config("remote backend needs backend.endpoint".into()))?;
        let mut config = RemoteConfig::new(endpoint);
        config.api_key = std::env::var(&self.api_key_env)
            .ok()
            .filter(|k| !k.is_empty());
        config.api_key_header = self.api_key_header.clone();
        config.retry_budget = self.retry_budget;
        config.backoff_base = Duration::from_millis(self.backoff_ms);
        config.timeout = Duration::from_secs(self.timeout_secs);
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearWindow {
    pub start_year: i32,
    pub end_year: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// NDJSON corpus store.
    pub store: PathBuf,
    /// Directory searched for painting images by URL file name.
    pub image_dir: Option<PathBuf>,
    pub country_codes: Option<PathBuf>,
    pub country_continents: Option<PathBuf>,
    pub adjacency: Option<PathBuf>,
    pub centroids: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub backend: BackendConfig,
    pub dilation_iterations: u32,
    pub max_image_side: Option<u32>,
    pub eras: Vec<EraBound>,
    pub min_faces: usize,
    pub rapid_change_decades: usize,
    pub band_windows: Vec<YearWindow>,
    pub cv_countries: Vec<String>,
    pub weight_scheme: WeightScheme,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            store: "corpus.ndjson".into(),
            image_dir: None,
            country_codes: None,
            country_continents: None,
            adjacency: None,
            centroids: None,
            output_dir: "out".into(),
            backend: BackendConfig::default(),
            dilation_iterations: 2,
            max_image_side: Some(1024),
            eras: default_eras(),
            min_faces: paintmood_core::gender::DEFAULT_MIN_FACES,
            rapid_change_decades: 10,
            band_windows: vec![
                YearWindow {
                    start_year: 1605,
                    end_year: 1655,
                },
                YearWindow {
                    start_year: 1665,
                    end_year: 1755,
                },
                YearWindow {
                    start_year: 1765,
                    end_year: 1795,
                },
            ],
            cv_countries: paintmood_core::colorstats::DEFAULT_CV_COUNTRIES
                .iter()
                .map(|s| s.to_string())
                .collect(),
            weight_scheme: WeightScheme::RowStandardized,
        }
    }
}

impl PipelineConfig {
    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config: PipelineConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
            _ => toml::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        };
        if let Some(base) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            config.rebase(base);
        }
        Ok(config)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.store);
        fix(&mut self.output_dir);
        for p in [
            &mut self.image_dir,
            &mut self.country_codes,
            &mut self.country_continents,
            &mut self.adjacency,
            &mut self.centroids,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    /// Checks thresholds and that every referenced input path exists. The
    /// store is only required when `need_store` is set.
    pub fn validate(&self, need_store: bool) -> Result<(), CliError> {
        if self.min_faces == 0 {
            return Err(CliError::Config("min_faces must be positive".into()));
        }
        if self.rapid_change_decades < 2 {
            return Err(CliError::Config(
                "rapid_change_decades must be at least 2".into(),
            ));
        }
        if self.backend.fan_out == 0 || self.backend.retry_budget == 0 {
            return Err(CliError::Config(
                "backend.fan_out and backend.retry_budget must be positive".into(),
            ));
        }
        if self.max_image_side == Some(0) {
            return Err(CliError::Config("max_image_side must be positive".into()));
        }
        for w in &self.band_windows {
            if w.start_year > w.end_year {
                return Err(CliError::Config(format!(
                    "band window {}-{} is reversed",
                    w.start_year, w.end_year
                )));
            }
        }
        let inputs = [
            &self.image_dir,
            &self.country_codes,
            &self.country_continents,
            &self.adjacency,
            &self.centroids,
        ];
        for p in inputs.into_iter().flatten() {
            if !p.exists() {
                return Err(CliError::MissingPath(p.clone()));
            }
        }
        if self.country_codes.is_some() != self.country_continents.is_some() {
            return Err(CliError::Config(
                "country_codes and country_continents must be given together".into(),
            ));
        }
        if need_store && !self.store.exists() {
            return Err(CliError::StageOrder {
                missing: "ingest",
                detail: format!("no corpus store at {}", self.store.display()),
            });
        }
        Ok(())
    }
}
