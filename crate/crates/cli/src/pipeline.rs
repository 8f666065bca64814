//! The five pipeline stages. Each reads the corpus store and config, and
//! writes to the store or to fixed file names under the output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::{info, warn};
use paintmood_core::color::{
    classified_masks, load_rgb, profile_image_files, HsvImage, ProfileOptions,
};
use paintmood_core::colorstats::{self, Scale};
use paintmood_core::corpus::{
    ingest_metadata, read_rows_from_path, split_databases, summarize_by_continent, CorpusStore,
    CountryTable, IngestReport, PaintingRecord,
};
use paintmood_core::emotion::{annotate_many, EmotionBackend, RemoteBackend, StubBackend};
use paintmood_core::gender::{self, GenderError};
use paintmood_core::spatial::{self, SpatialError};
use paintmood_core::temporal::{self, IntensityBand, TemporalError};
use paintmood_core::{ColorLabel, FaceAnnotation};
use serde::Serialize;

use crate::config::{BackendChoice, PipelineConfig};
use crate::error::CliError;
use crate::plot::{self, Series, PALETTE};
use crate::report::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Analysis {
    Temporal,
    Gender,
    Colorstats,
    Spatial,
    All,
}

impl Analysis {
    fn includes(self, other: Analysis) -> bool {
        self == Analysis::All || self == other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    DecadeCounts,
    Trend,
    Bands,
    Gender,
    ColorBands,
    Moran,
    All,
}

impl PlotKind {
    pub const EACH: [PlotKind; 6] = [
        PlotKind::DecadeCounts,
        PlotKind::Trend,
        PlotKind::Bands,
        PlotKind::Gender,
        PlotKind::ColorBands,
        PlotKind::Moran,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::DecadeCounts => "decade_counts.svg",
            PlotKind::Trend => "emotion_trend.svg",
            PlotKind::Bands => "band_proportions.svg",
            PlotKind::Gender => "gender.svg",
            PlotKind::ColorBands => "color_by_band.svg",
            PlotKind::Moran => "moran_scatter.svg",
            PlotKind::All => "",
        }
    }
}

fn country_table(config: &PipelineConfig) -> Result<CountryTable, CliError> {
    match (&config.country_codes, &config.country_continents) {
        (Some(codes), Some(continents)) => Ok(CountryTable::from_files(codes, continents)?),
        _ => Ok(CountryTable::bundled()),
    }
}

fn load_store(config: &PipelineConfig) -> Result<CorpusStore, CliError> {
    config.validate(true)?;
    Ok(CorpusStore::load(&config.store)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct FileIngest {
    pub path: String,
    #[serde(flatten)]
    pub report: IngestReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestSummary {
    pub files: Vec<FileIngest>,
    pub duplicates_removed: usize,
    pub store_records: usize,
}

/// Reads metadata files into the store, deduplicating across all of them.
pub fn cmd_ingest(config: &PipelineConfig, inputs: &[PathBuf]) -> Result<IngestSummary, CliError> {
    config.validate(false)?;
    if inputs.is_empty() {
        return Err(CliError::Config(
            "ingest needs at least one input file".into(),
        ));
    }
    let countries = country_table(config)?;
    let mut store = CorpusStore::load_or_empty(&config.store)?;
    let mut files = Vec::new();
    for path in inputs {
        if !path.exists() {
            return Err(CliError::MissingPath(path.clone()));
        }
        let rows = read_rows_from_path(path)?;
        let source = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("input")
            .to_string();
        let report = ingest_metadata(&mut store, rows, &source, &countries);
        info!(
            "{}: {} accepted, {} rejected",
            path.display(),
            report.accepted,
            report.rejected
        );
        files.push(FileIngest {
            path: path.display().to_string(),
            report,
        });
    }
    let duplicates_removed = store.dedup();
    store.save(&config.store)?;
    Ok(IngestSummary {
        files,
        duplicates_removed,
        store_records: store.len(),
    })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AnnotateSummary {
    pub annotated: usize,
    pub already_annotated: usize,
    pub failed: usize,
    pub faces: usize,
    pub failures: BTreeMap<String, usize>,
}

fn make_backend(config: &PipelineConfig) -> Result<Box<dyn EmotionBackend>, CliError> {
    Ok(match config.backend.kind {
        BackendChoice::Stub => Box::new(StubBackend {
            seed: config.backend.seed,
        }),
        BackendChoice::Remote => {
            let remote = config.backend.remote_config()?;
            if remote.api_key.is_none() {
                warn!(
                    "{} is not set; sending requests without an API key",
                    config.backend.api_key_env
                );
            }
            Box::new(RemoteBackend::connect(remote).map_err(|e| CliError::Config(e.to_string()))?)
        }
    })
}

/// Annotates every painting that has no face annotations yet (or all of
/// them with `force`). Failed paintings stay unannotated.
pub fn cmd_annotate(config: &PipelineConfig, force: bool) -> Result<AnnotateSummary, CliError> {
    let mut store = load_store(config)?;
    let backend = make_backend(config)?;
    let todo: Vec<usize> = (0..store.len())
        .filter(|&i| force || store.records[i].faces.is_none())
        .collect();
    let mut summary = AnnotateSummary {
        already_annotated: store.len() - todo.len(),
        ..Default::default()
    };
    let results = {
        let records: Vec<&PaintingRecord> = todo.iter().map(|&i| &store.records[i]).collect();
        annotate_many(backend.as_ref(), &records, config.backend.fan_out)
    };
    for (i, result) in todo.into_iter().zip(results) {
        match result {
            Ok(faces) => {
                summary.annotated += 1;
                summary.faces += faces.len();
                store.records[i].faces = Some(faces);
            }
            Err(e) => {
                warn!("{}: {e}", store.records[i].dedup_key());
                summary.failed += 1;
                let kind = match e.http_status() {
                    Some(status) => format!("http_{status}"),
                    None => "other".to_string(),
                };
                *summary.failures.entry(kind).or_default() += 1;
            }
        }
    }
    store.save(&config.store)?;
    Ok(summary)
}

/// Local path of a painting image: `file://` URLs directly, anything else
/// by the last URL path segment inside `image_dir`.
pub fn resolve_image(url: &str, image_dir: Option<&Path>) -> Option<PathBuf> {
    let parsed = url::Url::parse(url).ok()?;
    if parsed.scheme() == "file" {
        return parsed.to_file_path().ok();
    }
    let name = parsed
        .path_segments()?
        .next_back()
        .filter(|s| !s.is_empty())?;
    Some(image_dir?.join(name))
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ColorsSummary {
    pub profiled: usize,
    pub already_profiled: usize,
    pub missing_image: usize,
    pub failed: usize,
}

/// Computes color profiles for paintings with a local image. With
/// `dump_masks`, also writes the classified masks as PNG files.
pub fn cmd_colors(
    config: &PipelineConfig,
    force: bool,
    dump_masks: Option<&Path>,
) -> Result<ColorsSummary, CliError> {
    let mut store = load_store(config)?;
    let options = ProfileOptions {
        dilation_iterations: config.dilation_iterations,
        max_side: config.max_image_side,
    };
    let mut summary = ColorsSummary::default();
    let mut todo = Vec::new();
    for (i, r) in store.records.iter().enumerate() {
        if r.color_profile.is_some() && !force {
            summary.already_profiled += 1;
            continue;
        }
        match resolve_image(&r.painting_url, config.image_dir.as_deref()).filter(|p| p.is_file()) {
            Some(path) => todo.push((i, path)),
            None => summary.missing_image += 1,
        }
    }
    let paths: Vec<PathBuf> = todo.iter().map(|(_, p)| p.clone()).collect();
    let results = profile_image_files(&paths, options);
    for ((i, path), result) in todo.iter().zip(results) {
        match result {
            Ok(profile) => {
                store.records[*i].color_profile = Some(profile);
                summary.profiled += 1;
                if let Some(dir) = dump_masks {
                    dump_mask_pngs(dir, *i, path, options)?;
                }
            }
            Err(e) => {
                warn!("{}: {e}", path.display());
                summary.failed += 1;
            }
        }
    }
    store.save(&config.store)?;
    Ok(summary)
}

fn dump_mask_pngs(
    dir: &Path,
    index: usize,
    path: &Path,
    options: ProfileOptions,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let rgb = load_rgb(path, options.max_side).map_err(|e| CliError::Report {
        path: path.into(),
        message: e.to_string(),
    })?;
    let masks = classified_masks(&HsvImage::from_rgb(&rgb)).map_err(|e| CliError::Report {
        path: path.into(),
        message: e.to_string(),
    })?;
    for (label, mask) in masks {
        let out = dir.join(format!("{index:05}_{}.png", label.name()));
        mask.to_gray_image()
            .save(&out)
            .map_err(|e| CliError::Report {
                path: out.clone(),
                message: e.to_string(),
            })?;
    }
    Ok(())
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AnalyzeSummary {
    pub records: usize,
    pub annotated: usize,
    pub not_annotated: usize,
    pub profiled: usize,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
}

struct Analyzer<'a> {
    config: &'a PipelineConfig,
    out: &'a Path,
    summary: AnalyzeSummary,
}

impl Analyzer<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        self.summary.outputs.push(name.to_string());
        self.out.join(name)
    }

    fn warn(&mut self, message: String) {
        warn!("{message}");
        self.summary.warnings.push(message);
    }
}

fn opt3(p: Option<(f64, f64, f64)>) -> (Option<f64>, Option<f64>, Option<f64>) {
    match p {
        Some((a, b, c)) => (Some(a), Some(b), Some(c)),
        None => (None, None, None),
    }
}

fn dated(db: &[PaintingRecord]) -> Vec<(i32, &[FaceAnnotation])> {
    db.iter()
        .filter_map(|r| Some((r.parsed_year()?, r.face_list())))
        .collect()
}

/// Runs the selected analyses over the annotated part of the corpus.
pub fn cmd_analyze(config: &PipelineConfig, which: Analysis) -> Result<AnalyzeSummary, CliError> {
    let store = load_store(config)?;
    let annotated: Vec<PaintingRecord> = store
        .records
        .iter()
        .filter(|r| r.faces.is_some())
        .cloned()
        .collect();
    if !annotated.iter().any(|r| r.has_faces()) {
        return Err(CliError::StageOrder {
            missing: "annotate",
            detail: "no annotated faces".into(),
        });
    }
    let profiled = annotated
        .iter()
        .filter(|r| r.color_profile.is_some())
        .count();
    if which.includes(Analysis::Colorstats) && profiled == 0 {
        return Err(CliError::StageOrder {
            missing: "colors",
            detail: "no color profiles".into(),
        });
    }

    let mut a = Analyzer {
        config,
        out: &config.output_dir,
        summary: AnalyzeSummary {
            records: store.len(),
            annotated: annotated.len(),
            not_annotated: store.len() - annotated.len(),
            profiled,
            ..Default::default()
        },
    };
    if a.summary.not_annotated > 0 {
        let n = a.summary.not_annotated;
        a.warn(format!("{n} paintings are not annotated and were skipped"));
    }

    let subset = CorpusStore {
        records: annotated,
        ..CorpusStore::new()
    };
    let (temporal_db, spatial_db) = split_databases(&subset);

    if which.includes(Analysis::Temporal) {
        analyze_temporal(&mut a, &temporal_db, &spatial_db)?;
    }
    if which.includes(Analysis::Gender) {
        analyze_gender(&mut a, &temporal_db)?;
    }
    if which.includes(Analysis::Colorstats) {
        analyze_colorstats(&mut a, &subset.records)?;
    }
    if which.includes(Analysis::Spatial) {
        analyze_spatial(&mut a, &spatial_db)?;
    }
    let path = a.path(ANALYSIS_SUMMARY);
    write_json(&path, &a.summary)?;
    Ok(a.summary)
}

fn analyze_temporal(
    a: &mut Analyzer,
    temporal_db: &[PaintingRecord],
    spatial_db: &[PaintingRecord],
) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for (name, db) in [("temporal", temporal_db), ("spatial", spatial_db)] {
        match summarize_by_continent(db) {
            Ok(summary) => rows.extend(summary.into_iter().map(|s| DatabaseRow {
                database: name.into(),
                continent: s.continent.name().into(),
                count: s.count,
                percentage: s.percentage * 100.0,
                paintings_with_emotions: s.paintings_with_emotions,
            })),
            Err(e) => a.warn(format!("{name} database: {e}")),
        }
    }
    let path = a.path(DATABASE_SUMMARY);
    write_table(&path, &rows)?;

    let items = dated(temporal_db);
    let series = temporal::bin_decades(items.iter().copied());
    if series.dropped > 0 {
        let n = series.dropped;
        a.warn(format!(
            "{n} dated paintings fall outside the decade series"
        ));
    }
    let rows: Vec<DecadeRow> = series
        .bins
        .iter()
        .map(|b| {
            let (p_low, p_medium, p_high) = opt3(b.band_counts.proportions());
            DecadeRow {
                start_year: b.start_year,
                face_count: b.face_count,
                mean_happiness: b.mean_happiness,
                p_low,
                p_medium,
                p_high,
                painting_count: b.painting_count,
            }
        })
        .collect();
    let path = a.path(DECADE_SERIES);
    write_table(&path, &rows)?;

    let eras = match temporal::era_series(&series, &a.config.eras) {
        Ok(e) => e.eras,
        Err(e @ TemporalError::InvalidEras(_)) => return Err(e.into()),
        Err(e) => {
            a.warn(format!("era series: {e}"));
            Vec::new()
        }
    };
    let rows: Vec<EraRow> = eras
        .into_iter()
        .map(|e| EraRow {
            label: e.label,
            start_year: e.start_year,
            end_year: e.end_year,
            mean_happiness: e.mean_happiness,
        })
        .collect();
    let path = a.path(ERA_SERIES);
    write_table(&path, &rows)?;

    #[derive(Serialize)]
    struct Rapid {
        window_decades: usize,
        window: Option<temporal::ChangeWindow>,
        #[serde(skip_serializing_if = "Option::is_none")]
        reason: Option<String>,
    }
    let window_decades = a.config.rapid_change_decades;
    let rapid = match temporal::rapid_change_window(&series, window_decades) {
        Ok(w) => Rapid {
            window_decades,
            window: Some(w),
            reason: None,
        },
        Err(e) => {
            a.warn(format!("rapid change window: {e}"));
            Rapid {
                window_decades,
                window: None,
                reason: Some(e.to_string()),
            }
        }
    };
    let path = a.path(RAPID_CHANGE);
    write_json(&path, &rapid)?;

    let mut rows = Vec::new();
    for w in &a.config.band_windows {
        let happiness = temporal::window_happiness(items.iter().copied(), w.start_year, w.end_year);
        let (p_low, p_medium, p_high) = opt3(temporal::band_proportions(&happiness).ok());
        rows.push(BandWindowRow {
            start_year: w.start_year,
            end_year: w.end_year,
            face_count: happiness.len(),
            p_low,
            p_medium,
            p_high,
        });
    }
    let path = a.path(BAND_WINDOWS);
    write_table(&path, &rows)
}

fn analyze_gender(a: &mut Analyzer, temporal_db: &[PaintingRecord]) -> Result<(), CliError> {
    let groups = temporal::group_by_decade(dated(temporal_db));
    let stats = match gender::gender_series(&groups, a.config.min_faces) {
        Ok(s) => s,
        Err(e @ (GenderError::NoDecadeSurvives(_) | GenderError::NoGenderedFaces)) => {
            a.warn(format!("gender series: {e}"));
            Vec::new()
        }
        Err(e) => {
            return Err(CliError::Report {
                path: GENDER_SERIES.into(),
                message: e.to_string(),
            })
        }
    };
    let rows: Vec<GenderRow> = stats
        .iter()
        .map(|s| GenderRow {
            start_year: s.start_year,
            n_female: s.n_female_faces,
            n_male: s.n_male_faces,
            nof: s.nof,
            nom: s.nom,
            ahf: s.ahf,
            ahm: s.ahm,
            gpt: s.gpt,
            hdg: s.hdg,
        })
        .collect();
    let path = a.path(GENDER_SERIES);
    write_table(&path, &rows)?;
    #[derive(Serialize)]
    struct Summary {
        min_faces: usize,
        #[serde(flatten)]
        counts: gender::GenderSummary,
    }
    let path = a.path(GENDER_SUMMARY);
    write_json(
        &path,
        &Summary {
            min_faces: a.config.min_faces,
            counts: gender::summarize(&stats),
        },
    )
}

fn analyze_colorstats(a: &mut Analyzer, db: &[PaintingRecord]) -> Result<(), CliError> {
    let mut long = Vec::new();
    let mut wide = Vec::new();
    for scale in [Scale::World, Scale::Continent, Scale::Country] {
        let cells = colorstats::correlation_table(db, scale);
        for unit in cells.chunks(ColorLabel::ALL.len()) {
            let mut row = vec![scale.as_str().to_string(), unit[0].unit.clone()];
            row.extend(
                unit.iter()
                    .map(|c| c.p.map(|p| p.to_string()).unwrap_or_default()),
            );
            row.push(unit[0].n.to_string());
            wide.push(row);
        }
        long.extend(cells.into_iter().map(|c| CorrelationRow {
            scale: scale.as_str().into(),
            unit: c.unit,
            color: c.color.name().into(),
            r: c.r,
            p: c.p,
            n: c.n,
            band: c.band.as_str().into(),
        }));
    }
    let path = a.path(CORRELATION_LONG);
    write_table(&path, &long)?;
    let mut header = vec!["scale", "unit"];
    header.extend(ColorLabel::ALL.iter().map(|c| c.name()));
    header.push("n");
    let path = a.path(CORRELATION_PVALUES);
    write_raw_csv(&path, &header, &wide)?;

    let present: Vec<&str> = a
        .config
        .cv_countries
        .iter()
        .map(String::as_str)
        .filter(|c| db.iter().any(|r| r.painting_country.as_deref() == Some(*c)))
        .collect();
    if present.len() < a.config.cv_countries.len() {
        let missing: Vec<&str> = a
            .config
            .cv_countries
            .iter()
            .map(String::as_str)
            .filter(|c| !present.contains(c))
            .collect();
        a.warn(format!(
            "CV countries without paintings: {}",
            missing.join(", ")
        ));
    }
    let table = colorstats::cv_table(db, &present, &IntensityBand::ALL)?;
    for band in &table.undefined_bands {
        let band = band.as_str();
        a.warn(format!(
            "CV undefined in {band} band: fewer than two countries"
        ));
    }
    let rows: Vec<CvRow> = table
        .cells
        .iter()
        .map(|c| CvRow {
            color: c.color.name().into(),
            band: c.band.as_str().into(),
            n_countries: c.n_countries,
            std: c.std,
            ave: c.ave,
            cv: c.cv,
        })
        .collect();
    let path = a.path(CV_TABLE);
    write_table(&path, &rows)?;
    let rows: Vec<CvExcludedRow> = table
        .excluded
        .iter()
        .map(|(c, b)| CvExcludedRow {
            country: c.clone(),
            band: b.as_str().into(),
        })
        .collect();
    let path = a.path(CV_EXCLUDED);
    write_table(&path, &rows)?;

    let rows: Vec<ColorBandRow> = colorstats::band_color_means(db)
        .into_iter()
        .map(|m| ColorBandRow {
            band: m.band.as_str().into(),
            color: m.color.name().into(),
            mean: m.mean,
            n: m.n,
        })
        .collect();
    let path = a.path(COLOR_BY_BAND);
    write_table(&path, &rows)
}

fn analyze_spatial(a: &mut Analyzer, spatial_db: &[PaintingRecord]) -> Result<(), CliError> {
    let countries = country_table(a.config)?;
    let means = spatial::country_means(spatial_db);
    let path = a.path(CHOROPLETH);
    match spatial::choropleth_csv(&means, &countries) {
        Ok(csv) => write_bytes(&path, csv.as_bytes())?,
        Err(SpatialError::Empty) => {
            a.warn("choropleth: no country has annotated faces".into());
            write_raw_csv(
                &path,
                &["country", "iso_code", "mean_happiness", "n_paintings"],
                &[],
            )?;
        }
        Err(e) => return Err(e.into()),
    }

    let adjacency = match &a.config.adjacency {
        Some(p) => {
            spatial::read_adjacency(std::fs::File::open(p).map_err(|e| CliError::io(p, e))?)?
        }
        None => spatial::bundled_adjacency(),
    };
    let centroids = match &a.config.centroids {
        Some(p) => {
            spatial::read_centroids(std::fs::File::open(p).map_err(|e| CliError::io(p, e))?)?
        }
        None => spatial::bundled_centroids(),
    };
    let units: Vec<String> = means.keys().cloned().collect();
    let values: Vec<f64> = means.values().map(|m| m.mean_happiness).collect();
    let pairs = spatial::restrict_adjacency(&adjacency, &units);

    #[derive(Serialize)]
    struct MoranSummary {
        scheme: spatial::WeightScheme,
        units: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        i: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        expected: Option<f64>,
        excluded: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    }
    let scheme = a.config.weight_scheme;
    let mut summary = MoranSummary {
        scheme,
        units: units.len(),
        i: None,
        n: None,
        expected: None,
        excluded: vec![],
        error: None,
    };
    let mut scatter = Vec::new();
    let result = spatial::build_weights(&pairs, &units, scheme, Some(&centroids))
        .and_then(|w| spatial::morans_i(&values, &w));
    match result {
        Ok(r) => {
            summary.i = Some(r.i);
            summary.n = Some(r.n);
            summary.expected = Some(r.expected);
            summary.excluded = r.excluded.clone();
            if !r.excluded.is_empty() {
                let list = r.excluded.join(", ");
                a.warn(format!(
                    "Moran's I excludes units without neighbors: {list}"
                ));
            }
            scatter = r
                .scatter
                .into_iter()
                .map(|p| ScatterRow {
                    country: p.unit,
                    z: p.z,
                    lag: p.lag,
                    quadrant: p.quadrant.as_str().into(),
                })
                .collect();
        }
        Err(e @ SpatialError::MissingCentroid(_)) => return Err(e.into()),
        Err(e) => {
            a.warn(format!("Moran's I: {e}"));
            summary.error = Some(e.to_string());
        }
    }
    let path = a.path(MORAN_SCATTER);
    write_table(&path, &scatter)?;
    let path = a.path(MORAN_SUMMARY);
    write_json(&path, &summary)
}

fn svg_for(out: &Path, kind: PlotKind) -> Result<String, CliError> {
    let empty = |what: &str| CliError::EmptySeries(what.to_string());
    let decades = || read_csv::<DecadeRow>(&out.join(DECADE_SERIES));
    Ok(match kind {
        PlotKind::DecadeCounts => {
            let rows = decades()?;
            if rows.iter().all(|r| r.painting_count == 0) {
                return Err(empty("decade painting counts"));
            }
            let cats: Vec<String> = rows.iter().map(|r| r.start_year.to_string()).collect();
            let vals: Vec<f64> = rows.iter().map(|r| r.painting_count as f64).collect();
            plot::bar_chart(
                "Paintings per decade",
                "decade",
                "paintings",
                &cats,
                &[("paintings".into(), PALETTE[0].into(), vals)],
            )
        }
        PlotKind::Trend => {
            let pts: Vec<(f64, f64)> = decades()?
                .iter()
                .filter_map(|r| Some((r.start_year as f64 + 5.0, r.mean_happiness?)))
                .collect();
            if pts.is_empty() {
                return Err(empty("decade happiness"));
            }
            let s = Series {
                name: "mean happiness".into(),
                color: PALETTE[0].into(),
                points: pts,
            };
            plot::line_chart("Happiness by decade", "year", "mean happiness", &[s], false)
        }
        PlotKind::Bands => {
            let rows = decades()?;
            let pick = |f: fn(&DecadeRow) -> Option<f64>| -> Vec<(f64, f64)> {
                rows.iter()
                    .filter_map(|r| Some((r.start_year as f64 + 5.0, f(r)?)))
                    .collect()
            };
            let series: Vec<Series> = [
                ("low", PALETTE[0], pick(|r| r.p_low)),
                ("medium", PALETTE[1], pick(|r| r.p_medium)),
                ("high", PALETTE[2], pick(|r| r.p_high)),
            ]
            .into_iter()
            .map(|(n, c, p)| Series {
                name: n.into(),
                color: c.into(),
                points: p,
            })
            .collect();
            if series[0].points.is_empty() {
                return Err(empty("band proportions"));
            }
            plot::line_chart(
                "Happiness band proportions by decade",
                "year",
                "share of faces",
                &series,
                false,
            )
        }
        PlotKind::Gender => {
            let rows = read_csv::<GenderRow>(&out.join(GENDER_SERIES))?;
            if rows.is_empty() {
                return Err(empty("gender series"));
            }
            let gpt = rows
                .iter()
                .map(|r| (r.start_year as f64 + 5.0, r.gpt))
                .collect();
            let hdg = rows
                .iter()
                .filter_map(|r| Some((r.start_year as f64 + 5.0, r.hdg?)))
                .collect();
            let series = [
                Series {
                    name: "GPT".into(),
                    color: PALETTE[0].into(),
                    points: gpt,
                },
                Series {
                    name: "HDG".into(),
                    color: PALETTE[1].into(),
                    points: hdg,
                },
            ];
            plot::line_chart(
                "Gender preference and happiness difference",
                "year",
                "female minus male",
                &series,
                true,
            )
        }
        PlotKind::ColorBands => {
            let rows = read_csv::<ColorBandRow>(&out.join(COLOR_BY_BAND))?;
            if rows.iter().all(|r| r.n == 0) {
                return Err(empty("color by band"));
            }
            let cats: Vec<String> = ColorLabel::ALL
                .iter()
                .map(|c| c.name().to_string())
                .collect();
            let groups: Vec<(String, String, Vec<f64>)> = IntensityBand::ALL
                .iter()
                .enumerate()
                .map(|(i, band)| {
                    let mut vals: Vec<f64> = cats
                        .iter()
                        .map(|c| {
                            rows.iter()
                                .find(|r| r.band == band.as_str() && &r.color == c)
                                .map_or(0.0, |r| r.mean)
                        })
                        .collect();
                    // Dilation lets raw ratios overlap, so shares are
                    // normalised per band for display only.
                    let total: f64 = vals.iter().sum();
                    if total > 0.0 {
                        vals.iter_mut().for_each(|v| *v /= total);
                    }
                    (band.range_label().to_string(), PALETTE[i].to_string(), vals)
                })
                .collect();
            plot::bar_chart(
                "Color share by happiness band",
                "color",
                "share of colored area",
                &cats,
                &groups,
            )
        }
        PlotKind::Moran => {
            let rows = read_csv::<ScatterRow>(&out.join(MORAN_SCATTER))?;
            if rows.is_empty() {
                return Err(empty("Moran scatter"));
            }
            let pts: Vec<(String, f64, f64)> =
                rows.into_iter().map(|r| (r.country, r.z, r.lag)).collect();
            plot::scatter_chart(
                "Moran scatter plot",
                "centered happiness",
                "spatial lag",
                &pts,
            )
        }
        PlotKind::All => unreachable!("expanded by cmd_plot"),
    })
}

/// Renders charts from the reports in the output directory. Nothing is
/// written unless every requested chart has data.
pub fn cmd_plot(config: &PipelineConfig, which: PlotKind) -> Result<Vec<PathBuf>, CliError> {
    config.validate(false)?;
    let kinds: Vec<PlotKind> = if which == PlotKind::All {
        PlotKind::EACH.to_vec()
    } else {
        vec![which]
    };
    let out = &config.output_dir;
    let rendered: Vec<(PathBuf, String)> = kinds
        .into_iter()
        .map(|k| Ok((out.join(k.file_name()), svg_for(out, k)?)))
        .collect::<Result<_, CliError>>()?;
    for (path, svg) in &rendered {
        write_bytes(path, svg.as_bytes())?;
    }
    Ok(rendered.into_iter().map(|(p, _)| p).collect())
}
