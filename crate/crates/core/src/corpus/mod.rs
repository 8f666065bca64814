//! Painting metadata: ingestion, deduplication, persistence and the split
//! into the temporal (dated) and spatial (located) databases.

mod lookup;
mod store;

use std::collections::BTreeMap;
use std::io::{BufRead, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::color::ColorProfile;
use crate::emotion::FaceAnnotation;
use crate::temporal::parse_date;

pub use lookup::{
    Continent, CountryTable, BUNDLED_ADJACENCY, BUNDLED_CENTROIDS, BUNDLED_COUNTRY_CODES,
    BUNDLED_COUNTRY_CONTINENTS,
};
pub use store::{CorpusStore, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("store line {line}: {message}")]
    Store { line: usize, message: String },
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
    #[error("lookup table: {0}")]
    Lookup(String),
    #[error("empty database")]
    EmptyDatabase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaintingRecord {
    pub painting_name: String,
    pub artist: String,
    pub painting_url: String,
    pub raw_date: Option<String>,
    /// ISO 3166-1 alpha-2.
    pub painting_country: Option<String>,
    pub painting_continent: Option<Continent>,
    /// `None` until the painting has been through an emotion backend; an
    /// empty list means no face was found.
    pub faces: Option<Vec<FaceAnnotation>>,
    pub color_profile: Option<ColorProfile>,
    pub source: String,
}

impl PaintingRecord {
    pub fn dedup_key(&self) -> String {
        dedup_key(&self.painting_name, &self.artist)
    }

    pub fn continent(&self) -> Continent {
        self.painting_continent.unwrap_or(Continent::Unknown)
    }

    pub fn face_list(&self) -> &[FaceAnnotation] {
        self.faces.as_deref().unwrap_or(&[])
    }

    pub fn has_faces(&self) -> bool {
        !self.face_list().is_empty()
    }

    /// Mean happiness over this painting's faces.
    pub fn mean_happiness(&self) -> Option<f64> {
        let faces = self.face_list();
        if faces.is_empty() {
            return None;
        }
        Some(faces.iter().map(FaceAnnotation::happiness).sum::<f64>() / faces.len() as f64)
    }

    pub fn parsed_year(&self) -> Option<i32> {
        self.raw_date.as_deref().and_then(|d| parse_date(d).year())
    }
}

fn normalize_part(s: &str) -> String {
    let kept: String = s
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .flat_map(char::to_lowercase)
        .collect();
    kept.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Lowercased, punctuation-free, whitespace-collapsed `name|artist`.
pub fn dedup_key(name: &str, artist: &str) -> String {
    format!("{}|{}", normalize_part(name), normalize_part(artist))
}

/// One input row. Every column is optional at this level; validation
/// decides acceptance.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
pub struct RawRow {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub artist: Option<String>,
    #[serde(default)]
    pub url: Option<String>,
    #[serde(default)]
    pub date: Option<String>,
    #[serde(default)]
    pub country: Option<String>,
}

/// A row that could not even be decoded carries its decode error.
pub type RowResult = Result<RawRow, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    MissingName,
    MissingArtist,
    MissingUrl,
    InvalidUrl,
    MalformedRow,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::MissingName => "missing_name",
            RejectReason::MissingArtist => "missing_artist",
            RejectReason::MissingUrl => "missing_url",
            RejectReason::InvalidUrl => "invalid_url",
            RejectReason::MalformedRow => "malformed_row",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestReport {
    pub accepted: usize,
    pub rejected: usize,
    pub reasons: BTreeMap<&'static str, usize>,
}

impl IngestReport {
    fn reject(&mut self, reason: RejectReason) {
        self.rejected += 1;
        *self.reasons.entry(reason.as_str()).or_default() += 1;
    }
}

fn non_empty(v: &Option<String>) -> Option<&str> {
    v.as_deref().map(str::trim).filter(|s| !s.is_empty())
}

/// Validates one row into a record.
pub fn record_from_row(
    row: &RawRow,
    source: &str,
    countries: &CountryTable,
) -> Result<PaintingRecord, RejectReason> {
    let name = non_empty(&row.name).ok_or(RejectReason::MissingName)?;
    let artist = non_empty(&row.artist).ok_or(RejectReason::MissingArtist)?;
    let url = non_empty(&row.url).ok_or(RejectReason::MissingUrl)?;
    if url::Url::parse(url).is_err() {
        return Err(RejectReason::InvalidUrl);
    }
    let country = non_empty(&row.country)
        .and_then(|c| countries.resolve(c))
        .map(str::to_string);
    let continent = country
        .as_deref()
        .map(|c| countries.continent_of(c))
        .unwrap_or(Continent::Unknown);
    Ok(PaintingRecord {
        painting_name: name.to_string(),
        artist: artist.to_string(),
        painting_url: url.to_string(),
        raw_date: non_empty(&row.date).map(str::to_string),
        painting_country: country,
        painting_continent: Some(continent),
        faces: None,
        color_profile: None,
        source: source.to_string(),
    })
}

/// Appends every valid row to `store`; invalid rows are counted, not fatal.
pub fn ingest_metadata(
    store: &mut CorpusStore,
    rows: impl IntoIterator<Item = RowResult>,
    source: &str,
    countries: &CountryTable,
) -> IngestReport {
    let mut report = IngestReport::default();
    for row in rows {
        let record = match row {
            Ok(row) => record_from_row(&row, source, countries),
            Err(_) => Err(RejectReason::MalformedRow),
        };
        match record {
            Ok(record) => {
                store.records.push(record);
                report.accepted += 1;
            }
            Err(reason) => report.reject(reason),
        }
    }
    report
}

/// Reads CSV rows with header `name,artist,url,date,country`. I/O failures
/// are fatal; undecodable rows become row-level errors.
pub fn read_csv_rows<R: Read>(reader: R) -> Result<Vec<RowResult>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for row in rdr.deserialize::<RawRow>() {
        match row {
            Ok(r) => rows.push(Ok(r)),
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(e) => rows.push(Err(e.to_string())),
        }
    }
    Ok(rows)
}

pub fn read_ndjson_rows<R: BufRead>(reader: R) -> Result<Vec<RowResult>, CorpusError> {
    let mut rows = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str::<RawRow>(&line).map_err(|e| e.to_string()));
    }
    Ok(rows)
}

/// Picks the reader from the extension: `.ndjson`/`.jsonl`/`.json` are
/// newline-delimited JSON, anything else CSV.
pub fn read_rows_from_path(path: &Path) -> Result<Vec<RowResult>, CorpusError> {
    let file = std::fs::File::open(path)?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    match ext.as_str() {
        "ndjson" | "jsonl" | "json" => read_ndjson_rows(std::io::BufReader::new(file)),
        _ => read_csv_rows(file),
    }
}

/// Temporal database: records whose date parses. Spatial database: records
/// with a known country. Both are owned copies.
pub fn split_databases(store: &CorpusStore) -> (Vec<PaintingRecord>, Vec<PaintingRecord>) {
    let temporal = store
        .records
        .iter()
        .filter(|r| r.parsed_year().is_some())
        .cloned()
        .collect();
    let spatial = store
        .records
        .iter()
        .filter(|r| r.painting_country.is_some())
        .cloned()
        .collect();
    (temporal, spatial)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinentSummary {
    pub continent: Continent,
    pub count: usize,
    pub percentage: f64,
    pub paintings_with_emotions: usize,
}

/// Per-continent counts in table order, omitting continents with no record.
pub fn summarize_by_continent(db: &[PaintingRecord]) -> Result<Vec<ContinentSummary>, CorpusError> {
    if db.is_empty() {
        return Err(CorpusError::EmptyDatabase);
    }
    let mut counts: BTreeMap<Continent, (usize, usize)> = BTreeMap::new();
    for r in db {
        let entry = counts.entry(r.continent()).or_default();
        entry.0 += 1;
        entry.1 += usize::from(r.has_faces());
    }
    let total = db.len() as f64;
    Ok(Continent::ALL
        .into_iter()
        .filter_map(|c| {
            counts.get(&c).map(|&(count, with)| ContinentSummary {
                continent: c,
                count,
                percentage: count as f64 / total,
                paintings_with_emotions: with,
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emotion::{EmotionVector, Gender};
    use proptest::prelude::*;

    fn row(name: &str, artist: &str, url: &str, date: &str, country: &str) -> RawRow {
        let opt = |s: &str| {
            if s.is_empty() {
                None
            } else {
                Some(s.to_string())
            }
        };
        RawRow {
            name: opt(name),
            artist: opt(artist),
            url: opt(url),
            date: opt(date),
            country: opt(country),
        }
    }

    fn ingest(rows: Vec<RawRow>) -> (CorpusStore, IngestReport) {
        let mut store = CorpusStore::new();
        let report = ingest_metadata(
            &mut store,
            rows.into_iter().map(Ok),
            "test",
            &CountryTable::bundled(),
        );
        (store, report)
    }

    #[test]
    fn accepts_figure_one_painting() {
        let (store, report) = ingest(vec![row(
            "Angel",
            "Abbott Handerson Thayer",
            "https://x/a.jpg",
            "1889",
            "",
        )]);
        assert_eq!(report.accepted, 1);
        assert_eq!(store.records[0].parsed_year(), Some(1889));
        assert_eq!(store.records[0].continent(), Continent::Unknown);
    }

    #[test]
    fn rejects_with_reasons() {
        let (store, report) = ingest(vec![
            row("Angel", "", "https://x/a.jpg", "", ""),
            row("", "Someone", "https://x/a.jpg", "", ""),
            row("A", "B", "", "", ""),
            row("A", "B", "not a url", "", ""),
        ]);
        assert!(store.records.is_empty());
        assert_eq!(report.rejected, 4);
        assert_eq!(report.reasons["missing_artist"], 1);
        assert_eq!(report.reasons["missing_name"], 1);
        assert_eq!(report.reasons["missing_url"], 1);
        assert_eq!(report.reasons["invalid_url"], 1);
    }

    #[test]
    fn malformed_rows_are_not_fatal() {
        let csv = "name,artist,url,date,country\nA,B,https://x/1,1500,IT\n\"unterminated,B\n";
        let rows = read_csv_rows(csv.as_bytes()).unwrap();
        let mut store = CorpusStore::new();
        let report = ingest_metadata(&mut store, rows, "t", &CountryTable::bundled());
        assert_eq!(report.accepted, 1);
        assert_eq!(report.accepted + report.rejected, 2);
    }

    #[test]
    fn ndjson_rows_with_bad_line() {
        let text = "{\"name\":\"A\",\"artist\":\"B\",\"url\":\"https://x\"}\nnot json\n\n";
        let rows = read_ndjson_rows(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].is_ok() && rows[1].is_err());
    }

    #[test]
    fn country_resolution_sets_continent() {
        let (store, _) = ingest(vec![
            row("A", "B", "https://x/1", "", "Italy"),
            row("C", "D", "https://x/2", "", "Narnia"),
        ]);
        assert_eq!(store.records[0].painting_country.as_deref(), Some("IT"));
        assert_eq!(store.records[0].continent(), Continent::Europe);
        assert_eq!(store.records[1].painting_country, None);
        assert_eq!(store.records[1].continent(), Continent::Unknown);
    }

    #[test]
    fn dedup_key_normalization() {
        assert_eq!(
            dedup_key("The  Scream", "Edvard Munch"),
            "the scream|edvard munch"
        );
        assert_eq!(
            dedup_key("the scream", "EDVARD MUNCH"),
            dedup_key("The  Scream", "Edvard Munch")
        );
        assert_eq!(
            dedup_key("The Scream!", " Edvard  Munch."),
            "the scream|edvard munch"
        );
    }

    #[test]
    fn duplicate_rows_collapse() {
        let r = row(
            "Angel",
            "Abbott Handerson Thayer",
            "https://x/a.jpg",
            "1889",
            "",
        );
        let mut other_url = r.clone();
        other_url.url = Some("https://y/angel.png".into());
        let (mut store, _) = ingest(vec![r.clone(), r, other_url]);
        assert_eq!(store.records[0].dedup_key(), store.records[2].dedup_key());
        store.dedup();
        assert_eq!(store.records.len(), 1);
    }

    #[test]
    fn split_by_date_and_country() {
        let (store, _) = ingest(vec![
            row("T", "a", "https://x/1", "1549", ""),
            row("S", "a", "https://x/2", "", "IT"),
            row("B", "a", "https://x/3", "1620-1628", "FR"),
            row("N", "a", "https://x/4", "1600-1650", ""),
        ]);
        let (temporal, spatial) = split_databases(&store);
        let names = |db: &[PaintingRecord]| {
            db.iter()
                .map(|r| r.painting_name.clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(names(&temporal), ["T", "B"]);
        assert_eq!(names(&spatial), ["S", "B"]);
    }

    fn with_continent(c: Continent, faces: usize) -> PaintingRecord {
        let face = FaceAnnotation {
            gender: Gender::Female,
            emotions: EmotionVector::default(),
        };
        PaintingRecord {
            painting_name: "p".into(),
            artist: "a".into(),
            painting_url: "https://x".into(),
            raw_date: None,
            painting_country: None,
            painting_continent: Some(c),
            faces: Some(vec![face; faces]),
            color_profile: None,
            source: "t".into(),
        }
    }

    #[test]
    fn continent_summary_examples() {
        let db = vec![
            with_continent(Continent::Europe, 1),
            with_continent(Continent::Europe, 0),
            with_continent(Continent::Asia, 2),
            with_continent(Continent::Europe, 3),
        ];
        let rows = summarize_by_continent(&db).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(
            (
                rows[0].continent,
                rows[0].count,
                rows[0].percentage,
                rows[0].paintings_with_emotions
            ),
            (Continent::Europe, 3, 0.75, 2)
        );
        assert_eq!(
            (rows[1].continent, rows[1].percentage),
            (Continent::Asia, 0.25)
        );

        let unknown = summarize_by_continent(&[with_continent(Continent::Unknown, 0)]).unwrap();
        assert_eq!(unknown.len(), 1);
        assert_eq!(unknown[0].percentage, 1.0);

        assert!(matches!(
            summarize_by_continent(&[]),
            Err(CorpusError::EmptyDatabase)
        ));
    }

    #[test]
    fn planted_continent_histogram() {
        let planted = [
            (Continent::Europe, 612),
            (Continent::Oceania, 7),
            (Continent::NorthAmerica, 150),
            (Continent::SouthAmerica, 31),
            (Continent::Asia, 120),
            (Continent::Africa, 5),
            (Continent::Unknown, 75),
        ];
        let mut db: Vec<PaintingRecord> = Vec::new();
        // Interleave continents so order in the input does not matter.
        let mut left: Vec<(Continent, usize)> = planted.to_vec();
        while left.iter().any(|(_, n)| *n > 0) {
            for (c, n) in left.iter_mut().filter(|(_, n)| *n > 0) {
                db.push(with_continent(*c, *n % 2));
                *n -= 1;
            }
        }
        assert_eq!(db.len(), 1000);
        let rows = summarize_by_continent(&db).unwrap();
        for (c, n) in planted {
            let row = rows.iter().find(|r| r.continent == c).unwrap();
            assert_eq!(row.count, n);
            assert_eq!(row.percentage, n as f64 / 1000.0);
        }
    }

    proptest! {
        #[test]
        fn percentages_sum_to_one(picks in proptest::collection::vec(0usize..7, 1..300)) {
            let db: Vec<_> = picks.iter().map(|i| with_continent(Continent::ALL[*i], 0)).collect();
            let total: f64 = summarize_by_continent(&db).unwrap().iter().map(|r| r.percentage).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }
}
