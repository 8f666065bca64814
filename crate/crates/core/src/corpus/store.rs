use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorpusError, PaintingRecord};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct LineOut<'a> {
    schema_version: u32,
    #[serde(flatten)]
    record: &'a PaintingRecord,
}

#[derive(Deserialize)]
struct LineIn {
    schema_version: u32,
    #[serde(flatten)]
    record: PaintingRecord,
}

/// The corpus: one NDJSON line per painting, keys in struct order.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStore {
    pub records: Vec<PaintingRecord>,
    pub schema_version: u32,
}

impl Default for CorpusStore {
    fn default() -> Self {
        Self::new()
    }
}

impl CorpusStore {
    pub fn new() -> Self {
        CorpusStore {
            records: Vec::new(),
            schema_version: SCHEMA_VERSION,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Keeps the first record per dedup key, preserving order. Returns the
    /// number of records removed.
    pub fn dedup(&mut self) -> usize {
        let before = self.records.len();
        let mut seen = HashSet::new();
        self.records.retain(|r| seen.insert(r.dedup_key()));
        before - self.records.len()
    }

    fn line(&self, record: &PaintingRecord) -> String {
        serde_json::to_string(&LineOut {
            schema_version: self.schema_version,
            record,
        })
        .expect("records serialize")
    }

    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&self.line(r));
            out.push('\n');
        }
        out
    }

    pub fn from_ndjson<R: BufRead>(reader: R) -> Result<Self, CorpusError> {
        let mut store = CorpusStore::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: LineIn = serde_json::from_str(&line).map_err(|e| CorpusError::Store {
                line: i + 1,
                message: e.to_string(),
            })?;
            if parsed.schema_version != SCHEMA_VERSION {
                return Err(CorpusError::SchemaVersion(parsed.schema_version));
            }
            store.records.push(parsed.record);
        }
        Ok(store)
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        Self::from_ndjson(BufReader::new(std::fs::File::open(path)?))
    }

    /// Loads `path`, or an empty store if the file does not exist yet.
    pub fn load_or_empty(path: &Path) -> Result<Self, CorpusError> {
        if path.exists() {
            Self::load(path)
        } else {
            Ok(Self::new())
        }
    }

    /// Full rewrite through a temporary file in the same directory.
    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        let tmp = path.with_extension("ndjson.tmp");
        std::fs::write(&tmp, self.to_ndjson())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Appends `records` to the file at `path` and to `self`.
    pub fn append(&mut self, path: &Path, records: Vec<PaintingRecord>) -> Result<(), CorpusError> {
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        for r in &records {
            writeln!(file, "{}", self.line(r))?;
        }
        self.records.extend(records);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::ColorProfile;
    use crate::corpus::Continent;
    use crate::emotion::{stub_annotate, StubBackend};
    use proptest::prelude::*;

    fn record(name: &str, artist: &str) -> PaintingRecord {
        PaintingRecord {
            painting_name: name.into(),
            artist: artist.into(),
            painting_url: format!("https://example.org/{name}.jpg"),
            raw_date: Some("1620-1628".into()),
            painting_country: Some("NL".into()),
            painting_continent: Some(Continent::Europe),
            faces: None,
            color_profile: None,
            source: "wga".into(),
        }
    }

    #[test]
    fn keys_in_fixed_order() {
        let mut store = CorpusStore::new();
        store.records.push(record("A", "B"));
        let line = store.to_ndjson();
        assert!(
            line.starts_with(
                r#"{"schema_version":1,"painting_name":"A","artist":"B","painting_url":"#
            ),
            "{line}"
        );
        assert!(line.ends_with("\"faces\":null,\"color_profile\":null,\"source\":\"wga\"}\n"));
    }

    #[test]
    fn wrong_schema_version_rejected() {
        let text = r#"{"schema_version":9,"painting_name":"A","artist":"B","painting_url":"https://x","raw_date":null,"painting_country":null,"painting_continent":null,"faces":null,"color_profile":null,"source":"s"}"#;
        assert!(matches!(
            CorpusStore::from_ndjson(text.as_bytes()),
            Err(CorpusError::SchemaVersion(9))
        ));
    }

    #[test]
    fn append_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.ndjson");
        let mut store = CorpusStore::new();
        store.append(&path, vec![record("A", "B")]).unwrap();
        store
            .append(&path, vec![record("C", "D"), record("a", "b")])
            .unwrap();
        assert_eq!(CorpusStore::load(&path).unwrap(), store);
        store.dedup();
        store.save(&path).unwrap();
        assert_eq!(CorpusStore::load(&path).unwrap().len(), 2);
    }

    fn arb_record() -> impl Strategy<Value = PaintingRecord> {
        (
            "[A-Za-z ]{1,12}",
            "[A-Za-z.]{1,8}",
            any::<u64>(),
            proptest::option::of(0.0f64..1.0),
            any::<bool>(),
        )
            .prop_map(|(name, artist, seed, red, annotated)| {
                let mut r = record(&name, &artist);
                if annotated {
                    r.faces = Some(stub_annotate(seed, &name));
                }
                r.color_profile = red.map(|red| ColorProfile {
                    red,
                    white: 1.0 - red,
                    ..Default::default()
                });
                r
            })
    }

    proptest! {
        #[test]
        fn ndjson_round_trip_is_byte_equal(records in proptest::collection::vec(arb_record(), 0..8)) {
            let store = CorpusStore { records, schema_version: SCHEMA_VERSION };
            let text = store.to_ndjson();
            let back = CorpusStore::from_ndjson(text.as_bytes()).unwrap();
            prop_assert_eq!(&back, &store);
            prop_assert_eq!(back.to_ndjson(), text);
        }

        #[test]
        fn dedup_is_idempotent(names in proptest::collection::vec("(a|A|b|B| )(x|X)", 0..20)) {
            let mut store = CorpusStore::new();
            store.records = names.iter().map(|n| record(n, "Artist")).collect();
            store.dedup();
            let once = store.clone();
            prop_assert_eq!(store.dedup(), 0);
            prop_assert_eq!(store, once);
        }
    }

    #[test]
    fn stub_backend_uses_dedup_key() {
        use crate::emotion::EmotionBackend;
        let r = record("The Scream", "Edvard Munch");
        let faces = StubBackend { seed: 7 }.annotate(&r).unwrap();
        assert_eq!(faces, stub_annotate(7, "the scream|edvard munch"));
    }
}
