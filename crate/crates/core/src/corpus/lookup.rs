//! Country name/code and country/continent tables.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CorpusError;

pub const BUNDLED_COUNTRY_CODES: &str = include_str!("../../data/country_codes.csv");
pub const BUNDLED_COUNTRY_CONTINENTS: &str = include_str!("../../data/country_continents.csv");
pub const BUNDLED_ADJACENCY: &str = include_str!("../../data/country_adjacency.csv");
pub const BUNDLED_CENTROIDS: &str = include_str!("../../data/country_centroids.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Continent {
    Europe,
    Oceania,
    #[serde(rename = "North America")]
    NorthAmerica,
    #[serde(rename = "South America")]
    SouthAmerica,
    Asia,
    Africa,
    Unknown,
}

impl Continent {
    /// Row order of the continental summary table.
    pub const ALL: [Continent; 7] = [
        Continent::Europe,
        Continent::Oceania,
        Continent::NorthAmerica,
        Continent::SouthAmerica,
        Continent::Asia,
        Continent::Africa,
        Continent::Unknown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Continent::Europe => "Europe",
            Continent::Oceania => "Oceania",
            Continent::NorthAmerica => "North America",
            Continent::SouthAmerica => "South America",
            Continent::Asia => "Asia",
            Continent::Africa => "Africa",
            Continent::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for Continent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Continent {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Continent::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| CorpusError::Lookup(format!("unknown continent {s:?}")))
    }
}

#[derive(Debug, Deserialize)]
struct NameRow {
    name: String,
    code: String,
}

#[derive(Debug, Deserialize)]
struct ContinentRow {
    code: String,
    continent: String,
}

fn normalize_name(name: &str) -> String {
    name.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Resolves loosely written country names to ISO alpha-2 codes and codes to
/// continents.
#[derive(Debug, Clone)]
pub struct CountryTable {
    by_name: HashMap<String, String>,
    canonical_names: HashMap<String, String>,
    continents: HashMap<String, Continent>,
}

impl CountryTable {
    pub fn from_csv(codes_csv: &str, continents_csv: &str) -> Result<Self, CorpusError> {
        let mut by_name = HashMap::new();
        let mut canonical_names = HashMap::new();
        for row in csv::Reader::from_reader(codes_csv.as_bytes()).deserialize::<NameRow>() {
            let row = row?;
            let code = row.code.trim().to_ascii_uppercase();
            canonical_names
                .entry(code.clone())
                .or_insert_with(|| row.name.trim().to_string());
            by_name.insert(normalize_name(&row.name), code);
        }
        let mut continents = HashMap::new();
        for row in csv::Reader::from_reader(continents_csv.as_bytes()).deserialize::<ContinentRow>()
        {
            let row = row?;
            continents.insert(row.code.trim().to_ascii_uppercase(), row.continent.parse()?);
        }
        Ok(CountryTable {
            by_name,
            canonical_names,
            continents,
        })
    }

    pub fn bundled() -> Self {
        Self::from_csv(BUNDLED_COUNTRY_CODES, BUNDLED_COUNTRY_CONTINENTS)
            .expect("bundled country tables parse")
    }

    pub fn from_files(codes: &Path, continents: &Path) -> Result<Self, CorpusError> {
        Self::from_csv(
            &std::fs::read_to_string(codes)?,
            &std::fs::read_to_string(continents)?,
        )
    }

    /// Accepts an alpha-2 code in any case or any listed name/alias.
    pub fn resolve(&self, raw: &str) -> Option<&str> {
        let trimmed = raw.trim();
        if trimmed.len() == 2 {
            let upper = trimmed.to_ascii_uppercase();
            if let Some((code, _)) = self.continents.get_key_value(&upper) {
                return Some(code.as_str());
            }
        }
        self.by_name
            .get(&normalize_name(trimmed))
            .map(String::as_str)
    }

    pub fn continent_of(&self, code: &str) -> Continent {
        self.continents
            .get(code)
            .copied()
            .unwrap_or(Continent::Unknown)
    }

    pub fn name_of<'a>(&'a self, code: &'a str) -> &'a str {
        self.canonical_names
            .get(code)
            .map(String::as_str)
            .unwrap_or(code)
    }

    pub fn contains_code(&self, code: &str) -> bool {
        self.continents.contains_key(code)
    }
}
