//! Country weights, global Moran's I and choropleth export.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::corpus::{CountryTable, PaintingRecord, BUNDLED_ADJACENCY, BUNDLED_CENTROIDS};

pub const DEFAULT_KNN: usize = 4;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SpatialError {
    #[error("adjacency references unknown country {0}")]
    UnknownCountry(String),
    #[error("no centroid for island unit(s): {}", .0.join(", "))]
    MissingCentroid(Vec<String>),
    #[error("zero variance, Moran's I undefined")]
    ZeroVariance,
    #[error("all spatial weights are zero")]
    ZeroWeights,
    #[error("Moran's I needs at least 3 units, have {0}")]
    TooFewUnits(usize),
    #[error("{values} values for {units} units")]
    LengthMismatch { values: usize, units: usize },
    #[error("knn needs 1 <= k < n (k = {k}, n = {n})")]
    InvalidK { k: usize, n: usize },
    #[error("nothing to export")]
    Empty,
    #[error("malformed table: {0}")]
    Table(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    BinaryContiguity,
    #[default]
    RowStandardized,
    KnnCentroid(usize),
}

pub type Centroids = BTreeMap<String, (f64, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    pub units: Vec<String>,
    pub w: Vec<Vec<f64>>,
    pub scheme: WeightScheme,
    /// Units without any neighbor and without a centroid fallback.
    pub islands: Vec<String>,
}

impl WeightMatrix {
    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.w[i].iter().sum()
    }

    pub fn s0(&self) -> f64 {
        self.w.iter().flatten().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.w[i][j] == self.w[j][i]))
    }

    fn isolated(&self, i: usize) -> bool {
        self.row_sum(i) == 0.0 && self.w.iter().all(|row| row[i] == 0.0)
    }
}

#[derive(Debug, Deserialize)]
struct PairRow {
    country_a: String,
    country_b: String,
}

#[derive(Debug, Deserialize)]
struct CentroidRow {
    country: String,
    lat: f64,
    lon: f64,
}

pub fn read_adjacency<R: Read>(reader: R) -> Result<Vec<(String, String)>, SpatialError> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader)
        .deserialize::<PairRow>()
        .map(|r| {
            r.map(|r| (r.country_a, r.country_b))
                .map_err(|e| SpatialError::Table(e.to_string()))
        })
        .collect()
}

pub fn read_centroids<R: Read>(reader: R) -> Result<Centroids, SpatialError> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader)
        .deserialize::<CentroidRow>()
        .map(|r| {
            r.map(|r| (r.country, (r.lat, r.lon)))
                .map_err(|e| SpatialError::Table(e.to_string()))
        })
        .collect()
}

pub fn bundled_adjacency() -> Vec<(String, String)> {
    read_adjacency(BUNDLED_ADJACENCY.as_bytes()).expect("bundled adjacency table is well formed")
}

pub fn bundled_centroids() -> Centroids {
    read_centroids(BUNDLED_CENTROIDS.as_bytes()).expect("bundled centroid table is well formed")
}

/// Pairs whose two members are both in `units`.
pub fn restrict_adjacency(pairs: &[(String, String)], units: &[String]) -> Vec<(String, String)> {
    let set: BTreeSet<&str> = units.iter().map(String::as_str).collect();
    pairs
        .iter()
        .filter(|(a, b)| set.contains(a.as_str()) && set.contains(b.as_str()))
        .cloned()
        .collect()
}

/// Great-circle distance in kilometres.
pub fn haversine_km(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (lat1, lon1) = (a.0.to_radians(), a.1.to_radians());
    let (lat2, lon2) = (b.0.to_radians(), b.1.to_radians());
    let h = ((lat2 - lat1) / 2.0).sin().powi(2)
        + lat1.cos() * lat2.cos() * ((lon2 - lon1) / 2.0).sin().powi(2);
    2.0 * 6371.0 * h.sqrt().asin()
}

fn nearest(i: usize, k: usize, units: &[String], centroids: &Centroids) -> Vec<usize> {
    let here = centroids[&units[i]];
    let mut others: Vec<(f64, usize)> = (0..units.len())
        .filter(|&j| j != i)
        .filter_map(|j| {
            centroids
                .get(&units[j])
                .map(|&c| (haversine_km(here, c), j))
        })
        .collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    others.into_iter().take(k).map(|(_, j)| j).collect()
}

fn missing_centroids(
    idx: impl Iterator<Item = usize>,
    units: &[String],
    centroids: &Centroids,
) -> Vec<String> {
    idx.filter(|&i| !centroids.contains_key(&units[i]))
        .map(|i| units[i].clone())
        .collect()
}

/// Builds a weight matrix over `units`. Under the contiguity schemes, units
/// without a shared border take their `DEFAULT_KNN` nearest centroids as
/// neighbors when `centroids` is given, and are listed as islands otherwise.
pub fn build_weights(
    pairs: &[(String, String)],
    units: &[String],
    scheme: WeightScheme,
    centroids: Option<&Centroids>,
) -> Result<WeightMatrix, SpatialError> {
    let n = units.len();
    let index: BTreeMap<&str, usize> = units
        .iter()
        .enumerate()
        .map(|(i, u)| (u.as_str(), i))
        .collect();
    let mut w = vec![vec![0.0; n]; n];
    let mut islands = Vec::new();

    if let WeightScheme::KnnCentroid(k) = scheme {
        if k == 0 || k >= n {
            return Err(SpatialError::InvalidK { k, n });
        }
        let centroids = centroids.ok_or_else(|| SpatialError::MissingCentroid(units.to_vec()))?;
        let missing = missing_centroids(0..n, units, centroids);
        if !missing.is_empty() {
            return Err(SpatialError::MissingCentroid(missing));
        }
        for (i, row) in w.iter_mut().enumerate() {
            for j in nearest(i, k, units, centroids) {
                row[j] = 1.0;
            }
        }
        return Ok(WeightMatrix {
            units: units.to_vec(),
            w,
            scheme,
            islands,
        });
    }

    for (a, b) in pairs {
        let ia = *index
            .get(a.as_str())
            .ok_or_else(|| SpatialError::UnknownCountry(a.clone()))?;
        let ib = *index
            .get(b.as_str())
            .ok_or_else(|| SpatialError::UnknownCountry(b.clone()))?;
        if ia != ib {
            w[ia][ib] = 1.0;
            w[ib][ia] = 1.0;
        }
    }

    let lonely: Vec<usize> = (0..n).filter(|&i| w[i].iter().all(|&x| x == 0.0)).collect();
    match centroids {
        Some(centroids) if !lonely.is_empty() => {
            let missing = missing_centroids(lonely.iter().copied(), units, centroids);
            if !missing.is_empty() {
                return Err(SpatialError::MissingCentroid(missing));
            }
            for &i in &lonely {
                for j in nearest(i, DEFAULT_KNN, units, centroids) {
                    w[i][j] = 1.0;
                }
            }
        }
        _ => islands = lonely.iter().map(|&i| units[i].clone()).collect(),
    }

    if scheme == WeightScheme::RowStandardized {
        row_standardize(&mut w);
    }
    Ok(WeightMatrix {
        units: units.to_vec(),
        w,
        scheme,
        islands,
    })
}

/// Scales every non-zero row to sum to 1.
pub fn row_standardize(w: &mut [Vec<f64>]) {
    for row in w {
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            row.iter_mut().for_each(|x| *x /= s);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrant {
    HighHigh,
    LowLow,
    HighLow,
    LowHigh,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [
        Quadrant::HighHigh,
        Quadrant::LowLow,
        Quadrant::HighLow,
        Quadrant::LowHigh,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Quadrant::HighHigh => "high_high",
            Quadrant::LowLow => "low_low",
            Quadrant::HighLow => "high_low",
            Quadrant::LowHigh => "low_high",
        }
    }
}

/// Zero counts as high on either axis.
pub fn scatter_quadrant(z: f64, lag: f64) -> Quadrant {
    match (z >= 0.0, lag >= 0.0) {
        (true, true) => Quadrant::HighHigh,
        (false, false) => Quadrant::LowLow,
        (true, false) => Quadrant::HighLow,
        (false, true) => Quadrant::LowHigh,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterPoint {
    pub unit: String,
    pub z: f64,
    pub lag: f64,
    pub quadrant: Quadrant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoranResult {
    pub i: f64,
    pub n: usize,
    /// Expectation under spatial randomness, `-1 / (n - 1)`.
    pub expected: f64,
    pub scatter: Vec<ScatterPoint>,
    /// Units with no neighbor in either direction, left out of the statistic.
    pub excluded: Vec<String>,
}

/// Global Moran's I of `values`, aligned with `w.units`.
pub fn morans_i(values: &[f64], w: &WeightMatrix) -> Result<MoranResult, SpatialError> {
    if values.len() != w.len() {
        return Err(SpatialError::LengthMismatch {
            values: values.len(),
            units: w.len(),
        });
    }
    let keep: Vec<usize> = (0..w.len()).filter(|&i| !w.isolated(i)).collect();
    let excluded = (0..w.len())
        .filter(|&i| w.isolated(i))
        .map(|i| w.units[i].clone())
        .collect();
    let n = keep.len();
    if n < 3 {
        return Err(if w.len() >= 3 && w.s0() == 0.0 {
            SpatialError::ZeroWeights
        } else {
            SpatialError::TooFewUnits(n)
        });
    }

    let mean = keep.iter().map(|&i| values[i]).sum::<f64>() / n as f64;
    let z: Vec<f64> = keep.iter().map(|&i| values[i] - mean).collect();
    let m2: f64 = z.iter().map(|v| v * v).sum();
    let scale = keep
        .iter()
        .map(|&i| values[i].abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    if m2 <= (1e-12 * scale).powi(2) * n as f64 {
        return Err(SpatialError::ZeroVariance);
    }

    let mut s0 = 0.0;
    let mut cross = 0.0;
    let mut scatter = Vec::new();
    for (a, &i) in keep.iter().enumerate() {
        let mut row_sum = 0.0;
        let mut lag = 0.0;
        for (b, &j) in keep.iter().enumerate() {
            let wij = w.w[i][j];
            row_sum += wij;
            lag += wij * z[b];
        }
        s0 += row_sum;
        cross += z[a] * lag;
        if row_sum > 0.0 {
            let lag = lag / row_sum;
            scatter.push(ScatterPoint {
                unit: w.units[i].clone(),
                z: z[a],
                lag,
                quadrant: scatter_quadrant(z[a], lag),
            });
        }
    }
    if s0 == 0.0 {
        return Err(SpatialError::ZeroWeights);
    }
    Ok(MoranResult {
        i: n as f64 / s0 * cross / m2,
        n,
        expected: -1.0 / (n as f64 - 1.0),
        scatter,
        excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountryMean {
    pub mean_happiness: f64,
    pub n_paintings: usize,
}

/// Face-level mean happiness per ISO country code, with the number of
/// paintings that contributed at least one face.
pub fn country_means(db: &[PaintingRecord]) -> BTreeMap<String, CountryMean> {
    let mut acc: BTreeMap<String, (f64, usize, usize)> = BTreeMap::new();
    for r in db {
        let Some(c) = r.painting_country.as_deref() else {
            continue;
        };
        if !r.has_faces() {
            continue;
        }
        let e = acc.entry(c.to_string()).or_default();
        e.0 += r.face_list().iter().map(|f| f.happiness()).sum::<f64>();
        e.1 += r.face_list().len();
        e.2 += 1;
    }
    acc.into_iter()
        .map(|(c, (s, faces, n))| {
            (
                c,
                CountryMean {
                    mean_happiness: s / faces as f64,
                    n_paintings: n,
                },
            )
        })
        .collect()
}

pub fn choropleth_csv(
    means: &BTreeMap<String, CountryMean>,
    countries: &CountryTable,
) -> Result<String, SpatialError> {
    if means.is_empty() {
        return Err(SpatialError::Empty);
    }
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(["country", "iso_code", "mean_happiness", "n_paintings"])
        .map_err(table_err)?;
    for (code, m) in means {
        out.write_record([
            countries.name_of(code),
            code,
            &m.mean_happiness.to_string(),
            &m.n_paintings.to_string(),
        ])
        .map_err(table_err)?;
    }
    let bytes = out
        .into_inner()
        .map_err(|e| SpatialError::Table(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn scatter_csv(result: &MoranResult) -> String {
    let mut out = String::from("country,z,lag,quadrant\n");
    for p in &result.scatter {
        out.push_str(&format!(
            "{},{},{},{}\n",
            p.unit,
            p.z,
            p.lag,
            p.quadrant.as_str()
        ));
    }
    out
}

fn table_err(e: csv::Error) -> SpatialError {
    SpatialError::Table(e.to_string())
}
