//! Color/happiness correlation and cross-country coefficients of variation.
//!
//! Every painting with at least one face and a color profile contributes one
//! sample: its mean face happiness and its nine color ratios.

mod correlation;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::color::{ColorLabel, ColorProfile};
use crate::corpus::{Continent, PaintingRecord};
use crate::temporal::{intensity_band, IntensityBand};

pub use correlation::{p_value, pearson_r, significance_band, SignificanceBand};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StatsError {
    #[error("degenerate series")]
    DegenerateSeries,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} values, have {have}")]
    TooFewValues { needed: usize, have: usize },
    #[error("value {0} out of range")]
    OutOfRange(f64),
    #[error("undefined CV")]
    UndefinedCv,
    #[error("countries absent from the database: {0:?}")]
    MissingCountries(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    World,
    Continent,
    Country,
}

impl Scale {
    pub fn as_str(self) -> &'static str {
        match self {
            Scale::World => "world",
            Scale::Continent => "continent",
            Scale::Country => "country",
        }
    }
}

/// One painting's contribution to the color statistics.
#[derive(Debug, Clone, Copy)]
pub struct ColorSample<'a> {
    pub happiness: f64,
    pub profile: ColorProfile,
    pub continent: Continent,
    pub country: Option<&'a str>,
}

pub fn samples(db: &[PaintingRecord]) -> Vec<ColorSample<'_>> {
    db.iter()
        .filter_map(|r| {
            Some(ColorSample {
                happiness: r.mean_happiness()?,
                profile: r.color_profile?,
                continent: r.continent(),
                country: r.painting_country.as_deref(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationCell {
    pub scale: Scale,
    pub unit: String,
    pub color: ColorLabel,
    pub r: Option<f64>,
    pub p: Option<f64>,
    pub n: usize,
    pub band: SignificanceBand,
}

fn cell(scale: Scale, unit: &str, color: ColorLabel, group: &[&ColorSample]) -> CorrelationCell {
    let n = group.len();
    let mut out = CorrelationCell {
        scale,
        unit: unit.to_string(),
        color,
        r: None,
        p: None,
        n,
        band: SignificanceBand::InsufficientData,
    };
    if n < 3 {
        return out;
    }
    let h: Vec<f64> = group.iter().map(|s| s.happiness).collect();
    let c: Vec<f64> = group.iter().map(|s| s.profile.get(color)).collect();
    match pearson_r(&c, &h) {
        Ok(r) => {
            let p = p_value(r, n).expect("n >= 3 and |r| <= 1");
            out.r = Some(r);
            out.p = Some(p);
            out.band = significance_band(p).expect("p in [0, 1]");
        }
        Err(_) => out.band = SignificanceBand::Undefined,
    }
    out
}

/// One cell per (unit, color). Units are `World`, continent names or ISO
/// country codes, in sorted order.
pub fn correlation_table(db: &[PaintingRecord], scale: Scale) -> Vec<CorrelationCell> {
    let all = samples(db);
    let mut units: BTreeMap<String, Vec<&ColorSample>> = BTreeMap::new();
    for s in &all {
        let unit = match scale {
            Scale::World => Some("World".to_string()),
            Scale::Continent => Some(s.continent.name().to_string()),
            Scale::Country => s.country.map(str::to_string),
        };
        if let Some(unit) = unit {
            units.entry(unit).or_default().push(s);
        }
    }
    if scale == Scale::World && units.is_empty() {
        units.insert("World".into(), Vec::new());
    }
    units
        .iter()
        .flat_map(|(unit, group)| {
            ColorLabel::ALL
                .into_iter()
                .map(move |c| cell(scale, unit, c, group))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CvStats {
    pub std: f64,
    pub ave: f64,
    pub cv: f64,
}

/// `std / ave` with the population standard deviation.
pub fn coefficient_of_variation(values: &[f64]) -> Result<CvStats, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFewValues {
            needed: 2,
            have: values.len(),
        });
    }
    let n = values.len() as f64;
    let ave = values.iter().sum::<f64>() / n;
    if ave == 0.0 {
        return Err(StatsError::UndefinedCv);
    }
    let std = (values.iter().map(|v| (v - ave).powi(2)).sum::<f64>() / n).sqrt();
    Ok(CvStats {
        std,
        ave,
        cv: std / ave,
    })
}

/// CV from already rounded summary numbers.
pub fn cv_from_summary(std: f64, ave: f64) -> Result<f64, StatsError> {
    if ave == 0.0 {
        return Err(StatsError::UndefinedCv);
    }
    Ok(std / ave)
}

pub const DEFAULT_CV_COUNTRIES: [&str; 6] = ["US", "CN", "DE", "FR", "IT", "ES"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvCell {
    pub color: ColorLabel,
    pub band: IntensityBand,
    pub n_countries: usize,
    pub std: f64,
    pub ave: f64,
    /// `None` when every country mean is zero.
    pub cv: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvTable {
    pub cells: Vec<CvCell>,
    /// (country, band) pairs without any painting in the band.
    pub excluded: Vec<(String, IntensityBand)>,
    /// Bands left with fewer than two countries, so no CV exists.
    pub undefined_bands: Vec<IntensityBand>,
}

/// Dispersion across countries of the per-country mean color ratio, for
/// each happiness band and color.
pub fn cv_table(
    db: &[PaintingRecord],
    countries: &[&str],
    bands: &[IntensityBand],
) -> Result<CvTable, StatsError> {
    let all = samples(db);
    let missing: Vec<String> = countries
        .iter()
        .filter(|c| {
            !db.iter()
                .any(|r| r.painting_country.as_deref() == Some(**c))
        })
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(StatsError::MissingCountries(missing));
    }

    let mut table = CvTable {
        cells: Vec::new(),
        excluded: Vec::new(),
        undefined_bands: Vec::new(),
    };
    for &band in bands {
        let mut means: Vec<ColorProfile> = Vec::new();
        for &country in countries {
            let group: Vec<&ColorSample> = all
                .iter()
                .filter(|s| {
                    s.country == Some(country) && intensity_band(s.happiness).ok() == Some(band)
                })
                .collect();
            if group.is_empty() {
                table.excluded.push((country.to_string(), band));
                continue;
            }
            let mut mean = ColorProfile::default();
            for c in ColorLabel::ALL {
                mean.set(
                    c,
                    group.iter().map(|s| s.profile.get(c)).sum::<f64>() / group.len() as f64,
                );
            }
            means.push(mean);
        }
        if means.len() < 2 {
            table.undefined_bands.push(band);
            continue;
        }
        for color in ColorLabel::ALL {
            let values: Vec<f64> = means.iter().map(|m| m.get(color)).collect();
            let cell = match coefficient_of_variation(&values) {
                Ok(s) => CvCell {
                    color,
                    band,
                    n_countries: values.len(),
                    std: s.std,
                    ave: s.ave,
                    cv: Some(s.cv),
                },
                Err(_) => CvCell {
                    color,
                    band,
                    n_countries: values.len(),
                    std: 0.0,
                    ave: 0.0,
                    cv: None,
                },
            };
            table.cells.push(cell);
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandColorMean {
    pub band: IntensityBand,
    pub color: ColorLabel,
    pub mean: f64,
    pub n: usize,
}

/// World-scale mean color ratio within each happiness band.
pub fn band_color_means(db: &[PaintingRecord]) -> Vec<BandColorMean> {
    let all = samples(db);
    IntensityBand::ALL
        .into_iter()
        .flat_map(|band| {
            let group: Vec<&ColorSample> = all
                .iter()
                .filter(|s| intensity_band(s.happiness).ok() == Some(band))
                .collect();
            ColorLabel::ALL.into_iter().map(move |color| {
                let n = group.len();
                let mean = if n == 0 {
                    0.0
                } else {
                    group.iter().map(|s| s.profile.get(color)).sum::<f64>() / n as f64
                };
                BandColorMean {
                    band,
                    color,
                    mean,
                    n,
                }
            })
        })
        .collect()
}
