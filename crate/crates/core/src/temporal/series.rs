use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{intensity_band, IntensityBand, NaturalCubicSpline, TemporalError};
use crate::emotion::FaceAnnotation;

pub const SERIES_START: i32 = 1225;
/// Exclusive upper edge of the last decade.
pub const SERIES_END: i32 = 2015;
pub const DECADE_WIDTH: i32 = 10;

/// Start year of the half-open decade `[start, start + 10)` holding `year`.
pub fn decade_start(year: i32) -> Option<i32> {
    if (SERIES_START..SERIES_END).contains(&year) {
        Some(SERIES_START + (year - SERIES_START).div_euclid(DECADE_WIDTH) * DECADE_WIDTH)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BandCounts {
    pub low: usize,
    pub medium: usize,
    pub high: usize,
}

impl BandCounts {
    pub fn add(&mut self, band: IntensityBand) {
        match band {
            IntensityBand::Low => self.low += 1,
            IntensityBand::Medium => self.medium += 1,
            IntensityBand::High => self.high += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.low + self.medium + self.high
    }

    pub fn proportions(&self) -> Option<(f64, f64, f64)> {
        let n = self.total();
        if n == 0 {
            return None;
        }
        let n = n as f64;
        Some((
            self.low as f64 / n,
            self.medium as f64 / n,
            self.high as f64 / n,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecadeBin {
    pub start_year: i32,
    pub painting_count: usize,
    pub face_count: usize,
    /// Face-level mean; `None` when the decade has no face.
    pub mean_happiness: Option<f64>,
    pub band_counts: BandCounts,
}

/// All 79 decades from 1225 to 2005 in ascending order, empty ones included.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecadeSeries {
    pub bins: Vec<DecadeBin>,
    /// Paintings whose year fell outside the series.
    pub dropped: usize,
}

impl DecadeSeries {
    pub fn populated(&self) -> impl Iterator<Item = &DecadeBin> {
        self.bins.iter().filter(|b| b.face_count > 0)
    }

    /// Spline knots at decade midpoints of populated bins.
    pub fn knots(&self) -> Vec<(f64, f64)> {
        self.populated()
            .filter_map(|b| b.mean_happiness.map(|m| (f64::from(b.start_year) + 5.0, m)))
            .collect()
    }
}

/// Faces grouped by decade start, plus paintings per decade.
#[derive(Debug, Clone, Default)]
pub struct DecadeGroups {
    pub faces: BTreeMap<i32, Vec<FaceAnnotation>>,
    pub paintings: BTreeMap<i32, usize>,
    pub dropped: usize,
}

pub fn group_by_decade<'a>(
    items: impl IntoIterator<Item = (i32, &'a [FaceAnnotation])>,
) -> DecadeGroups {
    let mut groups = DecadeGroups::default();
    for (year, faces) in items {
        match decade_start(year) {
            Some(start) => {
                *groups.paintings.entry(start).or_default() += 1;
                groups
                    .faces
                    .entry(start)
                    .or_default()
                    .extend_from_slice(faces);
            }
            None => groups.dropped += 1,
        }
    }
    groups
}

pub fn bin_decades<'a>(
    items: impl IntoIterator<Item = (i32, &'a [FaceAnnotation])>,
) -> DecadeSeries {
    let groups = group_by_decade(items);
    let bins = (SERIES_START..SERIES_END)
        .step_by(DECADE_WIDTH as usize)
        .map(|start| {
            let faces = groups.faces.get(&start).map(Vec::as_slice).unwrap_or(&[]);
            let mut band_counts = BandCounts::default();
            for f in faces {
                band_counts.add(
                    intensity_band(f.happiness()).expect("annotations hold happiness in [0, 1]"),
                );
            }
            let mean_happiness = (!faces.is_empty()).then(|| {
                faces.iter().map(FaceAnnotation::happiness).sum::<f64>() / faces.len() as f64
            });
            DecadeBin {
                start_year: start,
                painting_count: groups.paintings.get(&start).copied().unwrap_or(0),
                face_count: faces.len(),
                mean_happiness,
                band_counts,
            }
        })
        .collect();
    DecadeSeries {
        bins,
        dropped: groups.dropped,
    }
}

/// Happiness of every face dated within `[start_year, end_year]`.
pub fn window_happiness<'a>(
    items: impl IntoIterator<Item = (i32, &'a [FaceAnnotation])>,
    start_year: i32,
    end_year: i32,
) -> Vec<f64> {
    items
        .into_iter()
        .filter(|(y, _)| (start_year..=end_year).contains(y))
        .flat_map(|(_, faces)| faces.iter().map(FaceAnnotation::happiness))
        .collect()
}

/// Inclusive year span of one era.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EraBound {
    pub label: String,
    pub start_year: i32,
    pub end_year: i32,
}

impl EraBound {
    pub fn new(label: &str, start_year: i32, end_year: i32) -> Self {
        EraBound {
            label: label.into(),
            start_year,
            end_year,
        }
    }
}

pub fn default_eras() -> Vec<EraBound> {
    vec![
        EraBound::new("Gothic", 1225, 1399),
        EraBound::new("Renaissance", 1400, 1599),
        EraBound::new("Baroque", 1600, 1699),
        EraBound::new("Rococo/Neoclassic", 1700, 1789),
        EraBound::new("19th-century", 1790, 1899),
        EraBound::new("Modern", 1900, 2015),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Era {
    pub label: String,
    pub start_year: i32,
    pub end_year: i32,
    /// Mean of the spline at whole years within both the era and the knot
    /// span; `None` when the two do not overlap.
    pub mean_happiness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EraSeries {
    pub eras: Vec<Era>,
}

fn validate_eras(bounds: &[EraBound]) -> Result<(), TemporalError> {
    if bounds.is_empty() {
        return Err(TemporalError::InvalidEras("no eras".into()));
    }
    for b in bounds {
        if b.end_year < b.start_year {
            return Err(TemporalError::InvalidEras(format!(
                "{} ends before it starts",
                b.label
            )));
        }
    }
    for w in bounds.windows(2) {
        if w[1].start_year != w[0].end_year + 1 {
            return Err(TemporalError::InvalidEras(format!(
                "{} and {} are not contiguous",
                w[0].label, w[1].label
            )));
        }
    }
    Ok(())
}

pub fn era_series(decades: &DecadeSeries, bounds: &[EraBound]) -> Result<EraSeries, TemporalError> {
    validate_eras(bounds)?;
    let knots = decades.knots();
    if knots.len() < 3 {
        return Err(TemporalError::InsufficientBins {
            needed: 3,
            have: knots.len(),
        });
    }
    let spline = NaturalCubicSpline::fit(&knots)?;
    let (lo, hi) = spline.domain();
    let eras = bounds
        .iter()
        .map(|b| {
            let from = b.start_year.max(lo.ceil() as i32);
            let to = b.end_year.min(hi.floor() as i32);
            let mean_happiness = (from <= to).then(|| {
                let sum: f64 = (from..=to).map(|y| spline.evaluate(f64::from(y))).sum();
                sum / f64::from(to - from + 1)
            });
            Era {
                label: b.label.clone(),
                start_year: b.start_year,
                end_year: b.end_year,
                mean_happiness,
            }
        })
        .collect();
    Ok(EraSeries { eras })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChangeWindow {
    pub start_year: i32,
    /// Last year of the final decade in the window.
    pub end_year: i32,
    /// Mean happiness of the last decade minus that of the first.
    pub delta: f64,
}

/// Window of `window_decades` consecutive decades, both end decades
/// populated, with the largest absolute change between its ends. Ties go to
/// the earliest window.
pub fn rapid_change_window(
    decades: &DecadeSeries,
    window_decades: usize,
) -> Result<ChangeWindow, TemporalError> {
    let have = decades.populated().count();
    if window_decades < 2 || have < window_decades {
        return Err(TemporalError::InsufficientBins {
            needed: window_decades.max(2),
            have,
        });
    }
    let mut best: Option<ChangeWindow> = None;
    for w in decades.bins.windows(window_decades) {
        let (first, last) = (&w[0], &w[window_decades - 1]);
        let (Some(a), Some(b)) = (first.mean_happiness, last.mean_happiness) else {
            continue;
        };
        let delta = b - a;
        // Exactly linear series give equal deltas up to rounding; keep the earliest.
        if best.is_none_or(|cur| delta.abs() > cur.delta.abs() + 1e-12) {
            best = Some(ChangeWindow {
                start_year: first.start_year,
                end_year: last.start_year + DECADE_WIDTH - 1,
                delta,
            });
        }
    }
    best.ok_or(TemporalError::InsufficientBins {
        needed: window_decades,
        have,
    })
}
