//! Creation dates, decade series and era aggregation.

mod dates;
mod series;
mod spline;

use serde::{Deserialize, Serialize};

pub use dates::{parse_date, DateRejection, ParsedDate};
pub use series::{
    bin_decades, decade_start, default_eras, era_series, group_by_decade, rapid_change_window,
    window_happiness, BandCounts, ChangeWindow, DecadeBin, DecadeGroups, DecadeSeries, Era,
    EraBound, EraSeries, DECADE_WIDTH, SERIES_END, SERIES_START,
};
pub use spline::NaturalCubicSpline;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TemporalError {
    #[error("happiness {0} outside [0, 1]")]
    Domain(f64),
    #[error("empty bin")]
    EmptyBin,
    #[error("spline needs at least 3 knots, got {0}")]
    TooFewKnots(usize),
    #[error("knot x values must be strictly increasing (at index {0})")]
    NonIncreasingKnots(usize),
    #[error("need at least {needed} populated decades, have {have}")]
    InsufficientBins { needed: usize, have: usize },
    #[error("invalid era bounds: {0}")]
    InvalidEras(String),
}

/// Happiness intensity group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntensityBand {
    Low,
    Medium,
    High,
}

impl IntensityBand {
    pub const ALL: [IntensityBand; 3] = [
        IntensityBand::Low,
        IntensityBand::Medium,
        IntensityBand::High,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IntensityBand::Low => "low",
            IntensityBand::Medium => "medium",
            IntensityBand::High => "high",
        }
    }

    /// Printed range, e.g. `0-0.25`.
    pub fn range_label(self) -> &'static str {
        match self {
            IntensityBand::Low => "0-0.25",
            IntensityBand::Medium => "0.25-0.75",
            IntensityBand::High => "0.75-1",
        }
    }
}

/// `[0, 0.25)` low, `[0.25, 0.75)` medium, `[0.75, 1]` high.
pub fn intensity_band(h: f64) -> Result<IntensityBand, TemporalError> {
    if !(0.0..=1.0).contains(&h) {
        return Err(TemporalError::Domain(h));
    }
    Ok(if h < 0.25 {
        IntensityBand::Low
    } else if h < 0.75 {
        IntensityBand::Medium
    } else {
        IntensityBand::High
    })
}

/// Shares of low, medium and high happiness among `happiness` values.
pub fn band_proportions(happiness: &[f64]) -> Result<(f64, f64, f64), TemporalError> {
    if happiness.is_empty() {
        return Err(TemporalError::EmptyBin);
    }
    let mut counts = BandCounts::default();
    for &h in happiness {
        counts.add(intensity_band(h)?);
    }
    Ok(counts.proportions().expect("non-empty"))
}
