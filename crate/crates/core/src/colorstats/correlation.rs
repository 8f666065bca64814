use serde::Serialize;
use statrs::function::beta::beta_reg;

use super::StatsError;

/// Pearson product-moment correlation.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewValues {
            needed: 2,
            have: x.len(),
        });
    }
    let constant = |v: &[f64]| v.iter().all(|a| *a == v[0]);
    if constant(x) || constant(y) {
        return Err(StatsError::DegenerateSeries);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::DegenerateSeries);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Two-tailed p-value of the t-test on a correlation coefficient:
/// `t = r sqrt((n - 2) / (1 - r²))` against Student's t with `n - 2`
/// degrees of freedom, through the regularized incomplete beta function.
pub fn p_value(r: f64, n: usize) -> Result<f64, StatsError> {
    if n < 3 {
        return Err(StatsError::TooFewValues { needed: 3, have: n });
    }
    if !(-1.0..=1.0).contains(&r) {
        return Err(StatsError::OutOfRange(r));
    }
    if r.abs() == 1.0 {
        return Ok(0.0);
    }
    let df = (n - 2) as f64;
    let t2 = r * r * df / (1.0 - r * r);
    // P(|T| > t) = I_{df / (df + t²)}(df / 2, 1 / 2)
    Ok(beta_reg(df / 2.0, 0.5, df / (df + t2)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignificanceBand {
    Strong,
    Evidence,
    Weak,
    None,
    /// Fewer than three paintings in the unit.
    InsufficientData,
    /// A constant series, so no correlation is defined.
    Undefined,
}

impl SignificanceBand {
    pub fn as_str(self) -> &'static str {
        match self {
            SignificanceBand::Strong => "strong",
            SignificanceBand::Evidence => "evidence",
            SignificanceBand::Weak => "weak",
            SignificanceBand::None => "none",
            SignificanceBand::InsufficientData => "insufficient data",
            SignificanceBand::Undefined => "undefined",
        }
    }
}

/// `p < 0.01` strong, `[0.01, 0.05)` evidence, `[0.05, 0.1)` weak, otherwise none.
pub fn significance_band(p: f64) -> Result<SignificanceBand, StatsError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(StatsError::OutOfRange(p));
    }
    Ok(if p < 0.01 {
        SignificanceBand::Strong
    } else if p < 0.05 {
        SignificanceBand::Evidence
    } else if p < 0.1 {
        SignificanceBand::Weak
    } else {
        SignificanceBand::None
    })
}
