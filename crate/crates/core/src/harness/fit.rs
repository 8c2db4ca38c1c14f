use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares slope of `log(value)` against `log(h)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub points_used: usize,
    /// Points left out because their value was not positive and finite.
    pub excluded: Vec<f64>,
}

pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let mut excluded = Vec::new();
    let mut logs = Vec::with_capacity(points.len());
    for &(h, value) in points {
        if value > 0.0 && value.is_finite() && h > 0.0 && h.is_finite() {
            logs.push((h.ln(), value.ln()));
        } else {
            excluded.push(h);
        }
    }
    if logs.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 positive points, have {}", logs.len())));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("all h values coincide".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(SlopeFit { slope: sxy / sxx, points_used: logs.len(), excluded })
}

/// `first / last`, the factor by which a metric dropped across the ladder.
pub fn endpoint_ratio(values: &[Option<f64>]) -> Option<f64> {
    let first = (*values.first()?)?;
    let last = (*values.last()?)?;
    if last > 0.0 {
        Some(first / last)
    } else if first > 0.0 {
        Some(f64::INFINITY)
    } else {
        None
    }
}
