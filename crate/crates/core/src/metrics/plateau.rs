//! Early-stopping style plateau detection on loss or metric series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PATIENCE: usize = 2;
pub const DEFAULT_MIN_DELTA: f64 = 0.01;

/// Absolute slack when comparing an improvement with `min_delta`, so that a
/// step of exactly `min_delta` counts regardless of decimal rounding.
const DELTA_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub iteration: u64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Higher is better (F1, precision, ...).
    Maximize,
    /// Lower is better (loss).
    Minimize,
}

/// Iteration of the best value once `patience` consecutive later points fail
/// to improve on it by at least `min_delta`; `None` if the series ends before
/// that happens.
///
/// A point improves when it beats the current best by a strictly positive
/// amount of at least `min_delta`.
pub fn find_plateau(series: &[SeriesPoint], mode: Mode, patience: usize, min_delta: f64) -> Result<Option<u64>> {
    if patience == 0 {
        return Err(Error::InvalidArgument("patience must be at least 1".into()));
    }
    if !(min_delta >= 0.0 && min_delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "min_delta must be >= 0, got {min_delta}"
        )));
    }
    let Some(first) = series.first() else {
        return Err(Error::InvalidArgument("series is empty".into()));
    };
    for (i, w) in series.windows(2).enumerate() {
        if w[1].iteration <= w[0].iteration {
            return Err(Error::InvalidArgument(format!(
                "iterations must strictly increase (point {} has {} after {})",
                i + 1,
                w[1].iteration,
                w[0].iteration
            )));
        }
    }
    if let Some(p) = series.iter().find(|p| !p.value.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite value at iteration {}",
            p.iteration
        )));
    }

    let mut best = *first;
    let mut stale = 0;
    for p in &series[1..] {
        let gain = match mode {
            Mode::Maximize => p.value - best.value,
            Mode::Minimize => best.value - p.value,
        };
        if gain > 0.0 && gain + DELTA_SLACK >= min_delta {
            best = *p;
            stale = 0;
        } else {
            stale += 1;
            if stale >= patience {
                return Ok(Some(best.iteration));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(start: u64, step: u64, values: &[f64]) -> Vec<SeriesPoint> {
        values
            .iter()
            .enumerate()
            .map(|(i, &value)| SeriesPoint {
                iteration: start + step * i as u64,
                value,
            })
            .collect()
    }

    #[test]
    fn f1_curve_stops_at_600() {
        // best .20@100 .35@200 .50@300 .60@400 .65@500 .66@600;
        // 700 (.66) and 800 (.65) both miss .67, patience 2 exhausted.
        let s = series(100, 100, &[0.20, 0.35, 0.50, 0.60, 0.65, 0.66, 0.66, 0.65, 0.64, 0.63]);
        assert_eq!(find_plateau(&s, Mode::Maximize, 2, 0.01).unwrap(), Some(600));
    }

    #[test]
    fn improving_series_has_no_plateau() {
        let s = series(100, 100, &[0.1, 0.2, 0.3, 0.4, 0.5]);
        assert_eq!(find_plateau(&s, Mode::Maximize, 2, 0.01).unwrap(), None);
    }

    #[test]
    fn validation_loss_minimum() {
        let s = series(100, 100, &[1.0, 0.7, 0.5, 0.45, 0.48, 0.55]);
        assert_eq!(find_plateau(&s, Mode::Minimize, 1, 0.0).unwrap(), Some(400));
    }

    #[test]
    fn flat_series_with_zero_delta_stops() {
        let s = series(0, 1, &[0.5, 0.5, 0.5]);
        assert_eq!(find_plateau(&s, Mode::Maximize, 2, 0.0).unwrap(), Some(0));
    }

    #[test]
    fn malformed_input() {
        assert!(find_plateau(&[], Mode::Maximize, 2, 0.01).is_err());
        let s = series(100, 100, &[0.1, 0.2]);
        assert!(find_plateau(&s, Mode::Maximize, 0, 0.01).is_err());
        let mut back = s.clone();
        back[1].iteration = 100;
        assert!(find_plateau(&back, Mode::Maximize, 1, 0.01).is_err());
        let nan = series(0, 1, &[0.1, f64::NAN]);
        assert!(find_plateau(&nan, Mode::Maximize, 1, 0.01).is_err());
    }
}
