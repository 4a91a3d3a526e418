//! Maximum cross-correlation leadership baseline.

use crate::{series::mean_std, Error, Result, TimeSeries};

/// Correlations closer than this are treated as tied.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossCorrResult {
    /// Positive when the second series is delayed relative to the first.
    pub best_lag: isize,
    /// Pearson correlation over the overlap at `best_lag`.
    pub best_value: f64,
    /// `true` when the first series leads (`best_lag > 0`).
    pub decision: bool,
}

/// Default lag search radius, `⌈n / 2⌉` of the shorter series.
pub fn default_max_lag(a: &TimeSeries, b: &TimeSeries) -> usize {
    a.len().min(b.len()).div_ceil(2)
}

/// Scans lags `-max_lag ..= max_lag`, correlating `a[t]` with `b[t + lag]`
/// over their overlap, and returns the lag of maximum correlation. Ties go
/// to the smaller `|lag|`, then to the positive lag.
pub fn max_cross_correlation_lead(
    a: &TimeSeries,
    b: &TimeSeries,
    max_lag: usize,
) -> Result<CrossCorrResult> {
    let limit = a.len().min(b.len());
    if max_lag < 1 || max_lag >= limit {
        return Err(Error::LagTooLarge { max_lag, limit });
    }
    let x = standardize(a.values())?;
    let y = standardize(b.values())?;

    let mut best_lag = 0isize;
    let mut best_value = f64::NEG_INFINITY;
    let candidates = core::iter::once(0isize).chain((1..=max_lag as isize).flat_map(|l| [l, -l]));
    for lag in candidates {
        let (xs, ys) = overlap(&x, &y, lag);
        if let Some(r) = pearson(xs, ys) {
            if r > best_value + TIE_TOLERANCE {
                best_value = r;
                best_lag = lag;
            }
        }
    }
    if best_value == f64::NEG_INFINITY {
        return Err(Error::DegenerateSeries(
            "no lag with a non-constant overlap",
        ));
    }
    Ok(CrossCorrResult {
        best_lag,
        best_value,
        decision: best_lag > 0,
    })
}

fn standardize(v: &[f64]) -> Result<alloc::vec::Vec<f64>> {
    let (mean, std) = mean_std(v);
    if std < crate::series::FLAT_EPSILON {
        return Err(Error::DegenerateSeries("constant series"));
    }
    Ok(v.iter().map(|x| (x - mean) / std).collect())
}

fn overlap<'a>(x: &'a [f64], y: &'a [f64], lag: isize) -> (&'a [f64], &'a [f64]) {
    let (xs, ys) = if lag >= 0 {
        (x, y.get(lag as usize..).unwrap_or(&[]))
    } else {
        (x.get(lag.unsigned_abs()..).unwrap_or(&[]), y)
    };
    let n = xs.len().min(ys.len());
    (&xs[..n], &ys[..n])
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let (mx, sx) = mean_std(x);
    let (my, sy) = mean_std(y);
    if sx < crate::series::FLAT_EPSILON || sy < crate::series::FLAT_EPSILON {
        return None;
    }
    let cov = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - mx) * (b - my))
        .sum::<f64>()
        / x.len() as f64;
    Some((cov / (sx * sy)).clamp(-1.0, 1.0))
}
