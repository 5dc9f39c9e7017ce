use std::ops::RangeInclusive;

use crate::error::{Error, Result};

/// Fewest points a fit may use.
pub const MIN_WINDOW: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub metric: String,
    /// First and last `k` actually used.
    pub window: (usize, usize),
    pub slope: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
    /// Set when the window was cut short because the metric reached `floor`.
    pub truncated_at: Option<usize>,
}

/// Prefix minimum.
pub fn running_min(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(f64::INFINITY, |m, &v| {
            *m = m.min(v);
            Some(*m)
        })
        .collect()
}

/// Least-squares slope of `log(value)` against `log(k)` over the points with
/// `k` in `window`. The window ends just before the first value `<= floor`,
/// since past that point the metric measures rounding rather than progress.
pub fn fit_rate(
    metric: &str,
    points: &[(usize, f64)],
    window: RangeInclusive<usize>,
    floor: f64,
) -> Result<RateFit> {
    let mut used = Vec::new();
    let mut truncated_at = None;
    for &(k, v) in points.iter().filter(|(k, _)| window.contains(k)) {
        if k == 0 {
            return Err(Error::InvalidArgument("log-log fit needs k >= 1".into()));
        }
        if !(v > floor) {
            truncated_at = Some(k);
            break;
        }
        used.push(((k as f64).ln(), v.ln()));
    }
    if used.len() < MIN_WINDOW {
        return Err(Error::InvalidArgument(format!(
            "{metric}: only {} usable points in the window (need {MIN_WINDOW})",
            used.len()
        )));
    }
    let n = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / n;
    let my = used.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{metric}: degenerate window"
        )));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (used
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let first = window_k(points, &window, 0);
    let last = window_k(points, &window, used.len() - 1);
    Ok(RateFit {
        metric: metric.to_string(),
        window: (first, last),
        slope,
        residual,
        truncated_at,
    })
}

fn window_k(points: &[(usize, f64)], window: &RangeInclusive<usize>, idx: usize) -> usize {
    points
        .iter()
        .filter(|(k, _)| window.contains(k))
        .nth(idx)
        .map(|p| p.0)
        .expect("index within the used prefix")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(c: f64, e: f64, n: usize) -> Vec<(usize, f64)> {
        (1..=n).map(|k| (k, c / (k as f64).powf(e))).collect()
    }

    #[test]
    fn exact_power_laws() {
        let f = fit_rate("m", &power(3.0, 2.0, 500), 1..=500, 0.0).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-10);
        assert!(f.residual < 1e-10);
        let f = fit_rate("m", &power(0.5, 1.5, 500), 20..=400, 0.0).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-10);
        assert_eq!(f.window, (20, 400));
    }

    #[test]
    fn truncates_at_floor() {
        let mut pts = power(1.0, 1.0, 100);
        pts[49].1 = 0.0;
        let f = fit_rate("m", &pts, 1..=100, 0.0).unwrap();
        assert_eq!(f.truncated_at, Some(50));
        assert_eq!(f.window, (1, 49));
        assert!((f.slope + 1.0).abs() < 1e-10);
    }

    #[test]
    fn short_window_is_an_error() {
        assert!(fit_rate("m", &power(1.0, 1.0, 9), 1..=9, 0.0).is_err());
    }

    #[test]
    fn running_min_is_monotone() {
        assert_eq!(running_min(&[3.0, 1.0, 2.0, 0.5]), vec![3.0, 1.0, 1.0, 0.5]);
    }
}
