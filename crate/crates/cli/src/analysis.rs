//! Oscillation summary of a sampled time series.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Oscillation {
    /// Midpoint of the extremes.
    pub center: f64,
    /// Half the peak-to-peak swing.
    pub amplitude: f64,
    /// Mean spacing of upward crossings of the center, if at least two.
    pub period: Option<f64>,
}

pub fn analyze_oscillation(series: &[(f64, f64)]) -> Option<Oscillation> {
    if series.len() < 2 {
        return None;
    }
    let lo = series.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = series.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    let crossings: Vec<f64> = series
        .windows(2)
        .filter(|w| w[0].1 < center && w[1].1 >= center)
        .map(|w| {
            let (t0, y0) = w[0];
            let (t1, y1) = w[1];
            t0 + (center - y0) * (t1 - t0) / (y1 - y0)
        })
        .collect();
    let period = (crossings.len() >= 2)
        .then(|| (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64);
    Some(Oscillation {
        center,
        amplitude: 0.5 * (hi - lo),
        period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_wave() {
        let series: Vec<(f64, f64)> =
            (0..=288).map(|k| k as f64 / 24.0).map(|t| (t, 0.7 + 0.02 * (2.0 * PI * t / 4.0 + 0.3).cos())).collect();
        let o = analyze_oscillation(&series).unwrap();
        assert!((o.center - 0.7).abs() < 1e-5);
        assert!((o.amplitude - 0.02).abs() < 1e-5);
        assert!((o.period.unwrap() - 4.0).abs() < 1e-3);
    }

    #[test]
    fn flat_series_has_no_period() {
        let series: Vec<(f64, f64)> = (0..10).map(|k| (k as f64, 0.5)).collect();
        let o = analyze_oscillation(&series).unwrap();
        assert_eq!(o.amplitude, 0.0);
        assert_eq!(o.period, None);
        assert!(analyze_oscillation(&[]).is_none());
    }
}
