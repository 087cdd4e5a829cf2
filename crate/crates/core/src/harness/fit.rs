use crate::error::{Error, Result};
use serde::Serialize;

/// Least-squares fit of `ln y = intercept - rate·t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub rate: f64,
    pub intercept: f64,
    /// First and last time actually used.
    pub window: (f64, f64),
    pub points: usize,
    /// Root mean square of the residuals in `ln y`.
    pub rms: f64,
    pub r_squared: f64,
}

/// Fits an exponential rate to the `(t, y)` pairs with `t` in `window`
/// (inclusive). Needs at least five points and `y > 0` on the window.
pub fn fit_exponential_rate(series: &[(f64, f64)], window: (f64, f64)) -> Result<RateFit> {
    let (lo, hi) = window;
    let tol = 1e-9 * (1.0 + hi.abs());
    let pts: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|(t, _)| *t >= lo - tol && *t <= hi + tol)
        .collect();
    if pts.len() < 5 {
        return Err(Error::TooFewPoints(pts.len()));
    }
    if let Some(&(time, value)) = pts.iter().find(|(_, y)| !(*y > 0.0 && y.is_finite())) {
        return Err(Error::NonPositive { time, value });
    }
    let n = pts.len() as f64;
    let logs: Vec<(f64, f64)> = pts.iter().map(|(t, y)| (*t, y.ln())).collect();
    let mt = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = logs.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = logs.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if stt == 0.0 {
        return Err(Error::Degenerate("fit window has a single time"));
    }
    let slope = sty / stt;
    let intercept = my - slope * mt;
    let sse: f64 = logs.iter().map(|(t, y)| (y - intercept - slope * t).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(RateFit {
        rate: -slope,
        intercept,
        window: (logs[0].0, logs[logs.len() - 1].0),
        points: pts.len(),
        rms: (sse / n).sqrt(),
        r_squared,
    })
}
