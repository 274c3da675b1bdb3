//! Least-squares slope fitting on log-log data, the measurement side of
//! every asymptotic claim in the crate.

use crate::error::LoopError;
use crate::Result;

/// Noise floor below which measured errors carry no rate information.
pub const ERROR_FLOOR: f64 = 1e-12;

/// Least-squares slope of `log(y)` against `log(x)`.
///
/// Points with `y <= ERROR_FLOOR` are discarded before fitting; at least
/// three usable points are required.
pub fn fit_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > ERROR_FLOOR)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if usable.len() < 3 {
        return Err(LoopError::DegenerateFit {
            need: 3,
            got: usable.len(),
        });
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(LoopError::DegenerateFit { need: 3, got: 1 });
    }
    Ok(sxy / sxx)
}

/// Slope plus a crude half-width of its confidence interval (one standard
/// error of the regression slope).
pub fn fit_log_slope_with_halfwidth(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let slope = fit_log_slope(points)?;
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > ERROR_FLOOR)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let intercept = my - slope * mx;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let ss_res: f64 = usable
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    if usable.len() <= 2 {
        return Ok((slope, f64::INFINITY));
    }
    let se = (ss_res / (n - 2.0) / sxx).sqrt();
    Ok((slope, se))
}
