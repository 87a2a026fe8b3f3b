use crate::error::{BenchError, Result};

/// Ordinary least-squares slope of `log2(error)` against `log2(m)`, using
/// only points with `error > 1e-12`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(m, e)| *e > 1e-12 && *m > 0.0)
        .map(|(m, e)| (m.log2(), e.log2()))
        .collect();
    if pts.len() < 2 {
        return Err(BenchError::precondition(format!(
            "slope needs two points with error > 1e-12, got {}",
            pts.len()
        )));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(BenchError::precondition("slope needs two distinct m values"));
    }
    Ok(sxy / sxx)
}
