use crate::error::{SimError, SimResult};
use crate::report::SimPoint;

/// Least-squares slope of `log10(ber)` against `snr_db`, as a positive
/// number of decades per 10 dB. Points with zero BER are skipped.
pub fn estimate_diversity_slope(points: &[SimPoint]) -> SimResult<f64> {
    let xy: Vec<(f64, f64)> = points.iter().filter(|p| p.ber > 0.0).map(|p| (p.snr_db, p.ber.log10())).collect();
    if xy.len() < 2 {
        return Err(SimError::NotEstimable(format!("{} point(s) with nonzero BER, need 2", xy.len())));
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(SimError::NotEstimable("all points share one SNR".into()));
    }
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(-10.0 * sxy / sxx)
}
