//! Quantum-jump rate of the no-jump trajectory.

use crate::error::Result;
use crate::params::SystemParams;
use crate::series::TimeSeries;

/// `R(t) = γ P_A(t) + κ P_WG(t) + γ P_B(t)`, linearly interpolated from the
/// series. Times outside the series give a range error.
pub fn jump_rate(t: f64, series: &TimeSeries, p: &SystemParams) -> Result<f64> {
    let o = series.at(t)?;
    Ok(p.gamma * (o.p_a + o.p_b) + p.kappa * o.p_wg)
}

/// Jump rate at every sample of the series.
pub fn jump_rate_series(series: &TimeSeries, p: &SystemParams) -> Vec<f64> {
    series
        .occupations
        .iter()
        .map(|o| p.gamma * (o.p_a + o.p_b) + p.kappa * o.p_wg)
        .collect()
}
