//! Closed-form decay, revival and plateau laws, and the estimators that
//! compare simulated series against them.

use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::TimeSeries;

/// Minimum samples for an exponential fit.
pub const MIN_FIT_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("insufficient data: {found} samples in window, need {needed}")]
    InsufficientData { found: usize, needed: usize },
}

/// Detuned degenerate bath, all ω_i = (1 − r)Ω:
///
/// |C₀(t)|² = 1 − Λ₀²/(Λ₀² + (rΩ/2)²) · sin²(√(Λ₀² + (rΩ/2)²) t)
pub fn analytic_detuned_population(lambda0: f64, r: f64, omega_q: f64, t: f64) -> f64 {
    let half_detuning = 0.5 * r * omega_q;
    let rabi_sq = lambda0 * lambda0 + half_detuning * half_detuning;
    if rabi_sq == 0.0 {
        return 1.0;
    }
    let s = (rabi_sq.sqrt() * t).sin();
    1.0 - lambda0 * lambda0 / rabi_sq * s * s
}

/// Decay rate into an equally spaced line, Γ = 2πg²Ω/Δω².
pub fn decay_rate_line(g: f64, omega_q: f64, delta_omega: f64) -> f64 {
    2.0 * PI * g * g * omega_q / (delta_omega * delta_omega)
}

/// Decay rate into a TLS ensemble, Γ₀ = 2πν₀Λ₀²/N.
pub fn decay_rate_tls(nu0: f64, lambda0: f64, n: usize) -> f64 {
    2.0 * PI * nu0 * lambda0 * lambda0 / n as f64
}

/// First recurrence of an equally spaced spectrum, 2π/Δω.
pub fn revival_time(delta_omega: f64) -> f64 {
    2.0 * PI / delta_omega
}

/// Residual excited population after decay into N distributed TLSs,
/// 4Ω/(NπΓ₀).
pub fn long_time_plateau(omega_q: f64, n: usize, gamma0: f64) -> f64 {
    4.0 * omega_q / (n as f64 * PI * gamma0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub gamma_fit: f64,
    /// Intercept of ln p_e versus t.
    pub intercept: f64,
    pub r_squared: f64,
    /// First and last sample times used.
    pub window: (f64, f64),
    pub samples: usize,
}

/// Least-squares line through (t, ln p_e) over the first decay window.
///
/// The window opens at the first sample with p_e ≤ `p_hi` and closes before
/// the first later sample with p_e < `p_lo`; samples inside with
/// p_lo ≤ p_e ≤ p_hi are fitted.
pub fn fit_exponential(series: &TimeSeries, p_hi: f64, p_lo: f64) -> Result<DecayFit, AnalysisError> {
    if !(p_lo > 0.0 && p_hi > p_lo) {
        return Err(AnalysisError::InvalidWindow(format!("need p_hi > p_lo > 0, got [{p_lo}, {p_hi}]")));
    }
    let samples = &series.samples;
    let start = samples.iter().position(|s| s.p_e <= p_hi).unwrap_or(samples.len());
    let end = samples[start..].iter().position(|s| s.p_e < p_lo).map_or(samples.len(), |k| start + k);
    let points: Vec<(f64, f64)> =
        samples[start..end].iter().filter(|s| s.p_e >= p_lo && s.p_e <= p_hi).map(|s| (s.t, s.p_e.ln())).collect();
    if points.len() < MIN_FIT_SAMPLES {
        return Err(AnalysisError::InsufficientData { found: points.len(), needed: MIN_FIT_SAMPLES });
    }

    let n = points.len() as f64;
    let t_mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in &points {
        let (dt, dy) = (t - t_mean, y - y_mean);
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    let slope = sty / stt;
    let intercept = y_mean - slope * t_mean;
    let ss_res: f64 = points.iter().map(|&(t, y)| (y - intercept - slope * t).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(DecayFit {
        gamma_fit: -slope,
        intercept,
        r_squared,
        window: (points[0].0, points[points.len() - 1].0),
        samples: points.len(),
    })
}

/// Onset of the first revival.
///
/// Tracks the running minimum p_min of p_e and returns the first time at
/// which p_e ≥ `floor_factor`·p_min after rising over at least three
/// consecutive samples. `None` for a series that never climbs back.
pub fn detect_revival(series: &TimeSeries, floor_factor: f64) -> Option<f64> {
    if !(floor_factor > 1.0) {
        return None;
    }
    let s = &series.samples;
    let mut p_min = f64::INFINITY;
    let mut rising = 0usize;
    for (i, sample) in s.iter().enumerate() {
        rising = if i > 0 && sample.p_e > s[i - 1].p_e { rising + 1 } else { 0 };
        p_min = p_min.min(sample.p_e);
        if rising >= 3 && sample.p_e >= floor_factor * p_min {
            return Some(sample.t);
        }
    }
    None
}

/// Trapezoidal mean of p_e over [t_lo, t_hi], using the samples inside.
pub fn time_average(series: &TimeSeries, t_lo: f64, t_hi: f64) -> Result<f64, AnalysisError> {
    if !(t_lo < t_hi) {
        return Err(AnalysisError::InvalidWindow(format!("need t_lo < t_hi, got [{t_lo}, {t_hi}]")));
    }
    let pts: Vec<(f64, f64)> =
        series.samples.iter().filter(|s| s.t >= t_lo && s.t <= t_hi).map(|s| (s.t, s.p_e)).collect();
    if pts.len() < 2 {
        return Err(AnalysisError::InsufficientData { found: pts.len(), needed: 2 });
    }
    let area: f64 = pts.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum();
    Ok(area / (pts[pts.len() - 1].0 - pts[0].0))
}

/// Predicted-versus-measured comparison, rendered as `key = value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    /// Adds `predicted_<name>`, `measured_<name>` and `relative_error_<name>`.
    pub fn compare(&mut self, name: &str, predicted: Option<f64>, measured: Option<f64>) {
        let show = |v: Option<f64>| v.map_or_else(|| "none".to_string(), crate::io::fmt_f64);
        self.push(&format!("predicted_{name}"), show(predicted));
        self.push(&format!("measured_{name}"), show(measured));
        let rel = match (predicted, measured) {
            (Some(p), Some(m)) if p != 0.0 => Some((m - p) / p),
            _ => None,
        };
        self.push(&format!("relative_error_{name}"), show(rel));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}
