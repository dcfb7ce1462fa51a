//! Fitting exponential or polynomial decay envelopes to sampled signals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::SampledSignal;

/// Minimum number of above-floor samples required on each side of `t = 0`.
pub const MIN_SAMPLES_PER_SIDE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    /// `|f(t)| <= c e^{-λ|t|}`
    Exponential,
    /// `|f(t)| <= c (1+|t|)^{-s}`
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub model: DecayModel,
    /// `λ` or `s`.
    pub rate: f64,
    pub log_constant: f64,
    /// Coefficient of determination of the log-envelope regression.
    pub fit_quality: f64,
}

/// Samples below this are treated as round-off, not decay.
pub fn amplitude_floor(max_abs: f64) -> f64 {
    (1e-12 * max_abs).max(1e-13)
}

/// Least monotone majorant of `|f|` in `|t|`: `sup_{|s| >= |t|, same side} |f(s)|`.
///
/// Oscillating windows (duals, tight windows) have zeros; the envelope removes
/// them so the regression sees the bound `|f(t)| <= c e^{-λ|t|}` rather than
/// the individual lobes.
pub fn tail_envelope(f: &SampledSignal) -> Vec<f64> {
    let grid = f.grid();
    let mut env: Vec<f64> = f.samples().iter().map(|z| z.norm()).collect();
    let n = env.len();
    // first index with t >= 0
    let split = (0..n).find(|&i| grid.time(i) >= 0.0).unwrap_or(n);
    for i in (split..n.saturating_sub(1)).rev() {
        env[i] = env[i].max(env[i + 1]);
    }
    for i in 1..split.min(n) {
        env[i] = env[i].max(env[i - 1]);
    }
    env
}

/// Least-squares fit of `log env(t)` against `-λ|t|` or `-s log(1+|t|)`.
pub fn decay_envelope_fit(f: &SampledSignal, model: DecayModel) -> Result<DecayFit> {
    let floor = amplitude_floor(f.max_abs());
    let env = tail_envelope(f);
    let grid = f.grid();

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let (mut left, mut right) = (0usize, 0usize);
    for (i, &e) in env.iter().enumerate() {
        if e <= floor {
            continue;
        }
        let t = grid.time(i);
        if t < 0.0 {
            left += 1;
        } else {
            right += 1;
        }
        let x = match model {
            DecayModel::Exponential => t.abs(),
            DecayModel::Polynomial => t.abs().ln_1p(),
        };
        xs.push(x);
        ys.push(e.ln());
    }
    if left < MIN_SAMPLES_PER_SIDE || right < MIN_SAMPLES_PER_SIDE {
        return Err(Error::InsufficientData(format!(
            "{left} samples left of 0 and {right} right of 0 above floor {floor:.1e}; need {MIN_SAMPLES_PER_SIDE} each"
        )));
    }

    let (slope, intercept, r2) = linear_regression(&xs, &ys);
    Ok(DecayFit { model, rate: -slope, log_constant: intercept, fit_quality: r2 })
}

/// Ordinary least squares `y ≈ slope x + intercept`, returning R² as well.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::signal::{make_window, Grid, WindowKind};

    fn grid() -> Grid {
        Grid::symmetric(12.0, 32).unwrap()
    }

    #[test]
    fn exact_exponential() {
        let f = SampledSignal::from_fn(grid(), |t| Complex64::new((-2.0 * t.abs()).exp(), 0.0));
        let fit = decay_envelope_fit(&f, DecayModel::Exponential).unwrap();
        assert!((fit.rate - 2.0).abs() < 0.05);
        assert!(fit.fit_quality >= 0.999);
    }

    #[test]
    fn exact_polynomial() {
        let f = SampledSignal::from_fn(grid(), |t| Complex64::new((1.0 + t.abs()).powf(-3.0), 0.0));
        let fit = decay_envelope_fit(&f, DecayModel::Polynomial).unwrap();
        assert!((fit.rate - 3.0).abs() < 0.1);
        assert!(fit.fit_quality >= 0.999);
    }

    #[test]
    fn gaussian_bends_the_exponential_fit() {
        let g = make_window(&WindowKind::Gaussian { scale: 1.0 }, grid()).unwrap();
        let e = SampledSignal::from_fn(grid(), |t| Complex64::new((-2.0 * t.abs()).exp(), 0.0));
        let fg = decay_envelope_fit(&g, DecayModel::Exponential).unwrap();
        let fe = decay_envelope_fit(&e, DecayModel::Exponential).unwrap();
        assert!(fg.fit_quality < fe.fit_quality - 0.03, "{} vs {}", fg.fit_quality, fe.fit_quality);
    }

    #[test]
    fn envelope_fills_zeros() {
        // e^{-|t|} cos(2πt) has zeros; its envelope should still fit cleanly.
        let f = SampledSignal::from_fn(grid(), |t| {
            Complex64::new((-t.abs()).exp() * (2.0 * std::f64::consts::PI * t).cos(), 0.0)
        });
        let fit = decay_envelope_fit(&f, DecayModel::Exponential).unwrap();
        assert!((fit.rate - 1.0).abs() < 0.05, "{}", fit.rate);
        assert!(fit.fit_quality > 0.99);
    }

    #[test]
    fn one_sided_signal_is_rejected() {
        let r = make_window(&WindowKind::Rectangular { width: 1.0, start: 0.0 }, grid()).unwrap();
        assert!(matches!(decay_envelope_fit(&r, DecayModel::Exponential), Err(Error::InsufficientData(_))));
    }
}
