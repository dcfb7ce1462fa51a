//! Sampled signals on uniform time grids.
//!
//! A [`Grid`] places sample `i` at time `(start + i) * dt`. Keeping the origin
//! as an integer sample offset means every shift the toolkit performs is an
//! exact integer move of samples, never an interpolation. Outside its grid a
//! signal is treated as zero, which is how finite grids stand in for
//! functions on the whole line.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack when deciding whether a real shift is a whole number of samples.
const COMMENSURATE_TOL: f64 = 1e-9;

/// Uniform sampling grid `t_i = (start + i) * dt`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: i64,
    pub len: usize,
    pub dt: f64,
}

impl Grid {
    pub fn new(start: i64, len: usize, dt: f64) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidParameter("grid length must be at least 1".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid spacing must be positive, got {dt}")));
        }
        Ok(Self { start, len, dt })
    }

    /// Grid covering `[-half_width, half_width)` with `dt = 1/denominator`.
    pub fn symmetric(half_width: f64, denominator: u32) -> Result<Self> {
        if !(half_width > 0.0) || denominator == 0 {
            return Err(Error::InvalidParameter("half width and dt denominator must be positive".into()));
        }
        let dt = 1.0 / denominator as f64;
        let half = samples_in(half_width, dt, "half width")?;
        Self::new(-half, (2 * half) as usize, dt)
    }

    pub fn time(&self, i: usize) -> f64 {
        (self.start + i as i64) as f64 * self.dt
    }

    pub fn t0(&self) -> f64 {
        self.start as f64 * self.dt
    }

    /// One past the last absolute sample index.
    pub fn end(&self) -> i64 {
        self.start + self.len as i64
    }

    pub fn duration(&self) -> f64 {
        self.len as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.time(i))
    }

    /// Same spacing and placement.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.start == other.start && self.len == other.len && (self.dt - other.dt).abs() <= 1e-15 * self.dt
    }

    /// Extend by `before` samples at the start and `after` at the end.
    pub fn padded(&self, before: usize, after: usize) -> Grid {
        Grid { start: self.start - before as i64, len: self.len + before + after, dt: self.dt }
    }

    /// Largest `|t|` reached by the grid.
    pub fn max_abs_time(&self) -> f64 {
        self.t0().abs().max(self.time(self.len - 1).abs())
    }
}

/// Converts a duration to a whole number of samples or reports a commensurability error.
pub fn samples_in(duration: f64, dt: f64, what: &'static str) -> Result<i64> {
    let ratio = duration / dt;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > COMMENSURATE_TOL * rounded.abs().max(1.0) {
        return Err(Error::Commensurability { what, value: duration, dt });
    }
    Ok(rounded as i64)
}

/// Complex samples on a [`Grid`], zero outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    grid: Grid,
    samples: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len {
            return Err(Error::InvalidParameter(format!(
                "{} samples for a grid of length {}",
                samples.len(),
                grid.len
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("signal has non-finite samples".into()));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, samples: vec![Complex64::new(0.0, 0.0); grid.len] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let samples = grid.times().map(f).collect();
        Self { grid, samples }
    }

    pub(crate) fn from_parts(grid: Grid, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.len, samples.len());
        Self { grid, samples }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.grid.t0()
    }

    pub fn dt(&self) -> f64 {
        self.grid.dt
    }

    /// Value at absolute sample index `n` (time `n * dt`), zero off-grid.
    #[inline]
    pub fn at(&self, n: i64) -> Complex64 {
        let i = n - self.grid.start;
        if i >= 0 && (i as usize) < self.samples.len() {
            self.samples[i as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Indices (absolute) of the first and one-past-last nonzero sample.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.samples.iter().position(|z| z.norm_sqr() > 0.0)?;
        let last = self.samples.iter().rposition(|z| z.norm_sqr() > 0.0)?;
        Some((self.grid.start + first as i64, self.grid.start + last as i64 + 1))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.grid.dt * self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { grid: self.grid, samples: self.samples.iter().map(|z| z * c).collect() }
    }

    /// Unit-norm copy.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidParameter("cannot normalise the zero signal".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// `self - other` on a common grid.
    pub fn sub(&self, other: &SampledSignal) -> Result<Self> {
        check_same_grid(self, other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid, samples })
    }

    /// `self + c * other` in place.
    pub fn add_scaled(&mut self, c: Complex64, other: &SampledSignal) -> Result<()> {
        check_same_grid(self, other)?;
        for (a, b) in self.samples.iter_mut().zip(&other.samples) {
            *a += c * b;
        }
        Ok(())
    }

    /// The same function restricted to / zero-extended onto `grid` (same spacing).
    pub fn on_grid(&self, grid: Grid) -> Result<Self> {
        if (grid.dt - self.grid.dt).abs() > 1e-15 * self.grid.dt {
            return Err(Error::GridMismatch(format!("spacing {} vs {}", grid.dt, self.grid.dt)));
        }
        let samples = (0..grid.len).map(|i| self.at(grid.start + i as i64)).collect();
        Ok(Self { grid, samples })
    }

    /// `e^{2πiνt} f(t - s·dt)` on the same grid. Samples pushed off the grid are dropped.
    pub fn shift_modulate(&self, shift: i64, nu: f64) -> Self {
        let dt = self.grid.dt;
        let start = self.grid.start;
        let samples = (0..self.grid.len)
            .map(|i| {
                let n = start + i as i64;
                let v = self.at(n - shift);
                if nu == 0.0 || v.norm_sqr() == 0.0 {
                    v
                } else {
                    v * Complex64::from_polar(1.0, 2.0 * PI * nu * n as f64 * dt)
                }
            })
            .collect();
        Self { grid: self.grid, samples }
    }

    /// `e^{2πiνt} f(t - τ)`; `τ` must be a whole number of samples.
    pub fn translate_modulate(&self, tau: f64, nu: f64) -> Result<Self> {
        let shift = samples_in(tau, self.grid.dt, "translation")?;
        Ok(self.shift_modulate(shift, nu))
    }

    /// Continuous Fourier transform `∫ f(t) e^{-2πitω} dt` sampled on the
    /// DFT frequency grid `ω_k = k / (L dt)`, `k ∈ [-⌊L/2⌋, ⌈L/2⌉)`.
    ///
    /// The returned signal's grid spacing is the frequency step. With the
    /// `dt`-weighted inner product on both sides the map is unitary.
    pub fn fourier_transform(&self) -> SampledSignal {
        let len = self.grid.len;
        let mut buf = self.samples.clone();
        FftPlanner::new().plan_fft_forward(len).process(&mut buf);
        let half = (len / 2) as i64;
        let df = 1.0 / (len as f64 * self.grid.dt);
        let samples = (0..len)
            .map(|i| {
                let k = i as i64 - half;
                let idx = k.rem_euclid(len as i64) as usize;
                let phase = -2.0 * PI * ((self.grid.start as i128 * k as i128).rem_euclid(len as i128)) as f64
                    / len as f64;
                buf[idx] * Complex64::from_polar(self.grid.dt, phase)
            })
            .collect();
        SampledSignal { grid: Grid { start: -half, len, dt: df }, samples }
    }
}

fn check_same_grid(f: &SampledSignal, g: &SampledSignal) -> Result<()> {
    if f.grid.same_as(&g.grid) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!("{:?} vs {:?}", f.grid, g.grid)))
    }
}

/// `⟨f, g⟩ = dt Σ f(t_i) conj(g(t_i))`.
pub fn inner_product(f: &SampledSignal, g: &SampledSignal) -> Result<Complex64> {
    check_same_grid(f, g)?;
    Ok(inner_unchecked(f.samples(), g.samples(), f.dt()))
}

#[inline]
pub(crate) fn inner_unchecked(f: &[Complex64], g: &[Complex64], dt: f64) -> Complex64 {
    f.iter().zip(g).map(|(a, b)| a * b.conj()).sum::<Complex64>() * dt
}

/// Short-time Fourier transform `V_g f(τ, ω) = ∫ f(x) conj(g(x-τ)) e^{-2πixω} dx`.
pub fn stft(f: &SampledSignal, g: &SampledSignal, tau: f64, omega: f64) -> Result<Complex64> {
    let atom = g.translate_modulate(tau, omega)?;
    inner_product(f, &atom)
}

/// Fraction of `‖f‖²` carried by samples within `margin` of either grid edge.
pub fn truncation_mass(f: &SampledSignal, margin: f64) -> f64 {
    let total = f.norm_sqr();
    if total == 0.0 {
        return 0.0;
    }
    let dt = f.dt();
    let m = ((margin / dt) - 1e-9).ceil().max(0.0) as usize;
    let len = f.len();
    let edge: f64 = f
        .samples()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i < m || *i + m >= len)
        .map(|(_, z)| z.norm_sqr())
        .sum();
    dt * edge / total
}

/// Window families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum WindowKind {
    /// `2^{1/4} s^{-1/2} e^{-π (t/s)^2}`, unit L2 norm; `scale` defaults to 1.
    Gaussian {
        #[serde(default = "one")]
        scale: f64,
    },
    /// Height `1/√width` on `[start, start + width)`.
    Rectangular {
        width: f64,
        #[serde(default)]
        start: f64,
    },
    /// `cos²(πt/width)` on `[-width/2, width/2]`, normalised on the grid.
    RaisedCosine { width: f64 },
    /// Explicit samples.
    Samples { re: Vec<f64>, im: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

/// Builds a window of the given family on `grid`.
pub fn make_window(kind: &WindowKind, grid: Grid) -> Result<SampledSignal> {
    match kind {
        WindowKind::Gaussian { scale } => {
            if !(*scale > 0.0) {
                return Err(Error::InvalidParameter(format!("gaussian scale must be positive, got {scale}")));
            }
            let c = 2f64.powf(0.25) / scale.sqrt();
            Ok(SampledSignal::from_fn(grid, |t| Complex64::new(c * (-PI * (t / scale).powi(2)).exp(), 0.0)))
        }
        WindowKind::Rectangular { width, start } => {
            if !(*width > 0.0) {
                return Err(Error::InvalidParameter(format!("rectangular width must be positive, got {width}")));
            }
            let dt = grid.dt;
            let lo = (start / dt - 1e-9).ceil() as i64;
            let hi = ((start + width) / dt - 1e-9).ceil() as i64;
            let h = 1.0 / width.sqrt();
            let samples = (0..grid.len)
                .map(|i| {
                    let n = grid.start + i as i64;
                    Complex64::new(if n >= lo && n < hi { h } else { 0.0 }, 0.0)
                })
                .collect();
            SampledSignal::new(grid, samples)
        }
        WindowKind::RaisedCosine { width } => {
            if !(*width > 0.0) {
                return Err(Error::InvalidParameter(format!("raised cosine width must be positive, got {width}")));
            }
            let w = *width;
            let raw = SampledSignal::from_fn(grid, |t| {
                if t.abs() <= w / 2.0 {
                    Complex64::new((PI * t / w).cos().powi(2), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            raw.normalized()
                .map_err(|_| Error::InvalidParameter("raised cosine has no samples on the grid".into()))
        }
        WindowKind::Samples { re, im } => {
            if re.len() != im.len() {
                return Err(Error::InvalidParameter("re and im sample arrays differ in length".into()));
            }
            let samples = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
            SampledSignal::new(grid, samples)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bench_grid() -> Grid {
        Grid::symmetric(8.0, 32).unwrap()
    }

    fn gauss() -> SampledSignal {
        make_window(&WindowKind::Gaussian { scale: 1.0 }, bench_grid()).unwrap()
    }

    #[test]
    fn gaussian_has_unit_norm() {
        assert!((gauss().norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gaussian_closed_form_value() {
        let g = gauss();
        let expected = 2f64.powf(0.25) * (-4.0 * PI).exp();
        // t = 2 is sample 64 past the origin
        assert!((g.at(64).re - expected).abs() < 1e-18);
    }

    #[test]
    fn rectangular_unit_norm() {
        let r = make_window(&WindowKind::Rectangular { width: 1.0, start: 0.0 }, bench_grid()).unwrap();
        assert!((r.norm() - 1.0).abs() < 1e-14);
        assert_eq!(r.support(), Some((0, 32)));
    }

    #[test]
    fn raised_cosine_unit_norm() {
        let r = make_window(&WindowKind::RaisedCosine { width: 3.0 }, bench_grid()).unwrap();
        assert!((r.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bad_window_parameters() {
        assert!(make_window(&WindowKind::Rectangular { width: 0.0, start: 0.0 }, bench_grid()).is_err());
        assert!(make_window(&WindowKind::Gaussian { scale: -1.0 }, bench_grid()).is_err());
        assert!(Grid::new(0, 0, 0.1).is_err());
        assert!(Grid::new(0, 4, 0.0).is_err());
    }

    #[test]
    fn identity_and_inverse_shift() {
        let g = gauss();
        assert_eq!(g.translate_modulate(0.0, 0.0).unwrap(), g);
        let back = g.translate_modulate(1.0, 0.0).unwrap().translate_modulate(-1.0, 0.0).unwrap();
        let err = back.sub(&g).unwrap().norm();
        assert!(err < 1e-20, "{err}");
    }

    #[test]
    fn fractional_shift_is_rejected() {
        let g = gauss();
        assert!(matches!(g.translate_modulate(0.01, 0.0), Err(Error::Commensurability { .. })));
    }

    #[test]
    fn inner_product_conventions() {
        let g = gauss();
        let ig = g.scaled(Complex64::new(0.0, 1.0));
        let v = inner_product(&g, &ig).unwrap();
        assert!((v - Complex64::new(0.0, -1.0)).norm() < 1e-9);
        let other = make_window(&WindowKind::Gaussian { scale: 1.0 }, Grid::symmetric(4.0, 32).unwrap()).unwrap();
        assert!(matches!(inner_product(&g, &other), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn inner_product_with_rectangle_matches_quadrature() {
        // ∫_0^1 2^{1/4} e^{-πt²} dt = 2^{1/4} erf(√π)/2
        let g = gauss();
        let exact = 2f64.powf(0.25) * statrs::function::erf::erf(PI.sqrt()) / 2.0;
        let r = make_window(&WindowKind::Rectangular { width: 1.0, start: 0.0 }, bench_grid()).unwrap();
        let v = inner_product(&g, &r).unwrap().re;
        // left Riemann sum on [0,1): ∫ + (dt/2)(f(0) - f(1)) + O(dt²)
        let f = |t: f64| 2f64.powf(0.25) * (-PI * t * t).exp();
        let predicted = exact + (1.0 / 64.0) * (f(0.0) - f(1.0));
        assert!((v - predicted).abs() < 1e-4, "{v} vs {predicted}");
        assert!((exact - 0.58736).abs() < 1e-5, "{exact}");
    }

    #[test]
    fn stft_of_gaussian_at_origin_and_shift() {
        let g = gauss();
        assert!((stft(&g, &g, 0.0, 0.0).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let v = stft(&g, &g, 1.0, 0.0).unwrap();
        assert!((v.norm() - (-PI / 2.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn stft_sign_convention_matches_integrand() {
        // Direct quadrature of ∫ g(x) conj(g(x-1)) e^{-2πi x/2} dx.
        let g = gauss();
        let dt = g.dt();
        let mut direct = Complex64::new(0.0, 0.0);
        for (i, t) in g.grid().times().enumerate() {
            let shifted = g.at(g.grid().start + i as i64 - 32);
            direct += g.samples()[i] * shifted.conj() * Complex64::from_polar(1.0, -2.0 * PI * t * 0.5);
        }
        direct *= dt;
        let v = stft(&g, &g, 1.0, 0.5).unwrap();
        assert!((v - direct).norm() < 1e-15);
        // closed form: e^{-πiτω} e^{-π(τ²+ω²)/2}
        let closed = Complex64::from_polar((-PI * 1.25 / 2.0).exp(), -PI * 0.5);
        assert!((v - closed).norm() < 1e-12, "{v} vs {closed}");
    }

    #[test]
    fn fourier_transform_of_gaussian_is_gaussian() {
        let g = gauss();
        let gh = g.fourier_transform();
        assert!((gh.norm() - g.norm()).abs() < 1e-10);
        for (i, w) in gh.grid().times().enumerate() {
            let expected = 2f64.powf(0.25) * (-PI * w * w).exp();
            assert!((gh.samples()[i] - Complex64::new(expected, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn fourier_transform_of_shift_is_phase() {
        let g = gauss();
        let gs = g.shift_modulate(32, 0.0);
        let (a, b) = (g.fourier_transform(), gs.fourier_transform());
        for (i, w) in a.grid().times().enumerate() {
            let expected = a.samples()[i] * Complex64::from_polar(1.0, -2.0 * PI * w);
            assert!((b.samples()[i] - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn truncation_mass_cases() {
        let g = gauss();
        assert!(truncation_mass(&g, 1.0) < 1e-130);
        let grid = Grid::new(0, 100, 0.1).unwrap();
        let one = SampledSignal::from_fn(grid, |_| Complex64::new(1.0, 0.0));
        assert!((truncation_mass(&one, 1.0) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn truncation_mass_near_edge() {
        // Direct sum: gaussian on [-3, 3) with margin 0.5 keeps [-3, -2.5) and [2.5, 3).
        let grid = Grid::symmetric(3.0, 32).unwrap();
        let g = make_window(&WindowKind::Gaussian { scale: 1.0 }, grid).unwrap();
        let mut edge = 0.0;
        for (i, t) in grid.times().enumerate() {
            if t < -2.5 - 1e-12 || t >= 2.5 - 1e-12 {
                edge += g.samples()[i].norm_sqr();
            }
        }
        let expected = edge * grid.dt / g.norm_sqr();
        assert!((truncation_mass(&g, 0.5) - expected).abs() < 1e-20);
    }
}
