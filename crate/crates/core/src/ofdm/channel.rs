use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};
use crate::signal::{Grid, SampledSignal};

/// One path `h · s(t - d·dt) · e^{2πi ν n}` at absolute sample `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    pub delay_samples: i64,
    /// Doppler shift in cycles per sample (`ν_Hz · dt`).
    pub doppler_cycles_per_sample: f64,
    pub gain: Complex64,
}

impl Tap {
    pub fn new(delay_samples: i64, doppler_cycles_per_sample: f64, gain: Complex64) -> Self {
        Self { delay_samples, doppler_cycles_per_sample, gain }
    }

    /// Tap from a delay in seconds and a Doppler shift in Hz on spacing `dt`.
    pub fn physical(delay: f64, doppler_hz: f64, gain: Complex64, dt: f64) -> Result<Self> {
        let delay_samples = crate::signal::samples_in(delay, dt, "tap delay")?;
        Ok(Self { delay_samples, doppler_cycles_per_sample: doppler_hz * dt, gain })
    }
}

/// Delay-Doppler channel with additive white gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub taps: Vec<Tap>,
    /// Standard deviation of the complex noise per sample (`E|n|² = σ²`).
    pub noise_sigma: f64,
    pub rng_seed: u64,
}

impl ChannelModel {
    /// Channel with gains rescaled to `Σ|h|² = 1`.
    pub fn new(taps: Vec<Tap>, noise_sigma: f64, rng_seed: u64) -> Result<Self> {
        let ch = Self { taps, noise_sigma, rng_seed };
        ch.validate()?;
        Ok(ch.normalized())
    }

    /// Channel whose gains are used exactly as given.
    pub fn unnormalized(taps: Vec<Tap>, noise_sigma: f64, rng_seed: u64) -> Result<Self> {
        let ch = Self { taps, noise_sigma, rng_seed };
        ch.validate()?;
        Ok(ch)
    }

    pub fn identity() -> Self {
        Self { taps: vec![Tap::new(0, 0.0, Complex64::new(1.0, 0.0))], noise_sigma: 0.0, rng_seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.taps.is_empty() {
            return Err(Error::InvalidParameter("channel needs at least one tap".into()));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise sigma must be >= 0, got {}", self.noise_sigma)));
        }
        if self.power() == 0.0 {
            return Err(Error::InvalidParameter("channel gains are all zero".into()));
        }
        Ok(())
    }

    /// `Σ |h_i|²`.
    pub fn power(&self) -> f64 {
        self.taps.iter().map(|t| t.gain.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Self {
        let s = 1.0 / self.power().sqrt();
        let taps = self.taps.iter().map(|t| Tap { gain: t.gain * s, ..*t }).collect();
        Self { taps, ..self.clone() }
    }

    pub fn noiseless(&self) -> Self {
        Self { noise_sigma: 0.0, ..self.clone() }
    }

    /// Smallest and largest delay (samples), both clamped to include 0.
    pub fn delay_span(&self) -> (i64, i64) {
        let lo = self.taps.iter().map(|t| t.delay_samples).min().unwrap_or(0).min(0);
        let hi = self.taps.iter().map(|t| t.delay_samples).max().unwrap_or(0).max(0);
        (lo, hi)
    }

    /// Grid of `H s` for input grid `grid`: extended so no delayed sample is lost.
    pub fn output_grid(&self, grid: &Grid) -> Grid {
        let (lo, hi) = self.delay_span();
        Grid { start: grid.start + lo, len: grid.len + (hi - lo) as usize, dt: grid.dt }
    }

    /// Noiseless `Σ_i h_i s(t - τ_i) e^{2πi ν_i t}`.
    pub fn apply_paths(&self, s: &SampledSignal) -> SampledSignal {
        let grid = self.output_grid(s.grid());
        let samples = (0..grid.len)
            .map(|i| {
                let n = grid.start + i as i64;
                self.taps
                    .iter()
                    .map(|tap| {
                        let v = s.at(n - tap.delay_samples);
                        if v.norm_sqr() == 0.0 {
                            return Complex64::new(0.0, 0.0);
                        }
                        let rot = if tap.doppler_cycles_per_sample == 0.0 {
                            Complex64::new(1.0, 0.0)
                        } else {
                            Complex64::from_polar(1.0, 2.0 * PI * tap.doppler_cycles_per_sample * n as f64)
                        };
                        tap.gain * v * rot
                    })
                    .sum()
            })
            .collect();
        SampledSignal::from_parts(grid, samples)
    }

    /// Channel output with noise drawn from `rng`.
    pub fn apply_with_rng<R: Rng + ?Sized>(&self, s: &SampledSignal, rng: &mut R) -> SampledSignal {
        let mut r = self.apply_paths(s);
        if self.noise_sigma > 0.0 {
            let normal = Normal::new(0.0, self.noise_sigma / 2f64.sqrt()).expect("finite sigma");
            for z in r.samples_mut() {
                *z += Complex64::new(normal.sample(rng), normal.sample(rng));
            }
        }
        r
    }
}

/// `r = H s + n`, noise seeded from the channel's own seed.
pub fn apply_channel(s: &SampledSignal, ch: &ChannelModel) -> SampledSignal {
    let mut rng = stream(ch.rng_seed, Purpose::ChannelNoise, 0);
    ch.apply_with_rng(s, &mut rng)
}
