use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::gram::{build_frame_gram, synthesize};
use super::section::{coefficient_norm, frame_coefficients};
use crate::error::{Error, Result};
use crate::lattice::GaborLattice;
use crate::linalg::{hermitian_eigen, CVector};
use crate::rng::{stream, Purpose};
use crate::signal::SampledSignal;

/// Truncated-SVD regularisation of `T_n T_n^* c = d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsvdConfig {
    /// Relative precision `δ` of the data `d`.
    pub delta: f64,
    /// Smoothness parameter of the threshold rule, 1 or 2.
    pub smoothness_p: u8,
    /// Fixed threshold replacing `B_n (δ/p)^{1/(p+1)}`.
    #[serde(default)]
    pub threshold_override: Option<f64>,
    /// When set, `d` is perturbed by seeded gaussian noise of relative size `δ`.
    #[serde(default)]
    pub perturb_seed: Option<u64>,
}

impl TsvdConfig {
    pub fn new(delta: f64, smoothness_p: u8) -> Result<Self> {
        let cfg = Self { delta, smoothness_p, threshold_override: None, perturb_seed: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !matches!(self.smoothness_p, 1 | 2) {
            return Err(Error::InvalidParameter(format!("smoothness_p must be 1 or 2, got {}", self.smoothness_p)));
        }
        if let Some(t) = self.threshold_override {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter(format!("threshold override must be finite and >= 0, got {t}")));
            }
        }
        Ok(())
    }

    /// `τ_n` for largest singular value `b_n`.
    pub fn threshold(&self, b_n: f64) -> f64 {
        self.threshold_override.unwrap_or_else(|| {
            let p = self.smoothness_p as f64;
            b_n * (self.delta / p).powf(1.0 / (p + 1.0))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsvdDiagnostics {
    pub coeff_norm: f64,
    pub rank_kept: usize,
    pub rank_total: usize,
    pub threshold: f64,
    pub largest_singular_value: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone)]
pub struct TsvdSolution {
    pub coefficients: Vec<Complex64>,
    pub reconstruction: SampledSignal,
    pub diagnostics: TsvdDiagnostics,
}

fn perturb(d: &mut [Complex64], delta: f64, seed: u64) {
    let mut rng = stream(seed, Purpose::DataPerturbation, 0);
    let noise: Vec<Complex64> =
        d.iter().map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
    let scale = delta * coefficient_norm(d) / coefficient_norm(&noise);
    for (z, e) in d.iter_mut().zip(noise) {
        *z += e * scale;
    }
}

/// Solves `T_n T_n^* c = d` with singular values below `τ_n` discarded and
/// synthesises `Σ c_{n,m} g_{na, mb}`.
///
/// `T_n T_n^*` is positive semidefinite, so its eigenvalues are its singular
/// values. With a zero threshold every strictly positive eigenvalue is kept.
pub fn tsvd_solve(
    g: &SampledSignal,
    lat: &GaborLattice,
    f: &SampledSignal,
    radius: usize,
    cfg: &TsvdConfig,
) -> Result<TsvdSolution> {
    cfg.validate()?;
    let gram = build_frame_gram(g, lat, radius)?;
    let mut d = frame_coefficients(f, g, lat, radius)?;
    if let Some(seed) = cfg.perturb_seed {
        perturb(&mut d, cfg.delta, seed);
    }
    let (values, vectors) = hermitian_eigen(&gram.matrix);
    let b_n = values.last().copied().unwrap_or(0.0);
    let tau = cfg.threshold(b_n);
    let d = CVector::from_vec(d);
    let mut c = CVector::zeros(d.len());
    let mut kept = 0;
    for (k, &lambda) in values.iter().enumerate() {
        if lambda > tau && lambda > 0.0 {
            let v = vectors.column(k);
            let proj = v.dotc(&d) / lambda;
            c += v * proj;
            kept += 1;
        }
    }
    let coefficients: Vec<Complex64> = c.iter().copied().collect();
    let reconstruction = synthesize(g, &gram.step, &gram.index, &coefficients);
    let relative_error = f.sub(&reconstruction)?.norm() / f.norm();
    Ok(TsvdSolution {
        diagnostics: TsvdDiagnostics {
            coeff_norm: coefficient_norm(&coefficients),
            rank_kept: kept,
            rank_total: values.len(),
            threshold: tau,
            largest_singular_value: b_n,
            relative_error,
        },
        coefficients,
        reconstruction,
    })
}

/// `Σ c_{n,m} g_{na, mb}` with seeded gaussian coefficients over `|n|, |m| <= radius`.
pub fn random_span_signal(g: &SampledSignal, lat: &GaborLattice, radius: usize, seed: u64) -> Result<SampledSignal> {
    let step = super::gram::AtomStep::of(lat, super::gram::LatticeKind::Frame, g.dt())?;
    let index = super::gram::SectionIndex { radius };
    let mut rng = stream(seed, Purpose::SpanSignal, 0);
    let coeffs: Vec<Complex64> = (0..index.len())
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    Ok(synthesize(g, &step, &index, &coeffs))
}
