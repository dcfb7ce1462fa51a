use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::frame::{Constellation, SymbolFrame};
use crate::error::{Error, Result};
use crate::lattice::{Density, GaborLattice};
use crate::laurent::{build_symbol, bounds_from_symbol, canonical_dual_laurent, tight_window};
use crate::signal::{inner_product, Grid, SampledSignal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OfdmMode {
    /// `ψ = φ =` unit-norm tight window.
    OfdmTight,
    /// `ψ = g/‖g‖`, `φ` the scaled canonical dual.
    BfdmDual,
}

/// Radius of the lattice neighbourhood scanned for orthogonality errors.
pub const ORTHOGONALITY_RADIUS: i64 = 3;

/// Pulse-shaping OFDM system on the lattice `T = 1/b`, `F = 1/a`.
#[derive(Debug, Clone)]
pub struct OfdmConfig {
    pub mode: OfdmMode,
    pub lattice: GaborLattice,
    pub carriers: usize,
    pub symbols: usize,
    /// `T` in samples.
    pub symbol_samples: i64,
    /// `F` in Hz.
    pub carrier_spacing: f64,
    pub psi: SampledSignal,
    pub phi: SampledSignal,
    /// `B/A` of the generating system `(g, a, b)`.
    pub frame_bound_ratio: f64,
    pub orthogonality_error: f64,
    /// Zero padding on both sides of a burst, in samples.
    pub guard_samples: i64,
}

impl OfdmConfig {
    pub fn dt(&self) -> f64 {
        self.psi.dt()
    }

    /// `T` in seconds.
    pub fn symbol_period(&self) -> f64 {
        self.symbol_samples as f64 * self.dt()
    }

    pub fn tf(&self) -> f64 {
        self.symbol_period() * self.carrier_spacing
    }

    /// `ψ_{kl}` or `φ_{kl}` value at absolute sample `n`.
    fn atom_at(pulse: &SampledSignal, t_samples: i64, f: f64, k: i64, l: i64, n: i64) -> Complex64 {
        let v = pulse.at(n - k * t_samples);
        if v.norm_sqr() == 0.0 || l == 0 {
            return v;
        }
        v * Complex64::from_polar(1.0, 2.0 * PI * l as f64 * f * n as f64 * pulse.dt())
    }

    /// `ψ(t - kT) e^{2πi t lF}` on `grid`.
    pub fn tx_atom(&self, k: i64, l: i64, grid: &Grid) -> SampledSignal {
        let s = (0..grid.len)
            .map(|i| Self::atom_at(&self.psi, self.symbol_samples, self.carrier_spacing, k, l, grid.start + i as i64))
            .collect();
        SampledSignal::from_parts(*grid, s)
    }

    /// `φ(t - kT) e^{2πi t lF}` on `grid`.
    pub fn rx_atom(&self, k: i64, l: i64, grid: &Grid) -> SampledSignal {
        let s = (0..grid.len)
            .map(|i| Self::atom_at(&self.phi, self.symbol_samples, self.carrier_spacing, k, l, grid.start + i as i64))
            .collect();
        SampledSignal::from_parts(*grid, s)
    }

    /// Grid holding a burst of `symbols` pulses plus the guard on each side.
    pub fn burst_grid(&self) -> Grid {
        let pg = self.psi.grid();
        let span = (self.symbols.max(1) as i64 - 1) * self.symbol_samples;
        Grid { start: pg.start - self.guard_samples, len: pg.len + (span + 2 * self.guard_samples) as usize, dt: pg.dt }
    }
}

/// `Δt·Δf` from normalised second moments of `|f|²` and `|f̂|²` about their centroids.
pub fn heisenberg_product(f: &SampledSignal) -> f64 {
    fn spread(s: &SampledSignal) -> f64 {
        let grid = s.grid();
        let w: Vec<f64> = s.samples().iter().map(|z| z.norm_sqr()).collect();
        let total: f64 = w.iter().sum();
        let mean = w.iter().enumerate().map(|(i, x)| x * grid.time(i)).sum::<f64>() / total;
        let var = w.iter().enumerate().map(|(i, x)| x * (grid.time(i) - mean).powi(2)).sum::<f64>() / total;
        var.sqrt()
    }
    spread(f) * spread(&f.fourier_transform())
}

/// `max_{|k|,|l| <= 3} |⟨ψ_{kl}, φ⟩ - δ_{k0}δ_{l0}|`.
pub fn orthogonality_error(psi: &SampledSignal, phi: &SampledSignal, t_samples: i64, f: f64) -> Result<f64> {
    let r = ORTHOGONALITY_RADIUS;
    let pairs: Vec<(i64, i64)> = (-r..=r).flat_map(|k| (-r..=r).map(move |l| (k, l))).collect();
    let grid = *phi.grid();
    let errs: Result<Vec<f64>> = pairs
        .par_iter()
        .map(|&(k, l)| {
            let s = (0..grid.len).map(|i| OfdmConfig::atom_at(psi, t_samples, f, k, l, grid.start + i as i64)).collect();
            let atom = SampledSignal::from_parts(grid, s);
            let v = inner_product(&atom, phi)?;
            let target = if (k, l) == (0, 0) { 1.0 } else { 0.0 };
            Ok((v - target).norm())
        })
        .collect();
    Ok(errs?.into_iter().fold(0.0, f64::max))
}

/// Effective radius `sqrt(∫ t²|ψ|²)/‖ψ‖` rounded up to samples.
fn effective_radius_samples(psi: &SampledSignal) -> i64 {
    let grid = psi.grid();
    let w: Vec<f64> = psi.samples().iter().map(|z| z.norm_sqr()).collect();
    let total: f64 = w.iter().sum();
    let mean = w.iter().enumerate().map(|(i, x)| x * grid.time(i)).sum::<f64>() / total;
    let var = w.iter().enumerate().map(|(i, x)| x * (grid.time(i) - mean).powi(2)).sum::<f64>() / total;
    (var.sqrt() / grid.dt).ceil() as i64
}

/// Burst size of an OFDM system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BurstShape {
    pub carriers: usize,
    pub symbols: usize,
}

/// OFDM (`ψ_{kl} = g̃_{k/b, l/a}`) or BFDM system generated by the frame `(g, a, b)`.
pub fn build_ofdm_from_gabor(
    g: &SampledSignal,
    lat: &GaborLattice,
    band: usize,
    mode: OfdmMode,
    shape: BurstShape,
) -> Result<OfdmConfig> {
    if lat.density() != Density::Redundant {
        return Err(Error::NoOrthonormalSystem { ab: lat.ab() });
    }
    if shape.carriers == 0 || shape.symbols == 0 {
        return Err(Error::InvalidParameter("burst needs at least one carrier and one symbol".into()));
    }
    let steps = lat.steps(g.dt())?;
    let bounds = bounds_from_symbol(&build_symbol(g, lat, band)?, 1)?;
    bounds.require_frame()?;
    let (psi, phi) = match mode {
        OfdmMode::OfdmTight => {
            let gt = tight_window(g, lat, band, true)?;
            (gt.clone(), gt)
        }
        OfdmMode::BfdmDual => {
            let psi = g.normalized()?;
            let gamma = canonical_dual_laurent(g, lat, band)?;
            let c = inner_product(&psi, &gamma)?;
            (psi, gamma.scaled(Complex64::new(1.0, 0.0) / c.conj()))
        }
    };
    let carrier_spacing = lat.inv_a();
    let orthogonality_error = orthogonality_error(&psi, &phi, steps.inv_b, carrier_spacing)?;
    let guard_samples = 4 * effective_radius_samples(&psi);
    Ok(OfdmConfig {
        mode,
        lattice: *lat,
        carriers: shape.carriers,
        symbols: shape.symbols,
        symbol_samples: steps.inv_b,
        carrier_spacing,
        psi,
        phi,
        frame_bound_ratio: bounds.ratio(),
        orthogonality_error,
        guard_samples,
    })
}

/// `s(t) = Σ_k Σ_l c_{kl} ψ(t - kT) e^{2πi t lF}` on the burst grid.
pub fn modulate(cfg: &OfdmConfig, frame: &SymbolFrame) -> Result<SampledSignal> {
    if frame.symbols != cfg.symbols || frame.carriers != cfg.carriers {
        return Err(Error::InvalidParameter(format!(
            "frame is {}×{}, system expects {}×{}",
            frame.symbols, frame.carriers, cfg.symbols, cfg.carriers
        )));
    }
    let grid = cfg.burst_grid();
    let dt = grid.dt;
    let samples = (0..grid.len)
        .into_par_iter()
        .map(|i| {
            let n = grid.start + i as i64;
            let base = 2.0 * PI * cfg.carrier_spacing * n as f64 * dt;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..cfg.symbols {
                let v = cfg.psi.at(n - k as i64 * cfg.symbol_samples);
                if v.norm_sqr() == 0.0 {
                    continue;
                }
                let inner: Complex64 =
                    (0..cfg.carriers).map(|l| frame.get(k, l) * Complex64::from_polar(1.0, base * l as f64)).sum();
                acc += v * inner;
            }
            acc
        })
        .collect();
    Ok(SampledSignal::from_parts(grid, samples))
}

/// `c̃_{kl} = ⟨r, φ_{kl}⟩` for the burst's lattice points.
pub fn demodulate(cfg: &OfdmConfig, r: &SampledSignal) -> SymbolFrame {
    let grid = *r.grid();
    let idx: Vec<(usize, usize)> = (0..cfg.symbols).flat_map(|k| (0..cfg.carriers).map(move |l| (k, l))).collect();
    let data = idx
        .par_iter()
        .map(|&(k, l)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, z) in r.samples().iter().enumerate() {
                if z.norm_sqr() == 0.0 {
                    continue;
                }
                let n = grid.start + i as i64;
                acc += z * OfdmConfig::atom_at(&cfg.phi, cfg.symbol_samples, cfg.carrier_spacing, k as i64, l as i64, n).conj();
            }
            acc * grid.dt
        })
        .collect();
    SymbolFrame { symbols: cfg.symbols, carriers: cfg.carriers, data, constellation: Constellation::Arbitrary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{make_window, WindowKind};

    fn gauss(den: u32) -> SampledSignal {
        make_window(&WindowKind::Gaussian { scale: 1.0 }, Grid::symmetric(12.0, den).unwrap()).unwrap()
    }

    fn tf2(mode: OfdmMode) -> OfdmConfig {
        let lat = GaborLattice::new(1, 2, 1.0).unwrap();
        build_ofdm_from_gabor(&gauss(32), &lat, 8, mode, BurstShape { carriers: 16, symbols: 8 }).unwrap()
    }

    #[test]
    fn tight_tf2_system() {
        let cfg = tf2(OfdmMode::OfdmTight);
        assert!((cfg.tf() - 2.0).abs() < 1e-15);
        assert!(cfg.orthogonality_error <= 1e-7);
        assert!((cfg.psi.norm() - 1.0).abs() < 1e-9);
        assert!(cfg.frame_bound_ratio > 1.0);
    }

    #[test]
    fn critical_and_sparse_lattices_rejected() {
        let shape = BurstShape { carriers: 4, symbols: 2 };
        let grid = Grid::symmetric(12.0, 32).unwrap();
        let r = make_window(&WindowKind::Rectangular { width: 1.0, start: 0.0 }, grid).unwrap();
        for (p, q) in [(1, 1), (3, 2)] {
            let lat = GaborLattice::new(p, q, 1.0).unwrap();
            let e = build_ofdm_from_gabor(&r, &lat, 4, OfdmMode::OfdmTight, shape).unwrap_err();
            assert!(matches!(e, Error::NoOrthonormalSystem { .. }));
        }
    }

    #[test]
    fn tf13_system_is_constructible() {
        let dt = 1.0 / 96.0;
        let lat = GaborLattice::balanced(10, 13, dt).unwrap();
        let cfg = build_ofdm_from_gabor(&gauss(96), &lat, 12, OfdmMode::OfdmTight, BurstShape { carriers: 4, symbols: 2 }).unwrap();
        assert!((cfg.tf() - 1.3).abs() < 1e-12);
        assert!(cfg.frame_bound_ratio.is_finite() && cfg.frame_bound_ratio > 1.5);
        assert!(cfg.orthogonality_error < 1e-6);
    }

    #[test]
    fn single_symbol_is_the_pulse() {
        let cfg = tf2(OfdmMode::OfdmTight);
        let mut frame = SymbolFrame::zeros(8, 16);
        frame.set(0, 0, Complex64::new(1.0, 0.0));
        let s = modulate(&cfg, &frame).unwrap();
        let psi = cfg.psi.on_grid(*s.grid()).unwrap();
        assert!(s.sub(&psi).unwrap().norm() < 1e-14);
        frame.set(0, 1, Complex64::new(1.0, 0.0));
        let s2 = modulate(&cfg, &frame).unwrap();
        assert!((s2.norm_sqr() - 2.0).abs() <= 2.0 * cfg.orthogonality_error + 1e-12);
    }

    #[test]
    fn ideal_channel_identity_and_energy() {
        for mode in [OfdmMode::OfdmTight, OfdmMode::BfdmDual] {
            let cfg = tf2(mode);
            let mut rng = crate::rng::stream(3, crate::rng::Purpose::OfdmFrame, 0);
            let (frame, _) = SymbolFrame::random_qpsk(8, 16, &mut rng);
            let s = modulate(&cfg, &frame).unwrap();
            let back = demodulate(&cfg, &s);
            assert!(back.max_error(&frame) <= 1e-6, "{mode:?}: {}", back.max_error(&frame));
            if mode == OfdmMode::OfdmTight {
                let tol = 2.0 * cfg.orthogonality_error * 128.0;
                assert!((s.norm_sqr() - 128.0).abs() <= tol.max(1e-9), "{}", s.norm_sqr());
            }
        }
    }

    #[test]
    fn receiver_pulse_picks_its_coefficient() {
        let cfg = tf2(OfdmMode::OfdmTight);
        let grid = cfg.burst_grid();
        let r = cfg.rx_atom(0, 0, &grid);
        let c = demodulate(&cfg, &r);
        assert!((c.get(0, 0) - 1.0).norm() < 1e-9);
        for (i, z) in c.data.iter().enumerate().skip(1) {
            assert!(z.norm() <= cfg.orthogonality_error + 1e-12, "{i}");
        }
    }

    #[test]
    fn gaussian_is_heisenberg_optimal() {
        let g = gauss(32);
        assert!((heisenberg_product(&g) - 1.0 / (4.0 * PI)).abs() < 1e-6);
        let r = make_window(&WindowKind::Rectangular { width: 2.0, start: -1.0 }, *g.grid()).unwrap();
        assert!(heisenberg_product(&r) > 1.0 / (4.0 * PI));
    }
}
