use num_complex::Complex64;
use rayon::prelude::*;

use super::bounds::{bounds_from_symbol, FrameBounds};
use super::symbol::{build_symbol, LaurentSymbol};
use crate::error::Result;
use crate::lattice::GaborLattice;
use crate::linalg::{hermitian_function, CMatrix};
use crate::signal::SampledSignal;

/// Eigenvalue floor for `G^{-1/2}`, relative to the lower frame bound.
pub const INV_SQRT_FLOOR: f64 = 1e-6;

fn row_zero(m: &CMatrix, band: usize) -> Vec<Complex64> {
    (0..m.ncols()).map(|c| m[(band, c)]).collect()
}

/// `γ(t) = Σ_{|k|<=K} [G_K(t)^{-1}]_{0k} g(t - k/b)`.
pub fn canonical_dual_laurent(g: &SampledSignal, lat: &GaborLattice, band: usize) -> Result<SampledSignal> {
    let sym = build_symbol(g, lat, band)?;
    bounds_from_symbol(&sym, 1)?.require_frame()?;
    Ok(dual_from_symbol(&sym))
}

pub(crate) fn dual_from_symbol(sym: &LaurentSymbol) -> SampledSignal {
    let rows: Vec<Vec<Complex64>> = sym
        .blocks
        .par_iter()
        .map(|b| {
            let inv = b.clone().cholesky().map(|c| c.inverse()).unwrap_or_else(|| {
                b.clone().try_inverse().unwrap_or_else(|| CMatrix::zeros(b.nrows(), b.ncols()))
            });
            row_zero(&inv, sym.band)
        })
        .collect();
    sym.synthesize_rows(&rows)
}

/// Tight window with its diagnostics.
#[derive(Debug, Clone)]
pub struct TightWindow {
    pub window: SampledSignal,
    /// Eigenvalues clamped to the floor `A·1e-6` across all blocks.
    pub floor_hits: usize,
    /// Bounds of the original system.
    pub bounds: FrameBounds,
    /// Factor applied so the measured lower frame bound of the result is 1.
    pub rescale: f64,
}

/// `g̃ = S^{-1/2} g` via `G(t)^{-1/2}`, rescaled so its frame is 1-tight and,
/// if `unit_norm`, then normalised to `‖g̃‖ = 1`.
pub fn tight_window_report(g: &SampledSignal, lat: &GaborLattice, band: usize, unit_norm: bool) -> Result<TightWindow> {
    let sym = build_symbol(g, lat, band)?;
    let bounds = bounds_from_symbol(&sym, 1)?;
    bounds.require_frame()?;
    let floor = bounds.lower * INV_SQRT_FLOOR;
    let parts: Vec<(Vec<Complex64>, usize)> = sym
        .blocks
        .par_iter()
        .map(|b| {
            let (m, hits) = hermitian_function(b, floor, |v| v.powf(-0.5));
            (row_zero(&m, sym.band), hits)
        })
        .collect();
    let floor_hits = parts.iter().map(|p| p.1).sum();
    let rows: Vec<Vec<Complex64>> = parts.into_iter().map(|p| p.0).collect();
    let raw = sym.synthesize_rows(&rows);

    let measured = bounds_from_symbol(&build_symbol(&raw, lat, band)?, 1)?;
    measured.require_frame()?;
    let rescale = 1.0 / measured.lower.sqrt();
    let mut window = raw.scaled(Complex64::new(rescale, 0.0));
    if unit_norm {
        window = window.normalized()?;
    }
    Ok(TightWindow { window, floor_hits, bounds, rescale })
}

pub fn tight_window(g: &SampledSignal, lat: &GaborLattice, band: usize, unit_norm: bool) -> Result<SampledSignal> {
    tight_window_report(g, lat, band, unit_norm).map(|t| t.window)
}
