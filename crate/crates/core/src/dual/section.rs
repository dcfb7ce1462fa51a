use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gram::{analyze, build_adjoint_gram, synthesize, AtomStep, GramOperator, LatticeKind, SectionIndex};
use crate::error::{Error, Result};
use crate::lattice::{Density, GaborLattice};
use crate::linalg::{cholesky_checked, CVector};
use crate::signal::{inner_product, SampledSignal};

/// Smallest Cholesky pivot accepted, relative to the largest diagonal entry.
pub const PIVOT_FLOOR: f64 = 1e-12;

/// Right-hand side `σ = ab·δ_{k0}δ_{l0}` over a section.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaVector {
    pub index: SectionIndex,
    pub values: Vec<Complex64>,
}

impl SigmaVector {
    pub fn new(lat: &GaborLattice, radius: usize) -> Self {
        let index = SectionIndex { radius };
        let mut values = vec![Complex64::new(0.0, 0.0); index.len()];
        values[index.row(0, 0)] = Complex64::new(lat.ab(), 0.0);
        Self { index, values }
    }
}

/// Finite-section dual together with the section it came from.
#[derive(Debug, Clone)]
pub struct SectionDual {
    pub window: SampledSignal,
    pub coefficients: Vec<Complex64>,
    pub gram: GramOperator,
}

/// Solves `H_n H_n^* x = σ` and synthesises `γ⁽ⁿ⁾ = Σ x_{kl} g_{k/b, l/a}`.
pub fn finite_section_solve(g: &SampledSignal, lat: &GaborLattice, radius: usize) -> Result<SectionDual> {
    if lat.density() == Density::Sparse {
        return Err(Error::FrameDeficiency { radius, ratio: 0.0 });
    }
    let gram = build_adjoint_gram(g, lat, radius)?;
    let chol = cholesky_checked(&gram.matrix, PIVOT_FLOOR).map_err(|ratio| Error::FrameDeficiency { radius, ratio })?;
    let sigma = SigmaVector::new(lat, radius);
    let x = chol.solve(&CVector::from_vec(sigma.values));
    let coefficients: Vec<Complex64> = x.iter().copied().collect();
    let window = synthesize(g, &gram.step, &gram.index, &coefficients);
    Ok(SectionDual { window, coefficients, gram })
}

/// `γ⁽ⁿ⁾` on `g`'s grid.
pub fn finite_section_dual(g: &SampledSignal, lat: &GaborLattice, radius: usize) -> Result<SampledSignal> {
    finite_section_solve(g, lat, radius).map(|s| s.window)
}

/// `max_{|k|,|l| <= m} |⟨γ, g_{k/b, l/a}⟩ - ab·δ_{k0}δ_{l0}|`.
pub fn wexler_raz_residual(gamma: &SampledSignal, g: &SampledSignal, lat: &GaborLattice, m: usize) -> Result<f64> {
    if !gamma.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", gamma.grid(), g.grid())));
    }
    let step = AtomStep::of(lat, LatticeKind::Adjoint, g.dt())?;
    let index = SectionIndex { radius: m };
    let coeffs = analyze(gamma, g, &step, &index)?;
    let zero = index.row(0, 0);
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let target = if i == zero { lat.ab() } else { 0.0 };
            (c - target).norm()
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub error_l2: f64,
    pub cond: f64,
    pub wr_residual: f64,
}

/// Check radius used for the Wexler-Raz column of a convergence study.
pub const STUDY_WR_RADIUS: usize = 4;

/// Errors `‖γ⁽ⁿ⁾ - γ⁽ⁿʳᵉᶠ⁾‖₂`, section condition numbers and Wexler-Raz
/// residuals for each `n` in `n_list`.
pub fn convergence_study(
    g: &SampledSignal,
    lat: &GaborLattice,
    n_list: &[usize],
    n_ref: usize,
) -> Result<Vec<ConvergenceRow>> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("n_list is empty".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("n_list must be strictly increasing".into()));
    }
    let n_max = *n_list.last().unwrap_or(&0);
    if n_ref < n_max + 4 {
        return Err(Error::InvalidParameter(format!("n_ref = {n_ref} must be at least max(n_list) + 4 = {}", n_max + 4)));
    }
    let reference = finite_section_dual(g, lat, n_ref)?;
    n_list
        .par_iter()
        .map(|&n| {
            let sec = finite_section_solve(g, lat, n)?;
            Ok(ConvergenceRow {
                n,
                error_l2: sec.window.sub(&reference)?.norm(),
                cond: sec.gram.condition_number(),
                wr_residual: wexler_raz_residual(&sec.window, g, lat, STUDY_WR_RADIUS)?,
            })
        })
        .collect()
}

/// `d_{n,m} = ⟨f, g_{na, mb}⟩` over `|n|, |m| <= radius`, flattened with `n` outer.
pub fn frame_coefficients(f: &SampledSignal, g: &SampledSignal, lat: &GaborLattice, radius: usize) -> Result<Vec<Complex64>> {
    let step = AtomStep::of(lat, LatticeKind::Frame, g.dt())?;
    analyze(f, g, &step, &SectionIndex { radius })
}

/// `f_rec = Σ ⟨f, γ_{na,mb}⟩ g_{na,mb}` over `|n|, |m| <= radius` and `‖f - f_rec‖/‖f‖`.
pub fn reconstruct(
    f: &SampledSignal,
    g: &SampledSignal,
    gamma: &SampledSignal,
    lat: &GaborLattice,
    radius: usize,
) -> Result<(SampledSignal, f64)> {
    if !gamma.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", gamma.grid(), g.grid())));
    }
    let step = AtomStep::of(lat, LatticeKind::Frame, g.dt())?;
    let index = SectionIndex { radius };
    let coeffs = analyze(f, gamma, &step, &index)?;
    let rec = synthesize(g, &step, &index, &coeffs);
    let err = f.sub(&rec)?.norm() / f.norm();
    Ok((rec, err))
}

/// `⟨γ, g⟩`, the `(0, 0)` biorthogonality value.
pub fn zero_correlation(gamma: &SampledSignal, g: &SampledSignal) -> Result<Complex64> {
    inner_product(gamma, g)
}

pub(crate) fn coefficient_norm(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
