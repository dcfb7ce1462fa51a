use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{GaborLattice, LatticeSteps};
use crate::linalg::CMatrix;
use crate::signal::SampledSignal;

/// Largest dropped off-band mass `max_t Σ_{|k|>K} |G_{0k}(t)|`, relative to
/// `max_t G_{00}(t)`, accepted by [`build_symbol`].
pub const DROPPED_MASS_TOL: f64 = 1e-10;

/// Correlation entries `G_{kl}(t) = (1/b) Σ_r g(t - ra - k/b) conj g(t - ra - l/b)`
/// evaluated exactly on the sample grid.
#[derive(Debug, Clone)]
pub struct WalnutKernel {
    g: SampledSignal,
    steps: LatticeSteps,
    inv_b: f64,
    support: (i64, i64),
}

fn floor_div(x: i64, d: i64) -> i64 {
    x.div_euclid(d)
}

fn ceil_div(x: i64, d: i64) -> i64 {
    -(-x).div_euclid(d)
}

impl WalnutKernel {
    pub fn new(g: &SampledSignal, lat: &GaborLattice) -> Result<Self> {
        let steps = lat.steps(g.dt())?;
        let support = g.support().unwrap_or((g.grid().start, g.grid().start));
        Ok(Self { g: g.clone(), steps, inv_b: lat.inv_b(), support })
    }

    pub fn steps(&self) -> LatticeSteps {
        self.steps
    }

    pub fn window(&self) -> &SampledSignal {
        &self.g
    }

    /// `r` range keeping `j - r·a - k/b` inside the support of `g`.
    fn r_range(&self, j: i64, k: i64) -> (i64, i64) {
        let (s0, s1) = self.support;
        let a = self.steps.a;
        let base = j - k * self.steps.inv_b;
        (ceil_div(base - s1 + 1, a), floor_div(base - s0, a))
    }

    /// `G_{kl}` at absolute sample `j`.
    pub fn entry(&self, j: i64, k: i64, l: i64) -> Complex64 {
        let (lo_k, hi_k) = self.r_range(j, k);
        let (lo_l, hi_l) = self.r_range(j, l);
        let (lo, hi) = (lo_k.max(lo_l), hi_k.min(hi_l));
        let a = self.steps.a;
        let s = self.steps.inv_b;
        let mut acc = Complex64::new(0.0, 0.0);
        for r in lo..=hi {
            let base = j - r * a;
            acc += self.g.at(base - k * s) * self.g.at(base - l * s).conj();
        }
        acc * self.inv_b
    }

    /// Largest `|k|` with `G_{0k}` not identically zero.
    pub fn reach(&self) -> usize {
        let width = self.support.1 - self.support.0;
        (width / self.steps.inv_b + 1) as usize
    }

    /// Block `[G_{kl}(t_j)]_{|k|,|l| <= K}`.
    pub fn block(&self, j: i64, band: usize) -> CMatrix {
        let n = band as i64;
        let size = 2 * band + 1;
        let mut m = CMatrix::zeros(size, size);
        for k in -n..=n {
            for l in k..=n {
                let v = self.entry(j, k, l);
                let (r, c) = ((k + n) as usize, (l + n) as usize);
                m[(r, c)] = v;
                m[(c, r)] = v.conj();
            }
        }
        m
    }
}

/// `t`-parameterised banded symbol over one period `[0, a)`.
#[derive(Debug, Clone)]
pub struct LaurentSymbol {
    pub lat: GaborLattice,
    pub band: usize,
    pub kernel: WalnutKernel,
    /// One block per sample `t_j = j·dt`, `j = 0..a/dt`.
    pub blocks: Vec<CMatrix>,
    /// `max_t Σ_{|k|>K} |G_{0k}(t)| / max_t G_{00}(t)`.
    pub dropped_mass: f64,
}

impl LaurentSymbol {
    pub fn period(&self) -> i64 {
        self.kernel.steps.a
    }

    pub fn dt(&self) -> f64 {
        self.kernel.g.dt()
    }

    pub fn t_grid(&self) -> Vec<f64> {
        (0..self.period()).map(|j| j as f64 * self.dt()).collect()
    }

    /// Block for absolute sample index `i`, using `a`-periodicity.
    pub fn block_at(&self, i: i64) -> &CMatrix {
        &self.blocks[i.rem_euclid(self.period()) as usize]
    }

    /// `(S f)(t) = Σ_{|k|<=K} G_{0k}(t) f(t - k/b)`.
    pub fn apply_frame_operator(&self, f: &SampledSignal) -> SampledSignal {
        let grid = *f.grid();
        let n = self.band as i64;
        let s = self.kernel.steps.inv_b;
        let samples = (0..grid.len)
            .map(|i| {
                let abs = grid.start + i as i64;
                let block = self.block_at(abs);
                (-n..=n).map(|k| block[(n as usize, (k + n) as usize)] * f.at(abs - k * s)).sum()
            })
            .collect();
        SampledSignal::from_parts(grid, samples)
    }

    /// `Σ_{|k|<=K} row_k(t mod a) · g(t - k/b)` on `g`'s grid, for rows
    /// `rows[j]` indexed by the period sample `j`.
    pub(crate) fn synthesize_rows(&self, rows: &[Vec<Complex64>]) -> SampledSignal {
        let g = &self.kernel.g;
        let grid = *g.grid();
        let n = self.band as i64;
        let s = self.kernel.steps.inv_b;
        let a = self.period();
        let samples = (0..grid.len)
            .into_par_iter()
            .map(|i| {
                let abs = grid.start + i as i64;
                let row = &rows[abs.rem_euclid(a) as usize];
                (-n..=n).map(|k| row[(k + n) as usize] * g.at(abs - k * s)).sum()
            })
            .collect();
        SampledSignal::from_parts(grid, samples)
    }
}

/// Builds the symbol blocks `|k|, |l| <= K` at every sample of `[0, a)`.
///
/// Fails when the off-band column mass exceeds [`DROPPED_MASS_TOL`].
pub fn build_symbol(g: &SampledSignal, lat: &GaborLattice, band: usize) -> Result<LaurentSymbol> {
    let kernel = WalnutKernel::new(g, lat)?;
    let period = kernel.steps.a;
    let blocks: Vec<CMatrix> = (0..period).into_par_iter().map(|j| kernel.block(j, band)).collect();

    let reach = kernel.reach();
    let (dropped, diag) = (0..period)
        .into_par_iter()
        .map(|j| {
            let tail: f64 = ((band + 1)..=reach.max(band))
                .map(|k| kernel.entry(j, 0, k as i64).norm() + kernel.entry(j, 0, -(k as i64)).norm())
                .sum();
            (tail, kernel.entry(j, 0, 0).re)
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)));
    let dropped_mass = if diag > 0.0 { dropped / diag } else { 0.0 };
    if dropped_mass >= DROPPED_MASS_TOL {
        return Err(Error::BandTooNarrow { band, mass: dropped_mass, tol: DROPPED_MASS_TOL });
    }
    Ok(LaurentSymbol { lat: *lat, band, kernel, blocks, dropped_mass })
}
