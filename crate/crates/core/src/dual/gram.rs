use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::GaborLattice;
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::signal::{truncation_mass, SampledSignal};

/// Largest fraction of `‖g‖²` allowed near the grid edges before the
/// zero-extension of `g` stops being a faithful model of the window.
pub const EDGE_MASS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    /// Atoms `g_{k/b, l/a}`.
    Adjoint,
    /// Atoms `g_{na, mb}`.
    Frame,
}

/// Time step (samples) and modulation step (Hz) of one lattice family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomStep {
    pub shift: i64,
    pub modulation: f64,
}

impl AtomStep {
    pub fn of(lat: &GaborLattice, kind: LatticeKind, dt: f64) -> Result<Self> {
        let steps = lat.steps(dt)?;
        Ok(match kind {
            LatticeKind::Adjoint => AtomStep { shift: steps.inv_b, modulation: lat.inv_a() },
            LatticeKind::Frame => AtomStep { shift: steps.a, modulation: lat.b() },
        })
    }

    /// `g(t - k·shift·dt) e^{2πi l·modulation·t}` on `g`'s grid.
    pub fn atom(&self, g: &SampledSignal, k: i64, l: i64) -> SampledSignal {
        g.shift_modulate(k * self.shift, l as f64 * self.modulation)
    }
}

/// Square section `|k|, |l| <= radius`, flattened row-major with `k` outer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectionIndex {
    pub radius: usize,
}

impl SectionIndex {
    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn row(&self, k: i64, l: i64) -> usize {
        let n = self.radius as i64;
        ((k + n) * (2 * n + 1) + (l + n)) as usize
    }

    pub fn pair(&self, row: usize) -> (i64, i64) {
        let side = self.side();
        let n = self.radius as i64;
        ((row / side) as i64 - n, (row % side) as i64 - n)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.len()).map(move |r| self.pair(r))
    }
}

/// Finite section of a lattice Gram matrix.
///
/// `matrix[(k,l),(k',l')] = ⟨g_{k'·s, l'·r}, g_{k·s, l·r}⟩` for the lattice's
/// step `(s, r)`.
#[derive(Debug, Clone)]
pub struct GramOperator {
    pub kind: LatticeKind,
    pub index: SectionIndex,
    pub step: AtomStep,
    pub matrix: CMatrix,
}

impl GramOperator {
    pub fn radius(&self) -> usize {
        self.index.radius
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Spectral condition number `λ_max / λ_min` (infinite if singular).
    pub fn condition_number(&self) -> f64 {
        let ev = self.eigenvalues();
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// Rows `(k, l, k', l', re, im)` in flattening order.
    pub fn entries(&self) -> Vec<(i64, i64, i64, i64, Complex64)> {
        let mut out = Vec::with_capacity(self.index.len() * self.index.len());
        for r in 0..self.index.len() {
            let (k, l) = self.index.pair(r);
            for c in 0..self.index.len() {
                let (kp, lp) = self.index.pair(c);
                out.push((k, l, kp, lp, self.matrix[(r, c)]));
            }
        }
        out
    }
}

/// Checks that `g` vanishes near its grid edges and that the section's top
/// modulation stays below Nyquist.
pub(crate) fn check_section_fits(g: &SampledSignal, step: &AtomStep, radius: usize) -> Result<()> {
    let margin = g.grid().duration() / 16.0;
    let edge = truncation_mass(g, margin);
    if edge >= EDGE_MASS_TOL {
        return Err(Error::GridTooNarrow(format!(
            "window carries {edge:.2e} of its energy within {margin} of the grid edge"
        )));
    }
    let nyquist = 0.5 / g.dt();
    let top = radius as f64 * step.modulation;
    if top >= nyquist {
        return Err(Error::GridTooNarrow(format!(
            "section radius {radius} reaches modulation {top} Hz, above Nyquist {nyquist} Hz"
        )));
    }
    Ok(())
}

/// `C(d, μ) = dt Σ_j g(t_j + d·dt) conj(g(t_j)) e^{2πiμ t_j}` with `g` zero-extended.
fn correlation(g: &SampledSignal, d: i64, mu: f64) -> Complex64 {
    let grid = g.grid();
    let dt = grid.dt;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, gj) in g.samples().iter().enumerate() {
        if gj.norm_sqr() == 0.0 {
            continue;
        }
        let n = grid.start + i as i64;
        let v = g.at(n + d);
        if v.norm_sqr() == 0.0 {
            continue;
        }
        acc += v * gj.conj() * Complex64::from_polar(1.0, 2.0 * PI * mu * n as f64 * dt);
    }
    acc * dt
}

/// Gram section of the atoms of `g` on the chosen lattice.
///
/// Atoms live on the whole sample line (the window is zero outside its
/// grid), so shifts may exceed the grid without dropping energy. Entries are
/// assembled from the correlation table `C(Δk·s, Δl·r)`, one inner product
/// per difference pair, then phased:
/// `⟨g_{x',ν'}, g_{x,ν}⟩ = e^{2πi(ν'-ν)x} C(x - x', ν' - ν)`.
pub fn build_gram(g: &SampledSignal, lat: &GaborLattice, kind: LatticeKind, radius: usize) -> Result<GramOperator> {
    let step = AtomStep::of(lat, kind, g.dt())?;
    check_section_fits(g, &step, radius)?;
    let index = SectionIndex { radius };
    let n = radius as i64;
    let span = 4 * n + 1;

    let table: Vec<Complex64> = (0..span * span)
        .into_par_iter()
        .map(|i| {
            let dk = i / span - 2 * n;
            let dl = i % span - 2 * n;
            correlation(g, dk * step.shift, dl as f64 * step.modulation)
        })
        .collect();
    let lookup = |dk: i64, dl: i64| table[((dk + 2 * n) * span + (dl + 2 * n)) as usize];

    let dt = g.dt();
    let size = index.len();
    let mut matrix = CMatrix::zeros(size, size);
    for r in 0..size {
        let (k, l) = index.pair(r);
        let x = (k * step.shift) as f64 * dt;
        for c in 0..size {
            let (kp, lp) = index.pair(c);
            let dnu = (lp - l) as f64 * step.modulation;
            matrix[(r, c)] = Complex64::from_polar(1.0, 2.0 * PI * dnu * x) * lookup(k - kp, lp - l);
        }
    }
    Ok(GramOperator { kind, index, step, matrix })
}

/// `H_n H_n^*` on the adjoint lattice `(1/b, 1/a)`.
pub fn build_adjoint_gram(g: &SampledSignal, lat: &GaborLattice, radius: usize) -> Result<GramOperator> {
    build_gram(g, lat, LatticeKind::Adjoint, radius)
}

/// `T_n T_n^*` on the frame lattice `(a, b)`.
pub fn build_frame_gram(g: &SampledSignal, lat: &GaborLattice, radius: usize) -> Result<GramOperator> {
    build_gram(g, lat, LatticeKind::Frame, radius)
}

/// Synthesis `Σ c_{kl} g_{k·s, l·r}` on `g`'s grid.
pub fn synthesize(g: &SampledSignal, step: &AtomStep, index: &SectionIndex, coeffs: &[Complex64]) -> SampledSignal {
    let grid = *g.grid();
    let dt = grid.dt;
    let n = index.radius as i64;
    let side = index.side();
    let samples: Vec<Complex64> = (0..grid.len)
        .into_par_iter()
        .map(|i| {
            let abs = grid.start + i as i64;
            let t = abs as f64 * dt;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in -n..=n {
                let v = g.at(abs - k * step.shift);
                if v.norm_sqr() == 0.0 {
                    continue;
                }
                let row = &coeffs[((k + n) as usize) * side..((k + n) as usize + 1) * side];
                let mut inner = Complex64::new(0.0, 0.0);
                for (j, c) in row.iter().enumerate() {
                    let l = j as i64 - n;
                    inner += c * Complex64::from_polar(1.0, 2.0 * PI * l as f64 * step.modulation * t);
                }
                acc += v * inner;
            }
            acc
        })
        .collect();
    SampledSignal::from_parts(grid, samples)
}

/// Analysis `⟨f, g_{k·s, l·r}⟩` over the section, in flattening order.
pub fn analyze(f: &SampledSignal, g: &SampledSignal, step: &AtomStep, index: &SectionIndex) -> Result<Vec<Complex64>> {
    if !f.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", f.grid(), g.grid())));
    }
    let pairs: Vec<(i64, i64)> = index.pairs().collect();
    Ok(pairs
        .par_iter()
        .map(|&(k, l)| {
            let atom = step.atom(g, k, l);
            crate::signal::inner_unchecked(f.samples(), atom.samples(), f.dt())
        })
        .collect())
}
