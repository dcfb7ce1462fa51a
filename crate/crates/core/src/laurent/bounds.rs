use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::symbol::{build_symbol, LaurentSymbol, WalnutKernel};
use crate::error::{Error, Result};
use crate::lattice::GaborLattice;
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::signal::SampledSignal;

/// A system with `A <= NOT_FRAME_RATIO · B` is reported as not a frame.
pub const NOT_FRAME_RATIO: f64 = 1e-10;

/// Coarse `θ` samples per period before golden-section refinement.
pub const THETA_SAMPLES: usize = 64;

const GOLDEN_TOL: f64 = 1e-12;

/// Relative spread below which a coarse scan is taken as constant in `θ`.
const FLAT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub t: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// Optimal frame bounds `A = inf_t λ_min(G(t))`, `B = sup_t λ_max(G(t))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub t_argmin: f64,
    pub t_argmax: f64,
    pub band: usize,
    /// Every `t_stride`-th sample of `[0, a)` was visited.
    pub t_stride: usize,
    pub is_frame: bool,
    pub rows: Vec<BoundsRow>,
}

impl FrameBounds {
    /// `B / A`, infinite when not a frame.
    pub fn ratio(&self) -> f64 {
        if self.is_frame {
            self.upper / self.lower
        } else {
            f64::INFINITY
        }
    }

    pub fn require_frame(&self) -> Result<()> {
        if self.is_frame {
            Ok(())
        } else {
            Err(Error::NotAFrame { lower: self.lower, upper: self.upper })
        }
    }
}

/// Bi-infinite `G(t)` viewed as a block Toeplitz matrix with `p × p` blocks
/// `(B_m)_{ij} = G_{i, j+mp}(t)`, entries with `|j + mp - i| > K` dropped.
struct BlockSymbol {
    p: usize,
    band: i64,
    /// `coeffs[i][d + K] = G_{i, i+d}`.
    coeffs: Vec<Vec<Complex64>>,
}

impl BlockSymbol {
    fn new(kernel: &WalnutKernel, j: i64, p: usize, band: usize) -> Self {
        let band = band as i64;
        let coeffs = (0..p as i64)
            .map(|i| (-band..=band).map(|d| kernel.entry(j, i, i + d)).collect())
            .collect();
        Self { p, band, coeffs }
    }

    /// `Φ(θ) = Σ_m B_m e^{2πimθ}`.
    fn at(&self, theta: f64) -> CMatrix {
        let p = self.p as i64;
        let mut m = CMatrix::zeros(self.p, self.p);
        for i in 0..p {
            for d in -self.band..=self.band {
                let k = i + d;
                let col = k.rem_euclid(p);
                let block = (k - col) / p;
                let phase = Complex64::from_polar(1.0, 2.0 * PI * block as f64 * theta);
                m[(i as usize, col as usize)] += self.coeffs[i as usize][(d + self.band) as usize] * phase;
            }
        }
        m
    }

    fn extremes(&self, theta: f64) -> (f64, f64) {
        if self.p == 1 {
            let v = self.at(theta)[(0, 0)].re;
            return (v, v);
        }
        let ev = hermitian_eigenvalues(&self.at(theta));
        (ev[0], ev[ev.len() - 1])
    }

    /// Minimum of `f` over the circle `θ ∈ [0, 1)`: coarse scan, then
    /// golden-section search around every sampled local minimum.
    fn minimise(&self, f: impl Fn(f64) -> f64) -> f64 {
        let n = THETA_SAMPLES;
        let vals: Vec<f64> = (0..n).map(|s| f(s as f64 / n as f64)).collect();
        let mut best = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let top = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top - best <= FLAT_TOL * top.abs().max(best.abs()) {
            return best;
        }
        for s in 0..n {
            let prev = vals[(s + n - 1) % n];
            let next = vals[(s + 1) % n];
            // a plateau is refined once, at its last sample
            if vals[s] <= prev && vals[s] < next {
                let lo = (s as f64 - 1.0) / n as f64;
                let hi = (s as f64 + 1.0) / n as f64;
                best = best.min(golden_min(&f, lo, hi));
            }
        }
        best
    }

    fn bounds(&self) -> (f64, f64) {
        let lo = self.minimise(|th| self.extremes(th).0);
        let hi = -self.minimise(|th| -self.extremes(th).1);
        (lo, hi)
    }
}

fn golden_min(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > GOLDEN_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

/// Frame bounds from a prebuilt symbol, visiting every `t_stride`-th sample.
pub fn bounds_from_symbol(sym: &LaurentSymbol, t_stride: usize) -> Result<FrameBounds> {
    if t_stride == 0 {
        return Err(Error::InvalidParameter("t_stride must be at least 1".into()));
    }
    let p = sym.lat.p() as usize;
    let dt = sym.dt();
    let js: Vec<i64> = (0..sym.period()).step_by(t_stride).collect();
    let rows: Vec<BoundsRow> = js
        .par_iter()
        .map(|&j| {
            let (lambda_min, lambda_max) = BlockSymbol::new(&sym.kernel, j, p, sym.band).bounds();
            BoundsRow { t: j as f64 * dt, lambda_min, lambda_max }
        })
        .collect();
    let argmin = rows.iter().min_by(|x, y| x.lambda_min.total_cmp(&y.lambda_min)).copied();
    let argmax = rows.iter().max_by(|x, y| x.lambda_max.total_cmp(&y.lambda_max)).copied();
    let (argmin, argmax) = match (argmin, argmax) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InsufficientData("empty t grid".into())),
    };
    let (lower, upper) = (argmin.lambda_min, argmax.lambda_max);
    Ok(FrameBounds {
        lower,
        upper,
        t_argmin: argmin.t,
        t_argmax: argmax.t,
        band: sym.band,
        t_stride,
        is_frame: upper > 0.0 && lower > NOT_FRAME_RATIO * upper,
        rows,
    })
}

/// Optimal frame bounds of the Gabor system `(g, a, b)`.
///
/// Non-frames are reported through [`FrameBounds::is_frame`], not as errors.
pub fn frame_bounds(g: &SampledSignal, lat: &GaborLattice, band: usize, t_stride: usize) -> Result<FrameBounds> {
    let sym = build_symbol(g, lat, band)?;
    bounds_from_symbol(&sym, t_stride)
}
