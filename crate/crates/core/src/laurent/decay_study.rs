use serde::{Deserialize, Serialize};

use super::symbol::build_symbol;
use super::windows::{dual_from_symbol, tight_window};
use super::bounds::bounds_from_symbol;
use crate::decay::{amplitude_floor, decay_envelope_fit, DecayFit, DecayModel};
use crate::error::Result;
use crate::lattice::GaborLattice;
use crate::signal::SampledSignal;
use crate::weight::WeightFunction;

/// Relative weight carried by `|t| > R/2` below which a weighted L1 sum
/// counts as converged (`R` is the grid's largest `|t|`).
pub const TAIL_TOL: f64 = 1e-6;

const BISECTION_STEPS: usize = 60;

/// Weighted L1 norm and whether its tail has converged.
///
/// Samples below the amplitude floor are treated as zero so round-off is not
/// amplified by growing weights.
pub fn weighted_tail(f: &SampledSignal, w: &WeightFunction) -> (f64, bool) {
    let floor = amplitude_floor(f.max_abs());
    let grid = f.grid();
    let half = grid.max_abs_time() / 2.0;
    let (mut total, mut tail) = (0.0, 0.0);
    for (i, z) in f.samples().iter().enumerate() {
        let m = z.norm();
        if m <= floor {
            continue;
        }
        let t = grid.time(i);
        let c = m * w.eval(t);
        total += c;
        if t.abs() > half {
            tail += c;
        }
    }
    (total * f.dt(), total > 0.0 && tail <= TAIL_TOL * total)
}

/// Largest `λ₁ <= λ` for which `e^{λ₁|t|}`-weighted tail of `f` converges.
pub fn largest_converging_rate(f: &SampledSignal, lambda: f64) -> f64 {
    let ok = |l: f64| weighted_tail(f, &WeightFunction::Exponential { lambda: l }).1;
    if ok(lambda) {
        return lambda;
    }
    if !ok(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, lambda);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Order of the six norms and flags in a [`DecayRow`].
pub const NORM_LABELS: [&str; 6] = ["g_time", "dual_time", "tight_time", "g_freq", "dual_freq", "tight_freq"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub weight: WeightFunction,
    pub norms: [f64; 6],
    pub converged: [bool; 6],
    pub grs: bool,
    /// For exponential weights: largest rate at which the dual's tail converges.
    pub lambda1_dual: Option<f64>,
}

impl DecayRow {
    /// Flags as a string of `0`/`1` in [`NORM_LABELS`] order.
    pub fn flag_string(&self) -> String {
        self.converged.iter().map(|&c| if c { '1' } else { '0' }).collect()
    }
}

#[derive(Debug, Clone)]
pub struct DecayStudy {
    pub dual: SampledSignal,
    pub tight: SampledSignal,
    /// Exponential envelope fits of `g`, `γ`, `g̃`.
    pub fits: [Option<DecayFit>; 3],
    pub rows: Vec<DecayRow>,
}

/// Weighted L1 norms and tail convergence of `g`, its canonical dual and its
/// tight window, in time and frequency, for each weight.
pub fn decay_preservation_study(
    g: &SampledSignal,
    lat: &GaborLattice,
    band: usize,
    weights: &[WeightFunction],
) -> Result<DecayStudy> {
    let sym = build_symbol(g, lat, band)?;
    bounds_from_symbol(&sym, 1)?.require_frame()?;
    let dual = dual_from_symbol(&sym);
    let tight = tight_window(g, lat, band, false)?;
    let signals = [g.clone(), dual.clone(), tight.clone(), g.fourier_transform(), dual.fourier_transform(), tight.fourier_transform()];
    let rows = weights
        .iter()
        .map(|w| {
            let mut norms = [0.0; 6];
            let mut converged = [false; 6];
            for (i, s) in signals.iter().enumerate() {
                (norms[i], converged[i]) = weighted_tail(s, w);
            }
            let lambda1_dual = match w {
                WeightFunction::Exponential { lambda } => Some(largest_converging_rate(&dual, *lambda)),
                _ => None,
            };
            DecayRow { weight: *w, norms, converged, grs: w.satisfies_grs(), lambda1_dual }
        })
        .collect();
    let fit = |s: &SampledSignal| decay_envelope_fit(s, DecayModel::Exponential).ok();
    Ok(DecayStudy { fits: [fit(g), fit(&dual), fit(&tight)], dual, tight, rows })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::signal::{make_window, Grid, WindowKind};

    fn gauss() -> SampledSignal {
        make_window(&WindowKind::Gaussian { scale: 1.0 }, Grid::symmetric(12.0, 32).unwrap()).unwrap()
    }

    fn bench() -> GaborLattice {
        GaborLattice::new(1, 2, 1.0).unwrap()
    }

    #[test]
    fn tail_of_exact_exponential() {
        let f = SampledSignal::from_fn(Grid::symmetric(12.0, 32).unwrap(), |t| Complex64::new((-3.0 * t.abs()).exp(), 0.0));
        assert!(weighted_tail(&f, &WeightFunction::Exponential { lambda: 0.5 }).1);
        assert!(!weighted_tail(&f, &WeightFunction::Exponential { lambda: 3.5 }).1);
        // tail/total = e^{-6(3-λ)} crosses 1e-6 near λ = 3 - ln(1e6)/6
        let l1 = largest_converging_rate(&f, 3.5);
        assert!((l1 - (3.0 - 1e6f64.ln() / 6.0)).abs() < 0.05, "{l1}");
    }

    #[test]
    fn gaussian_study() {
        let weights = [
            WeightFunction::Polynomial { s: 2.0 },
            WeightFunction::Exponential { lambda: 0.5 },
            WeightFunction::Exponential { lambda: 3.6 },
        ];
        let st = decay_preservation_study(&gauss(), &bench(), 8, &weights).unwrap();
        assert_eq!(&st.rows[0].flag_string()[..3], "111");
        assert!(st.rows[0].grs);
        assert!(st.rows[1].converged[1]);
        assert!(!st.rows[2].converged[1]);
        assert!(!st.rows[2].grs);
        let l1 = st.rows[2].lambda1_dual.unwrap();
        assert!(l1 > 0.5 && l1 < 3.6);
        let [fg, fd, ft] = st.fits;
        let (fg, fd, ft) = (fg.unwrap(), fd.unwrap(), ft.unwrap());
        assert!(fd.fit_quality >= 0.98 && ft.fit_quality >= 0.98);
        assert!(fd.rate < fg.rate);
    }

    #[test]
    fn frequency_tails_need_enough_bandwidth() {
        // At dt = 1/64 the frequency grid spans ±32 Hz, enough for the dual's
        // spectrum to settle below the tail tolerance.
        let g = make_window(&WindowKind::Gaussian { scale: 1.0 }, Grid::symmetric(12.0, 64).unwrap()).unwrap();
        let st = decay_preservation_study(&g, &bench(), 8, &[WeightFunction::Polynomial { s: 2.0 }]).unwrap();
        assert_eq!(st.rows[0].flag_string(), "111111");
    }

    #[test]
    fn compact_window_has_exponentially_decaying_dual() {
        let r = make_window(&WindowKind::Rectangular { width: 2.5, start: -1.25 }, Grid::symmetric(12.0, 32).unwrap())
            .unwrap();
        let st = decay_preservation_study(&r, &bench(), 24, &[WeightFunction::Constant]).unwrap();
        let support = st.dual.support().unwrap();
        assert!(support.1 - support.0 > r.support().map(|s| s.1 - s.0).unwrap());
        let fit = st.fits[1].unwrap();
        assert!(fit.rate > 0.0 && fit.fit_quality > 0.9, "{fit:?}");
    }
}
