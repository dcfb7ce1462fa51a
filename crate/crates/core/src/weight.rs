//! Submultiplicative weights and weighted L1 norms.

use serde::{Deserialize, Serialize};

use crate::signal::SampledSignal;

/// Weight families `w(t) > 0` with `w(t1 + t2) <= w(t1) w(t2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightFunction {
    /// `(1 + |t|)^s`
    Polynomial { s: f64 },
    /// `e^{λ |t|^γ}`, `0 < γ < 1`
    Subexponential { lambda: f64, gamma: f64 },
    /// `e^{λ |t|}`
    Exponential { lambda: f64 },
    /// `1`
    Constant,
}

impl WeightFunction {
    pub fn eval(&self, t: f64) -> f64 {
        let x = t.abs();
        match *self {
            WeightFunction::Polynomial { s } => (1.0 + x).powf(s),
            WeightFunction::Subexponential { lambda, gamma } => (lambda * x.powf(gamma)).exp(),
            WeightFunction::Exponential { lambda } => (lambda * x).exp(),
            WeightFunction::Constant => 1.0,
        }
    }

    /// `ln w(t)`, finite where `w(t)` itself overflows.
    pub fn ln_eval(&self, t: f64) -> f64 {
        let x = t.abs();
        match *self {
            WeightFunction::Polynomial { s } => s * x.ln_1p(),
            WeightFunction::Subexponential { lambda, gamma } => lambda * x.powf(gamma),
            WeightFunction::Exponential { lambda } => lambda * x,
            WeightFunction::Constant => 0.0,
        }
    }

    /// Whether `w(n)^{1/n} -> 1` in both directions.
    ///
    /// Polynomial and subexponential growth pass; a genuine exponential
    /// `e^{λ|x|}` has `w(n)^{1/n} = e^λ` and fails.
    pub fn satisfies_grs(&self) -> bool {
        match *self {
            WeightFunction::Polynomial { .. } | WeightFunction::Subexponential { .. } | WeightFunction::Constant => {
                true
            }
            WeightFunction::Exponential { lambda } => lambda == 0.0,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            WeightFunction::Polynomial { .. } => "polynomial",
            WeightFunction::Subexponential { .. } => "subexponential",
            WeightFunction::Exponential { .. } => "exponential",
            WeightFunction::Constant => "constant",
        }
    }

    /// The family's defining parameter (`s`, `λ`, or 0 for constant).
    pub fn param(&self) -> f64 {
        match *self {
            WeightFunction::Polynomial { s } => s,
            WeightFunction::Subexponential { lambda, .. } => lambda,
            WeightFunction::Exponential { lambda } => lambda,
            WeightFunction::Constant => 0.0,
        }
    }
}

/// Closed-form GRS verdict for a catalogued weight.
pub fn grs_catalogue(w: &WeightFunction) -> bool {
    w.satisfies_grs()
}

/// `dt Σ |f(t_i)| w(t_i)`.
pub fn weighted_l1_norm(f: &SampledSignal, w: &WeightFunction) -> f64 {
    let grid = f.grid();
    f.dt() * f.samples().iter().enumerate().map(|(i, z)| z.norm() * w.eval(grid.time(i))).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;
    use proptest::prelude::*;

    use super::*;
    use crate::signal::{make_window, Grid, WindowKind};

    fn catalogue() -> Vec<WeightFunction> {
        vec![
            WeightFunction::Polynomial { s: 2.0 },
            WeightFunction::Polynomial { s: 1.5 },
            WeightFunction::Subexponential { lambda: 1.0, gamma: 0.5 },
            WeightFunction::Exponential { lambda: 1.0 },
            WeightFunction::Constant,
        ]
    }

    #[test]
    fn grs_verdicts() {
        assert!(grs_catalogue(&WeightFunction::Polynomial { s: 2.0 }));
        assert!(!grs_catalogue(&WeightFunction::Exponential { lambda: 1.0 }));
        assert!(grs_catalogue(&WeightFunction::Subexponential { lambda: 1.0, gamma: 0.5 }));
        assert!(grs_catalogue(&WeightFunction::Constant));
    }

    #[test]
    fn grs_matches_nth_root_limit() {
        // w(n)^{1/n} at large n: near 1 for GRS weights, near e^λ otherwise.
        for w in catalogue() {
            let n = 1e10;
            let root = (w.ln_eval(n) / n).exp();
            assert_eq!((root - 1.0).abs() < 1e-3, w.satisfies_grs(), "{w:?}: {root}");
        }
    }

    #[test]
    fn zero_signal_norm() {
        let grid = Grid::symmetric(4.0, 16).unwrap();
        let z = SampledSignal::zeros(grid);
        assert_eq!(weighted_l1_norm(&z, &WeightFunction::Polynomial { s: 2.0 }), 0.0);
    }

    #[test]
    fn rectangle_unit_weight() {
        let grid = Grid::symmetric(4.0, 16).unwrap();
        let r = make_window(&WindowKind::Rectangular { width: 1.0, start: 0.0 }, grid).unwrap();
        assert!((weighted_l1_norm(&r, &WeightFunction::Constant) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_polynomial_weight_quadrature() {
        // ∫ 2^{1/4} e^{-πt²} (1+|t|)² dt = 2^{1/4} (1 + 2/π + 1/(2π))
        let grid = Grid::symmetric(8.0, 256).unwrap();
        let g = make_window(&WindowKind::Gaussian { scale: 1.0 }, grid).unwrap();
        let pi = std::f64::consts::PI;
        let expected = 2f64.powf(0.25) * (1.0 + 2.0 / pi + 1.0 / (2.0 * pi));
        let v = weighted_l1_norm(&g, &WeightFunction::Polynomial { s: 2.0 });
        // |t| has a kink at 0; the Riemann sum is second-order accurate there.
        assert!((v - expected).abs() < 1e-4, "{v} vs {expected}");
    }

    proptest! {
        #[test]
        fn weights_are_positive_and_submultiplicative(t1 in -50.0f64..50.0, t2 in -50.0f64..50.0) {
            for w in catalogue() {
                prop_assert!(w.eval(t1) > 0.0);
                let lhs = w.eval(t1 + t2);
                let rhs = w.eval(t1) * w.eval(t2);
                prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{:?}: {} > {}", w, lhs, rhs);
            }
        }

        #[test]
        fn norm_is_monotone_in_weight(s1 in 0.0f64..3.0, ds in 0.0f64..2.0) {
            let grid = Grid::symmetric(4.0, 16).unwrap();
            let f = SampledSignal::from_fn(grid, |t| Complex64::new((-t.abs()).exp(), t.sin()));
            let n1 = weighted_l1_norm(&f, &WeightFunction::Polynomial { s: s1 });
            let n2 = weighted_l1_norm(&f, &WeightFunction::Polynomial { s: s1 + ds });
            prop_assert!(n1 <= n2 * (1.0 + 1e-14));
        }
    }
}
