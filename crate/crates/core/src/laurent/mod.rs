//! The `t`-parameterised Laurent symbol of a Gabor frame operator: frame
//! bounds, canonical dual and tight windows, and decay-class checks.

mod bounds;
mod decay_study;
mod symbol;
mod windows;

pub use bounds::{bounds_from_symbol, frame_bounds, BoundsRow, FrameBounds, NOT_FRAME_RATIO, THETA_SAMPLES};
pub use decay_study::{
    decay_preservation_study, largest_converging_rate, weighted_tail, DecayRow, DecayStudy, NORM_LABELS, TAIL_TOL,
};
pub use symbol::{build_symbol, LaurentSymbol, WalnutKernel, DROPPED_MASS_TOL};
pub use windows::{canonical_dual_laurent, tight_window, tight_window_report, TightWindow, INV_SQRT_FLOOR};

pub use crate::weight::grs_catalogue;
