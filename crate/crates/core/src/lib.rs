//! Gabor frames on rational lattices: canonical duals, tight windows, frame
//! bounds, decay checks and OFDM pulse-shaping studies.
//!
//! Signals are sampled on uniform grids and treated as zero outside them.
//! Lattices have `ab = p/q` with both steps integer multiples of the sample
//! spacing, so every time shift is exact.

pub mod decay;
pub mod dual;
pub mod error;
pub mod io;
pub mod lattice;
pub mod laurent;
pub mod linalg;
pub mod rng;
pub mod ofdm;
pub mod signal;
pub mod weight;

pub use error::{Error, Result};
pub use lattice::{Density, GaborLattice};
pub use signal::{Grid, SampledSignal, WindowKind};
