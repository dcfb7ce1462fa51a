//! Pulse-shaping OFDM and BFDM built from Gabor windows.
//!
//! The transmit family is `ψ_{kl}(t) = ψ(t - kT) e^{2πi t lF}` with `T = 1/b`
//! and `F = 1/a`, so tight windows of `(g, a, b)` give orthonormal systems on
//! the adjoint lattice. Channels act on absolute sample indices.

mod channel;
mod frame;
mod sim;
mod system;

pub use channel::{apply_channel, ChannelModel, Tap};
pub use frame::{qpsk_demap, qpsk_map, Constellation, SymbolFrame};
pub use sim::{
    ber_simulation, channel_gains, interference_analysis, sigma_for_snr_db, tf_tradeoff_sweep, wald_interval,
    InterferenceReport, Leakage, RunMetrics, TfRow, LEAKAGE_K, LEAKAGE_L,
};
pub use system::{
    build_ofdm_from_gabor, demodulate, heisenberg_product, modulate, orthogonality_error, BurstShape, OfdmConfig,
    OfdmMode, ORTHOGONALITY_RADIUS,
};
