use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channel::ChannelModel;
use super::frame::{qpsk_demap, SymbolFrame};
use super::system::{
    build_ofdm_from_gabor, demodulate, heisenberg_product, modulate, BurstShape, OfdmConfig, OfdmMode,
};
use crate::error::{Error, Result};
use crate::lattice::GaborLattice;
use crate::rng::{stream, Purpose};
use crate::signal::{Grid, SampledSignal};

/// Lattice neighbourhood of the leakage table: `|k| <= 2`, `|l| <= 4`.
pub const LEAKAGE_K: i64 = 2;
pub const LEAKAGE_L: i64 = 4;

/// Normal quantile for the 95% confidence interval.
const Z95: f64 = 1.959963984540054;

/// One entry `L_{kl} = ⟨Hψ_{00}, φ_{kl}⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leakage {
    pub k: i64,
    pub l: i64,
    pub value: Complex64,
}

/// Metrics of one system/channel pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub orthogonality_error: f64,
    /// Mean `|c̃ - c|²` after equalisation.
    pub mse: Option<f64>,
    pub sir_db: f64,
    pub ber: Option<f64>,
    pub ber_ci_low: Option<f64>,
    pub ber_ci_high: Option<f64>,
    pub max_symbol_error: Option<f64>,
    pub bits: u64,
    pub bit_errors: u64,
    pub heisenberg_product: f64,
    pub frame_bound_ratio: f64,
}

impl RunMetrics {
    fn base(cfg: &OfdmConfig, sir_db: f64) -> Self {
        Self {
            orthogonality_error: cfg.orthogonality_error,
            mse: None,
            sir_db,
            ber: None,
            ber_ci_low: None,
            ber_ci_high: None,
            max_symbol_error: None,
            bits: 0,
            bit_errors: 0,
            heisenberg_product: heisenberg_product(&cfg.psi),
            frame_bound_ratio: cfg.frame_bound_ratio,
        }
    }
}

/// Output of [`interference_analysis`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferenceReport {
    pub metrics: RunMetrics,
    pub leakage: Vec<Leakage>,
}

/// `⟨r, φ_{kl}⟩` for an arbitrary lattice point.
fn project(cfg: &OfdmConfig, r: &SampledSignal, k: i64, l: i64) -> Complex64 {
    let grid = *r.grid();
    let atom = cfg.rx_atom(k, l, &grid);
    r.samples().iter().zip(atom.samples()).map(|(x, y)| x * y.conj()).sum::<Complex64>() * grid.dt
}

/// `10 log10(|L_00|² / Σ_{(k,l)≠0} |L_{kl}|²)`; `+∞` when nothing leaks.
fn sir_from(leakage: &[Leakage]) -> f64 {
    let mut main = 0.0;
    let mut rest = 0.0;
    for e in leakage {
        if (e.k, e.l) == (0, 0) {
            main += e.value.norm_sqr();
        } else {
            rest += e.value.norm_sqr();
        }
    }
    10.0 * (main / rest).log10()
}

/// Leakage of the pulse at the origin into its lattice neighbours through the noiseless channel.
pub fn interference_analysis(cfg: &OfdmConfig, ch: &ChannelModel) -> Result<InterferenceReport> {
    ch.validate()?;
    let pulse = cfg.psi.on_grid(widened(cfg))?;
    let r = ch.noiseless().apply_paths(&pulse);
    let pts: Vec<(i64, i64)> =
        (-LEAKAGE_K..=LEAKAGE_K).flat_map(|k| (-LEAKAGE_L..=LEAKAGE_L).map(move |l| (k, l))).collect();
    let leakage: Vec<Leakage> = pts.par_iter().map(|&(k, l)| Leakage { k, l, value: project(cfg, &r, k, l) }).collect();
    Ok(InterferenceReport { metrics: RunMetrics::base(cfg, sir_from(&leakage)), leakage })
}

/// Pulse grid padded to hold every receive atom of the leakage table.
fn widened(cfg: &OfdmConfig) -> Grid {
    let pad = (LEAKAGE_K * cfg.symbol_samples) as usize;
    cfg.psi.grid().padded(pad, pad)
}

/// Per lattice point gain `⟨Hψ_{kl}, φ_{kl}⟩` of the noiseless channel.
pub fn channel_gains(cfg: &OfdmConfig, ch: &ChannelModel) -> Vec<Complex64> {
    let clean = ch.noiseless();
    let grid = cfg.burst_grid();
    let pts: Vec<(i64, i64)> =
        (0..cfg.symbols as i64).flat_map(|k| (0..cfg.carriers as i64).map(move |l| (k, l))).collect();
    pts.par_iter()
        .map(|&(k, l)| {
            let r = clean.apply_paths(&cfg.tx_atom(k, l, &grid));
            project(cfg, &r, k, l)
        })
        .collect()
}

#[derive(Debug, Default, Clone, Copy)]
struct FrameTally {
    bit_errors: u64,
    sq_error: f64,
    max_error: f64,
}

/// Monte Carlo QPSK over `n_frames` bursts with one-tap zero forcing.
///
/// Frame `i` draws its bits and noise from stream `i` of `seed`, so the
/// result does not depend on thread scheduling.
pub fn ber_simulation(cfg: &OfdmConfig, ch: &ChannelModel, n_frames: usize, seed: u64) -> Result<RunMetrics> {
    if n_frames == 0 {
        return Err(Error::InvalidParameter("n_frames must be at least 1".into()));
    }
    let report = interference_analysis(cfg, ch)?;
    let gains = channel_gains(cfg, ch);
    if let Some(i) = gains.iter().position(|h| h.norm_sqr() == 0.0) {
        return Err(Error::InvalidParameter(format!("channel nulls lattice point {i}; zero forcing impossible")));
    }
    let tallies: Vec<Result<FrameTally>> = (0..n_frames)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, Purpose::OfdmFrame, i as u64);
            let (frame, bits) = SymbolFrame::random_qpsk(cfg.symbols, cfg.carriers, &mut rng);
            let s = modulate(cfg, &frame)?;
            let r = ch.apply_with_rng(&s, &mut stream(seed, Purpose::ChannelNoise, i as u64));
            let mut est = demodulate(cfg, &r);
            for (z, h) in est.data.iter_mut().zip(&gains) {
                *z *= h.conj() / h.norm_sqr();
            }
            let bit_errors = est
                .data
                .iter()
                .zip(bits.chunks(2))
                .map(|(&z, b)| {
                    let (b0, b1) = qpsk_demap(z);
                    (b0 != b[0]) as u64 + (b1 != b[1]) as u64
                })
                .sum();
            Ok(FrameTally { bit_errors, sq_error: est.sum_sq_error(&frame), max_error: est.max_error(&frame) })
        })
        .collect();
    let mut total = FrameTally::default();
    for t in tallies {
        let t = t?;
        total.bit_errors += t.bit_errors;
        total.sq_error += t.sq_error;
        total.max_error = total.max_error.max(t.max_error);
    }
    let symbols = (n_frames * cfg.symbols * cfg.carriers) as u64;
    let bits = 2 * symbols;
    let ber = total.bit_errors as f64 / bits as f64;
    let (lo, hi) = wald_interval(ber, bits);
    Ok(RunMetrics {
        mse: Some(total.sq_error / symbols as f64),
        ber: Some(ber),
        ber_ci_low: Some(lo),
        ber_ci_high: Some(hi),
        max_symbol_error: Some(total.max_error),
        bits,
        bit_errors: total.bit_errors,
        ..report.metrics
    })
}

/// 95% normal-approximation interval, clipped to `[0, 1]`.
pub fn wald_interval(p: f64, n: u64) -> (f64, f64) {
    let half = Z95 * (p * (1.0 - p) / n as f64).sqrt();
    ((p - half).max(0.0), (p + half).min(1.0))
}

/// Noise level giving per-symbol SNR `snr_db` at the demodulator.
///
/// `⟨n, φ_{kl}⟩` has variance `dt·σ²` for unit-norm `φ`, so `SNR = 1/(dt σ²)`.
pub fn sigma_for_snr_db(snr_db: f64, dt: f64) -> f64 {
    let snr = 10f64.powf(snr_db / 10.0);
    (1.0 / (snr * dt)).sqrt()
}

/// One row of [`tf_tradeoff_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfRow {
    pub p: u32,
    pub q: u32,
    pub tf: f64,
    pub frame_bound_ratio: f64,
    pub heisenberg_product: f64,
    /// `‖g/‖g‖ - g̃/‖g̃‖‖`.
    pub tight_distance: f64,
    pub orthogonality_error: f64,
    pub sir_db: f64,
}

/// Tight-OFDM systems for each `(p, q)` on balanced lattices, sorted by `TF`.
pub fn tf_tradeoff_sweep(g: &SampledSignal, tf_list: &[(u32, u32)], band: usize) -> Result<Vec<TfRow>> {
    let gn = g.normalized()?;
    let mut rows = tf_list
        .par_iter()
        .map(|&(p, q)| {
            let lat = GaborLattice::balanced(p, q, g.dt())?;
            let cfg = build_ofdm_from_gabor(g, &lat, band, OfdmMode::OfdmTight, BurstShape { carriers: 1, symbols: 1 })?;
            let report = interference_analysis(&cfg, &ChannelModel::identity())?;
            let tight = cfg.psi.on_grid(*gn.grid())?;
            Ok(TfRow {
                p,
                q,
                tf: lat.tf(),
                frame_bound_ratio: cfg.frame_bound_ratio,
                heisenberg_product: report.metrics.heisenberg_product,
                tight_distance: gn.sub(&tight)?.norm(),
                orthogonality_error: cfg.orthogonality_error,
                sir_db: report.metrics.sir_db,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|x, y| x.tf.total_cmp(&y.tf));
    Ok(rows)
}
