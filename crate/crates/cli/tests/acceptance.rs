//! Acceptance suite: thirteen criteria at their pinned tolerances.
//!
//! Runs without the libtest harness so every criterion prints one
//! `PASS`/`FAIL` line even when all of them pass.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use gabordual::decay::{decay_envelope_fit, linear_regression, DecayModel};
use gabordual::dual::{
    convergence_study, finite_section_dual, random_span_signal, reconstruct, tsvd_solve, wexler_raz_residual,
    zero_correlation, TsvdConfig,
};
use gabordual::laurent::{canonical_dual_laurent, frame_bounds, tight_window, weighted_tail};
use gabordual::ofdm::{
    ber_simulation, build_ofdm_from_gabor, demodulate, interference_analysis, modulate, tf_tradeoff_sweep,
    BurstShape, ChannelModel, OfdmMode, SymbolFrame, Tap,
};
use gabordual::rng::{stream, Purpose};
use gabordual::signal::{inner_product, make_window, stft};
use gabordual::weight::WeightFunction;
use gabordual::{GaborLattice, Grid, SampledSignal, WindowKind};
use num_complex::Complex64;

type Outcome = Result<String, String>;

fn gauss(den: u32) -> SampledSignal {
    make_window(&WindowKind::Gaussian { scale: 1.0 }, Grid::symmetric(12.0, den).unwrap()).unwrap()
}

fn bench() -> GaborLattice {
    GaborLattice::new(1, 2, 1.0).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e<E: std::fmt::Debug>(x: E) -> String {
    format!("{x:?}")
}

fn c01_orthonormal() -> Outcome {
    let r = make_window(&WindowKind::Rectangular { width: 1.0, start: 0.0 }, Grid::symmetric(12.0, 32).unwrap()).map_err(e)?;
    let lat = GaborLattice::new(1, 1, 1.0).map_err(e)?;
    let gamma = finite_section_dual(&r, &lat, 4).map_err(e)?;
    let diff = gamma.sub(&r).map_err(e)?.norm();
    let wr = wexler_raz_residual(&gamma, &r, &lat, 4).map_err(e)?;
    let b = frame_bounds(&r, &lat, 4, 1).map_err(e)?;
    let f = random_span_signal(&r, &lat, 4, 1).map_err(e)?;
    let (_, rec) = reconstruct(&f, &r, &gamma, &lat, 6).map_err(e)?;
    check(
        diff <= 1e-10 && wr <= 1e-10 && (b.lower - 1.0).abs() <= 1e-10 && (b.upper - 1.0).abs() <= 1e-10 && rec <= 1e-10,
        format!("|γ-g| {diff:.1e}, WR {wr:.1e}, A {:.12}, B {:.12}, rec {rec:.1e}", b.lower, b.upper),
    )
}

fn c02_wexler_raz() -> Outcome {
    let g = gauss(32);
    let gamma = finite_section_dual(&g, &bench(), 8).map_err(e)?;
    let wr = wexler_raz_residual(&gamma, &g, &bench(), 4).map_err(e)?;
    let z = zero_correlation(&gamma, &g).map_err(e)?;
    check(wr <= 1e-6 && (z - 0.5).norm() <= 1e-6, format!("WR {wr:.2e}, <γ,g> {:.9}{:+.1e}i", z.re, z.im))
}

fn c03_convergence(rows: &[gabordual::dual::ConvergenceRow]) -> Outcome {
    let decreasing = rows.windows(2).all(|w| w[1].error_l2 < w[0].error_l2);
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.error_l2.ln()).collect();
    let (slope, _, r2) = linear_regression(&xs, &ys);
    let errs: Vec<String> = rows.iter().map(|r| format!("{:.1e}", r.error_l2)).collect();
    check(decreasing && r2 >= 0.95 && slope < 0.0, format!("errors [{}], slope {slope:.3}, R² {r2:.4}", errs.join(" ")))
}

fn c04_conditioning(rows: &[gabordual::dual::ConvergenceRow]) -> Outcome {
    let b = frame_bounds(&gauss(32), &bench(), 8, 1).map_err(e)?;
    let ratio = b.ratio();
    let monotone = rows.windows(2).all(|w| w[1].cond >= w[0].cond);
    let max = rows.iter().map(|r| r.cond).fold(0.0, f64::max);
    check(monotone && max <= 1.05 * ratio, format!("cond {:.4} → {max:.4}, B/A {ratio:.4}", rows[0].cond))
}

fn c05_cross_method() -> Outcome {
    let g = gauss(32);
    let fs = finite_section_dual(&g, &bench(), 10).map_err(e)?;
    let lr = canonical_dual_laurent(&g, &bench(), 8).map_err(e)?;
    let rel = fs.sub(&lr).map_err(e)?.norm() / lr.norm();
    check(rel <= 1e-5, format!("relative difference {rel:.2e}"))
}

fn c06_tightness() -> Outcome {
    let g = gauss(32);
    let lat = bench();
    let gt = tight_window(&g, &lat, 8, false).map_err(e)?;
    let ratio = frame_bounds(&gt, &lat, 8, 1).map_err(e)?.ratio();
    let u = gt.normalized().map_err(e)?;
    let steps = lat.steps(g.dt()).map_err(e)?;
    let (mut off, mut diag) = (0.0f64, 0.0f64);
    for k in -3i64..=3 {
        for l in -3i64..=3 {
            let atom = u.shift_modulate(k * steps.inv_b, l as f64 * lat.inv_a());
            let v = inner_product(&atom, &u).map_err(e)?;
            if (k, l) == (0, 0) {
                diag = (v - 1.0).norm();
            } else {
                off = off.max(v.norm());
            }
        }
    }
    check(
        ratio <= 1.0 + 1e-8 && off <= 1e-7 && diag <= 1e-9,
        format!("B/A-1 {:.1e}, off-diagonal {off:.1e}, |diag-1| {diag:.1e}", ratio - 1.0),
    )
}

fn c07_tsvd() -> Outcome {
    let g = gauss(32);
    let lat = bench();
    let f = random_span_signal(&g, &lat, 2, 7).map_err(e)?;
    let reg = TsvdConfig { perturb_seed: Some(7), ..TsvdConfig::new(1e-8, 1).map_err(e)? };
    let raw = TsvdConfig { threshold_override: Some(0.0), ..reg };
    let u2 = tsvd_solve(&g, &lat, &f, 2, &raw).map_err(e)?.diagnostics;
    let u8 = tsvd_solve(&g, &lat, &f, 8, &raw).map_err(e)?.diagnostics;
    let r8 = tsvd_solve(&g, &lat, &f, 8, &reg).map_err(e)?.diagnostics;
    let growth = u8.coeff_norm / u2.coeff_norm;
    let kept = r8.coeff_norm / u2.coeff_norm;
    check(
        growth >= 10.0 && kept <= 2.0 && r8.relative_error <= 1e-3,
        format!(
            "|c8|/|c2| unregularised {growth:.2e}, thresholded {kept:.3}, error {:.1e} (rank {}/{})",
            r8.relative_error, r8.rank_kept, r8.rank_total
        ),
    )
}

fn c08_decay() -> Outcome {
    let g = gauss(32);
    let lat = bench();
    let dual = canonical_dual_laurent(&g, &lat, 8).map_err(e)?;
    let tight = tight_window(&g, &lat, 8, false).map_err(e)?;
    let fit = |s: &SampledSignal| decay_envelope_fit(s, DecayModel::Exponential);
    let (fg, fd, ft) = (fit(&g).map_err(e)?, fit(&dual).map_err(e)?, fit(&tight).map_err(e)?);
    let w = WeightFunction::Polynomial { s: 2.0 };
    let tails = [weighted_tail(&g, &w).1, weighted_tail(&dual, &w).1, weighted_tail(&tight, &w).1];
    check(
        fd.fit_quality >= 0.98 && ft.fit_quality >= 0.98 && fd.rate < fg.rate && tails.iter().all(|&c| c),
        format!(
            "rates g {:.2}, γ {:.2} (R² {:.3}), g̃ {:.2} (R² {:.3}), s=2 tails {tails:?}",
            fg.rate, fd.rate, fd.fit_quality, ft.rate, ft.fit_quality
        ),
    )
}

fn c09_stft() -> Outcome {
    let g = gauss(32);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for k in -4i64..=4 {
        for l in -8i64..=8 {
            let (x, w) = (k as f64, l as f64 / 2.0);
            let v = stft(&g, &g, x, w).map_err(e)?.norm() * (PI * (x * x + w * w) / 2.0).exp();
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    check(lo >= 0.999 && hi <= 1.001, format!("normalised |V_g g| in [{lo:.6}, {hi:.6}]"))
}

fn c10_ofdm() -> Outcome {
    let shape = BurstShape { carriers: 16, symbols: 8 };
    let cfg = build_ofdm_from_gabor(&gauss(32), &bench(), 8, OfdmMode::OfdmTight, shape).map_err(e)?;
    let mut rng = stream(7, Purpose::OfdmFrame, 0);
    let (frame, bits) = SymbolFrame::random_qpsk(8, 16, &mut rng);
    let back = demodulate(&cfg, &modulate(&cfg, &frame).map_err(e)?);
    let err = back.max_error(&frame);
    let errors = back.to_bits().iter().zip(&bits).filter(|(a, b)| a != b).count();
    let mc = ber_simulation(&cfg, &ChannelModel::identity(), 10, 7).map_err(e)?;
    check(
        err <= 1e-6 && errors == 0 && mc.ber == Some(0.0),
        format!("TF {:.1}, max symbol error {err:.1e}, BER {:?} over {} bits", cfg.tf(), mc.ber, mc.bits + bits.len() as u64),
    )
}

fn c11_localization() -> Outcome {
    let g = gauss(96);
    let lat = GaborLattice::balanced(10, 13, g.dt()).map_err(e)?;
    let shape = BurstShape { carriers: 1, symbols: 1 };
    let gc = build_ofdm_from_gabor(&g, &lat, 12, OfdmMode::OfdmTight, shape).map_err(e)?;
    let t = gc.symbol_samples;
    let width = t as f64 * g.dt();
    let rect = make_window(&WindowKind::Rectangular { width, start: -width / 2.0 }, *g.grid()).map_err(e)?;
    let rc = build_ofdm_from_gabor(&rect, &lat, 12, OfdmMode::OfdmTight, shape).map_err(e)?;
    if t % 8 != 0 {
        return Err(format!("T = {t} samples is not a multiple of 8"));
    }
    let ch = ChannelModel::new(vec![Tap::new(t / 8, 0.0, Complex64::new(1.0, 0.0))], 0.0, 0).map_err(e)?;
    let sg = interference_analysis(&gc, &ch).map_err(e)?.metrics.sir_db;
    let sr = interference_analysis(&rc, &ch).map_err(e)?.metrics.sir_db;
    check(sg - sr >= 3.0, format!("TF {:.2}: SIR gaussian {sg:.2} dB, rectangular {sr:.2} dB, margin {:.2} dB", gc.tf(), sg - sr))
}

fn c12_tf_tradeoff() -> Outcome {
    let rows = tf_tradeoff_sweep(&gauss(96), &[(1, 2), (2, 3), (10, 13), (10, 11)], 16).map_err(e)?;
    let ratio_up = rows.windows(2).all(|w| w[0].frame_bound_ratio > w[1].frame_bound_ratio);
    let dist_up = rows.windows(2).all(|w| w[0].tight_distance > w[1].tight_distance);
    let first = &rows[0];
    let last = &rows[rows.len() - 1];
    let heis = first.heisenberg_product > last.heisenberg_product;
    let table: Vec<String> = rows
        .iter()
        .map(|r| format!("TF {:.1}: B/A {:.2} d {:.3} H {:.4}", r.tf, r.frame_bound_ratio, r.tight_distance, r.heisenberg_product))
        .collect();
    check(ratio_up && dist_up && heis && (last.tf - 2.0).abs() < 1e-12 && (first.tf - 1.1).abs() < 1e-12, table.join("; "))
}

/// Files of a reproduce-all run without their `generated` lines.
fn snapshot(dir: &Path) -> std::io::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let text = std::fs::read_to_string(&path)?;
        let kept: Vec<&str> = text
            .lines()
            .filter(|l| !l.starts_with("# generated=") && !l.trim_start().starts_with("\"generated\":"))
            .collect();
        out.insert(path.file_name().unwrap().to_string_lossy().into_owned(), kept.join("\n"));
    }
    Ok(out)
}

fn c13_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(e)?;
    let mut snaps = Vec::new();
    for run in ["a", "b"] {
        let dir = tmp.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_gabordual"))
            .args(["reproduce-all", "--seed", "7", "--out-dir"])
            .arg(&dir)
            .output()
            .map_err(e)?;
        if !status.status.success() {
            return Err(format!("run {run} failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
        snaps.push(snapshot(&dir).map_err(e)?);
    }
    let differing: Vec<&String> = snaps[0].keys().filter(|k| snaps[1].get(*k) != snaps[0].get(*k)).collect();
    check(
        differing.is_empty() && snaps[0].len() == snaps[1].len() && snaps[0].len() > 13,
        format!("{} files compared, {} differ {differing:?}", snaps[0].len(), differing.len()),
    )
}

fn main() {
    let g = gauss(32);
    let rows = convergence_study(&g, &bench(), &(1..=8).collect::<Vec<_>>(), 12);
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("orthonormal sanity", Box::new(c01_orthonormal)),
        ("Wexler-Raz biorthogonality", Box::new(c02_wexler_raz)),
        ("finite-section convergence", Box::new(|| c03_convergence(rows.as_ref().map_err(e)?))),
        ("conditioning", Box::new(|| c04_conditioning(rows.as_ref().map_err(e)?))),
        ("cross-method equivalence", Box::new(c05_cross_method)),
        ("tightness", Box::new(c06_tightness)),
        ("TSVD regularisation", Box::new(c07_tsvd)),
        ("decay preservation", Box::new(c08_decay)),
        ("STFT decay shape", Box::new(c09_stft)),
        ("OFDM end to end", Box::new(c10_ofdm)),
        ("localisation pays", Box::new(c11_localization)),
        ("TF trade-off", Box::new(c12_tf_tradeoff)),
        ("determinism", Box::new(c13_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name} ({secs:.1}s): {detail}", i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
