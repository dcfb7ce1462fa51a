//! `reproduce-all`: one artifact set per acceptance criterion.

use std::path::{Path, PathBuf};

use gabordual::decay::linear_regression;
use gabordual::dual::{
    convergence_study, finite_section_dual, random_span_signal, reconstruct, tsvd_solve, wexler_raz_residual,
    zero_correlation, TsvdConfig,
};
use gabordual::io::{fmt_real, parse_real, CsvRecord, WindowSpec};
use gabordual::laurent::{canonical_dual_laurent, decay_preservation_study, frame_bounds, tight_window};
use gabordual::ofdm::{
    ber_simulation, build_ofdm_from_gabor, interference_analysis, orthogonality_error, tf_tradeoff_sweep, BurstShape,
    ChannelModel, OfdmMode, Tap,
};
use gabordual::signal::{stft, Grid, WindowKind};
use gabordual::{GaborLattice, SampledSignal};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::args::ReproduceArgs;
use crate::commands::{bounds_config, default_weights, exp_fit, Fits, OfdmRun, SystemSummary};
use crate::{output, CliError, CliResult};

/// Frequency step `l/2` grid point of the STFT table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StftSample {
    pub k: i64,
    pub l: i64,
    pub magnitude: f64,
    /// `|V_g g(k, l/2)| e^{π(k² + (l/2)²)/2}`.
    pub normalized: f64,
}

impl CsvRecord for StftSample {
    const HEADER: &'static [&'static str] = &["k", "l", "magnitude", "normalized"];
    fn to_fields(&self) -> Vec<String> {
        vec![self.k.to_string(), self.l.to_string(), fmt_real(self.magnitude), fmt_real(self.normalized)]
    }
    fn from_fields(f: &[&str]) -> gabordual::Result<Self> {
        let int = |s: &str| s.parse().map_err(|_| gabordual::Error::Parse(format!("not an integer: {s:?}")));
        Ok(Self { k: int(f[0])?, l: int(f[1])?, magnitude: parse_real(f[2])?, normalized: parse_real(f[3])? })
    }
}

struct Ctx {
    dir: PathBuf,
    seed: u64,
    frames: usize,
    written: Vec<String>,
}

impl Ctx {
    fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    fn config(&self, criterion: u32, extra: Value) -> Value {
        let mut v = json!({ "command": "reproduce-all", "criterion": criterion, "seed": self.seed });
        if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
            m.extend(e);
        }
        v
    }
}

fn gaussian(den: u32) -> CliResult<SampledSignal> {
    Ok(WindowSpec::benchmark_gaussian(den).build()?)
}

fn bench_lattice() -> CliResult<GaborLattice> {
    Ok(GaborLattice::new(1, 2, 1.0)?)
}

pub fn run(a: &ReproduceArgs) -> CliResult<()> {
    let dir = match &a.out_dir {
        Some(d) => d.clone(),
        None => fresh_dir(Path::new("."), output::unix_time()),
    };
    std::fs::create_dir_all(&dir)?;
    let mut ctx = Ctx { dir, seed: a.seed, frames: a.frames.max(1), written: Vec::new() };
    orthonormal(&mut ctx)?;
    wexler_raz(&mut ctx)?;
    convergence(&mut ctx)?;
    cross_method(&mut ctx)?;
    tightness(&mut ctx)?;
    tsvd(&mut ctx)?;
    decay(&mut ctx)?;
    stft_shape(&mut ctx)?;
    ofdm_end_to_end(&mut ctx)?;
    localization(&mut ctx)?;
    tf_tradeoff(&mut ctx)?;
    let manifest = ctx.written.join("\n") + "\n";
    std::fs::write(ctx.dir.join("manifest.txt"), manifest)?;
    println!("{}", ctx.dir.display());
    Ok(())
}

fn fresh_dir(base: &Path, stamp: u64) -> PathBuf {
    let first = base.join(format!("reproduce-{stamp}"));
    if !first.exists() {
        return first;
    }
    (1..).map(|i| base.join(format!("reproduce-{stamp}-{i}"))).find(|p| !p.exists()).expect("unbounded search")
}

fn orthonormal(ctx: &mut Ctx) -> CliResult<()> {
    let grid = Grid::symmetric(12.0, 32)?;
    let kind = WindowKind::Rectangular { width: 1.0, start: 0.0 };
    let r = gabordual::signal::make_window(&kind, grid)?;
    let lat = GaborLattice::new(1, 1, 1.0)?;
    let gamma = finite_section_dual(&r, &lat, 4)?;
    let b = frame_bounds(&r, &lat, 4, 1)?;
    let f = random_span_signal(&r, &lat, 4, ctx.seed)?;
    let (_, err) = reconstruct(&f, &r, &gamma, &lat, 6)?;
    let config = ctx.config(1, json!({ "window": kind, "p": 1, "q": 1, "unit": 1.0, "radius": 4 }));
    let body = json!({
        "dual_minus_window": gamma.sub(&r)?.norm(),
        "wr_residual": wexler_raz_residual(&gamma, &r, &lat, 4)?,
        "lower": b.lower,
        "upper": b.upper,
        "reconstruction_error": err,
    });
    output::json(&ctx.path("c01_orthonormal.json"), &config, &body)
}

fn wexler_raz(ctx: &mut Ctx) -> CliResult<()> {
    let g = gaussian(32)?;
    let lat = bench_lattice()?;
    let gamma = finite_section_dual(&g, &lat, 8)?;
    let z = zero_correlation(&gamma, &g)?;
    let config = ctx.config(2, json!({ "radius": 8, "check_radius": 4 }));
    let body = json!({ "wr_residual": wexler_raz_residual(&gamma, &g, &lat, 4)?, "zero_correlation": [z.re, z.im] });
    output::json(&ctx.path("c02_wexler_raz.json"), &config, &body)?;
    output::signal(&ctx.path("c02_dual_n8.csv"), &config, &gamma)
}

fn convergence(ctx: &mut Ctx) -> CliResult<()> {
    let g = gaussian(32)?;
    let lat = bench_lattice()?;
    let n_list: Vec<usize> = (1..=8).collect();
    let rows = convergence_study(&g, &lat, &n_list, 12)?;
    let config = ctx.config(3, json!({ "n_list": n_list, "n_ref": 12 }));
    output::csv(&ctx.path("c03_convergence.csv"), &config, &rows)?;
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.error_l2.ln()).collect();
    let (slope, intercept, r2) = linear_regression(&xs, &ys);
    output::json(&ctx.path("c03_fit.json"), &config, &json!({ "slope": slope, "intercept": intercept, "r2": r2 }))?;
    let b = frame_bounds(&g, &lat, 8, 1)?;
    let config = ctx.config(4, json!({ "band": 8 }));
    output::csv(&ctx.path("c04_bounds.csv"), &bounds_config(&config, &b), &b.rows)?;
    let conds: Vec<f64> = rows.iter().map(|r| r.cond).collect();
    output::json(&ctx.path("c04_conditioning.json"), &config, &json!({ "cond": conds, "frame_bound_ratio": b.ratio() }))
}

fn cross_method(ctx: &mut Ctx) -> CliResult<()> {
    let g = gaussian(32)?;
    let lat = bench_lattice()?;
    let fs = finite_section_dual(&g, &lat, 10)?;
    let lr = canonical_dual_laurent(&g, &lat, 8)?;
    let config = ctx.config(5, json!({ "radius": 10, "band": 8 }));
    let rel = fs.sub(&lr)?.norm() / lr.norm();
    output::json(&ctx.path("c05_cross_method.json"), &config, &json!({ "relative_difference": rel }))?;
    output::signal(&ctx.path("c05_dual_section.csv"), &config, &fs)?;
    output::signal(&ctx.path("c05_dual_laurent.csv"), &config, &lr)
}

fn tightness(ctx: &mut Ctx) -> CliResult<()> {
    let g = gaussian(32)?;
    let lat = bench_lattice()?;
    let gt = tight_window(&g, &lat, 8, false)?;
    let b = frame_bounds(&gt, &lat, 8, 1)?;
    let unit = gt.normalized()?;
    let steps = lat.steps(g.dt())?;
    let config = ctx.config(6, json!({ "band": 8, "check_radius": 3 }));
    let body = json!({
        "frame_bound_ratio": b.ratio(),
        "norm_sqr": gt.norm_sqr(),
        "adjoint_orthogonality_error": orthogonality_error(&unit, &unit, steps.inv_b, lat.inv_a())?,
    });
    output::json(&ctx.path("c06_tight.json"), &config, &body)?;
    output::signal(&ctx.path("c06_tight.csv"), &config, &gt)
}

fn tsvd(ctx: &mut Ctx) -> CliResult<()> {
    let g = gaussian(32)?;
    let lat = bench_lattice()?;
    let f = random_span_signal(&g, &lat, 2, ctx.seed)?;
    let base = TsvdConfig { perturb_seed: Some(ctx.seed), ..TsvdConfig::new(1e-8, 1)? };
    let raw = TsvdConfig { threshold_override: Some(0.0), ..base };
    let mut rows = Vec::new();
    for n in [2usize, 4, 6, 8] {
        let u = tsvd_solve(&g, &lat, &f, n, &raw)?.diagnostics;
        let r = tsvd_solve(&g, &lat, &f, n, &base)?.diagnostics;
        rows.push(json!({ "n": n, "unregularized": u, "thresholded": r }));
    }
    let config = ctx.config(7, json!({ "delta": 1e-8, "smoothness_p": 1, "signal_radius": 2 }));
    output::json(&ctx.path("c07_tsvd.json"), &config, &json!({ "rows": rows }))
}

fn decay(ctx: &mut Ctx) -> CliResult<()> {
    let g = gaussian(32)?;
    let lat = bench_lattice()?;
    let study = decay_preservation_study(&g, &lat, 8, &default_weights())?;
    let config = ctx.config(8, json!({ "band": 8 }));
    output::csv(&ctx.path("c08_decay.csv"), &config, &study.rows)?;
    let fits = Fits { g: exp_fit(&g), dual: exp_fit(&study.dual), tight: exp_fit(&study.tight) };
    output::json(&ctx.path("c08_fits.json"), &config, &fits)
}

fn stft_shape(ctx: &mut Ctx) -> CliResult<()> {
    let g = gaussian(32)?;
    let mut rows = Vec::new();
    for k in -4i64..=4 {
        for l in -8i64..=8 {
            let (x, w) = (k as f64, l as f64 / 2.0);
            let magnitude = stft(&g, &g, x, w)?.norm();
            rows.push(StftSample { k, l, magnitude, normalized: magnitude * (std::f64::consts::PI * (x * x + w * w) / 2.0).exp() });
        }
    }
    let config = ctx.config(9, json!({ "k_max": 4, "l_max": 8 }));
    output::csv(&ctx.path("c09_stft.csv"), &config, &rows)
}

fn ofdm_end_to_end(ctx: &mut Ctx) -> CliResult<()> {
    let g = gaussian(32)?;
    let lat = bench_lattice()?;
    let cfg = build_ofdm_from_gabor(&g, &lat, 8, OfdmMode::OfdmTight, BurstShape { carriers: 16, symbols: 8 })?;
    let metrics = ber_simulation(&cfg, &ChannelModel::identity(), ctx.frames, ctx.seed)?;
    let config = ctx.config(10, json!({ "band": 8, "carriers": 16, "symbols": 8, "frames": ctx.frames }));
    output::json(&ctx.path("c10_ofdm.json"), &config, &OfdmRun { system: SystemSummary::of(&cfg), metrics })
}

fn localization(ctx: &mut Ctx) -> CliResult<()> {
    let g = gaussian(96)?;
    let lat = GaborLattice::balanced(10, 13, g.dt())?;
    let shape = BurstShape { carriers: 1, symbols: 1 };
    let gcfg = build_ofdm_from_gabor(&g, &lat, 12, OfdmMode::OfdmTight, shape)?;
    let t = gcfg.symbol_samples;
    let width = t as f64 * g.dt();
    let kind = WindowKind::Rectangular { width, start: -width / 2.0 };
    let rect = gabordual::signal::make_window(&kind, *g.grid())?;
    let rcfg = build_ofdm_from_gabor(&rect, &lat, 12, OfdmMode::OfdmTight, shape)?;
    if t % 8 != 0 {
        return Err(CliError::Usage(format!("symbol period of {t} samples is not divisible by 8")));
    }
    let ch = ChannelModel::new(vec![Tap::new(t / 8, 0.0, Complex64::new(1.0, 0.0))], 0.0, 0)?;
    let gr = interference_analysis(&gcfg, &ch)?;
    let rr = interference_analysis(&rcfg, &ch)?;
    let config = ctx.config(11, json!({ "p": 10, "q": 13, "dt_denominator": 96, "band": 12, "delay_samples": t / 8 }));
    let body = json!({
        "symbol_samples": t,
        "sir_gaussian_db": gr.metrics.sir_db,
        "sir_rectangular_db": rr.metrics.sir_db,
        "margin_db": gr.metrics.sir_db - rr.metrics.sir_db,
    });
    output::json(&ctx.path("c11_sir.json"), &config, &body)?;
    output::csv(&ctx.path("c11_leakage_gaussian.csv"), &config, &gr.leakage)?;
    output::csv(&ctx.path("c11_leakage_rectangular.csv"), &config, &rr.leakage)
}

fn tf_tradeoff(ctx: &mut Ctx) -> CliResult<()> {
    let g = gaussian(96)?;
    let list = [(1, 2), (2, 3), (10, 13), (10, 11)];
    let rows = tf_tradeoff_sweep(&g, &list, 16)?;
    let config = ctx.config(12, json!({ "tf_list": list, "dt_denominator": 96, "band": 16 }));
    output::csv(&ctx.path("c12_tf_sweep.csv"), &config, &rows)
}
