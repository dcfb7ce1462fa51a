use std::path::Path;

use gabordual::decay::{decay_envelope_fit, DecayFit, DecayModel};
use gabordual::dual::{convergence_study, finite_section_solve, ConvergenceRow};
use gabordual::io::{ChannelSpec, GramEntry, WindowSpec};
use gabordual::laurent::{
    canonical_dual_laurent, decay_preservation_study, frame_bounds, tight_window_report, FrameBounds,
};
use gabordual::ofdm::{
    ber_simulation, build_ofdm_from_gabor, interference_analysis, tf_tradeoff_sweep, BurstShape, ChannelModel,
    OfdmConfig, OfdmMode, RunMetrics,
};
use gabordual::weight::WeightFunction;
use gabordual::{GaborLattice, SampledSignal};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    Command, DecayArgs, DualApproxArgs, Emit, LatticeArgs, LaurentArgs, ModeArg, OfdmArgs, TfSweepArgs, WindowArgs,
};
use crate::{output, reproduce, CliError, CliResult};

pub fn run(cmd: &Command) -> CliResult<()> {
    match cmd {
        Command::DualApprox(a) => dual_approx(a),
        Command::Laurent(a) => laurent(a),
        Command::Decay(a) => decay(a),
        Command::Ofdm(a) => ofdm(a),
        Command::TfSweep(a) => tf_sweep(a),
        Command::ReproduceAll(a) => reproduce::run(a),
    }
}

/// Window spec from `--window`, or the benchmark gaussian.
pub fn window_spec(w: &WindowArgs) -> CliResult<WindowSpec> {
    match &w.window {
        Some(path) => Ok(WindowSpec::from_json(&std::fs::read_to_string(path)?)?),
        None => Ok(WindowSpec::benchmark_gaussian(32)),
    }
}

pub fn lattice(p: u32, q: u32, unit: &str, dt: f64) -> CliResult<GaborLattice> {
    if unit == "balanced" {
        return Ok(GaborLattice::balanced(p, q, dt)?);
    }
    let u: f64 = unit
        .parse()
        .map_err(|_| CliError::Core(gabordual::Error::Lattice(format!("unit must be seconds or `balanced`, got {unit:?}"))))?;
    Ok(GaborLattice::new(p, q, u)?)
}

fn resolved(cmd: &impl Serialize, name: &str, spec: &WindowSpec) -> CliResult<Value> {
    let mut v = serde_json::to_value(cmd)?;
    if let Value::Object(m) = &mut v {
        m.insert("command".into(), Value::from(name));
        m.insert("window_spec".into(), serde_json::to_value(spec)?);
    }
    Ok(v)
}

fn setup(w: &WindowArgs, l: &LatticeArgs) -> CliResult<(WindowSpec, SampledSignal, GaborLattice)> {
    let spec = window_spec(w)?;
    let g = spec.build()?;
    let lat = lattice(l.p, l.q, &l.unit, g.dt())?;
    Ok((spec, g, lat))
}

/// `lo:hi` (inclusive) or `n1,n2,...`.
pub fn parse_n_list(s: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Usage(format!("n-list must be `lo:hi` or a comma list, got {s:?}"));
    if let Some((lo, hi)) = s.split_once(':') {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

/// `p1/q1,p2/q2,...`.
pub fn parse_tf_list(s: &str) -> CliResult<Vec<(u32, u32)>> {
    let bad = || CliError::Usage(format!("tf-list must be a comma list of p/q, got {s:?}"));
    s.split(',')
        .map(|pair| {
            let (p, q) = pair.split_once('/').ok_or_else(bad)?;
            Ok((p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn dual_approx(a: &DualApproxArgs) -> CliResult<()> {
    let (spec, g, lat) = setup(&a.window, &a.lattice)?;
    let config = resolved(a, "dual-approx", &spec)?;
    let n_list = parse_n_list(&a.n_list)?;
    let rows: Vec<ConvergenceRow> = convergence_study(&g, &lat, &n_list, a.n_ref)?;
    output::csv(&a.out, &config, &rows)?;
    if a.gram_dump.is_some() || a.dual_out.is_some() {
        let n_max = *n_list.last().expect("non-empty after study");
        let sec = finite_section_solve(&g, &lat, n_max)?;
        if let Some(path) = &a.gram_dump {
            output::csv(path, &config, &GramEntry::all(&sec.gram))?;
        }
        if let Some(path) = &a.dual_out {
            output::signal(path, &config, &sec.window)?;
        }
    }
    Ok(())
}

/// Weights of the default decay table.
pub fn default_weights() -> Vec<WeightFunction> {
    vec![
        WeightFunction::Constant,
        WeightFunction::Polynomial { s: 1.0 },
        WeightFunction::Polynomial { s: 2.0 },
        WeightFunction::Subexponential { lambda: 1.0, gamma: 0.5 },
        WeightFunction::Exponential { lambda: 0.5 },
        WeightFunction::Exponential { lambda: 1.0 },
    ]
}

fn weights(path: Option<&Path>) -> CliResult<Vec<WeightFunction>> {
    match path {
        Some(p) => Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?),
        None => Ok(default_weights()),
    }
}

pub fn bounds_config(config: &Value, b: &FrameBounds) -> Value {
    let mut c = config.clone();
    if let Value::Object(m) = &mut c {
        m.insert(
            "bounds".into(),
            json!({
                "lower": b.lower,
                "upper": b.upper,
                "ratio": if b.is_frame { Some(b.ratio()) } else { None },
                "t_argmin": b.t_argmin,
                "t_argmax": b.t_argmax,
                "band": b.band,
                "is_frame": b.is_frame,
            }),
        );
    }
    c
}

fn laurent(a: &LaurentArgs) -> CliResult<()> {
    let (spec, g, lat) = setup(&a.window, &a.lattice)?;
    let config = resolved(a, "laurent", &spec)?;
    match a.emit {
        Emit::Bounds => {
            let b = frame_bounds(&g, &lat, a.band, 1)?;
            output::csv(&a.out, &bounds_config(&config, &b), &b.rows)?;
            b.require_frame()?;
        }
        Emit::Dual => output::signal(&a.out, &config, &canonical_dual_laurent(&g, &lat, a.band)?)?,
        Emit::Tight => output::signal(&a.out, &config, &tight_window_report(&g, &lat, a.band, a.unit_norm)?.window)?,
        Emit::Decay => {
            let study = decay_preservation_study(&g, &lat, a.band, &weights(a.weights.as_deref())?)?;
            output::csv(&a.out, &config, &study.rows)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
pub struct Fits {
    pub g: Option<DecayFit>,
    pub dual: Option<DecayFit>,
    pub tight: Option<DecayFit>,
}

fn decay(a: &DecayArgs) -> CliResult<()> {
    let (spec, g, lat) = setup(&a.window, &a.lattice)?;
    let config = resolved(a, "decay", &spec)?;
    let study = decay_preservation_study(&g, &lat, a.band, &weights(a.weights.as_deref())?)?;
    output::csv(&a.out, &config, &study.rows)?;
    if let Some(path) = &a.fits_out {
        let [fg, fd, ft] = study.fits;
        output::json(path, &config, &Fits { g: fg, dual: fd, tight: ft })?;
    }
    Ok(())
}

/// Envelope fit, `None` when the signal has too few samples above the floor.
pub fn exp_fit(s: &SampledSignal) -> Option<DecayFit> {
    decay_envelope_fit(s, DecayModel::Exponential).ok()
}

#[derive(Serialize)]
pub struct SystemSummary {
    pub mode: OfdmMode,
    pub carriers: usize,
    pub symbols: usize,
    pub symbol_samples: i64,
    pub symbol_period: f64,
    pub carrier_spacing: f64,
    pub tf: f64,
    pub guard_samples: i64,
    pub psi_norm: f64,
    pub phi_norm: f64,
}

impl SystemSummary {
    pub fn of(cfg: &OfdmConfig) -> Self {
        Self {
            mode: cfg.mode,
            carriers: cfg.carriers,
            symbols: cfg.symbols,
            symbol_samples: cfg.symbol_samples,
            symbol_period: cfg.symbol_period(),
            carrier_spacing: cfg.carrier_spacing,
            tf: cfg.tf(),
            guard_samples: cfg.guard_samples,
            psi_norm: cfg.psi.norm(),
            phi_norm: cfg.phi.norm(),
        }
    }
}

#[derive(Serialize)]
pub struct OfdmRun {
    pub system: SystemSummary,
    pub metrics: RunMetrics,
}

fn ofdm(a: &OfdmArgs) -> CliResult<()> {
    let spec = window_spec(&a.window)?;
    let g = spec.build()?;
    let lat = lattice(a.p, a.q, &a.unit, g.dt())?;
    let mut config = resolved(a, "ofdm", &spec)?;
    let channel = match &a.channel {
        Some(path) => ChannelSpec::from_json(&std::fs::read_to_string(path)?)?.model()?,
        None => ChannelModel::identity(),
    };
    if let Value::Object(m) = &mut config {
        m.insert("channel_model".into(), serde_json::to_value(ChannelSpec::from_model(&channel))?);
    }
    let mode = match a.mode {
        ModeArg::Tight => OfdmMode::OfdmTight,
        ModeArg::Bfdm => OfdmMode::BfdmDual,
    };
    let cfg = build_ofdm_from_gabor(&g, &lat, a.band, mode, BurstShape { carriers: a.carriers, symbols: a.symbols })?;
    let metrics = ber_simulation(&cfg, &channel, a.frames, a.seed)?;
    output::json(&a.out, &config, &OfdmRun { system: SystemSummary::of(&cfg), metrics })?;
    if let Some(path) = &a.leakage_out {
        let report = interference_analysis(&cfg, &channel)?;
        output::csv(path, &config, &report.leakage)?;
    }
    Ok(())
}

fn tf_sweep(a: &TfSweepArgs) -> CliResult<()> {
    let spec = window_spec(&a.window)?;
    let g = spec.build()?;
    let config = resolved(a, "tf-sweep", &spec)?;
    let rows = tf_tradeoff_sweep(&g, &parse_tf_list(&a.tf_list)?, a.band)?;
    output::csv(&a.out, &config, &rows)?;
    Ok(())
}
