//! File formats: window specs and channels in JSON, signals and study tables
//! in CSV.
//!
//! Reals are written with 17 significant digits so every value survives a
//! write/read cycle bit for bit. A table may start with `# key=value`
//! comment lines; `generated` carries a timestamp and is the only line that
//! differs between identical runs.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dual::{ConvergenceRow, GramOperator};
use crate::error::{Error, Result};
use crate::laurent::{BoundsRow, DecayRow};
use crate::ofdm::{ChannelModel, Leakage, Tap, TfRow};
use crate::signal::{make_window, Grid, SampledSignal, WindowKind};
use crate::weight::WeightFunction;

/// `{"t0_samples", "dt_denominator", "length"}`: `t_i = (t0_samples + i) / dt_denominator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t0_samples: i64,
    pub dt_denominator: u32,
    pub length: usize,
}

impl GridSpec {
    pub fn grid(&self) -> Result<Grid> {
        if self.dt_denominator == 0 {
            return Err(Error::InvalidParameter("dt_denominator must be positive".into()));
        }
        Grid::new(self.t0_samples, self.length, 1.0 / self.dt_denominator as f64)
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.dt_denominator as f64
    }
}

/// Window spec `{"kind", "params", "grid"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    #[serde(flatten)]
    pub window: WindowKind,
    pub grid: GridSpec,
}

impl WindowSpec {
    /// Benchmark gaussian on `[-12, 12)` with `dt = 1/denominator`.
    pub fn benchmark_gaussian(denominator: u32) -> Self {
        let half = 12 * denominator as i64;
        Self {
            window: WindowKind::Gaussian { scale: 1.0 },
            grid: GridSpec { t0_samples: -half, dt_denominator: denominator, length: 2 * half as usize },
        }
    }

    pub fn build(&self) -> Result<SampledSignal> {
        make_window(&self.window, self.grid.grid()?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Channel file `{"taps": [...], "noise_sigma", "rng_seed"?, "normalize"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub taps: Vec<TapSpec>,
    pub noise_sigma: f64,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default = "yes")]
    pub normalize: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TapSpec {
    pub delay_samples: i64,
    /// Doppler shift in cycles per grid sample.
    pub doppler_cycles_per_grid: f64,
    pub gain_re: f64,
    pub gain_im: f64,
}

impl ChannelSpec {
    pub fn model(&self) -> Result<ChannelModel> {
        let taps = self
            .taps
            .iter()
            .map(|t| Tap::new(t.delay_samples, t.doppler_cycles_per_grid, Complex64::new(t.gain_re, t.gain_im)))
            .collect();
        if self.normalize {
            ChannelModel::new(taps, self.noise_sigma, self.rng_seed)
        } else {
            ChannelModel::unnormalized(taps, self.noise_sigma, self.rng_seed)
        }
    }

    pub fn from_model(ch: &ChannelModel) -> Self {
        Self {
            taps: ch
                .taps
                .iter()
                .map(|t| TapSpec {
                    delay_samples: t.delay_samples,
                    doppler_cycles_per_grid: t.doppler_cycles_per_sample,
                    gain_re: t.gain.re,
                    gain_im: t.gain.im,
                })
                .collect(),
            noise_sigma: ch.noise_sigma,
            rng_seed: ch.rng_seed,
            normalize: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn parse_real(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("not a real number: {s:?}")))
}

fn parse_int<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

fn parse_flag(s: &str) -> Result<bool> {
    match s.trim() {
        "1" => Ok(true),
        "0" => Ok(false),
        other => Err(Error::Parse(format!("flag must be 0 or 1, got {other:?}"))),
    }
}

/// Ordered `# key=value` lines heading a table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Meta {
    pub entries: Vec<(String, String)>,
}

impl Meta {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<String>) -> Self {
        self.entries.push((key.to_string(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// One row type of a CSV table.
pub trait CsvRecord: Sized {
    const HEADER: &'static [&'static str];
    fn to_fields(&self) -> Vec<String>;
    fn from_fields(fields: &[&str]) -> Result<Self>;
}

pub fn write_records<W: Write, T: CsvRecord>(out: W, meta: &Meta, rows: &[T]) -> Result<()> {
    write_table(out, meta, T::HEADER, rows.iter().map(|r| r.to_fields()))
}

pub fn read_records<R: Read, T: CsvRecord>(input: R) -> Result<(Meta, Vec<T>)> {
    let (meta, header, rows) = read_table(input)?;
    if header != T::HEADER {
        return Err(Error::Parse(format!("expected header {:?}, found {header:?}", T::HEADER)));
    }
    let rows = rows
        .iter()
        .map(|r| T::from_fields(&r.iter().map(String::as_str).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    Ok((meta, rows))
}

/// Writes comment lines, the header and the rows.
pub fn write_table<W: Write>(
    mut out: W,
    meta: &Meta,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    for (k, v) in &meta.entries {
        if v.contains('\n') {
            return Err(Error::InvalidParameter(format!("meta value for {k} spans lines")));
        }
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Comment lines, header and raw string rows of a table.
pub fn read_table<R: Read>(mut input: R) -> Result<(Meta, Vec<String>, Vec<Vec<String>>)> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut meta = Meta::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(c) = line.strip_prefix("# ") {
            let (k, v) = c.split_once('=').ok_or_else(|| Error::Parse(format!("bad comment line {line:?}")))?;
            meta.entries.push((k.to_string(), v.to_string()));
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let header = r.headers()?.iter().map(|s| s.trim().to_string()).collect();
    let rows = r.records().map(|rec| Ok(rec?.iter().map(str::to_string).collect())).collect::<Result<_>>()?;
    Ok((meta, header, rows))
}

/// Signal sample `t, re, im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSample {
    pub t: f64,
    pub value: Complex64,
}

impl CsvRecord for SignalSample {
    const HEADER: &'static [&'static str] = &["t", "re", "im"];
    fn to_fields(&self) -> Vec<String> {
        vec![fmt_real(self.t), fmt_real(self.value.re), fmt_real(self.value.im)]
    }
    fn from_fields(f: &[&str]) -> Result<Self> {
        check_width(f, 3)?;
        Ok(Self { t: parse_real(f[0])?, value: Complex64::new(parse_real(f[1])?, parse_real(f[2])?) })
    }
}

fn check_width(f: &[&str], n: usize) -> Result<()> {
    if f.len() == n {
        Ok(())
    } else {
        Err(Error::Parse(format!("expected {n} fields, found {}", f.len())))
    }
}

pub fn write_signal<W: Write>(out: W, meta: &Meta, s: &SampledSignal) -> Result<()> {
    let rows: Vec<SignalSample> =
        s.grid().times().zip(s.samples()).map(|(t, &value)| SignalSample { t, value }).collect();
    write_records(out, meta, &rows)
}

/// Signal from a `t, re, im` table; `dt` must be `1/n` for an integer `n`.
pub fn read_signal<R: Read>(input: R) -> Result<(Meta, SampledSignal)> {
    let (meta, rows) = read_records::<_, SignalSample>(input)?;
    if rows.len() < 2 {
        return Err(Error::Parse("a signal needs at least two samples".into()));
    }
    let den = (1.0 / (rows[1].t - rows[0].t)).round();
    if !(den >= 1.0 && den <= u32::MAX as f64) {
        return Err(Error::Parse("sample spacing is not 1/n".into()));
    }
    let dt = 1.0 / den;
    let start = (rows[0].t / dt).round() as i64;
    let grid = Grid::new(start, rows.len(), dt)?;
    for (i, r) in rows.iter().enumerate() {
        if r.t != grid.time(i) {
            return Err(Error::Parse(format!("sample {i} at t={} is off the grid", r.t)));
        }
    }
    Ok((meta, SampledSignal::new(grid, rows.into_iter().map(|r| r.value).collect())?))
}

impl CsvRecord for ConvergenceRow {
    const HEADER: &'static [&'static str] = &["n", "error_l2", "cond", "wr_residual"];
    fn to_fields(&self) -> Vec<String> {
        vec![self.n.to_string(), fmt_real(self.error_l2), fmt_real(self.cond), fmt_real(self.wr_residual)]
    }
    fn from_fields(f: &[&str]) -> Result<Self> {
        check_width(f, 4)?;
        Ok(Self { n: parse_int(f[0])?, error_l2: parse_real(f[1])?, cond: parse_real(f[2])?, wr_residual: parse_real(f[3])? })
    }
}

impl CsvRecord for BoundsRow {
    const HEADER: &'static [&'static str] = &["t", "lambda_min", "lambda_max"];
    fn to_fields(&self) -> Vec<String> {
        vec![fmt_real(self.t), fmt_real(self.lambda_min), fmt_real(self.lambda_max)]
    }
    fn from_fields(f: &[&str]) -> Result<Self> {
        check_width(f, 3)?;
        Ok(Self { t: parse_real(f[0])?, lambda_min: parse_real(f[1])?, lambda_max: parse_real(f[2])? })
    }
}

/// Gram matrix entry between `(k, l)` and `(kp, lp)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramEntry {
    pub k: i64,
    pub l: i64,
    pub kp: i64,
    pub lp: i64,
    pub value: Complex64,
}

impl GramEntry {
    pub fn all(g: &GramOperator) -> Vec<Self> {
        g.entries().into_iter().map(|(k, l, kp, lp, value)| Self { k, l, kp, lp, value }).collect()
    }
}

impl CsvRecord for GramEntry {
    const HEADER: &'static [&'static str] = &["k", "l", "kp", "lp", "re", "im"];
    fn to_fields(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.l.to_string(),
            self.kp.to_string(),
            self.lp.to_string(),
            fmt_real(self.value.re),
            fmt_real(self.value.im),
        ]
    }
    fn from_fields(f: &[&str]) -> Result<Self> {
        check_width(f, 6)?;
        Ok(Self {
            k: parse_int(f[0])?,
            l: parse_int(f[1])?,
            kp: parse_int(f[2])?,
            lp: parse_int(f[3])?,
            value: Complex64::new(parse_real(f[4])?, parse_real(f[5])?),
        })
    }
}

impl CsvRecord for DecayRow {
    const HEADER: &'static [&'static str] = &[
        "weight_family",
        "weight_param",
        "norm_g_time",
        "norm_dual_time",
        "norm_tight_time",
        "norm_g_freq",
        "norm_dual_freq",
        "norm_tight_freq",
        "converged_flags",
        "grs_flag",
        "weight_gamma",
        "lambda1_dual",
    ];
    fn to_fields(&self) -> Vec<String> {
        let mut f = vec![self.weight.family().to_string(), fmt_real(self.weight.param())];
        f.extend(self.norms.iter().map(|&x| fmt_real(x)));
        f.push(self.flag_string());
        f.push(if self.grs { "1" } else { "0" }.into());
        f.push(match self.weight {
            WeightFunction::Subexponential { gamma, .. } => fmt_real(gamma),
            _ => String::new(),
        });
        f.push(self.lambda1_dual.map(fmt_real).unwrap_or_default());
        f
    }
    fn from_fields(f: &[&str]) -> Result<Self> {
        check_width(f, 12)?;
        let param = parse_real(f[1])?;
        let weight = match f[0] {
            "polynomial" => WeightFunction::Polynomial { s: param },
            "subexponential" => WeightFunction::Subexponential { lambda: param, gamma: parse_real(f[10])? },
            "exponential" => WeightFunction::Exponential { lambda: param },
            "constant" => WeightFunction::Constant,
            other => return Err(Error::Parse(format!("unknown weight family {other:?}"))),
        };
        let mut norms = [0.0; 6];
        for (i, n) in norms.iter_mut().enumerate() {
            *n = parse_real(f[2 + i])?;
        }
        let flags: Vec<char> = f[8].chars().collect();
        if flags.len() != 6 {
            return Err(Error::Parse(format!("converged_flags needs 6 digits, got {:?}", f[8])));
        }
        let mut converged = [false; 6];
        for (c, ch) in converged.iter_mut().zip(&flags) {
            *c = parse_flag(&ch.to_string())?;
        }
        let lambda1_dual = if f[11].trim().is_empty() { None } else { Some(parse_real(f[11])?) };
        Ok(Self { weight, norms, converged, grs: parse_flag(f[9])?, lambda1_dual })
    }
}

impl CsvRecord for TfRow {
    const HEADER: &'static [&'static str] = &[
        "p",
        "q",
        "tf",
        "frame_bound_ratio",
        "heisenberg_product",
        "tight_distance",
        "orthogonality_error",
        "sir_db",
    ];
    fn to_fields(&self) -> Vec<String> {
        vec![
            self.p.to_string(),
            self.q.to_string(),
            fmt_real(self.tf),
            fmt_real(self.frame_bound_ratio),
            fmt_real(self.heisenberg_product),
            fmt_real(self.tight_distance),
            fmt_real(self.orthogonality_error),
            fmt_real(self.sir_db),
        ]
    }
    fn from_fields(f: &[&str]) -> Result<Self> {
        check_width(f, 8)?;
        Ok(Self {
            p: parse_int(f[0])?,
            q: parse_int(f[1])?,
            tf: parse_real(f[2])?,
            frame_bound_ratio: parse_real(f[3])?,
            heisenberg_product: parse_real(f[4])?,
            tight_distance: parse_real(f[5])?,
            orthogonality_error: parse_real(f[6])?,
            sir_db: parse_real(f[7])?,
        })
    }
}

impl CsvRecord for Leakage {
    const HEADER: &'static [&'static str] = &["k", "l", "re", "im"];
    fn to_fields(&self) -> Vec<String> {
        vec![self.k.to_string(), self.l.to_string(), fmt_real(self.value.re), fmt_real(self.value.im)]
    }
    fn from_fields(f: &[&str]) -> Result<Self> {
        check_width(f, 4)?;
        Ok(Self { k: parse_int(f[0])?, l: parse_int(f[1])?, value: Complex64::new(parse_real(f[2])?, parse_real(f[3])?) })
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn emit<T: CsvRecord>(meta: &Meta, rows: &[T]) -> Vec<u8> {
        let mut buf = Vec::new();
        write_records(&mut buf, meta, rows).unwrap();
        buf
    }

    fn reemit<T: CsvRecord>(bytes: &[u8]) -> Vec<u8> {
        let (meta, rows) = read_records::<_, T>(bytes).unwrap();
        emit(&meta, &rows)
    }

    #[test]
    fn window_spec_json() {
        let text = r#"{"kind":"gaussian","params":{"scale":1.0},"grid":{"t0_samples":-384,"dt_denominator":32,"length":768}}"#;
        let spec = WindowSpec::from_json(text).unwrap();
        assert_eq!(spec, WindowSpec::benchmark_gaussian(32));
        let g = spec.build().unwrap();
        assert_eq!(g.len(), 768);
        assert!((g.norm() - 1.0).abs() < 1e-12);
        assert_eq!(WindowSpec::from_json(&spec.to_json().unwrap()).unwrap(), spec);
        let rect = r#"{"kind":"rectangular","params":{"width":1.0},"grid":{"t0_samples":-8,"dt_denominator":4,"length":16}}"#;
        assert!(WindowSpec::from_json(rect).unwrap().build().is_ok());
        assert!(WindowSpec::from_json(r#"{"kind":"bogus","params":{},"grid":{"t0_samples":0,"dt_denominator":4,"length":4}}"#).is_err());
    }

    #[test]
    fn channel_spec_json() {
        let text = r#"{"taps":[{"delay_samples":3,"doppler_cycles_per_grid":0.001,"gain_re":3.0,"gain_im":0.0},
                              {"delay_samples":0,"doppler_cycles_per_grid":0.0,"gain_re":0.0,"gain_im":4.0}],
                       "noise_sigma":0.1}"#;
        let ch = ChannelSpec::from_json(text).unwrap().model().unwrap();
        assert!((ch.power() - 1.0).abs() < 1e-15);
        assert_eq!(ch.taps[0].delay_samples, 3);
        let back = ChannelSpec::from_model(&ch).model().unwrap();
        assert_eq!(back, ch);
    }

    #[test]
    fn signal_roundtrip_is_exact() {
        let g = WindowSpec::benchmark_gaussian(32).build().unwrap().shift_modulate(5, 0.3);
        let meta = Meta::new().with("generated", "0").with("config", r#"{"a":1}"#);
        let mut buf = Vec::new();
        write_signal(&mut buf, &meta, &g).unwrap();
        let (m2, back) = read_signal(buf.as_slice()).unwrap();
        assert_eq!(m2, meta);
        assert_eq!(back, g);
        let mut again = Vec::new();
        write_signal(&mut again, &m2, &back).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn tables_roundtrip() {
        let meta = Meta::new().with("config", "{}");
        let conv = vec![ConvergenceRow { n: 1, error_l2: 0.0334, cond: 2.1, wr_residual: 1e-3 }];
        assert_eq!(reemit::<ConvergenceRow>(&emit(&meta, &conv)), emit(&meta, &conv));
        let bounds = vec![BoundsRow { t: 0.0, lambda_min: 1.0 / 3.0, lambda_max: 2.0 }];
        assert_eq!(reemit::<BoundsRow>(&emit(&meta, &bounds)), emit(&meta, &bounds));
        let decay = vec![
            DecayRow {
                weight: WeightFunction::Subexponential { lambda: 0.5, gamma: 0.5 },
                norms: [1.0, 2.0, 3.0, 4.0, 5.0, f64::INFINITY],
                converged: [true, true, false, true, false, true],
                grs: true,
                lambda1_dual: None,
            },
            DecayRow {
                weight: WeightFunction::Exponential { lambda: 1.0 },
                norms: [1.0; 6],
                converged: [true; 6],
                grs: false,
                lambda1_dual: Some(3.25),
            },
        ];
        let bytes = emit(&meta, &decay);
        assert_eq!(read_records::<_, DecayRow>(bytes.as_slice()).unwrap().1, decay);
        assert_eq!(reemit::<DecayRow>(&bytes), bytes);
        let tf = vec![TfRow {
            p: 10,
            q: 13,
            tf: 1.3,
            frame_bound_ratio: 2.18,
            heisenberg_product: 0.0955,
            tight_distance: 0.139,
            orthogonality_error: 1e-9,
            sir_db: 80.0,
        }];
        assert_eq!(reemit::<TfRow>(&emit(&meta, &tf)), emit(&meta, &tf));
        let text = String::from_utf8(emit(&meta, &tf)).unwrap();
        assert!(text.starts_with("# config={}\np,q,tf,"));
    }

    #[test]
    fn header_mismatch_is_a_parse_error() {
        let bytes = emit(&Meta::new(), &[BoundsRow { t: 0.0, lambda_min: 1.0, lambda_max: 1.0 }]);
        assert!(matches!(read_records::<_, ConvergenceRow>(bytes.as_slice()), Err(Error::Parse(_))));
    }

    proptest! {
        #[test]
        fn reals_roundtrip_bitwise(x in proptest::num::f64::ANY) {
            let y = parse_real(&fmt_real(x)).unwrap();
            prop_assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
        }

        #[test]
        fn gram_entries_roundtrip(k in -20i64..20, l in -20i64..20, re in -1e3f64..1e3, im in -1e3f64..1e3) {
            let rows = vec![GramEntry { k, l, kp: -k, lp: l + 1, value: Complex64::new(re, im) }];
            let bytes = emit(&Meta::new(), &rows);
            prop_assert_eq!(read_records::<_, GramEntry>(bytes.as_slice()).unwrap().1, rows);
        }
    }
}
