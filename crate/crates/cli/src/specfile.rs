//! Sweep description files.
//!
//! A spec file is a list of `key = value` lines. `#` starts a comment.
//! Keys before the first `[series <label>]` header are defaults shared by
//! every series; keys inside a section override them for that series. A
//! file without sections describes one series labelled `default`.
//!
//! ```text
//! metric = ergodic
//! sweep = omega_db
//! grid = -10:1:20
//! modes = exact, approx, montecarlo
//! lambda1 = 4
//! lambda2 = 3
//!
//! [series lambda0=1 lambda3=3]
//! lambda0 = 1
//! lambda3 = 3
//! ```
//!
//! Global keys: `metric`, `sweep`, `grid`, `modes`, `samples`, `seed`,
//! `chunk_size`, `expsum_terms`. Per-series keys (also usable as defaults):
//! `lambda0`..`lambda3`, `omega` or `omega_db`, `rate`, `epsilon`, `A`,
//! `modulation` (`bpsk`, `cbfsk`, `dbpsk`, `nbfsk` or `custom` with `p`, `q`),
//! `order`, `s`, `gamma`.
//!
//! Grids are `start:step:end`, `log:start:end:count` or a comma list.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use ssbc_core::model::db_to_linear;
use ssbc_core::montecarlo::{DEFAULT_CHUNK_SIZE, DEFAULT_SAMPLES};
use ssbc_core::specfun::{build_e1_expsum, DEFAULT_TERM_COUNT, MIN_TERM_COUNT};
use ssbc_core::{BinaryModulation, McConfig, ModulationSpec, SystemParams};

/// A problem in a spec file, with the line and field it concerns when known.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct SpecError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.field) {
            (Some(l), Some(k)) => write!(f, "line {l}, field `{k}`: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "field `{k}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

fn err(line: Option<usize>, field: Option<&str>, message: impl Into<String>) -> SpecError {
    SpecError {
        line,
        field: field.map(str::to_owned),
        message: message.into(),
    }
}

macro_rules! named_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!(
                        "unknown value `{s}` (expected one of: {})",
                        [$($text),+].join(", ")
                    )),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

named_enum!(
    /// Quantity tabulated by a sweep.
    Metric {
        OutageProb => "outage_prob",
        OutageCapacity => "outage_capacity",
        Ergodic => "ergodic",
        Effective => "effective",
        Ber => "ber",
        Ser => "ser",
        Mgf => "mgf",
        Cdf => "cdf",
    }
);

named_enum!(
    /// Variable on the x-axis.
    SweepVar {
        OmegaDb => "omega_db",
        Lambda1 => "lambda1",
        A => "A",
        Gamma => "gamma",
    }
);

named_enum!(
    /// Evaluation route.
    Mode {
        Exact => "exact",
        Approx => "approx",
        Asymptotic => "asymptotic",
        MonteCarlo => "montecarlo",
    }
);

impl Metric {
    /// Modes this metric can be evaluated in.
    pub fn supported_modes(self) -> &'static [Mode] {
        use Mode::*;
        match self {
            Metric::Cdf | Metric::OutageProb => &[Exact, Approx, MonteCarlo],
            Metric::OutageCapacity => &[Exact, MonteCarlo],
            Metric::Ergodic | Metric::Effective => &[Exact, Approx, Asymptotic, MonteCarlo],
            Metric::Ber => &[Approx, Asymptotic, MonteCarlo],
            Metric::Ser | Metric::Mgf => &[Approx, MonteCarlo],
        }
    }
}

/// Grid of sweep values, kept in the form it was written.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Range { start: f64, step: f64, end: f64 },
    Log { start: f64, end: f64, count: usize },
    List(Vec<f64>),
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Range { start, step, end } => {
                let n = ((end - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| start + i as f64 * step).collect()
            }
            Grid::Log { start, end, count } => {
                let (a, b) = (start.log10(), end.log10());
                if *count == 1 {
                    return vec![*start];
                }
                (0..*count)
                    .map(|i| {
                        if i + 1 == *count {
                            *end
                        } else {
                            10f64.powf(a + (b - a) * i as f64 / (*count - 1) as f64)
                        }
                    })
                    .collect()
            }
            Grid::List(v) => v.clone(),
        }
    }

    fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        if text.is_empty() {
            return Err("grid is empty".into());
        }
        let num = |s: &str| parse_f64(s.trim());
        let grid = if let Some(rest) = text.strip_prefix("log:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err("log grid must be `log:start:end:count`".into());
            }
            let count: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| format!("bad point count `{}`", parts[2].trim()))?;
            let (start, end) = (num(parts[0])?, num(parts[1])?);
            if count == 0 {
                return Err("grid is empty (count = 0)".into());
            }
            if !(start > 0.0 && end > 0.0) {
                return Err("log grid endpoints must be > 0".into());
            }
            Grid::Log { start, end, count }
        } else if text.contains(':') {
            let parts: Vec<&str> = text.split(':').collect();
            if parts.len() != 3 {
                return Err("range grid must be `start:step:end`".into());
            }
            let (start, step, end) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(step > 0.0) {
                return Err("range step must be > 0".into());
            }
            if end < start {
                return Err("grid is empty (end < start)".into());
            }
            Grid::Range { start, step, end }
        } else {
            let values = text
                .split(',')
                .map(|s| s.trim())
                .filter(|s| !s.is_empty())
                .map(parse_f64)
                .collect::<Result<Vec<_>, _>>()?;
            if values.is_empty() {
                return Err("grid is empty".into());
            }
            Grid::List(values)
        };
        let values = grid.values();
        if values.is_empty() {
            return Err("grid is empty".into());
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err("grid values must be finite".into());
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err("grid must be strictly increasing".into());
        }
        Ok(grid)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Range { start, step, end } => write!(f, "{start}:{step}:{end}"),
            Grid::Log { start, end, count } => write!(f, "log:{start}:{end}:{count}"),
            Grid::List(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(", "))
            }
        }
    }
}

/// Ω as written: linear or in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Omega {
    Linear(f64),
    Db(f64),
}

impl Omega {
    pub fn linear(self) -> f64 {
        match self {
            Omega::Linear(v) => v,
            Omega::Db(db) => db_to_linear(db),
        }
    }
}

/// Per-series keys. `None` means "not given here".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Fields {
    pub lambda0: Option<f64>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub lambda3: Option<f64>,
    pub omega: Option<Omega>,
    pub rate: Option<f64>,
    pub epsilon: Option<f64>,
    pub a: Option<f64>,
    pub modulation: Option<String>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub order: Option<u32>,
    pub s: Option<f64>,
    pub gamma: Option<f64>,
}

impl Fields {
    fn overlay(&self, over: &Fields) -> Fields {
        macro_rules! pick {
            ($($f:ident),+) => { Fields { $($f: over.$f.clone().or_else(|| self.$f.clone())),+ } };
        }
        pick!(lambda0, lambda1, lambda2, lambda3, omega, rate, epsilon, a, modulation, p, q, order, s, gamma)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<bool, String> {
        let slot = |v: &mut Option<f64>| -> Result<bool, String> {
            *v = Some(parse_f64(value)?);
            Ok(true)
        };
        match key {
            "lambda0" => slot(&mut self.lambda0),
            "lambda1" => slot(&mut self.lambda1),
            "lambda2" => slot(&mut self.lambda2),
            "lambda3" => slot(&mut self.lambda3),
            "omega" | "omega_db" => {
                let v = parse_f64(value)?;
                self.omega = Some(if key == "omega" { Omega::Linear(v) } else { Omega::Db(v) });
                Ok(true)
            }
            "rate" => slot(&mut self.rate),
            "epsilon" => slot(&mut self.epsilon),
            "A" => slot(&mut self.a),
            "p" => slot(&mut self.p),
            "q" => slot(&mut self.q),
            "s" => slot(&mut self.s),
            "gamma" => slot(&mut self.gamma),
            "modulation" => {
                let name = value.to_ascii_lowercase();
                if name != "custom" && BinaryModulation::preset(&name).is_none() {
                    return Err(format!(
                        "unknown modulation `{value}` (expected bpsk, cbfsk, dbpsk, nbfsk or custom)"
                    ));
                }
                self.modulation = Some(name);
                Ok(true)
            }
            "order" => {
                self.order = Some(value.parse().map_err(|_| format!("bad integer `{value}`"))?);
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    fn write(&self, out: &mut String) {
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        let num = |v: Option<f64>| v.map(|x| x.to_string());
        for (k, v) in [
            ("lambda0", num(self.lambda0)),
            ("lambda1", num(self.lambda1)),
            ("lambda2", num(self.lambda2)),
            ("lambda3", num(self.lambda3)),
        ] {
            if let Some(v) = v {
                line(k, v);
            }
        }
        match self.omega {
            Some(Omega::Linear(v)) => line("omega", v.to_string()),
            Some(Omega::Db(v)) => line("omega_db", v.to_string()),
            None => {}
        }
        for (k, v) in [
            ("rate", num(self.rate)),
            ("epsilon", num(self.epsilon)),
            ("A", num(self.a)),
            ("modulation", self.modulation.clone()),
            ("p", num(self.p)),
            ("q", num(self.q)),
            ("order", self.order.map(|o| o.to_string())),
            ("s", num(self.s)),
            ("gamma", num(self.gamma)),
        ] {
            if let Some(v) = v {
                line(k, v);
            }
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("bad number `{}`", s.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("number must be finite, got `{}`", s.trim()))
    }
}

/// Monte Carlo settings as written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub samples: u64,
    pub seed: u64,
    pub chunk_size: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: 0,
            chunk_size: DEFAULT_CHUNK_SIZE,
        }
    }
}

impl McSettings {
    pub fn config(&self) -> McConfig {
        McConfig::new(self.samples, self.seed, self.chunk_size)
            .expect("settings are validated when parsed")
    }
}

/// A labelled parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub fields: Fields,
}

/// A parsed and validated sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub metric: Metric,
    pub sweep: SweepVar,
    pub grid: Grid,
    pub modes: Vec<Mode>,
    pub mc: McSettings,
    pub expsum_terms: usize,
    pub defaults: Fields,
    pub series: Vec<Series>,
}

/// Metric arguments of one series after defaults are applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricArgs {
    pub rate: f64,
    pub epsilon: f64,
    pub a: f64,
    pub modulation: Option<BinaryModulation>,
    pub order: u32,
    pub s: f64,
    pub gamma: f64,
}

/// One series with every field it needs resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSeries {
    pub label: String,
    pub params: SystemParams,
    pub args: MetricArgs,
}

impl ResolvedSeries {
    /// Parameters and arguments at sweep value `x`.
    pub fn at(&self, sweep: SweepVar, x: f64) -> Result<(SystemParams, MetricArgs), String> {
        let mut params = self.params;
        let mut args = self.args;
        match sweep {
            SweepVar::OmegaDb => params = params.with_omega_db(x).map_err(|e| e.to_string())?,
            SweepVar::Lambda1 => params = params.with_lambda1(x).map_err(|e| e.to_string())?,
            SweepVar::A => args.a = x,
            SweepVar::Gamma => args.gamma = x,
        }
        Ok((params, args))
    }
}

const GLOBAL_KEYS: &[&str] = &["metric", "sweep", "grid", "modes", "samples", "seed", "chunk_size", "expsum_terms"];

impl SweepSpec {
    /// Parses and validates a spec file.
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let mut metric: Option<(Metric, usize)> = None;
        let mut sweep: Option<(SweepVar, usize)> = None;
        let mut grid: Option<Grid> = None;
        let mut modes: Option<Vec<Mode>> = None;
        let mut mc = McSettings::default();
        let mut expsum_terms = DEFAULT_TERM_COUNT;
        let mut defaults = Fields::default();
        let mut series: Vec<(Series, usize)> = Vec::new();
        let mut seen_global: Vec<&str> = Vec::new();
        let mut section_keys: Vec<String> = Vec::new();
        let mut grid_line = None;

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let inner = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(Some(lineno), None, "section header must end with `]`"))?;
                let label = inner
                    .trim()
                    .strip_prefix("series")
                    .filter(|l| l.is_empty() || l.starts_with(char::is_whitespace))
                    .ok_or_else(|| err(Some(lineno), None, "section header must be `[series <label>]`"))?
                    .trim();
                if label.is_empty() {
                    return Err(err(Some(lineno), None, "series label is empty"));
                }
                if label.contains(',') || label.contains('"') {
                    return Err(err(Some(lineno), None, "series label must not contain `,` or `\"`"));
                }
                if series.iter().any(|(s, _)| s.label == label) {
                    return Err(err(Some(lineno), None, format!("duplicate series `{label}`")));
                }
                section_keys.clear();
                series.push((
                    Series {
                        label: label.to_owned(),
                        fields: Fields::default(),
                    },
                    lineno,
                ));
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(Some(lineno), None, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let here = |m: String| err(Some(lineno), Some(key), m);

            if let Some(&g) = GLOBAL_KEYS.iter().find(|&&g| g == key) {
                if !series.is_empty() {
                    return Err(here("global key not allowed inside a series section".into()));
                }
                if seen_global.contains(&g) {
                    return Err(here("given twice".into()));
                }
                seen_global.push(g);
                match key {
                    "metric" => metric = Some((value.parse().map_err(here)?, lineno)),
                    "sweep" => sweep = Some((value.parse().map_err(here)?, lineno)),
                    "grid" => {
                        grid = Some(Grid::parse(value).map_err(here)?);
                        grid_line = Some(lineno);
                    }
                    "modes" => {
                        let mut list = Vec::new();
                        for m in value.split(',').map(str::trim).filter(|m| !m.is_empty()) {
                            let m: Mode = m.parse().map_err(here)?;
                            if list.contains(&m) {
                                return Err(here(format!("mode `{m}` listed twice")));
                            }
                            list.push(m);
                        }
                        if list.is_empty() {
                            return Err(here("no modes given".into()));
                        }
                        modes = Some(list);
                    }
                    "samples" => mc.samples = parse_u64(value).map_err(here)?,
                    "seed" => mc.seed = parse_u64(value).map_err(here)?,
                    "chunk_size" => mc.chunk_size = parse_u64(value).map_err(here)?,
                    "expsum_terms" => {
                        expsum_terms = parse_u64(value).map_err(here)? as usize;
                    }
                    _ => unreachable!(),
                }
                continue;
            }

            let canonical = if key == "omega_db" { "omega" } else { key };
            if section_keys.iter().any(|k| k == canonical) {
                return Err(here("given twice in the same section".into()));
            }
            section_keys.push(canonical.to_owned());
            let target = match series.last_mut() {
                Some((s, _)) => &mut s.fields,
                None => &mut defaults,
            };
            if !target.set(key, value).map_err(here)? {
                return Err(here("unknown key".into()));
            }
        }

        let need = |name: &str| err(None, Some(name), "missing required key");
        let (metric, metric_line) = metric.ok_or_else(|| need("metric"))?;
        let (sweep, sweep_line) = sweep.ok_or_else(|| need("sweep"))?;
        let grid = grid.ok_or_else(|| need("grid"))?;
        let modes = modes.ok_or_else(|| need("modes"))?;

        let allowed = match metric {
            Metric::Effective => matches!(sweep, SweepVar::OmegaDb | SweepVar::Lambda1 | SweepVar::A),
            Metric::Cdf => matches!(sweep, SweepVar::OmegaDb | SweepVar::Lambda1 | SweepVar::Gamma),
            _ => matches!(sweep, SweepVar::OmegaDb | SweepVar::Lambda1),
        };
        if !allowed {
            return Err(err(
                Some(sweep_line),
                Some("sweep"),
                format!("metric `{metric}` cannot be swept over `{sweep}`"),
            ));
        }
        for m in &modes {
            if !metric.supported_modes().contains(m) {
                return Err(err(
                    Some(metric_line),
                    Some("modes"),
                    format!("metric `{metric}` has no `{m}` mode"),
                ));
            }
        }
        McConfig::new(mc.samples, mc.seed, mc.chunk_size)
            .map_err(|e| err(None, Some("samples"), e.to_string()))?;
        if expsum_terms < MIN_TERM_COUNT {
            return Err(err(
                None,
                Some("expsum_terms"),
                format!("must be >= {MIN_TERM_COUNT}, got {expsum_terms}"),
            ));
        }
        if expsum_terms != DEFAULT_TERM_COUNT {
            build_e1_expsum(expsum_terms).map_err(|e| err(None, Some("expsum_terms"), e.to_string()))?;
        }

        let (series, lines): (Vec<Series>, Vec<Option<usize>>) = if series.is_empty() {
            (
                vec![Series {
                    label: "default".into(),
                    fields: Fields::default(),
                }],
                vec![None],
            )
        } else {
            series.into_iter().map(|(s, l)| (s, Some(l))).unzip()
        };

        let spec = SweepSpec {
            metric,
            sweep,
            grid,
            modes,
            mc,
            expsum_terms,
            defaults,
            series,
        };
        let first = spec.grid.values()[0];
        let bad_start = match sweep {
            SweepVar::Gamma => first < 0.0,
            SweepVar::Lambda1 | SweepVar::A => first <= 0.0,
            SweepVar::OmegaDb => false,
        };
        if bad_start {
            let bound = if sweep == SweepVar::Gamma { ">= 0" } else { "> 0" };
            return Err(err(grid_line, Some("grid"), format!("{sweep} grid must be {bound}")));
        }
        for (s, line) in spec.series.iter().zip(lines) {
            spec.resolve_one(s).map_err(|mut e| {
                e.line = e.line.or(line);
                e
            })?;
        }
        Ok(spec)
    }

    /// Every series with defaults applied and fields checked.
    pub fn resolve(&self) -> Result<Vec<ResolvedSeries>, SpecError> {
        self.series.iter().map(|s| self.resolve_one(s)).collect()
    }

    fn resolve_one(&self, series: &Series) -> Result<ResolvedSeries, SpecError> {
        let f = self.defaults.overlay(&series.fields);
        let ctx = |field: &str, m: String| {
            err(None, Some(field), format!("series `{}`: {m}", series.label))
        };
        let required = |field: &str, v: Option<f64>| v.ok_or_else(|| ctx(field, "missing".into()));
        let swept = |v: SweepVar| self.sweep == v;

        let omega = match (f.omega, swept(SweepVar::OmegaDb)) {
            (_, true) => 1.0,
            (Some(o), false) => o.linear(),
            (None, false) => return Err(ctx("omega", "missing (give `omega` or `omega_db`)".into())),
        };
        let lambda1 = if swept(SweepVar::Lambda1) { 1.0 } else { required("lambda1", f.lambda1)? };
        let params = SystemParams::new(
            required("lambda0", f.lambda0)?,
            lambda1,
            required("lambda2", f.lambda2)?,
            required("lambda3", f.lambda3)?,
            omega,
        )
        .map_err(|e| ctx("params", e.to_string()))?;

        let mut args = MetricArgs {
            rate: f64::NAN,
            epsilon: f64::NAN,
            a: f64::NAN,
            modulation: None,
            order: 0,
            s: f64::NAN,
            gamma: f64::NAN,
        };
        let positive = |field: &str, v: Option<f64>| -> Result<f64, SpecError> {
            let v = required(field, v)?;
            if v > 0.0 {
                Ok(v)
            } else {
                Err(ctx(field, format!("must be > 0, got {v}")))
            }
        };
        match self.metric {
            Metric::Ergodic => {}
            Metric::OutageProb => args.rate = positive("rate", f.rate)?,
            Metric::OutageCapacity => {
                let e = required("epsilon", f.epsilon)?;
                if !(e > 0.0 && e < 1.0) {
                    return Err(ctx("epsilon", format!("must lie in (0, 1), got {e}")));
                }
                args.epsilon = e;
            }
            Metric::Effective => {
                if !swept(SweepVar::A) {
                    args.a = positive("A", f.a)?;
                }
            }
            Metric::Ber => {
                let name = f.modulation.clone().ok_or_else(|| ctx("modulation", "missing".into()))?;
                let m = if name == "custom" {
                    BinaryModulation::new(positive("p", f.p)?, positive("q", f.q)?)
                        .map_err(|e| ctx("modulation", e.to_string()))?
                } else {
                    if f.p.is_some() || f.q.is_some() {
                        return Err(ctx("p", "p and q are only used with `modulation = custom`".into()));
                    }
                    BinaryModulation::preset(&name).expect("checked when parsed")
                };
                args.modulation = Some(m);
            }
            Metric::Ser => {
                let o = f.order.ok_or_else(|| ctx("order", "missing".into()))?;
                ModulationSpec::mpsk(o).map_err(|e| ctx("order", e.to_string()))?;
                args.order = o;
            }
            Metric::Mgf => args.s = positive("s", f.s)?,
            Metric::Cdf => {
                if !swept(SweepVar::Gamma) {
                    let g = required("gamma", f.gamma)?;
                    if !(g >= 0.0) {
                        return Err(ctx("gamma", format!("must be >= 0, got {g}")));
                    }
                    args.gamma = g;
                }
            }
        }
        Ok(ResolvedSeries {
            label: series.label.clone(),
            params,
            args,
        })
    }

    /// Canonical text form; parsing it yields an equal spec.
    pub fn to_spec_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "metric = {}", self.metric);
        let _ = writeln!(out, "sweep = {}", self.sweep);
        let _ = writeln!(out, "grid = {}", self.grid);
        let modes: Vec<&str> = self.modes.iter().map(|m| m.as_str()).collect();
        let _ = writeln!(out, "modes = {}", modes.join(", "));
        let _ = writeln!(out, "samples = {}", self.mc.samples);
        let _ = writeln!(out, "seed = {}", self.mc.seed);
        let _ = writeln!(out, "chunk_size = {}", self.mc.chunk_size);
        let _ = writeln!(out, "expsum_terms = {}", self.expsum_terms);
        self.defaults.write(&mut out);
        let only_default = self.series.len() == 1
            && self.series[0].label == "default"
            && self.series[0].fields == Fields::default();
        if !only_default {
            for s in &self.series {
                let _ = writeln!(out, "\n[series {}]", s.label);
                s.fields.write(&mut out);
            }
        }
        out
    }
}

fn parse_u64(s: &str) -> Result<u64, String> {
    s.replace('_', "").parse().map_err(|_| format!("bad integer `{s}`"))
}
