//! Flat `key = value` run configuration.
//!
//! The document uses TOML scalar and array syntax, one key per line, no
//! tables. Every key is optional; missing keys take the defaults listed in
//! [`KEYS`]. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Method, PropagationOptions, DEFAULT_KRYLOV_DIM, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpec, DEFAULT_FOCK_DIM, NORM_TOL};
use crate::model::{CouplingMode, HoppingMode, ModelParams};

/// Every accepted key with a one-line description and its default.
pub const KEYS: &[(&str, &str)] = &[
    ("omega_a", "ion level splitting (1.0)"),
    ("omega_c", "oscillator frequency (1.0)"),
    ("lambda", "ion-oscillator coupling (0.25)"),
    ("j_hop", "hopping strength J (0.2)"),
    ("p_exp", "power-law exponent p, expected in [0, 3] (3.0)"),
    (
        "positions",
        "scaled ion positions, strictly increasing (five-ion chain)",
    ),
    ("coupling_mode", "full | rotating_only (full)"),
    ("hopping_mode", "full | excitation_conserving (full)"),
    ("fock_dim", "truncated boson dimension (101)"),
    ("boson_levels", "Fock levels of the initial oscillator state ([10, 15])"),
    (
        "boson_populations",
        "weights of those levels, summing to 1 ([0.6, 0.4])",
    ),
    ("boson_phases", "phases in radians (all zero)"),
    ("t_max", "end of the simulated window in units of 1/omega_c (40.0)"),
    ("dt", "output sampling step (0.02)"),
    ("method", "auto | dense | krylov (auto)"),
    ("tol", "Krylov local error bound per unit time (1e-8)"),
    ("krylov_dim", "Krylov subspace dimension (30)"),
    (
        "leakage_warn",
        "top-Fock-level population that triggers a warning (1e-6)",
    ),
    ("sweep_param", "lambda | j_hop | p_exp (no sweep)"),
    ("sweep_values", "explicit sweep grid"),
    ("sweep_start", "grid start, used with sweep_stop and sweep_step"),
    ("sweep_stop", "grid end (inclusive)"),
    ("sweep_step", "grid step"),
    ("sweep_reduction", "trace | max_over_window (max_over_window)"),
    ("window_start", "start of the maximum window (0.0)"),
    ("window_end", "end of the maximum window (30.0)"),
    ("both_hopping_modes", "spectrum scans: run both hopping modes (true)"),
    ("workers", "concurrent sweep points (1)"),
    ("out_dir", "output directory (out)"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Lambda,
    JHop,
    PExp,
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::JHop => "j_hop",
            SweepParam::PExp => "p_exp",
        }
    }

    pub fn apply(self, model: &ModelParams, value: f64) -> ModelParams {
        let mut m = model.clone();
        match self {
            SweepParam::Lambda => m.lambda = value,
            SweepParam::JHop => m.j_hop = value,
            SweepParam::PExp => m.p_exp = value,
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    Trace,
    MaxOverWindow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub reduction: Reduction,
}

/// Initial oscillator superposition `Σ √p_k e^{iφ_k} |n_k⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BosonPreparation {
    pub levels: Vec<usize>,
    pub populations: Vec<f64>,
    pub phases: Vec<f64>,
}

impl Default for BosonPreparation {
    fn default() -> Self {
        Self {
            levels: vec![10, 15],
            populations: vec![0.6, 0.4],
            phases: vec![0.0, 0.0],
        }
    }
}

impl BosonPreparation {
    pub fn amplitudes(&self) -> BTreeMap<usize, C64> {
        self.levels
            .iter()
            .zip(&self.populations)
            .zip(&self.phases)
            .map(|((&n, &p), &phi)| (n, C64::from_polar(p.sqrt(), phi)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelParams,
    pub spec: HilbertSpec,
    pub boson: BosonPreparation,
    pub t_max: f64,
    pub dt: f64,
    pub propagation: PropagationOptions,
    pub leakage_warn: f64,
    pub sweep: Option<SweepConfig>,
    pub window: (f64, f64),
    pub both_hopping_modes: bool,
    pub workers: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelParams::default(),
            spec: HilbertSpec::default(),
            boson: BosonPreparation::default(),
            t_max: 40.0,
            dt: 0.02,
            propagation: PropagationOptions::default(),
            leakage_warn: 1e-6,
            sweep: None,
            window: (0.0, 30.0),
            both_hopping_modes: true,
            workers: 1,
            out_dir: PathBuf::from("out"),
        }
    }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with_overrides(text, &[])
}

/// Parse a document, then apply `key=value` overrides (later wins).
pub fn parse_config_with_overrides(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::ConfigSyntax(e.message().to_string()))?;
    for o in overrides {
        let (key, value) = o
            .split_once('=')
            .ok_or_else(|| Error::ConfigSyntax(format!("override `{o}` is not key=value")))?;
        let key = key.trim();
        let fragment: toml::Table = format!("v = {}", value.trim())
            .parse()
            .or_else(|_| format!("v = {:?}", value.trim()).parse())
            .map_err(|e: toml::de::Error| Error::config(key, e.message().to_string()))?;
        table.insert(key.to_string(), fragment["v"].clone());
    }
    Document { table }.into_config()
}

struct Document {
    table: toml::Table,
}

fn type_error(key: &str, expected: &str, got: &toml::Value) -> Error {
    Error::config(key, format!("expected {expected}, got {}", got.type_str()))
}

fn as_f64(key: &str, v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        other => Err(type_error(key, "a number", other)),
    }
}

fn as_usize(key: &str, v: &toml::Value) -> Result<usize> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        toml::Value::Integer(i) => Err(Error::config(key, format!("must be non-negative, got {i}"))),
        other => Err(type_error(key, "a non-negative integer", other)),
    }
}

impl Document {
    fn take(&mut self, key: &str) -> Option<toml::Value> {
        self.table.remove(key)
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key).map(|v| as_f64(key, &v)).transpose()
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>> {
        self.take(key).map(|v| as_usize(key, &v)).transpose()
    }

    fn bool(&mut self, key: &str) -> Result<Option<bool>> {
        match self.take(key) {
            None => Ok(None),
            Some(toml::Value::Boolean(b)) => Ok(Some(b)),
            Some(other) => Err(type_error(key, "a boolean", &other)),
        }
    }

    fn string(&mut self, key: &str) -> Result<Option<String>> {
        match self.take(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(type_error(key, "a string", &other)),
        }
    }

    fn list<T>(&mut self, key: &str, item: impl Fn(&str, &toml::Value) -> Result<T>) -> Result<Option<Vec<T>>> {
        match self.take(key) {
            None => Ok(None),
            Some(toml::Value::Array(items)) => items.iter().map(|v| item(key, v)).collect::<Result<_>>().map(Some),
            Some(other) => Err(type_error(key, "an array", &other)),
        }
    }

    fn choice<T: Copy>(&mut self, key: &str, options: &[(&str, T)]) -> Result<Option<T>> {
        let Some(s) = self.string(key)? else {
            return Ok(None);
        };
        options
            .iter()
            .find(|(name, _)| *name == s)
            .map(|(_, v)| Some(*v))
            .ok_or_else(|| {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                Error::config(
                    key,
                    format!("unknown value `{s}`, expected one of {}", names.join(", ")),
                )
            })
    }

    fn into_config(mut self) -> Result<RunConfig> {
        let d = RunConfig::default();
        let dm = &d.model;

        let model = ModelParams {
            omega_a: self.f64("omega_a")?.unwrap_or(dm.omega_a),
            omega_c: self.f64("omega_c")?.unwrap_or(dm.omega_c),
            lambda: self.f64("lambda")?.unwrap_or(dm.lambda),
            j_hop: self.f64("j_hop")?.unwrap_or(dm.j_hop),
            p_exp: self.f64("p_exp")?.unwrap_or(dm.p_exp),
            positions: self.list("positions", as_f64)?.unwrap_or_else(|| dm.positions.clone()),
            coupling_mode: self
                .choice(
                    "coupling_mode",
                    &[
                        ("full", CouplingMode::Full),
                        ("rotating_only", CouplingMode::RotatingOnly),
                    ],
                )?
                .unwrap_or(dm.coupling_mode),
            hopping_mode: self
                .choice(
                    "hopping_mode",
                    &[
                        ("full", HoppingMode::Full),
                        ("excitation_conserving", HoppingMode::ExcitationConserving),
                    ],
                )?
                .unwrap_or(dm.hopping_mode),
        };
        let fock_dim = self.usize("fock_dim")?.unwrap_or(DEFAULT_FOCK_DIM);

        let levels = self.list("boson_levels", as_usize)?;
        let populations = self.list("boson_populations", as_f64)?;
        let phases = self.list("boson_phases", as_f64)?;
        let boson = match (levels, populations) {
            (None, None) => BosonPreparation {
                phases: phases.unwrap_or_else(|| d.boson.phases.clone()),
                ..d.boson.clone()
            },
            (Some(levels), Some(populations)) => {
                let n = levels.len();
                BosonPreparation {
                    levels,
                    populations,
                    phases: phases.unwrap_or_else(|| vec![0.0; n]),
                }
            }
            (Some(_), None) => return Err(Error::config("boson_populations", "required when boson_levels is set")),
            (None, Some(_)) => return Err(Error::config("boson_levels", "required when boson_populations is set")),
        };

        let t_max = self.f64("t_max")?.unwrap_or(d.t_max);
        let dt = self.f64("dt")?.unwrap_or(d.dt);
        let propagation = PropagationOptions {
            method: self
                .choice(
                    "method",
                    &[
                        ("auto", Method::Auto),
                        ("dense", Method::DenseEig),
                        ("dense_eig", Method::DenseEig),
                        ("krylov", Method::Krylov),
                    ],
                )?
                .unwrap_or(Method::Auto),
            tol: self.f64("tol")?.unwrap_or(DEFAULT_TOL),
            krylov_dim: self.usize("krylov_dim")?.unwrap_or(DEFAULT_KRYLOV_DIM),
        };
        let leakage_warn = self.f64("leakage_warn")?.unwrap_or(d.leakage_warn);

        let sweep_param = self.choice(
            "sweep_param",
            &[
                ("lambda", SweepParam::Lambda),
                ("j_hop", SweepParam::JHop),
                ("p_exp", SweepParam::PExp),
            ],
        )?;
        let sweep_values = self.list("sweep_values", as_f64)?;
        let sweep_start = self.f64("sweep_start")?;
        let sweep_stop = self.f64("sweep_stop")?;
        let sweep_step = self.f64("sweep_step")?;
        let reduction = self.choice(
            "sweep_reduction",
            &[
                ("trace", Reduction::Trace),
                ("max_over_window", Reduction::MaxOverWindow),
            ],
        )?;
        let window = (
            self.f64("window_start")?.unwrap_or(d.window.0),
            self.f64("window_end")?.unwrap_or(d.window.1),
        );
        let both_hopping_modes = self.bool("both_hopping_modes")?.unwrap_or(d.both_hopping_modes);
        let workers = self.usize("workers")?.unwrap_or(d.workers);
        let out_dir = self.string("out_dir")?.map(PathBuf::from).unwrap_or(d.out_dir);

        if let Some(key) = self.table.keys().next() {
            return Err(Error::config(key.clone(), "unknown key"));
        }

        let sweep = match sweep_param {
            None => {
                let stray = [
                    ("sweep_values", sweep_values.is_some()),
                    ("sweep_start", sweep_start.is_some()),
                    ("sweep_stop", sweep_stop.is_some()),
                    ("sweep_step", sweep_step.is_some()),
                    ("sweep_reduction", reduction.is_some()),
                ];
                if let Some((key, _)) = stray.iter().find(|(_, set)| *set) {
                    return Err(Error::config(*key, "sweep keys require sweep_param"));
                }
                None
            }
            Some(param) => {
                let values = match (sweep_values, sweep_start, sweep_stop, sweep_step) {
                    (Some(v), None, None, None) => v,
                    (None, Some(a), Some(b), Some(h)) => range_grid(a, b, h)?,
                    (None, None, None, None) => return Err(Error::config("sweep_values", "a sweep needs a grid")),
                    _ => {
                        return Err(Error::config(
                            "sweep_values",
                            "give either sweep_values or all of sweep_start/sweep_stop/sweep_step",
                        ))
                    }
                };
                Some(SweepConfig {
                    param,
                    values,
                    reduction: reduction.unwrap_or(Reduction::MaxOverWindow),
                })
            }
        };

        let config = RunConfig {
            spec: HilbertSpec::new(model.n_ions().max(1), fock_dim)
                .map_err(|e| Error::config("fock_dim", e.to_string()))?,
            model,
            boson,
            t_max,
            dt,
            propagation,
            leakage_warn,
            sweep,
            window,
            both_hopping_modes,
            workers,
            out_dir,
        };
        config.validate()?;
        Ok(config)
    }
}

/// `start, start + step, ...` up to `stop` inclusive, rounded to 12 decimals
/// so grid values print cleanly.
fn range_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::config("sweep_step", format!("must be positive, got {step}")));
    }
    if !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::config(
            "sweep_stop",
            format!("must be >= sweep_start, got {stop}"),
        ));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        if !(m.p_exp >= 0.0) {
            return Err(Error::config(
                "p_exp",
                format!("must be non-negative (expected range [0, 3]), got {}", m.p_exp),
            ));
        }
        if m.p_exp > 3.0 {
            log::warn!("p_exp = {} lies outside the expected range [0, 3]", m.p_exp);
        }
        if m.positions.is_empty() {
            return Err(Error::config("positions", "must not be empty"));
        }
        if m.positions.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("positions", "must be strictly increasing"));
        }
        for (key, v) in [
            ("omega_a", m.omega_a),
            ("omega_c", m.omega_c),
            ("lambda", m.lambda),
            ("j_hop", m.j_hop),
        ] {
            if !v.is_finite() {
                return Err(Error::config(key, "must be finite"));
            }
        }
        m.validate().map_err(|e| Error::config("model", e.to_string()))?;
        if m.n_ions() != self.spec.n_ions() {
            return Err(Error::config("positions", "length does not match the ion count"));
        }

        let b = &self.boson;
        if b.levels.is_empty() {
            return Err(Error::config("boson_levels", "must not be empty"));
        }
        if b.populations.len() != b.levels.len() {
            return Err(Error::config("boson_populations", "must match boson_levels in length"));
        }
        if b.phases.len() != b.levels.len() {
            return Err(Error::config("boson_phases", "must match boson_levels in length"));
        }
        let mut seen = b.levels.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("boson_levels", "levels must be distinct"));
        }
        if let Some(&l) = b.levels.iter().find(|&&l| l >= self.spec.fock_dim()) {
            return Err(Error::config(
                "boson_levels",
                format!(
                    "level {l} is outside the truncated space (fock_dim = {})",
                    self.spec.fock_dim()
                ),
            ));
        }
        if b.populations.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::config("boson_populations", "must be non-negative"));
        }
        let total: f64 = b.populations.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::config(
                "boson_populations",
                format!("must sum to 1, got {total}"),
            ));
        }
        if b.phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::config("boson_phases", "must be finite"));
        }

        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::config("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(Error::config("t_max", format!("must be positive, got {}", self.t_max)));
        }
        if !(self.propagation.tol > 0.0) {
            return Err(Error::config("tol", "must be positive"));
        }
        if self.propagation.krylov_dim < 2 {
            return Err(Error::config("krylov_dim", "must be at least 2"));
        }
        if !(self.leakage_warn >= 0.0) {
            return Err(Error::config("leakage_warn", "must be non-negative"));
        }
        if self.workers == 0 {
            return Err(Error::config("workers", "must be at least 1"));
        }
        let (w0, w1) = self.window;
        if !(w0 >= 0.0 && w1 > w0) {
            return Err(Error::config("window_end", format!("window [{w0}, {w1}] is empty")));
        }
        if w1 > self.t_max {
            return Err(Error::config(
                "window_end",
                format!("window end {w1} exceeds t_max = {}", self.t_max),
            ));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::config("sweep_values", "grid must not be empty"));
            }
            if sweep.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::config("sweep_values", "must be finite"));
            }
            if sweep.param == SweepParam::PExp && sweep.values.iter().any(|&v| v < 0.0) {
                return Err(Error::config("sweep_values", "p_exp values must be non-negative"));
            }
        }
        Ok(())
    }

    /// Model parameters at sweep value `value` (or the base model).
    pub fn model_at(&self, value: Option<f64>) -> ModelParams {
        match (&self.sweep, value) {
            (Some(s), Some(v)) => s.param.apply(&self.model, v),
            _ => self.model.clone(),
        }
    }

    /// Render as a document that [`parse_config`] maps back to `self`.
    pub fn to_document(&self) -> String {
        fn list<T: std::fmt::Debug>(xs: &[T]) -> String {
            let items: Vec<String> = xs.iter().map(|x| format!("{x:?}")).collect();
            format!("[{}]", items.join(", "))
        }
        let m = &self.model;
        let mut s = String::new();
        let _ = writeln!(s, "omega_a = {:?}", m.omega_a);
        let _ = writeln!(s, "omega_c = {:?}", m.omega_c);
        let _ = writeln!(s, "lambda = {:?}", m.lambda);
        let _ = writeln!(s, "j_hop = {:?}", m.j_hop);
        let _ = writeln!(s, "p_exp = {:?}", m.p_exp);
        let _ = writeln!(s, "positions = {}", list(&m.positions));
        let _ = writeln!(s, "coupling_mode = {:?}", enum_name(&m.coupling_mode));
        let _ = writeln!(s, "hopping_mode = {:?}", enum_name(&m.hopping_mode));
        let _ = writeln!(s, "fock_dim = {}", self.spec.fock_dim());
        let _ = writeln!(s, "boson_levels = {}", list(&self.boson.levels));
        let _ = writeln!(s, "boson_populations = {}", list(&self.boson.populations));
        let _ = writeln!(s, "boson_phases = {}", list(&self.boson.phases));
        let _ = writeln!(s, "t_max = {:?}", self.t_max);
        let _ = writeln!(s, "dt = {:?}", self.dt);
        let _ = writeln!(s, "method = {:?}", enum_name(&self.propagation.method));
        let _ = writeln!(s, "tol = {:?}", self.propagation.tol);
        let _ = writeln!(s, "krylov_dim = {}", self.propagation.krylov_dim);
        let _ = writeln!(s, "leakage_warn = {:?}", self.leakage_warn);
        if let Some(sw) = &self.sweep {
            let _ = writeln!(s, "sweep_param = {:?}", sw.param.key());
            let _ = writeln!(s, "sweep_values = {}", list(&sw.values));
            let _ = writeln!(s, "sweep_reduction = {:?}", enum_name(&sw.reduction));
        }
        let _ = writeln!(s, "window_start = {:?}", self.window.0);
        let _ = writeln!(s, "window_end = {:?}", self.window.1);
        let _ = writeln!(s, "both_hopping_modes = {}", self.both_hopping_modes);
        let _ = writeln!(s, "workers = {}", self.workers);
        let _ = writeln!(s, "out_dir = {:?}", self.out_dir.display().to_string());
        s
    }
}

/// snake_case serde name of a unit enum variant.
fn enum_name<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => unreachable!("unit variants serialize as strings"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FIVE_ION_POSITIONS;

    #[test]
    fn empty_document_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c.model.omega_a, 1.0);
        assert_eq!(c.model.omega_c, 1.0);
        assert_eq!(c.model.lambda, 0.25);
        assert_eq!(c.model.j_hop, 0.2);
        assert_eq!(c.model.p_exp, 3.0);
        assert_eq!(c.model.positions, FIVE_ION_POSITIONS.to_vec());
        assert_eq!(c.spec.fock_dim(), 101);
        assert_eq!(c.spec.n_ions(), 5);
        let amps = c.boson.amplitudes();
        assert_eq!(amps.len(), 2);
        assert!((amps[&10].norm_sqr() - 0.6).abs() < 1e-15);
        assert!((amps[&15].norm_sqr() - 0.4).abs() < 1e-15);
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn negative_coupling_is_physical() {
        let c = parse_config("lambda = -0.1").unwrap();
        assert_eq!(c.model.lambda, -0.1);
    }

    #[test]
    fn negative_exponent_is_rejected() {
        let err = parse_config("p_exp = -1").unwrap_err();
        match err {
            Error::Config { key, message } => {
                assert_eq!(key, "p_exp");
                assert!(message.contains("non-negative"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_key() {
        for (doc, key) in [
            ("bogus = 1", "bogus"),
            ("lambda = \"big\"", "lambda"),
            ("fock_dim = 10.5", "fock_dim"),
            ("coupling_mode = \"sideways\"", "coupling_mode"),
            ("fock_dim = 12", "boson_levels"),
            ("boson_levels = [0]", "boson_populations"),
            ("dt = 0", "dt"),
            ("window_end = 50", "window_end"),
            ("sweep_values = [0.1]", "sweep_values"),
            ("sweep_param = \"lambda\"", "sweep_values"),
            ("positions = [0.0, 1.0, 1.0, 2.0, 3.0]", "positions"),
            ("workers = 0", "workers"),
        ] {
            match parse_config(doc) {
                Err(Error::Config { key: k, .. }) => assert_eq!(k, key, "{doc}"),
                other => panic!("{doc}: {other:?}"),
            }
        }
        assert!(matches!(parse_config("lambda = = 2"), Err(Error::ConfigSyntax(_))));
    }

    #[test]
    fn sweep_grid_from_range() {
        let c = parse_config(
            "sweep_param = \"lambda\"\nsweep_start = 0.05\nsweep_stop = 1.0\nsweep_step = 0.05\nj_hop = 0.3",
        )
        .unwrap();
        let s = c.sweep.unwrap();
        assert_eq!(s.values.len(), 20);
        assert_eq!(s.values[2], 0.15);
        assert_eq!(*s.values.last().unwrap(), 1.0);
        assert_eq!(s.reduction, Reduction::MaxOverWindow);
    }

    #[test]
    fn overrides_replace_keys() {
        let c = parse_config_with_overrides(
            "lambda = 0.1",
            &[
                "lambda=0.5".into(),
                "hopping_mode = excitation_conserving".into(),
                "positions=[-1.0, 1.0]".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.model.lambda, 0.5);
        assert_eq!(c.model.hopping_mode, HoppingMode::ExcitationConserving);
        assert_eq!(c.spec.n_ions(), 2);
        assert!(parse_config_with_overrides("", &["lambda".into()]).is_err());
    }

    #[test]
    fn document_round_trip() {
        let c = parse_config(
            "lambda = 0.37\nboson_levels = [3, 4]\nboson_populations = [0.25, 0.75]\nboson_phases = [0.0, 1.5]\n\
             sweep_param = \"j_hop\"\nsweep_values = [0.1, 0.7]\nmethod = \"krylov\"\ntol = 1e-9\nout_dir = \"x/y\"",
        )
        .unwrap();
        let back = parse_config(&c.to_document()).unwrap();
        assert_eq!(back, c);
        let d = RunConfig::default();
        assert_eq!(parse_config(&d.to_document()).unwrap(), d);
    }

    #[test]
    fn every_documented_key_is_accepted() {
        let doc = RunConfig::default().to_document();
        for line in doc.lines() {
            let key = line.split('=').next().unwrap().trim();
            assert!(KEYS.iter().any(|(k, _)| *k == key), "{key} undocumented");
        }
    }
}
