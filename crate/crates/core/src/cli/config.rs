//! `key=value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::models::{Averaging, LkParams, PhaseSign, RunSettings};
use crate::spectral::{SearchWindow, SpectralParams, SweepVariant};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: cannot parse `{value}` ({expected})")]
    BadValue { key: String, value: String, expected: &'static str },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("no mode given; use --mode or `mode=` in the config")]
    MissingMode,
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Eigen,
    Dome,
    SweepEigen,
    Simulate,
    SweepLk,
    Sow,
    Fig3,
}

impl Mode {
    pub const ALL: [Mode; 7] = [
        Mode::Eigen,
        Mode::Dome,
        Mode::SweepEigen,
        Mode::Simulate,
        Mode::SweepLk,
        Mode::Sow,
        Mode::Fig3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Eigen => "eigen",
            Mode::Dome => "dome",
            Mode::SweepEigen => "sweep-eigen",
            Mode::Simulate => "simulate",
            Mode::SweepLk => "sweep-lk",
            Mode::Sow => "sow",
            Mode::Fig3 => "fig3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s.trim())
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimModel {
    Lk,
    Minimal,
}

/// Where a value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Default,
    /// Default that differs for the selected mode.
    ModeDefault,
    File(usize),
    Set,
    Flag,
}

impl Source {
    pub fn is_user(&self) -> bool {
        matches!(self, Source::File(_) | Source::Set | Source::Flag)
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Default => f.write_str("default"),
            Source::ModeDefault => f.write_str("mode default"),
            Source::File(l) => write!(f, "config line {l}"),
            Source::Set => f.write_str("--set"),
            Source::Flag => f.write_str("flag"),
        }
    }
}

/// Every recognised key, in echo order.
pub const KEYS: &[&str] = &[
    "mode",
    "kappa",
    "tau",
    "delta_omega",
    "variant",
    "omega_fixed",
    "phase_sign",
    "dw_min",
    "dw_max",
    "dw_step",
    "u_min",
    "u_max",
    "v_min",
    "v_max",
    "seed_spacing",
    "n_max",
    "model",
    "alpha",
    "gain",
    "tau_in",
    "tau_p",
    "tau_s",
    "pump_ratio",
    "pump1",
    "pump2",
    "n_th",
    "h",
    "t_end",
    "transient",
    "retained",
    "window",
    "averaging",
    "max_seed_time",
    "fig3_tau_min",
    "fig3_tau_max",
    "fig3_tau_count",
    "fig3_kappas",
    "fig3_points_per_period",
    "fig3_sidebands",
    "fig3_min_reach",
    "fig3_spot_h",
    "fig3_spot_kappa",
    "fig3_spot_tau",
    "fig3_spot_variant",
    "out",
    "seed",
    "workers",
];

/// Effective configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub kappa: f64,
    pub tau: f64,
    pub delta_omega: f64,
    pub variant: SweepVariant,
    pub omega_fixed: f64,
    pub phase_sign: PhaseSign,
    pub dw_min: f64,
    pub dw_max: f64,
    pub dw_step: f64,
    pub u_min: Option<f64>,
    pub u_max: Option<f64>,
    pub v_min: Option<f64>,
    pub v_max: Option<f64>,
    pub seed_spacing: Option<f64>,
    /// Largest even index in transition tables.
    pub n_max: u32,
    pub model: SimModel,
    pub alpha: f64,
    pub gain: f64,
    pub tau_in: f64,
    pub tau_p: f64,
    pub tau_s: f64,
    pub pump_ratio: f64,
    pub pump1: Option<f64>,
    pub pump2: Option<f64>,
    pub n_th: Option<f64>,
    pub h: f64,
    pub t_end: f64,
    pub transient: f64,
    pub retained: f64,
    pub window: f64,
    pub averaging: Averaging,
    pub max_seed_time: f64,
    pub fig3_tau_min: f64,
    pub fig3_tau_max: f64,
    pub fig3_tau_count: usize,
    pub fig3_kappas: Vec<f64>,
    pub fig3_points_per_period: f64,
    pub fig3_sidebands: f64,
    pub fig3_min_reach: f64,
    pub fig3_spot_h: f64,
    pub fig3_spot_kappa: f64,
    pub fig3_spot_tau: f64,
    pub fig3_spot_variant: SweepVariant,
    pub out: PathBuf,
    pub seed: u64,
    pub workers: usize,
    provenance: BTreeMap<&'static str, Source>,
}

fn num(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.trim().parse::<f64>().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        value: v.into(),
        expected: "a number",
    })
}

fn opt_num(key: &str, v: &str) -> Result<Option<f64>, ConfigError> {
    match v.trim() {
        "auto" | "" => Ok(None),
        s => num(key, s).map(Some),
    }
}

fn uint<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.trim().parse::<T>().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        value: v.into(),
        expected: "a non-negative integer",
    })
}

fn show_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "auto".to_string(), |x| x.to_string())
}

impl RunConfig {
    /// Defaults for `mode`. `fig3` runs at `h = 1e-3` with 5 ns Hann windows.
    pub fn defaults(mode: Mode) -> Self {
        let lk = LkParams::default();
        let run = RunSettings::default();
        let mut c = Self {
            mode,
            kappa: 1.0,
            tau: 1.0,
            delta_omega: 0.0,
            variant: SweepVariant::SymmetricLTau,
            omega_fixed: 0.0,
            phase_sign: PhaseSign::Plus,
            dw_min: 0.0,
            dw_max: 40.0,
            dw_step: 0.05,
            u_min: None,
            u_max: None,
            v_min: None,
            v_max: None,
            seed_spacing: None,
            n_max: 12,
            model: SimModel::Lk,
            alpha: lk.alpha,
            gain: lk.gain,
            tau_in: lk.tau_in,
            tau_p: lk.tau_p,
            tau_s: lk.tau_s,
            pump_ratio: 1.03,
            pump1: None,
            pump2: None,
            n_th: None,
            h: run.h,
            t_end: 20.0,
            transient: run.transient,
            retained: run.retained,
            window: run.window,
            averaging: run.averaging,
            max_seed_time: run.max_seed_time,
            fig3_tau_min: 0.6,
            fig3_tau_max: 2.5,
            fig3_tau_count: 8,
            fig3_kappas: vec![0.4, 2.0],
            fig3_points_per_period: 12.0,
            fig3_sidebands: 50.0,
            fig3_min_reach: 90.0,
            fig3_spot_h: 1e-4,
            fig3_spot_kappa: 2.0,
            fig3_spot_tau: 0.6,
            fig3_spot_variant: SweepVariant::SymmetricLTau,
            out: PathBuf::from("out"),
            seed: 0,
            workers: 0,
            provenance: KEYS.iter().map(|k| (*k, Source::Default)).collect(),
        };
        c.provenance.insert("mode", Source::Flag);
        if mode == Mode::Fig3 {
            c.h = 1e-3;
            c.window = 5.0;
            c.averaging = Averaging::Hann;
            for k in ["h", "window", "averaging"] {
                c.provenance.insert(k, Source::ModeDefault);
            }
        }
        c
    }

    pub fn source(&self, key: &str) -> Option<&Source> {
        self.provenance.get(key)
    }

    /// Applies one `key=value` pair.
    pub fn set(&mut self, key: &str, value: &str, source: Source) -> Result<(), ConfigError> {
        let key = key.trim();
        let v = value.trim();
        let k = *KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| ConfigError::UnknownKey(key.to_string()))?;
        match k {
            "mode" => {
                let m = Mode::parse(v).ok_or_else(|| ConfigError::BadValue {
                    key: k.into(),
                    value: v.into(),
                    expected: "one of eigen, dome, sweep-eigen, simulate, sweep-lk, sow, fig3",
                })?;
                if m != self.mode {
                    return Err(ConfigError::Invalid(format!(
                        "mode `{m}` conflicts with already selected mode `{}`",
                        self.mode
                    )));
                }
            }
            "kappa" => self.kappa = num(k, v)?,
            "tau" => self.tau = num(k, v)?,
            "delta_omega" => self.delta_omega = num(k, v)?,
            "variant" => self.variant = parse_variant(k, v)?,
            "omega_fixed" => self.omega_fixed = num(k, v)?,
            "phase_sign" => {
                self.phase_sign = PhaseSign::from_value(num(k, v)?).ok_or_else(|| ConfigError::BadValue {
                    key: k.into(),
                    value: v.into(),
                    expected: "+1 or -1",
                })?
            }
            "dw_min" => self.dw_min = num(k, v)?,
            "dw_max" => self.dw_max = num(k, v)?,
            "dw_step" => self.dw_step = num(k, v)?,
            "u_min" => self.u_min = opt_num(k, v)?,
            "u_max" => self.u_max = opt_num(k, v)?,
            "v_min" => self.v_min = opt_num(k, v)?,
            "v_max" => self.v_max = opt_num(k, v)?,
            "seed_spacing" => self.seed_spacing = opt_num(k, v)?,
            "n_max" => self.n_max = uint(k, v)?,
            "model" => {
                self.model = match v {
                    "lk" => SimModel::Lk,
                    "minimal" => SimModel::Minimal,
                    _ => {
                        return Err(ConfigError::BadValue {
                            key: k.into(),
                            value: v.into(),
                            expected: "lk or minimal",
                        })
                    }
                }
            }
            "alpha" => self.alpha = num(k, v)?,
            "gain" => self.gain = num(k, v)?,
            "tau_in" => self.tau_in = num(k, v)?,
            "tau_p" => self.tau_p = num(k, v)?,
            "tau_s" => self.tau_s = num(k, v)?,
            "pump_ratio" => self.pump_ratio = num(k, v)?,
            "pump1" => self.pump1 = opt_num(k, v)?,
            "pump2" => self.pump2 = opt_num(k, v)?,
            "n_th" => self.n_th = opt_num(k, v)?,
            "h" => self.h = num(k, v)?,
            "t_end" => self.t_end = num(k, v)?,
            "transient" => self.transient = num(k, v)?,
            "retained" => self.retained = num(k, v)?,
            "window" => self.window = num(k, v)?,
            "averaging" => {
                self.averaging = Averaging::parse(v).ok_or_else(|| ConfigError::BadValue {
                    key: k.into(),
                    value: v.into(),
                    expected: "boxcar or hann",
                })?
            }
            "max_seed_time" => self.max_seed_time = num(k, v)?,
            "fig3_tau_min" => self.fig3_tau_min = num(k, v)?,
            "fig3_tau_max" => self.fig3_tau_max = num(k, v)?,
            "fig3_tau_count" => self.fig3_tau_count = uint(k, v)?,
            "fig3_kappas" => {
                self.fig3_kappas = v
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| num(k, s))
                    .collect::<Result<_, _>>()?
            }
            "fig3_points_per_period" => self.fig3_points_per_period = num(k, v)?,
            "fig3_sidebands" => self.fig3_sidebands = num(k, v)?,
            "fig3_min_reach" => self.fig3_min_reach = num(k, v)?,
            "fig3_spot_h" => self.fig3_spot_h = num(k, v)?,
            "fig3_spot_kappa" => self.fig3_spot_kappa = num(k, v)?,
            "fig3_spot_tau" => self.fig3_spot_tau = num(k, v)?,
            "fig3_spot_variant" => self.fig3_spot_variant = parse_variant(k, v)?,
            "out" => self.out = PathBuf::from(v),
            "seed" => self.seed = uint(k, v)?,
            "workers" => self.workers = uint(k, v)?,
            _ => unreachable!("key list and setter out of sync: {k}"),
        }
        self.provenance.insert(k, source);
        Ok(())
    }

    /// Current value of `key` as it would be written in a config file.
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "mode" => self.mode.to_string(),
            "kappa" => self.kappa.to_string(),
            "tau" => self.tau.to_string(),
            "delta_omega" => self.delta_omega.to_string(),
            "variant" => self.variant.to_string(),
            "omega_fixed" => self.omega_fixed.to_string(),
            "phase_sign" => self.phase_sign.value().to_string(),
            "dw_min" => self.dw_min.to_string(),
            "dw_max" => self.dw_max.to_string(),
            "dw_step" => self.dw_step.to_string(),
            "u_min" => show_opt(self.u_min),
            "u_max" => show_opt(self.u_max),
            "v_min" => show_opt(self.v_min),
            "v_max" => show_opt(self.v_max),
            "seed_spacing" => show_opt(self.seed_spacing),
            "n_max" => self.n_max.to_string(),
            "model" => match self.model {
                SimModel::Lk => "lk".into(),
                SimModel::Minimal => "minimal".into(),
            },
            "alpha" => self.alpha.to_string(),
            "gain" => self.gain.to_string(),
            "tau_in" => self.tau_in.to_string(),
            "tau_p" => self.tau_p.to_string(),
            "tau_s" => self.tau_s.to_string(),
            "pump_ratio" => self.pump_ratio.to_string(),
            "pump1" => show_opt(self.pump1),
            "pump2" => show_opt(self.pump2),
            "n_th" => show_opt(self.n_th),
            "h" => self.h.to_string(),
            "t_end" => self.t_end.to_string(),
            "transient" => self.transient.to_string(),
            "retained" => self.retained.to_string(),
            "window" => self.window.to_string(),
            "averaging" => self.averaging.name().to_string(),
            "max_seed_time" => self.max_seed_time.to_string(),
            "fig3_tau_min" => self.fig3_tau_min.to_string(),
            "fig3_tau_max" => self.fig3_tau_max.to_string(),
            "fig3_tau_count" => self.fig3_tau_count.to_string(),
            "fig3_kappas" => self
                .fig3_kappas
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(","),
            "fig3_points_per_period" => self.fig3_points_per_period.to_string(),
            "fig3_sidebands" => self.fig3_sidebands.to_string(),
            "fig3_min_reach" => self.fig3_min_reach.to_string(),
            "fig3_spot_h" => self.fig3_spot_h.to_string(),
            "fig3_spot_kappa" => self.fig3_spot_kappa.to_string(),
            "fig3_spot_tau" => self.fig3_spot_tau.to_string(),
            "fig3_spot_variant" => self.fig3_spot_variant.to_string(),
            "out" => self.out.display().to_string(),
            "seed" => self.seed.to_string(),
            "workers" => self.workers.to_string(),
            _ => return None,
        })
    }

    /// `(key, value)` for every key, for CSV metadata.
    pub fn echo(&self) -> Vec<(String, String)> {
        KEYS.iter()
            .map(|k| (k.to_string(), self.get(k).unwrap_or_default()))
            .collect()
    }

    /// Logs every value with where it came from.
    pub fn log_provenance(&self) {
        for k in KEYS {
            let src = self.provenance.get(k).cloned().unwrap_or(Source::Default);
            let v = self.get(k).unwrap_or_default();
            if src.is_user() {
                log::info!("{k} = {v} ({src})");
            } else {
                log::info!("{k} = {v} ({src}, not set by user)");
            }
        }
    }

    pub fn spectral(&self) -> SpectralParams {
        SpectralParams {
            delta_omega: self.delta_omega,
            kappa: self.kappa,
            tau: self.tau,
            variant: self.variant,
            omega_fixed: self.omega_fixed,
        }
    }

    /// The default window for `p` with any user bounds substituted.
    pub fn window_for(&self, p: &SpectralParams) -> SearchWindow {
        let mut w = SearchWindow::default_for(p);
        if let Some(v) = self.u_min {
            w.u_min = v;
        }
        if let Some(v) = self.u_max {
            w.u_max = v;
        }
        if let Some(v) = self.v_min {
            w.v_min = v;
        }
        if let Some(v) = self.v_max {
            w.v_max = v;
        }
        if let Some(v) = self.seed_spacing {
            w.seed_spacing = v;
        }
        w
    }

    /// LK parameters for coupling `kappa` and delay `tau`, with the
    /// configured laser overrides. `κ = 𝒦/τ_in` holds by construction.
    pub fn lk_params(&self, kappa: f64, tau: f64, variant: SweepVariant) -> LkParams {
        let n_th = self
            .n_th
            .unwrap_or(self.tau_s / ((self.pump_ratio - 1.0) * self.tau_p));
        let pump = self.pump_ratio * n_th / self.tau_s;
        LkParams {
            alpha: self.alpha,
            gain: self.gain,
            feedback: kappa * self.tau_in,
            tau_in: self.tau_in,
            tau_p: self.tau_p,
            tau_s: self.tau_s,
            pump1: self.pump1.unwrap_or(pump),
            pump2: self.pump2.unwrap_or(pump),
            n_th,
            delta_omega: self.delta_omega,
            tau,
            variant,
            omega_fixed: self.omega_fixed,
            phase_sign: self.phase_sign,
        }
    }

    pub fn run_settings(&self) -> RunSettings {
        RunSettings {
            h: self.h,
            transient: self.transient,
            retained: self.retained,
            window: self.window,
            averaging: self.averaging,
            seed: self.seed,
            max_seed_time: self.max_seed_time,
        }
    }

    /// `dw_min, dw_min + dw_step, …` up to `dw_max` inclusive.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.dw_max - self.dw_min) / self.dw_step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.dw_min + i as f64 * self.dw_step).collect()
    }

    /// Checks every physical and numerical invariant up front.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        let sp = self.spectral();
        sp.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if matches!(self.mode, Mode::Eigen) {
            self.window_for(&sp)
                .validate(self.tau)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        if matches!(self.mode, Mode::Dome | Mode::SweepEigen | Mode::SweepLk | Mode::Sow) {
            if !(self.dw_step > 0.0 && self.dw_step.is_finite()) {
                return bad(format!("dw_step must be positive, got {}", self.dw_step));
            }
            if !(self.dw_max > self.dw_min) {
                return bad(format!("dw_max ({}) must exceed dw_min ({})", self.dw_max, self.dw_min));
            }
        }
        if matches!(self.mode, Mode::Simulate | Mode::SweepLk | Mode::Sow | Mode::Fig3) {
            if !(self.pump_ratio > 1.0) && self.n_th.is_none() {
                return bad(format!(
                    "pump_ratio must exceed 1 when n_th is automatic, got {}",
                    self.pump_ratio
                ));
            }
            self.lk_params(self.kappa, self.tau, self.variant)
                .validate()
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
            self.run_settings()
                .validate()
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
            if self.tau > 0.0 && self.h > self.tau / 4.0 && self.mode != Mode::Fig3 {
                return bad(format!("h = {} exceeds tau/4 = {}", self.h, self.tau / 4.0));
            }
        }
        if self.mode == Mode::Simulate && !(self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if self.mode == Mode::Fig3 {
            if !(self.fig3_tau_min > 0.0 && self.fig3_tau_max >= self.fig3_tau_min) {
                return bad("fig3 needs 0 < fig3_tau_min <= fig3_tau_max".into());
            }
            if self.fig3_tau_count == 0 || self.fig3_kappas.is_empty() {
                return bad("fig3 needs at least one tau and one kappa".into());
            }
            if self.fig3_kappas.iter().any(|k| !(*k >= 0.0 && k.is_finite())) {
                return bad("fig3_kappas must be finite and >= 0".into());
            }
            if self.h > self.fig3_tau_min / 4.0 {
                return bad(format!("h = {} exceeds fig3_tau_min/4", self.h));
            }
            if !(self.fig3_points_per_period >= 4.0) {
                return bad("fig3_points_per_period must be at least 4".into());
            }
            if self.fig3_spot_h < 0.0 || (self.fig3_spot_h > 0.0 && self.fig3_spot_h > self.fig3_spot_tau / 4.0) {
                return bad("fig3_spot_h must be 0 (off) or a valid step for fig3_spot_tau".into());
            }
        }
        Ok(())
    }
}

fn parse_variant(key: &str, v: &str) -> Result<SweepVariant, ConfigError> {
    SweepVariant::parse(v).ok_or_else(|| ConfigError::BadValue {
        key: key.into(),
        value: v.into(),
        expected: "symmetric or fixed",
    })
}

/// Splits config text into `(line, key, value)` triples. Blank lines and
/// `#` comments are skipped; several pairs may share a line.
pub fn parse_pairs(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        for tok in line.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: i + 1,
                message: format!("expected key=value, got `{tok}`"),
            })?;
            if k.is_empty() {
                return Err(ConfigError::Parse { line: i + 1, message: "empty key".into() });
            }
            out.push((i + 1, k.to_string(), v.to_string()));
        }
    }
    Ok(out)
}

/// Builds a configuration from file text, `--set` pairs and flag values,
/// applied in that order. `mode_flag` wins over `mode=` in the file.
pub fn parse_config(
    text: &str,
    mode_flag: Option<&str>,
    sets: &[String],
    flags: &[(&str, String)],
) -> Result<RunConfig, ConfigError> {
    let pairs = parse_pairs(text)?;
    let mut set_pairs = Vec::new();
    for s in sets {
        let (k, v) = s.split_once('=').ok_or_else(|| ConfigError::Parse {
            line: 0,
            message: format!("--set expects key=value, got `{s}`"),
        })?;
        set_pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    let mode_text = mode_flag
        .map(str::to_string)
        .or_else(|| set_pairs.iter().rev().find(|(k, _)| k == "mode").map(|(_, v)| v.clone()))
        .or_else(|| pairs.iter().rev().find(|(_, k, _)| k == "mode").map(|(_, _, v)| v.clone()))
        .ok_or(ConfigError::MissingMode)?;
    let mode = Mode::parse(&mode_text).ok_or_else(|| ConfigError::BadValue {
        key: "mode".into(),
        value: mode_text.clone(),
        expected: "one of eigen, dome, sweep-eigen, simulate, sweep-lk, sow, fig3",
    })?;
    let mut cfg = RunConfig::defaults(mode);
    for (line, k, v) in &pairs {
        if k == "mode" {
            // Already resolved; only check it parses.
            if Mode::parse(v).is_none() {
                return Err(ConfigError::Parse { line: *line, message: format!("unknown mode `{v}`") });
            }
            continue;
        }
        cfg.set(k, v, Source::File(*line)).map_err(|e| match e {
            ConfigError::UnknownKey(k) => ConfigError::Parse { line: *line, message: format!("unknown key `{k}`") },
            ConfigError::BadValue { key, value, expected } => ConfigError::Parse {
                line: *line,
                message: format!("key `{key}`: cannot parse `{value}` ({expected})"),
            },
            other => other,
        })?;
    }
    for (k, v) in &set_pairs {
        if k != "mode" {
            cfg.set(k, v, Source::Set)?;
        }
    }
    for (k, v) in flags {
        cfg.set(k, v, Source::Flag)?;
    }
    cfg.validate()?;
    Ok(cfg)
}
