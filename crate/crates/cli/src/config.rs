//! Flat `section.key = value` experiment configuration.
//!
//! ```text
//! # the two-level model with its default schedule
//! model.name = hadamard
//! model.J = pi/4
//! schedule.T = 36
//! schedule.dt = 1/24
//! ```
//!
//! Numbers accept decimal literals, `pi`, and products or quotients of
//! those (`-pi/4`, `2*pi`, `1/24`). `model.term` may repeat; every other key
//! may appear once.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use vacuum_core::{EvolutionMode, PauliSum, Schedule};

use crate::error::ConfigError;

#[derive(Clone, Debug, PartialEq)]
pub enum ModelName {
    /// `−J(Z + X)/√2` on one qubit.
    Hadamard,
    /// `−J Σ Z` on `model.qubits` qubits.
    Initial,
    /// `−J(Z0 Z1 + g(X0 + X1))`.
    Tfim2,
    /// Open transverse-field Ising chain on `model.qubits` qubits.
    Tfim,
    /// Terms from `model.term` lines or `model.file`.
    Custom,
}

impl ModelName {
    fn as_str(&self) -> &'static str {
        match self {
            ModelName::Hadamard => "hadamard",
            ModelName::Initial => "initial",
            ModelName::Tfim2 => "tfim2",
            ModelName::Tfim => "tfim",
            ModelName::Custom => "custom",
        }
    }
}

impl FromStr for ModelName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "hadamard" => ModelName::Hadamard,
            "initial" => ModelName::Initial,
            "tfim2" => ModelName::Tfim2,
            "tfim" => ModelName::Tfim,
            "custom" => ModelName::Custom,
            _ => return Err(format!("unknown model {s:?} (expected hadamard, initial, tfim2, tfim or custom)")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartState {
    /// Sweep from `|0…0⟩`.
    Adiabatic,
    /// Skip the sweep and hold from the exact ground state.
    ExactGround,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaMode {
    Auto,
    Fixed,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    Shots,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub name: ModelName,
    pub j: f64,
    pub g: f64,
    pub qubits: usize,
    pub terms: Vec<String>,
    pub file: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleConfig {
    pub total_time: f64,
    pub dt: f64,
    pub hold_time: f64,
    pub start: StartState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterSettings {
    pub ancillas: usize,
    pub theta_mode: ThetaMode,
    pub theta: Option<f64>,
    pub powers: Option<Vec<u64>>,
    pub discard: bool,
    pub max_iters: usize,
    pub target_infidelity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimationConfig {
    pub method: Method,
    pub shots: u64,
    pub seed: u64,
    /// System qubit whose `Z` is tracked in trajectories.
    pub z_qubit: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub schedule: ScheduleConfig,
    pub mode: EvolutionMode,
    pub filter: FilterSettings,
    pub estimation: EstimationConfig,
    pub output_prefix: String,
    pub state_file: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig {
                name: ModelName::Hadamard,
                j: std::f64::consts::FRAC_PI_4,
                g: 1.0,
                qubits: 1,
                terms: Vec::new(),
                file: None,
            },
            schedule: ScheduleConfig {
                total_time: 36.0,
                dt: 1.0 / 24.0,
                hold_time: 12.0,
                start: StartState::Adiabatic,
            },
            mode: EvolutionMode::Trotter1,
            filter: FilterSettings {
                ancillas: 2,
                theta_mode: ThetaMode::Auto,
                theta: None,
                powers: None,
                discard: false,
                max_iters: 5,
                target_infidelity: 1e-4,
            },
            estimation: EstimationConfig {
                method: Method::Exact,
                shots: 1_000_000,
                seed: 0,
                z_qubit: 0,
            },
            output_prefix: "vacuum_refine".into(),
            state_file: None,
        }
    }
}

/// Evaluates `[sign] atom ((*|/) atom)*` with `atom` a decimal or `pi`.
pub fn parse_number(text: &str) -> Result<f64, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty number".into());
    }
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    let mut value = sign;
    let mut op = '*';
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let atom = rest[..end].trim();
        let x = match atom {
            "pi" | "π" => std::f64::consts::PI,
            _ => atom.parse::<f64>().map_err(|_| format!("invalid number {text:?}"))?,
        };
        value = if op == '*' { value * x } else { value / x };
        if end == rest.len() {
            break;
        }
        op = rest[end..].chars().next().unwrap();
        rest = &rest[end + 1..];
    }
    if !value.is_finite() {
        return Err(format!("{text:?} is not finite"));
    }
    Ok(value)
}

fn parse_bool(text: &str) -> Result<bool, String> {
    match text {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got {text:?}")),
    }
}

fn parse_int<N: FromStr>(text: &str) -> Result<N, String> {
    text.parse().map_err(|_| format!("expected a non-negative integer, got {text:?}"))
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("--config", format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        // Relative paths inside a config resolve against its directory.
        let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let base = std::path::absolute(base)
            .map_err(|e| ConfigError::new("--config", e.to_string()))?;
        for p in [&mut cfg.model.file, &mut cfg.state_file].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::at(line_no, "", format!("expected `key = value`, got {line:?}")));
            };
            let (key, value) = (key.trim(), value.trim());
            if key != "model.term" {
                if seen.iter().any(|k| k == key) {
                    return Err(ConfigError::at(line_no, key, "duplicate key"));
                }
                seen.push(key.to_string());
            }
            cfg.set(key, value).map_err(|msg| ConfigError::at(line_no, key, msg))?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "model.name" => self.model.name = value.parse()?,
            "model.J" => self.model.j = parse_number(value)?,
            "model.g" => self.model.g = parse_number(value)?,
            "model.qubits" => self.model.qubits = parse_int(value)?,
            "model.term" => {
                PauliSum::<f64>::parse_text(value).map_err(|e| e.to_string())?;
                self.model.terms.push(value.to_string());
            }
            "model.file" => self.model.file = Some(PathBuf::from(value)),
            "schedule.T" => self.schedule.total_time = parse_number(value)?,
            "schedule.dt" => self.schedule.dt = parse_number(value)?,
            "schedule.hold_time" => self.schedule.hold_time = parse_number(value)?,
            "schedule.start" => {
                self.schedule.start = match value {
                    "adiabatic" => StartState::Adiabatic,
                    "exact_ground" => StartState::ExactGround,
                    _ => return Err(format!("expected adiabatic or exact_ground, got {value:?}")),
                }
            }
            "evolution.mode" => self.mode = value.parse().map_err(|e: vacuum_core::Error| e.to_string())?,
            "filter.ancillas" => self.filter.ancillas = parse_int(value)?,
            "filter.theta_mode" => {
                self.filter.theta_mode = match value {
                    "auto" => ThetaMode::Auto,
                    "fixed" => ThetaMode::Fixed,
                    "oracle" => ThetaMode::Oracle,
                    _ => return Err(format!("expected auto, fixed or oracle, got {value:?}")),
                }
            }
            "filter.theta" => self.filter.theta = Some(parse_number(value)?),
            "filter.powers" => {
                let powers = value
                    .split(',')
                    .map(|p| parse_int::<u64>(p.trim()))
                    .collect::<Result<Vec<_>, _>>()?;
                self.filter.powers = Some(powers);
            }
            "filter.discard" => self.filter.discard = parse_bool(value)?,
            "filter.max_iters" => self.filter.max_iters = parse_int(value)?,
            "filter.target_infidelity" => self.filter.target_infidelity = parse_number(value)?,
            "estimation.method" => {
                self.estimation.method = match value {
                    "exact" => Method::Exact,
                    "shots" => Method::Shots,
                    _ => return Err(format!("expected exact or shots, got {value:?}")),
                }
            }
            "estimation.shots" => self.estimation.shots = parse_int(value)?,
            "estimation.seed" => self.estimation.seed = parse_int(value)?,
            "estimation.z_qubit" => self.estimation.z_qubit = parse_int(value)?,
            "output.prefix" => self.output_prefix = value.to_string(),
            "diag.state_file" => self.state_file = Some(PathBuf::from(value)),
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Canonical text form; `parse(to_text())` reproduces `self` exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("model.name", self.model.name.as_str().into());
        kv("model.J", format!("{:?}", self.model.j));
        kv("model.g", format!("{:?}", self.model.g));
        kv("model.qubits", self.model.qubits.to_string());
        for t in &self.model.terms {
            kv("model.term", t.clone());
        }
        if let Some(f) = &self.model.file {
            kv("model.file", f.display().to_string());
        }
        kv("schedule.T", format!("{:?}", self.schedule.total_time));
        kv("schedule.dt", format!("{:?}", self.schedule.dt));
        kv("schedule.hold_time", format!("{:?}", self.schedule.hold_time));
        kv(
            "schedule.start",
            match self.schedule.start {
                StartState::Adiabatic => "adiabatic",
                StartState::ExactGround => "exact_ground",
            }
            .into(),
        );
        kv("evolution.mode", self.mode.to_string());
        kv("filter.ancillas", self.filter.ancillas.to_string());
        kv(
            "filter.theta_mode",
            match self.filter.theta_mode {
                ThetaMode::Auto => "auto",
                ThetaMode::Fixed => "fixed",
                ThetaMode::Oracle => "oracle",
            }
            .into(),
        );
        if let Some(t) = self.filter.theta {
            kv("filter.theta", format!("{t:?}"));
        }
        if let Some(p) = &self.filter.powers {
            kv("filter.powers", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
        }
        kv("filter.discard", self.filter.discard.to_string());
        kv("filter.max_iters", self.filter.max_iters.to_string());
        kv("filter.target_infidelity", format!("{:?}", self.filter.target_infidelity));
        kv(
            "estimation.method",
            match self.estimation.method {
                Method::Exact => "exact",
                Method::Shots => "shots",
            }
            .into(),
        );
        kv("estimation.shots", self.estimation.shots.to_string());
        kv("estimation.seed", self.estimation.seed.to_string());
        kv("estimation.z_qubit", self.estimation.z_qubit.to_string());
        kv("output.prefix", self.output_prefix.clone());
        if let Some(f) = &self.state_file {
            kv("diag.state_file", f.display().to_string());
        }
        out
    }

    /// Builds the target Hamiltonian.
    pub fn hamiltonian(&self) -> Result<PauliSum, ConfigError> {
        let m = &self.model;
        let field = |e: vacuum_core::Error| ConfigError::new("model", e.to_string());
        if !(m.j.is_finite() && m.j != 0.0) {
            return Err(ConfigError::new("model.J", "must be finite and nonzero"));
        }
        let custom_given = !m.terms.is_empty() || m.file.is_some();
        if custom_given && m.name != ModelName::Custom {
            return Err(ConfigError::new("model.term", "explicit terms need model.name = custom"));
        }
        match m.name {
            ModelName::Hadamard => {
                if m.qubits != 1 {
                    return Err(ConfigError::new("model.qubits", "the hadamard model has one qubit"));
                }
                vacuum_core::hadamard_hamiltonian(m.j).map_err(field)
            }
            ModelName::Initial => {
                check_qubits(m.qubits)?;
                vacuum_core::initial_hamiltonian(m.j, m.qubits).map_err(field)
            }
            ModelName::Tfim2 => {
                if m.qubits != 1 && m.qubits != 2 {
                    return Err(ConfigError::new("model.qubits", "tfim2 has two qubits"));
                }
                vacuum_core::transverse_field_ising(m.j, m.g, 2).map_err(field)
            }
            ModelName::Tfim => {
                check_qubits(m.qubits)?;
                if m.qubits < 2 {
                    return Err(ConfigError::new("model.qubits", "tfim needs at least two qubits"));
                }
                vacuum_core::transverse_field_ising(m.j, m.g, m.qubits).map_err(field)
            }
            ModelName::Custom => self.custom_hamiltonian(),
        }
    }

    fn custom_hamiltonian(&self) -> Result<PauliSum, ConfigError> {
        let m = &self.model;
        let (text, key) = match (&m.file, m.terms.is_empty()) {
            (Some(_), false) => return Err(ConfigError::new("model.file", "give either model.file or model.term")),
            (Some(path), true) => (
                std::fs::read_to_string(path)
                    .map_err(|e| ConfigError::new("model.file", format!("cannot read {}: {e}", path.display())))?,
                "model.file",
            ),
            (None, false) => (m.terms.join("\n"), "model.term"),
            (None, true) => return Err(ConfigError::new("model.term", "custom model has no terms")),
        };
        let h = PauliSum::parse_text(&text).map_err(|e| match e {
            vacuum_core::Error::Parse { line, message } => ConfigError::at(line, key, message),
            other => ConfigError::new(key, other.to_string()),
        })?;
        check_qubits(h.num_qubits())?;
        Ok(h)
    }

    pub fn schedule(&self) -> Result<Schedule, ConfigError> {
        let s = &self.schedule;
        Schedule::new(s.total_time, s.dt, s.hold_time).map_err(|e| ConfigError::new("schedule", e.to_string()))
    }

    /// Cross-field checks shared by every command.
    pub fn validate(&self) -> Result<(PauliSum, Schedule), ConfigError> {
        let h = self.hamiltonian()?;
        let schedule = self.schedule()?;
        if self.estimation.z_qubit >= h.num_qubits() {
            return Err(ConfigError::new(
                "estimation.z_qubit",
                format!("qubit {} outside a {}-qubit model", self.estimation.z_qubit, h.num_qubits()),
            ));
        }
        if self.estimation.method == Method::Shots && self.estimation.shots == 0 {
            return Err(ConfigError::new("estimation.shots", "must be positive in shot mode"));
        }
        let f = &self.filter;
        if f.ancillas == 0 || f.ancillas > 8 {
            return Err(ConfigError::new("filter.ancillas", "must be in 1..=8"));
        }
        if let Some(p) = &f.powers {
            if p.len() != f.ancillas {
                return Err(ConfigError::new(
                    "filter.powers",
                    format!("{} powers for {} ancillas", p.len(), f.ancillas),
                ));
            }
            if p.contains(&0) {
                return Err(ConfigError::new("filter.powers", "powers must be positive"));
            }
        }
        if f.theta_mode == ThetaMode::Fixed && f.theta.is_none() {
            return Err(ConfigError::new("filter.theta", "required when filter.theta_mode = fixed"));
        }
        if f.max_iters == 0 {
            return Err(ConfigError::new("filter.max_iters", "must be at least 1"));
        }
        if !(f.target_infidelity >= 0.0) {
            return Err(ConfigError::new("filter.target_infidelity", "must be non-negative"));
        }
        if self.output_prefix.is_empty() {
            return Err(ConfigError::new("output.prefix", "must not be empty"));
        }
        Ok((h, schedule))
    }
}

/// Largest register a config may ask for; dense paths stop earlier with a
/// resource error.
pub const MAX_QUBITS: usize = 20;

fn check_qubits(n: usize) -> Result<(), ConfigError> {
    if n == 0 || n > MAX_QUBITS {
        return Err(ConfigError::new("model.qubits", format!("must be in 1..={MAX_QUBITS}")));
    }
    Ok(())
}
