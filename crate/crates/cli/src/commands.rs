//! The four subcommands. Each returns a report struct (used directly by
//! tests) and writes its CSV/text output plus a manifest under the
//! configured prefix.
//!
//! Shot-mode seeds: CSV row `r` samples its system `Z` with
//! `derive_seed(seed, 2r)` and, when present, the ancilla `Z` with
//! `derive_seed(seed, 2r + 1)`. The discard-mode survivor count uses
//! `derive_seed(seed, u64::MAX)`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use vacuum_core::adiabatic::hold_with;
use vacuum_core::estimator::{decompose_expectation, sample_postselection_count};
use vacuum_core::rng::derive_seed;
use vacuum_core::{
    corrected_expectation, cross_term, eigen_overlaps, exact_diagonalize, initial_hamiltonian, refine_with,
    run_adiabatic, run_hold, shot_expectation, tag_circuit_one_qubit, BitString, Pauli, PauliString, PauliSum,
    RefineOptions, RefinementReport, Schedule, Spectrum, StateVector, ThetaPolicy, TrajectoryRecord, C,
};

use crate::analysis::{analyze_oscillation, Oscillation};
use crate::config::{ExperimentConfig, Method, StartState, ThetaMode};
use crate::error::{CliError, ConfigError};
use crate::manifest::RunManifest;
use crate::table::{Cell, Table};

type Result<T> = std::result::Result<T, CliError>;

const KEPT_STREAM: u64 = u64::MAX;

fn output_path(cfg: &ExperimentConfig, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}_{suffix}", cfg.output_prefix))
}

fn finish(cfg: &ExperimentConfig, command: &str, started: Instant, mut files: Vec<PathBuf>, warnings: Vec<String>) -> Result<Vec<PathBuf>> {
    let manifest_path = output_path(cfg, &format!("{command}_manifest.txt"));
    files.push(manifest_path.clone());
    RunManifest {
        command: command.to_string(),
        config: cfg.clone(),
        seed: cfg.estimation.seed,
        duration: started.elapsed(),
        outputs: files.clone(),
        warnings,
    }
    .write(&manifest_path)?;
    Ok(files)
}

/// One `Z` estimate: exact, or sampled with the given stream seed.
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub shots: u64,
    pub seed: Option<u64>,
}

fn estimate(cfg: &ExperimentConfig, state: &StateVector, z: &PauliString, shots: u64, seed: u64) -> Result<Estimate> {
    match cfg.estimation.method {
        Method::Exact => Ok(Estimate {
            value: z.expectation(state.amplitudes()).re,
            std_error: 0.0,
            shots: 0,
            seed: None,
        }),
        Method::Shots => {
            let e = shot_expectation(state, z, shots, seed)?;
            Ok(Estimate {
                value: e.value,
                std_error: e.std_error,
                shots,
                seed: Some(seed),
            })
        }
    }
}

fn seed_cell(e: &Estimate) -> Cell {
    e.seed.map_or(Cell::Empty, Cell::Int)
}

/// Builds the pre-`T` part: either the adiabatic sweep or a single record of
/// the exact ground state at `t = T`.
fn prepare(
    cfg: &ExperimentConfig,
    h1: &PauliSum,
    schedule: &Schedule,
) -> Result<(StateVector, Vec<TrajectoryRecord>, Vec<String>)> {
    match cfg.schedule.start {
        StartState::Adiabatic => {
            let h0 = initial_hamiltonian(cfg.model.j, h1.num_qubits())?;
            let (state, traj) = run_adiabatic(&h0, h1, schedule, cfg.mode, &[], true)?;
            Ok((state, traj.records, traj.warnings))
        }
        StartState::ExactGround => {
            let sp = exact_diagonalize(h1)?;
            let state = sp.ground_state();
            let record = TrajectoryRecord {
                t: schedule.total_time(),
                observables: Vec::new(),
                fidelity_to_ground: 1.0,
                energy: state.expectation(h1)?,
                state: Some(state.clone()),
            };
            Ok((state, vec![record], Vec::new()))
        }
    }
}

fn z_on(n: usize, q: usize) -> PauliString {
    PauliString::single(n, q, Pauli::Z)
}

fn z_sum(n: usize, q: usize) -> PauliSum {
    PauliSum::new(n, [(1.0, z_on(n, q))]).expect("single Z term")
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub table: Table,
    /// `|⟨E0|ψ(T)⟩|²`.
    pub final_fidelity: f64,
    /// Exact `⟨Z⟩` of the tracked qubit at `t = T`.
    pub z_at_t: f64,
    /// Exact ground-state `⟨Z⟩` of the tracked qubit.
    pub ground_z: f64,
    /// `(t, estimated ⟨Z⟩)` over the hold.
    pub hold_series: Vec<(f64, f64)>,
    pub oscillation: Option<Oscillation>,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl SweepReport {
    pub fn two_alpha_sq_minus_one(&self) -> f64 {
        2.0 * self.final_fidelity - 1.0
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "fidelity at T        {:.9}", self.final_fidelity);
        let _ = writeln!(s, "2|alpha|^2 - 1       {:.9}", self.two_alpha_sq_minus_one());
        let _ = writeln!(s, "<Z> at T             {:.9}", self.z_at_t);
        let _ = writeln!(s, "ground <Z>           {:.9}", self.ground_z);
        if let Some(o) = &self.oscillation {
            let _ = writeln!(s, "hold center          {:.9}", o.center);
            let _ = writeln!(s, "hold amplitude       {:.9}", o.amplitude);
            match o.period {
                Some(p) => {
                    let _ = writeln!(s, "hold period          {p:.6}");
                }
                None => {
                    let _ = writeln!(s, "hold period          n/a");
                }
            }
        }
        for f in &self.files {
            let _ = writeln!(s, "wrote {}", f.display());
        }
        s
    }
}

pub const SWEEP_HEADER: [&str; 8] = ["t", "segment", "expval_Z", "std_error", "fidelity", "energy", "shots", "seed"];

pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let started = Instant::now();
    let (h1, schedule) = cfg.validate()?;
    let n = h1.num_qubits();
    let q = cfg.estimation.z_qubit;
    let z = z_on(n, q);
    let shots = cfg.estimation.shots;
    let seed = cfg.estimation.seed;

    let (state_t, sweep, mut warnings) = prepare(cfg, &h1, &schedule)?;
    let (_, hold) = run_hold(&state_t, &h1, &schedule, cfg.mode, &[], schedule.total_time(), true)?;
    let sp = exact_diagonalize(&h1)?;

    let mut table = Table::new(&SWEEP_HEADER);
    let mut hold_series = Vec::new();
    let mut row = 0u64;
    let segments = [("sweep", &sweep), ("hold", &hold.records)];
    for (segment, records) in segments {
        for r in records.iter() {
            let state = r.state.as_ref().expect("snapshots requested");
            let e = estimate(cfg, state, &z, shots, derive_seed(seed, 2 * row))?;
            if segment == "hold" {
                hold_series.push((r.t, e.value));
            }
            table.push(vec![
                r.t.into(),
                segment.into(),
                e.value.into(),
                e.std_error.into(),
                r.fidelity_to_ground.into(),
                r.energy.into(),
                e.shots.into(),
                seed_cell(&e),
            ]);
            row += 1;
        }
    }
    warnings.extend(hold.warnings);

    let csv = output_path(cfg, "sweep.csv");
    table.write(&csv)?;
    let files = finish(cfg, "sweep", started, vec![csv], warnings.clone())?;
    Ok(SweepReport {
        table,
        final_fidelity: state_t.fidelity(&sp.ground_state())?.min(1.0),
        z_at_t: z.expectation(state_t.amplitudes()).re,
        ground_z: z.expectation(sp.ground_state().amplitudes()).re,
        oscillation: analyze_oscillation(&hold_series),
        hold_series,
        files,
        warnings,
    })
}

#[derive(Clone, Debug)]
pub struct FilterRunReport {
    pub table: Table,
    pub discard: bool,
    /// Exact `⟨Z⟩` just before the circuit.
    pub pre: f64,
    /// Exact `⟨Z⟩` of the system just after the circuit (post-selected in
    /// discard mode, the mixed value otherwise).
    pub post: f64,
    /// `2·Re(ᾱβ⟨E0|Z|E1⟩)` of the pre-circuit state.
    pub cross_term: f64,
    /// Estimated `⟨Z_system⟩` right after the circuit: the mixed raw value
    /// or, in discard mode, the post-selected value.
    pub raw: Estimate,
    /// Estimated `2·p0 − 1`.
    pub two_p0_minus_1: Estimate,
    /// `raw / (2·p0 − 1)` in non-discard mode.
    pub corrected: Option<Estimate>,
    /// Exact `⟨Z⟩` over the hold (system value; mixed in non-discard mode).
    pub hold_exact: Vec<(f64, f64)>,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl FilterRunReport {
    pub fn jump(&self) -> f64 {
        self.pre - self.post
    }

    pub fn summary_line(&self) -> String {
        match &self.corrected {
            Some(c) => format!(
                "raw {:.6} ± {:.6}   2p0-1 {:.6} ± {:.6}   corrected {:.6} ± {:.6}",
                self.raw.value,
                self.raw.std_error,
                self.two_p0_minus_1.value,
                self.two_p0_minus_1.std_error,
                c.value,
                c.std_error
            ),
            None => format!(
                "post-selected {:.6} ± {:.6}   2p0-1 {:.6} ± {:.6}",
                self.raw.value, self.raw.std_error, self.two_p0_minus_1.value, self.two_p0_minus_1.std_error
            ),
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.summary_line());
        let _ = writeln!(s, "pre {:.9}  post {:.9}  jump {:.9}  cross_term {:.9}", self.pre, self.post, self.jump(), self.cross_term);
        for f in &self.files {
            let _ = writeln!(s, "wrote {}", f.display());
        }
        s
    }
}

pub const FILTER_HEADER: [&str; 12] = [
    "t",
    "segment",
    "expval_Z",
    "std_error",
    "ancilla_Z",
    "ancilla_std_error",
    "corrected_Z",
    "corrected_std_error",
    "fidelity",
    "energy",
    "shots",
    "seed",
];

pub const FILTER_SUMMARY_HEADER: [&str; 13] = [
    "discard",
    "raw",
    "raw_std_error",
    "two_p0_minus_1",
    "two_p0_minus_1_std_error",
    "corrected",
    "corrected_std_error",
    "pre",
    "post",
    "jump",
    "cross_term",
    "shots",
    "seed",
];

/// `r/d` with first-order error propagation.
fn ratio_estimate(raw: &Estimate, denom: &Estimate) -> Result<Estimate> {
    let value = corrected_expectation(raw.value, (1.0 + denom.value) / 2.0)?;
    let d = denom.value;
    let std_error = ((raw.std_error / d).powi(2) + (raw.value * denom.std_error / (d * d)).powi(2)).sqrt();
    Ok(Estimate {
        value,
        std_error,
        shots: raw.shots,
        seed: raw.seed,
    })
}

pub fn cmd_filter_run(cfg: &ExperimentConfig) -> Result<FilterRunReport> {
    let started = Instant::now();
    let (h1, schedule) = cfg.validate()?;
    if h1.num_qubits() != 1 {
        return Err(ConfigError::new("model", "filter-run tags a one-qubit model").into());
    }
    let sp = exact_diagonalize(&h1)?;
    if sp.is_degenerate() {
        return Err(vacuum_core::Error::Precondition("model spectrum is degenerate".into()).into());
    }
    let shots = cfg.estimation.shots;
    let seed = cfg.estimation.seed;
    let z = z_on(1, 0);
    let z_obs = z_sum(1, 0);

    let (state_t, sweep, mut warnings) = prepare(cfg, &h1, &schedule)?;
    let pre = state_t.expectation(&z_obs)?;
    let cross = cross_term(&state_t, &sp, &z_obs)?;
    let joint = tag_circuit_one_qubit(&StateVector::zero_state(1)?.tensor(&state_t), &sp)?;

    let mut table = Table::new(&FILTER_HEADER);
    let mut row = 0u64;
    for r in &sweep {
        let state = r.state.as_ref().expect("snapshots requested");
        let e = estimate(cfg, state, &z, shots, derive_seed(seed, 2 * row))?;
        table.push(vec![
            r.t.into(),
            "sweep".into(),
            e.value.into(),
            e.std_error.into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            r.fidelity_to_ground.into(),
            r.energy.into(),
            e.shots.into(),
            seed_cell(&e),
        ]);
        row += 1;
    }

    let t_total = schedule.total_time();
    let discard = cfg.filter.discard;
    let mut hold_exact = Vec::new();
    let (post, raw, two_p0, corrected);
    if discard {
        let (p0, system) = joint.postselect(&[0], &BitString::zeros(1))?;
        let (kept, two_p0_est) = match cfg.estimation.method {
            Method::Exact => (0, Estimate { value: 2.0 * p0 - 1.0, std_error: 0.0, shots: 0, seed: None }),
            Method::Shots => {
                let stream = derive_seed(seed, KEPT_STREAM);
                let kept = sample_postselection_count(p0, shots, stream)?;
                if kept == 0 {
                    return Err(vacuum_core::Error::ImpossibleOutcome { probability: p0, threshold: 1.0 / shots as f64 }.into());
                }
                let p = kept as f64 / shots as f64;
                let se = 2.0 * (p * (1.0 - p) / shots as f64).sqrt();
                (kept, Estimate { value: 2.0 * p - 1.0, std_error: se, shots, seed: Some(stream) })
            }
        };
        let (_, hold) = run_hold(&system, &h1, &schedule, cfg.mode, &[], t_total, true)?;
        warnings.extend(hold.warnings.clone());
        let filtered = TrajectoryRecord {
            t: t_total,
            observables: Vec::new(),
            fidelity_to_ground: system.fidelity(&sp.ground_state())?.min(1.0),
            energy: system.expectation(&h1)?,
            state: Some(system.clone()),
        };
        let mut first = None;
        for (segment, r) in std::iter::once(("filtered", &filtered)).chain(hold.records.iter().map(|r| ("hold", r))) {
            let state = r.state.as_ref().expect("snapshots requested");
            let e = estimate(cfg, state, &z, kept, derive_seed(seed, 2 * row))?;
            first.get_or_insert(e);
            hold_exact.push((r.t, state.expectation(&z_obs)?));
            table.push(vec![
                r.t.into(),
                segment.into(),
                e.value.into(),
                e.std_error.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                r.fidelity_to_ground.into(),
                r.energy.into(),
                e.shots.into(),
                seed_cell(&e),
            ]);
            row += 1;
        }
        post = system.expectation(&z_obs)?;
        raw = first.expect("filtered row");
        two_p0 = two_p0_est;
        corrected = None;
    } else {
        let h_joint = h1.embed(1, 0);
        let joint_sp = exact_diagonalize(&h_joint)?;
        let (_, hold) = hold_with(&joint, &h_joint, &joint_sp, &schedule, cfg.mode, &[], t_total, true)?;
        let z_sys = z_on(2, 1);
        let z_anc = z_on(2, 0);
        let vacuum = StateVector::zero_state(1)?.tensor(&sp.ground_state());
        let filtered = TrajectoryRecord {
            t: t_total,
            observables: Vec::new(),
            fidelity_to_ground: 0.0,
            energy: joint.expectation(&h_joint)?,
            state: Some(joint.clone()),
        };
        let mut first = None;
        for (segment, r) in std::iter::once(("filtered", &filtered)).chain(hold.records.iter().map(|r| ("hold", r))) {
            let state = r.state.as_ref().expect("snapshots requested");
            let e = estimate(cfg, state, &z_sys, shots, derive_seed(seed, 2 * row))?;
            let a = estimate(cfg, state, &z_anc, shots, derive_seed(seed, 2 * row + 1))?;
            let c = ratio_estimate(&e, &a)?;
            first.get_or_insert((e, a, c));
            hold_exact.push((r.t, z_sys.expectation(state.amplitudes()).re));
            // Weight of |0⟩|E0⟩ in the joint state.
            let fidelity = state.fidelity(&vacuum)?.min(1.0);
            table.push(vec![
                r.t.into(),
                segment.into(),
                e.value.into(),
                e.std_error.into(),
                a.value.into(),
                a.std_error.into(),
                c.value.into(),
                c.std_error.into(),
                fidelity.into(),
                r.energy.into(),
                e.shots.into(),
                seed_cell(&e),
            ]);
            row += 1;
        }
        post = z_sys.expectation(joint.amplitudes()).re;
        let (e, a, c) = first.expect("filtered row");
        raw = e;
        two_p0 = a;
        corrected = Some(c);
    }

    let csv = output_path(cfg, "filter.csv");
    table.write(&csv)?;
    let mut summary = Table::new(&FILTER_SUMMARY_HEADER);
    summary.push(vec![
        (if discard { "true" } else { "false" }).into(),
        raw.value.into(),
        raw.std_error.into(),
        two_p0.value.into(),
        two_p0.std_error.into(),
        corrected.map(|c| c.value).into(),
        corrected.map(|c| c.std_error).into(),
        pre.into(),
        post.into(),
        (pre - post).into(),
        cross.into(),
        raw.shots.into(),
        seed_cell(&raw),
    ]);
    let summary_csv = output_path(cfg, "filter_summary.csv");
    summary.write(&summary_csv)?;
    let files = finish(cfg, "filter-run", started, vec![csv, summary_csv], warnings.clone())?;
    Ok(FilterRunReport {
        table,
        discard,
        pre,
        post,
        cross_term: cross,
        raw,
        two_p0_minus_1: two_p0,
        corrected,
        hold_exact,
        files,
        warnings,
    })
}

#[derive(Clone, Debug)]
pub struct RefineReport {
    pub table: Table,
    pub report: RefinementReport,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl RefineReport {
    pub fn summary(&self) -> String {
        let r = &self.report;
        let mut s = String::new();
        let _ = writeln!(s, "initial fidelity     {:.9}", r.initial_fidelity);
        if let Some(last) = r.iterations.last() {
            let _ = writeln!(s, "final fidelity       {:.12}", last.fidelity_to_ground);
            let _ = writeln!(s, "final excited weight {:.6e}", last.excited_weight);
        }
        let _ = writeln!(s, "passes               {}", r.iterations.len());
        let _ = writeln!(s, "status               {}", r.status.as_str());
        for f in &self.files {
            let _ = writeln!(s, "wrote {}", f.display());
        }
        s
    }
}

pub const REFINE_HEADER: [&str; 7] =
    ["iteration", "E0_prime", "theta", "success_probability", "fidelity", "excited_weight", "status"];

pub fn cmd_refine(cfg: &ExperimentConfig) -> Result<RefineReport> {
    let started = Instant::now();
    let (h1, schedule) = cfg.validate()?;
    if h1.num_qubits() > 4 {
        return Err(ConfigError::new("model", "refine supports 1 to 4 system qubits").into());
    }
    let (state_t, _, warnings) = prepare(cfg, &h1, &schedule)?;
    let f = &cfg.filter;
    let theta = match f.theta_mode {
        ThetaMode::Auto => match cfg.estimation.method {
            Method::Exact => ThetaPolicy::Auto,
            Method::Shots => ThetaPolicy::AutoShots {
                shots: cfg.estimation.shots,
                seed: cfg.estimation.seed,
            },
        },
        ThetaMode::Oracle => ThetaPolicy::Oracle,
        ThetaMode::Fixed => ThetaPolicy::Fixed(f.theta.expect("validated")),
    };
    let options = RefineOptions {
        num_ancillas: f.ancillas,
        powers: f.powers.clone(),
        theta,
        max_iters: f.max_iters,
        target_infidelity: f.target_infidelity,
    };
    let report = refine_with(&state_t, &h1, &options)?;

    let mut table = Table::new(&REFINE_HEADER);
    let initial_excited: f64 = report.initial_weights[1..].iter().sum();
    table.push(vec![
        0usize.into(),
        report.initial_e0_prime.into(),
        Cell::Empty,
        Cell::Empty,
        report.initial_fidelity.into(),
        initial_excited.into(),
        "initial".into(),
    ]);
    let last = report.iterations.len();
    for (i, it) in report.iterations.iter().enumerate() {
        let status = match (&it.aborted, i + 1 == last) {
            (Some(_), _) => "aborted",
            (None, true) => report.status.as_str(),
            (None, false) => "continue",
        };
        table.push(vec![
            (i + 1).into(),
            it.e0_prime.into(),
            if it.theta.is_nan() { Cell::Empty } else { it.theta.into() },
            if it.aborted.is_some() { Cell::Empty } else { it.success_probability.into() },
            it.fidelity_to_ground.into(),
            it.excited_weight.into(),
            status.into(),
        ]);
    }
    let mut warnings = warnings;
    warnings.extend(report.iterations.iter().filter_map(|it| it.aborted.clone()));

    let csv = output_path(cfg, "refine.csv");
    table.write(&csv)?;
    let files = finish(cfg, "refine", started, vec![csv], warnings.clone())?;
    Ok(RefineReport {
        table,
        report,
        files,
        warnings,
    })
}

/// Decomposition of a supplied state in the model's eigenbasis.
#[derive(Clone, Debug)]
pub struct StateAnalysis {
    pub weights: Vec<f64>,
    pub expval_z: f64,
    pub diagonal: f64,
    pub cross_term: f64,
}

#[derive(Clone, Debug)]
pub struct DiagReport {
    pub spectrum: Spectrum,
    pub ground_z: Vec<f64>,
    pub state: Option<StateAnalysis>,
    pub text: String,
    pub files: Vec<PathBuf>,
}

/// Reads amplitudes, one per line as `re` or `re im`; `#` starts a comment.
pub fn read_state_file(path: &Path) -> std::result::Result<StateVector, ConfigError> {
    let field = "diag.state_file";
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new(field, format!("cannot read {}: {e}", path.display())))?;
    let mut amps = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| {
            crate::config::parse_number(s).map_err(|m| ConfigError::at(idx + 1, field, m))
        };
        let amp = match parts.as_slice() {
            [re] => C::new(num(re)?, 0.0),
            [re, im] => C::new(num(re)?, num(im)?),
            _ => return Err(ConfigError::at(idx + 1, field, "expected `re` or `re im`")),
        };
        amps.push(amp);
    }
    StateVector::from_amplitudes(amps).map_err(|e| ConfigError::new(field, e.to_string()))
}

pub fn cmd_diag(cfg: &ExperimentConfig) -> Result<DiagReport> {
    let started = Instant::now();
    let h = cfg.hamiltonian()?;
    let n = h.num_qubits();
    if cfg.estimation.z_qubit >= n {
        return Err(ConfigError::new("estimation.z_qubit", format!("qubit outside a {n}-qubit model")).into());
    }
    let sp = exact_diagonalize(&h)?;
    let ground = sp.ground_state();
    let ground_z: Vec<f64> = (0..n).map(|q| z_on(n, q).expectation(ground.amplitudes()).re).collect();

    let mut text = String::new();
    let _ = writeln!(text, "hamiltonian");
    for line in h.to_text().lines() {
        let _ = writeln!(text, "  {line}");
    }
    let _ = writeln!(text, "eigenvalues");
    for (j, e) in sp.eigenvalues().iter().enumerate() {
        let _ = writeln!(text, "  E{j} = {e:.12}");
    }
    let _ = writeln!(text, "gap = {:.12}", sp.gap());
    let _ = writeln!(text, "degenerate = {}", sp.is_degenerate());
    let _ = writeln!(text, "ground state");
    for (i, a) in ground.amplitudes().iter().enumerate() {
        let _ = writeln!(text, "  |{}> {:+.12} {:+.12}i", BitString::from_index(i, n), a.re, a.im);
    }
    for (q, z) in ground_z.iter().enumerate() {
        let _ = writeln!(text, "ground <Z{q}> = {z:.12}");
    }

    let state = match &cfg.state_file {
        None => None,
        Some(path) => {
            let psi = read_state_file(path)?;
            if psi.num_qubits() != n {
                return Err(ConfigError::new(
                    "diag.state_file",
                    format!("state has {} qubits, model {n}", psi.num_qubits()),
                )
                .into());
            }
            let obs = z_sum(n, cfg.estimation.z_qubit);
            let weights = eigen_overlaps(&psi, &sp)?.weights();
            let (diagonal, cross) = decompose_expectation(&psi, &sp, &obs)?;
            let expval_z = psi.expectation(&obs)?;
            let _ = writeln!(text, "state {}", path.display());
            for (j, w) in weights.iter().enumerate() {
                let _ = writeln!(text, "  |c{j}|^2 = {w:.12}");
            }
            let q = cfg.estimation.z_qubit;
            let _ = writeln!(text, "  <Z{q}> = {expval_z:.12}");
            let _ = writeln!(text, "  diagonal part = {diagonal:.12}");
            let _ = writeln!(text, "  cross term = {cross:.12}");
            Some(StateAnalysis {
                weights,
                expval_z,
                diagonal,
                cross_term: cross,
            })
        }
    };

    let out = output_path(cfg, "diag.txt");
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&out, &text)?;
    let files = finish(cfg, "diag", started, vec![out], Vec::new())?;
    Ok(DiagReport {
        spectrum: sp,
        ground_z,
        state,
        text,
        files,
    })
}
