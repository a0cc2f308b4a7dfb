//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed verification, 2 invalid input or
//! configuration, 3 simulation failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::detection::{DetectionScenario, SensorField};
use crate::error::{Error, Result};
use crate::ggn::GgnParams;
use crate::harness::presets::{self, acoustic_field, Preset, PresetSpec, SweepSpec};
use crate::harness::{
    decile_grid, default_sweep, empirical_roc, verify_propositions, Detector, ExperimentConfig,
    ThresholdPolicy, VerifyScope,
};
use crate::objective::ChannelParams;
use crate::optimizer::solve;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SIMULATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "onebit",
    version,
    about = "Optimal one-bit quantizer thresholds and detection experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the optimal threshold of one noise/channel pair.
    Threshold(ThresholdArgs),
    /// Normalized optimal threshold over a grid of shapes.
    Sweep(SweepArgs),
    /// Monte Carlo ROC curves of the GLRT and Rao detectors.
    Roc(RocArgs),
    /// Run the numerical property suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub q0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub q1: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `table1` or `fig1-sweep`.
    #[arg(long)]
    pub preset: Option<String>,
    /// Key-value file using the flag names as keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub q0: Option<f64>,
    #[arg(long)]
    pub q1: Option<f64>,
    /// Comma list (`1.5,2,4`) or inclusive range `start:stop:step`.
    #[arg(long)]
    pub betas: Option<String>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RocArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `fig2-roc` or `fig3-acoustic`.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub q0: Option<f64>,
    #[arg(long)]
    pub q1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma list of `glrt`, `rao`.
    #[arg(long)]
    pub detectors: Option<String>,
    /// Comma list of `optimal`, `zero`, `fixed:<tau>`.
    #[arg(long, allow_hyphen_values = true)]
    pub policies: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Restrict to these scopes (comma separated or repeated).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Threshold(a) => cmd_threshold(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Roc(a) => cmd_roc(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(e: impl ToString) -> Self {
        Self {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }

    fn simulation(e: impl ToString) -> Self {
        Self {
            code: EXIT_SIMULATION,
            message: e.to_string(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self::input(format!("{}: {e}", path.display()))
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn cmd_threshold(a: &ThresholdArgs, out: &mut dyn Write) -> CmdResult {
    let s = solve(a.alpha, a.beta, a.q0, a.q1).map_err(Failure::input)?;
    let mut text = String::new();
    let _ = writeln!(text, "x*         {:.4}", s.x_star);
    let _ = writeln!(text, "tau*       {:.4}", s.tau_star);
    if let Some(other) = s.also_tau {
        let _ = writeln!(text, "tau* (alt) {:.4}", other);
    }
    let _ = writeln!(text, "G(x*)      {:.4}", s.g_value);
    let _ = writeln!(text, "case       {}", s.case);
    let _ = writeln!(text, "iterations {}", s.iterations);
    out.write_all(text.as_bytes()).map_err(Failure::input)?;
    Ok(EXIT_OK)
}

/// `value` with 17 significant digits.
pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

/// Parses a comma list or an inclusive `start:stop:step` range.
pub fn parse_betas(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("cannot parse beta grid `{spec}`"));
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step): (f64, f64, f64) = (
                start.parse().map_err(|_| bad())?,
                stop.parse().map_err(|_| bad())?,
                step.parse().map_err(|_| bad())?,
            );
            if !(step > 0.0) || !(stop >= start) {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            (0..=count).map(|i| start + i as f64 * step).collect()
        }
        [_] => spec
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if values.is_empty() || values.iter().any(|b| !b.is_finite()) {
        return Err(bad());
    }
    Ok(values)
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// `key = value` lines; `#` starts a comment. Keys outside `allowed` are
/// rejected, as are repeated keys.
pub fn parse_key_values(text: &str, allowed: &[&str]) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim().to_string();
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!(
                "line {}: duplicate key `{key}`",
                lineno + 1
            )));
        }
    }
    Ok(map)
}

const MANIFEST_KEYS: [&str; 4] = ["command", "version", "wall_clock_ms", "out"];

fn read_config(
    path: &Path,
    command: &str,
    keys: &[&str],
) -> std::result::Result<BTreeMap<String, String>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let allowed: Vec<&str> = keys.iter().chain(MANIFEST_KEYS.iter()).copied().collect();
    let map = parse_key_values(&text, &allowed).map_err(Failure::input)?;
    if let Some(c) = map.get("command") {
        if c != command {
            return Err(Failure::input(format!(
                "config was written by `{c}`, not `{command}`"
            )));
        }
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, Failure> {
    value
        .parse()
        .map_err(|_| Failure::input(format!("invalid value `{value}` for `{key}`")))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

fn write_output(
    out_path: Option<&Path>,
    command: &str,
    body: &[u8],
    params: &[(&str, String)],
    started: Instant,
    stdout: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let Some(path) = out_path else {
        return stdout.write_all(body).map_err(Failure::input);
    };
    fs::write(path, body).map_err(|e| Failure::io(path, e))?;
    let mut manifest = String::from("# replay with --config <this file>\n");
    let _ = writeln!(manifest, "command = {command}");
    let _ = writeln!(manifest, "version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        manifest,
        "wall_clock_ms = {}",
        started.elapsed().as_millis()
    );
    let _ = writeln!(manifest, "out = {}", path.display());
    for (k, v) in params {
        let _ = writeln!(manifest, "{k} = {v}");
    }
    let mpath = manifest_path(path);
    fs::write(&mpath, manifest).map_err(|e| Failure::io(&mpath, e))
}

const SWEEP_KEYS: [&str; 5] = ["preset", "alpha", "q0", "q1", "betas"];

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> CmdResult {
    let started = Instant::now();
    let file = match &a.config {
        Some(p) => read_config(p, "sweep", &SWEEP_KEYS)?,
        None => BTreeMap::new(),
    };
    let preset = a.preset.clone().or_else(|| file.get("preset").cloned());
    let mut spec = match preset.as_deref() {
        Some(name) => match name.parse::<Preset>().map_err(Failure::input)?.spec() {
            PresetSpec::Sweep(s) => s,
            PresetSpec::Experiment(_) => {
                return Err(Failure::input(format!(
                    "preset `{name}` is an ROC experiment; use `roc`"
                )))
            }
        },
        None => SweepSpec {
            alpha: 1.0,
            channels: vec![(0.0, 0.0)],
            betas: presets::fig1_betas(),
        },
    };

    if let Some(v) = file.get("alpha") {
        spec.alpha = parse_value("alpha", v)?;
    }
    if let Some(v) = a.alpha {
        spec.alpha = v;
    }
    let mut q0 = file
        .get("q0")
        .map(|v| parse_value::<f64>("q0", v))
        .transpose()?;
    let mut q1 = file
        .get("q1")
        .map(|v| parse_value::<f64>("q1", v))
        .transpose()?;
    q0 = a.q0.or(q0);
    q1 = a.q1.or(q1);
    if q0.is_some() || q1.is_some() {
        spec.channels = vec![(q0.unwrap_or(0.0), q1.unwrap_or(0.0))];
    }
    if let Some(b) = a.betas.as_deref().or(file.get("betas").map(String::as_str)) {
        spec.betas = parse_betas(b).map_err(Failure::input)?;
    }
    if !(spec.alpha.is_finite() && spec.alpha > 0.0) {
        return Err(Failure::input(format!(
            "alpha must be finite and > 0, got {}",
            spec.alpha
        )));
    }

    let rows = spec.run();
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::input(e);
    w.write_record(["q0", "q1", "beta", "alpha_x_star", "case", "error"])
        .map_err(io)?;
    for r in &rows {
        let (value, case, error) = match &r.alpha_x_star {
            Ok(v) => (
                format_float(*v),
                r.case.map(|c| c.label()).unwrap_or(""),
                String::new(),
            ),
            Err(e) => (String::new(), "", e.clone()),
        };
        w.write_record([
            format_float(r.q0).as_str(),
            &format_float(r.q1),
            &format_float(r.beta),
            &value,
            case,
            &error,
        ])
        .map_err(io)?;
    }
    let body = w.into_inner().map_err(|e| Failure::input(e.to_string()))?;

    let mut params = vec![
        ("alpha", spec.alpha.to_string()),
        ("betas", join_floats(&spec.betas)),
    ];
    match (spec.channels.as_slice(), preset) {
        ([(q0, q1)], _) => {
            params.push(("q0", q0.to_string()));
            params.push(("q1", q1.to_string()));
        }
        // several channels only come from a preset
        (_, Some(p)) => params.insert(0, ("preset", p)),
        (_, None) => {}
    }
    write_output(a.out.as_deref(), "sweep", &body, &params, started, out)?;

    if a.out.is_some() {
        let failed = rows.iter().filter(|r| r.alpha_x_star.is_err()).count();
        let mut text = String::new();
        for r in &rows {
            if let Ok(v) = &r.alpha_x_star {
                let _ = writeln!(
                    text,
                    "q0={:.4} q1={:.4} beta={:.4} alpha*x*={:.4}",
                    r.q0, r.q1, r.beta, v
                );
            }
        }
        let _ = writeln!(text, "{} rows, {failed} failed", rows.len());
        out.write_all(text.as_bytes()).map_err(Failure::input)?;
    }
    Ok(EXIT_OK)
}

const ROC_KEYS: [&str; 14] = [
    "preset",
    "alpha",
    "beta",
    "q0",
    "q1",
    "theta",
    "delta",
    "n",
    "k",
    "trials",
    "seed",
    "detectors",
    "policies",
    "field",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FieldKind {
    Homogeneous,
    Acoustic,
}

impl FieldKind {
    fn name(self) -> &'static str {
        match self {
            FieldKind::Homogeneous => "homogeneous",
            FieldKind::Acoustic => "acoustic",
        }
    }
}

#[derive(Debug, Clone)]
struct RocSettings {
    field: FieldKind,
    n: usize,
    k: usize,
    alpha: f64,
    beta: f64,
    q0: f64,
    q1: f64,
    theta: f64,
    delta: f64,
    trials: usize,
    seed: u64,
    detectors: Vec<Detector>,
    policies: Vec<ThresholdPolicy>,
}

impl RocSettings {
    fn from_config(c: &ExperimentConfig, field: FieldKind) -> Self {
        let s = &c.scenario;
        Self {
            field,
            n: s.field.n(),
            k: s.field.k(),
            alpha: s.noise.alpha(),
            beta: s.noise.beta(),
            q0: s.channel.q0,
            q1: s.channel.q1,
            theta: s.theta,
            delta: s.delta,
            trials: c.trials,
            seed: c.master_seed,
            detectors: c.detectors.clone(),
            policies: c.policies.clone(),
        }
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), Failure> {
        match key {
            "alpha" => self.alpha = parse_value(key, value)?,
            "beta" => self.beta = parse_value(key, value)?,
            "q0" => self.q0 = parse_value(key, value)?,
            "q1" => self.q1 = parse_value(key, value)?,
            "theta" => self.theta = parse_value(key, value)?,
            "delta" => self.delta = parse_value(key, value)?,
            "n" => self.n = parse_value(key, value)?,
            "k" => self.k = parse_value(key, value)?,
            "trials" => self.trials = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "detectors" => {
                self.detectors = value
                    .split(',')
                    .map(str::parse)
                    .collect::<Result<Vec<_>>>()
                    .map_err(Failure::input)?
            }
            "policies" => {
                self.policies = value
                    .split(',')
                    .map(str::parse)
                    .collect::<Result<Vec<_>>>()
                    .map_err(Failure::input)?
            }
            "field" => {
                self.field = match value {
                    "homogeneous" => FieldKind::Homogeneous,
                    "acoustic" => FieldKind::Acoustic,
                    other => return Err(Failure::input(format!("unknown field `{other}`"))),
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn build(&self) -> Result<ExperimentConfig> {
        let field = match self.field {
            FieldKind::Homogeneous => SensorField::homogeneous(self.n, self.k, 1.0, 0.0)?,
            FieldKind::Acoustic => acoustic_field(self.n, self.k)?,
        };
        let config = ExperimentConfig {
            scenario: DetectionScenario::new(
                field,
                self.theta,
                self.delta,
                GgnParams::new(self.alpha, self.beta)?,
                ChannelParams::new(self.q0, self.q1)?,
            )?,
            trials: self.trials,
            detectors: self.detectors.clone(),
            policies: self.policies.clone(),
            master_seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }

    fn params(&self) -> Vec<(&'static str, String)> {
        let list = |v: Vec<String>| v.join(",");
        vec![
            ("field", self.field.name().into()),
            ("n", self.n.to_string()),
            ("k", self.k.to_string()),
            ("alpha", self.alpha.to_string()),
            ("beta", self.beta.to_string()),
            ("q0", self.q0.to_string()),
            ("q1", self.q1.to_string()),
            ("theta", self.theta.to_string()),
            ("delta", self.delta.to_string()),
            ("trials", self.trials.to_string()),
            ("seed", self.seed.to_string()),
            (
                "detectors",
                list(
                    self.detectors
                        .iter()
                        .map(|d| d.label().to_string())
                        .collect(),
                ),
            ),
            (
                "policies",
                list(self.policies.iter().map(|p| p.label()).collect()),
            ),
        ]
    }
}

fn cmd_roc(a: &RocArgs, out: &mut dyn Write) -> CmdResult {
    let started = Instant::now();
    let file = match &a.config {
        Some(p) => read_config(p, "roc", &ROC_KEYS)?,
        None => BTreeMap::new(),
    };
    let preset = a.preset.clone().or_else(|| file.get("preset").cloned());
    let mut settings = match preset.as_deref() {
        Some(name) => match name.parse::<Preset>().map_err(Failure::input)? {
            Preset::Fig2Roc => RocSettings::from_config(
                &presets::fig2_roc(8.0).map_err(Failure::input)?,
                FieldKind::Homogeneous,
            ),
            Preset::Fig3Acoustic => RocSettings::from_config(
                &presets::fig3_acoustic().map_err(Failure::input)?,
                FieldKind::Acoustic,
            ),
            other => {
                return Err(Failure::input(format!(
                    "preset `{other}` is a threshold sweep; use `sweep`"
                )))
            }
        },
        None => RocSettings::from_config(
            &presets::fig2_roc(8.0).map_err(Failure::input)?,
            FieldKind::Homogeneous,
        ),
    };
    for (k, v) in &file {
        settings.set(k, v)?;
    }
    let flags: [(&str, Option<String>); 12] = [
        ("alpha", a.alpha.map(|v| v.to_string())),
        ("beta", a.beta.map(|v| v.to_string())),
        ("q0", a.q0.map(|v| v.to_string())),
        ("q1", a.q1.map(|v| v.to_string())),
        ("theta", a.theta.map(|v| v.to_string())),
        ("delta", a.delta.map(|v| v.to_string())),
        ("n", a.n.map(|v| v.to_string())),
        ("k", a.k.map(|v| v.to_string())),
        ("trials", a.trials.map(|v| v.to_string())),
        ("seed", a.seed.map(|v| v.to_string())),
        ("detectors", a.detectors.clone()),
        ("policies", a.policies.clone()),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            settings.set(k, &v)?;
        }
    }
    let config = settings.build().map_err(Failure::input)?;
    let curves = empirical_roc(&config).map_err(Failure::simulation)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::simulation(e);
    w.write_record(["detector", "threshold_label", "pfa", "pd"])
        .map_err(io)?;
    for c in &curves {
        for p in &c.points {
            w.write_record([
                c.detector.as_str(),
                &c.threshold_label,
                &format_float(p.pfa),
                &format_float(p.pd),
            ])
            .map_err(io)?;
        }
    }
    let body = w
        .into_inner()
        .map_err(|e| Failure::simulation(e.to_string()))?;
    let out_path = a.out.clone().or_else(|| file.get("out").map(PathBuf::from));
    write_output(
        out_path.as_deref(),
        "roc",
        &body,
        &settings.params(),
        started,
        out,
    )?;

    if out_path.is_some() {
        let mut text = String::new();
        let grid = decile_grid();
        let _ = writeln!(
            text,
            "P_D at P_FA = {}",
            grid.iter()
                .map(|p| format!("{p:.1}"))
                .collect::<Vec<_>>()
                .join(" ")
        );
        for c in &curves {
            let pds: Vec<String> = grid.iter().map(|&p| format!("{:.4}", c.pd_at(p))).collect();
            let tau = c.tau.map(|t| format!("{t:.4}")).unwrap_or_default();
            let _ = writeln!(
                text,
                "{:<5} {:<9} tau={tau:<8} {}",
                c.detector,
                c.threshold_label,
                pds.join(" ")
            );
        }
        out.write_all(text.as_bytes())
            .map_err(Failure::simulation)?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let scopes = a
        .only
        .iter()
        .map(|s| s.parse::<VerifyScope>())
        .collect::<Result<Vec<_>>>()
        .map_err(Failure::input)?;
    let report = verify_propositions(&default_sweep(), &scopes).map_err(Failure::input)?;
    write!(out, "{report}").map_err(Failure::input)?;
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_VERIFY_FAILED)
    }
}

/// Entry point used by the binary.
pub fn main_entry() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
