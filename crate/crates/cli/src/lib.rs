//! Configuration, orchestration and CSV output for the `fracrte` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use fracrte::ctrw::{default_tau, simulate_density};
use fracrte::diffusion::{diffusion_density, DiffusionParams};
use fracrte::field::{linspace, DensityField};
use fracrte::fourier::{QuadratureSpec, TailMode};
use fracrte::legendre::PhaseFunction;
use fracrte::spectral::EvolutionMode;
use fracrte::transport::{energy_density, subordinated_energy_density};
use fracrte::validation::run_suite;
use fracrte::MediumParams;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const CSV_HEADER: &str = "x,U,method,alpha,t,N,mode";

/// (α, times) of the nine published comparison panels.
pub const FIGURE_PANELS: [(f64, [f64; 3]); 3] =
    [(0.25, [0.0001, 0.0025, 0.01]), (0.5, [0.01, 0.05, 0.1]), (0.75, [0.05, 0.1, 0.2])];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Transport,
    Diffusion,
    Ctrw,
    Subordinate,
    Validate,
    Figures,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Transport => "transport",
            Command::Diffusion => "diffusion",
            Command::Ctrw => "ctrw",
            Command::Subordinate => "subordinate",
            Command::Validate => "validate",
            Command::Figures => "figures",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub alpha: f64,
    pub v: f64,
    pub sigma_s: f64,
    pub sigma_a: f64,
    /// β_0..β_L.
    pub beta: Vec<f64>,
    pub order: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
    pub times: Vec<f64>,
    pub quadrature: QuadratureSpec,
    pub mode: EvolutionMode,
    pub seed: u64,
    pub walkers: usize,
    /// CTRW time scale; None picks ξ_t = 0.1.
    pub tau: Option<f64>,
    pub output: PathBuf,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        RunConfig {
            command,
            alpha: 0.5,
            v: 1.0,
            sigma_s: 10.0,
            sigma_a: 0.0,
            beta: vec![1.0, 2.7],
            order: 1,
            x_min: -1.0,
            x_max: 1.0,
            n_x: 401,
            times: vec![0.01, 0.05, 0.1],
            quadrature: QuadratureSpec::default(),
            mode: EvolutionMode::Paper,
            seed: 0,
            walkers: 100_000,
            tau: None,
            output: PathBuf::from("."),
            threads: None,
        }
    }

    pub fn medium(&self) -> fracrte::Result<MediumParams> {
        MediumParams::new(self.alpha, self.v, self.sigma_s, self.sigma_a, PhaseFunction::new(self.beta.clone())?)
    }

    pub fn x_grid(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.n_x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError {
    pub key: Option<String>,
    pub message: String,
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.key {
            Some(k) => write!(f, "invalid value for `{k}`: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for UsageError {}

fn usage(key: &str, message: impl Into<String>) -> UsageError {
    UsageError { key: Some(key.to_string()), message: message.into() }
}

pub const KEYS: [&str; 23] = [
    "alpha",
    "v",
    "sigma_s",
    "sigma_a",
    "g",
    "beta",
    "N",
    "x_min",
    "x_max",
    "n_x",
    "times",
    "k_max",
    "nodes_per_halfperiod",
    "acceleration_order",
    "tail_mode",
    "tolerance",
    "mollifier_width",
    "mode",
    "seed",
    "walkers",
    "tau",
    "output",
    "threads",
];

#[derive(Parser, Debug)]
#[command(name = "fracrte", version, about = "Time-fractional radiative transport in a slab")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// key=value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sigma_s: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sigma_a: Option<String>,
    /// Mean scattering cosine; sets β = (1, 3g).
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    /// Comma-separated β_0..β_L.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Truncation order.
    #[arg(long = "N", allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    n_x: Option<String>,
    /// Comma-separated observation times.
    #[arg(long = "t", alias = "times", allow_hyphen_values = true)]
    times: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k_max: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nodes_per_halfperiod: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    acceleration_order: Option<String>,
    /// none | asymptotic_subtraction
    #[arg(long)]
    tail_mode: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tolerance: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mollifier_width: Option<String>,
    /// exact | paper
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    walkers: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    /// Output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads (default: FRACRTE_THREADS, then all cores).
    #[arg(long, allow_hyphen_values = true)]
    threads: Option<String>,
}

impl Cli {
    fn flag_entries(&self) -> Vec<(&'static str, String)> {
        let pairs: [(&'static str, &Option<String>); 22] = [
            ("alpha", &self.alpha),
            ("v", &self.v),
            ("sigma_s", &self.sigma_s),
            ("sigma_a", &self.sigma_a),
            ("g", &self.g),
            ("beta", &self.beta),
            ("N", &self.n),
            ("x_min", &self.x_min),
            ("x_max", &self.x_max),
            ("n_x", &self.n_x),
            ("times", &self.times),
            ("k_max", &self.k_max),
            ("nodes_per_halfperiod", &self.nodes_per_halfperiod),
            ("acceleration_order", &self.acceleration_order),
            ("tail_mode", &self.tail_mode),
            ("tolerance", &self.tolerance),
            ("mollifier_width", &self.mollifier_width),
            ("mode", &self.mode),
            ("seed", &self.seed),
            ("walkers", &self.walkers),
            ("tau", &self.tau),
            ("threads", &self.threads),
        ];
        let mut out: Vec<(&'static str, String)> =
            pairs.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k, v))).collect();
        if let Some(o) = &self.output {
            out.push(("output", o.to_string_lossy().into_owned()));
        }
        out
    }
}

/// Parse the flat `key = value` format; `#` starts a comment.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>, UsageError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| UsageError {
            key: None,
            message: format!("line {}: expected key=value, got `{line}`", i + 1),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(usage(k, "unknown key"));
        }
        if out.iter().any(|(e, _)| e == k) {
            return Err(usage(k, "given twice"));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, UsageError> {
    v.parse().map_err(|_| usage(key, format!("cannot parse `{v}`")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, UsageError> {
    v.split(',').map(|s| num(key, s.trim())).collect()
}

fn apply(cfg: &mut RunConfig, key: &str, v: &str) -> Result<(), UsageError> {
    let q = &mut cfg.quadrature;
    match key {
        "alpha" => cfg.alpha = num(key, v)?,
        "v" => cfg.v = num(key, v)?,
        "sigma_s" => cfg.sigma_s = num(key, v)?,
        "sigma_a" => cfg.sigma_a = num(key, v)?,
        "g" => {
            let g: f64 = num(key, v)?;
            cfg.beta = if g == 0.0 { vec![1.0] } else { vec![1.0, 3.0 * g] };
        }
        "beta" => cfg.beta = list(key, v)?,
        "N" => cfg.order = num(key, v)?,
        "x_min" => cfg.x_min = num(key, v)?,
        "x_max" => cfg.x_max = num(key, v)?,
        "n_x" => cfg.n_x = num(key, v)?,
        "times" => cfg.times = list(key, v)?,
        "k_max" => q.k_max = num(key, v)?,
        "nodes_per_halfperiod" => q.nodes_per_halfperiod = num(key, v)?,
        "acceleration_order" => q.acceleration_order = num(key, v)?,
        "tail_mode" => {
            q.tail_mode = match v {
                "none" => TailMode::None,
                "asymptotic_subtraction" => TailMode::AsymptoticSubtraction,
                _ => return Err(usage(key, "expected none or asymptotic_subtraction")),
            }
        }
        "tolerance" => q.tolerance = num(key, v)?,
        "mollifier_width" => q.mollifier_width = num(key, v)?,
        "mode" => {
            cfg.mode = match v {
                "exact" => EvolutionMode::Exact,
                "paper" => EvolutionMode::Paper,
                _ => return Err(usage(key, "expected exact or paper")),
            }
        }
        "seed" => cfg.seed = num(key, v)?,
        "walkers" => cfg.walkers = num(key, v)?,
        "tau" => cfg.tau = Some(num(key, v)?),
        "output" => cfg.output = PathBuf::from(v),
        "threads" => cfg.threads = Some(num(key, v)?),
        _ => return Err(usage(key, "unknown key")),
    }
    Ok(())
}

fn apply_source(cfg: &mut RunConfig, entries: &[(String, String)]) -> Result<(), UsageError> {
    if entries.iter().any(|(k, _)| k == "g") && entries.iter().any(|(k, _)| k == "beta") {
        return Err(usage("g", "give either g or beta, not both"));
    }
    for (k, v) in entries {
        apply(cfg, k, v)?;
    }
    Ok(())
}

fn check(cfg: &RunConfig) -> Result<(), UsageError> {
    if !(cfg.alpha > 0.0 && cfg.alpha <= 1.0) {
        return Err(usage("alpha", format!("{} outside (0, 1]", cfg.alpha)));
    }
    cfg.medium().map_err(|e| UsageError { key: None, message: e.to_string() })?;
    if cfg.order + 1 < cfg.beta.len() {
        return Err(usage("N", format!("N = {} below the phase-function order {}", cfg.order, cfg.beta.len() - 1)));
    }
    if cfg.n_x < 2 {
        return Err(usage("n_x", "need at least 2 grid points"));
    }
    if !(cfg.x_min < cfg.x_max) || !cfg.x_min.is_finite() || !cfg.x_max.is_finite() {
        return Err(usage("x_min", "need finite x_min < x_max"));
    }
    if cfg.times.is_empty() || cfg.times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(usage("times", "times must be positive"));
    }
    if cfg.times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(usage("times", "times must be strictly increasing"));
    }
    cfg.quadrature.validate().map_err(|e| UsageError { key: None, message: e.to_string() })?;
    if cfg.walkers == 0 {
        return Err(usage("walkers", "need at least one walker"));
    }
    if let Some(tau) = cfg.tau {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(usage("tau", "must be positive"));
        }
    }
    if cfg.threads == Some(0) {
        return Err(usage("threads", "must be at least 1"));
    }
    Ok(())
}

/// Build a configuration: defaults, then `file` entries, then flags.
pub fn parse_config_with(args: &[String], file: Option<&str>) -> Result<RunConfig, UsageError> {
    let cli = Cli::try_parse_from(std::iter::once("fracrte".to_string()).chain(args.iter().cloned()))
        .map_err(|e| UsageError { key: None, message: e.to_string() })?;
    let mut cfg = RunConfig::defaults(cli.command);
    if let Some(text) = file {
        apply_source(&mut cfg, &parse_entries(text)?)?;
    }
    let flags: Vec<(String, String)> = cli.flag_entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    apply_source(&mut cfg, &flags)?;
    check(&cfg)?;
    Ok(cfg)
}

/// As `parse_config_with`, reading the file named by `--config`.
pub fn parse_config(args: &[String]) -> Result<RunConfig, ParseFailure> {
    let cli = Cli::try_parse_from(std::iter::once("fracrte".to_string()).chain(args.iter().cloned()))
        .map_err(ParseFailure::Clap)?;
    let text = match &cli.config {
        Some(p) => Some(fs::read_to_string(p).map_err(|e| {
            ParseFailure::Usage(usage("config", format!("cannot read {}: {e}", p.display())))
        })?),
        None => None,
    };
    parse_config_with(args, text.as_deref()).map_err(ParseFailure::Usage)
}

#[derive(Debug)]
pub enum ParseFailure {
    /// Includes --help and --version, which exit 0.
    Clap(clap::Error),
    Usage(UsageError),
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Serialize to the key=value format; `parse_config_with` inverts it.
pub fn emit(cfg: &RunConfig) -> String {
    let q = &cfg.quadrature;
    let mut s = String::new();
    let _ = writeln!(s, "# fracrte {}", cfg.command.name());
    let _ = writeln!(s, "alpha = {}", cfg.alpha);
    let _ = writeln!(s, "v = {}", cfg.v);
    let _ = writeln!(s, "sigma_s = {}", cfg.sigma_s);
    let _ = writeln!(s, "sigma_a = {}", cfg.sigma_a);
    let _ = writeln!(s, "beta = {}", join(&cfg.beta));
    let _ = writeln!(s, "N = {}", cfg.order);
    let _ = writeln!(s, "x_min = {}", cfg.x_min);
    let _ = writeln!(s, "x_max = {}", cfg.x_max);
    let _ = writeln!(s, "n_x = {}", cfg.n_x);
    let _ = writeln!(s, "times = {}", join(&cfg.times));
    let _ = writeln!(s, "k_max = {}", q.k_max);
    let _ = writeln!(s, "nodes_per_halfperiod = {}", q.nodes_per_halfperiod);
    let _ = writeln!(s, "acceleration_order = {}", q.acceleration_order);
    let tail = match q.tail_mode {
        TailMode::None => "none",
        TailMode::AsymptoticSubtraction => "asymptotic_subtraction",
    };
    let _ = writeln!(s, "tail_mode = {tail}");
    let _ = writeln!(s, "tolerance = {}", q.tolerance);
    let _ = writeln!(s, "mollifier_width = {}", q.mollifier_width);
    let _ = writeln!(s, "mode = {}", mode_label(cfg.mode));
    let _ = writeln!(s, "seed = {}", cfg.seed);
    let _ = writeln!(s, "walkers = {}", cfg.walkers);
    if let Some(tau) = cfg.tau {
        let _ = writeln!(s, "tau = {tau}");
    }
    let _ = writeln!(s, "output = {}", cfg.output.display());
    if let Some(n) = cfg.threads {
        let _ = writeln!(s, "threads = {n}");
    }
    s
}

pub fn mode_label(m: EvolutionMode) -> &'static str {
    match m {
        EvolutionMode::Exact => "exact",
        EvolutionMode::Paper => "paper",
    }
}

/// CSV text for time index `j` of a field.
pub fn csv_for(field: &DensityField, j: usize, alpha: f64, order: Option<usize>, mode: Option<EvolutionMode>) -> String {
    let mut s = String::with_capacity(64 * field.x_grid.len());
    s.push_str(CSV_HEADER);
    s.push('\n');
    let n = order.map_or("-".to_string(), |n| n.to_string());
    let m = mode.map_or("-", mode_label);
    let t = field.times[j];
    for (x, u) in field.x_grid.iter().zip(&field.values[j]) {
        let _ = writeln!(s, "{x:.11e},{u:.11e},{},{alpha},{t},{n},{m}", field.method.label());
    }
    s
}

#[derive(Debug)]
pub enum RunError {
    Io(io::Error),
    Numerical(fracrte::Error),
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<fracrte::Error> for RunError {
    fn from(e: fracrte::Error) -> Self {
        RunError::Numerical(e)
    }
}

fn write_field(
    dir: &Path,
    stem: &str,
    field: &DensityField,
    alpha: f64,
    order: Option<usize>,
    mode: Option<EvolutionMode>,
    written: &mut Vec<PathBuf>,
) -> io::Result<()> {
    for j in 0..field.times.len() {
        let path = dir.join(format!("{stem}_t{}.csv", field.times[j]));
        fs::write(&path, csv_for(field, j, alpha, order, mode))?;
        written.push(path);
    }
    Ok(())
}

/// Result of a run: files written and lines for stdout.
#[derive(Debug, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
    pub validation_failed: bool,
}

/// Execute a validated configuration.
pub fn run(cfg: &RunConfig) -> Result<RunReport, RunError> {
    let mut rep = RunReport::default();
    if cfg.command != Command::Validate {
        fs::create_dir_all(&cfg.output)?;
    }
    let dir = cfg.output.as_path();
    let params = cfg.medium()?;
    let x = cfg.x_grid();
    let q = &cfg.quadrature;
    match cfg.command {
        Command::Transport => {
            let f = energy_density(&x, &cfg.times, &params, cfg.order, cfg.mode, q)?;
            write_field(dir, "transport", &f, cfg.alpha, Some(cfg.order), Some(cfg.mode), &mut rep.files)?;
        }
        Command::Diffusion => {
            let f = diffusion_density(&x, &cfg.times, &DiffusionParams::from_medium(&params)?, q)?;
            write_field(dir, "diffusion", &f, cfg.alpha, None, None, &mut rep.files)?;
        }
        Command::Subordinate => {
            let f = subordinated_energy_density(&x, &cfg.times, &params, cfg.order, q)?;
            write_field(dir, "subordinate", &f, cfg.alpha, Some(cfg.order), Some(EvolutionMode::Exact), &mut rep.files)?;
        }
        Command::Ctrw => {
            let tau = cfg.tau.unwrap_or_else(|| default_tau(&params));
            let est = simulate_density(cfg.walkers, &cfg.times, &x, &params, tau, cfg.seed)?;
            write_field(dir, "ctrw", &est.field, cfg.alpha, None, None, &mut rep.files)?;
            for (j, t) in cfg.times.iter().enumerate() {
                rep.lines.push(format!("t = {t}: surviving fraction {:.6} ± {:.1e}", est.survival[j], est.survival_std_err[j]));
            }
        }
        Command::Figures => {
            for (alpha, times) in FIGURE_PANELS {
                let p = params.with_alpha(alpha)?;
                let u = energy_density(&x, &times, &p, cfg.order, cfg.mode, q)?;
                let stem = format!("figures_alpha{alpha}_transport");
                write_field(dir, &stem, &u, alpha, Some(cfg.order), Some(cfg.mode), &mut rep.files)?;
                let d = diffusion_density(&x, &times, &DiffusionParams::from_medium(&p)?, q)?;
                write_field(dir, &format!("figures_alpha{alpha}_diffusion"), &d, alpha, None, None, &mut rep.files)?;
            }
        }
        Command::Validate => {
            let results = run_suite();
            let width = results.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
            for r in &results {
                let pad = width - r.name.chars().count();
                rep.lines.push(format!(
                    "{}{}  {}  {}",
                    r.name,
                    " ".repeat(pad),
                    if r.passed { "PASS" } else { "FAIL" },
                    r.detail
                ));
            }
            rep.validation_failed = results.iter().any(|r| !r.passed);
        }
    }
    Ok(rep)
}

/// Thread count from the flag, then FRACRTE_THREADS.
pub fn thread_count(cfg: &RunConfig) -> Option<usize> {
    cfg.threads.or_else(|| std::env::var("FRACRTE_THREADS").ok().and_then(|s| s.trim().parse().ok()).filter(|&n| n > 0))
}

/// Full CLI entry point; returns the process exit status.
pub fn main_with_args(args: &[String]) -> i32 {
    let cfg = match parse_config(args) {
        Ok(c) => c,
        Err(ParseFailure::Clap(e)) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
        Err(ParseFailure::Usage(e)) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Some(n) = thread_count(&cfg) {
        // Fails only if the pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cfg) {
        Ok(rep) => {
            for l in &rep.lines {
                println!("{l}");
            }
            for f in &rep.files {
                println!("wrote {}", f.display());
            }
            if rep.validation_failed {
                EXIT_FAILURE
            } else {
                EXIT_OK
            }
        }
        Err(RunError::Io(e)) => {
            eprintln!("I/O error: {e}");
            EXIT_IO
        }
        Err(RunError::Numerical(e)) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
