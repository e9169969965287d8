//! Time sweeps and conditional-entropy surfaces written as CSV.
//!
//! Settings come from three layers: built-in defaults, a flat `key = value`
//! config file, and command-line flags, later layers winning.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::analytic;
use crate::error::Error;
use crate::model::{initial_state, total_hamiltonian, Propagator, SystemSpec, BETA_OMEGA_B_KELVIN, DEFAULT_D_REF, DEFAULT_G_REF};
use crate::optimizer::{EvolutionaryStrategy, GridConfig, OptimizerConfig};
use crate::qinfo::{discord, BlochVector, ConditionalEntropy, DiscordResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    Numeric,
    Both,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "analytic" => Ok(Mode::Analytic),
            "numeric" => Ok(Mode::Numeric),
            "both" => Ok(Mode::Both),
            other => Err(format!("unknown mode '{other}' (analytic | numeric | both)")),
        }
    }
}

/// Why a run stopped; maps onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("numeric failure at t = {t_s} s: {source}")]
    Numeric { t_s: f64, source: Error },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::InvalidConfig(_) => 2,
            RunError::Numeric { .. } => 3,
            RunError::Io(_) => 1,
        }
    }
}

fn invalid(msg: impl Into<String>) -> RunError {
    RunError::InvalidConfig(msg.into())
}

/// Partially specified settings; every field is optional so layers can be merged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub n_chain: Option<usize>,
    pub b2_over_a2: Option<f64>,
    pub temperature_k: Option<f64>,
    pub t_start_ms: Option<f64>,
    pub t_end_ms: Option<f64>,
    pub t_steps: Option<usize>,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub fig2: Option<bool>,
    pub d_ref: Option<f64>,
    pub g_ref: Option<f64>,
    pub beta_omega_a: Option<f64>,
    pub beta_omega_b: Option<f64>,
    pub population: Option<usize>,
    pub elites: Option<usize>,
    pub mutation_sigma0: Option<f64>,
    pub sigma_decay: Option<f64>,
    pub generations: Option<usize>,
    pub restarts: Option<usize>,
    pub n_theta: Option<usize>,
    pub n_phi: Option<usize>,
}

fn parse<V: FromStr>(key: &str, value: &str) -> Result<V, RunError> {
    value
        .trim()
        .parse()
        .map_err(|_| invalid(format!("cannot parse value '{value}' for key '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, RunError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(invalid(format!("cannot parse boolean '{value}' for key '{key}'"))),
    }
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), RunError> {
        match key {
            "n_chain" => self.n_chain = Some(parse(key, value)?),
            "b2_over_a2" => self.b2_over_a2 = Some(parse(key, value)?),
            "temperature_k" => self.temperature_k = Some(parse(key, value)?),
            "t_start_ms" => self.t_start_ms = Some(parse(key, value)?),
            "t_end_ms" => self.t_end_ms = Some(parse(key, value)?),
            "t_steps" => self.t_steps = Some(parse(key, value)?),
            "mode" => self.mode = Some(value.parse().map_err(invalid)?),
            "seed" => self.seed = Some(parse(key, value)?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "fig2" => self.fig2 = Some(parse_bool(key, value)?),
            "d_ref" => self.d_ref = Some(parse(key, value)?),
            "g_ref" => self.g_ref = Some(parse(key, value)?),
            "beta_omega_a" => self.beta_omega_a = Some(parse(key, value)?),
            "beta_omega_b" => self.beta_omega_b = Some(parse(key, value)?),
            "population" => self.population = Some(parse(key, value)?),
            "elites" => self.elites = Some(parse(key, value)?),
            "mutation_sigma0" => self.mutation_sigma0 = Some(parse(key, value)?),
            "sigma_decay" => self.sigma_decay = Some(parse(key, value)?),
            "generations" => self.generations = Some(parse(key, value)?),
            "restarts" => self.restarts = Some(parse(key, value)?),
            "n_theta" => self.n_theta = Some(parse(key, value)?),
            "n_phi" => self.n_phi = Some(parse(key, value)?),
            _ => return Err(invalid(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Flat `key = value` lines; `#` starts a comment.
    pub fn from_config_text(text: &str) -> Result<Self, RunError> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected key = value", lineno + 1)))?;
            s.set(key.trim(), value)?;
        }
        Ok(s)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merge(self, over: Settings) -> Settings {
        macro_rules! pick {
            ($($f:ident),*) => { Settings { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            n_chain, b2_over_a2, temperature_k, t_start_ms, t_end_ms, t_steps, mode, seed, out, fig2, d_ref,
            g_ref, beta_omega_a, beta_omega_b, population, elites, mutation_sigma0, sigma_decay, generations,
            restarts, n_theta, n_phi
        )
    }

    pub fn into_scenario(self) -> Result<Scenario, RunError> {
        let defaults = OptimizerConfig::default();
        let optimizer = OptimizerConfig {
            population: self.population.unwrap_or(defaults.population),
            elites: self.elites.unwrap_or(defaults.elites),
            mutation_sigma0: self.mutation_sigma0.unwrap_or(defaults.mutation_sigma0),
            sigma_decay: self.sigma_decay.unwrap_or(defaults.sigma_decay),
            generations: self.generations.unwrap_or(defaults.generations),
            restarts: self.restarts.unwrap_or(defaults.restarts),
            seed: self.seed.unwrap_or(defaults.seed),
        };
        let grid_defaults = GridConfig::default();
        let scenario = Scenario {
            n_chain: self.n_chain.unwrap_or(2),
            b2_over_a2: self.b2_over_a2.unwrap_or(0.75),
            temperature_k: self.temperature_k.unwrap_or(0.001),
            t_start: self.t_start_ms.unwrap_or(0.0) * 1e-3,
            t_end: self.t_end_ms.unwrap_or(2.0) * 1e-3,
            t_steps: self.t_steps.unwrap_or(50),
            mode: self.mode.unwrap_or(Mode::Numeric),
            optimizer,
            output_path: self.out,
            fig2: self.fig2.unwrap_or(false),
            grid: GridConfig {
                n_theta: self.n_theta.unwrap_or(grid_defaults.n_theta),
                n_phi: self.n_phi.unwrap_or(grid_defaults.n_phi),
                refine: false,
            },
            d_ref: self.d_ref.unwrap_or(DEFAULT_D_REF),
            g_ref: self.g_ref.unwrap_or(DEFAULT_G_REF),
            beta_omega_a: self.beta_omega_a,
            beta_omega_b: self.beta_omega_b,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub n_chain: usize,
    pub b2_over_a2: f64,
    pub temperature_k: f64,
    /// Seconds.
    pub t_start: f64,
    /// Seconds.
    pub t_end: f64,
    pub t_steps: usize,
    pub mode: Mode,
    pub optimizer: OptimizerConfig,
    /// `None` writes to stdout.
    pub output_path: Option<PathBuf>,
    /// Emit the conditional-entropy surface at `t_start` instead of a sweep.
    pub fig2: bool,
    pub grid: GridConfig,
    pub d_ref: f64,
    pub g_ref: f64,
    /// Overrides `beta omega_A` (defaults to `beta omega_B`).
    pub beta_omega_a: Option<f64>,
    /// Overrides the `0.015 / T` mapping.
    pub beta_omega_b: Option<f64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), RunError> {
        if self.t_steps < 1 {
            return Err(invalid("t_steps must be >= 1"));
        }
        if !(self.t_start >= 0.0 && self.t_end >= self.t_start && self.t_end.is_finite()) {
            return Err(invalid("need 0 <= t_start <= t_end"));
        }
        if self.beta_omega_b.is_none() && !(self.temperature_k.is_finite() && self.temperature_k > 0.0) {
            return Err(invalid("temperature must be positive"));
        }
        if !(self.b2_over_a2.is_finite() && self.b2_over_a2 >= 0.0) {
            return Err(invalid("b2_over_a2 must be >= 0"));
        }
        if self.mode == Mode::Analytic && self.n_chain != 2 {
            return Err(invalid("analytic mode requires n_chain = 2"));
        }
        if self.fig2 && self.n_chain != 2 {
            return Err(invalid("surface mode requires n_chain = 2"));
        }
        if self.n_chain > 9 {
            return Err(invalid("n_chain above 9 exceeds the dense 2^10 limit"));
        }
        self.optimizer.validate().map_err(|e| invalid(e.to_string()))?;
        self.grid.validate().map_err(|e| invalid(e.to_string()))?;
        let spec = self.system_spec();
        spec.validate().map_err(|e| invalid(e.to_string()))?;
        crate::model::couplings_from_geometry(&spec).map_err(|e| invalid(e.to_string()))?;
        Ok(())
    }

    pub fn beta_omega_b(&self) -> f64 {
        self.beta_omega_b.unwrap_or(BETA_OMEGA_B_KELVIN / self.temperature_k)
    }

    pub fn system_spec(&self) -> SystemSpec<f64> {
        let bw_b = self.beta_omega_b();
        SystemSpec {
            n_chain: self.n_chain,
            a: 1.0,
            b: self.b2_over_a2.sqrt(),
            beta_omega_a: self.beta_omega_a.unwrap_or(bw_b),
            beta_omega_b: bw_b,
            g_ref: self.g_ref,
            d_ref: self.d_ref,
        }
    }

    /// `t_steps` evenly spaced points from `t_start` to `t_end` inclusive.
    pub fn times(&self) -> Vec<f64> {
        if self.t_steps == 1 {
            return vec![self.t_start];
        }
        let span = self.t_end - self.t_start;
        (0..self.t_steps)
            .map(|k| self.t_start + span * k as f64 / (self.t_steps - 1) as f64)
            .collect()
    }

    /// Impurity coupling of the first chain spin, the single frequency of the 2+1 system.
    pub fn g_first(&self) -> f64 {
        crate::model::couplings_from_geometry(&self.system_spec())
            .map(|c| c.g[0])
            .unwrap_or(f64::NAN)
    }
}

/// One time point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub t: f64,
    pub numeric: Option<DiscordResult<f64>>,
    pub analytic: Option<f64>,
}

impl Row {
    pub fn abs_diff(&self) -> Option<f64> {
        Some((self.numeric.as_ref()?.discord - self.analytic?).abs())
    }
}

#[derive(Debug, Clone)]
pub struct Summary {
    pub rows: Vec<Row>,
    pub max_abs_diff: Option<f64>,
    pub elapsed: Duration,
}

/// `%.12g`-style formatting: 12 significant digits, no trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-5..12).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{m}e{exp}");
    }
    let decimals = (11 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<(), RunError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub const NUMERIC_COLUMNS: [&str; 12] = [
    "t_s",
    "t_ms",
    "discord_bits",
    "mutual_info_bits",
    "min_cond_entropy_bits",
    "z1",
    "z2",
    "z3",
    "p0",
    "entropy_total_bits",
    "entropy_A_bits",
    "entropy_B_bits",
];

pub fn render_csv(mode: Mode, rows: &[Row]) -> String {
    let mut header: Vec<&str> = match mode {
        Mode::Analytic => vec!["t_s", "t_ms"],
        _ => NUMERIC_COLUMNS.to_vec(),
    };
    match mode {
        Mode::Analytic => header.push("discord_analytic_bits"),
        Mode::Both => header.extend(["discord_analytic_bits", "abs_diff_bits"]),
        Mode::Numeric => {}
    }
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let mut cells = vec![fmt_sig(row.t), fmt_sig(row.t * 1e3)];
        if let Some(r) = &row.numeric {
            cells.extend(
                [
                    r.discord,
                    r.mutual_information,
                    r.min_conditional_entropy,
                    r.argmin.z1,
                    r.argmin.z2,
                    r.argmin.z3,
                    r.p0_at_argmin,
                    r.entropy_total,
                    r.entropy_a,
                    r.entropy_b,
                ]
                .map(fmt_sig),
            );
        }
        if let Some(a) = row.analytic {
            cells.push(fmt_sig(a));
        }
        if let Some(d) = row.abs_diff() {
            cells.push(fmt_sig(d));
        }
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Computes every time point of the sweep without writing anything.
pub fn sweep(s: &Scenario) -> Result<Vec<Row>, RunError> {
    s.validate()?;
    let spec = s.system_spec();
    let times = s.times();
    let numeric = s.mode != Mode::Analytic;
    let g = s.g_first();

    let propagator = if numeric {
        let h = total_hamiltonian(&spec).map_err(|e| invalid(e.to_string()))?;
        let rho0 = initial_state(&spec).map_err(|e| invalid(e.to_string()))?;
        Some(Propagator::new(&h, &rho0).map_err(|e| RunError::Numeric { t_s: 0.0, source: e })?)
    } else {
        None
    };
    let es = EvolutionaryStrategy::new(s.optimizer).map_err(|e| invalid(e.to_string()))?;

    let results: Vec<Result<Row, RunError>> = times
        .par_iter()
        .map(|&t| {
            let numeric = match &propagator {
                Some(p) => {
                    let fail = |source| RunError::Numeric { t_s: t, source };
                    let rho = p.state_at(t).map_err(fail)?;
                    Some(discord(&rho, &es).map_err(fail)?)
                }
                None => None,
            };
            let analytic = (s.mode != Mode::Numeric).then(|| analytic::discord_analytic(spec.beta_omega_b, g, t));
            Ok(Row { t, numeric, analytic })
        })
        .collect();
    // Report the earliest failing time point.
    results.into_iter().collect()
}

pub fn run_scenario(s: &Scenario) -> Result<Summary, RunError> {
    let start = Instant::now();
    let rows = sweep(s)?;
    write_output(&s.output_path, &render_csv(s.mode, &rows))?;
    let max_abs_diff = rows
        .iter()
        .filter_map(Row::abs_diff)
        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
    Ok(Summary {
        rows,
        max_abs_diff,
        elapsed: start.elapsed(),
    })
}

/// One point of the conditional-entropy surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub z: BlochVector<f64>,
    pub cond_entropy: f64,
}

/// Conditional entropy on the `z2 >= 0` hemisphere at time `t`, plus the
/// index of the minimum (first found on ties).
pub fn fig2_surface(s: &Scenario, t: f64, grid: GridConfig) -> Result<(Vec<SurfacePoint>, usize), RunError> {
    s.validate()?;
    grid.validate().map_err(|e| invalid(e.to_string()))?;
    let spec = s.system_spec();
    let fail = |source| RunError::Numeric { t_s: t, source };
    let h = total_hamiltonian(&spec).map_err(|e| invalid(e.to_string()))?;
    let rho0 = initial_state(&spec).map_err(|e| invalid(e.to_string()))?;
    let rho = Propagator::new(&h, &rho0).and_then(|p| p.state_at(t)).map_err(fail)?;
    let objective = ConditionalEntropy::new(&rho).map_err(fail)?;

    let pi = std::f64::consts::PI;
    let mut dirs = Vec::with_capacity(grid.n_theta * grid.n_phi);
    for i in 0..grid.n_theta {
        let theta = pi * i as f64 / (grid.n_theta - 1) as f64;
        for j in 0..grid.n_phi {
            let phi = pi * j as f64 / (grid.n_phi - 1) as f64;
            let mut z = BlochVector::from_angles(theta, phi);
            // sin(pi) is not exactly zero; keep the hemisphere closed.
            z.z2 = z.z2.max(0.0);
            dirs.push(z);
        }
    }
    let values: Vec<Result<f64, Error>> = dirs
        .par_iter()
        .map(|z| objective.try_evaluate(z).map(|(_, s)| s))
        .collect();
    let mut points = Vec::with_capacity(dirs.len());
    let mut best = 0;
    for (k, (z, v)) in dirs.into_iter().zip(values).enumerate() {
        let v = v.map_err(fail)?;
        if v < points.get(best).map_or(f64::INFINITY, |p: &SurfacePoint| p.cond_entropy) {
            best = k;
        }
        points.push(SurfacePoint { z, cond_entropy: v });
    }
    Ok((points, best))
}

pub fn render_surface_csv(points: &[SurfacePoint], min_index: usize) -> String {
    let mut out = String::from("z1,z2,z3,cond_entropy_bits,is_min\n");
    for (k, p) in points.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_sig(p.z.z1),
            fmt_sig(p.z.z2),
            fmt_sig(p.z.z3),
            fmt_sig(p.cond_entropy),
            u8::from(k == min_index)
        );
    }
    out
}

pub fn run_fig2_surface(s: &Scenario, t: f64, grid: GridConfig) -> Result<SurfacePoint, RunError> {
    let (points, best) = fig2_surface(s, t, grid)?;
    write_output(&s.output_path, &render_surface_csv(&points, best))?;
    Ok(points[best])
}
