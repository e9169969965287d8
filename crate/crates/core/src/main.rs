use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spin_discord::scenario::{run_fig2_surface, run_scenario, Mode, RunError, Settings};

/// Quantum discord between a dipolar spin chain and an impurity spin.
///
/// Writes one CSV row per time point (or, with --fig2, the conditional
/// entropy over the z2 >= 0 hemisphere at --t-start-ms).
/// Exit codes: 0 ok, 2 bad configuration, 3 numeric failure.
#[derive(Parser, Debug)]
#[command(name = "spin-discord", version)]
struct Cli {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_chain: Option<usize>,
    /// Impurity offset squared over chain spacing squared.
    #[arg(long)]
    b2_over_a2: Option<f64>,
    #[arg(long)]
    temperature_k: Option<f64>,
    #[arg(long)]
    t_start_ms: Option<f64>,
    #[arg(long)]
    t_end_ms: Option<f64>,
    #[arg(long)]
    t_steps: Option<usize>,
    /// analytic | numeric | both
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    fig2: bool,
    #[arg(long)]
    n_theta: Option<usize>,
    #[arg(long)]
    n_phi: Option<usize>,
    /// Chain coupling at unit spacing, rad/s.
    #[arg(long)]
    d_ref: Option<f64>,
    /// Impurity coupling at unit distance, rad/s.
    #[arg(long)]
    g_ref: Option<f64>,
    #[arg(long)]
    beta_omega_a: Option<f64>,
    #[arg(long)]
    beta_omega_b: Option<f64>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

impl Cli {
    fn settings(self) -> Settings {
        Settings {
            n_chain: self.n_chain,
            b2_over_a2: self.b2_over_a2,
            temperature_k: self.temperature_k,
            t_start_ms: self.t_start_ms,
            t_end_ms: self.t_end_ms,
            t_steps: self.t_steps,
            mode: self.mode,
            seed: self.seed,
            out: self.out,
            fig2: self.fig2.then_some(true),
            d_ref: self.d_ref,
            g_ref: self.g_ref,
            beta_omega_a: self.beta_omega_a,
            beta_omega_b: self.beta_omega_b,
            n_theta: self.n_theta,
            n_phi: self.n_phi,
            ..Settings::default()
        }
    }
}

fn run(cli: Cli) -> Result<(), RunError> {
    let base = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| RunError::InvalidConfig(format!("{}: {e}", path.display())))?;
            Settings::from_config_text(&text)?
        }
        None => Settings::default(),
    };
    let scenario = base.merge(cli.settings()).into_scenario()?;

    if scenario.fig2 {
        let min = run_fig2_surface(&scenario, scenario.t_start, scenario.grid)?;
        eprintln!(
            "minimum S(A|B) = {:.9} bits at z = ({:.6}, {:.6}, {:.6})",
            min.cond_entropy, min.z.z1, min.z.z2, min.z.z3
        );
        return Ok(());
    }

    let summary = run_scenario(&scenario)?;
    eprintln!("{} time points in {:.2?}", summary.rows.len(), summary.elapsed);
    if let Some(d) = summary.max_abs_diff {
        eprintln!("max |numeric - analytic| = {d:.3e} bits");
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
