use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use linkvol::potential::Tolerances;
use linkvol_cli::{parse_at, run, Command, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "linkvol", version, about = "Complex volumes of link complements from diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Diagram file (X[...] or Q[...] records)
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Twist-knot index
    #[arg(long, global = true, allow_negative_numbers = true)]
    n: Option<i64>,

    /// Number of random Newton starts
    #[arg(long, global = true, default_value_t = 500)]
    starts: usize,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Start moduli are drawn log-uniformly from [1/radius, radius]
    #[arg(long, global = true, default_value_t = 10.0)]
    radius: f64,

    /// Newton residual tolerance for H [default: 1e-12]
    #[arg(long, global = true)]
    tol_solve: Option<f64>,

    /// Allowed distance of z_k dV/dz_k from r_k pi i [default: 1e-8]
    #[arg(long, global = true)]
    tol_flat: Option<f64>,

    /// Minimum distance of every ratio from 0, 1 and infinity [default: 1e-8]
    #[arg(long, global = true)]
    tol_ess: Option<f64>,

    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Leave the timestamp out of JSON output
    #[arg(long, global = true)]
    no_timestamp: bool,

    /// Evaluate this point instead of searching: "re,im;re,im;..."
    #[arg(long, global = true)]
    at: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Find the essential solutions of a diagram and their complex volumes
    Solve,
    /// Exact pipeline for the twist knot T_n
    Twist,
    /// Triangulation census and edge gluing residuals
    Check,
    /// Reproduce the reference tables with per-cell verdicts
    Tables,
}

fn config(cli: &Cli) -> Result<RunConfig, linkvol_cli::CliError> {
    let command = match cli.command {
        Cmd::Solve => Command::Solve,
        Cmd::Twist => Command::Twist,
        Cmd::Check => Command::Check,
        Cmd::Tables => Command::Tables,
    };
    let d = Tolerances::default();
    let mut cfg = RunConfig::new(command);
    cfg.input_path = cli.input.clone();
    cfg.n = cli.n;
    cfg.n_starts = cli.starts;
    cfg.seed = cli.seed;
    cfg.radius = cli.radius;
    cfg.tolerances = Tolerances {
        solve: cli.tol_solve.unwrap_or(d.solve),
        flat: cli.tol_flat.unwrap_or(d.flat),
        ess: cli.tol_ess.unwrap_or(d.ess),
    };
    cfg.at = cli.at.as_deref().map(parse_at).transpose()?;
    cfg.timestamp = !cli.no_timestamp;
    if cfg.radius.is_nan() || cfg.radius <= 1.0 {
        return Err(linkvol_cli::CliError::Usage("--radius must be greater than 1".into()));
    }
    if cfg.n_starts == 0 {
        return Err(linkvol_cli::CliError::Usage("--starts must be positive".into()));
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(&cli).and_then(|cfg| run(&cfg));
    match result {
        Ok(out) => {
            print!("{}", out.render(cli.json));
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("linkvol: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
