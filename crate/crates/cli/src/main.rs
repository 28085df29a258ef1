use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use unidisc::report::{self, Command, Format, RunConfig, RunError};

#[derive(Parser, Debug)]
#[command(name = "unidisc", version, about = "Zeros, criterion sums and certificates for normalized Bessel, Struve and Lommel functions")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate a function or one of its derivatives.
    Eval(Common),
    /// Tabulate positive zeros (CSV by default).
    Zeros(Common),
    /// Criterion sum with its tail bound over a zero table.
    Criterion(Common),
    /// Solve for a critical order.
    Critical(Common),
    /// Issue a starlikeness or convexity certificate.
    Certify(Common),
    /// Sample a geometric functional on a polar grid.
    Probe(Common),
    /// Recompute the reference constants and certifications.
    Reproduce(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Function or zero family
    #[arg(long)]
    family: Option<String>,
    /// Order nu or mu
    #[arg(long, visible_aliases = ["nu", "mu"], allow_negative_numbers = true)]
    param: Option<f64>,
    /// Number of zeros
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// json, csv or text
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Critical order: nu_star, nu0, nu1
    #[arg(long)]
    id: Option<String>,
    /// starlike_ctc or convex_all_derivatives
    #[arg(long)]
    mode: Option<String>,
    /// starlike_re, convex_re or deriv_re
    #[arg(long)]
    functional: Option<String>,
    /// Derivative order
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    /// Imaginary part of the argument
    #[arg(long, allow_negative_numbers = true)]
    y: Option<f64>,
    /// Comma-separated probe radii
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long)]
    angles: Option<usize>,
    /// Also check the certificate flip at value +/- delta
    #[arg(long)]
    delta: Option<f64>,
    /// Use secant steps in the critical-order solver
    #[arg(long)]
    secant: bool,
    /// Disable the thread pool
    #[arg(long)]
    sequential: bool,
}

impl Cmd {
    fn into_config(self) -> RunConfig {
        let (command, c) = match self {
            Cmd::Eval(c) => (Command::Eval, c),
            Cmd::Zeros(c) => (Command::Zeros, c),
            Cmd::Criterion(c) => (Command::Criterion, c),
            Cmd::Critical(c) => (Command::Critical, c),
            Cmd::Certify(c) => (Command::Certify, c),
            Cmd::Probe(c) => (Command::Probe, c),
            Cmd::Reproduce(c) => (Command::Reproduce, c),
        };
        RunConfig {
            command,
            family: c.family,
            param: c.param,
            n: c.n,
            tol: c.tol,
            format: c.format,
            output: c.output,
            id: c.id,
            mode: c.mode,
            functional: c.functional,
            k: c.k,
            x: c.x,
            y: c.y,
            radii: c.radii,
            angles: c.angles,
            delta: c.delta,
            secant: c.secant,
            sequential: c.sequential,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = cli.command.into_config();
    let outcome = report::run(&cfg).and_then(|artifact| {
        match &cfg.output {
            Some(path) => fs::write(path, artifact.body.as_bytes()),
            None => std::io::stdout().lock().write_all(artifact.body.as_bytes()),
        }
        .map_err(|e| RunError::Usage(format!("cannot write output: {e}")))
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprint!("{}", e.diagnostic(cfg.command));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
