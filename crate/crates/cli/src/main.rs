//! `bogoliubov`: datasets for the dilute Bose gas free energy.

mod commands;
mod output;
mod settings;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;
use settings::{parse_config, Settings};

#[derive(Parser, Debug)]
#[command(name = "bogoliubov", version, about = "Free energy of the dilute Bose gas (units hbar = 2m = kB = 1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Free-gas and zero-temperature constants
    Constants,
    /// Reduced integrals I1..I4 at (d, sigma, theta, s)
    Integrals,
    /// Scattering length and nu of a potential
    Scattering,
    /// Critical k, condensate jump and h1
    CriticalTemp,
    /// Maxwell construction of the grand-canonical curve and h2
    Maxwell,
    /// Free energy density at one (T, rho)
    FreeEnergy,
    /// Free energy over a (T, rho) grid
    PhaseDiagram,
    /// Momentum profiles gamma, alpha, beta of the minimizer
    MomentumDist,
    /// Reduced free energy f(k, sigma) for three k values
    Figure1,
    /// Grand-canonical curve g(k) and its convex hull
    Figure2,
    /// Zero-temperature (rho a)^(5/2) coefficient
    Lhy,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Integrals => "integrals",
            Command::Scattering => "scattering",
            Command::CriticalTemp => "critical-temp",
            Command::Maxwell => "maxwell",
            Command::FreeEnergy => "free-energy",
            Command::PhaseDiagram => "phase-diagram",
            Command::MomentumDist => "momentum-dist",
            Command::Figure1 => "figure1",
            Command::Figure2 => "figure2",
            Command::Lhy => "lhy",
        }
    }
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// Born ratio V(0)/a; accepts multiples of pi such as 8pi
    #[arg(long, global = true, allow_hyphen_values = true)]
    nu: Option<String>,
    /// Temperature
    #[arg(long = "T", global = true, allow_hyphen_values = true)]
    t: Option<String>,
    /// Density
    #[arg(long, global = true, allow_hyphen_values = true)]
    rho: Option<String>,
    /// Scattering length
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<String>,
    /// square:V0,R or gaussian:V0,R
    #[arg(long, global = true)]
    potential: Option<String>,
    /// Output file (default: stdout, or $BOGOLIUBOV_OUT_DIR/<command>.<ext>)
    #[arg(long, global = true)]
    out: Option<String>,
    /// csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// Number of grid points
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Relative quadrature tolerance
    #[arg(long, global = true)]
    tol: Option<String>,
    /// key=value file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    d: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    sigma: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    s: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    rho0: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    t0: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long, global = true)]
    pmax: Option<String>,
    #[arg(long, global = true)]
    rmax: Option<String>,
    #[arg(long = "t-min", global = true)]
    t_min: Option<String>,
    #[arg(long = "t-max", global = true)]
    t_max: Option<String>,
    #[arg(long = "rho-min", global = true)]
    rho_min: Option<String>,
    #[arg(long = "rho-max", global = true)]
    rho_max: Option<String>,
    #[arg(long = "rho-grid", global = true)]
    rho_grid: Option<String>,
    /// Linear tilt of the grand-canonical curve (figure2)
    #[arg(long, global = true, allow_hyphen_values = true)]
    c: Option<String>,
    /// Evaluate sweeps on one thread
    #[arg(long, global = true)]
    sequential: bool,
}

impl Opts {
    fn into_map(self) -> BTreeMap<String, String> {
        let pairs = [
            ("nu", self.nu),
            ("T", self.t),
            ("rho", self.rho),
            ("a", self.a),
            ("potential", self.potential),
            ("out", self.out),
            ("format", self.format),
            ("grid", self.grid),
            ("tol", self.tol),
            ("d", self.d),
            ("sigma", self.sigma),
            ("theta", self.theta),
            ("s", self.s),
            ("rho0", self.rho0),
            ("t0", self.t0),
            ("delta", self.delta),
            ("pmax", self.pmax),
            ("rmax", self.rmax),
            ("t-min", self.t_min),
            ("t-max", self.t_max),
            ("rho-min", self.rho_min),
            ("rho-max", self.rho_max),
            ("rho-grid", self.rho_grid),
            ("c", self.c),
            ("sequential", self.sequential.then(|| "true".to_string())),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))).collect()
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.opts.config {
        Some(path) => parse_config(path)?,
        None => BTreeMap::new(),
    };
    let command = cli.command;
    let settings = Settings::new(cli.opts.into_map(), config);
    let format = settings.format()?;
    let dataset = match command {
        Command::Constants => commands::constants(&settings),
        Command::Integrals => commands::integrals(&settings),
        Command::Scattering => commands::scattering(&settings),
        Command::CriticalTemp => commands::critical_temp(&settings),
        Command::Maxwell => commands::maxwell(&settings),
        Command::FreeEnergy => commands::free_energy(&settings),
        Command::PhaseDiagram => commands::phase_diagram(&settings),
        Command::MomentumDist => commands::momentum_dist(&settings),
        Command::Figure1 => commands::figure1(&settings),
        Command::Figure2 => commands::figure2(&settings),
        Command::Lhy => commands::lhy(&settings),
    }?;
    let text = dataset.render(format);
    let target = settings.out().or_else(|| {
        std::env::var_os("BOGOLIUBOV_OUT_DIR")
            .map(|dir| PathBuf::from(dir).join(format!("{}.{}", command.name(), format.extension())))
    });
    match target {
        Some(path) => fs::write(&path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = stdout.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {}", msg.replace('\n', " "));
            ExitCode::from(2)
        }
        Err(CliError::Numeric(e)) => {
            eprintln!("numeric failure: {}", e.to_string().replace('\n', " "));
            ExitCode::from(3)
        }
    }
}
