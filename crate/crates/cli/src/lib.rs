//! Command-line surface over the cavity-reservoir entanglement library:
//! grid scans, event-time queries, figure data emission, invariant
//! suites and finite-N reservoir validation.
//!
//! Exit codes: 0 success, 1 invariant or validation failure, 2 usage or
//! configuration error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;

use commands::FigureId;
use config::{Overrides, RunConfig};

/// Command errors carrying their process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file, figure id or horizon violation: exit 2.
    Usage(String),
    /// Invariant or validation failure during computation: exit 1.
    Failure(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn usage_from(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    pub fn failure(msg: impl Into<String>) -> Self {
        CliError::Failure(msg.into())
    }

    pub fn io(e: std::io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cavres",
    version,
    about = "Entanglement dynamics of two cavity photons dissipating into local reservoirs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct CommonArgs {
    /// Initial amplitude of |00> (beta follows from normalization if omitted)
    #[arg(long)]
    alpha: Option<f64>,
    /// Initial amplitude of |11>
    #[arg(long)]
    beta: Option<f64>,
    /// Rotation angle applied to cavity 1, in [0, pi]
    #[arg(long)]
    gamma: Option<f64>,
    /// Dissipation rate
    #[arg(long)]
    kappa: Option<f64>,
    /// Start of the time grid
    #[arg(long)]
    t_min: Option<f64>,
    /// End of the time grid
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of time grid points (inclusive endpoints)
    #[arg(long)]
    t_steps: Option<usize>,
    /// Start of the gamma grid
    #[arg(long)]
    gamma_min: Option<f64>,
    /// End of the gamma grid
    #[arg(long)]
    gamma_max: Option<f64>,
    /// Number of gamma grid points
    #[arg(long)]
    gamma_steps: Option<usize>,
    /// Output format: csv or json
    #[arg(long)]
    format: Option<config::OutputFormat>,
    /// Output path (standard output if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the deterministic sample generator
    #[arg(long)]
    seed: Option<u64>,
    /// Number of random samples per sampled invariant
    #[arg(long)]
    samples: Option<usize>,
    /// Number of reservoir modes
    #[arg(long)]
    n_modes: Option<usize>,
    /// Reservoir bandwidth in units of kappa
    #[arg(long)]
    bandwidth_over_kappa: Option<f64>,
    /// Flat key=value config file; flags win on conflict
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            kappa: self.kappa,
            t_min: self.t_min,
            t_max: self.t_max,
            t_steps: self.t_steps,
            gamma_min: self.gamma_min,
            gamma_max: self.gamma_max,
            gamma_steps: self.gamma_steps,
            format: self.format,
            out: self.out.clone(),
            seed: self.seed,
            samples: self.samples,
            n_modes: self.n_modes,
            bandwidth_over_kappa: self.bandwidth_over_kappa,
        }
    }

    fn resolve(&self) -> Result<RunConfig, CliError> {
        RunConfig::resolve(self.overrides(), self.config.as_deref())
    }

    fn resolve_with_defaults(&self, defaults: Overrides) -> Result<RunConfig, CliError> {
        let merged = merge_with(self.overrides(), defaults);
        RunConfig::resolve(merged, self.config.as_deref())
    }
}

fn merge_with(flags: Overrides, defaults: Overrides) -> Overrides {
    Overrides {
        alpha: flags.alpha.or(defaults.alpha),
        beta: flags.beta.or(defaults.beta),
        gamma: flags.gamma.or(defaults.gamma),
        kappa: flags.kappa.or(defaults.kappa),
        t_min: flags.t_min.or(defaults.t_min),
        t_max: flags.t_max.or(defaults.t_max),
        t_steps: flags.t_steps.or(defaults.t_steps),
        gamma_min: flags.gamma_min.or(defaults.gamma_min),
        gamma_max: flags.gamma_max.or(defaults.gamma_max),
        gamma_steps: flags.gamma_steps.or(defaults.gamma_steps),
        format: flags.format.or(defaults.format),
        out: flags.out.or(defaults.out),
        seed: flags.seed.or(defaults.seed),
        samples: flags.samples.or(defaults.samples),
        n_modes: flags.n_modes.or(defaults.n_modes),
        bandwidth_over_kappa: flags.bandwidth_over_kappa.or(defaults.bandwidth_over_kappa),
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan the (gamma, t) grid and emit every entanglement quantity
    Evolve(CommonArgs),
    /// Sudden-death/birth times, critical angles and the plateau interval
    Times(CommonArgs),
    /// Emit the data behind one figure (1a 1b 1c 1d 2 3a 3b 4a 4b 4c 4d)
    Figure {
        /// Figure identifier
        id: String,
        #[command(flatten)]
        args: CommonArgs,
    },
    /// Run the seeded invariant suites of every module
    Check(CommonArgs),
    /// Validate the finite-N reservoir against the flat-spectrum amplitudes
    ReservoirValidate(CommonArgs),
}

type CommandBody<'a> = Box<dyn FnOnce(&RunConfig, &mut dyn Write) -> Result<(), CliError> + 'a>;

fn dispatch(command: &Command) -> Result<(), CliError> {
    let (cfg, body): (RunConfig, CommandBody) = match command {
        Command::Evolve(args) => (args.resolve()?, Box::new(commands::cmd_evolve)),
        Command::Times(args) => (args.resolve()?, Box::new(commands::cmd_times)),
        Command::Figure { id, args } => {
            let id = FigureId::parse(id)?;
            let cfg = args.resolve_with_defaults(commands::figure_grid_defaults(id))?;
            (
                cfg,
                Box::new(move |cfg, out| commands::cmd_figure(id, cfg, out)),
            )
        }
        Command::Check(args) => (args.resolve()?, Box::new(commands::cmd_check)),
        Command::ReservoirValidate(args) => {
            (args.resolve()?, Box::new(commands::cmd_reservoir_validate))
        }
    };

    match cfg.out.clone() {
        Some(path) => {
            let file = std::fs::File::create(&path)
                .map_err(|e| CliError::usage(format!("cannot create {}: {e}", path.display())))?;
            let mut writer = std::io::BufWriter::new(file);
            body(&cfg, &mut writer)?;
            writer.flush().map_err(CliError::io)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&cfg, &mut lock)?;
            lock.flush().map_err(CliError::io)
        }
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
