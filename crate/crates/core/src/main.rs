use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use optosqueeze::harness::{self, commands::Output, SweepSpec, Tier};
use optosqueeze::{Config, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "optosqueeze", version, about = "Mechanical squeezing in a double-cavity optomechanical system")]
struct Cli {
    /// TOML configuration; the built-in reference point when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for sweeps. Output does not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write an SVG plot next to `--out`.
    #[arg(long, requires = "out")]
    svg: bool,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct GridArgs {
    /// START:STOP:N
    #[arg(long)]
    grid: Option<String>,

    /// v1,v2,...
    #[arg(long)]
    grid_list: Option<String>,
}

impl GridArgs {
    fn values(&self) -> Result<Vec<f64>> {
        match (&self.grid, &self.grid_list) {
            (Some(g), _) => harness::parse_linspace(g),
            (None, Some(l)) => harness::parse_list(l),
            (None, None) => Err(Error::Config("a grid is required".into())),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Steady mean-field amplitudes against drive power (watts).
    MeanfieldSweep {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Var(X_b) from the ground state against omega_m t.
    VarianceEvolution {
        #[arg(long, default_value = "gaussian-full")]
        tier: String,
        #[arg(long, default_value_t = 500.0)]
        t_final: f64,
        /// Fock cutoffs n1,n2,... for Fock tiers.
        #[arg(long)]
        dims: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Steady Var(X_b) against the intercavity coupling J (units of omega_m).
    SweepJ {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "gaussian-full")]
        tier: String,
        #[arg(long)]
        dims: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Steady Var(X_b) against drive power (watts).
    SweepP {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "gaussian-full")]
        tier: String,
        #[arg(long)]
        dims: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Every derived quantity at the configured point.
    Report {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fock steady state against its Gaussian counterpart.
    OracleCompare {
        #[arg(long, default_value = "fock-effective")]
        tier: String,
        #[arg(long)]
        dims: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_dims(dims: &Option<String>) -> Result<Option<Vec<usize>>> {
    dims.as_deref()
        .map(|s| {
            s.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Config(format!("Fock cutoff `{}` is not a positive integer", v.trim())))
                })
                .collect()
        })
        .transpose()
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes the CSV (and SVG) and returns the number of failed rows.
fn emit(output: &OutputArgs, config: &Config, out: Output) -> Result<usize> {
    write_text(output.out.as_deref(), &out.table.to_csv(config))?;
    if output.svg {
        let path = output.out.as_ref().expect("clap enforces --out").with_extension("svg");
        write_text(Some(&path), &out.svg)?;
    }
    Ok(out.table.failed_rows)
}

fn sweep(
    config: &Config,
    workers: usize,
    parameter: &str,
    grid: &GridArgs,
    tier: &str,
    dims: &Option<String>,
    output: &OutputArgs,
) -> Result<usize> {
    let spec = SweepSpec::new(parameter, grid.values()?, tier.parse()?)?;
    let dims = parse_dims(dims)?;
    emit(output, config, harness::parameter_sweep(config, &spec, dims.as_deref(), workers)?)
}

fn run(cli: &Cli) -> Result<usize> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::reference(),
    };
    match &cli.command {
        Command::MeanfieldSweep { grid, output } => {
            emit(output, &config, harness::meanfield_sweep(&config, &grid.values()?)?)
        }
        Command::VarianceEvolution { tier, t_final, dims, output } => {
            let tier: Tier = tier.parse()?;
            let dims = parse_dims(dims)?;
            emit(output, &config, harness::variance_evolution(&config, tier, *t_final, dims.as_deref())?)
        }
        Command::SweepJ { grid, tier, dims, output } => {
            sweep(&config, cli.workers, "coupling_j", grid, tier, dims, output)
        }
        Command::SweepP { grid, tier, dims, output } => {
            sweep(&config, cli.workers, "drive_power", grid, tier, dims, output)
        }
        Command::Report { out } => {
            write_text(out.as_deref(), &harness::report(&config)?)?;
            Ok(0)
        }
        Command::OracleCompare { tier, dims, out } => {
            let dims = parse_dims(dims)?;
            write_text(out.as_deref(), &harness::oracle_compare(&config, tier.parse()?, dims.as_deref())?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    optosqueeze::linalg::use_sequential_dense();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors are hard errors; code 2 is reserved for partial sweeps.
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failed) => {
            eprintln!("{failed} row(s) did not evaluate cleanly; see the status column");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
