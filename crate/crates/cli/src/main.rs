use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wwrcva::{CvaError, RunConfig};
use wwrcva_cli::{
    parse_methods, parse_rho_grid, render_g1, run_g1_table, run_table, Format, Quantity, RunSpec, TABLE_ETAS,
};

/// CVA of a European call under wrong-way risk.
#[derive(Parser)]
#[command(name = "wwrcva", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Defaultable call price per method at the configured correlation.
    Price(RunArgs),
    /// CVA per method at the configured correlation.
    Cva(RunArgs),
    /// CVA per method over a correlation grid.
    Table(RunArgs),
    /// First-order correlation coefficient g1 for several intensity volatilities.
    G1(G1Args),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or markdown.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Fill the runtime column.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated subset of corr-exp, vol-exp, drift-adj, mc, independence, or `all`.
    #[arg(long, default_value = "all")]
    methods: String,
    /// Correlations: `a,b,c` or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<String>,
    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo paths.
    #[arg(long)]
    paths: Option<usize>,
    /// Monte Carlo time steps.
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args)]
struct G1Args {
    #[command(flatten)]
    common: Common,
    /// Intensity volatilities, comma separated.
    #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5")]
    eta: String,
}

fn load(common: &Common) -> Result<(RunConfig, Format), CvaError> {
    Ok((RunConfig::from_path(&common.config)?, common.format.parse()?))
}

fn emit(common: &Common, text: &str) -> Result<(), CvaError> {
    match &common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CvaError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_methods(args: &RunArgs, quantity: Quantity, sweep: bool) -> Result<bool, CvaError> {
    let (mut config, format) = load(&args.common)?;
    if let Some(seed) = args.seed {
        config.mc.seed = seed;
    }
    if let Some(paths) = args.paths {
        config.mc.paths = paths;
    }
    if let Some(steps) = args.steps {
        config.mc.steps = steps;
    }
    let rho_grid = match (&args.rho, sweep) {
        (Some(text), _) => parse_rho_grid(text)?,
        (None, true) => wwrcva_cli::TABLE_RHOS.to_vec(),
        (None, false) => vec![config.correlation.rho],
    };
    let spec = RunSpec {
        methods: parse_methods(&args.methods)?,
        rho_grid,
        output: args.common.out.clone(),
        format,
        quantity,
        timings: args.common.timings,
        ..RunSpec::new(config)
    };
    let table = run_table(&spec)?;
    emit(&args.common, &table.render(format))?;
    for row in &table.rows {
        if let Err(msg) = &row.value {
            eprintln!("error: {} at rho = {}: {msg}", row.method, row.rho);
        }
    }
    Ok(!table.has_failures())
}

fn run_g1(args: &G1Args) -> Result<bool, CvaError> {
    let (config, format) = load(&args.common)?;
    let etas = if args.eta.trim().is_empty() {
        TABLE_ETAS.to_vec()
    } else {
        args.eta
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| CvaError::Config(format!("invalid eta '{s}'"))))
            .collect::<Result<Vec<_>, _>>()?
    };
    let rows = run_g1_table(&config, &etas)?;
    emit(&args.common, &render_g1(&rows, format, args.common.timings))?;
    for r in &rows {
        if let Err(msg) = &r.g1 {
            eprintln!("error: g1 at eta = {}: {msg}", r.eta);
        }
    }
    Ok(rows.iter().all(|r| r.g1.is_ok()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Price(a) => run_methods(a, Quantity::Price, false),
        Command::Cva(a) => run_methods(a, Quantity::Cva, false),
        Command::Table(a) => run_methods(a, Quantity::Cva, true),
        Command::G1(a) => run_g1(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
