use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use knot_energy_cli::{run, Center, CliError, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "knot-energy", version, about = "Moebius energy experiments on closed curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's `output`, else `.`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    Energy(Common),
    Decompose(Common),
    MollifySweep(Common),
    ReparamConverge(Common),
    GammaSweep(Common),
    Invert {
        #[command(flatten)]
        common: Common,
        /// `on-curve:T` or `point:X,Y[,Z..]`.
        #[arg(long)]
        center: Option<Center>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        rdom: Option<f64>,
    },
    Inscribe {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        x0: Option<f64>,
    },
    Sobolev(Common),
    /// Runs whatever experiment the config names.
    Run(Common),
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let (common, expected) = match &cli.command {
        Command::Energy(c) => (c, Some("energy")),
        Command::Decompose(c) => (c, Some("decompose")),
        Command::MollifySweep(c) => (c, Some("mollify-sweep")),
        Command::ReparamConverge(c) => (c, Some("reparam-converge")),
        Command::GammaSweep(c) => (c, Some("gamma-sweep")),
        Command::Invert { common, .. } => (common, Some("invert")),
        Command::Inscribe { common, .. } => (common, Some("inscribe")),
        Command::Sobolev(c) => (c, Some("sobolev")),
        Command::Run(c) => (c, None),
    };
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(kind) = expected {
        if cfg.experiment.kind() != kind {
            return Err(CliError::Validation(format!(
                "config describes a '{}' experiment, not '{kind}'",
                cfg.experiment.kind()
            )));
        }
    }
    match (&cli.command, &mut cfg.experiment) {
        (
            Command::Invert {
                center: c,
                radius: r,
                rdom: d,
                ..
            },
            Experiment::Invert {
                center, radius, rdom, ..
            },
        ) => {
            if let Some(c) = c {
                *center = c.clone();
            }
            if let Some(r) = r {
                *radius = *r;
            }
            if let Some(d) = d {
                *rdom = *d;
            }
        }
        (Command::Inscribe { n: nn, x0: xx, .. }, Experiment::Inscribe { n, x0, .. }) => {
            if let Some(v) = nn {
                *n = *v;
            }
            if let Some(v) = xx {
                *x0 = *v;
            }
        }
        _ => {}
    }
    cfg.validate()?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs.max(1))
        .build_global()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let outcome = run(&cfg, &out)?;
    for f in &outcome.files {
        println!("{}", f.display());
    }
    for msg in &outcome.failures {
        eprintln!("tolerance not met: {msg}");
    }
    Ok(if outcome.failures.is_empty() { 0 } else { 3 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
