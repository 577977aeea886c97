use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reachlab::config::{load_shape, Command, ExperimentConfig};
use reachlab::grid::GridSpec;
use reachlab::{execute, CliError};

#[derive(Parser)]
#[command(name = "reachlab", version, about = "Heat content, Steiner measures and strata of sets with positive reach")]
struct Cli {
    /// Worker threads (falls back to REACHLAB_THREADS, then one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct ShapeArg {
    /// Shape JSON file, or inline JSON.
    #[arg(long)]
    shape: String,
}

#[derive(Args)]
struct Mc {
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct Fit {
    /// auto, published, or a number.
    #[arg(long)]
    alpha: Option<String>,
    /// graph or bundle.
    #[arg(long)]
    convention: Option<String>,
    #[arg(long)]
    degree: Option<usize>,
    /// Drop the t^(degree+1) nuisance column.
    #[arg(long)]
    no_nuisance: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a shape (and optional grids) and print its metadata.
    Validate {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary strata as CSV.
    Strata {
        #[command(flatten)]
        shape: ShapeArg,
        #[command(flatten)]
        mc: Mc,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parallel volumes and the fitted curvature measures.
    Steiner {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long)]
        rgrid: Option<String>,
        /// exact or mc.
        #[arg(long)]
        source: Option<String>,
        #[command(flatten)]
        mc: Mc,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Heat content on a t grid.
    Heat {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        tgrid: Option<String>,
        /// auto, mc, exact, ball, tube.
        #[arg(long)]
        method: Option<String>,
        #[command(flatten)]
        mc: Mc,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the second-order expansion and compare with the analytic terms.
    Expand {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        tgrid: Option<String>,
        #[arg(long)]
        method: Option<String>,
        #[command(flatten)]
        fit: Fit,
        #[command(flatten)]
        mc: Mc,
        /// report.json
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sample table; defaults to the report path with a .csv extension.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Blow-up convergence toward the tangent cone.
    Blowup {
        #[command(flatten)]
        shape: ShapeArg,
        /// Comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<f64>,
        #[arg(long)]
        rhogrid: String,
        #[arg(long)]
        window: Option<f64>,
        /// Hausdorff grid pitch.
        #[arg(long)]
        pitch: Option<f64>,
        #[command(flatten)]
        mc: Mc,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate heat CSVs into one expansion report.
    Report {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        fit: Fit,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn base(command: Command, shape: &ShapeArg) -> Result<ExperimentConfig, CliError> {
    let mut c = ExperimentConfig::new(command);
    c.shape = Some(load_shape(&shape.shape)?);
    Ok(c)
}

fn apply_mc(c: &mut ExperimentConfig, mc: Mc) {
    c.samples = mc.samples;
    c.seed = mc.seed;
}

fn apply_fit(c: &mut ExperimentConfig, fit: Fit) {
    c.alpha = fit.alpha;
    c.convention = fit.convention;
    c.degree = fit.degree;
    if fit.no_nuisance {
        c.nuisance = Some(false);
    }
}

fn report_paths(c: &mut ExperimentConfig, out: Option<PathBuf>, table: Option<PathBuf>) {
    c.outputs.csv = table.or_else(|| out.as_ref().map(|p| p.with_extension("csv")));
    c.outputs.json = out;
}

fn build(cmd: Cmd) -> Result<ExperimentConfig, CliError> {
    Ok(match cmd {
        Cmd::Validate { shape, phi, out } => {
            let mut c = base(Command::Validate, &shape)?;
            c.phi = phi;
            c.outputs.json = out;
            c
        }
        Cmd::Strata { shape, mc, out } => {
            let mut c = base(Command::Strata, &shape)?;
            apply_mc(&mut c, mc);
            c.outputs.csv = out;
            c
        }
        Cmd::Steiner {
            shape,
            rgrid,
            source,
            mc,
            out,
        } => {
            let mut c = base(Command::Steiner, &shape)?;
            c.r_grid = rgrid.map(GridSpec::Text);
            c.source = source;
            apply_mc(&mut c, mc);
            c.outputs.csv = out;
            c
        }
        Cmd::Heat {
            shape,
            phi,
            tgrid,
            method,
            mc,
            out,
        } => {
            let mut c = base(Command::Heat, &shape)?;
            c.phi = phi;
            c.t_grid = tgrid.map(GridSpec::Text);
            c.method = method;
            apply_mc(&mut c, mc);
            c.outputs.csv = out;
            c
        }
        Cmd::Expand {
            shape,
            phi,
            tgrid,
            method,
            fit,
            mc,
            out,
            table,
        } => {
            let mut c = base(Command::Expand, &shape)?;
            c.phi = phi;
            c.t_grid = tgrid.map(GridSpec::Text);
            c.method = method;
            apply_fit(&mut c, fit);
            apply_mc(&mut c, mc);
            report_paths(&mut c, out, table);
            c
        }
        Cmd::Blowup {
            shape,
            point,
            rhogrid,
            window,
            pitch,
            mc,
            out,
        } => {
            let mut c = base(Command::Blowup, &shape)?;
            c.point = Some(point);
            c.rho_grid = Some(GridSpec::Text(rhogrid));
            c.window = window;
            c.pitch = pitch;
            apply_mc(&mut c, mc);
            c.outputs.csv = out;
            c
        }
        Cmd::Report {
            shape,
            phi,
            inputs,
            fit,
            out,
            table,
        } => {
            let mut c = base(Command::Report, &shape)?;
            c.phi = phi;
            c.inputs = inputs;
            apply_fit(&mut c, fit);
            report_paths(&mut c, out, table);
            c
        }
        Cmd::Run { config } => {
            let text = std::fs::read_to_string(&config).map_err(|e| CliError::Io(format!("{}: {e}", config.display())))?;
            ExperimentConfig::from_json(&text)?
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match build(cli.cmd).and_then(|cfg| execute(&cfg, cli.threads)) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("reachlab: {e}");
            ExitCode::from(&e)
        }
    }
}
