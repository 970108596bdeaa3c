use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use staircode_cli::{commands, load_dataset, load_document, server, Failure};
use staircode_core::{io, AugmentedMetricSpace, Mode};

#[derive(Parser)]
#[command(name = "staircode", version, about = "Elder-rule staircodes, fibered barcodes and graded Betti numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Euclidean,
    Generic,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Euclidean => Mode::Euclidean,
            ModeArg::Generic => Mode::Generic,
        }
    }
}

#[derive(clap::Args)]
struct DatasetArgs {
    /// Points CSV (`id,f[,c1..cd]`) or dataset JSON.
    dataset: PathBuf,
    /// Lower-triangular distance CSV for a points CSV without coordinates.
    #[arg(long)]
    dist: Option<PathBuf>,
    /// File listing point ids in a filter-compatible insertion order.
    #[arg(long)]
    order: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the staircode and Betti numbers of a dataset.
    Compute {
        #[command(flatten)]
        data: DatasetArgs,
        /// Defaults to euclidean when coordinates are present.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the supports of the graded Betti numbers.
    Betti { staircode: PathBuf },
    /// Number of components at a grade.
    Dim {
        staircode: PathBuf,
        /// Grade as `sigma,eps`.
        #[arg(long, allow_hyphen_values = true)]
        grade: String,
    },
    /// Barcode or treegram along a positive-slope line.
    Query {
        staircode: PathBuf,
        /// Two points on the line, `s1,e1:s2,e2`.
        #[arg(long, allow_hyphen_values = true)]
        line: String,
        #[arg(long)]
        treegram: bool,
        /// Also list points whose bar is empty.
        #[arg(long)]
        verbose: bool,
    },
    /// Ultrametric, constant-conqueror and decomposability checks.
    Check {
        #[command(flatten)]
        data: DatasetArgs,
    },
    /// Compare every computed quantity with brute force.
    OracleVerify {
        #[command(flatten)]
        data: DatasetArgs,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Number of random lines to compare.
        #[arg(long, default_value_t = 50)]
        lines: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Time the sweep and queries on random points.
    Bench {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 1000)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Serve the JSON API for a staircode document.
    Serve {
        staircode: PathBuf,
        #[arg(long, env = "STAIRCODE_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory of static files served outside `/api`.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

fn dataset(args: &DatasetArgs) -> Result<(AugmentedMetricSpace, Option<Vec<usize>>), Failure> {
    let space = load_dataset(&args.dataset, args.dist.as_deref())?;
    let order = match &args.order {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::parse(format!("{}: {e}", p.display())))?;
            Some(io::parse_order(&text, &space)?)
        }
        None => None,
    };
    Ok((space, order))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::parse(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compute { data, mode, output } => {
            let (space, order) = dataset(&data)?;
            let mode = mode.map_or_else(|| commands::default_mode(&space), Mode::from);
            let doc = commands::compute(&space, order.as_deref(), mode)?;
            write_output(output.as_deref(), &(doc.to_json() + "\n"))
        }
        Command::Betti { staircode } => write_output(None, &commands::betti(&load_document(&staircode)?)),
        Command::Dim { staircode, grade } => write_output(None, &commands::dim(&load_document(&staircode)?, &grade)?),
        Command::Query { staircode, line, treegram, verbose } => {
            write_output(None, &commands::query(&load_document(&staircode)?, &line, treegram, verbose)?)
        }
        Command::Check { data } => {
            let (space, order) = dataset(&data)?;
            write_output(None, &commands::check(&space, order.as_deref())?)
        }
        Command::OracleVerify { data, mode, lines, seed } => {
            let (space, order) = dataset(&data)?;
            let mode = mode.map_or_else(|| commands::default_mode(&space), Mode::from);
            write_output(None, &commands::oracle_verify(&space, order.as_deref(), mode, lines, seed)?)
        }
        Command::Bench { n, dim, queries, seed } => write_output(None, &commands::bench(n, dim, queries, seed)?),
        Command::Serve { staircode, port, host, static_dir } => {
            let doc = load_document(&staircode)?;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::parse(e.to_string()))?;
            runtime
                .block_on(server::serve(doc, &host, port, static_dir))
                .map_err(|e| Failure::parse(format!("server: {e}")))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
