use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::{CliError, Report, Status};

#[derive(Parser, Debug)]
#[command(name = "artin", version, about = "Deligne complexes, automorphisms and curvature for large-type Artin groups")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Longest intermediate word the rewriting search may build.
    #[arg(long, global = true, default_value_t = 24, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_len: u32,
    /// States expanded per reduction before giving up.
    #[arg(long, global = true, default_value_t = 20_000, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_states: u32,
    /// Seed for sampled verifications.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct BallArgs {
    #[arg(long, default_value_t = 4)]
    pub radius: usize,
    /// Distance kept between checked vertices and the edge of the ball.
    #[arg(long, default_value_t = 2)]
    pub margin: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a graph is large-type, free of infinity, connected and of rank at least 3.
    Validate { graph: PathBuf },
    /// List the label-preserving automorphisms of the graph.
    AutGamma { graph: PathBuf },
    /// Multiplication table of the outer automorphism group.
    OutGroup { graph: PathBuf },
    /// Decide whether two graphs give isomorphic Artin groups.
    Iso { first: PathBuf, second: PathBuf },
    /// Build and export a ball of the Deligne complex.
    Ball {
        graph: PathBuf,
        #[command(flatten)]
        ball: BallArgs,
    },
    /// Run the reconstruction and automorphism suites on a ball.
    Verify {
        graph: PathBuf,
        #[command(flatten)]
        ball: BallArgs,
        /// Random automorphisms sampled for the structure checks.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Length of each random automorphism, in generators.
        #[arg(long, default_value_t = 4)]
        spec_len: usize,
    },
    /// Word problem utilities.
    #[command(subcommand)]
    Word(WordCommand),
    /// Disc diagram curvature checks.
    #[command(subcommand)]
    Curvature(CurvatureCommand),
}

#[derive(Subcommand, Debug)]
pub enum WordCommand {
    /// Length-reduce a word by relation moves.
    Reduce { graph: PathBuf, word: String },
    /// Decide equality of two words with a trace or a certificate.
    Equal { graph: PathBuf, left: String, right: String },
    /// Image under the height homomorphism.
    Height { graph: PathBuf, word: String },
}

#[derive(Subcommand, Debug)]
pub enum CurvatureCommand {
    /// Vertex and face curvatures and the Gauss-Bonnet residual.
    Check { diagram: PathBuf },
    /// Curvature budgets of a Moussong-angled diagram with three marked vertices.
    Partition {
        diagram: PathBuf,
        /// Override a type 2 label, as `vertex=m`.
        #[arg(long = "label")]
        labels: Vec<String>,
    },
    /// Arrow constraint along the declared side.
    Strip { diagram: PathBuf },
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let c = &cli.config;
    match &cli.command {
        Command::Validate { graph } => commands::validate(graph),
        Command::AutGamma { graph } => commands::aut_gamma(graph),
        Command::OutGroup { graph } => commands::out_group(graph),
        Command::Iso { first, second } => commands::iso(first, second),
        Command::Ball { graph, ball } => commands::ball(c, graph, *ball),
        Command::Verify { graph, ball, samples, spec_len } => commands::verify(c, graph, *ball, *samples, *spec_len),
        Command::Word(w) => commands::word(c, w),
        Command::Curvature(k) => commands::curvature(k),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match dispatch(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(Status::Invalid as u8);
        }
    };
    let body = match cli.config.format {
        Format::Text => report.text,
        Format::Json => serde_json::to_string_pretty(&report.json).expect("reports serialize") + "\n",
    };
    match &cli.config.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(Status::Invalid as u8);
            }
        }
        None => print!("{body}"),
    }
    for note in &report.diagnostics {
        eprintln!("{note}");
    }
    ExitCode::from(report.status as u8)
}
