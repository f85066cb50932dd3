use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use umbilic_cli::input::{resolve_manifold, SearchConfigFile};
use umbilic_cli::report::to_json;
use umbilic_cli::suites::{self, Overrides, Suite};
use umbilic_cli::{CliError, ExitStatus};

#[derive(Parser, Debug)]
#[command(name = "umbilic", version, about = "Verify hypersurface identities, estimate holonomy and search for umbilical hypersurfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Residual tolerance (overrides the spec file).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Number of sample points (overrides the spec file).
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Sampling / loop / search seed (overrides the spec or config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON report here and a markdown summary next to it (`.md`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Format printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Markdown)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run residual suites over the canonical umbilical embeddings.
    Verify {
        /// Catalogue expression (`round_sphere n=3`) or a JSON spec file.
        #[arg(required = true)]
        manifold: Vec<String>,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Estimate the holonomy algebra and transport-invariant forms.
    Holonomy {
        #[arg(required = true)]
        manifold: Vec<String>,
        /// Form degree to search for invariant forms (repeatable).
        #[arg(long = "degree")]
        degrees: Vec<usize>,
        /// RK4 steps per loop.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Run an umbilic search from a JSON config file.
    Search { config: PathBuf },
    /// List the manifold catalogue.
    ListZoo,
}

fn emit<T: Serialize>(report: &T, markdown: String, cli: &Cli) -> Result<(), CliError> {
    let json = to_json(report);
    if let Some(path) = &cli.out {
        std::fs::write(path, &json)?;
        std::fs::write(markdown_path(path), &markdown)?;
    }
    match cli.format {
        Format::Json => print!("{json}"),
        Format::Markdown => print!("{markdown}"),
    }
    Ok(())
}

fn markdown_path(json: &Path) -> PathBuf {
    json.with_extension("md")
}

fn run(cli: &Cli) -> Result<ExitStatus, CliError> {
    let overrides = Overrides {
        tolerance: cli.tolerance,
        samples: cli.samples,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Verify { manifold, suite } => {
            let (req, file) = resolve_manifold(manifold)?;
            let report = suites::verify(&req, file.as_ref(), *suite, &overrides)?;
            emit(&report, report.markdown(), cli)?;
            Ok(match report.exit_code {
                0 => ExitStatus::Pass,
                1 => ExitStatus::Failure,
                _ => ExitStatus::Degenerate,
            })
        }
        Command::Holonomy { manifold, degrees, steps } => {
            let (req, file) = resolve_manifold(manifold)?;
            let report = suites::holonomy(&req, file.as_ref(), degrees, *steps, &overrides)?;
            emit(&report, report.markdown(), cli)?;
            Ok(ExitStatus::Pass)
        }
        Command::Search { config } => {
            let mut file = SearchConfigFile::read(config)?;
            let mut notes = Vec::new();
            if let Some(seed) = cli.seed {
                file.seed = seed;
                notes.push(format!("seed={seed}"));
            }
            if let Some(samples) = cli.samples {
                file.samples = Some(samples);
                notes.push(format!("samples={samples}"));
            }
            if let Some(t) = cli.tolerance {
                file.thresholds.converge = t;
                notes.push(format!("converge={t}"));
            }
            let report = suites::search(&file.to_config()?, notes)?;
            emit(&report, report.markdown(), cli)?;
            Ok(ExitStatus::Pass)
        }
        Command::ListZoo => {
            let entries = suites::list_zoo()?;
            emit(&entries, suites::zoo_markdown(&entries), cli)?;
            Ok(ExitStatus::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("umbilic: {e}");
            ExitCode::from(e.status().code())
        }
    }
}
