//! Command-line interface of the `grassde` binary.
//!
//! Exit codes: 0 when every requested action completed, 1 on runtime
//! failures (experiment, data, or I/O errors), 2 on usage errors.

use crate::experiments::{self, ConfigOverrides, ExperimentId};
use crate::report::{self, ExperimentReport, ReportFormat};
use clap::{Parser, Subcommand, ValueEnum};
use grassde::manifold::{self, GrassmannShape};
use grassde::objectives::assets;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "grassde",
    version,
    about = "Global subspace optimization: self-adaptive differential evolution on Gr(k, n)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Population size (default 50)
    #[arg(long, global = true)]
    np: Option<usize>,

    /// Maximum number of generations (default 5000)
    #[arg(long = "max-gens", global = true)]
    max_gens: Option<usize>,

    /// Master seed; falls back to $GRASSDE_SEED, then 42
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Generations without sufficient improvement before stopping (default 200)
    #[arg(long = "stagnation-window", global = true)]
    stagnation_window: Option<usize>,

    /// Improvement below this counts as stagnation (default 1e-10)
    #[arg(long = "stagnation-tol", global = true)]
    stagnation_tol: Option<f64>,

    /// Report format; defaults to json when --output is given
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Report destination; without it, json reports go to stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Suppress per-experiment summary lines
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single benchmark experiment
    Run {
        /// One of: pca, chordal, bimodal, logdet, cluster1, cluster2, cluster3
        #[arg(long)]
        experiment: String,
    },
    /// Run all seven benchmark experiments
    RunAll,
    /// Project a CSV matrix onto Gr(k, n) and print or write the result
    Project {
        /// Input CSV file with n rows and k comma-separated columns
        #[arg(long)]
        input: PathBuf,
        /// Ambient dimension
        #[arg(long)]
        n: usize,
        /// Subspace dimension
        #[arg(long)]
        k: usize,
    },
    /// Print the embedded reference matrices with their residuals
    ShowRefs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

/// Parses `argv` and executes the selected command, returning the process
/// exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };

    let seed = match resolve_seed(cli.seed) {
        Ok(seed) => seed,
        Err(message) => {
            eprintln!("error: {message}");
            return 2;
        }
    };
    let overrides = ConfigOverrides {
        np: cli.np,
        max_generations: cli.max_gens,
        seed,
        stagnation_window: cli.stagnation_window,
        stagnation_tol: cli.stagnation_tol,
    };

    match cli.command {
        Command::Run { experiment } => {
            let id: ExperimentId = match experiment.parse() {
                Ok(id) => id,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            let report = match experiments::run_experiment(id, &overrides) {
                Ok(report) => report,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 1;
                }
            };
            finish(vec![report], cli.format, cli.output.as_deref(), cli.quiet)
        }
        Command::RunAll => {
            let mut reports = Vec::new();
            let mut failures = 0usize;
            for (id, outcome) in experiments::run_all(&overrides) {
                match outcome {
                    Ok(report) => reports.push(report),
                    Err(e) => {
                        failures += 1;
                        eprintln!("error: {id}: {e}");
                    }
                }
            }
            let code = finish(reports, cli.format, cli.output.as_deref(), cli.quiet);
            if failures > 0 {
                1
            } else {
                code
            }
        }
        Command::Project { input, n, k } => project_command(&input, n, k, cli.output.as_deref()),
        Command::ShowRefs => {
            show_refs();
            0
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<Option<u64>, String> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("GRASSDE_SEED") {
        Ok(raw) => raw
            .parse::<u64>()
            .map(Some)
            .map_err(|_| format!("GRASSDE_SEED must be an unsigned integer, got {raw:?}")),
        Err(_) => Ok(None),
    }
}

/// Prints summaries and emits the report document. Summaries go to stderr
/// when the document itself occupies stdout.
fn finish(
    reports: Vec<ExperimentReport>,
    format: Option<OutputFormat>,
    output: Option<&Path>,
    quiet: bool,
) -> i32 {
    let doc_on_stdout = format.is_some() && output.is_none();
    if !quiet {
        for report in &reports {
            let line = summary_line(report);
            if doc_on_stdout {
                eprintln!("{line}");
            } else {
                println!("{line}");
            }
        }
    }

    match (format, output) {
        (None, None) => 0,
        (Some(OutputFormat::Json), None) => {
            print!("{}", report::to_json(&reports));
            0
        }
        (Some(OutputFormat::Csv), None) => {
            eprintln!("error: --format csv requires --output (per-experiment trace files accompany the summary)");
            2
        }
        (format, Some(path)) => {
            let report_format = match format {
                Some(OutputFormat::Csv) => ReportFormat::Csv,
                _ => ReportFormat::Json,
            };
            match report::emit_report(&reports, report_format, path) {
                Ok(written) => {
                    if !quiet {
                        for file in written {
                            println!("wrote {}", file.display());
                        }
                    }
                    0
                }
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    1
                }
            }
        }
    }
}

fn summary_line(report: &ExperimentReport) -> String {
    let evaluations = report
        .diagnostics
        .get("evaluations")
        .copied()
        .unwrap_or(f64::NAN);
    format!(
        "{}: best_fitness={:.8e} reported_value={:.8e} generations={} evaluations={} seed={} ({:.2}s)",
        report.experiment_id,
        report.best_fitness,
        report.reported_value,
        report.history.len(),
        evaluations as u64,
        report.seed,
        report.wall_time,
    )
}

fn project_command(input: &Path, n: usize, k: usize, output: Option<&Path>) -> i32 {
    let shape = match GrassmannShape::new(n, k) {
        Ok(shape) => shape,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let text = match std::fs::read_to_string(input) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", input.display());
            return 1;
        }
    };
    let matrix = match grassde::csv::parse_matrix(&text) {
        Ok(matrix) => matrix,
        Err(e) => {
            eprintln!("error: {}: {e}", input.display());
            return 1;
        }
    };
    if matrix.rows() != n || matrix.cols() != k {
        eprintln!(
            "error: expected a {}x{} matrix, got {}x{}",
            n,
            k,
            matrix.rows(),
            matrix.cols()
        );
        return 1;
    }
    let projected = match manifold::project(&manifold::flatten(&matrix), shape) {
        Ok(genome) => genome,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let result = manifold::reshape(&projected, shape).expect("projected genome has length d");
    let rendered = grassde::csv::format_matrix(&result);
    match output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 1;
            }
            0
        }
        None => {
            print!("{rendered}");
            0
        }
    }
}

fn show_refs() {
    for (name, text, (repaired, pre_residual)) in [
        ("P1", assets::P1_CSV, assets::p1()),
        ("P2", assets::P2_CSV, assets::p2()),
        ("P3", assets::P3_CSV, assets::p3()),
    ] {
        let post = manifold::orthonormality_residual(&repaired);
        println!("{name}: pre-repair residual {pre_residual:.6e}, post-repair residual {post:.6e}");
        print!("{text}");
        println!();
    }
}
