//! `achr`: exact search and certificate checking for complete colourings of
//! `K_p □ K_q`.
//!
//! Exit codes: 0 success, 1 negative but valid result, 2 usage or input
//! error, 3 a witness for the refutation instance was found.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use achr_core::SearchConfig;
use clap::{Args, Parser, Subcommand};

use crate::commands::Finished;
use crate::report::RunReport;

#[derive(Debug, Parser)]
#[command(
    name = "achr",
    version,
    about = "Complete colourings of K_p x K_q: search, verify, extend"
)]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Wall-clock budget per search, e.g. `90s`, `500ms`, `2h` or plain seconds.
    #[arg(long, global = true, value_parser = parse_budget)]
    pub budget: Option<Duration>,
    /// Node budget per search.
    #[arg(long, global = true)]
    pub nodes: Option<u64>,
    /// Enable structural pruning (refutation instance only).
    #[arg(long, global = true)]
    pub lemmas: bool,
    /// Worker threads for the search.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Seed for value-order tie breaking.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Print a versioned JSON report instead of plain text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the resulting matrix here.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
}

impl Options {
    pub fn search_config(&self) -> SearchConfig {
        let mut cfg = SearchConfig::default()
            .with_seed(self.seed)
            .with_width(self.threads)
            .with_lemmas(self.lemmas);
        if let Some(n) = self.nodes {
            cfg = cfg.with_nodes(n);
        }
        if let Some(t) = self.budget {
            cfg = cfg.with_time(t);
        }
        cfg
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a matrix file for properness, completeness and coverage.
    Verify { path: PathBuf },
    /// Determine the achromatic number of K_p x K_q.
    Achromatic {
        #[arg(short)]
        p: usize,
        #[arg(short)]
        q: usize,
    },
    /// Search for a complete colouring with exactly k colours.
    Find {
        #[arg(short)]
        p: usize,
        #[arg(short)]
        q: usize,
        #[arg(short)]
        k: usize,
    },
    /// Search for a complete 19-colouring of K_6 x K_7.
    Refute,
    /// List the admissible column sequences for a given top row.
    Qsets { r2_1: usize, p: usize },
    /// List frequency profiles that survive the counting bounds.
    Profiles { p: usize, q: usize, k: usize },
    /// Add one column to a complete colouring, keeping it complete.
    Extend { path: PathBuf },
}

fn parse_budget(s: &str) -> Result<Duration, String> {
    if let Ok(secs) = s.parse::<f64>() {
        return Duration::try_from_secs_f64(secs).map_err(|e| e.to_string());
    }
    humantime::parse_duration(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let opts = &cli.opts;
    let result = match &cli.command {
        Command::Verify { path } => commands::verify(path, opts, &argv),
        Command::Achromatic { p, q } => commands::achromatic(*p, *q, opts, &argv),
        Command::Find { p, q, k } => commands::find(*p, *q, *k, opts, &argv),
        Command::Refute => commands::refute(opts, &argv),
        Command::Qsets { r2_1, p } => commands::qsets(*r2_1, *p, opts, &argv),
        Command::Profiles { p, q, k } => commands::profiles(*p, *q, *k, opts, &argv),
        Command::Extend { path } => commands::extend(path, opts, &argv),
    };
    match result {
        Ok(done) => emit(done, opts.json),
        Err(fail) => {
            eprintln!("error: {}", fail.message);
            if opts.json {
                let mut report = RunReport::new(argv, opts.seed, "ERROR");
                report.exit_code = fail.code;
                report.result = serde_json::json!({ "message": fail.message });
                print_json(&report);
            }
            ExitCode::from(fail.code)
        }
    }
}

fn emit(done: Finished, json: bool) -> ExitCode {
    let mut report = done.report;
    report.exit_code = done.code;
    if json {
        print_json(&report);
    } else {
        out(&done.text);
    }
    if !done.note.is_empty() {
        eprint!("{}", done.note);
    }
    ExitCode::from(done.code)
}

fn print_json(report: &RunReport) {
    out(&format!(
        "{}\n",
        serde_json::to_string_pretty(report).expect("report serializes")
    ));
}

/// Writes to stdout, ignoring a closed pipe.
fn out(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}
