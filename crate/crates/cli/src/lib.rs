//! Command-line front end: argument parsing, file I/O and run manifests.
//! Exit codes are 0 on success, 1 on a domain error and 2 on a usage error.

mod commands;
mod manifest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

pub use manifest::{sha256_hex, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "lfgeo", version, about = "Local Friendliness geometry toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// LHV / LF / NS polytopes.
    #[command(subcommand)]
    Polytope(PolytopeCmd),
    /// Born rule and the extended Wigner's friend protocol.
    #[command(subcommand)]
    Quantum(QuantumCmd),
    /// DAGs, d-separation and fine-tuning.
    #[command(subcommand)]
    Causal(CausalCmd),
    /// Principle implication graph.
    #[command(subcommand)]
    Principles(PrinciplesCmd),
    /// Reference data used by the test suite.
    #[command(subcommand)]
    Fixtures(FixturesCmd),
}

#[derive(Args, Debug, Clone)]
pub struct OutArg {
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum PolytopeCmd {
    /// Deterministic vertices of the LHV polytope.
    Vertices {
        #[arg(long, default_value = "lhv")]
        kind: String,
        #[arg(long)]
        scenario: String,
        /// Maximum number of deterministic strategies.
        #[arg(long)]
        cap: Option<u128>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Canonical facet list.
    Facets {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        scenario: String,
        /// LF projection method: hull or fm.
        #[arg(long, default_value = "hull")]
        method: String,
        /// Row cap for Fourier-Motzkin rounds.
        #[arg(long)]
        cap: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Exact membership with certificate.
    Member {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        behavior: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Exact maximum of an inequality's functional.
    Max {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        ineq: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Two-dimensional slice as CSV plus an exact JSON companion.
    Slice {
        /// Comma-separated kinds.
        #[arg(long, default_value = "lhv,lf,ns")]
        kinds: String,
        #[arg(long)]
        f1: PathBuf,
        #[arg(long)]
        f2: PathBuf,
        #[arg(long, default_value_t = 72)]
        resolution: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum QuantumCmd {
    /// Born-rule behavior from {"state", "alice", "bob"}.
    Born {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Protocol simulation from an EWFS configuration.
    Ewfs {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Seeded coordinate ascent on an inequality's functional.
    Optimize {
        #[arg(long)]
        ineq: PathBuf,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Singlet grid search over measurement angles.
    Grid {
        #[arg(long)]
        ineq: PathBuf,
        #[arg(long, default_value_t = 360)]
        resolution: usize,
        #[arg(long)]
        cap: Option<u128>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum CausalCmd {
    /// d-separation of one statement, or every implied CI with --all.
    Dsep {
        #[arg(long)]
        dag: PathBuf,
        #[arg(long, default_value = "")]
        a: String,
        #[arg(long, default_value = "")]
        b: String,
        #[arg(long, default_value = "")]
        z: String,
        #[arg(long)]
        all: bool,
        /// With --all, restrict to observed nodes.
        #[arg(long)]
        observed: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Causal Markov condition residuals.
    Cmc {
        #[arg(long)]
        dag: PathBuf,
        #[arg(long)]
        dist: PathBuf,
        /// Exact tolerance: integer, fraction or decimal.
        #[arg(long, default_value = "0")]
        tol: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Faithfulness over the observed nodes.
    Faithful {
        #[arg(long)]
        dag: PathBuf,
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, default_value = "0")]
        tol: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Fine-tuning scan over the Bell DAG family (CSV plus JSON summary).
    ScanBell {
        #[arg(long)]
        behavior: PathBuf,
        #[arg(long, default_value_t = 4)]
        latent: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum PrinciplesCmd {
    /// Print the principle graph.
    Show {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Check a position against falsified theorems.
    Check {
        #[arg(long)]
        position: PathBuf,
        /// Comma-separated theorem names.
        #[arg(long)]
        falsified: String,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Inclusion-minimal retractions restoring consistency.
    Repair {
        #[arg(long)]
        position: PathBuf,
        #[arg(long)]
        falsified: String,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum FixturesCmd {
    /// Recompute every fixture from its oracle.
    Regen {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn configure_threads() -> lfgeo::Result<()> {
    let Ok(v) = std::env::var("LFGEO_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| lfgeo::Error::Parse(format!("LFGEO_THREADS='{v}' is not a count")))?;
    if n > 0 {
        // Fails only if a pool already exists, e.g. on a second in-process run.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Error report printed on stderr for domain errors.
pub fn error_report(e: &lfgeo::Error) -> String {
    json!({ "error": { "kind": e.kind(), "message": e.to_string() } }).to_string()
}

/// Parse `argv` (program name first), execute, and return the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads().and_then(|_| commands::execute(cli.command, argv));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{}", error_report(&e));
            EXIT_DOMAIN
        }
    }
}

#[cfg(test)]
mod tests;
