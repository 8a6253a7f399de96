mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{CliError, Report};

#[derive(Debug, Parser)]
#[command(name = "rankloss", version, about = "Certify rank loss of row-scaled matrix ensembles and synthesize interference-management schemes")]
struct Cli {
    /// Write the JSON report to this path as well as stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
struct Sampling {
    /// Number of random evaluation points.
    #[arg(long, default_value_t = 20)]
    trials: u32,
    /// Entries are drawn from [1, 2^bits].
    #[arg(long, default_value_t = 31)]
    bits: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Largest certified rank loss, with combinatorial witnesses per tau.
    Certify {
        ensemble: PathBuf,
        /// Check only this tau.
        #[arg(long)]
        tau: Option<usize>,
    },
    /// Sampled rank of the scaled ensemble.
    McRank {
        ensemble: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Run all five equivalent conditions and require agreement.
    Equiv {
        ensemble: PathBuf,
        /// Check only this tau (default: every tau in 1..=R).
        #[arg(long)]
        tau: Option<usize>,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Rank tables and axiom checks for one block's scaled-linear matroid.
    MatroidCheck {
        ensemble: PathBuf,
        /// 1-based block index.
        #[arg(long, default_value_t = 1)]
        block: usize,
        /// Ground rows, 1-based, comma separated (default: all rows).
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<usize>>,
        /// Columns, 1-based, comma separated (default: all columns).
        #[arg(long, value_delimiter = ',')]
        y: Option<Vec<usize>>,
    },
    /// Topological interference management.
    #[command(subcommand)]
    Tim(TimCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeKind {
    /// Two-slot scheme when feasible, exclusive alignment otherwise.
    Auto,
    Half,
    Exclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Policy {
    Plain,
    Minimal,
}

#[derive(Debug, Subcommand)]
enum TimCommand {
    /// Conflict graphs, chromatic numbers and the symmetric linear DoF.
    Dof { topology: PathBuf },
    /// Synthesize a scheme and write it as a scheme file.
    Scheme {
        topology: PathBuf,
        #[arg(long, value_enum, default_value_t = SchemeKind::Auto)]
        kind: SchemeKind,
        #[arg(long, value_enum, default_value_t = Policy::Minimal)]
        policy: Policy,
        /// Use seeded random generic entries instead of prime powers.
        #[arg(long)]
        random_entries: Option<u64>,
        /// Explicit operating point for the exclusive scheme (needs --m).
        #[arg(long, requires = "m")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        m: Option<usize>,
        #[arg(long)]
        scheme_out: Option<PathBuf>,
    },
    /// Sampled decodability at every receiver.
    Verify {
        topology: PathBuf,
        scheme: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Rewrite a scheme so that each alignment pair spans a size-tau sparse subspace.
    Normalize {
        topology: PathBuf,
        scheme: PathBuf,
        #[arg(long)]
        scheme_out: Option<PathBuf>,
    },
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Certify { ensemble, tau } => commands::certify(ensemble, *tau),
        Command::McRank { ensemble, sampling } => commands::mc_rank(ensemble, sampling),
        Command::Equiv { ensemble, tau, sampling } => commands::equiv(ensemble, *tau, sampling),
        Command::MatroidCheck { ensemble, block, x, y } => {
            commands::matroid_check(ensemble, *block, x.as_deref(), y.as_deref())
        }
        Command::Tim(TimCommand::Dof { topology }) => commands::tim_dof(topology),
        Command::Tim(TimCommand::Scheme {
            topology,
            kind,
            policy,
            random_entries,
            n,
            m,
            scheme_out,
        }) => commands::tim_scheme(
            topology,
            *kind,
            *policy,
            *random_entries,
            n.zip(*m),
            scheme_out.as_deref(),
        ),
        Command::Tim(TimCommand::Verify {
            topology,
            scheme,
            sampling,
        }) => commands::tim_verify(topology, scheme, sampling),
        Command::Tim(TimCommand::Normalize {
            topology,
            scheme,
            scheme_out,
        }) => commands::tim_normalize(topology, scheme, scheme_out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let started = std::time::Instant::now();
    let outcome = run(&cli);
    let elapsed = started.elapsed();
    let (report, code) = match outcome {
        Ok(report) => (Some(report), 0),
        Err(err) => {
            eprintln!("error: {err}");
            let code = err.exit_code();
            (err.into_report(), code)
        }
    };
    if let Some(report) = report {
        let text = report.render(&argv, elapsed, cli.pretty);
        // a closed pipe downstream is not an error worth reporting
        let _ = writeln!(std::io::stdout().lock(), "{text}");
        if let Some(path) = &cli.out {
            if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
    }
    ExitCode::from(code)
}
