use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lnagell_core::oracle::default_workers;
use lnagell_core::report::{
    cmd_enumerate, cmd_lucas, cmd_reduce, cmd_smooth_scan, cmd_verify_tables, Mode, ReportError,
    RunReport,
};
use lnagell_core::SUnitExponents;
use num_bigint::BigUint;

/// Solver and verifier for x^2 + 2^a 3^b 11^c = y^n with gcd(x, y) = 1.
///
/// Every command prints a JSON report. Exit status is 0 when nothing
/// disagrees, 1 when a discrepancy is found, 2 on bad usage.
#[derive(Debug, Parser)]
#[command(name = "lnagell", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Workers {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
}

impl Workers {
    fn get(&self) -> usize {
        self.workers.map_or_else(default_workers, |w| w as usize)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the shipped tables and solution lists against the oracle.
    VerifyTables {
        /// Stop the n = 3 search at y = 10^4 instead of 10^6.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        workers: Workers,
        #[command(flatten)]
        output: Output,
    },
    /// List every solution with y <= y-max for one exponent n.
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
        n: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        y_max: u64,
        /// Only exponents with b > 0 and c > 0.
        #[arg(long)]
        require_bc_positive: bool,
        #[command(flatten)]
        workers: Workers,
        #[command(flatten)]
        output: Output,
    },
    /// Solution counts for every n in [3, n-max] whose prime factors are 2 and 3.
    SmoothScan {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
        n_max: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        y_max: u64,
        #[command(flatten)]
        workers: Workers,
        #[command(flatten)]
        output: Output,
    },
    /// Cubic (n = 3) or quartic (n = 4) model of C = 2^a 3^b 11^c.
    Reduce {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..=4))]
        n: u32,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        c: u32,
        /// Map this solution to its point; needs --y as well.
        #[arg(long, requires = "y", value_parser = parse_big)]
        x: Option<BigUint>,
        #[arg(long, requires = "x", value_parser = parse_big)]
        y: Option<BigUint>,
        #[command(flatten)]
        output: Output,
    },
    /// Field facts and the p = 5 case analysis in Q(sqrt(-d)).
    Lucas {
        #[arg(long, value_parser = ["2", "6"])]
        d: String,
        /// Search 0 < u, v <= box.
        #[arg(long = "box", default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        bound: u64,
        #[command(flatten)]
        output: Output,
    },
}

fn parse_big(s: &str) -> Result<BigUint, String> {
    s.parse()
        .map_err(|_| format!("{s:?} is not a nonnegative integer"))
}

fn run(command: Command) -> Result<(RunReport, Option<PathBuf>), ReportError> {
    Ok(match command {
        Command::VerifyTables {
            quick,
            workers,
            output,
        } => {
            let mode = if quick { Mode::Quick } else { Mode::Full };
            (cmd_verify_tables(mode, workers.get())?, output.out)
        }
        Command::Enumerate {
            n,
            y_max,
            require_bc_positive,
            workers,
            output,
        } => (
            cmd_enumerate(n, y_max, require_bc_positive, workers.get())?,
            output.out,
        ),
        Command::SmoothScan {
            n_max,
            y_max,
            workers,
            output,
        } => (cmd_smooth_scan(n_max, y_max, workers.get())?, output.out),
        Command::Reduce {
            n,
            a,
            b,
            c,
            x,
            y,
            output,
        } => (
            cmd_reduce(n, SUnitExponents::new(a, b, c), x.zip(y))?,
            output.out,
        ),
        Command::Lucas { d, bound, output } => {
            let d = d.parse().expect("clap restricts d to 2 or 6");
            (cmd_lucas(d, bound)?, output.out)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, out) = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let json = report.to_json();
    match out {
        Some(path) => {
            if let Err(e) = fs::write(&path, &json) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{json}"),
    }
    for f in report
        .findings
        .iter()
        .filter(|f| f.severity != lnagell_core::report::Severity::Ok)
    {
        eprintln!("{:?}: {}: {}", f.severity, f.anchor, f.message);
    }
    ExitCode::from(report.exit_status() as u8)
}
