use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use syminv_core::complexity::count_table;
use syminv_core::genbench::{run_experiment, Method};
use syminv_core::io::{read_matrix, write_csv, write_matrix};
use syminv_core::verify::verify;
use syminv_core::{emit_report, Error, OpCounter};

#[derive(Parser, Debug)]
#[command(name = "syminv", version, about = "Symmetric matrix inversion without square roots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invert a matrix read from a Matrix Market or CSV file.
    Invert {
        #[arg(long, value_parser = parse_method)]
        method: Method,
        #[arg(long)]
        input: PathBuf,
        /// Destination (.mtx for Matrix Market, otherwise CSV); stdout if absent.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Print multiplication/division and square-root counts to stderr.
        #[arg(long)]
        count: bool,
    },
    /// Run a benchmark experiment and print the report.
    Bench {
        /// 1: operation counts, 2: time and accuracy, 3: same on non-dominant matrices.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
        experiment: u32,
        #[arg(long, value_parser = parse_sizes, default_value = "100,300,500")]
        sizes: Sizes,
        /// `all` or a comma-separated subset of cholesky, ldl, km, v1, v2, gauss.
        #[arg(long, value_parser = parse_methods, default_value = "all")]
        methods: Methods,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_parser = ["csv", "markdown", "md"], default_value = "csv")]
        format: String,
    },
    /// Print the closed-form operation counts at each order.
    Count {
        #[arg(long, value_parser = parse_sizes, default_value = "100,500")]
        sizes: Sizes,
    },
    /// Run the self-check suite.
    Verify {
        #[arg(long, default_value_t = 40)]
        max_n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone, Debug)]
struct Sizes(Vec<usize>);

#[derive(Clone, Debug)]
struct Methods(Vec<Method>);

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_methods(s: &str) -> Result<Methods, String> {
    Method::parse_list(s).map(Methods).map_err(|e| e.to_string())
}

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let sizes = s
        .split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("'{}' is not a positive integer", t.trim())),
            Ok(n) => Ok(n),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Sizes(sizes))
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let stdout = io::stdout();
    match cli.command {
        Command::Invert {
            method,
            input,
            output,
            count,
        } => {
            let a = read_matrix(&input)?;
            let mut ops = OpCounter::new();
            let inv = method.invert(&a, count.then_some(&mut ops))?;
            match output {
                Some(path) => write_matrix(&inv, &path)?,
                None => write_csv(&inv, stdout.lock())?,
            }
            if count {
                eprintln!("muldiv={} sqrt={}", ops.muldiv, ops.sqrt);
            }
        }
        Command::Bench {
            experiment,
            sizes,
            methods,
            seed,
            format,
        } => {
            let reports = run_experiment(experiment, &sizes.0, &methods.0, seed)?;
            let text = emit_report(&reports, &format)?;
            stdout.lock().write_all(text.as_bytes())?;
        }
        Command::Count { sizes } => {
            let mut out = stdout.lock();
            for (k, &n) in sizes.0.iter().enumerate() {
                if k > 0 {
                    writeln!(out)?;
                }
                writeln!(out, "n = {n}")?;
                writeln!(out, "| Method | mul/div | count | sqrt | count |")?;
                writeln!(out, "|---|---|---:|---|---:|")?;
                for row in count_table(n)? {
                    writeln!(
                        out,
                        "| {} | {} | {} | {} | {} |",
                        row.method, row.muldiv_formula, row.muldiv, row.sqrt_formula, row.sqrt
                    )?;
                }
            }
        }
        Command::Verify { max_n, seed } => {
            let report = verify(max_n, seed);
            let mut out = stdout.lock();
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{tag} {}: {}", c.name, c.detail)?;
            }
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
