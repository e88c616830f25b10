use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use linvar::exactalg::parse_rat;
use linvar::shell::{exit_code, run, Command, Input, Options, EXIT_INPUT_ERROR};
use linvar::Rat;

/// Invariants, realizability and linearizability of single-input control systems.
///
/// Exit status: 0 pass, 1 negative verdict, 2 indeterminate, 3 input error.
#[derive(Parser)]
#[command(name = "linvar", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invariants gamma(t) of a linear system.
    Invariants(Single),
    /// Whether gamma is realizable by an analytic linear system on the interval.
    CheckRealizable(Single),
    /// Power-series solutions of the associated linear ODE at a point.
    Series(Single),
    /// Whether an affine system is locally analytically linearizable.
    Linearizable(Single),
    /// Whether an affine system maps onto a given linear system.
    MapTo(Pair),
}

#[derive(Args)]
struct Single {
    file: PathBuf,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Pair {
    file: PathBuf,
    target: PathBuf,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Flags {
    /// Interval override, e.g. `--interval 0 9/10`.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], value_parser = rational)]
    interval: Option<Vec<Rat>>,
    /// Series truncation order.
    #[arg(long, value_name = "K")]
    order: Option<i64>,
    /// Expansion point.
    #[arg(long, value_parser = rational)]
    point: Option<Rat>,
    /// Values of y at the indicial roots, in increasing root order.
    #[arg(long, num_args = 1.., value_parser = rational)]
    free: Option<Vec<Rat>>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Treat breakpoint smoothness warnings as input errors.
    #[arg(long)]
    pieces_strict: bool,
}

const MINUS: char = '\u{2212}';

fn rational(s: &str) -> Result<Rat, String> {
    let ascii = s.replace(MINUS, "-");
    parse_rat(&ascii).ok_or_else(|| format!("`{ascii}` is not an exact rational (use p, p/q or a finite decimal)"))
}

/// Clap reads `-1/2` as a short flag; negative numbers are passed to it
/// with a Unicode minus instead.
fn shield_negative_numbers(args: impl Iterator<Item = String>) -> Vec<String> {
    args.map(|a| match a.strip_prefix('-') {
        Some(rest) if rest.starts_with(|c: char| c.is_ascii_digit()) && parse_rat(&a).is_some() => format!("{MINUS}{rest}"),
        _ => a,
    })
    .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(shield_negative_numbers(std::env::args())) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT_ERROR as u8),
            };
        }
    };
    let (cmd, files, flags) = match cli.command {
        Cmd::Invariants(s) => (Command::Invariants, vec![s.file], s.flags),
        Cmd::CheckRealizable(s) => (Command::CheckRealizable, vec![s.file], s.flags),
        Cmd::Series(s) => (Command::Series, vec![s.file], s.flags),
        Cmd::Linearizable(s) => (Command::Linearizable, vec![s.file], s.flags),
        Cmd::MapTo(p) => (Command::MapTo, vec![p.file, p.target], p.flags),
    };
    let mut texts = Vec::new();
    for f in &files {
        match fs::read_to_string(f) {
            Ok(t) => texts.push(t),
            Err(e) => {
                eprintln!("error: {}: {e}", f.display());
                return ExitCode::from(EXIT_INPUT_ERROR as u8);
            }
        }
    }
    let names: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
    let inputs: Vec<Input> = names.iter().zip(&texts).map(|(name, text)| Input { name, text }).collect();
    let opts = Options {
        interval: flags.interval.map(|v| (v[0].clone(), v[1].clone())),
        order: flags.order,
        point: flags.point,
        free: flags.free,
        pieces_strict: flags.pieces_strict,
    };
    match run(cmd, &inputs, &opts) {
        Ok(report) => {
            let out = match flags.format {
                Format::Json => report.to_json() + "\n",
                Format::Text => report.to_text(),
            };
            // a closed pipe is not an error of ours
            let _ = io::stdout().lock().write_all(out.as_bytes());
            ExitCode::from(exit_code(&report) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT_ERROR as u8)
        }
    }
}
