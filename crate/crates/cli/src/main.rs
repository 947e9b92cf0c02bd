use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use confcert::critical::critical_pairs;
use confcert::{check_certificate, parse_certificate_with_vars, parse_trs_with_vars, Certificate, Verdict};

/// Check confluence and non-confluence certificates for term rewrite systems.
#[derive(Parser)]
#[command(name = "confcert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a certificate; prints CERTIFIED or REJECTED: <reason>.
    Check {
        #[arg(long)]
        trs: PathBuf,
        #[arg(long)]
        cert: PathBuf,
        /// Also print the parsed system and certificate.
        #[arg(long)]
        verbose: bool,
    },
    /// Print the non-trivial critical pairs of a system.
    Cps {
        #[arg(long)]
        trs: PathBuf,
    },
}

const EXIT_REJECTED: u8 = 1;
const EXIT_INPUT: u8 = 2;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn check(trs: &Path, cert: &Path, verbose: bool) -> Result<Verdict, String> {
    let parsed = parse_trs_with_vars(&read(trs)?).map_err(|e| format!("{}: {e}", trs.display()))?;
    let certificate: Certificate =
        parse_certificate_with_vars(&read(cert)?, &parsed.vars).map_err(|e| format!("{}: {e}", cert.display()))?;
    let verdict = check_certificate(&parsed.trs, &certificate);
    println!("{verdict}");
    if verbose {
        println!("system:");
        for (i, r) in parsed.trs.rules.iter().enumerate() {
            println!("  {:>3}: {r}", i + 1);
        }
        println!("certificate:\n{certificate}");
    }
    Ok(verdict)
}

fn cps(trs: &Path) -> Result<(), String> {
    let parsed = parse_trs_with_vars(&read(trs)?).map_err(|e| format!("{}: {e}", trs.display()))?;
    for cp in critical_pairs(&parsed.trs, true) {
        println!(
            "{} <- {} -> {}  (rules {} and {} at {})",
            cp.left,
            cp.peak,
            cp.right,
            cp.outer + 1,
            cp.inner + 1,
            cp.pos
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { trs, cert, verbose } => check(&trs, &cert, verbose).map(|v| {
            if v.is_certified() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_REJECTED)
            }
        }),
        Command::Cps { trs } => cps(&trs).map(|()| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|msg| {
        eprintln!("error: {msg}");
        ExitCode::from(EXIT_INPUT)
    })
}
