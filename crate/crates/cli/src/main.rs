use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use titsforge::analyze::DEFAULT_ROUNDS;
use titsforge::Field;
use titsforge_cli::tables::{TableKind, TableOptions};
use titsforge_cli::*;

#[derive(Parser)]
#[command(name = "titsforge", version, about = "Build and analyse Lie superalgebras from composition and Jordan algebras")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build 𝒯(C,J), 𝔤(S,S′) or 𝒯̃(C,J) and write it as an algebra file.
    Build {
        /// tits | g | tits-modified
        construction: String,
        first: String,
        second: String,
        /// q or fp:<p>
        #[arg(long, default_value = "q")]
        field: String,
        /// Output path; stdout when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Skip the degree-3 gate of the octonion row and keep a failing bracket.
        #[arg(long)]
        force: bool,
        #[arg(long, value_parser = parse_seed)]
        seed: Option<u64>,
    },
    /// Jacobi, derived algebra, center, simplicity and optionally the Killing form.
    Analyze {
        path: PathBuf,
        /// Include the ideal witness basis and per-prime verdicts.
        #[arg(long)]
        simplicity: bool,
        #[arg(long)]
        killing: bool,
        /// Primes used to certify simplicity over ℚ.
        #[arg(long)]
        primes: Option<String>,
        #[arg(long, value_parser = parse_seed)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_ROUNDS)]
        rounds: usize,
        #[arg(long)]
        timings: bool,
    },
    /// magic | rectangle | magic3 | supermagic
    Table {
        which: String,
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        json: bool,
        #[arg(long, value_parser = parse_seed)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Test the degree-3 Cayley-Hamilton identity on the Grassmann envelope.
    Ch3 {
        jordan: String,
        #[arg(long, default_value = "q")]
        field: String,
        #[arg(long, value_parser = parse_seed)]
        seed: Option<u64>,
        #[arg(long, default_value_t = titsforge::jordan::CH3_DRAWS)]
        draws: usize,
    },
}

fn run(cli: Cli) -> Result<Outcome, String> {
    let field = |s: &str| Field::parse_spec(s).map_err(|e| e.to_string());
    let seed = |s: Option<u64>| resolve_seed(s).map_err(|e| e.to_string());
    Ok(match cli.cmd {
        Cmd::Build { construction, first, second, field: fs, out, force, seed: sd } => {
            let args = BuildArgs {
                construction: construction.parse().map_err(|e: titsforge::Error| e.to_string())?,
                first,
                second,
                field: field(&fs)?,
                force,
                seed: seed(sd)?,
            };
            cmd_build(&args, out.as_deref())
        }
        Cmd::Analyze { path, simplicity, killing, primes, seed: sd, rounds, timings } => {
            let mut args = AnalyzeArgs { simplicity, killing, seed: seed(sd)?, rounds, timings, ..Default::default() };
            if let Some(p) = primes {
                args.primes = parse_primes(&p).map_err(|e| e.to_string())?;
            }
            cmd_analyze(&path, &args)
        }
        Cmd::Table { which, field: fs, json, seed: sd, threads } => {
            let kind: TableKind = which.parse().map_err(|e: titsforge::Error| e.to_string())?;
            let default_field = match kind {
                TableKind::Magic | TableKind::Rectangle => "q",
                TableKind::Magic3 | TableKind::Supermagic => "fp:3",
            };
            let f = field(fs.as_deref().unwrap_or(default_field))?;
            let mut opts = TableOptions::default();
            opts.analysis.seed = seed(sd)?;
            if let Some(t) = threads {
                opts.threads = t.max(1);
            }
            cmd_table(kind, f, &opts, json)
        }
        Cmd::Ch3 { jordan, field: fs, seed: sd, draws } => cmd_ch3(&jordan, field(&fs)?, seed(sd)?, draws),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let out = run(cli).unwrap_or_else(|m| Outcome { stderr: format!("error: {m}\n"), code: EXIT_USAGE, ..Default::default() });
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
