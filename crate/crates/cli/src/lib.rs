//! Front end for titsforge: ingredient descriptors, the algebra file format,
//! the four tables and the command implementations behind the binary.

pub mod descriptor;
pub mod format;
pub mod fuzzing;
pub mod tables;

use std::path::Path;

use serde_json::{json, Value};
use titsforge::analyze::{analyze, AnalyzeOptions, DEFAULT_PRIMES, DEFAULT_ROUNDS, DEFAULT_SEED};
use titsforge::construct::{g_build, tits_build, tits_modified_build, LieSuperAlgebra, TitsOptions};
use titsforge::jordan::{ch3_verify, CH3_DRAWS};
use titsforge::{Error, Field};

use descriptor::Descriptor;
use format::AlgebraFile;
use tables::{run_table, TableKind, TableOptions};

pub const EXIT_OK: i32 = 0;
/// A mathematical check failed (Jacobi, expected dimensions, ch₃).
pub const EXIT_FAIL: i32 = 1;
/// Bad usage, unreadable input or a gated request.
pub const EXIT_USAGE: i32 = 2;

pub const SEED_ENV: &str = "TITSFORGE_SEED";

/// What a command produced: text for stdout, diagnostics for stderr, an exit code.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn usage(e: impl std::fmt::Display) -> Outcome {
        Outcome { stderr: format!("error: {e}\n"), code: EXIT_USAGE, ..Default::default() }
    }

    fn fail(e: impl std::fmt::Display) -> Outcome {
        Outcome { stderr: format!("error: {e}\n"), code: EXIT_FAIL, ..Default::default() }
    }
}

/// `--seed`, else `TITSFORGE_SEED`, else the fixed default.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, Error> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => parse_seed(&v).map_err(|m| Error::Invalid(format!("{SEED_ENV}: {m}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let r = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16),
        None => t.parse(),
    };
    r.map_err(|e| format!("cannot read seed {s:?}: {e}"))
}

/// `5,7,13`
pub fn parse_primes(s: &str) -> Result<Vec<u32>, Error> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let p: u64 = part.parse().map_err(|_| Error::Invalid(format!("cannot read prime {part:?}")))?;
        match Field::new(p)? {
            Field::Prime(p) => out.push(p),
            Field::Rational => return Err(Error::Invalid("0 is not a prime".into())),
        }
    }
    if out.is_empty() {
        return Err(Error::Invalid("empty prime list".into()));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    Tits,
    G,
    TitsModified,
}

impl std::str::FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Construction, Error> {
        match s {
            "tits" => Ok(Construction::Tits),
            "g" => Ok(Construction::G),
            "tits-modified" => Ok(Construction::TitsModified),
            _ => Err(Error::Invalid(format!("unknown construction {s:?}; expected tits, g or tits-modified"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BuildArgs {
    pub construction: Construction,
    pub first: String,
    pub second: String,
    pub field: Field,
    pub force: bool,
    pub seed: u64,
}

/// Builds the algebra, or reports whether the failure was a usage problem.
pub fn build_algebra(a: &BuildArgs) -> Result<LieSuperAlgebra, (i32, Error)> {
    let usage = |e: Error| (EXIT_USAGE, e);
    let x: Descriptor = a.first.parse().map_err(usage)?;
    let y: Descriptor = a.second.parse().map_err(usage)?;
    let f = a.field;
    let built = match a.construction {
        Construction::Tits => {
            let c = x.composition(f).map_err(usage)?;
            let j = y.jordan(f).map_err(usage)?;
            tits_build(&c, &j, &TitsOptions { force: a.force, ch3_seed: a.seed })
        }
        Construction::G => g_build(&x.symmetric(f).map_err(usage)?, &y.symmetric(f).map_err(usage)?),
        Construction::TitsModified => {
            let c = x.composition(f).map_err(usage)?;
            let j = y.jordan(f).map_err(usage)?;
            tits_modified_build(&c, &j)
        }
    };
    built.map_err(|e| match e {
        Error::Gating(_) | Error::FieldMismatch(_) | Error::InvalidField(_) => (EXIT_USAGE, e),
        other => (EXIT_FAIL, other),
    })
}

pub fn cmd_build(a: &BuildArgs, out: Option<&Path>) -> Outcome {
    let alg = match build_algebra(a) {
        Ok(x) => x,
        Err((code, e)) => return Outcome { stderr: format!("error: {e}\n"), code, ..Default::default() },
    };
    let file = AlgebraFile::from_algebra(&alg);
    let text = file.emit();
    let (e, o) = alg.dims();
    let mut res = Outcome::default();
    let verdict = if alg.jacobi().passes() { "pass" } else { "fail" };
    res.stderr = format!("built {} ({e}|{o}), jacobi {verdict}\n", alg.provenance().construction);
    match out {
        Some(p) => {
            if let Err(err) = std::fs::write(p, &text) {
                return Outcome::usage(format!("cannot write {}: {err}", p.display()));
            }
        }
        None => res.stdout = text,
    }
    if !alg.jacobi().passes() && !a.force {
        res.stderr.push_str("error: the bracket fails the super-Jacobi identity\n");
        res.code = EXIT_FAIL;
    }
    res
}

#[derive(Clone, Debug)]
pub struct AnalyzeArgs {
    pub simplicity: bool,
    pub killing: bool,
    pub primes: Vec<u32>,
    pub seed: u64,
    pub rounds: usize,
    pub timings: bool,
}

impl Default for AnalyzeArgs {
    fn default() -> Self {
        AnalyzeArgs {
            simplicity: false,
            killing: false,
            primes: DEFAULT_PRIMES.to_vec(),
            seed: DEFAULT_SEED,
            rounds: DEFAULT_ROUNDS,
            timings: false,
        }
    }
}

pub fn analyze_file(file: &AlgebraFile, a: &AnalyzeArgs) -> Result<Value, Error> {
    let opts = AnalyzeOptions {
        simplicity_detail: a.simplicity,
        killing: a.killing,
        primes: a.primes.clone(),
        seed: a.seed,
        rounds: a.rounds,
    };
    let r = analyze(&file.table, &opts)?;
    Ok(r.to_json(&file.table, a.simplicity, a.timings))
}

pub fn cmd_analyze_text(text: &str, a: &AnalyzeArgs) -> Outcome {
    let file = match AlgebraFile::parse(text) {
        Ok(f) => f,
        Err(e) => return Outcome::usage(e),
    };
    match analyze_file(&file, a) {
        Ok(v) => {
            let code = if v["jacobi"] == "pass" { EXIT_OK } else { EXIT_FAIL };
            Outcome { stdout: format!("{v}\n"), code, ..Default::default() }
        }
        Err(e) => Outcome::fail(e),
    }
}

pub fn cmd_analyze(path: &Path, a: &AnalyzeArgs) -> Outcome {
    match std::fs::read_to_string(path) {
        Ok(t) => cmd_analyze_text(&t, a),
        Err(e) => Outcome::usage(format!("cannot read {}: {e}", path.display())),
    }
}

pub fn cmd_table(kind: TableKind, f: Field, opts: &TableOptions, as_json: bool) -> Outcome {
    match run_table(kind, f, opts) {
        Ok(r) => Outcome {
            stdout: if as_json { format!("{:#}\n", r.to_json()) } else { r.to_text() },
            code: if r.ok() { EXIT_OK } else { EXIT_FAIL },
            ..Default::default()
        },
        Err(e) => Outcome::usage(e),
    }
}

pub fn cmd_ch3(jordan: &str, f: Field, seed: u64, draws: usize) -> Outcome {
    let j = match jordan.parse::<Descriptor>().and_then(|d| d.jordan(f)) {
        Ok(j) => j,
        Err(e) => return Outcome::usage(e),
    };
    match ch3_verify(&j, seed, draws.max(CH3_DRAWS)) {
        Ok(r) => {
            let v = serde_json::to_value(&r).unwrap_or_else(|e| json!({ "error": e.to_string() }));
            Outcome { stdout: format!("{v}\n"), code: if r.holds { EXIT_OK } else { EXIT_FAIL }, ..Default::default() }
        }
        Err(e) => Outcome::usage(e),
    }
}
