mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use torsor_lab::checks::{Config, Report, Verdict};
use torsor_lab::Error;

use commands::Outcome;

/// Finite models of torsor classification: checks, certificates and reports.
#[derive(Parser, Debug)]
#[command(name = "torsor-lab", version)]
struct Cli {
    #[command(subcommand)]
    module: Module,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// input JSON file
    #[arg(long = "in", global = true, value_name = "FILE")]
    input: Option<PathBuf>,
    /// levels to examine before answering unknown-at-horizon
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// enumeration budget (candidate maps)
    #[arg(long, global = true)]
    budget: Option<u128>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// write the JSON report here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// right-hand side c of `n + ιn = c` defining the quotient torus lattice
    #[arg(long = "sbar-condition", global = true, allow_hyphen_values = true)]
    sbar_condition: Option<i64>,
}

#[derive(Subcommand, Debug)]
pub enum Module {
    Groups {
        #[command(subcommand)]
        op: GroupsOp,
    },
    Gset {
        #[command(subcommand)]
        op: GsetOp,
    },
    Lattice {
        #[command(subcommand)]
        op: LatticeOp,
    },
    Cohomology {
        #[command(subcommand)]
        op: CohomologyOp,
    },
    Torsor {
        #[command(subcommand)]
        op: TorsorOp,
    },
    Invsys {
        #[command(subcommand)]
        op: InvsysOp,
    },
    Nt {
        #[command(subcommand)]
        op: NtOp,
    },
    Serre {
        #[command(subcommand)]
        op: SerreOp,
    },
    Suite {
        #[command(subcommand)]
        op: SuiteOp,
    },
}

#[derive(Subcommand, Debug)]
pub enum GroupsOp {
    /// conjugacy classes with centralizer orders
    Classes,
}

#[derive(Subcommand, Debug)]
pub enum GsetOp {
    Orbits,
    /// `{"left": <gset>, "right": <gset>}`
    Iso,
    /// one étale factor per orbit
    Descent,
}

#[derive(Subcommand, Debug)]
pub enum LatticeOp {
    /// `{"matrix": [[...]]}`
    Snf,
    /// `{"lattices": [...], "maps": [...]}`, checked as `0 → L0 → … → Ln → 0`
    Exact,
    /// `{"source": <lattice>, "target": <lattice>, "matrix": [[...]]}`
    Iso,
}

#[derive(Subcommand, Debug)]
pub enum CohomologyOp {
    /// H¹ of a lattice / finite abelian module, or the pointed set H¹ of a Γ-group
    H1 {
        #[arg(long, value_name = "FILE")]
        module: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum TorsorOp {
    /// the twisting bijection for `1 → A → B → C → 1` at a base class
    #[command(name = "verify-t4")]
    VerifyT4 {
        #[arg(long, value_name = "FILE")]
        seq: Option<PathBuf>,
        /// cocycle of B; the neutral class when omitted
        #[arg(long, value_name = "FILE")]
        base: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum InvsysOp {
    /// lim¹ verdict for a system recipe
    Classify {
        #[arg(long, value_name = "FILE")]
        recipe: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum NtOp {
    /// splitting type of p in ℚ[x]/(f)
    Split {
        #[arg(long)]
        poly: String,
        #[arg(long = "p")]
        p: u64,
    },
    /// failure certificate for a norm tower
    #[command(name = "tower-cert")]
    TowerCert {
        #[arg(long, value_name = "FILE")]
        tower: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum SerreOp {
    #[command(name = "verify-p4")]
    VerifyP4 {
        #[arg(long = "gammaF", value_name = "FILE")]
        gamma_f: Option<PathBuf>,
    },
    /// lim¹ verdict for a tower of CM data
    Tower {
        #[arg(long, value_name = "FILE")]
        chain: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum SuiteOp {
    /// every claim of the checklist, in order
    #[command(name = "paper-checks")]
    PaperChecks,
    /// a single claim of the checklist
    Check { claim: String },
    List,
}

fn config(c: &Common) -> Result<Config, Error> {
    let mut cfg = Config::default();
    if let Some(h) = c.horizon {
        cfg.horizon = h;
    }
    if let Some(b) = c.budget {
        if b == 0 {
            return Err(Error::Parse("--budget must be positive".into()));
        }
        cfg.budget = b;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(s) = c.sbar_condition {
        cfg.sbar_condition = s;
    }
    Ok(cfg)
}

fn summarize(r: &Report) {
    let mut err = std::io::stderr().lock();
    if let Some(entries) = r.evidence.get("entries").filter(|_| r.claim == "paper-checks") {
        for e in entries.as_array().into_iter().flatten() {
            let _ = writeln!(
                err,
                "  {:<14} {:<20} {:>7} ms",
                e["claim"].as_str().unwrap_or("?"),
                e["verdict"].as_str().unwrap_or("?"),
                e["timing_ms"]
            );
        }
    }
    let verdict = serde_json::to_value(r.verdict).ok();
    let _ = writeln!(err, "{}: {} ({} ms)", r.claim, verdict.as_ref().and_then(|v| v.as_str()).unwrap_or("?"), r.timing_ms);
    if let Some(e) = r.evidence.get("error").and_then(|e| e.as_str()) {
        let _ = writeln!(err, "error: {e}");
    }
}

fn emit(r: &Report, out: &Option<PathBuf>) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(r).map_err(|e| e.to_string())?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Verdict::Error.exit_code() } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let started = Instant::now();
    let claim = commands::claim_name(&cli.module);
    let report = match config(&cli.common) {
        Err(e) => Report::from_error(claim, &e, &Config::default(), started),
        Ok(cfg) => match commands::run(&cli.module, &cli.common.input, &cfg) {
            Ok(Outcome::Report(r)) => r,
            Ok(Outcome::Single { claim, verdict, evidence }) => Report::new(&claim, verdict, evidence, &cfg, started),
            Err(e) => Report::from_error(claim, &e, &cfg, started),
        },
    };
    summarize(&report);
    if let Err(e) = emit(&report, &cli.common.out) {
        eprintln!("error: {e}");
        return ExitCode::from(Verdict::Error.exit_code() as u8);
    }
    ExitCode::from(report.verdict.exit_code() as u8)
}
