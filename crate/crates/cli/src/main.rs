use std::io::Read;
use std::process::ExitCode;
use std::sync::mpsc;
use std::time::Duration;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use pll_core::interp::{interpolate, SplitSequent};
use pll_core::prover::{G3Prover, G4Prover, DEFAULT_BUDGET};
use pll_core::suite::{run_suite, SuiteConfig, SuiteKind};
use pll_core::transform::eliminate_cut;
use pll_core::uniform::{tree_size, CalculusHandle, Normalizer, PropertyChecker, Quantifier, UExpr};
use pll_core::{parse, parse_sequent, Derivation, Error, Notation};
use serde_json::json;

const STACK: usize = 512 * 1024 * 1024;
const RAW_PRINT_LIMIT: u64 = 20_000;

#[derive(Parser)]
#[command(name = "pll", version, about = "Proof search, cut elimination and interpolation for lax logic")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Node budget for G3iLL proof search.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Wall-clock limit for the whole command.
    #[arg(long, global = true)]
    timeout: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CalcArg {
    G3,
    G4,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a sequent and print a derivation.
    Prove {
        #[arg(long, value_enum, default_value_t = CalcArg::G4)]
        calculus: CalcArg,
        sequent: String,
    },
    /// Craig interpolant of phi -> psi.
    Interpolate {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: String,
    },
    /// Uniform interpolant of a sequent.
    Uniform {
        #[arg(long, default_value = "forall")]
        quantifier: String,
        #[arg(long)]
        atom: String,
        #[arg(long)]
        sequent: String,
        /// full, Land-only or Ror-only.
        #[arg(long, default_value = "full")]
        calculus: String,
    },
    /// Remove cuts from a derivation given as JSON (`-` reads stdin).
    EliminateCut { derivation: String },
    /// Run a randomized property suite.
    Check {
        suite: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        /// Comma-separated atom pool.
        #[arg(long, default_value = "p,q,r")]
        atoms: String,
    },
}

struct Outcome {
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let timeout = cli.timeout;
    let (tx, rx) = mpsc::channel();
    let worker = std::thread::Builder::new()
        .stack_size(STACK)
        .spawn(move || {
            let _ = tx.send(run(&cli));
        })
        .expect("spawn worker thread");
    let result = match timeout {
        Some(secs) => match rx.recv_timeout(Duration::from_secs_f64(secs)) {
            Ok(r) => r,
            Err(_) => Err(anyhow::Error::new(Error::Timeout)),
        },
        None => rx.recv().unwrap_or_else(|_| Err(anyhow::anyhow!("worker panicked"))),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if timeout.is_none() {
                let _ = worker.join();
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<Error>() {
                Some(Error::BudgetExceeded(_)) | Some(Error::Timeout) => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Prove { calculus, sequent } => prove(cli, *calculus, sequent),
        Command::Interpolate { phi, psi } => craig(cli, phi, psi),
        Command::Uniform {
            quantifier,
            atom,
            sequent,
            calculus,
        } => uniform(cli, quantifier, atom, sequent, calculus),
        Command::EliminateCut { derivation } => cut(cli, derivation),
        Command::Check {
            suite,
            count,
            seed,
            max_depth,
            atoms,
        } => check(cli, suite, *count, *seed, *max_depth, atoms),
    }
}

fn render(d: &Derivation, format: Format) -> String {
    match format {
        Format::Text => d.render_text(Notation::Ascii),
        Format::Latex => d.render_latex(),
        Format::Json => d.to_json().to_string(),
    }
}

fn prove(cli: &Cli, calculus: CalcArg, text: &str) -> anyhow::Result<Outcome> {
    let goal = parse_sequent(text)?;
    let derivation = match calculus {
        CalcArg::G4 => G4Prover::new().prove(&goal),
        CalcArg::G3 => G3Prover::new(cli.budget.unwrap_or(DEFAULT_BUDGET)).prove(&goal)?,
    };
    let code = if derivation.is_some() { 0 } else { 1 };
    let text = match (cli.format, &derivation) {
        (Format::Json, _) => {
            let value = json!({
                "sequent": goal.to_string(),
                "derivable": derivation.is_some(),
                "derivation": derivation.as_ref().map(Derivation::to_json),
            });
            format!("{value}\n")
        }
        (_, Some(d)) if cli.format == Format::Latex => format!("{}\n", render(d, Format::Latex)),
        (_, Some(d)) => format!("derivable: {goal}\n{}", render(d, Format::Text)),
        (Format::Latex, None) => format!("% not derivable: {}\n", goal.render(Notation::Latex)),
        (_, None) => format!("not derivable: {goal}\n"),
    };
    Ok(Outcome { text, code })
}

fn craig(cli: &Cli, phi: &str, psi: &str) -> anyhow::Result<Outcome> {
    let phi = parse(phi).context("parsing --phi")?;
    let psi = parse(psi).context("parsing --psi")?;
    let split = SplitSequent::new([phi.clone()], [], Some(psi.clone()));
    let chi = match interpolate(&split, cli.budget) {
        Ok(chi) => chi,
        Err(Error::NotATheorem(s)) => {
            let text = match cli.format {
                Format::Json => format!("{}\n", json!({ "derivable": false, "sequent": s })),
                _ => format!("not derivable: {s}\n"),
            };
            return Ok(Outcome { text, code: 1 });
        }
        Err(e) => return Err(e.into()),
    };
    let v = split.verify(&chi, &mut G4Prover::new());
    let code = if v.holds() { 0 } else { 2 };
    let text = match cli.format {
        Format::Json => format!(
            "{}\n",
            json!({ "interpolant": chi.to_string(), "formula": chi, "verification": v })
        ),
        Format::Latex => format!("{}\n", chi.render(Notation::Latex)),
        Format::Text => format!(
            "interpolant: {chi}\n  {phi} => {chi}: {}\n  {chi} => {psi}: {}\n  shared atoms only: {}\n",
            v.left_derivable, v.right_derivable, v.atoms_shared
        ),
    };
    Ok(Outcome { text, code })
}

fn uniform(cli: &Cli, quantifier: &str, atom: &str, sequent: &str, calculus: &str) -> anyhow::Result<Outcome> {
    let q: Quantifier = quantifier.parse()?;
    let calc: CalculusHandle = calculus.parse()?;
    let s = parse_sequent(sequent)?;
    let leaf = UExpr::qseq(q, atom, s.clone());
    let raw = Normalizer::new(calc).normalize(&leaf)?;
    let simplified = Normalizer::new(calc).simplifying().quantify(q, &s, atom)?;
    let size = tree_size(&raw);
    let raw_text = (size <= RAW_PRINT_LIMIT).then(|| raw.render(Notation::Ascii));
    let report = match calc {
        CalculusHandle::Full => Some(PropertyChecker::new().check(&s, atom)?),
        _ => None,
    };
    let text = match cli.format {
        Format::Json => format!(
            "{}\n",
            json!({
                "leaf": leaf.to_string(),
                "calculus": calc.to_string(),
                "raw": raw_text,
                "raw_size": size,
                "simplified": simplified.to_string(),
                "properties": report,
            })
        ),
        Format::Latex => format!("{}\n", simplified.render(Notation::Latex)),
        Format::Text => {
            let mut out = format!("leaf: {leaf}\ncalculus: {calc}\n");
            match raw_text {
                Some(r) => out += &format!("raw: {r}\n"),
                None => out += &format!("raw: ({size} nodes, not shown)\n"),
            }
            out += &format!("simplified: {simplified}\n");
            if let Some(r) = &report {
                out += &format!(
                    "(forall-l): {}\n(exists-r): {}\n(forall-exists): {} over {} partitions{}\n{atom}-free: {}\n",
                    r.forall_left,
                    r.exists_right,
                    r.forall_exists,
                    r.partitions,
                    if r.derivable { "" } else { " (not derivable)" },
                    r.p_free
                );
            }
            out
        }
    };
    let code = match &report {
        Some(r) if !r.holds() => 1,
        _ => 0,
    };
    Ok(Outcome { text, code })
}

fn cut(cli: &Cli, source: &str) -> anyhow::Result<Outcome> {
    let text = if source == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(source).with_context(|| format!("reading {source}"))?
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
    let d = Derivation::from_json(value)?;
    let (out, report) = eliminate_cut(&d)?;
    let text = match cli.format {
        Format::Json => format!(
            "{}\n",
            json!({ "derivation": out.to_json(), "steps": report.steps, "cuts": report.cuts })
        ),
        Format::Latex => format!("{}\n", out.render_latex()),
        Format::Text => format!(
            "cuts removed: {} in {} steps\n{}",
            report.cuts,
            report.steps,
            out.render_text(Notation::Ascii)
        ),
    };
    Ok(Outcome { text, code: 0 })
}

fn check(cli: &Cli, suite: &str, count: usize, seed: u64, max_depth: usize, atoms: &str) -> anyhow::Result<Outcome> {
    let kind: SuiteKind = suite.parse()?;
    let pool: Vec<&str> = atoms.split(',').map(str::trim).filter(|a| !a.is_empty()).collect();
    let mut cfg = SuiteConfig::new(count, seed, max_depth).with_atoms(&pool);
    cfg.budget = cli.budget;
    let report = run_suite(kind, &cfg)?;
    let text = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string(&report)?),
        _ => report.to_string(),
    };
    Ok(Outcome {
        text,
        code: if report.ok() { 0 } else { 1 },
    })
}
