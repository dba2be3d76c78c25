use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use omega_pda::grammar::{derivation_count, words_up_to};
use omega_pda::verify::{run_suite, Instance, Suite, VerifyConfig};
use omega_pda::{
    lasso_accepts, parse_spec, triple_pair_construct, word_weight, AnyPda, LassoWord, OmegaPda, StarOmega,
};

#[derive(Parser)]
#[command(name = "omega-pda", version, about = "Weighted omega-pushdown automata: grammars, queries and self-checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the triple-pair grammar of an automaton.
    Grammar {
        spec: PathBuf,
        /// Drop useless variables and their productions.
        #[arg(long)]
        trim: bool,
    },
    /// Print 1 if the finite word is accepted, else 0.
    Accept { spec: PathBuf, word: String },
    /// Print the weight of a finite word (derivation count for Boolean automata).
    Count { spec: PathBuf, word: String },
    /// Print 1 if the lasso word u·v^ω is accepted, else 0.
    AcceptOmega { spec: PathBuf, u: String, v: String },
    /// List the words up to a length with nonzero weight.
    Enumerate { spec: PathBuf, max_len: usize },
    /// Run self-check suites on built-in and seeded random automata.
    Verify {
        /// Additional automaton to include.
        spec: Option<PathBuf>,
        /// Run only this suite.
        #[arg(long)]
        suite: Option<Suite>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random automata per suite.
        #[arg(long, default_value_t = 25)]
        instances: usize,
        /// Word length bound for finite-word checks.
        #[arg(long, default_value_t = 5)]
        max_len: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    match run(cli.command, &mut out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> anyhow::Result<AnyPda> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_spec(&text).with_context(|| format!("{}", path.display()))
}

/// `eps` and the empty string both denote the empty word.
fn word(s: &str) -> Vec<char> {
    if s == "eps" {
        Vec::new()
    } else {
        s.chars().collect()
    }
}

fn checked_word<S: StarOmega>(pda: &OmegaPda<S>, s: &str) -> anyhow::Result<Vec<char>> {
    let w = word(s);
    pda.check_word(&w)?;
    Ok(w)
}

fn show_word(w: &[char]) -> String {
    if w.is_empty() {
        "eps".to_string()
    } else {
        w.iter().collect()
    }
}

/// Returns `Ok(false)` when a verification suite fails.
fn run(command: Command, out: &mut impl Write) -> anyhow::Result<bool> {
    match command {
        Command::Grammar { spec, trim } => {
            let text = match load(&spec)? {
                AnyPda::Boolean(p) => grammar_text(&p, trim)?,
                AnyPda::NatInf(p) => grammar_text(&p, trim)?,
            };
            out.write_all(text.as_bytes())?;
        }
        Command::Accept { spec, word } => {
            let accepted = match load(&spec)? {
                AnyPda::Boolean(p) => weight_of(&p, &word)?.is_nonzero(),
                AnyPda::NatInf(p) => weight_of(&p, &word)?.is_nonzero(),
            };
            writeln!(out, "{}", u8::from(accepted))?;
        }
        Command::Count { spec, word } => {
            let count = match load(&spec)? {
                AnyPda::Boolean(p) => {
                    let w = checked_word(&p, &word)?;
                    derivation_count(&triple_pair_construct(&p)?, &w)?
                }
                AnyPda::NatInf(p) => weight_of(&p, &word)?,
            };
            writeln!(out, "{count}")?;
        }
        Command::AcceptOmega { spec, u, v } => {
            let p = match load(&spec)? {
                AnyPda::Boolean(p) => p,
                AnyPda::NatInf(p) => p.to_boolean(),
            };
            let (u, v) = (checked_word(&p, &u)?, checked_word(&p, &v)?);
            let lasso = LassoWord::from_parts(u, v)?;
            writeln!(out, "{}", u8::from(lasso_accepts(&p, &lasso)?))?;
        }
        Command::Enumerate { spec, max_len } => match load(&spec)? {
            AnyPda::Boolean(p) => enumerate(&p, max_len, out)?,
            AnyPda::NatInf(p) => enumerate(&p, max_len, out)?,
        },
        Command::Verify { spec, suite, seed, instances, max_len } => {
            let extra = match spec {
                Some(path) => vec![Instance { name: path.display().to_string(), pda: load(&path)? }],
                None => Vec::new(),
            };
            let config = VerifyConfig { seed, instances, max_len };
            let suites = suite.map_or(Suite::ALL.to_vec(), |s| vec![s]);
            let mut ok = true;
            for s in suites {
                let report = run_suite(s, &config, &extra);
                write!(out, "{report}")?;
                ok &= report.ok();
            }
            return Ok(ok);
        }
    }
    Ok(true)
}

fn grammar_text<S: StarOmega>(p: &OmegaPda<S>, trim: bool) -> anyhow::Result<String> {
    let g = triple_pair_construct(p)?;
    Ok(if trim { g.trim().to_text() } else { g.to_text() })
}

fn weight_of<S: StarOmega>(p: &OmegaPda<S>, word: &str) -> anyhow::Result<S> {
    let w = checked_word(p, word)?;
    Ok(word_weight(&triple_pair_construct(p)?, &w)?)
}

fn enumerate<S: StarOmega>(p: &OmegaPda<S>, max_len: usize, out: &mut impl Write) -> anyhow::Result<()> {
    if max_len > 12 {
        bail!("max_len {max_len} is too large (at most 12)");
    }
    let g = triple_pair_construct(p)?;
    let mut chart = omega_pda::grammar::Chart::new(&g);
    for w in words_up_to(&p.sigma, max_len) {
        let weight = chart.weight(&w)?;
        if weight.is_nonzero() {
            writeln!(out, "{}\t{weight}", show_word(&w))?;
        }
    }
    Ok(())
}
