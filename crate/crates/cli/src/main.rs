//! `ndk`: check, normalize and play proof-term problem files.
//!
//! Exit codes: 0 success, 1 semantic failure, 2 usage or parse error.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ndk_core::church::{self, print_with_numerals, ChurchError, Strategy};
use ndk_core::dialogue::{explore, open_game_with, play_random, play_script, DialogueState};
use ndk_core::reducer::{normalize, render_path, ReduceError};
use ndk_core::text::{parse_problem, print_formula, print_term, Notation, Problem};
use ndk_core::{check, max_steps_from_env, DEFAULT_LAMBDA_MAX_STEPS, DEFAULT_MAX_STEPS};

#[derive(Parser)]
#[command(name = "ndk", version, about = "Proof terms, beta-reduction and dialogue games")]
struct Cli {
    /// Print formulas and terms in typeset notation (FST(⟨a,b⟩), ∀x:D. ...).
    #[arg(long, global = true)]
    paper: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check every judgement in a problem file.
    Check { path: PathBuf },
    /// Normalize every judgement (or, with --lambda, every untyped term).
    Normalize {
        path: PathBuf,
        /// Print each rewrite step.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        max_steps: Option<usize>,
        /// Read the file as untyped lambda terms, one per line.
        #[arg(long)]
        lambda: bool,
        #[arg(long, value_enum, default_value_t = StrategyArg::Normal)]
        strategy: StrategyArg,
        /// Print traces as JSON.
        #[arg(long, conflicts_with = "lambda")]
        json: bool,
    },
    /// Normalize untyped lambda terms, one per line.
    Lambda {
        path: PathBuf,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Normal)]
        strategy: StrategyArg,
    },
    /// Play a dialogue game on a judgement.
    Play {
        path: PathBuf,
        /// Judgement to play, counting from 0.
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Play every judgement in the file.
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = Policy::Exhaustive)]
        policy: Policy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of Opponent moves.
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// Opponent move labels, one per line (`--policy script`).
        #[arg(long, required_if_eq("policy", "script"))]
        script: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Serve the session gateway over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Problem file used when a session request carries no problem.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Directory for per-session logs, replayed on start.
        #[arg(long)]
        persist: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Normal,
    Applicative,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Normal => Strategy::NormalOrder,
            StrategyArg::Applicative => Strategy::Applicative,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Policy {
    Exhaustive,
    Random,
    Script,
}

/// Unreadable input or a parse error; exits with 2.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let notation = if cli.paper { Notation::Paper } else { Notation::Ascii };
    match run(cli.cmd, notation) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.chain().any(|c| c.is::<Usage>()) { 2 } else { 1 })
        }
    }
}

/// `Ok(false)` is a semantic failure that has already been reported.
fn run(cmd: Cmd, notation: Notation) -> Result<bool> {
    match cmd {
        Cmd::Check { path } => cmd_check(&path, notation),
        Cmd::Normalize { path, trace, max_steps, lambda: true, strategy, .. }
        | Cmd::Lambda { path, trace, max_steps, strategy } => cmd_lambda(&path, trace, max_steps, strategy.into()),
        Cmd::Normalize { path, trace, max_steps, json, .. } => cmd_normalize(&path, trace, max_steps, json, notation),
        Cmd::Play { path, index, all, policy, seed, depth, script, json } => {
            let opts = PlayOpts { policy, seed, depth, script, json, notation };
            cmd_play(&path, index, all, &opts)
        }
        Cmd::Serve { port, host, corpus, persist } => cmd_serve(&host, port, corpus, persist),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Problem> {
    let src = read(path)?;
    parse_problem(&src).map_err(|e| usage(format!("{}:{e}", path.display())))
}

fn budget(flag: Option<usize>, default: usize) -> usize {
    flag.unwrap_or_else(|| max_steps_from_env(default))
}

/// Runs `f` over `items` on scoped threads, keeping the input order.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|x| s.spawn(move || f(x))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn cmd_check(path: &Path, notation: Notation) -> Result<bool> {
    let p = load(path)?;
    let results = par_map(&p.judgements, |(_, j)| check(&j.ctx, &j.term, &j.formula));
    let mut bad = 0;
    for ((line, j), r) in p.judgements.iter().zip(results) {
        match r {
            Ok(_) => println!("line {line}: ok  {}", print_formula(&j.formula, notation)),
            Err(e) => {
                bad += 1;
                println!("line {line}: {} at {}: {}", e.kind.name(), render_path(&e.path), e.kind);
            }
        }
    }
    println!("{} judgements, {bad} invalid", p.judgements.len());
    Ok(bad == 0)
}

fn cmd_normalize(path: &Path, trace: bool, max_steps: Option<usize>, json: bool, notation: Notation) -> Result<bool> {
    let p = load(path)?;
    let max = budget(max_steps, DEFAULT_MAX_STEPS);
    let results = par_map(&p.judgements, |(_, j)| {
        let j = check(&j.ctx, &j.term, &j.formula).map_err(|e| format!("{} at {}: {}", e.kind.name(), render_path(&e.path), e.kind))?;
        normalize(&j, max).map_err(|e| match e {
            ReduceError::Timeout { max_steps, .. } => format!("no normal form within {max_steps} steps"),
            other => other.to_string(),
        })
    });
    let mut ok = true;
    let mut out = Vec::new();
    for ((line, _), r) in p.judgements.iter().zip(results) {
        match r {
            Ok((_, tr)) if json => out.push(serde_json::json!({ "line": line, "trace": tr.to_json(notation) })),
            Ok((nf, tr)) => {
                let n = tr.steps.len();
                let rules: Vec<String> = tr.steps.iter().map(|s| s.rule.to_string()).collect();
                let plural = if n == 1 { "" } else { "s" };
                if n == 0 {
                    println!("line {line}: {} [0 steps]", print_term(&nf, notation));
                } else {
                    println!("line {line}: {} [{n} step{plural}: {}]", print_term(&nf, notation), rules.join(", "));
                }
                if trace {
                    for l in tr.lines(notation) {
                        println!("  {l}");
                    }
                }
            }
            Err(msg) => {
                ok = false;
                if json {
                    out.push(serde_json::json!({ "line": line, "error": msg }));
                } else {
                    println!("line {line}: {msg}");
                }
            }
        }
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&out)?);
    }
    Ok(ok)
}

fn cmd_lambda(path: &Path, trace: bool, max_steps: Option<usize>, strategy: Strategy) -> Result<bool> {
    let src = read(path)?;
    let lines = church::parse_lambda_file(&src).map_err(|e| usage(format!("{}:{e}", path.display())))?;
    let max = budget(max_steps, DEFAULT_LAMBDA_MAX_STEPS);
    let mut ok = true;
    for l in &lines {
        match church::normalize(&l.term, max, strategy) {
            Ok((nf, steps)) => {
                let plural = if steps.len() == 1 { "" } else { "s" };
                println!("line {}: {} [{} step{plural}]", l.line, print_with_numerals(&nf), steps.len());
                if trace {
                    for (i, s) in steps.iter().enumerate() {
                        println!("  {}", s.line(i + 1));
                    }
                }
            }
            Err(ChurchError::Timeout { max_steps, .. }) => {
                ok = false;
                println!("line {}: no normal form within {max_steps} steps", l.line);
            }
            Err(e) => return Err(e.into()),
        }
    }
    println!("{} terms", lines.len());
    Ok(ok)
}

struct PlayOpts {
    policy: Policy,
    seed: u64,
    depth: usize,
    script: Option<PathBuf>,
    json: bool,
    notation: Notation,
}

fn cmd_play(path: &Path, index: usize, all: bool, opts: &PlayOpts) -> Result<bool> {
    let p = load(path)?;
    let script = match &opts.script {
        Some(s) => Some(script_lines(&read(s)?)),
        None => None,
    };
    let chosen: Vec<_> = if all {
        p.judgements.iter().collect()
    } else {
        let j = p
            .judgements
            .get(index)
            .ok_or_else(|| usage(format!("judgement index {index} out of range ({} judgements)", p.judgements.len())))?;
        vec![j]
    };
    let max = max_steps_from_env(DEFAULT_MAX_STEPS);
    let mut ok = true;
    for (line, j) in chosen {
        if all {
            println!("line {line}: {}", print_formula(&j.formula, opts.notation));
        }
        let state = match open_game_with(j, max) {
            Ok(s) => s,
            Err(e) => {
                println!("line {line}: {e}");
                ok = false;
                continue;
            }
        };
        ok &= play_one(&state, script.as_deref(), opts)?;
    }
    Ok(ok)
}

/// Non-blank, non-comment lines with their line numbers.
fn script_lines(src: &str) -> Vec<(usize, String)> {
    src.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.to_string()))
        .collect()
}

fn play_one(state: &DialogueState, script: Option<&[(usize, String)]>, opts: &PlayOpts) -> Result<bool> {
    match opts.policy {
        Policy::Exhaustive => {
            let tree = explore(state, opts.depth);
            if opts.json {
                println!("{}", serde_json::to_string_pretty(&tree.to_json())?);
            }
            let c = tree.leaf_counts();
            println!("{}", c.summary());
            for r in tree.stalls() {
                println!("stalled: {r}");
            }
            Ok(c.stalled == 0)
        }
        Policy::Random => {
            let t = play_random(state, opts.seed, opts.depth);
            if opts.json {
                println!("{}", serde_json::to_string_pretty(&t.to_json())?);
            } else {
                for l in t.lines() {
                    println!("{l}");
                }
                println!("status: {}", t.status());
            }
            Ok(!matches!(t.status(), ndk_core::dialogue::Status::Stalled(_)))
        }
        Policy::Script => {
            let script = script.context("--policy script needs --script")?;
            let labels: Vec<String> = script.iter().map(|(_, l)| l.clone()).collect();
            match play_script(state, &labels) {
                Ok(t) => {
                    if opts.json {
                        println!("{}", serde_json::to_string_pretty(&t.to_json())?);
                    } else {
                        for l in t.lines() {
                            println!("{l}");
                        }
                        println!("status: {}", t.status());
                    }
                    Ok(!matches!(t.status(), ndk_core::dialogue::Status::Stalled(_)))
                }
                Err(e) => {
                    let line = script[e.index - 1].0;
                    println!("script line {line}: IllegalMove: {}", e.error);
                    Ok(false)
                }
            }
        }
    }
}

fn cmd_serve(host: &str, port: u16, corpus: Option<PathBuf>, persist: Option<PathBuf>) -> Result<bool> {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let corpus = match corpus {
        Some(p) => {
            let src = read(&p)?;
            parse_problem(&src).map_err(|e| usage(format!("{}:{e}", p.display())))?;
            Some(src)
        }
        None => None,
    };
    let gateway = ndk_gateway::Gateway::new(ndk_gateway::Config { corpus, persist })
        .map_err(|e| anyhow::anyhow!("cannot start: {e}"))?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = match tokio::net::TcpListener::bind((host, port)).await {
            Ok(l) => l,
            Err(e) if e.kind() == std::io::ErrorKind::AddrInUse => {
                eprintln!("error: PortInUse: {host}:{port}");
                return Ok(false);
            }
            Err(e) => return Err(e.into()),
        };
        println!("listening on http://{}", listener.local_addr()?);
        ndk_gateway::serve(listener, Arc::new(gateway)).await?;
        Ok(true)
    })
}
