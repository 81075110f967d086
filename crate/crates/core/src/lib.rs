//! A proof-term kernel for intuitionistic predicate logic.
//!
//! Proofs are terms: introduction rules build them (pairs, injections,
//! abstractions, witnesses, identity evidence) and elimination rules take
//! them apart (`fst`, `snd`, `case`, `app`, `extr`, `inst`, `rewr`). The
//! crate provides
//!
//! - [`syntax`]: sorts, individuals, formulas and proof terms with
//!   capture-avoiding substitution and alpha-equivalence,
//! - [`church`]: the untyped lambda calculus with Church's conversion rules
//!   I (renaming), II (contraction) and III (expansion),
//! - [`checker`]: a bidirectional type checker with eigenvariable conditions,
//! - [`reducer`]: the eight beta-rewritings, normalization, traces and replay,
//! - [`dialogue`]: an attack/defense game engine driven by the reducer,
//! - [`text`]: the concrete syntax (parser, printer, problem files).

pub mod checker;
pub mod church;
pub mod dialogue;
pub mod reducer;
pub mod syntax;
pub mod text;

pub use checker::{check, synth, CheckError, CheckErrorKind, Context, Entry, Judgement};
pub use reducer::{RewriteStep, RewriteTrace, RuleName};
pub use syntax::{Evidence, Formula, Individual, Name, ProofTerm, Signature, Sort};

/// Step budget for proof-term normalization when none is given.
pub const DEFAULT_MAX_STEPS: usize = 100_000;

/// Step budget for untyped lambda terms when none is given.
pub const DEFAULT_LAMBDA_MAX_STEPS: usize = 10_000;

/// Environment variable overriding the default step budgets.
pub const MAX_STEPS_ENV: &str = "NDK_MAX_STEPS";

/// Reads [`MAX_STEPS_ENV`], falling back to `default` when unset or invalid.
pub fn max_steps_from_env(default: usize) -> usize {
    std::env::var(MAX_STEPS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(default)
}
