//! Beta-reduction of proof terms.
//!
//! Every elimination applied to the matching introduction contracts:
//!
//! ```text
//! fst(<a,b>)                      ~> a
//! snd(<a,b>)                      ~> b
//! case(inl(a), x.f, y.g)          ~> f[a/x]
//! case(inr(b), x.f, y.g)          ~> g[b/y]
//! app(\x. b, a)                   ~> b[a/x]
//! extr(/\x:D. g, t)               ~> g[t/x]
//! inst(eps(x. g, s), h.t.d)       ~> d[g[s/x]/h, s/t]
//! rewr(r(a,b), t.d)               ~> d[r/t]
//! ```
//!
//! Ascriptions directly around the introduced scrutinee are dropped by the
//! same step. Their formula moves onto any introduction the step puts in
//! its place (the substituted value or the result), so a checked term stays
//! checkable after every step. Other shapes (for instance `fst(inl(a))`) are
//! left stuck.

mod trace;

use thiserror::Error;

use crate::checker::{self, CheckError, Judgement};
use crate::syntax::{subst_evidence, subst_ind, subst_proof, AlphaEq, Formula, Path, ProofTerm};

pub use trace::{render_path, RewriteStep, RewriteTrace, RuleName, TraceJson, TraceStepJson};

/// Splits off ascriptions, keeping the innermost one.
fn peel(t: &ProofTerm) -> (&ProofTerm, Option<&Formula>) {
    let mut ann = None;
    let mut cur = t;
    while let ProofTerm::Ann(inner, f) = cur {
        ann = Some(f);
        cur = inner;
    }
    (cur, ann)
}

/// Whether `t` synthesizes without an outer ascription, judged by shape.
pub fn synthesizes(t: &ProofTerm) -> bool {
    use ProofTerm as T;
    match t {
        T::Var(_) | T::Fst(_) | T::Snd(_) | T::App(..) | T::Extr(..) | T::Ann(..) | T::IdIntro { .. } => {
            true
        }
        T::Pair(a, b) => synthesizes(a) && synthesizes(b),
        T::TLam { body, .. } => synthesizes(body),
        _ => false,
    }
}

/// Ascribes `ty` to a term that does not synthesize, so that it still checks
/// when it lands in the head of an elimination. [`tidy`] drops the ascription
/// again wherever it lands in a checking position.
fn typed(v: ProofTerm, ty: Option<Formula>) -> ProofTerm {
    match ty {
        Some(ty) if !synthesizes(&v) => ProofTerm::ann(v, ty),
        _ => v,
    }
}

/// Removes every ascription the checker does not need: those in checking
/// positions and those around terms that synthesize anyway. Applied after
/// each step, it makes the ascriptions of a reduct independent of the order
/// in which redexes were contracted.
pub fn tidy(t: &ProofTerm) -> ProofTerm {
    fn go(t: &mut ProofTerm, synth: bool) {
        if let ProofTerm::Ann(inner, _) = t {
            if synth && !synthesizes(inner) {
                go(inner, false);
            } else {
                let ProofTerm::Ann(inner, _) = std::mem::replace(t, ProofTerm::var("_")) else {
                    unreachable!()
                };
                *t = *inner;
                go(t, synth);
            }
            return;
        }
        let modes: Vec<bool> = match t {
            ProofTerm::Pair(..) | ProofTerm::TLam { .. } => vec![synth; 2],
            ProofTerm::Fst(_)
            | ProofTerm::Snd(_)
            | ProofTerm::Extr(..)
            | ProofTerm::Abort(_)
            | ProofTerm::App(..)
            | ProofTerm::Case { .. }
            | ProofTerm::Inst { .. }
            | ProofTerm::Rewr { .. } => vec![true, false, false],
            _ => vec![false; 3],
        };
        let n = t.children().len();
        for (i, synth) in modes.into_iter().enumerate().take(n) {
            go(t.child_mut(i).expect("index below child count"), synth);
        }
    }
    let mut out = t.clone();
    go(&mut out, false);
    out
}

/// Plugs a contractum in at `path` and tidies the result.
fn plug(root: &ProofTerm, path: &[usize], after: ProofTerm) -> Option<ProofTerm> {
    root.replace_at(path, after).map(|t| tidy(&t))
}

fn parts(f: Option<&Formula>) -> (Option<Formula>, Option<Formula>) {
    match f {
        Some(Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b)) => {
            (Some((**a).clone()), Some((**b).clone()))
        }
        _ => (None, None),
    }
}

/// Contracts `t` when its root is a redex.
pub fn contract(t: &ProofTerm) -> Option<(RuleName, ProofTerm)> {
    use ProofTerm as T;
    match t {
        T::Fst(p) => match peel(p) {
            (T::Pair(a, _), ty) => Some((RuleName::AndFst, typed((**a).clone(), parts(ty).0))),
            _ => None,
        },
        T::Snd(p) => match peel(p) {
            (T::Pair(_, b), ty) => Some((RuleName::AndSnd, typed((**b).clone(), parts(ty).1))),
            _ => None,
        },
        T::Case {
            scrut,
            left,
            left_body,
            right,
            right_body,
        } => match peel(scrut) {
            (T::Inl(a), ty) => {
                let a = typed((**a).clone(), parts(ty).0);
                Some((RuleName::OrInl, subst_proof(left_body, left, &a)))
            }
            (T::Inr(b), ty) => {
                let b = typed((**b).clone(), parts(ty).1);
                Some((RuleName::OrInr, subst_proof(right_body, right, &b)))
            }
            _ => None,
        },
        T::App(f, a) => match peel(f) {
            (T::Lam { var, body }, ty) => {
                let (dom, cod) = parts(ty);
                let a = typed((**a).clone(), dom);
                Some((RuleName::Imp, typed(subst_proof(body, var, &a), cod)))
            }
            _ => None,
        },
        T::Extr(f, witness) => match peel(f) {
            (T::TLam { var, body, .. }, ty) => {
                let inst = ty.and_then(|q| q.instantiate(witness, None).ok());
                Some((RuleName::All, typed(subst_ind(body, var, witness), inst)))
            }
            _ => None,
        },
        T::Inst {
            scrut,
            proof_var,
            ind_var,
            body,
        } => match peel(scrut) {
            (
                T::ExPair {
                    binder,
                    body: g,
                    witness,
                },
                ty,
            ) => {
                let inst = ty.and_then(|q| q.instantiate(witness, None).ok());
                let proof = typed(subst_ind(g, binder, witness), inst);
                // Individuals first: `proof` may itself mention a free `ind_var`.
                let d = subst_ind(body, ind_var, witness);
                Some((RuleName::Ex, subst_proof(&d, proof_var, &proof)))
            }
            _ => None,
        },
        T::Rewr { scrut, var, body } => match peel(scrut) {
            (T::IdIntro { evidence, .. }, _) => {
                Some((RuleName::Id, subst_evidence(body, var, evidence)))
            }
            _ => None,
        },
        _ => None,
    }
}

fn find_leftmost_outermost(
    t: &ProofTerm,
    path: &mut Path,
) -> Option<(RuleName, ProofTerm, ProofTerm)> {
    if let Some((rule, after)) = contract(t) {
        return Some((rule, t.clone(), after));
    }
    for (i, child) in t.children().into_iter().enumerate() {
        path.push(i);
        if let Some(found) = find_leftmost_outermost(child, path) {
            return Some(found);
        }
        path.pop();
    }
    None
}

/// Rewrites the leftmost-outermost redex. `None` iff `t` is beta-normal.
pub fn beta_step(t: &ProofTerm) -> Option<(ProofTerm, RewriteStep)> {
    let mut path = Vec::new();
    let (rule, before, after) = find_leftmost_outermost(t, &mut path)?;
    let next = plug(t, &path, after.clone()).expect("path found by traversal");
    Some((
        next,
        RewriteStep {
            rule,
            path,
            before,
            after,
        },
    ))
}

/// Every one-step reduct, one per redex, in pre-order.
pub fn one_step_reducts(t: &ProofTerm) -> Vec<(ProofTerm, RewriteStep)> {
    fn walk(
        t: &ProofTerm,
        root: &ProofTerm,
        path: &mut Path,
        out: &mut Vec<(ProofTerm, RewriteStep)>,
    ) {
        if let Some((rule, after)) = contract(t) {
            let next = plug(root, path, after.clone()).expect("valid path");
            out.push((
                next,
                RewriteStep {
                    rule,
                    path: path.clone(),
                    before: t.clone(),
                    after,
                },
            ));
        }
        for (i, child) in t.children().into_iter().enumerate() {
            path.push(i);
            walk(child, root, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(t, t, &mut Vec::new(), &mut out);
    out
}

pub fn is_normal(t: &ProofTerm) -> bool {
    let mut path = Vec::new();
    find_leftmost_outermost(t, &mut path).is_none()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("no normal form within {max_steps} steps")]
    Timeout {
        max_steps: usize,
        partial: Box<RewriteTrace>,
    },
    #[error("replay mismatch at step {index}: {reason}")]
    ReplayMismatch { index: usize, reason: String },
}

/// Normal-order normalization of a bare term.
pub fn normalize_term(
    t: &ProofTerm,
    max_steps: usize,
) -> Result<(ProofTerm, RewriteTrace), ReduceError> {
    normalize_streaming(t, max_steps, |_, _| {})
}

/// As [`normalize_term`], handing each step to `sink` as soon as it is taken.
pub fn normalize_streaming(
    t: &ProofTerm,
    max_steps: usize,
    mut sink: impl FnMut(usize, &RewriteStep),
) -> Result<(ProofTerm, RewriteTrace), ReduceError> {
    let mut trace = RewriteTrace {
        initial: t.clone(),
        steps: Vec::new(),
    };
    let mut cur = t.clone();
    loop {
        match beta_step(&cur) {
            None => return Ok((cur, trace)),
            Some(_) if trace.steps.len() >= max_steps => {
                return Err(ReduceError::Timeout {
                    max_steps,
                    partial: Box::new(trace),
                });
            }
            Some((next, step)) => {
                sink(trace.steps.len(), &step);
                trace.steps.push(step);
                cur = next;
            }
        }
    }
}

/// Normalizes the term of a judgement. The judgement is expected to check.
pub fn normalize(
    j: &Judgement,
    max_steps: usize,
) -> Result<(ProofTerm, RewriteTrace), ReduceError> {
    normalize_term(&j.term, max_steps)
}

/// Folds the steps of `tr` over its initial term, checking each one.
///
/// A step is rejected when its recorded redex is not (up to alpha) the
/// subterm at its path, or when contracting that redex with the named rule
/// does not give the recorded result.
pub fn replay(tr: &RewriteTrace) -> Result<ProofTerm, ReduceError> {
    let mut cur = tr.initial.clone();
    for (index, step) in tr.steps.iter().enumerate() {
        let mismatch = |reason: String| ReduceError::ReplayMismatch { index, reason };
        let here = cur
            .subterm_at(&step.path)
            .ok_or_else(|| mismatch(format!("no subterm at {}", render_path(&step.path))))?;
        if !here.alpha_eq(&step.before) {
            return Err(mismatch(format!(
                "expected `{}`, found `{}`",
                step.before, here
            )));
        }
        match contract(&step.before) {
            Some((rule, after)) if rule == step.rule && after.alpha_eq(&step.after) => {}
            Some((rule, _)) if rule != step.rule => {
                return Err(mismatch(format!(
                    "redex is {rule}, recorded as {}",
                    step.rule
                )));
            }
            Some(_) => {
                return Err(mismatch(format!(
                    "`{}` is not the {} reduct",
                    step.after, step.rule
                )))
            }
            None => return Err(mismatch(format!("`{}` is not a redex", step.before))),
        }
        cur = plug(&cur, &step.path, step.after.clone()).expect("path checked above");
    }
    Ok(cur)
}

/// One entry per beta-step taken by normal-order reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubjectReductionEntry {
    pub step: RewriteStep,
    pub reduct: ProofTerm,
    pub verdict: Result<(), CheckError>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubjectReductionReport {
    pub judgement: Judgement,
    pub entries: Vec<SubjectReductionEntry>,
    /// False when the step budget ran out before a normal form.
    pub reached_normal_form: bool,
}

impl SubjectReductionReport {
    pub fn all_valid(&self) -> bool {
        self.entries.iter().all(|e| e.verdict.is_ok())
    }
}

/// Re-checks the judgement's formula after every normal-order step.
pub fn subject_reduction(j: &Judgement, max_steps: usize) -> SubjectReductionReport {
    let mut entries = Vec::new();
    let mut cur = j.term.clone();
    let mut reached_normal_form = true;
    while let Some((next, step)) = beta_step(&cur) {
        if entries.len() >= max_steps {
            reached_normal_form = false;
            break;
        }
        let verdict = checker::check(&j.ctx, &next, &j.formula).map(|_| ());
        entries.push(SubjectReductionEntry {
            step,
            reduct: next.clone(),
            verdict,
        });
        cur = next;
    }
    SubjectReductionReport {
        judgement: j.clone(),
        entries,
        reached_normal_form,
    }
}
