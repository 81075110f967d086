//! Bidirectional checking of proof terms against formulas.
//!
//! Introductions (`<a,b>`, `inl`, `inr`, `\x.`, `/\x:D.`, `eps`, `refl`)
//! are checked against the shape of the goal. Variables and eliminations
//! synthesize their formula from the scrutinee. `case`, `inst`, `rewr` and
//! `abort` need the goal from outside; in synthesis position they report
//! [`CheckErrorKind::NeedsAnnotation`] and can be wrapped as `(t : A)`.
//!
//! Binders that clash with a name already in scope are renamed apart before
//! checking the body. For `/\x:D.` and `inst(p, h.t. d)` this is what enforces
//! the eigenvariable condition; when the body only checks with the binder
//! identified with the outer variable, the error is reported as an
//! [`CheckErrorKind::EigenvariableViolation`].

mod context;
mod wf;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{
    rename_proof, subst_ind, subst_ind_formula, AlphaEq, Evidence, Formula, HasFreeVars,
    Individual, Name, Path, ProofTerm, Sort, TermKind,
};

pub use context::{Context, Entry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckErrorKind {
    #[error("expected `{expected}`, found `{found}`")]
    Mismatch { expected: Box<Formula>, found: Box<Formula> },
    #[error("{intro:?} cannot prove `{goal}`")]
    WrongIntro { goal: Box<Formula>, intro: TermKind },
    #[error("{elim:?} cannot eliminate `{found}`")]
    WrongElim { found: Box<Formula>, elim: TermKind },
    #[error("unbound variable `{0}`")]
    UnboundVariable(Name),
    #[error("eigenvariable `{var}` escapes into {leak}")]
    EigenvariableViolation { var: Name, leak: String },
    #[error("sort mismatch: expected {expected}, found {found}")]
    SortMismatch { expected: Sort, found: Sort },
    #[error("ill-formed identity evidence: {0}")]
    IllFormedIdEvidence(String),
    #[error("{0:?} needs an expected formula; annotate it as `(t : A)`")]
    NeedsAnnotation(TermKind),
    #[error("equation `{0}` may only be used as identity evidence `{0}(a, b)`")]
    EvidenceMisuse(Name),
    #[error("unknown sort `{0}`")]
    UnknownSort(Sort),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(Name),
    #[error("predicate `{pred}` takes {expected} arguments, given {found}")]
    ArityMismatch {
        pred: Name,
        expected: usize,
        found: usize,
    },
    #[error("duplicate or reserved name `{0}` in context")]
    DuplicateName(Name),
}

impl CheckErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckErrorKind::Mismatch { .. } => "Mismatch",
            CheckErrorKind::WrongIntro { .. } => "WrongIntro",
            CheckErrorKind::WrongElim { .. } => "WrongElim",
            CheckErrorKind::UnboundVariable(_) => "UnboundVariable",
            CheckErrorKind::EigenvariableViolation { .. } => "EigenvariableViolation",
            CheckErrorKind::SortMismatch { .. } => "SortMismatch",
            CheckErrorKind::IllFormedIdEvidence(_) => "IllFormedIdEvidence",
            CheckErrorKind::NeedsAnnotation(_) => "NeedsAnnotation",
            CheckErrorKind::EvidenceMisuse(_) => "EvidenceMisuse",
            CheckErrorKind::UnknownSort(_) => "UnknownSort",
            CheckErrorKind::UnknownPredicate(_) => "UnknownPredicate",
            CheckErrorKind::ArityMismatch { .. } => "ArityMismatch",
            CheckErrorKind::DuplicateName(_) => "DuplicateName",
        }
    }
}

/// A diagnostic with the tree path of the offending subterm.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct CheckError {
    pub kind: CheckErrorKind,
    pub path: Path,
}

impl CheckError {
    pub fn at_root(kind: CheckErrorKind) -> Self {
        CheckError {
            kind,
            path: Vec::new(),
        }
    }
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = crate::reducer::render_path(&self.path);
        write!(f, "at {path}: {}", self.kind)
    }
}

/// `ctx |- term : formula`. Values returned by [`check`] are valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgement {
    pub ctx: Context,
    pub term: ProofTerm,
    pub formula: Formula,
}

impl Judgement {
    pub fn new(ctx: Context, term: ProofTerm, formula: Formula) -> Self {
        Judgement { ctx, term, formula }
    }

    /// Re-runs the checker on this judgement.
    pub fn check(&self) -> Result<Judgement, CheckError> {
        check(&self.ctx, &self.term, &self.formula)
    }
}

/// Checks `term` against `goal`. The context and the goal are validated
/// first.
pub fn check(ctx: &Context, term: &ProofTerm, goal: &Formula) -> Result<Judgement, CheckError> {
    ctx.validate()?;
    wf::formula(ctx, goal).map_err(CheckError::at_root)?;
    let mut c = Checker {
        ctx: ctx.clone(),
        path: Vec::new(),
    };
    c.check(term, goal)?;
    Ok(Judgement::new(ctx.clone(), term.clone(), goal.clone()))
}

/// Synthesizes the formula of a variable- or elimination-headed term.
pub fn synth(ctx: &Context, term: &ProofTerm) -> Result<Formula, CheckError> {
    ctx.validate()?;
    Checker {
        ctx: ctx.clone(),
        path: Vec::new(),
    }
    .synth(term)
}

pub fn well_formed(ctx: &Context, f: &Formula) -> Result<(), CheckErrorKind> {
    wf::formula(ctx, f)
}

struct Checker {
    ctx: Context,
    path: Path,
}

type Res<T> = Result<T, CheckError>;

impl Checker {
    fn err(&self, kind: CheckErrorKind) -> CheckError {
        CheckError {
            kind,
            path: self.path.clone(),
        }
    }

    fn child<T>(&mut self, i: usize, f: impl FnOnce(&mut Self) -> Res<T>) -> Res<T> {
        self.path.push(i);
        let r = f(self);
        self.path.pop();
        r
    }

    fn bind<T>(&mut self, entries: Vec<Entry>, f: impl FnOnce(&mut Self) -> Res<T>) -> Res<T> {
        let n = entries.len();
        for e in entries {
            self.ctx.push(e);
        }
        let r = f(self);
        for _ in 0..n {
            self.ctx.pop();
        }
        r
    }

    /// Renames proof binder `x` apart from the context.
    fn fresh_proof_binder(&self, x: &Name, body: &ProofTerm) -> (Name, ProofTerm) {
        if self.ctx.lookup_proof(x).is_none() {
            return (x.clone(), body.clone());
        }
        let y = self.ctx.fresh_proof_name(x, &body.free_vars().proofs);
        let body = rename_proof(body, x, &y);
        (y, body)
    }

    /// Renames individual binder `x` apart from the context and `extra`.
    /// The flag says whether a rename happened.
    fn fresh_ind_binder(
        &self,
        x: &Name,
        body: &ProofTerm,
        extra: &BTreeSet<Name>,
    ) -> (Name, ProofTerm, bool) {
        let clash = self.ctx.individuals_in_use().contains(x)
            || extra.contains(x)
            || self.ctx.signature().is_declared(x);
        if !clash {
            return (x.clone(), body.clone(), false);
        }
        let mut avoid = body.free_vars().individuals;
        avoid.extend(extra.iter().cloned());
        let y = self.ctx.fresh_ind_name(x, &avoid);
        let body = subst_ind(body, x, &Individual::Var(y.clone()));
        (y, body, true)
    }

    fn sort_of(&self, i: &Individual) -> Res<Sort> {
        self.ctx
            .sort_of(i)
            .ok_or_else(|| self.err(CheckErrorKind::UnboundVariable(i.name().to_string())))
    }

    fn expect_sort(&self, i: &Individual, expected: &Sort) -> Res<()> {
        let found = self.sort_of(i)?;
        if &found != expected {
            return Err(self.err(CheckErrorKind::SortMismatch {
                expected: expected.clone(),
                found,
            }));
        }
        Ok(())
    }

    fn well_formed(&self, f: &Formula) -> Res<()> {
        wf::formula(&self.ctx, f).map_err(|k| self.err(k))
    }

    /// Describes where eigenvariable `x` escapes: hypotheses used by `body`
    /// that mention it, or else the conclusion.
    fn leak(&self, x: &str, body: &ProofTerm, goal: &Formula) -> String {
        let used = body.free_vars().proofs;
        let hyps: Vec<String> = self
            .ctx
            .hyps_mentioning(x)
            .into_iter()
            .filter(|(n, _)| used.contains(n))
            .map(|(n, f)| format!("{n} : {f}"))
            .collect();
        if hyps.is_empty() || goal.free_vars().individuals.contains(x) {
            format!("the conclusion `{goal}`")
        } else {
            format!("hypothesis `{}`", hyps.join("`, `"))
        }
    }

    fn evidence(&self, ev: &Evidence, sort: &Sort, lhs: &Individual, rhs: &Individual) -> Res<()> {
        let bad = |m: String| self.err(CheckErrorKind::IllFormedIdEvidence(m));
        match ev {
            Evidence::Path(steps) if steps.is_empty() => {
                if lhs != rhs {
                    return Err(bad(format!(
                        "refl needs identical sides, got `{lhs}` and `{rhs}`"
                    )));
                }
                Ok(())
            }
            Evidence::Path(_) => Err(bad(format!(
                "individuals of sort {sort} have no rewrite steps; only refl relates them"
            ))),
            Evidence::Var(t) => match self.ctx.lookup_proof(t) {
                Some(Entry::Eq {
                    sort: s,
                    lhs: a,
                    rhs: b,
                    ..
                }) => {
                    if s == sort && a == lhs && b == rhs {
                        Ok(())
                    } else {
                        Err(bad(format!("`{t}` relates `{a}` and `{b}` in {s}, not `{lhs}` and `{rhs}` in {sort}")))
                    }
                }
                Some(_) => Err(bad(format!("`{t}` is a proof, not an equation"))),
                None => Err(self.err(CheckErrorKind::UnboundVariable(t.clone()))),
            },
        }
    }

    fn check(&mut self, t: &ProofTerm, goal: &Formula) -> Res<()> {
        use ProofTerm as T;
        let wrong_intro = |c: &Self| {
            c.err(CheckErrorKind::WrongIntro {
                goal: Box::new(goal.clone()),
                intro: t.kind(),
            })
        };
        match t {
            T::Ann(inner, a) => {
                self.well_formed(a)?;
                if !a.alpha_eq(goal) {
                    return Err(self.err(CheckErrorKind::Mismatch {
                        expected: Box::new(goal.clone()),
                        found: Box::new(a.clone()),
                    }));
                }
                self.child(0, |c| c.check(inner, a))
            }
            T::Pair(a, b) => match goal {
                Formula::And(l, r) => {
                    self.child(0, |c| c.check(a, l))?;
                    self.child(1, |c| c.check(b, r))
                }
                _ => Err(wrong_intro(self)),
            },
            T::Inl(a) => match goal {
                Formula::Or(l, _) => self.child(0, |c| c.check(a, l)),
                _ => Err(wrong_intro(self)),
            },
            T::Inr(b) => match goal {
                Formula::Or(_, r) => self.child(0, |c| c.check(b, r)),
                _ => Err(wrong_intro(self)),
            },
            T::Lam { var, body } => match goal {
                Formula::Imp(a, b) => {
                    let (x, body) = self.fresh_proof_binder(var, body);
                    self.bind(vec![Entry::Proof(x, (**a).clone())], |c| {
                        c.child(0, |c| c.check(&body, b))
                    })
                }
                _ => Err(wrong_intro(self)),
            },
            T::TLam { var, sort, body } => match goal {
                Formula::Forall {
                    var: y,
                    sort: s,
                    body: p,
                } => {
                    if sort != s {
                        return Err(self.err(CheckErrorKind::SortMismatch {
                            expected: s.clone(),
                            found: sort.clone(),
                        }));
                    }
                    let (x, renamed, clashed) = self.fresh_ind_binder(var, body, &BTreeSet::new());
                    let inst = subst_ind_formula(p, y, &Individual::Var(x.clone()));
                    let r = self.bind(vec![Entry::Ind(x, sort.clone())], |c| {
                        c.child(0, |c| c.check(&renamed, &inst))
                    });
                    match r {
                        Err(e) if clashed => {
                            let same = subst_ind_formula(p, y, &Individual::Var(var.clone()));
                            let leaks = self
                                .bind(vec![Entry::Ind(var.clone(), sort.clone())], |c| {
                                    c.child(0, |c| c.check(body, &same))
                                })
                                .is_ok();
                            if leaks {
                                let leak = self.leak(var, body, goal);
                                return Err(self.err(CheckErrorKind::EigenvariableViolation {
                                    var: var.clone(),
                                    leak,
                                }));
                            }
                            Err(e)
                        }
                        r => r,
                    }
                }
                _ => Err(wrong_intro(self)),
            },
            T::ExPair {
                binder,
                body,
                witness,
            } => match goal {
                Formula::Exists {
                    var: y,
                    sort,
                    body: p,
                } => {
                    self.expect_sort(witness, sort)?;
                    let proof = subst_ind(body, binder, witness);
                    let claim = subst_ind_formula(p, y, witness);
                    self.child(0, |c| c.check(&proof, &claim))
                }
                _ => Err(wrong_intro(self)),
            },
            T::IdIntro { evidence, lhs, rhs } => match goal {
                Formula::Id {
                    sort,
                    lhs: a,
                    rhs: b,
                } => {
                    if lhs != a || rhs != b {
                        let found = Formula::id(sort.clone(), lhs.clone(), rhs.clone());
                        return Err(self.err(CheckErrorKind::Mismatch {
                            expected: Box::new(goal.clone()),
                            found: Box::new(found),
                        }));
                    }
                    self.expect_sort(lhs, sort)?;
                    self.expect_sort(rhs, sort)?;
                    self.evidence(evidence, sort, lhs, rhs)
                }
                _ => Err(wrong_intro(self)),
            },
            T::Case {
                scrut,
                left,
                left_body,
                right,
                right_body,
            } => {
                let s = self.child(0, |c| c.synth(scrut))?;
                let Formula::Or(a, b) = s else {
                    return Err(self.err(CheckErrorKind::WrongElim {
                        found: Box::new(s),
                        elim: TermKind::Case,
                    }));
                };
                let (x, lb) = self.fresh_proof_binder(left, left_body);
                self.bind(vec![Entry::Proof(x, *a)], |c| {
                    c.child(1, |c| c.check(&lb, goal))
                })?;
                let (y, rb) = self.fresh_proof_binder(right, right_body);
                self.bind(vec![Entry::Proof(y, *b)], |c| {
                    c.child(2, |c| c.check(&rb, goal))
                })
            }
            T::Inst {
                scrut,
                proof_var,
                ind_var,
                body,
            } => {
                let s = self.child(0, |c| c.synth(scrut))?;
                let Formula::Exists {
                    var: z,
                    sort,
                    body: a,
                } = s
                else {
                    return Err(self.err(CheckErrorKind::WrongElim {
                        found: Box::new(s),
                        elim: TermKind::Inst,
                    }));
                };
                let goal_inds = goal.free_vars().individuals;
                let (tv, d1, clashed) = self.fresh_ind_binder(ind_var, body, &goal_inds);
                let (h, d2) = self.fresh_proof_binder(proof_var, &d1);
                let hyp = subst_ind_formula(&a, &z, &Individual::Var(tv.clone()));
                let r = self.bind(
                    vec![Entry::Ind(tv, sort.clone()), Entry::Proof(h, hyp)],
                    |c| c.child(1, |c| c.check(&d2, goal)),
                );
                match r {
                    Err(e) if clashed => {
                        let (h, d) = self.fresh_proof_binder(proof_var, body);
                        let hyp = subst_ind_formula(&a, &z, &Individual::Var(ind_var.clone()));
                        let entries = vec![
                            Entry::Ind(ind_var.clone(), sort.clone()),
                            Entry::Proof(h, hyp),
                        ];
                        if self
                            .bind(entries, |c| c.child(1, |c| c.check(&d, goal)))
                            .is_ok()
                        {
                            let leak = self.leak(ind_var, body, goal);
                            return Err(self.err(CheckErrorKind::EigenvariableViolation {
                                var: ind_var.clone(),
                                leak,
                            }));
                        }
                        Err(e)
                    }
                    r => r,
                }
            }
            T::Rewr { scrut, var, body } => {
                let s = self.child(0, |c| c.synth(scrut))?;
                let Formula::Id { sort, lhs, rhs } = s else {
                    return Err(self.err(CheckErrorKind::WrongElim {
                        found: Box::new(s),
                        elim: TermKind::Rewr,
                    }));
                };
                let (tv, d) = self.fresh_proof_binder(var, body);
                self.bind(
                    vec![Entry::Eq {
                        name: tv,
                        sort,
                        lhs,
                        rhs,
                    }],
                    |c| c.child(1, |c| c.check(&d, goal)),
                )
            }
            T::Abort(p) => {
                let s = self.child(0, |c| c.synth(p))?;
                if s != Formula::Bottom {
                    return Err(self.err(CheckErrorKind::WrongElim {
                        found: Box::new(s),
                        elim: TermKind::Abort,
                    }));
                }
                Ok(())
            }
            _ => {
                let found = self.synth(t)?;
                if !found.alpha_eq(goal) {
                    return Err(self.err(CheckErrorKind::Mismatch {
                        expected: Box::new(goal.clone()),
                        found: Box::new(found),
                    }));
                }
                Ok(())
            }
        }
    }

    fn synth(&mut self, t: &ProofTerm) -> Res<Formula> {
        use ProofTerm as T;
        match t {
            T::Var(x) => match self.ctx.lookup_proof(x) {
                Some(Entry::Proof(_, f)) => Ok(f.clone()),
                Some(_) => Err(self.err(CheckErrorKind::EvidenceMisuse(x.clone()))),
                None => Err(self.err(CheckErrorKind::UnboundVariable(x.clone()))),
            },
            T::Fst(p) | T::Snd(p) => {
                let s = self.child(0, |c| c.synth(p))?;
                match (s, t) {
                    (Formula::And(l, _), T::Fst(_)) => Ok(*l),
                    (Formula::And(_, r), _) => Ok(*r),
                    (found, _) => Err(self.err(CheckErrorKind::WrongElim {
                        found: Box::new(found),
                        elim: t.kind(),
                    })),
                }
            }
            T::App(f, a) => {
                let s = self.child(0, |c| c.synth(f))?;
                let Formula::Imp(dom, cod) = s else {
                    return Err(self.err(CheckErrorKind::WrongElim {
                        found: Box::new(s),
                        elim: TermKind::App,
                    }));
                };
                self.child(1, |c| c.check(a, &dom))?;
                Ok(*cod)
            }
            T::Extr(f, w) => {
                let s = self.child(0, |c| c.synth(f))?;
                let Formula::Forall { var, sort, body } = s else {
                    return Err(self.err(CheckErrorKind::WrongElim {
                        found: Box::new(s),
                        elim: TermKind::Extr,
                    }));
                };
                self.expect_sort(w, &sort)?;
                Ok(subst_ind_formula(&body, &var, w))
            }
            T::Ann(inner, a) => {
                self.well_formed(a)?;
                self.child(0, |c| c.check(inner, a))?;
                Ok(a.clone())
            }
            T::Pair(a, b) => {
                let l = self.child(0, |c| c.synth(a))?;
                let r = self.child(1, |c| c.synth(b))?;
                Ok(Formula::and(l, r))
            }
            T::TLam { var, sort, body } => {
                if !self.ctx.signature().has_sort(sort) {
                    return Err(self.err(CheckErrorKind::UnknownSort(sort.clone())));
                }
                let (x, body, _) = self.fresh_ind_binder(var, body, &BTreeSet::new());
                let b = self.bind(vec![Entry::Ind(x.clone(), sort.clone())], |c| {
                    c.child(0, |c| c.synth(&body))
                })?;
                Ok(Formula::forall(x, sort.clone(), b))
            }
            T::IdIntro { evidence, lhs, rhs } => {
                let sort = self.sort_of(lhs)?;
                self.expect_sort(rhs, &sort)?;
                self.evidence(evidence, &sort, lhs, rhs)?;
                Ok(Formula::id(sort, lhs.clone(), rhs.clone()))
            }
            _ => Err(self.err(CheckErrorKind::NeedsAnnotation(t.kind()))),
        }
    }
}
