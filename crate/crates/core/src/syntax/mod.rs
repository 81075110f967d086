//! Abstract syntax for sorts, individuals, formulas and proof terms.
//!
//! Two kinds of variables live in separate namespaces: proof variables
//! (bound by `\x.`, `case`, `inst` and `rewr`) and individual variables
//! (bound by `all`, `some`, `/\x:D.`, `eps` and `inst`). Evidence variables
//! bound by `rewr` share the proof namespace.

mod alpha;
mod fresh;
mod signature;
mod subst;

use std::collections::BTreeSet;
use std::fmt;

use crate::reducer::RewriteStep;

pub use alpha::AlphaEq;
pub use fresh::fresh_name;
pub use signature::{Signature, SignatureError};
pub(crate) use subst::rename_proof;
pub use subst::{subst_evidence, subst_ind, subst_ind_formula, subst_proof, SubstError};

pub type Name = String;

/// A tree position: the list of child indices from the root.
pub type Path = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort(pub Name);

impl Sort {
    pub fn new(name: impl Into<Name>) -> Self {
        Sort(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Individual {
    Var(Name),
    Const { name: Name, sort: Sort },
}

impl Individual {
    pub fn var(name: impl Into<Name>) -> Self {
        Individual::Var(name.into())
    }

    pub fn constant(name: impl Into<Name>, sort: Sort) -> Self {
        Individual::Const {
            name: name.into(),
            sort,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Individual::Var(n) | Individual::Const { name: n, .. } => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom {
        pred: Name,
        args: Vec<Individual>,
    },
    Bottom,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall {
        var: Name,
        sort: Sort,
        body: Box<Formula>,
    },
    Exists {
        var: Name,
        sort: Sort,
        body: Box<Formula>,
    },
    Id {
        sort: Sort,
        lhs: Individual,
        rhs: Individual,
    },
}

impl Formula {
    pub fn atom(pred: impl Into<Name>, args: Vec<Individual>) -> Self {
        Formula::Atom {
            pred: pred.into(),
            args,
        }
    }

    /// A propositional (zero-argument) atom.
    pub fn prop(pred: impl Into<Name>) -> Self {
        Formula::atom(pred, Vec::new())
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Self {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    pub fn forall(var: impl Into<Name>, sort: Sort, body: Formula) -> Self {
        Formula::Forall {
            var: var.into(),
            sort,
            body: Box::new(body),
        }
    }

    pub fn exists(var: impl Into<Name>, sort: Sort, body: Formula) -> Self {
        Formula::Exists {
            var: var.into(),
            sort,
            body: Box::new(body),
        }
    }

    pub fn id(sort: Sort, lhs: Individual, rhs: Individual) -> Self {
        Formula::Id { sort, lhs, rhs }
    }

    /// Atoms and `_|_` have no attack in the dialogue tables.
    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom { .. } | Formula::Bottom)
    }

    /// Instantiates the bound variable of a quantifier with `witness`.
    ///
    /// `witness_sort` is the sort of the witness when it is known (constants
    /// always know theirs); a disagreement with the binder's sort is an error.
    pub fn instantiate(
        &self,
        witness: &Individual,
        witness_sort: Option<&Sort>,
    ) -> Result<Formula, SubstError> {
        let (var, sort, body) = match self {
            Formula::Forall { var, sort, body } | Formula::Exists { var, sort, body } => {
                (var, sort, body)
            }
            _ => return Err(SubstError::NotAQuantifier),
        };
        let known = match witness {
            Individual::Const { sort, .. } => Some(sort),
            Individual::Var(_) => witness_sort,
        };
        if let Some(found) = known {
            if found != sort {
                return Err(SubstError::SortMismatch {
                    expected: sort.clone(),
                    found: found.clone(),
                });
            }
        }
        Ok(subst_ind_formula(body, var, witness))
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom { .. } | Formula::Bottom | Formula::Id { .. } => 1,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => 1 + l.size() + r.size(),
            Formula::Forall { body, .. } | Formula::Exists { body, .. } => 1 + body.size(),
        }
    }
}

/// The `r` in `r(a,b) : Id_D(a,b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Evidence {
    /// A recorded rewrite path; the empty path is reflexivity.
    Path(Vec<RewriteStep>),
    /// An equation hypothesis bound by `rewr(p, t.d)`.
    Var(Name),
}

impl Evidence {
    pub fn refl() -> Self {
        Evidence::Path(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProofTerm {
    Var(Name),
    Pair(Box<ProofTerm>, Box<ProofTerm>),
    Fst(Box<ProofTerm>),
    Snd(Box<ProofTerm>),
    Inl(Box<ProofTerm>),
    Inr(Box<ProofTerm>),
    Case {
        scrut: Box<ProofTerm>,
        left: Name,
        left_body: Box<ProofTerm>,
        right: Name,
        right_body: Box<ProofTerm>,
    },
    Lam {
        var: Name,
        body: Box<ProofTerm>,
    },
    App(Box<ProofTerm>, Box<ProofTerm>),
    TLam {
        var: Name,
        sort: Sort,
        body: Box<ProofTerm>,
    },
    Extr(Box<ProofTerm>, Individual),
    /// `eps(x. g, s)`: `body` is abstracted over `binder`; the proof proper is
    /// `body[witness/binder]`.
    ExPair {
        binder: Name,
        body: Box<ProofTerm>,
        witness: Individual,
    },
    Inst {
        scrut: Box<ProofTerm>,
        proof_var: Name,
        ind_var: Name,
        body: Box<ProofTerm>,
    },
    IdIntro {
        evidence: Evidence,
        lhs: Individual,
        rhs: Individual,
    },
    Rewr {
        scrut: Box<ProofTerm>,
        var: Name,
        body: Box<ProofTerm>,
    },
    /// Elimination of `_|_`. The empty type has no constructor.
    Abort(Box<ProofTerm>),
    /// Type ascription `(t : A)`, lets constructor-headed terms synthesize.
    Ann(Box<ProofTerm>, Formula),
}

/// The term former at the root of a [`ProofTerm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermKind {
    Var,
    Pair,
    Fst,
    Snd,
    Inl,
    Inr,
    Case,
    Lam,
    App,
    TLam,
    Extr,
    ExPair,
    Inst,
    IdIntro,
    Rewr,
    Abort,
    Ann,
}

impl TermKind {
    pub fn is_constructor(self) -> bool {
        matches!(
            self,
            TermKind::Pair
                | TermKind::Inl
                | TermKind::Inr
                | TermKind::Lam
                | TermKind::TLam
                | TermKind::ExPair
                | TermKind::IdIntro
        )
    }
}

impl ProofTerm {
    pub fn var(name: impl Into<Name>) -> Self {
        ProofTerm::Var(name.into())
    }

    pub fn pair(a: ProofTerm, b: ProofTerm) -> Self {
        ProofTerm::Pair(Box::new(a), Box::new(b))
    }

    pub fn fst(p: ProofTerm) -> Self {
        ProofTerm::Fst(Box::new(p))
    }

    pub fn snd(p: ProofTerm) -> Self {
        ProofTerm::Snd(Box::new(p))
    }

    pub fn inl(a: ProofTerm) -> Self {
        ProofTerm::Inl(Box::new(a))
    }

    pub fn inr(b: ProofTerm) -> Self {
        ProofTerm::Inr(Box::new(b))
    }

    pub fn case(
        scrut: ProofTerm,
        left: impl Into<Name>,
        left_body: ProofTerm,
        right: impl Into<Name>,
        right_body: ProofTerm,
    ) -> Self {
        ProofTerm::Case {
            scrut: Box::new(scrut),
            left: left.into(),
            left_body: Box::new(left_body),
            right: right.into(),
            right_body: Box::new(right_body),
        }
    }

    pub fn lam(var: impl Into<Name>, body: ProofTerm) -> Self {
        ProofTerm::Lam {
            var: var.into(),
            body: Box::new(body),
        }
    }

    pub fn app(f: ProofTerm, a: ProofTerm) -> Self {
        ProofTerm::App(Box::new(f), Box::new(a))
    }

    pub fn tlam(var: impl Into<Name>, sort: Sort, body: ProofTerm) -> Self {
        ProofTerm::TLam {
            var: var.into(),
            sort,
            body: Box::new(body),
        }
    }

    pub fn extr(f: ProofTerm, t: Individual) -> Self {
        ProofTerm::Extr(Box::new(f), t)
    }

    pub fn ex_pair(binder: impl Into<Name>, body: ProofTerm, witness: Individual) -> Self {
        ProofTerm::ExPair {
            binder: binder.into(),
            body: Box::new(body),
            witness,
        }
    }

    pub fn inst(
        scrut: ProofTerm,
        proof_var: impl Into<Name>,
        ind_var: impl Into<Name>,
        body: ProofTerm,
    ) -> Self {
        ProofTerm::Inst {
            scrut: Box::new(scrut),
            proof_var: proof_var.into(),
            ind_var: ind_var.into(),
            body: Box::new(body),
        }
    }

    pub fn refl(lhs: Individual, rhs: Individual) -> Self {
        ProofTerm::IdIntro {
            evidence: Evidence::refl(),
            lhs,
            rhs,
        }
    }

    pub fn rewr(scrut: ProofTerm, var: impl Into<Name>, body: ProofTerm) -> Self {
        ProofTerm::Rewr {
            scrut: Box::new(scrut),
            var: var.into(),
            body: Box::new(body),
        }
    }

    pub fn abort(p: ProofTerm) -> Self {
        ProofTerm::Abort(Box::new(p))
    }

    pub fn ann(t: ProofTerm, f: Formula) -> Self {
        ProofTerm::Ann(Box::new(t), f)
    }

    pub fn kind(&self) -> TermKind {
        match self {
            ProofTerm::Var(_) => TermKind::Var,
            ProofTerm::Pair(..) => TermKind::Pair,
            ProofTerm::Fst(_) => TermKind::Fst,
            ProofTerm::Snd(_) => TermKind::Snd,
            ProofTerm::Inl(_) => TermKind::Inl,
            ProofTerm::Inr(_) => TermKind::Inr,
            ProofTerm::Case { .. } => TermKind::Case,
            ProofTerm::Lam { .. } => TermKind::Lam,
            ProofTerm::App(..) => TermKind::App,
            ProofTerm::TLam { .. } => TermKind::TLam,
            ProofTerm::Extr(..) => TermKind::Extr,
            ProofTerm::ExPair { .. } => TermKind::ExPair,
            ProofTerm::Inst { .. } => TermKind::Inst,
            ProofTerm::IdIntro { .. } => TermKind::IdIntro,
            ProofTerm::Rewr { .. } => TermKind::Rewr,
            ProofTerm::Abort(_) => TermKind::Abort,
            ProofTerm::Ann(..) => TermKind::Ann,
        }
    }

    /// Proof-term children in position order. Individuals, formulas and
    /// evidence are not children.
    pub fn children(&self) -> Vec<&ProofTerm> {
        match self {
            ProofTerm::Var(_) | ProofTerm::IdIntro { .. } => vec![],
            ProofTerm::Pair(a, b) | ProofTerm::App(a, b) => vec![a, b],
            ProofTerm::Fst(p)
            | ProofTerm::Snd(p)
            | ProofTerm::Inl(p)
            | ProofTerm::Inr(p)
            | ProofTerm::Abort(p)
            | ProofTerm::Ann(p, _)
            | ProofTerm::Extr(p, _) => vec![p],
            ProofTerm::Lam { body, .. }
            | ProofTerm::TLam { body, .. }
            | ProofTerm::ExPair { body, .. } => vec![body],
            ProofTerm::Case {
                scrut,
                left_body,
                right_body,
                ..
            } => {
                vec![scrut, left_body, right_body]
            }
            ProofTerm::Inst { scrut, body, .. } | ProofTerm::Rewr { scrut, body, .. } => {
                vec![scrut, body]
            }
        }
    }

    pub(crate) fn child_mut(&mut self, index: usize) -> Option<&mut ProofTerm> {
        let child: &mut Box<ProofTerm> = match (self, index) {
            (ProofTerm::Pair(a, _), 0) | (ProofTerm::App(a, _), 0) => a,
            (ProofTerm::Pair(_, b), 1) | (ProofTerm::App(_, b), 1) => b,
            (ProofTerm::Fst(p), 0)
            | (ProofTerm::Snd(p), 0)
            | (ProofTerm::Inl(p), 0)
            | (ProofTerm::Inr(p), 0)
            | (ProofTerm::Abort(p), 0)
            | (ProofTerm::Ann(p, _), 0)
            | (ProofTerm::Extr(p, _), 0) => p,
            (ProofTerm::Lam { body, .. }, 0)
            | (ProofTerm::TLam { body, .. }, 0)
            | (ProofTerm::ExPair { body, .. }, 0) => body,
            (ProofTerm::Case { scrut, .. }, 0)
            | (ProofTerm::Inst { scrut, .. }, 0)
            | (ProofTerm::Rewr { scrut, .. }, 0) => scrut,
            (ProofTerm::Case { left_body, .. }, 1) => left_body,
            (ProofTerm::Case { right_body, .. }, 2) => right_body,
            (ProofTerm::Inst { body, .. }, 1) | (ProofTerm::Rewr { body, .. }, 1) => body,
            _ => return None,
        };
        Some(child)
    }

    pub fn subterm_at(&self, path: &[usize]) -> Option<&ProofTerm> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    /// Replaces the subterm at `path`, returning `None` for an invalid path.
    pub fn replace_at(&self, path: &[usize], new: ProofTerm) -> Option<ProofTerm> {
        let mut out = self.clone();
        let mut cur = &mut out;
        for &i in path {
            cur = cur.child_mut(i)?;
        }
        *cur = new;
        Some(out)
    }

    /// Number of proof-term nodes.
    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(ProofTerm::size)
            .sum::<usize>()
    }

    /// The term with outer ascriptions removed.
    pub fn strip_ann(&self) -> &ProofTerm {
        let mut cur = self;
        while let ProofTerm::Ann(t, _) = cur {
            cur = t;
        }
        cur
    }

    /// Constructor-headed up to ascriptions.
    pub fn is_canonical(&self) -> bool {
        self.strip_ann().kind().is_constructor()
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().proofs.is_empty()
    }

    /// Counts of each term former, for structural comparisons.
    pub fn kind_counts(&self) -> std::collections::BTreeMap<TermKind, usize> {
        let mut out = std::collections::BTreeMap::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            *out.entry(t.kind()).or_insert(0) += 1;
            stack.extend(t.children());
        }
        out
    }
}

/// Free proof variables (including evidence variables) and free individual
/// variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub proofs: BTreeSet<Name>,
    pub individuals: BTreeSet<Name>,
}

impl FreeVars {
    fn extend(&mut self, other: FreeVars) {
        self.proofs.extend(other.proofs);
        self.individuals.extend(other.individuals);
    }
}

/// Things with free variables.
pub trait HasFreeVars {
    fn free_vars(&self) -> FreeVars;
}

impl HasFreeVars for Individual {
    fn free_vars(&self) -> FreeVars {
        let mut out = FreeVars::default();
        if let Individual::Var(x) = self {
            out.individuals.insert(x.clone());
        }
        out
    }
}

impl HasFreeVars for Evidence {
    fn free_vars(&self) -> FreeVars {
        let mut out = FreeVars::default();
        if let Evidence::Var(x) = self {
            out.proofs.insert(x.clone());
        }
        out
    }
}

fn without(mut fv: FreeVars, proofs: &[&Name], individuals: &[&Name]) -> FreeVars {
    for p in proofs {
        fv.proofs.remove(*p);
    }
    for i in individuals {
        fv.individuals.remove(*i);
    }
    fv
}

impl HasFreeVars for Formula {
    fn free_vars(&self) -> FreeVars {
        match self {
            Formula::Atom { args, .. } => {
                let mut out = FreeVars::default();
                for a in args {
                    out.extend(a.free_vars());
                }
                out
            }
            Formula::Bottom => FreeVars::default(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                let mut out = l.free_vars();
                out.extend(r.free_vars());
                out
            }
            Formula::Forall { var, body, .. } | Formula::Exists { var, body, .. } => {
                without(body.free_vars(), &[], &[var])
            }
            Formula::Id { lhs, rhs, .. } => {
                let mut out = lhs.free_vars();
                out.extend(rhs.free_vars());
                out
            }
        }
    }
}

impl HasFreeVars for ProofTerm {
    fn free_vars(&self) -> FreeVars {
        match self {
            ProofTerm::Var(x) => {
                let mut out = FreeVars::default();
                out.proofs.insert(x.clone());
                out
            }
            ProofTerm::Pair(a, b) | ProofTerm::App(a, b) => {
                let mut out = a.free_vars();
                out.extend(b.free_vars());
                out
            }
            ProofTerm::Fst(p)
            | ProofTerm::Snd(p)
            | ProofTerm::Inl(p)
            | ProofTerm::Inr(p)
            | ProofTerm::Abort(p) => p.free_vars(),
            ProofTerm::Case {
                scrut,
                left,
                left_body,
                right,
                right_body,
            } => {
                let mut out = scrut.free_vars();
                out.extend(without(left_body.free_vars(), &[left], &[]));
                out.extend(without(right_body.free_vars(), &[right], &[]));
                out
            }
            ProofTerm::Lam { var, body } => without(body.free_vars(), &[var], &[]),
            ProofTerm::TLam { var, body, .. } => without(body.free_vars(), &[], &[var]),
            ProofTerm::Extr(f, t) => {
                let mut out = f.free_vars();
                out.extend(t.free_vars());
                out
            }
            ProofTerm::ExPair {
                binder,
                body,
                witness,
            } => {
                let mut out = without(body.free_vars(), &[], &[binder]);
                out.extend(witness.free_vars());
                out
            }
            ProofTerm::Inst {
                scrut,
                proof_var,
                ind_var,
                body,
            } => {
                let mut out = scrut.free_vars();
                out.extend(without(body.free_vars(), &[proof_var], &[ind_var]));
                out
            }
            ProofTerm::IdIntro { evidence, lhs, rhs } => {
                let mut out = evidence.free_vars();
                out.extend(lhs.free_vars());
                out.extend(rhs.free_vars());
                out
            }
            ProofTerm::Rewr { scrut, var, body } => {
                let mut out = scrut.free_vars();
                out.extend(without(body.free_vars(), &[var], &[]));
                out
            }
            ProofTerm::Ann(t, f) => {
                let mut out = t.free_vars();
                out.extend(f.free_vars());
                out
            }
        }
    }
}

impl fmt::Display for Individual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_formula(
            self,
            crate::text::Notation::Ascii,
        ))
    }
}

impl fmt::Display for ProofTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_term(self, crate::text::Notation::Ascii))
    }
}
