use std::collections::BTreeSet;
use std::sync::Arc;

use crate::syntax::{fresh_name, Formula, HasFreeVars, Individual, Name, Signature, Sort};

use super::{wf, CheckError, CheckErrorKind};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Entry {
    /// `h : A`
    Proof(Name, Formula),
    /// `x : D`
    Ind(Name, Sort),
    /// An equation hypothesis `t : Id{D}(a,b)` bound by `rewr`. It may only
    /// appear as the evidence of an identity proof.
    Eq {
        name: Name,
        sort: Sort,
        lhs: Individual,
        rhs: Individual,
    },
}

impl Entry {
    pub fn name(&self) -> &Name {
        match self {
            Entry::Proof(n, _) | Entry::Ind(n, _) | Entry::Eq { name: n, .. } => n,
        }
    }

    fn is_proof_ns(&self) -> bool {
        !matches!(self, Entry::Ind(..))
    }

    /// The formula an entry asserts, if any.
    pub fn formula(&self) -> Option<Formula> {
        match self {
            Entry::Proof(_, f) => Some(f.clone()),
            Entry::Eq { sort, lhs, rhs, .. } => {
                Some(Formula::id(sort.clone(), lhs.clone(), rhs.clone()))
            }
            Entry::Ind(..) => None,
        }
    }
}

/// Hypotheses in order, over a shared signature. Later entries shadow
/// earlier ones of the same namespace during checking, but
/// [`Context::validate`] rejects duplicates in user-supplied contexts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    sig: Arc<Signature>,
    entries: Vec<Entry>,
}

impl Context {
    pub fn new(sig: Arc<Signature>) -> Self {
        Context {
            sig,
            entries: Vec::new(),
        }
    }

    pub fn with_entries(sig: Arc<Signature>, entries: Vec<Entry>) -> Self {
        Context { sig, entries }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn push(&mut self, e: Entry) {
        self.entries.push(e);
    }

    pub fn pop(&mut self) -> Option<Entry> {
        self.entries.pop()
    }

    /// Builder-style [`Context::push`].
    pub fn with(mut self, e: Entry) -> Self {
        self.push(e);
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The innermost proof-namespace entry named `name`.
    pub fn lookup_proof(&self, name: &str) -> Option<&Entry> {
        self.entries
            .iter()
            .rev()
            .find(|e| e.is_proof_ns() && e.name() == name)
    }

    pub fn ind_sort(&self, name: &str) -> Option<&Sort> {
        self.entries.iter().rev().find_map(|e| match e {
            Entry::Ind(n, s) if n == name => Some(s),
            _ => None,
        })
    }

    /// Sort of an individual; `None` when it is an undeclared variable or an
    /// undeclared constant.
    pub fn sort_of(&self, i: &Individual) -> Option<Sort> {
        match i {
            Individual::Var(x) => self.ind_sort(x).cloned(),
            Individual::Const { name, sort } => {
                (self.sig.const_sort(name) == Some(sort)).then(|| sort.clone())
            }
        }
    }

    /// Individual variables the context talks about: declared ones and any
    /// free in a hypothesis.
    pub fn individuals_in_use(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for e in &self.entries {
            match e {
                Entry::Ind(n, _) => {
                    out.insert(n.clone());
                }
                other => {
                    if let Some(f) = other.formula() {
                        out.extend(f.free_vars().individuals);
                    }
                }
            }
        }
        out
    }

    pub fn proof_names(&self) -> BTreeSet<Name> {
        self.entries
            .iter()
            .filter(|e| e.is_proof_ns())
            .map(|e| e.name().clone())
            .collect()
    }

    /// A proof name not bound in the context and not in `avoid`.
    pub fn fresh_proof_name(&self, base: &str, avoid: &BTreeSet<Name>) -> Name {
        let taken = self.proof_names();
        fresh_name(base, |n| taken.contains(n) || avoid.contains(n))
    }

    /// An individual name not in use by the context, not a declared symbol,
    /// and not in `avoid`.
    pub fn fresh_ind_name(&self, base: &str, avoid: &BTreeSet<Name>) -> Name {
        let taken = self.individuals_in_use();
        fresh_name(base, |n| {
            taken.contains(n) || avoid.contains(n) || self.sig.is_declared(n)
        })
    }

    /// Hypotheses (by name and formula) whose formula mentions individual `x`.
    pub fn hyps_mentioning(&self, x: &str) -> Vec<(Name, Formula)> {
        self.entries
            .iter()
            .filter_map(|e| {
                let f = e.formula()?;
                f.free_vars()
                    .individuals
                    .contains(x)
                    .then(|| (e.name().clone(), f))
            })
            .collect()
    }

    /// Checks that names are distinct within each namespace, that no
    /// individual hypothesis reuses a declared symbol, and that every
    /// hypothesis is well formed. Individual variables free in a hypothesis
    /// but not declared are tolerated as parameters of unknown sort.
    pub fn validate(&self) -> Result<(), CheckError> {
        let mut proofs = BTreeSet::new();
        let mut inds = BTreeSet::new();
        let mut prefix = Context::new(self.sig.clone());
        for e in &self.entries {
            let fresh = match e {
                Entry::Ind(n, s) => {
                    if !self.sig.has_sort(s) {
                        return Err(CheckError::at_root(CheckErrorKind::UnknownSort(s.clone())));
                    }
                    if self.sig.is_declared(n) {
                        return Err(CheckError::at_root(CheckErrorKind::DuplicateName(
                            n.clone(),
                        )));
                    }
                    inds.insert(n.clone())
                }
                _ => proofs.insert(e.name().clone()),
            };
            if !fresh {
                return Err(CheckError::at_root(CheckErrorKind::DuplicateName(
                    e.name().clone(),
                )));
            }
            if let Some(f) = e.formula() {
                wf::formula(&prefix, &f).map_err(CheckError::at_root)?;
            }
            prefix.push(e.clone());
        }
        Ok(())
    }
}
