//! Capture-avoiding substitution.
//!
//! A binder is renamed only when it would capture a free variable of the
//! substituted value and the target actually occurs under it.

use thiserror::Error;

use super::{
    fresh_name, Evidence, Formula, FreeVars, HasFreeVars, Individual, Name, ProofTerm, Sort,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("sort mismatch: binder has sort {expected}, witness has sort {found}")]
    SortMismatch { expected: Sort, found: Sort },
    #[error("not a quantified formula")]
    NotAQuantifier,
}

/// Replaces free occurrences of proof variable `x` in `t` by `v`.
pub fn subst_proof(t: &ProofTerm, x: &str, v: &ProofTerm) -> ProofTerm {
    Substitution::new(x, Value::Proof(v.clone())).term(t)
}

/// Replaces the evidence variable `x` (bound by `rewr`) in `t` by `ev`.
pub fn subst_evidence(t: &ProofTerm, x: &str, ev: &Evidence) -> ProofTerm {
    Substitution::new(x, Value::Evidence(ev.clone())).term(t)
}

/// Replaces free occurrences of individual variable `x` in `t` by `v`.
pub fn subst_ind(t: &ProofTerm, x: &str, v: &Individual) -> ProofTerm {
    Substitution::new(x, Value::Ind(v.clone())).term(t)
}

pub fn subst_ind_formula(f: &Formula, x: &str, v: &Individual) -> Formula {
    Substitution::new(x, Value::Ind(v.clone())).formula(f)
}

/// Renames free proof variable (or evidence variable) `x` to `y`.
pub(crate) fn rename_proof(t: &ProofTerm, x: &str, y: &str) -> ProofTerm {
    Substitution::new(x, Value::RenameProof(y.to_string())).term(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ns {
    Proof,
    Ind,
}

#[derive(Debug, Clone)]
enum Value {
    Proof(ProofTerm),
    Evidence(Evidence),
    Ind(Individual),
    /// Renames both proof and evidence occurrences.
    RenameProof(Name),
}

struct Substitution {
    target: Name,
    value: Value,
    value_fv: FreeVars,
}

fn contains(fv: &FreeVars, ns: Ns, name: &str) -> bool {
    match ns {
        Ns::Proof => fv.proofs.contains(name),
        Ns::Ind => fv.individuals.contains(name),
    }
}

trait Substitutable: HasFreeVars + Clone {
    fn apply(&self, s: &Substitution) -> Self;
}

impl Substitutable for ProofTerm {
    fn apply(&self, s: &Substitution) -> Self {
        s.term(self)
    }
}

impl Substitutable for Formula {
    fn apply(&self, s: &Substitution) -> Self {
        s.formula(self)
    }
}

impl Substitution {
    fn new(target: &str, value: Value) -> Self {
        let value_fv = match &value {
            Value::Proof(v) => v.free_vars(),
            Value::Evidence(e) => e.free_vars(),
            Value::Ind(i) => i.free_vars(),
            Value::RenameProof(n) => {
                let mut fv = FreeVars::default();
                fv.proofs.insert(n.clone());
                fv
            }
        };
        Substitution {
            target: target.to_string(),
            value,
            value_fv,
        }
    }

    fn ns(&self) -> Ns {
        match self.value {
            Value::Ind(_) => Ns::Ind,
            _ => Ns::Proof,
        }
    }

    fn rename(ns: Ns, from: &str, to: &str) -> Self {
        match ns {
            Ns::Proof => Substitution::new(from, Value::RenameProof(to.to_string())),
            Ns::Ind => Substitution::new(from, Value::Ind(Individual::Var(to.to_string()))),
        }
    }

    /// Pushes the substitution under binders `binders` scoping over `body`.
    fn under<T: Substitutable>(&self, binders: &[(Ns, &Name)], body: &T) -> (Vec<Name>, T) {
        let names = || {
            binders
                .iter()
                .map(|(_, n)| (*n).clone())
                .collect::<Vec<_>>()
        };
        if binders
            .iter()
            .any(|(ns, b)| *ns == self.ns() && **b == self.target)
        {
            return (names(), body.clone());
        }
        let mut body_fv = body.free_vars();
        if !contains(&body_fv, self.ns(), &self.target) {
            return (names(), body.clone());
        }
        let mut body = body.clone();
        let mut out = Vec::with_capacity(binders.len());
        for (ns, b) in binders {
            if !contains(&self.value_fv, *ns, b) {
                out.push((*b).clone());
                continue;
            }
            let target_ns = self.ns();
            let fresh = fresh_name(b, |n| {
                contains(&self.value_fv, *ns, n)
                    || contains(&body_fv, *ns, n)
                    || (*ns == target_ns && n == self.target)
                    || out.iter().any(|o: &Name| o == n)
            });
            body = body.apply(&Substitution::rename(*ns, b, &fresh));
            body_fv = body.free_vars();
            out.push(fresh);
        }
        (out, body.apply(self))
    }

    fn individual(&self, i: &Individual) -> Individual {
        match (i, &self.value) {
            (Individual::Var(x), Value::Ind(v)) if *x == self.target => v.clone(),
            _ => i.clone(),
        }
    }

    fn evidence(&self, e: &Evidence) -> Evidence {
        match (e, &self.value) {
            (Evidence::Var(x), Value::Evidence(v)) if *x == self.target => v.clone(),
            (Evidence::Var(x), Value::RenameProof(n)) if *x == self.target => {
                Evidence::Var(n.clone())
            }
            _ => e.clone(),
        }
    }

    fn formula(&self, f: &Formula) -> Formula {
        if self.ns() != Ns::Ind {
            return f.clone();
        }
        match f {
            Formula::Atom { pred, args } => Formula::Atom {
                pred: pred.clone(),
                args: args.iter().map(|a| self.individual(a)).collect(),
            },
            Formula::Bottom => Formula::Bottom,
            Formula::And(l, r) => Formula::and(self.formula(l), self.formula(r)),
            Formula::Or(l, r) => Formula::or(self.formula(l), self.formula(r)),
            Formula::Imp(l, r) => Formula::imp(self.formula(l), self.formula(r)),
            Formula::Forall { var, sort, body } => {
                let (mut vs, body) = self.under(&[(Ns::Ind, var)], &**body);
                Formula::forall(vs.remove(0), sort.clone(), body)
            }
            Formula::Exists { var, sort, body } => {
                let (mut vs, body) = self.under(&[(Ns::Ind, var)], &**body);
                Formula::exists(vs.remove(0), sort.clone(), body)
            }
            Formula::Id { sort, lhs, rhs } => Formula::Id {
                sort: sort.clone(),
                lhs: self.individual(lhs),
                rhs: self.individual(rhs),
            },
        }
    }

    fn term(&self, t: &ProofTerm) -> ProofTerm {
        use ProofTerm as T;
        match t {
            T::Var(x) => match &self.value {
                Value::Proof(v) if *x == self.target => v.clone(),
                Value::RenameProof(n) if *x == self.target => T::Var(n.clone()),
                _ => t.clone(),
            },
            T::Pair(a, b) => T::pair(self.term(a), self.term(b)),
            T::Fst(p) => T::fst(self.term(p)),
            T::Snd(p) => T::snd(self.term(p)),
            T::Inl(a) => T::inl(self.term(a)),
            T::Inr(b) => T::inr(self.term(b)),
            T::Case {
                scrut,
                left,
                left_body,
                right,
                right_body,
            } => {
                let (mut l, lb) = self.under(&[(Ns::Proof, left)], &**left_body);
                let (mut r, rb) = self.under(&[(Ns::Proof, right)], &**right_body);
                T::case(self.term(scrut), l.remove(0), lb, r.remove(0), rb)
            }
            T::Lam { var, body } => {
                let (mut v, b) = self.under(&[(Ns::Proof, var)], &**body);
                T::lam(v.remove(0), b)
            }
            T::App(f, a) => T::app(self.term(f), self.term(a)),
            T::TLam { var, sort, body } => {
                let (mut v, b) = self.under(&[(Ns::Ind, var)], &**body);
                T::tlam(v.remove(0), sort.clone(), b)
            }
            T::Extr(f, i) => T::extr(self.term(f), self.individual(i)),
            T::ExPair {
                binder,
                body,
                witness,
            } => {
                let (mut v, b) = self.under(&[(Ns::Ind, binder)], &**body);
                T::ex_pair(v.remove(0), b, self.individual(witness))
            }
            T::Inst {
                scrut,
                proof_var,
                ind_var,
                body,
            } => {
                let (mut v, b) = self.under(&[(Ns::Proof, proof_var), (Ns::Ind, ind_var)], &**body);
                let h = v.remove(0);
                T::inst(self.term(scrut), h, v.remove(0), b)
            }
            T::IdIntro { evidence, lhs, rhs } => T::IdIntro {
                evidence: self.evidence(evidence),
                lhs: self.individual(lhs),
                rhs: self.individual(rhs),
            },
            T::Rewr { scrut, var, body } => {
                let (mut v, b) = self.under(&[(Ns::Proof, var)], &**body);
                T::rewr(self.term(scrut), v.remove(0), b)
            }
            T::Abort(p) => T::abort(self.term(p)),
            T::Ann(inner, f) => T::ann(self.term(inner), self.formula(f)),
        }
    }
}
