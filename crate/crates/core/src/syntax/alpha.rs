//! Alpha-equivalence through a canonical index form.
//!
//! Every binder is renamed to `%p<k>` / `%i<k>`, where `k` is the number of
//! enclosing binders of the same namespace (a de Bruijn level). `%` cannot
//! occur in parsed identifiers, so canonical names never clash with free
//! names. Two values are alpha-equivalent iff their canonical forms are equal.

use super::{Evidence, Formula, Individual, Name, ProofTerm};

pub trait AlphaEq {
    /// The representative of the alpha-equivalence class.
    fn canonical(&self) -> Self;

    fn alpha_eq(&self, other: &Self) -> bool;
}

#[derive(Default)]
struct Env {
    proofs: Vec<(Name, Name)>,
    inds: Vec<(Name, Name)>,
}

impl Env {
    fn lookup<'a>(stack: &'a [(Name, Name)], x: &'a Name) -> &'a Name {
        stack
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, c)| c)
            .unwrap_or(x)
    }

    fn push_proof(&mut self, x: &Name) -> Name {
        let c = format!("%p{}", self.proofs.len());
        self.proofs.push((x.clone(), c.clone()));
        c
    }

    fn push_ind(&mut self, x: &Name) -> Name {
        let c = format!("%i{}", self.inds.len());
        self.inds.push((x.clone(), c.clone()));
        c
    }

    fn individual(&self, i: &Individual) -> Individual {
        match i {
            Individual::Var(x) => Individual::Var(Self::lookup(&self.inds, x).clone()),
            c => c.clone(),
        }
    }

    fn evidence(&self, e: &Evidence) -> Evidence {
        match e {
            Evidence::Var(x) => Evidence::Var(Self::lookup(&self.proofs, x).clone()),
            p => p.clone(),
        }
    }

    fn formula(&mut self, f: &Formula) -> Formula {
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
                let c = self.push_ind(var);
                let body = self.formula(body);
                self.inds.pop();
                Formula::forall(c, sort.clone(), body)
            }
            Formula::Exists { var, sort, body } => {
                let c = self.push_ind(var);
                let body = self.formula(body);
                self.inds.pop();
                Formula::exists(c, sort.clone(), body)
            }
            Formula::Id { sort, lhs, rhs } => Formula::Id {
                sort: sort.clone(),
                lhs: self.individual(lhs),
                rhs: self.individual(rhs),
            },
        }
    }

    fn under_proof(&mut self, x: &Name, body: &ProofTerm) -> (Name, ProofTerm) {
        let c = self.push_proof(x);
        let b = self.term(body);
        self.proofs.pop();
        (c, b)
    }

    fn term(&mut self, t: &ProofTerm) -> ProofTerm {
        use ProofTerm as T;
        match t {
            T::Var(x) => T::Var(Self::lookup(&self.proofs, x).clone()),
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
                let s = self.term(scrut);
                let (l, lb) = self.under_proof(left, left_body);
                let (r, rb) = self.under_proof(right, right_body);
                T::case(s, l, lb, r, rb)
            }
            T::Lam { var, body } => {
                let (v, b) = self.under_proof(var, body);
                T::lam(v, b)
            }
            T::App(f, a) => T::app(self.term(f), self.term(a)),
            T::TLam { var, sort, body } => {
                let c = self.push_ind(var);
                let b = self.term(body);
                self.inds.pop();
                T::tlam(c, sort.clone(), b)
            }
            T::Extr(f, i) => T::extr(self.term(f), self.individual(i)),
            T::ExPair {
                binder,
                body,
                witness,
            } => {
                let w = self.individual(witness);
                let c = self.push_ind(binder);
                let b = self.term(body);
                self.inds.pop();
                T::ex_pair(c, b, w)
            }
            T::Inst {
                scrut,
                proof_var,
                ind_var,
                body,
            } => {
                let s = self.term(scrut);
                let h = self.push_proof(proof_var);
                let i = self.push_ind(ind_var);
                let b = self.term(body);
                self.proofs.pop();
                self.inds.pop();
                T::inst(s, h, i, b)
            }
            T::IdIntro { evidence, lhs, rhs } => T::IdIntro {
                evidence: self.evidence(evidence),
                lhs: self.individual(lhs),
                rhs: self.individual(rhs),
            },
            T::Rewr { scrut, var, body } => {
                let s = self.term(scrut);
                let (v, b) = self.under_proof(var, body);
                T::rewr(s, v, b)
            }
            T::Abort(p) => T::abort(self.term(p)),
            T::Ann(inner, f) => T::ann(self.term(inner), self.formula(f)),
        }
    }
}

impl AlphaEq for Formula {
    fn canonical(&self) -> Self {
        Env::default().formula(self)
    }

    fn alpha_eq(&self, other: &Self) -> bool {
        self == other || self.canonical() == other.canonical()
    }
}

impl AlphaEq for ProofTerm {
    fn canonical(&self) -> Self {
        Env::default().term(self)
    }

    fn alpha_eq(&self, other: &Self) -> bool {
        self == other || self.canonical() == other.canonical()
    }
}
