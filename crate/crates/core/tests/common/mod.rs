#![allow(dead_code)]

use std::path::PathBuf;

use ndk_core::syntax::Path;
use ndk_core::text::{parse_problem, Problem};
use ndk_core::{Evidence, Formula, Individual, Judgement, ProofTerm, Sort};
use proptest::prelude::*;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn basics() -> Problem {
    let src = std::fs::read_to_string(corpus_dir().join("basics.nd")).expect("corpus file");
    parse_problem(&src).expect("corpus parses")
}

pub fn judgements() -> Vec<Judgement> {
    basics().judgements.into_iter().map(|(_, j)| j).collect()
}

/// Locally nameless form: bound variables are de Bruijn indices per
/// namespace, free variables keep their names. Built independently of the
/// kernel's own alpha machinery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ln {
    Node(&'static str, Vec<Ln>),
    ProofFree(String),
    ProofBound(usize),
    EvFree(String),
    IndFree(String),
    IndBound(usize),
    Const(String, String),
    Tag(String),
}

#[derive(Default)]
struct Scope {
    proofs: Vec<String>,
    inds: Vec<String>,
}

fn index(stack: &[String], x: &str) -> Option<usize> {
    stack.iter().rev().position(|y| y == x)
}

impl Scope {
    fn ind(&self, i: &Individual) -> Ln {
        match i {
            Individual::Var(x) => match index(&self.inds, x) {
                Some(k) => Ln::IndBound(k),
                None => Ln::IndFree(x.clone()),
            },
            Individual::Const { name, sort } => Ln::Const(name.clone(), sort.0.clone()),
        }
    }

    fn formula(&mut self, f: &Formula) -> Ln {
        match f {
            Formula::Atom { pred, args } => {
                let mut kids = vec![Ln::Tag(pred.clone())];
                kids.extend(args.iter().map(|a| self.ind(a)));
                Ln::Node("atom", kids)
            }
            Formula::Bottom => Ln::Node("bottom", vec![]),
            Formula::And(l, r) => Ln::Node("and", vec![self.formula(l), self.formula(r)]),
            Formula::Or(l, r) => Ln::Node("or", vec![self.formula(l), self.formula(r)]),
            Formula::Imp(l, r) => Ln::Node("imp", vec![self.formula(l), self.formula(r)]),
            Formula::Forall { var, sort, body } | Formula::Exists { var, sort, body } => {
                let tag = if matches!(f, Formula::Forall { .. }) { "all" } else { "some" };
                self.inds.push(var.clone());
                let b = self.formula(body);
                self.inds.pop();
                Ln::Node(tag, vec![Ln::Tag(sort.0.clone()), b])
            }
            Formula::Id { sort, lhs, rhs } => {
                Ln::Node("id", vec![Ln::Tag(sort.0.clone()), self.ind(lhs), self.ind(rhs)])
            }
        }
    }

    fn bind_proof(&mut self, x: &str, body: &ProofTerm) -> Ln {
        self.proofs.push(x.to_string());
        let b = self.term(body);
        self.proofs.pop();
        b
    }

    fn bind_ind(&mut self, x: &str, body: &ProofTerm) -> Ln {
        self.inds.push(x.to_string());
        let b = self.term(body);
        self.inds.pop();
        b
    }

    fn term(&mut self, t: &ProofTerm) -> Ln {
        use ProofTerm as T;
        match t {
            T::Var(x) => match index(&self.proofs, x) {
                Some(k) => Ln::ProofBound(k),
                None => Ln::ProofFree(x.clone()),
            },
            T::Pair(a, b) => Ln::Node("pair", vec![self.term(a), self.term(b)]),
            T::Fst(p) => Ln::Node("fst", vec![self.term(p)]),
            T::Snd(p) => Ln::Node("snd", vec![self.term(p)]),
            T::Inl(p) => Ln::Node("inl", vec![self.term(p)]),
            T::Inr(p) => Ln::Node("inr", vec![self.term(p)]),
            T::Case { scrut, left, left_body, right, right_body } => {
                let s = self.term(scrut);
                let l = self.bind_proof(left, left_body);
                let r = self.bind_proof(right, right_body);
                Ln::Node("case", vec![s, l, r])
            }
            T::Lam { var, body } => Ln::Node("lam", vec![self.bind_proof(var, body)]),
            T::App(f, a) => Ln::Node("app", vec![self.term(f), self.term(a)]),
            T::TLam { var, sort, body } => Ln::Node("tlam", vec![Ln::Tag(sort.0.clone()), self.bind_ind(var, body)]),
            T::Extr(p, i) => Ln::Node("extr", vec![self.term(p), self.ind(i)]),
            T::ExPair { binder, body, witness } => {
                let w = self.ind(witness);
                Ln::Node("eps", vec![self.bind_ind(binder, body), w])
            }
            T::Inst { scrut, proof_var, ind_var, body } => {
                let s = self.term(scrut);
                self.proofs.push(proof_var.clone());
                self.inds.push(ind_var.clone());
                let b = self.term(body);
                self.proofs.pop();
                self.inds.pop();
                Ln::Node("inst", vec![s, b])
            }
            T::IdIntro { evidence, lhs, rhs } => {
                let e = match evidence {
                    Evidence::Var(x) => match index(&self.proofs, x) {
                        Some(k) => Ln::ProofBound(k),
                        None => Ln::EvFree(x.clone()),
                    },
                    Evidence::Path(steps) => Ln::Tag(format!("{steps:?}")),
                };
                Ln::Node("idintro", vec![e, self.ind(lhs), self.ind(rhs)])
            }
            T::Rewr { scrut, var, body } => {
                let s = self.term(scrut);
                Ln::Node("rewr", vec![s, self.bind_proof(var, body)])
            }
            T::Abort(p) => Ln::Node("abort", vec![self.term(p)]),
            T::Ann(p, f) => Ln::Node("ann", vec![self.term(p), self.formula(f)]),
        }
    }
}

pub fn ln(t: &ProofTerm) -> Ln {
    Scope::default().term(t)
}

pub fn ln_formula(f: &Formula) -> Ln {
    Scope::default().formula(f)
}

impl Ln {
    /// Oracle substitution: free names are the only candidates, and bound
    /// indices inside the value stay valid under any number of binders.
    pub fn replace_free_proof(&self, x: &str, v: &Ln) -> Ln {
        match self {
            Ln::ProofFree(y) if y == x => v.clone(),
            Ln::Node(tag, kids) => Ln::Node(tag, kids.iter().map(|k| k.replace_free_proof(x, v)).collect()),
            other => other.clone(),
        }
    }

    pub fn replace_free_ind(&self, x: &str, v: &Ln) -> Ln {
        match self {
            Ln::IndFree(y) if y == x => v.clone(),
            Ln::Node(tag, kids) => Ln::Node(tag, kids.iter().map(|k| k.replace_free_ind(x, v)).collect()),
            other => other.clone(),
        }
    }

    pub fn count_free_proof(&self, x: &str) -> usize {
        match self {
            Ln::ProofFree(y) if y == x => 1,
            Ln::Node(_, kids) => kids.iter().map(|k| k.count_free_proof(x)).sum(),
            _ => 0,
        }
    }
}

pub fn d() -> Sort {
    Sort::new("D")
}

pub const PROOF_NAMES: [&str; 4] = ["x", "y", "z", "x'"];
pub const IND_NAMES: [&str; 3] = ["u", "w", "u'"];

pub fn arb_pname() -> impl Strategy<Value = String> {
    proptest::sample::select(PROOF_NAMES.to_vec()).prop_map(String::from)
}

pub fn arb_iname() -> impl Strategy<Value = String> {
    proptest::sample::select(IND_NAMES.to_vec()).prop_map(String::from)
}

pub fn arb_ind() -> impl Strategy<Value = Individual> {
    prop_oneof![
        3 => arb_iname().prop_map(Individual::Var),
        1 => Just(Individual::constant("c1", d())),
    ]
}

pub fn arb_formula() -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        arb_ind().prop_map(|i| Formula::atom("P", vec![i])),
        Just(Formula::prop("A")),
        Just(Formula::Bottom),
        (arb_ind(), arb_ind()).prop_map(|(a, b)| Formula::id(d(), a, b)),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::imp(l, r)),
            (arb_iname(), inner.clone()).prop_map(|(x, b)| Formula::forall(x, d(), b)),
            (arb_iname(), inner).prop_map(|(x, b)| Formula::exists(x, d(), b)),
        ]
    })
    .boxed()
}

/// Untyped proof-term shapes over small name pools, so that shadowing and
/// capture happen often.
pub fn arb_term() -> BoxedStrategy<ProofTerm> {
    let leaf = prop_oneof![
        4 => arb_pname().prop_map(ProofTerm::Var),
        1 => (arb_ind(), arb_ind()).prop_map(|(a, b)| ProofTerm::refl(a, b)),
        1 => (arb_pname(), arb_ind(), arb_ind())
            .prop_map(|(e, a, b)| ProofTerm::IdIntro { evidence: Evidence::Var(e), lhs: a, rhs: b }),
    ];
    leaf.prop_recursive(4, 24, 3, |t| {
        prop_oneof![
            (t.clone(), t.clone()).prop_map(|(a, b)| ProofTerm::pair(a, b)),
            t.clone().prop_map(ProofTerm::fst),
            t.clone().prop_map(ProofTerm::snd),
            t.clone().prop_map(ProofTerm::inl),
            t.clone().prop_map(ProofTerm::inr),
            (t.clone(), arb_pname(), t.clone(), arb_pname(), t.clone())
                .prop_map(|(s, l, lb, r, rb)| ProofTerm::case(s, l, lb, r, rb)),
            (arb_pname(), t.clone()).prop_map(|(x, b)| ProofTerm::lam(x, b)),
            (t.clone(), t.clone()).prop_map(|(f, a)| ProofTerm::app(f, a)),
            (arb_iname(), t.clone()).prop_map(|(x, b)| ProofTerm::tlam(x, d(), b)),
            (t.clone(), arb_ind()).prop_map(|(f, i)| ProofTerm::extr(f, i)),
            (arb_iname(), t.clone(), arb_ind()).prop_map(|(x, b, w)| ProofTerm::ex_pair(x, b, w)),
            (t.clone(), arb_pname(), arb_iname(), t.clone()).prop_map(|(s, h, u, b)| ProofTerm::inst(s, h, u, b)),
            (t.clone(), arb_pname(), t.clone()).prop_map(|(s, e, b)| ProofTerm::rewr(s, e, b)),
            t.clone().prop_map(ProofTerm::abort),
            (t, arb_formula()).prop_map(|(p, f)| ProofTerm::ann(p, f)),
        ]
    })
    .boxed()
}

/// Every reduct path from `t` of length at most `depth`, as the set of
/// terms reached (by alpha key).
pub fn paths_of(t: &ProofTerm) -> Vec<Path> {
    let mut out = Vec::new();
    fn go(t: &ProofTerm, p: &mut Path, out: &mut Vec<Path>) {
        out.push(p.clone());
        for (i, c) in t.children().into_iter().enumerate() {
            p.push(i);
            go(c, p, out);
            p.pop();
        }
    }
    go(t, &mut Vec::new(), &mut out);
    out
}
