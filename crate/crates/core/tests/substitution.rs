mod common;

use std::collections::BTreeMap;

use common::{arb_ind, arb_pname, arb_term, judgements, ln, ln_formula};
use ndk_core::syntax::{subst_ind, subst_ind_formula, subst_proof, AlphaEq, HasFreeVars, TermKind};
use ndk_core::{Formula, Individual, ProofTerm};
use proptest::prelude::*;

fn corpus_terms() -> Vec<ProofTerm> {
    judgements().into_iter().map(|j| j.term).collect()
}

fn ind_ln(i: &Individual) -> common::Ln {
    match ln_formula(&Formula::atom("P", vec![i.clone()])) {
        common::Ln::Node(_, mut kids) => kids.remove(1),
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, ..ProptestConfig::default() })]

    #[test]
    fn proof_substitution_matches_locally_nameless(t in arb_term(), x in arb_pname(), v in arb_term()) {
        let got = ln(&subst_proof(&t, &x, &v));
        let want = ln(&t).replace_free_proof(&x, &ln(&v));
        prop_assert_eq!(got, want);
    }

    #[test]
    fn individual_substitution_matches_locally_nameless(t in arb_term(), x in common::arb_iname(), v in arb_ind()) {
        let got = ln(&subst_ind(&t, &x, &v));
        let want = ln(&t).replace_free_ind(&x, &ind_ln(&v));
        prop_assert_eq!(got, want);
    }

    #[test]
    fn formula_substitution_matches_locally_nameless(f in common::arb_formula(), x in common::arb_iname(), v in arb_ind()) {
        let got = ln_formula(&subst_ind_formula(&f, &x, &v));
        let want = ln_formula(&f).replace_free_ind(&x, &ind_ln(&v));
        prop_assert_eq!(got, want);
    }

    #[test]
    fn alpha_eq_agrees_with_locally_nameless(a in arb_term(), b in arb_term()) {
        prop_assert_eq!(a.alpha_eq(&b), ln(&a) == ln(&b));
        prop_assert!(a.alpha_eq(&a.canonical()));
    }

    #[test]
    fn substituting_a_variable_for_itself_is_identity(t in arb_term(), x in arb_pname()) {
        prop_assert!(subst_proof(&t, &x, &ProofTerm::Var(x.clone())).alpha_eq(&t));
    }

    #[test]
    fn substitution_composes(t in arb_term(), v in arb_term(), w in arb_term(), x in arb_pname(), y in arb_pname()) {
        prop_assume!(x != y && !w.free_vars().proofs.contains(&x));
        let left = subst_proof(&subst_proof(&t, &x, &v), &y, &w);
        let right = subst_proof(&subst_proof(&t, &y, &w), &x, &subst_proof(&v, &y, &w));
        prop_assert!(left.alpha_eq(&right), "{} vs {}", left, right);
    }

    #[test]
    fn substitution_only_changes_kinds_at_replaced_positions(t in arb_term(), x in arb_pname(), v in arb_term()) {
        let n = ln(&t).count_free_proof(&x);
        let mut want: BTreeMap<TermKind, usize> = t.kind_counts();
        if n > 0 {
            *want.get_mut(&TermKind::Var).unwrap() -= n;
            for (k, c) in v.kind_counts() {
                *want.entry(k).or_default() += c * n;
            }
        }
        want.retain(|_, c| *c > 0);
        prop_assert_eq!(subst_proof(&t, &x, &v).kind_counts(), want);
    }
}

#[test]
fn identity_substitution_over_corpus() {
    for t in corpus_terms() {
        for x in ["x", "p", "a", "h", "e"] {
            assert!(subst_proof(&t, x, &ProofTerm::var(x)).alpha_eq(&t), "{t}");
        }
    }
}

/// Renames every binder to a fresh `b<k>` by going through the
/// locally-nameless form and back.
fn rename_binders(t: &ProofTerm) -> ProofTerm {
    use ndk_core::syntax::subst_proof as sp;
    let mut k = 0;
    let mut fresh = |base: &str| {
        k += 1;
        format!("{base}{k}")
    };
    fn go(t: &ProofTerm, fresh: &mut impl FnMut(&str) -> String) -> ProofTerm {
        use ProofTerm as T;
        let ren_p = |b: &ProofTerm, x: &str, y: &str| sp(b, x, &T::var(y));
        match t {
            T::Lam { var, body } => {
                let y = fresh("pb");
                T::lam(y.clone(), go(&ndk_core::syntax::subst_evidence(&ren_p(body, var, &y), var, &ndk_core::Evidence::Var(y.clone())), fresh))
            }
            _ => {
                let mut out = t.clone();
                for i in 0..t.children().len() {
                    let c = t.subterm_at(&[i]).unwrap();
                    out = out.replace_at(&[i], go(c, fresh)).unwrap();
                }
                out
            }
        }
    }
    go(t, &mut fresh)
}

#[test]
fn alpha_eq_is_an_equivalence_on_corpus() {
    let mut terms = corpus_terms();
    let renamed: Vec<_> = terms.iter().map(rename_binders).collect();
    terms.extend(renamed);
    for a in &terms {
        assert!(a.alpha_eq(a));
        for b in &terms {
            assert_eq!(a.alpha_eq(b), b.alpha_eq(a));
            assert_eq!(a.alpha_eq(b), ln(a) == ln(b), "{a} / {b}");
            if !a.alpha_eq(b) {
                continue;
            }
            for c in &terms {
                if b.alpha_eq(c) {
                    assert!(a.alpha_eq(c));
                }
            }
        }
    }
    let n = terms.len() / 2;
    for i in 0..n {
        assert!(terms[i].alpha_eq(&terms[n + i]), "{} vs {}", terms[i], terms[n + i]);
    }
}

#[test]
fn free_variable_examples() {
    let t = ProofTerm::lam("x", ProofTerm::app(ProofTerm::var("x"), ProofTerm::var("z")));
    let fv = t.free_vars();
    assert_eq!(fv.proofs.into_iter().collect::<Vec<_>>(), vec!["z".to_string()]);
    assert!(fv.individuals.is_empty());
    let fv = ProofTerm::extr(ProofTerm::var("f"), Individual::var("t")).free_vars();
    assert_eq!(fv.proofs.into_iter().collect::<Vec<_>>(), vec!["f".to_string()]);
    assert_eq!(fv.individuals.into_iter().collect::<Vec<_>>(), vec!["t".to_string()]);
    let g = ProofTerm::app(ProofTerm::var("g"), ProofTerm::var("q"));
    let fv = ProofTerm::ex_pair("x", g, Individual::constant("c", common::d())).free_vars();
    assert_eq!(fv.proofs.len(), 2);
    assert!(fv.individuals.is_empty());
}
