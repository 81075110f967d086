mod common;

use std::collections::{HashMap, HashSet, VecDeque};

use common::{d, judgements};
use ndk_core::reducer::{beta_step, normalize, normalize_term, one_step_reducts, replay, subject_reduction};
use ndk_core::syntax::AlphaEq;
use ndk_core::{check, Evidence, Formula, Individual, ProofTerm, RuleName};

fn v(x: &str) -> ProofTerm {
    ProofTerm::var(x)
}

fn iv(x: &str) -> Individual {
    Individual::var(x)
}

fn c(x: &str) -> Individual {
    Individual::constant(x, d())
}

fn assert_root_step(redex: ProofTerm, rule: RuleName, want: ProofTerm) {
    let (got, step) = beta_step(&redex).expect("a redex");
    assert_eq!(step.rule, rule);
    assert!(step.path.is_empty());
    assert!(got.alpha_eq(&want), "{rule}: got `{got}`, want `{want}`");
}

#[test]
fn golden_and_fst() {
    assert_root_step(ProofTerm::fst(ProofTerm::pair(v("a"), v("b"))), RuleName::AndFst, v("a"));
}

#[test]
fn golden_and_snd() {
    assert_root_step(ProofTerm::snd(ProofTerm::pair(v("a"), v("b"))), RuleName::AndSnd, v("b"));
}

#[test]
fn golden_or_inl() {
    // case(inl(a), x. <x, k>, y. y) ~> <a, k>
    let t = ProofTerm::case(ProofTerm::inl(v("a")), "x", ProofTerm::pair(v("x"), v("k")), "y", v("y"));
    assert_root_step(t, RuleName::OrInl, ProofTerm::pair(v("a"), v("k")));
}

#[test]
fn golden_or_inr() {
    // case(inr(b), x. x, y. app(f, y)) ~> app(f, b)
    let t = ProofTerm::case(ProofTerm::inr(v("b")), "x", v("x"), "y", ProofTerm::app(v("f"), v("y")));
    assert_root_step(t, RuleName::OrInr, ProofTerm::app(v("f"), v("b")));
}

#[test]
fn golden_imp() {
    // app(\x. <x, \y. x>, a) ~> <a, \y. a>
    let body = ProofTerm::pair(v("x"), ProofTerm::lam("y", v("x")));
    let t = ProofTerm::app(ProofTerm::lam("x", body), v("a"));
    assert_root_step(t, RuleName::Imp, ProofTerm::pair(v("a"), ProofTerm::lam("y", v("a"))));
}

#[test]
fn golden_imp_avoids_capture() {
    let t = ProofTerm::app(ProofTerm::lam("x", ProofTerm::lam("y", v("x"))), v("y"));
    let (got, _) = beta_step(&t).unwrap();
    assert!(got.alpha_eq(&ProofTerm::lam("z", v("y"))));
    assert!(!got.alpha_eq(&ProofTerm::lam("y", v("y"))));
}

#[test]
fn golden_all() {
    // extr(/\x:D. extr(p, x), t) ~> extr(p, t)
    let g = ProofTerm::extr(v("p"), iv("x"));
    let t = ProofTerm::extr(ProofTerm::tlam("x", d(), g), c("c1"));
    assert_root_step(t, RuleName::All, ProofTerm::extr(v("p"), c("c1")));
}

#[test]
fn golden_ex() {
    // inst(eps(x. extr(q, x), s), h.t. <h, extr(r, t)>) ~> <extr(q, s), extr(r, s)>
    let g = ProofTerm::extr(v("q"), iv("x"));
    let body = ProofTerm::pair(v("h"), ProofTerm::extr(v("r"), iv("t")));
    let t = ProofTerm::inst(ProofTerm::ex_pair("x", g, c("s")), "h", "t", body);
    let want = ProofTerm::pair(ProofTerm::extr(v("q"), c("s")), ProofTerm::extr(v("r"), c("s")));
    assert_root_step(t, RuleName::Ex, want);
}

#[test]
fn golden_ex_witness_named_like_the_bound_individual() {
    // The proof g[s/x] mentions a free `t`; only the bound `t` becomes s.
    let g = ProofTerm::extr(v("q"), iv("t"));
    let body = ProofTerm::pair(v("h"), ProofTerm::extr(v("r"), iv("t")));
    let t = ProofTerm::inst(ProofTerm::ex_pair("x", g, c("s")), "h", "t", body);
    let want = ProofTerm::pair(ProofTerm::extr(v("q"), iv("t")), ProofTerm::extr(v("r"), c("s")));
    assert_root_step(t, RuleName::Ex, want);
}

#[test]
fn golden_id() {
    // rewr(r(a, b), t. <t(a, b), k>) ~> <r(a, b), k>
    let (a, b) = (c("a"), c("b"));
    let ev = |e: &str| ProofTerm::IdIntro { evidence: Evidence::Var(e.into()), lhs: a.clone(), rhs: b.clone() };
    let t = ProofTerm::rewr(ev("r"), "t", ProofTerm::pair(ev("t"), v("k")));
    assert_root_step(t, RuleName::Id, ProofTerm::pair(ev("r"), v("k")));
}

/// All terms reachable from `t`, keyed by alpha class, up to `limit`.
fn reachable(t: &ProofTerm, limit: usize) -> HashMap<ProofTerm, ProofTerm> {
    let mut seen = HashMap::from([(t.canonical(), t.clone())]);
    let mut queue = VecDeque::from([t.clone()]);
    while let Some(u) = queue.pop_front() {
        for (r, _) in one_step_reducts(&u) {
            let k = r.canonical();
            if !seen.contains_key(&k) {
                assert!(seen.len() < limit, "reduction graph of `{t}` too large");
                seen.insert(k, r.clone());
                queue.push_back(r);
            }
        }
    }
    seen
}

fn within(t: &ProofTerm, steps: usize) -> HashSet<ProofTerm> {
    let mut out = HashSet::from([t.canonical()]);
    let mut frontier = vec![t.clone()];
    for _ in 0..steps {
        let mut next = Vec::new();
        for u in &frontier {
            for (r, _) in one_step_reducts(u) {
                if out.insert(r.canonical()) {
                    next.push(r);
                }
            }
        }
        frontier = next;
    }
    out
}

#[test]
fn subject_reduction_over_every_reachable_term() {
    let mut steps = 0;
    for j in judgements() {
        for t in reachable(&j.term, 10_000).into_values() {
            for (r, step) in one_step_reducts(&t) {
                steps += 1;
                if let Err(e) = check(&j.ctx, &r, &j.formula) {
                    panic!("{} step on `{t}` gives `{r}`, which fails: {e}", step.rule);
                }
            }
        }
        let report = subject_reduction(&j, 1000);
        assert!(report.all_valid(), "{}", j.term);
    }
    assert!(steps > 20, "corpus exercises too few steps ({steps})");
}

#[test]
fn corpus_exercises_every_rule() {
    let mut rules = HashSet::new();
    for j in judgements() {
        for t in reachable(&j.term, 10_000).into_values() {
            rules.extend(one_step_reducts(&t).into_iter().map(|(_, s)| s.rule));
        }
    }
    for r in RuleName::ALL {
        assert!(rules.contains(&r), "no {r} redex in the corpus");
    }
}

#[test]
fn closed_terms_normalize_to_introductions() {
    let mut closed = 0;
    for j in judgements() {
        if !j.term.is_closed() {
            continue;
        }
        closed += 1;
        let (nf, _) = normalize(&j, 1000).unwrap();
        assert!(nf.is_canonical(), "`{}` normalizes to `{nf}`", j.term);
    }
    assert!(closed >= 10);
}

#[test]
fn local_confluence_small_terms() {
    for j in judgements().into_iter().filter(|j| j.term.size() <= 15) {
        for t in reachable(&j.term, 10_000).into_values() {
            let reducts = one_step_reducts(&t);
            for (a, _) in &reducts {
                for (b, _) in &reducts {
                    let ja = within(a, 4);
                    let jb = within(b, 4);
                    assert!(!ja.is_disjoint(&jb), "peak at `{t}` does not rejoin: `{a}` / `{b}`");
                }
            }
        }
    }
}

#[test]
fn unique_normal_forms_small_terms() {
    for j in judgements().into_iter().filter(|j| j.term.size() <= 15) {
        let all = reachable(&j.term, 10_000);
        let normals: Vec<_> = all.iter().filter(|(_, t)| one_step_reducts(t).is_empty()).collect();
        assert_eq!(normals.len(), 1, "`{}` has normal forms {:?}", j.term, normals);
        let (nf, _) = normalize(&j, 1000).unwrap();
        assert_eq!(&nf.canonical(), normals[0].0);
    }
}

#[test]
fn normalization_is_deterministic_and_replays() {
    for j in judgements() {
        let a = normalize(&j, 1000).unwrap();
        let b = normalize(&j, 1000).unwrap();
        assert_eq!(a, b);
        assert_eq!(replay(&a.1).unwrap(), a.0);
    }
}

#[test]
fn step_budget_is_reported() {
    // app(\x. app(x, x), \x. app(x, x)) does not normalize.
    let w = ProofTerm::lam("x", ProofTerm::app(v("x"), v("x")));
    let omega = ProofTerm::app(w.clone(), w);
    match normalize_term(&omega, 50) {
        Err(ndk_core::reducer::ReduceError::Timeout { partial, .. }) => assert_eq!(partial.steps.len(), 50),
        other => panic!("{other:?}"),
    }
}

#[test]
fn extr_step_conclusion_matches_instance() {
    let src = "sort D\nconst c : D\npred P(D)\np : all x:D. P(x) |- extr((/\\y:D. extr(p, y) : all y:D. P(y)), c) : P(c)";
    let prob = ndk_core::text::parse_problem(src).unwrap();
    let j = &prob.judgements[0].1;
    let report = subject_reduction(j, 10);
    assert!(report.all_valid());
    assert_eq!(report.entries.len(), 1);
    assert_eq!(report.entries[0].step.rule, RuleName::All);
    assert_eq!(j.formula, Formula::atom("P", vec![c("c")]));
}

#[test]
fn ascriptions_do_not_depend_on_reduction_order() {
    // The argument reaches `refl` either before or after it is substituted.
    let eq = Formula::id(d(), c("c1"), c("c1"));
    let rewr = ProofTerm::rewr(
        ProofTerm::refl(c("c1"), c("c1")),
        "t",
        ProofTerm::IdIntro { evidence: Evidence::Var("t".into()), lhs: c("c1"), rhs: c("c1") },
    );
    let arg = ProofTerm::case(
        ProofTerm::ann(ProofTerm::inr(rewr), Formula::or(eq.clone(), eq.clone())),
        "l",
        v("l"),
        "r",
        v("r"),
    );
    let t = ProofTerm::app(ProofTerm::ann(ProofTerm::lam("z", v("z")), Formula::imp(eq.clone(), eq)), arg);
    let normals: HashSet<_> = reachable(&t, 100)
        .into_values()
        .filter(|u| beta_step(u).is_none())
        .collect();
    assert_eq!(normals.into_iter().collect::<Vec<_>>(), vec![ProofTerm::refl(c("c1"), c("c1"))]);
}

#[test]
fn substituted_case_in_a_head_position_is_ascribed() {
    // snd(app((\z. <z, z> : A -> A & A), case(...))) puts the case in a
    // pair at the head of the projection once the application fires.
    let a = Formula::prop("A");
    let problem = ndk_core::text::parse_problem("pred A\nh : A | A |- case(h, l. l, r. r) : A\n").unwrap();
    let ctx = problem.judgements[0].1.ctx.clone();
    let arg = ProofTerm::case(v("h"), "l", v("l"), "r", v("r"));
    let dup = ProofTerm::ann(
        ProofTerm::lam("z", ProofTerm::pair(v("z"), v("z"))),
        Formula::imp(a.clone(), Formula::and(a.clone(), a.clone())),
    );
    let t = ProofTerm::snd(ProofTerm::app(dup, arg));
    check(&ctx, &t, &a).unwrap();
    let (nf, _) = normalize_term(&t, 100).unwrap();
    check(&ctx, &nf, &a).unwrap();
}
