//! One PASS/FAIL line per acceptance criterion; fails if any criterion does.
//! Run with `cargo test -p ndk-cli --test acceptance -- --nocapture` to see
//! the lines.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::io::Write;
use std::path::PathBuf;
use std::process::Command;

use ndk_core::church::{self, numeral, plus, redexes, times, ChurchError, Conversion, Strategy, UTerm};
use ndk_core::dialogue::{explore, open_game, Actor, GameTree, MoveKind, Payload, Target};
use ndk_core::reducer::{beta_step, normalize, one_step_reducts, replay};
use ndk_core::syntax::{AlphaEq, TermKind};
use ndk_core::text::{parse_judgement, parse_problem, print_judgement, Notation, Problem};
use ndk_core::{check, Evidence, Formula, Individual, Judgement, ProofTerm, RuleName, Sort};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn basics() -> Problem {
    parse_problem(&std::fs::read_to_string(corpus_path("basics.nd")).unwrap()).unwrap()
}

fn judgements() -> Vec<Judgement> {
    basics().judgements.into_iter().map(|(_, j)| j).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_rules() -> Outcome {
    let v = ProofTerm::var;
    let d = Sort::new("D");
    let s = Individual::constant("s", d.clone());
    let ev = |e: &str| ProofTerm::IdIntro {
        evidence: Evidence::Var(e.into()),
        lhs: Individual::constant("a", d.clone()),
        rhs: Individual::constant("b", d.clone()),
    };
    let cases = [
        (RuleName::AndFst, ProofTerm::fst(ProofTerm::pair(v("a"), v("b"))), v("a")),
        (RuleName::AndSnd, ProofTerm::snd(ProofTerm::pair(v("a"), v("b"))), v("b")),
        (
            RuleName::OrInl,
            ProofTerm::case(ProofTerm::inl(v("a")), "x", ProofTerm::app(v("f"), v("x")), "y", ProofTerm::app(v("g"), v("y"))),
            ProofTerm::app(v("f"), v("a")),
        ),
        (
            RuleName::OrInr,
            ProofTerm::case(ProofTerm::inr(v("a")), "x", ProofTerm::app(v("f"), v("x")), "y", ProofTerm::app(v("g"), v("y"))),
            ProofTerm::app(v("g"), v("a")),
        ),
        (
            RuleName::Imp,
            ProofTerm::app(ProofTerm::lam("x", ProofTerm::pair(v("x"), v("x"))), v("a")),
            ProofTerm::pair(v("a"), v("a")),
        ),
        (
            RuleName::All,
            ProofTerm::extr(ProofTerm::tlam("x", d.clone(), ProofTerm::extr(v("g"), Individual::var("x"))), s.clone()),
            ProofTerm::extr(v("g"), s.clone()),
        ),
        (
            RuleName::Ex,
            ProofTerm::inst(
                ProofTerm::ex_pair("x", ProofTerm::extr(v("g"), Individual::var("x")), s.clone()),
                "h",
                "t",
                ProofTerm::pair(v("h"), ProofTerm::extr(v("k"), Individual::var("t"))),
            ),
            ProofTerm::pair(ProofTerm::extr(v("g"), s.clone()), ProofTerm::extr(v("k"), s.clone())),
        ),
        (RuleName::Id, ProofTerm::rewr(ev("r"), "t", ProofTerm::pair(ev("t"), v("k"))), ProofTerm::pair(ev("r"), v("k"))),
    ];
    for (rule, redex, want) in &cases {
        let (got, step) = beta_step(redex).ok_or(format!("{rule}: no redex in `{redex}`"))?;
        ensure(step.rule == *rule && step.path.is_empty(), || format!("{rule}: fired {} at {:?}", step.rule, step.path))?;
        ensure(got.alpha_eq(want), || format!("{rule}: got `{got}`, want `{want}`"))?;
    }
    Ok(format!("{} rules exact up to alpha", cases.len()))
}

fn random_uterm(rng: &mut ChaCha8Rng, budget: usize) -> UTerm {
    const NAMES: [&str; 3] = ["x", "y", "z"];
    let name = |rng: &mut ChaCha8Rng| NAMES[rng.random_range(0..3)].to_string();
    if budget < 3 || rng.random_range(0..5) == 0 {
        return UTerm::Var(name(rng));
    }
    if rng.random_bool(0.4) {
        let x = name(rng);
        return UTerm::lam(x, random_uterm(rng, budget - 1));
    }
    let left = rng.random_range(1..budget - 1);
    let f = if left >= 2 && rng.random_bool(0.6) {
        let x = name(rng);
        UTerm::lam(x, random_uterm(rng, left - 1))
    } else {
        random_uterm(rng, left)
    };
    UTerm::app(f, random_uterm(rng, budget - 1 - left))
}

fn church_rules() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut terms = Vec::new();
    while terms.len() < 100 {
        let size = rng.random_range(3..=12);
        let t = random_uterm(&mut rng, size);
        if t.size() <= 12 && !redexes(&t).is_empty() {
            terms.push(t);
        }
    }
    let mut pairs = 0;
    for t in &terms {
        for pos in redexes(t) {
            let Some(UTerm::App(f, arg)) = t.subterm_at(&pos) else { unreachable!() };
            let UTerm::Lam(var, body) = &**f else { unreachable!() };
            let (reduced, s2) = church::step(t, &pos, &Conversion::Contract).map_err(|e| e.to_string())?;
            let exp = Conversion::Expand { var: var.clone(), body: (**body).clone(), arg: (**arg).clone() };
            let (back, s3) = church::step(&reduced, &pos, &exp).map_err(|e| format!("{t}: {e}"))?;
            ensure(back.alpha_eq(t) && s3 == s2.mirror(), || format!("{t} -> {reduced} -> {back}"))?;
            let (again, _) = church::step(&back, &pos, &Conversion::Contract).map_err(|e| e.to_string())?;
            ensure(again.alpha_eq(&reduced), || format!("{back} does not contract to {reduced}"))?;
            pairs += 1;
        }
    }
    let omega = church::parse_uterm("(\\x. x x) (\\x. x x)").unwrap();
    ensure(
        matches!(church::normalize(&omega, 500, Strategy::NormalOrder), Err(ChurchError::Timeout { .. })),
        || "omega normalized".into(),
    )?;
    for (m, n) in [(2u64, 3u64), (0, 4), (3, 3)] {
        let (sum, _) = church::normalize(&UTerm::apps(plus(), [numeral(m), numeral(n)]), 1000, Strategy::NormalOrder)
            .map_err(|e| e.to_string())?;
        let (prod, _) = church::normalize(&UTerm::apps(times(), [numeral(m), numeral(n)]), 1000, Strategy::NormalOrder)
            .map_err(|e| e.to_string())?;
        ensure(sum.as_numeral() == Some(m + n), || format!("#{m}+#{n} gave {sum}"))?;
        ensure(prod.as_numeral() == Some(m * n), || format!("#{m}*#{n} gave {prod}"))?;
    }
    Ok(format!("100 terms, {pairs} II/III round trips; omega times out; #2+#3=#5, #2*#3=#6"))
}

fn reachable(t: &ProofTerm) -> Vec<ProofTerm> {
    let mut seen = HashMap::from([(t.canonical(), t.clone())]);
    let mut queue = VecDeque::from([t.clone()]);
    while let Some(u) = queue.pop_front() {
        for (r, _) in one_step_reducts(&u) {
            let k = r.canonical();
            if !seen.contains_key(&k) && seen.len() < 20_000 {
                seen.insert(k, r.clone());
                queue.push_back(r);
            }
        }
    }
    seen.into_values().collect()
}

fn formula_shapes(f: &Formula, out: &mut BTreeSet<&'static str>) {
    match f {
        Formula::Atom { .. } => {
            out.insert("atom");
        }
        Formula::Bottom => {
            out.insert("bottom");
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            out.insert(match f {
                Formula::And(..) => "and",
                Formula::Or(..) => "or",
                _ => "imp",
            });
            formula_shapes(a, out);
            formula_shapes(b, out);
        }
        Formula::Forall { body, .. } | Formula::Exists { body, .. } => {
            out.insert(if matches!(f, Formula::Forall { .. }) { "all" } else { "some" });
            formula_shapes(body, out);
        }
        Formula::Id { .. } => {
            out.insert("id");
        }
    }
}

fn has_nested_inst(t: &ProofTerm) -> bool {
    fn inst_depth(t: &ProofTerm) -> usize {
        let below = t.children().into_iter().map(inst_depth).max().unwrap_or(0);
        below + usize::from(t.kind() == TermKind::Inst)
    }
    inst_depth(t) >= 2
}

/// Wraps a term in a detour that reduces back to it. The last shape puts the
/// substituted term in the head of a projection.
fn detour(t: ProofTerm, f: &Formula, which: usize) -> ProofTerm {
    let v = ProofTerm::var;
    match which {
        0 => ProofTerm::app(ProofTerm::ann(ProofTerm::lam("z_", v("z_")), Formula::imp(f.clone(), f.clone())), t),
        1 => ProofTerm::fst(ProofTerm::ann(ProofTerm::pair(t.clone(), t), Formula::and(f.clone(), f.clone()))),
        2 => ProofTerm::case(ProofTerm::ann(ProofTerm::inr(t), Formula::or(f.clone(), f.clone())), "l_", v("l_"), "r_", v("r_")),
        _ => {
            let both = Formula::and(f.clone(), f.clone());
            let dup = ProofTerm::ann(ProofTerm::lam("z_", ProofTerm::pair(v("z_"), v("z_"))), Formula::imp(f.clone(), both));
            ProofTerm::snd(ProofTerm::app(dup, t))
        }
    }
}

/// The corpus plus seeded two-layer detours around every corpus term.
fn with_detours() -> Vec<Judgement> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = judgements();
    for j in judgements() {
        for _ in 0..3 {
            let inner = detour(j.term.clone(), &j.formula, rng.random_range(0..4));
            let term = detour(inner, &j.formula, rng.random_range(0..4));
            out.push(Judgement { ctx: j.ctx.clone(), term, formula: j.formula.clone() });
        }
    }
    out
}

fn subject_reduction() -> Outcome {
    let js = with_detours();
    ensure(judgements().len() >= 25, || format!("only {} judgements", judgements().len()))?;
    let mut shapes = BTreeSet::new();
    for j in &js {
        formula_shapes(&j.formula, &mut shapes);
        for e in j.ctx.entries() {
            if let Some(f) = e.formula() {
                formula_shapes(&f, &mut shapes);
            }
        }
    }
    for s in ["and", "or", "imp", "all", "some", "id", "bottom"] {
        ensure(shapes.contains(s), || format!("corpus has no `{s}` formula"))?;
    }
    ensure(js.iter().any(|j| has_nested_inst(&j.term)), || "no nested inst".into())?;
    let corpus_size = judgements().len();
    let mut steps = 0;
    let mut rules = HashSet::new();
    for j in &js {
        check(&j.ctx, &j.term, &j.formula).map_err(|e| format!("{}: {e}", j.term))?;
        for t in reachable(&j.term) {
            for (r, step) in one_step_reducts(&t) {
                steps += 1;
                rules.insert(step.rule);
                check(&j.ctx, &r, &j.formula).map_err(|e| format!("{} on `{t}` gives `{r}`: {e}", step.rule))?;
            }
        }
    }
    ensure(rules.len() == RuleName::ALL.len(), || format!("only rules {rules:?} exercised"))?;
    Ok(format!("{corpus_size} corpus judgements plus detours, {steps} single steps re-checked, all 8 rules exercised"))
}

fn canonicity() -> Outcome {
    let mut closed = 0;
    for j in judgements().into_iter().filter(|j| j.term.is_closed()) {
        closed += 1;
        let (nf, _) = normalize(&j, 10_000).map_err(|e| e.to_string())?;
        ensure(nf.is_canonical(), || format!("`{}` normalizes to `{nf}`", j.term))?;
    }
    ensure(closed > 0, || "no closed terms".into())?;
    Ok(format!("{closed} closed terms normalize to introductions"))
}

fn confluence() -> Outcome {
    let mut count = 0;
    let mut peaks = 0;
    for j in with_detours().into_iter().filter(|j| j.term.size() <= 15) {
        count += 1;
        let all = reachable(&j.term);
        let normals: Vec<_> = all.iter().filter(|t| one_step_reducts(t).is_empty()).collect();
        ensure(normals.len() == 1, || format!("`{}` has normal forms {:?}", j.term, normals.iter().map(|t| t.to_string()).collect::<Vec<_>>()))?;
        let nf = normals[0];
        // Every reduct reaches the unique normal form, so every peak joins.
        for t in &all {
            let reducts = one_step_reducts(t);
            peaks += reducts.len() * reducts.len().saturating_sub(1) / 2;
            for (r, _) in reducts {
                let (rn, _) = ndk_core::reducer::normalize_term(&r, 10_000).map_err(|e| e.to_string())?;
                ensure(rn.alpha_eq(nf), || format!("`{r}` normalizes to `{rn}`, not `{nf}`"))?;
            }
        }
    }
    Ok(format!("{count} terms of at most 15 nodes, {peaks} peaks joined, unique normal forms"))
}

fn universal_attack() -> Outcome {
    let mut checked = 0;
    for j in judgements() {
        let Formula::Forall { sort, .. } = &j.formula else { continue };
        let s = open_game(&j).map_err(|e| e.to_string())?;
        if !s.residual.is_canonical() {
            continue;
        }
        for c in j.ctx.signature().constants_of(sort) {
            let w = Individual::constant(c.clone(), sort.clone());
            let m = s
                .legal_attacks()
                .into_iter()
                .find(|m| m.kind == MoveKind::AttackAll(w.clone()))
                .ok_or(format!("{}: no attack with {c}", j.formula))?;
            let next = s.apply_move(&m).map_err(|e| e.to_string())?;
            let defense = next.history.get(1).ok_or("no defense")?;
            let just = defense.justification.as_ref().ok_or("defense without steps")?;
            let rules: Vec<_> = just.trace.steps.iter().map(|s| s.rule).collect();
            ensure(rules == [RuleName::All], || format!("{}: steps {rules:?}", j.formula))?;
            let want = j.formula.instantiate(&w, None).map_err(|e| e.to_string())?;
            let MoveKind::Defend { claim, payload: Payload::Proof(p) } = &defense.mv.kind else {
                return Err("defense has no proof".into());
            };
            ensure(claim.alpha_eq(&want), || format!("claimed {claim}, want {want}"))?;
            check(&s.ctx, p, &want).map_err(|e| format!("{p} : {want}: {e}"))?;
            checked += 1;
        }
    }
    ensure(checked > 0, || "no universal theses".into())?;
    Ok(format!("{checked} (thesis, constant) pairs: one All step, valid defense"))
}

fn trees() -> Result<Vec<GameTree>, String> {
    judgements()
        .iter()
        .map(|j| open_game(j).map(|s| explore(&s, 10)).map_err(|e| format!("{}: {e}", j.term)))
        .collect()
}

fn totality() -> Outcome {
    let (mut leaves, mut replays) = (0, 0);
    for t in trees()? {
        let c = t.leaf_counts();
        ensure(c.stalled == 0, || format!("stalled: {:?}", t.stalls()))?;
        leaves += c.leaves;
        for e in t.edges() {
            for p in &e.played {
                if let Some(j) = &p.justification {
                    j.verify()?;
                    replay(&j.trace).map_err(|e| e.to_string())?;
                    replays += 1;
                }
            }
        }
    }
    Ok(format!("{leaves} leaves, 0 stalled, 0 engine rejections, {replays} responses replayed"))
}

/// Asserter picks disjuncts and existential witnesses; attacker picks
/// universal witnesses. On the thesis side this is literally: the Proponent
/// chooses disjunct and witness, the Opponent every universal witness.
fn choice_direction() -> Outcome {
    let (mut choices, mut universals) = (0, 0);
    for t in trees()? {
        let mut bad = None;
        t.walk(&mut |n| {
            for m in n.state.legal_attacks() {
                if !m.kind.is_attack() || m.target != Target::Standing {
                    bad = Some(format!("Opponent offered {:?}", m.kind));
                }
            }
        });
        if let Some(b) = bad {
            return Err(b);
        }
        for e in t.edges() {
            for p in &e.played {
                let asserter = match p.mv.target {
                    Target::Standing => Actor::Proponent,
                    Target::Concession(_) => Actor::Opponent,
                };
                match &p.mv.kind {
                    MoveKind::Defend { payload: Payload::Disjunct { .. } | Payload::Witness { .. }, .. } => {
                        ensure(p.mv.actor == asserter, || format!("{:?} chose for {asserter:?}", p.mv.actor))?;
                        choices += 1;
                    }
                    MoveKind::AttackAll(_) => {
                        ensure(p.mv.actor != asserter, || format!("{:?} attacked its own universal", p.mv.actor))?;
                        if p.mv.target == Target::Standing {
                            ensure(p.mv.actor == Actor::Opponent, || "Proponent chose a universal witness".into())?;
                        }
                        universals += 1;
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(format!("{choices} disjunct/witness choices by the asserter, {universals} universal witnesses by the attacker"))
}

fn ndk(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_ndk")).args(args).output().ok()?.status.code()
}

fn round_trip_and_exit_codes() -> Outcome {
    let p = basics();
    for (line, j) in &p.judgements {
        let text = print_judgement(j, Notation::Ascii);
        let back = parse_judgement(&text, &p.signature).map_err(|e| format!("line {line}: `{text}`: {e}"))?;
        ensure(
            back.term.alpha_eq(&j.term) && back.formula.alpha_eq(&j.formula) && back.ctx.entries().len() == j.ctx.entries().len(),
            || format!("line {line}: `{text}` reparses differently"),
        )?;
        ensure(print_judgement(&back, Notation::Ascii) == text, || format!("line {line}: print not stable"))?;
    }
    let mut empty = tempfile::NamedTempFile::new().map_err(|e| e.to_string())?;
    let mut broken = tempfile::NamedTempFile::new().map_err(|e| e.to_string())?;
    let mut bad_script = tempfile::NamedTempFile::new().map_err(|e| e.to_string())?;
    empty.write_all(b"").unwrap();
    broken.write_all(b"pred A\n|- <a, : A\n").unwrap();
    bad_script.write_all(b"R?\n").unwrap();
    let s = |p: PathBuf| p.display().to_string();
    let (basics, leak, swap, lam) = (s(corpus_path("basics.nd")), s(corpus_path("leak.nd")), s(corpus_path("swap.nd")), s(corpus_path("church.lam")));
    let (empty, broken, bad_script) = (s(empty.path().into()), s(broken.path().into()), s(bad_script.path().into()));
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["check", &basics], 0),
        (vec!["check", &leak], 1),
        (vec!["check", &empty], 0),
        (vec!["check", &broken], 2),
        (vec!["check", "/no/such/file"], 2),
        (vec!["normalize", &basics], 0),
        (vec!["normalize", &leak], 1),
        (vec!["normalize", "--lambda", &lam], 0),
        (vec!["play", &swap], 0),
        (vec!["play", &swap, "--policy", "script", "--script", &bad_script], 1),
        (vec!["play", &broken], 2),
        (vec!["no-such-command"], 2),
    ];
    for (args, want) in &cases {
        let got = ndk(args);
        ensure(got == Some(*want), || format!("ndk {} exited {got:?}, want {want}", args.join(" ")))?;
    }
    Ok(format!("{} judgements round-trip; {} exit-code cases", p.judgements.len(), cases.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("golden beta rules", golden_rules),
        ("church rules I-III", church_rules),
        ("subject reduction", subject_reduction),
        ("canonicity", canonicity),
        ("confluence", confluence),
        ("universal attack is one All step", universal_attack),
        ("dialogue totality", totality),
        ("choice direction", choice_direction),
        ("parser round-trip and exit codes", round_trip_and_exit_codes),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                println!("FAIL {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
