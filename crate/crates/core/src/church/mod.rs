//! The untyped lambda calculus under Church's three conversion rules.
//!
//! - Rule I renames a bound variable: `\x. M` to `\y. M[y/x]` with `y` not
//!   free in `M`.
//! - Rule II contracts a redex: `(\x. M) N` to `M[N/x]`.
//! - Rule III expands: `M[N/x]` to `(\x. M) N` for a caller-supplied split.
//!
//! Substitution renames binders as needed, so the side conditions of Rule II
//! never block a contraction. Renaming done that way is not recorded as a
//! Rule I step.

mod text;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::syntax::{fresh_name, Name, Path};

pub use text::{numeral, parse_lambda_file, parse_uterm, plus, times, LambdaLine};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum UTerm {
    Var(Name),
    Lam(Name, Box<UTerm>),
    App(Box<UTerm>, Box<UTerm>),
}

impl UTerm {
    pub fn var(x: impl Into<Name>) -> Self {
        UTerm::Var(x.into())
    }

    pub fn lam(x: impl Into<Name>, body: UTerm) -> Self {
        UTerm::Lam(x.into(), Box::new(body))
    }

    pub fn app(f: UTerm, a: UTerm) -> Self {
        UTerm::App(Box::new(f), Box::new(a))
    }

    /// Left-nested application of `f` to `args`.
    pub fn apps(f: UTerm, args: impl IntoIterator<Item = UTerm>) -> Self {
        args.into_iter().fold(f, UTerm::app)
    }

    pub fn size(&self) -> usize {
        match self {
            UTerm::Var(_) => 1,
            UTerm::Lam(_, b) => 1 + b.size(),
            UTerm::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        match self {
            UTerm::Var(x) => BTreeSet::from([x.clone()]),
            UTerm::Lam(x, b) => {
                let mut fv = b.free_vars();
                fv.remove(x);
                fv
            }
            UTerm::App(f, a) => {
                let mut fv = f.free_vars();
                fv.extend(a.free_vars());
                fv
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<Name> {
        match self {
            UTerm::Var(x) => BTreeSet::from([x.clone()]),
            UTerm::Lam(x, b) => {
                let mut out = b.all_names();
                out.insert(x.clone());
                out
            }
            UTerm::App(f, a) => {
                let mut out = f.all_names();
                out.extend(a.all_names());
                out
            }
        }
    }

    pub fn children(&self) -> Vec<&UTerm> {
        match self {
            UTerm::Var(_) => vec![],
            UTerm::Lam(_, b) => vec![b],
            UTerm::App(f, a) => vec![f, a],
        }
    }

    pub fn subterm_at(&self, path: &[usize]) -> Option<&UTerm> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    pub fn replace_at(&self, path: &[usize], new: UTerm) -> Option<UTerm> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(new);
        };
        match (self, i) {
            (UTerm::Lam(x, b), 0) => {
                Some(UTerm::Lam(x.clone(), Box::new(b.replace_at(rest, new)?)))
            }
            (UTerm::App(f, a), 0) => {
                Some(UTerm::App(Box::new(f.replace_at(rest, new)?), a.clone()))
            }
            (UTerm::App(f, a), 1) => {
                Some(UTerm::App(f.clone(), Box::new(a.replace_at(rest, new)?)))
            }
            _ => None,
        }
    }

    /// Capture-avoiding `self[v/x]`.
    pub fn subst(&self, x: &str, v: &UTerm) -> UTerm {
        let fv = v.free_vars();
        self.subst_with(x, v, &fv)
    }

    fn subst_with(&self, x: &str, v: &UTerm, fv: &BTreeSet<Name>) -> UTerm {
        match self {
            UTerm::Var(y) if y == x => v.clone(),
            UTerm::Var(_) => self.clone(),
            UTerm::App(f, a) => UTerm::app(f.subst_with(x, v, fv), a.subst_with(x, v, fv)),
            UTerm::Lam(y, _) if y == x => self.clone(),
            UTerm::Lam(y, b) => {
                let body_fv = b.free_vars();
                if !body_fv.contains(x) {
                    return self.clone();
                }
                if fv.contains(y) {
                    let z = fresh_name(y, |n| fv.contains(n) || body_fv.contains(n) || n == x);
                    let b = b.subst(y, &UTerm::Var(z.clone()));
                    UTerm::lam(z, b.subst_with(x, v, fv))
                } else {
                    UTerm::lam(y.clone(), b.subst_with(x, v, fv))
                }
            }
        }
    }

    /// De Bruijn form with free variables kept by name.
    fn canonical(&self) -> Canon {
        fn go(t: &UTerm, env: &mut Vec<Name>) -> Canon {
            match t {
                UTerm::Var(x) => match env.iter().rev().position(|y| y == x) {
                    Some(i) => Canon::Bound(i),
                    None => Canon::Free(x.clone()),
                },
                UTerm::Lam(x, b) => {
                    env.push(x.clone());
                    let c = go(b, env);
                    env.pop();
                    Canon::Lam(Box::new(c))
                }
                UTerm::App(f, a) => Canon::App(Box::new(go(f, env)), Box::new(go(a, env))),
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn alpha_eq(&self, other: &UTerm) -> bool {
        self == other || self.canonical() == other.canonical()
    }

    /// A hashable key identifying the alpha-equivalence class.
    pub fn alpha_key(&self) -> impl Eq + std::hash::Hash + Clone {
        self.canonical()
    }

    /// Reads the term back as a Church numeral `\f. \x. f (... (f x))`.
    pub fn as_numeral(&self) -> Option<u64> {
        let UTerm::Lam(f, b) = self else { return None };
        let UTerm::Lam(x, body) = &**b else {
            return None;
        };
        if f == x {
            return None;
        }
        let mut body: &UTerm = body;
        let mut n = 0;
        loop {
            match body {
                UTerm::Var(y) if y == x => return Some(n),
                UTerm::App(g, rest) if matches!(&**g, UTerm::Var(h) if h == f) => {
                    n += 1;
                    body = rest;
                }
                _ => return None,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Canon {
    Free(Name),
    Bound(usize),
    Lam(Box<Canon>),
    App(Box<Canon>, Box<Canon>),
}

impl fmt::Display for UTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::print(self, false))
    }
}

/// Prints with `#n` for subterms that are Church numerals.
pub fn print_with_numerals(t: &UTerm) -> String {
    text::print(t, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConvRule {
    I,
    II,
    III,
}

impl fmt::Display for ConvRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConvRule::I => "I",
            ConvRule::II => "II",
            ConvRule::III => "III",
        })
    }
}

/// One rule application; `before` and `after` are the subterms at
/// `position`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvStep {
    pub rule: ConvRule,
    pub position: Path,
    pub before: UTerm,
    pub after: UTerm,
}

impl ConvStep {
    /// The step that undoes this one: II and III are each other's mirror,
    /// Rule I mirrors itself.
    pub fn mirror(&self) -> ConvStep {
        let rule = match self.rule {
            ConvRule::I => ConvRule::I,
            ConvRule::II => ConvRule::III,
            ConvRule::III => ConvRule::II,
        };
        ConvStep {
            rule,
            position: self.position.clone(),
            before: self.after.clone(),
            after: self.before.clone(),
        }
    }

    pub fn line(&self, n: usize) -> String {
        format!(
            "step {n}: {} @ {} : {} ~> {}",
            self.rule,
            crate::reducer::render_path(&self.position),
            print_with_numerals(&self.before),
            print_with_numerals(&self.after)
        )
    }
}

/// How a step is applied at a position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conversion {
    /// Rule I: rename the binder at the position to the given name.
    Rename(Name),
    /// Rule II.
    Contract,
    /// Rule III: the subterm must be `body[arg/var]`; it becomes
    /// `(\var. body) arg`.
    Expand { var: Name, body: UTerm, arg: UTerm },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChurchError {
    #[error("no subterm at position {0:?}")]
    BadPosition(Path),
    #[error("no redex at position {0:?}")]
    NotARedex(Path),
    #[error("expansion does not reproduce the subterm at {0:?}")]
    IllFormedExpansion(Path),
    #[error("cannot rename at {0:?}: not an abstraction, or the new name occurs free in its body")]
    BadRename(Path),
    #[error("no normal form within {max_steps} steps")]
    Timeout {
        max_steps: usize,
        partial: Vec<ConvStep>,
        last: UTerm,
    },
    #[error("replay mismatch at step {0}")]
    ReplayMismatch(usize),
}

/// Contracts `t` when it is a redex.
pub fn contract(t: &UTerm) -> Option<UTerm> {
    match t {
        UTerm::App(f, a) => match &**f {
            UTerm::Lam(x, m) => Some(m.subst(x, a)),
            _ => None,
        },
        _ => None,
    }
}

/// Redex positions in leftmost-outermost order.
pub fn redexes(t: &UTerm) -> Vec<Path> {
    fn go(t: &UTerm, path: &mut Path, out: &mut Vec<Path>) {
        if contract(t).is_some() {
            out.push(path.clone());
        }
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Applies one conversion at `position`.
pub fn step(
    t: &UTerm,
    position: &[usize],
    conv: &Conversion,
) -> Result<(UTerm, ConvStep), ChurchError> {
    let pos = position.to_vec();
    let before = t
        .subterm_at(position)
        .ok_or_else(|| ChurchError::BadPosition(pos.clone()))?
        .clone();
    let (rule, after) = match conv {
        Conversion::Contract => (
            ConvRule::II,
            contract(&before).ok_or_else(|| ChurchError::NotARedex(pos.clone()))?,
        ),
        Conversion::Rename(y) => match &before {
            UTerm::Lam(x, b) if x == y || !b.free_vars().contains(y) => (
                ConvRule::I,
                UTerm::lam(y.clone(), b.subst(x, &UTerm::Var(y.clone()))),
            ),
            _ => return Err(ChurchError::BadRename(pos)),
        },
        Conversion::Expand { var, body, arg } => {
            if !body.subst(var, arg).alpha_eq(&before) {
                return Err(ChurchError::IllFormedExpansion(pos));
            }
            (
                ConvRule::III,
                UTerm::app(UTerm::lam(var.clone(), body.clone()), arg.clone()),
            )
        }
    };
    let next = t
        .replace_at(position, after.clone())
        .expect("position checked");
    Ok((
        next,
        ConvStep {
            rule,
            position: pos,
            before,
            after,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Leftmost-outermost.
    #[default]
    NormalOrder,
    /// Leftmost-innermost.
    Applicative,
}

fn innermost(t: &UTerm, path: &mut Path) -> bool {
    for (i, c) in t.children().into_iter().enumerate() {
        path.push(i);
        if innermost(c, path) {
            return true;
        }
        path.pop();
    }
    contract(t).is_some()
}

fn choose(t: &UTerm, strategy: Strategy) -> Option<Path> {
    match strategy {
        Strategy::NormalOrder => redexes(t).into_iter().next(),
        Strategy::Applicative => {
            let mut path = Vec::new();
            innermost(t, &mut path).then_some(path)
        }
    }
}

/// Reduces until no Rule II redex remains, recording every contraction.
pub fn normalize(
    t: &UTerm,
    max_steps: usize,
    strategy: Strategy,
) -> Result<(UTerm, Vec<ConvStep>), ChurchError> {
    let mut cur = t.clone();
    let mut steps = Vec::new();
    while let Some(pos) = choose(&cur, strategy) {
        if steps.len() >= max_steps {
            return Err(ChurchError::Timeout {
                max_steps,
                partial: steps,
                last: cur,
            });
        }
        let (next, s) =
            step(&cur, &pos, &Conversion::Contract).expect("chosen position is a redex");
        steps.push(s);
        cur = next;
    }
    Ok((cur, steps))
}

/// Re-applies `steps` to `initial`, comparing subterms up to alpha.
pub fn replay(initial: &UTerm, steps: &[ConvStep]) -> Result<UTerm, ChurchError> {
    let mut cur = initial.clone();
    for (i, s) in steps.iter().enumerate() {
        let here = cur
            .subterm_at(&s.position)
            .ok_or(ChurchError::ReplayMismatch(i))?;
        let ok = here.alpha_eq(&s.before)
            && match s.rule {
                ConvRule::I => {
                    matches!((&s.before, &s.after), (UTerm::Lam(..), UTerm::Lam(..)))
                        && s.before.alpha_eq(&s.after)
                }
                ConvRule::II => contract(&s.before).is_some_and(|r| r.alpha_eq(&s.after)),
                ConvRule::III => contract(&s.after).is_some_and(|r| r.alpha_eq(&s.before)),
            };
        if !ok {
            return Err(ChurchError::ReplayMismatch(i));
        }
        cur = cur
            .replace_at(&s.position, s.after.clone())
            .expect("position checked");
    }
    Ok(cur)
}

/// Outcome of a bounded convertibility search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Convertible {
    /// A conversion sequence from the first term to (a term alpha-equal to)
    /// the second: contractions forward, then mirrored contractions of the
    /// second term as expansions, then Rule I renamings where possible.
    Yes(Vec<ConvStep>),
    Unknown,
}

/// Breadth-first search over Rule II reducts of both terms, exploring at
/// most `budget` terms per side. Never answers `Yes` wrongly; `Unknown`
/// means no common reduct was found within the budget.
pub fn convertible(a: &UTerm, b: &UTerm, budget: usize) -> Convertible {
    // For each side: alpha key -> (term, parent key, step from parent)
    type Seen<K> = HashMap<K, (UTerm, Option<(K, ConvStep)>)>;
    fn explore<K: Eq + std::hash::Hash + Clone>(
        start: &UTerm,
        budget: usize,
        key: &impl Fn(&UTerm) -> K,
    ) -> Seen<K> {
        let mut seen: Seen<K> = HashMap::new();
        let mut queue = VecDeque::from([start.clone()]);
        seen.insert(key(start), (start.clone(), None));
        while let Some(t) = queue.pop_front() {
            if seen.len() >= budget {
                break;
            }
            let k = key(&t);
            for pos in redexes(&t) {
                let (next, s) = step(&t, &pos, &Conversion::Contract).expect("redex");
                let nk = key(&next);
                if seen.contains_key(&nk) {
                    continue;
                }
                seen.insert(nk, (next.clone(), Some((k.clone(), s))));
                queue.push_back(next);
            }
        }
        seen
    }
    fn path_to<K: Eq + std::hash::Hash + Clone>(seen: &Seen<K>, mut k: K) -> Vec<ConvStep> {
        let mut out = Vec::new();
        while let Some((_, Some((parent, s)))) = seen.get(&k) {
            out.push(s.clone());
            k = parent.clone();
        }
        out.reverse();
        out
    }

    let key = |t: &UTerm| t.canonical();
    let left = explore(a, budget.max(1), &key);
    let right = explore(b, budget.max(1), &key);
    let Some(meet) = left.keys().find(|k| right.contains_key(*k)).cloned() else {
        return Convertible::Unknown;
    };
    let mut steps = path_to(&left, meet.clone());
    // The meeting term as reached from `a` may differ from the one reached
    // from `b` by bound names; mirrored steps are checked up to alpha.
    steps.extend(path_to(&right, meet).into_iter().rev().map(|s| s.mirror()));
    if let Ok(end) = replay(a, &steps) {
        steps.extend(rename_towards(&end, b));
    }
    Convertible::Yes(steps)
}

/// Rule I steps turning `from` into `to` syntactically, for alpha-equal
/// terms; stops early when a renaming would capture.
fn rename_towards(from: &UTerm, to: &UTerm) -> Vec<ConvStep> {
    fn lam_positions(t: &UTerm, path: &mut Path, out: &mut Vec<Path>) {
        if let UTerm::Lam(..) = t {
            out.push(path.clone());
        }
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            lam_positions(c, path, out);
            path.pop();
        }
    }
    let mut positions = Vec::new();
    lam_positions(to, &mut Vec::new(), &mut positions);
    let mut cur = from.clone();
    let mut out = Vec::new();
    for p in positions {
        let (Some(UTerm::Lam(x, _)), Some(UTerm::Lam(y, _))) =
            (cur.subterm_at(&p), to.subterm_at(&p))
        else {
            break;
        };
        if x == y {
            continue;
        }
        match step(&cur, &p, &Conversion::Rename(y.clone())) {
            Ok((next, s)) => {
                out.push(s);
                cur = next;
            }
            Err(_) => break,
        }
    }
    out
}
