//! Attack/defense games over checked judgements.
//!
//! The Proponent asserts the thesis formula and holds its proof term as the
//! *residual*. Each Opponent attack is the elimination matching the head
//! connective of the standing assertion; the Proponent answers by applying
//! that elimination to the residual and normalizing, so every defense comes
//! with the beta-steps that produce it.
//!
//! | standing     | Opponent attack | Proponent residual after the answer |
//! |--------------|-----------------|-------------------------------------|
//! | `A & B`      | `L?` / `R?`     | `fst(r)` / `snd(r)`                 |
//! | `A | B`      | `?`             | the injected proof; `r` picks side  |
//! | `A -> B`     | `A ?` (concede) | `app(r, o)`                         |
//! | `all x:D. P` | `c:D ?`         | `extr(r, c)`                        |
//! | `some x:D. P`| `?`             | the proof inside `eps(x. g, s)`     |
//! | `Id{D}(a,b)` | `?`             | the evidence is revealed            |
//!
//! The Opponent never picks the disjunct or the witness of a Proponent
//! assertion; those come out of the residual. The Opponent always picks the
//! witness of a universal attack.
//!
//! Hypotheses of the thesis and antecedents conceded through `A ?` are the
//! Opponent's concessions. When the residual is stuck on a concession (its
//! head is an elimination applied to a concession variable), the Proponent
//! counterattacks that concession with the same elimination and the
//! Opponent answers: a forced concession for `&`, `->`, `all` and `Id`, a
//! choice of disjunct or witness for `|` and `some`. The answer is
//! substituted into the residual and normalized again.
//!
//! The Proponent wins when the standing assertion is atomic and the residual
//! is a concession of that very formula, when the evidence of an identity is
//! revealed, or when the Opponent turns out to have conceded `_|_`.

mod play;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checker::{self, CheckError, Context, Entry, Judgement};
use crate::reducer::{self, ReduceError, RewriteTrace};
use crate::syntax::{
    AlphaEq, Evidence, Formula, Individual, Name, Path, ProofTerm, Sort, TermKind,
};
use crate::text::{print_evidence, print_formula, print_term, Notation};

pub use play::{
    explore, play_random, play_script, played_json, GameTree, Leaf, LeafCounts, ScriptError,
    Transcript, TreeEdge,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Actor {
    Proponent,
    Opponent,
}

impl Actor {
    pub fn letter(self) -> char {
        match self {
            Actor::Proponent => 'P',
            Actor::Opponent => 'O',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// What a move is aimed at.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Target {
    /// The Proponent's standing assertion.
    Standing,
    /// An Opponent concession, by name.
    Concession(Name),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Payload {
    Proof(ProofTerm),
    Disjunct {
        side: Side,
        proof: ProofTerm,
    },
    Witness {
        witness: Individual,
        proof: ProofTerm,
    },
    Evidence(Evidence),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MoveKind {
    AttackAndL,
    AttackAndR,
    AttackOr,
    /// The argument conceded or asserted for the antecedent. An Opponent
    /// attack offered as `None` concedes the antecedent under a fresh name.
    AttackImp(Option<ProofTerm>),
    AttackAll(Individual),
    AttackEx,
    AttackId,
    Defend {
        claim: Formula,
        payload: Payload,
    },
    Concede {
        name: Name,
        formula: Formula,
    },
    Resign,
}

impl MoveKind {
    pub fn name(&self) -> &'static str {
        match self {
            MoveKind::AttackAndL => "AttackAndL",
            MoveKind::AttackAndR => "AttackAndR",
            MoveKind::AttackOr => "AttackOr",
            MoveKind::AttackImp(_) => "AttackImp",
            MoveKind::AttackAll(_) => "AttackAll",
            MoveKind::AttackEx => "AttackEx",
            MoveKind::AttackId => "AttackId",
            MoveKind::Defend { .. } => "Defend",
            MoveKind::Concede { .. } => "Concede",
            MoveKind::Resign => "Resign",
        }
    }

    pub fn is_attack(&self) -> bool {
        !matches!(
            self,
            MoveKind::Defend { .. } | MoveKind::Concede { .. } | MoveKind::Resign
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Move {
    pub actor: Actor,
    pub kind: MoveKind,
    pub target: Target,
}

impl Move {
    fn opponent(kind: MoveKind) -> Self {
        Move {
            actor: Actor::Opponent,
            kind,
            target: Target::Standing,
        }
    }

    /// Short text for the move, also used as its wire label.
    pub fn label(&self, sig_sort: impl Fn(&Individual) -> Option<Sort>) -> String {
        let f = |x: &Formula| print_formula(x, Notation::Ascii);
        let t = |x: &ProofTerm| print_term(x, Notation::Ascii);
        let ind = |w: &Individual| match sig_sort(w) {
            Some(s) => format!("{w}:{s}"),
            None => w.to_string(),
        };
        match &self.kind {
            MoveKind::AttackAndL => "L?".into(),
            MoveKind::AttackAndR => "R?".into(),
            MoveKind::AttackOr | MoveKind::AttackEx | MoveKind::AttackId => "?".into(),
            MoveKind::AttackImp(None) => "?".into(),
            MoveKind::AttackImp(Some(a)) => format!("{} ?", t(a)),
            MoveKind::AttackAll(w) => format!("{} ?", ind(w)),
            MoveKind::Defend { claim, payload } => match payload {
                Payload::Proof(p) => format!("{} by {}", f(claim), t(p)),
                Payload::Disjunct {
                    side: Side::Left,
                    proof,
                } => format!("inl: {} by {}", f(claim), t(proof)),
                Payload::Disjunct {
                    side: Side::Right,
                    proof,
                } => format!("inr: {} by {}", f(claim), t(proof)),
                Payload::Witness { witness, proof } => {
                    format!("{}, {} by {}", ind(witness), f(claim), t(proof))
                }
                Payload::Evidence(e) => format!("{} by evidence {}", f(claim), print_evidence(e)),
            },
            MoveKind::Concede { name, formula } => format!("concede {name} : {}", f(formula)),
            MoveKind::Resign => "resign".into(),
        }
    }
}

/// Why the residual changed: `trace` starts from `prior` wrapped in a
/// destructor (`site == None`) or from `prior` with the subterm at `site`
/// replaced, and ends at `result`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Justification {
    pub prior: ProofTerm,
    pub site: Option<Path>,
    pub trace: RewriteTrace,
    pub result: ProofTerm,
}

impl Justification {
    /// Checks the relation between `prior`, the trace and `result`,
    /// replaying every step.
    pub fn verify(&self) -> Result<(), String> {
        let init = &self.trace.initial;
        let linked = match &self.site {
            None => init
                .children()
                .first()
                .is_some_and(|c| c.alpha_eq(&self.prior)),
            Some(site) => match self.prior.subterm_at(site) {
                Some(old) => init
                    .replace_at(site, old.clone())
                    .is_some_and(|t| t.alpha_eq(&self.prior)),
                None => false,
            },
        };
        if !linked {
            return Err(format!(
                "trace does not start from the prior residual `{}`",
                self.prior
            ));
        }
        let end = reducer::replay(&self.trace).map_err(|e| e.to_string())?;
        if !end.alpha_eq(&self.result) {
            return Err(format!("trace ends at `{end}`, not at `{}`", self.result));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Played {
    pub mv: Move,
    pub justification: Option<Justification>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Open,
    ProponentWins,
    Stalled(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Open => f.write_str("Open"),
            Status::ProponentWins => f.write_str("ProponentWins"),
            Status::Stalled(r) => write!(f, "Stalled({r})"),
        }
    }
}

/// An Opponent decision the engine is waiting for: which disjunct of, or
/// which witness for, a concession the Proponent has attacked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pending {
    pub concession: Name,
    pub formula: Formula,
    /// Position of the concession variable in the residual.
    pub site: Path,
    /// Name the Opponent's answer will be conceded under.
    pub answer_name: Name,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DialogueError {
    #[error("thesis is not valid: {0}")]
    NotValid(CheckError),
    #[error("thesis does not normalize: {0}")]
    NoNormalForm(ReduceError),
    #[error("illegal move `{label}`; legal: [{}]", .legal.join(", "))]
    IllegalMove { label: String, legal: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DialogueState {
    pub thesis: Judgement,
    /// Thesis context plus everything conceded or introduced since.
    pub ctx: Context,
    pub concessions: Vec<(Name, Formula)>,
    pub standing: Formula,
    pub residual: ProofTerm,
    /// Increases every time the standing assertion is replaced.
    pub standing_id: usize,
    /// Normalization of the thesis term.
    pub opening: RewriteTrace,
    pub history: Vec<Played>,
    pub turn: Actor,
    pub status: Status,
    pub pending: Option<Pending>,
    /// An Opponent attack whose answer needs a canonical residual.
    awaiting: Option<MoveKind>,
    attacked: Vec<(usize, MoveKind)>,
    max_steps: usize,
}

/// Starts a game on a judgement; the thesis is checked and its term
/// normalized.
pub fn open_game(j: &Judgement) -> Result<DialogueState, DialogueError> {
    open_game_with(j, crate::max_steps_from_env(crate::DEFAULT_MAX_STEPS))
}

pub fn open_game_with(j: &Judgement, max_steps: usize) -> Result<DialogueState, DialogueError> {
    let j = checker::check(&j.ctx, &j.term, &j.formula).map_err(DialogueError::NotValid)?;
    let (residual, opening) =
        reducer::normalize(&j, max_steps).map_err(DialogueError::NoNormalForm)?;
    let concessions = j
        .ctx
        .entries()
        .iter()
        .filter_map(|e| match e {
            Entry::Proof(n, f) => Some((n.clone(), f.clone())),
            _ => None,
        })
        .collect();
    let mut s = DialogueState {
        ctx: j.ctx.clone(),
        concessions,
        standing: j.formula.clone(),
        residual,
        standing_id: 0,
        opening,
        history: Vec::new(),
        turn: Actor::Opponent,
        status: Status::Open,
        pending: None,
        awaiting: None,
        attacked: Vec::new(),
        max_steps,
        thesis: j,
    };
    s.settle();
    Ok(s)
}

/// Sort of a witness as known to the game context.
fn witness_sort(ctx: &Context, w: &Individual) -> Option<Sort> {
    ctx.sort_of(w)
}

impl DialogueState {
    pub fn is_over(&self) -> bool {
        self.status != Status::Open
    }

    /// Label of a move in this state.
    pub fn label(&self, m: &Move) -> String {
        match (&m.kind, m.actor) {
            (MoveKind::AttackImp(None), Actor::Opponent) => match &self.standing {
                Formula::Imp(a, _) => format!("{} ?", print_formula(a, Notation::Ascii)),
                _ => "?".into(),
            },
            (
                MoveKind::Defend {
                    claim,
                    payload: Payload::Disjunct { side, .. },
                },
                Actor::Opponent,
            ) => {
                let s = if *side == Side::Left { "inl" } else { "inr" };
                format!("{s}: {}", print_formula(claim, Notation::Ascii))
            }
            (
                MoveKind::Defend {
                    claim,
                    payload: Payload::Witness { witness, .. },
                },
                Actor::Opponent,
            ) => {
                let sort = self.witness_sort_or_pending(witness);
                format!(
                    "{witness}:{sort}, {}",
                    print_formula(claim, Notation::Ascii)
                )
            }
            (MoveKind::AttackAll(w), Actor::Opponent) => {
                let sort = match &self.standing {
                    Formula::Forall { sort, .. } => sort.clone(),
                    _ => self.witness_sort_or_pending(w),
                };
                format!("{w}:{sort} ?")
            }
            _ => m.label(|w| witness_sort(&self.ctx, w)),
        }
    }

    fn witness_sort_or_pending(&self, w: &Individual) -> Sort {
        if let Some(s) = witness_sort(&self.ctx, w) {
            return s;
        }
        match self.pending.as_ref().map(|p| &p.formula) {
            Some(Formula::Exists { sort, .. }) => sort.clone(),
            _ => Sort::new("?"),
        }
    }

    /// The Opponent's legal moves: attacks on the standing assertion, or the
    /// answers to a pending counterattack.
    pub fn legal_moves(&self) -> Vec<Move> {
        if self.is_over() || self.turn != Actor::Opponent {
            return Vec::new();
        }
        if let Some(p) = &self.pending {
            return self.pending_answers(p);
        }
        let kinds = match &self.standing {
            Formula::And(..) => vec![MoveKind::AttackAndL, MoveKind::AttackAndR],
            Formula::Or(..) => vec![MoveKind::AttackOr],
            Formula::Imp(..) => vec![MoveKind::AttackImp(None)],
            Formula::Forall { sort, .. } => self
                .witness_options(sort)
                .into_iter()
                .map(MoveKind::AttackAll)
                .collect(),
            Formula::Exists { .. } => vec![MoveKind::AttackEx],
            Formula::Id { .. } => vec![MoveKind::AttackId],
            Formula::Atom { .. } | Formula::Bottom => vec![],
        };
        kinds
            .into_iter()
            .filter(|k| !self.attacked.contains(&(self.standing_id, k.clone())))
            .map(Move::opponent)
            .collect()
    }

    /// Attacks on the standing assertion; empty while a counterattack on a
    /// concession awaits the Opponent's answer.
    pub fn legal_attacks(&self) -> Vec<Move> {
        if self.pending.is_some() {
            return Vec::new();
        }
        self.legal_moves()
    }

    pub fn legal_labels(&self) -> Vec<String> {
        self.legal_moves().iter().map(|m| self.label(m)).collect()
    }

    /// Finds the legal move with the given label.
    pub fn move_by_label(&self, label: &str) -> Result<Move, DialogueError> {
        let legal = self.legal_moves();
        let label = label.trim();
        legal
            .iter()
            .find(|m| self.label(m) == label)
            .cloned()
            .ok_or_else(|| DialogueError::IllegalMove {
                label: label.to_string(),
                legal: legal.iter().map(|m| self.label(m)).collect(),
            })
    }

    /// Declared constants of the sort, individuals of the sort already in
    /// play, and one fresh individual from the reserved pool.
    fn witness_options(&self, sort: &Sort) -> Vec<Individual> {
        let sig = self.ctx.signature();
        let mut out: Vec<Individual> = sig
            .constants_of(sort)
            .map(|c| Individual::constant(c.clone(), sort.clone()))
            .collect();
        let mut seen = BTreeSet::new();
        for e in self.ctx.entries() {
            if let Entry::Ind(n, s) = e {
                if s == sort && seen.insert(n.clone()) {
                    out.push(Individual::Var(n.clone()));
                }
            }
        }
        out.push(Individual::Var(self.fresh_pool_name(sort)));
        out
    }

    fn fresh_pool_name(&self, sort: &Sort) -> Name {
        let used = self.ctx.individuals_in_use();
        (1..)
            .map(|k| format!("_{sort}{k}"))
            .find(|n| !used.contains(n))
            .expect("unbounded")
    }

    fn fresh_concession_name(&self, prefix: &str) -> Name {
        let used = self.ctx.proof_names();
        (1..)
            .map(|k| format!("{prefix}{k}"))
            .find(|n| !used.contains(n))
            .expect("unbounded")
    }

    fn pending_answers(&self, p: &Pending) -> Vec<Move> {
        let target = Target::Concession(p.concession.clone());
        let proof = ProofTerm::Var(p.answer_name.clone());
        let defend = |claim: Formula, payload: Payload| Move {
            actor: Actor::Opponent,
            kind: MoveKind::Defend { claim, payload },
            target: target.clone(),
        };
        match &p.formula {
            Formula::Or(a, b) => vec![
                defend(
                    (**a).clone(),
                    Payload::Disjunct {
                        side: Side::Left,
                        proof: proof.clone(),
                    },
                ),
                defend(
                    (**b).clone(),
                    Payload::Disjunct {
                        side: Side::Right,
                        proof,
                    },
                ),
            ],
            Formula::Exists { sort, .. } => self
                .witness_options(sort)
                .into_iter()
                .map(|w| {
                    let claim = p
                        .formula
                        .instantiate(&w, Some(sort))
                        .expect("witness has the right sort");
                    defend(
                        claim,
                        Payload::Witness {
                            witness: w,
                            proof: proof.clone(),
                        },
                    )
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Applies an Opponent move, then lets the Proponent respond.
    pub fn apply_move(&self, m: &Move) -> Result<DialogueState, DialogueError> {
        let illegal = || DialogueError::IllegalMove {
            label: self.label(m),
            legal: self.legal_labels(),
        };
        if self.is_over() || m.actor != Actor::Opponent {
            return Err(illegal());
        }
        let mut s = self.clone();
        if let Some(p) = self.pending.clone() {
            if !self.pending_answers(&p).contains(m) {
                return Err(illegal());
            }
            s.answer_pending(&p, m);
        } else {
            let legal = self.legal_moves();
            let accepted = legal.contains(m) || self.acceptable_imp_argument(m);
            if !accepted {
                return Err(illegal());
            }
            s.attack(m);
        }
        s.settle();
        Ok(s)
    }

    /// `AttackImp(Some(t))` is accepted when `t` proves the antecedent.
    fn acceptable_imp_argument(&self, m: &Move) -> bool {
        match (&m.kind, &self.standing) {
            (MoveKind::AttackImp(Some(t)), Formula::Imp(a, _)) => {
                !self
                    .attacked
                    .contains(&(self.standing_id, MoveKind::AttackImp(None)))
                    && checker::check(&self.ctx, t, a).is_ok()
            }
            _ => false,
        }
    }

    pub fn apply_label(&self, label: &str) -> Result<DialogueState, DialogueError> {
        let m = self.move_by_label(label)?;
        self.apply_move(&m)
    }

    fn push(
        &mut self,
        actor: Actor,
        kind: MoveKind,
        target: Target,
        justification: Option<Justification>,
    ) {
        self.history.push(Played {
            mv: Move {
                actor,
                kind,
                target,
            },
            justification,
        });
    }

    fn stall(&mut self, reason: impl Into<String>) {
        self.status = Status::Stalled(reason.into());
    }

    fn normalize(&mut self, t: ProofTerm) -> Option<(ProofTerm, RewriteTrace)> {
        match reducer::normalize_term(&t, self.max_steps) {
            Ok(r) => Some(r),
            Err(e) => {
                self.stall(format!("residual does not normalize: {e}"));
                None
            }
        }
    }

    /// Replaces the standing assertion after a Proponent defense.
    fn defend(&mut self, claim: Formula, result: ProofTerm, payload: Payload, just: Justification) {
        self.push(
            Actor::Proponent,
            MoveKind::Defend {
                claim: claim.clone(),
                payload,
            },
            Target::Standing,
            Some(just),
        );
        self.standing = claim;
        self.residual = result;
        self.standing_id += 1;
        self.check_residual();
    }

    fn check_residual(&mut self) {
        if let Err(e) = checker::check(&self.ctx, &self.residual, &self.standing) {
            self.stall(format!(
                "residual `{}` does not prove `{}`: {e}",
                self.residual, self.standing
            ));
        }
    }

    fn concede(&mut self, name: Name, formula: Formula) {
        self.ctx.push(Entry::Proof(name.clone(), formula.clone()));
        self.concessions.push((name, formula));
    }

    fn introduce(&mut self, w: &Individual, sort: &Sort) {
        if let Individual::Var(x) = w {
            if self.ctx.ind_sort(x).is_none() {
                self.ctx.push(Entry::Ind(x.clone(), sort.clone()));
            }
        }
    }

    fn attack(&mut self, m: &Move) {
        let key = match &m.kind {
            MoveKind::AttackImp(_) => MoveKind::AttackImp(None),
            k => k.clone(),
        };
        self.attacked.push((self.standing_id, key));
        let mut recorded = m.kind.clone();
        match (&m.kind, self.standing.clone()) {
            (MoveKind::AttackAndL | MoveKind::AttackAndR, Formula::And(l, r)) => {
                self.push(Actor::Opponent, recorded, Target::Standing, None);
                let left = m.kind == MoveKind::AttackAndL;
                let wrapped = if left {
                    ProofTerm::fst(self.residual.clone())
                } else {
                    ProofTerm::snd(self.residual.clone())
                };
                let claim = if left { *l } else { *r };
                self.respond_with(wrapped, claim, Payload::Proof);
            }
            (MoveKind::AttackImp(arg), Formula::Imp(a, b)) => {
                let arg = match arg {
                    Some(t) => t.clone(),
                    None => {
                        let o = self.fresh_concession_name("o");
                        self.concede(o.clone(), (*a).clone());
                        ProofTerm::Var(o)
                    }
                };
                recorded = MoveKind::AttackImp(Some(arg.clone()));
                self.push(Actor::Opponent, recorded, Target::Standing, None);
                self.respond_with(
                    ProofTerm::app(self.residual.clone(), arg),
                    *b,
                    Payload::Proof,
                );
            }
            (MoveKind::AttackAll(w), f @ Formula::Forall { .. }) => {
                let Formula::Forall { sort, .. } = &f else {
                    unreachable!()
                };
                self.introduce(w, sort);
                self.push(Actor::Opponent, recorded, Target::Standing, None);
                let claim = f.instantiate(w, Some(sort)).expect("legal witness");
                self.respond_with(
                    ProofTerm::extr(self.residual.clone(), w.clone()),
                    claim,
                    Payload::Proof,
                );
            }
            (MoveKind::AttackOr | MoveKind::AttackEx | MoveKind::AttackId, _) => {
                self.push(Actor::Opponent, recorded, Target::Standing, None);
                self.awaiting = Some(m.kind.clone());
            }
            _ => self.stall(format!(
                "attack {} does not fit `{}`",
                m.kind.name(),
                self.standing
            )),
        }
    }

    fn respond_with(
        &mut self,
        wrapped: ProofTerm,
        claim: Formula,
        payload: fn(ProofTerm) -> Payload,
    ) {
        let prior = self.residual.clone();
        let Some((result, trace)) = self.normalize(wrapped) else {
            return;
        };
        let just = Justification {
            prior,
            site: None,
            trace,
            result: result.clone(),
        };
        self.defend(claim, result.clone(), payload(result), just);
    }

    /// Answers an attack that needs the residual to be an introduction.
    fn answer_canonical(&mut self, kind: &MoveKind) {
        let r = self.residual.clone();
        match (kind, r.strip_ann(), self.standing.clone()) {
            (MoveKind::AttackOr, ProofTerm::Inl(_) | ProofTerm::Inr(_), Formula::Or(a, b)) => {
                let (x, y) = ("x".to_string(), "y".to_string());
                let wrapped = ProofTerm::case(
                    r.clone(),
                    &x,
                    ProofTerm::Var(x.clone()),
                    &y,
                    ProofTerm::Var(y.clone()),
                );
                let left = matches!(r.strip_ann(), ProofTerm::Inl(_));
                let claim = if left { *a } else { *b };
                let side = if left { Side::Left } else { Side::Right };
                let Some((result, trace)) = self.normalize(wrapped) else {
                    return;
                };
                let just = Justification {
                    prior: r,
                    site: None,
                    trace,
                    result: result.clone(),
                };
                self.defend(
                    claim,
                    result.clone(),
                    Payload::Disjunct {
                        side,
                        proof: result,
                    },
                    just,
                );
            }
            (MoveKind::AttackEx, ProofTerm::ExPair { witness, .. }, f @ Formula::Exists { .. }) => {
                let witness = witness.clone();
                let claim = match f.instantiate(&witness, None) {
                    Ok(c) => c,
                    Err(e) => return self.stall(e.to_string()),
                };
                let h = "h".to_string();
                let wrapped = ProofTerm::inst(r.clone(), &h, "t", ProofTerm::Var(h.clone()));
                let Some((result, trace)) = self.normalize(wrapped) else {
                    return;
                };
                let just = Justification {
                    prior: r,
                    site: None,
                    trace,
                    result: result.clone(),
                };
                self.defend(
                    claim,
                    result.clone(),
                    Payload::Witness {
                        witness,
                        proof: result,
                    },
                    just,
                );
            }
            (
                MoveKind::AttackId,
                ProofTerm::IdIntro { evidence, lhs, rhs },
                f @ Formula::Id { .. },
            ) => {
                let evidence = evidence.clone();
                let t = "t".to_string();
                let body = ProofTerm::IdIntro {
                    evidence: Evidence::Var(t.clone()),
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                };
                let wrapped = ProofTerm::rewr(r.clone(), &t, body);
                let Some((result, trace)) = self.normalize(wrapped) else {
                    return;
                };
                let just = Justification {
                    prior: r,
                    site: None,
                    trace,
                    result: result.clone(),
                };
                self.push(
                    Actor::Proponent,
                    MoveKind::Defend {
                        claim: f.clone(),
                        payload: Payload::Evidence(evidence),
                    },
                    Target::Standing,
                    Some(just),
                );
                self.residual = result;
                self.standing_id += 1;
                self.check_residual();
                if self.status == Status::Open {
                    self.status = Status::ProponentWins;
                }
            }
            _ => self.stall(format!("cannot answer {} with residual `{r}`", kind.name())),
        }
    }

    /// Runs automatic Proponent play until the Opponent has to move or the
    /// game is over.
    fn settle(&mut self) {
        loop {
            if self.is_over() || self.pending.is_some() {
                break;
            }
            if let Some(kind) = self.awaiting.clone() {
                if self.residual.is_canonical() {
                    self.awaiting = None;
                    self.answer_canonical(&kind);
                    continue;
                }
                if !self.counterattack() {
                    break;
                }
                continue;
            }
            if !self.standing.is_atomic() {
                break;
            }
            if let ProofTerm::Var(v) = self.residual.strip_ann() {
                let conceded = self
                    .concessions
                    .iter()
                    .any(|(n, f)| n == v && f.alpha_eq(&self.standing));
                if conceded {
                    self.status = Status::ProponentWins;
                } else {
                    self.stall(format!("`{v}` is not a concession of `{}`", self.standing));
                }
                break;
            }
            if !self.counterattack() {
                break;
            }
        }
        self.turn = if self.is_over() {
            self.turn
        } else {
            Actor::Opponent
        };
    }

    /// Attacks the concession the residual is stuck on. Returns false when
    /// the game stalls.
    fn counterattack(&mut self) -> bool {
        let Some((site, v)) = stuck_site(&self.residual) else {
            self.stall(format!(
                "residual `{}` is not stuck on a concession",
                self.residual
            ));
            return false;
        };
        let Some(Entry::Proof(_, conceded)) = self.ctx.lookup_proof(&v).cloned() else {
            self.stall(format!("`{v}` is not a concession"));
            return false;
        };
        let target = Target::Concession(v.clone());
        let elim = self
            .residual
            .subterm_at(&site)
            .expect("site from traversal")
            .clone();
        let var_site = if elim.strip_ann().kind() == TermKind::Var {
            site.clone()
        } else {
            [site.clone(), vec![0]].concat()
        };
        match (elim.kind(), &conceded) {
            (TermKind::Fst | TermKind::Snd, Formula::And(l, r)) => {
                let (kind, part) = if elim.kind() == TermKind::Fst {
                    (MoveKind::AttackAndL, l)
                } else {
                    (MoveKind::AttackAndR, r)
                };
                self.push(Actor::Proponent, kind, target, None);
                self.forced_concession(site, (**part).clone());
            }
            (TermKind::App, Formula::Imp(_, b)) => {
                let ProofTerm::App(_, arg) = &elim else {
                    unreachable!()
                };
                self.push(
                    Actor::Proponent,
                    MoveKind::AttackImp(Some((**arg).clone())),
                    target,
                    None,
                );
                self.forced_concession(site, (**b).clone());
            }
            (TermKind::Extr, f @ Formula::Forall { .. }) => {
                let ProofTerm::Extr(_, w) = &elim else {
                    unreachable!()
                };
                let claim = match f.instantiate(w, None) {
                    Ok(c) => c,
                    Err(e) => {
                        self.stall(e.to_string());
                        return false;
                    }
                };
                self.push(
                    Actor::Proponent,
                    MoveKind::AttackAll(w.clone()),
                    target,
                    None,
                );
                self.forced_concession(site, claim);
            }
            (TermKind::Case | TermKind::Var, Formula::Or(..))
            | (TermKind::Inst | TermKind::Var, Formula::Exists { .. }) => {
                let kind = if matches!(conceded, Formula::Or(..)) {
                    MoveKind::AttackOr
                } else {
                    MoveKind::AttackEx
                };
                self.push(Actor::Proponent, kind, target, None);
                let answer_name = self.fresh_concession_name("o");
                self.pending = Some(Pending {
                    concession: v,
                    formula: conceded,
                    site: var_site,
                    answer_name,
                });
            }
            (TermKind::Rewr | TermKind::Var, Formula::Id { sort, lhs, rhs }) => {
                self.push(Actor::Proponent, MoveKind::AttackId, target.clone(), None);
                let e = self.fresh_concession_name("e");
                self.ctx.push(Entry::Eq {
                    name: e.clone(),
                    sort: sort.clone(),
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                });
                let evidence = Evidence::Var(e.clone());
                self.push(
                    Actor::Opponent,
                    MoveKind::Defend {
                        claim: conceded.clone(),
                        payload: Payload::Evidence(evidence.clone()),
                    },
                    target,
                    None,
                );
                let plug = ProofTerm::IdIntro {
                    evidence,
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                };
                self.replace_and_normalize(var_site, plug);
            }
            (TermKind::Abort, Formula::Bottom) => {
                self.status = Status::ProponentWins;
                return false;
            }
            (kind, f) => {
                self.stall(format!("no counterattack of {kind:?} on `{v} : {f}`"));
                return false;
            }
        }
        !self.is_over()
    }

    fn forced_concession(&mut self, site: Path, formula: Formula) {
        let o = self.fresh_concession_name("o");
        let target = match &self.history.last() {
            Some(p) => p.mv.target.clone(),
            None => Target::Standing,
        };
        self.history.push(Played {
            mv: Move {
                actor: Actor::Opponent,
                kind: MoveKind::Concede {
                    name: o.clone(),
                    formula: formula.clone(),
                },
                target,
            },
            justification: None,
        });
        self.concede(o.clone(), formula);
        self.replace_and_normalize(site, ProofTerm::Var(o));
    }

    /// Substitutes `plug` at `site` in the residual and normalizes; the
    /// result is attached to the last recorded move.
    fn replace_and_normalize(&mut self, site: Path, plug: ProofTerm) {
        let prior = self.residual.clone();
        let Some(replaced) = prior.replace_at(&site, plug) else {
            return self.stall("invalid residual position");
        };
        let Some((result, trace)) = self.normalize(replaced) else {
            return;
        };
        let just = Justification {
            prior,
            site: Some(site),
            trace,
            result: result.clone(),
        };
        if let Some(last) = self.history.last_mut() {
            last.justification = Some(just);
        }
        self.residual = result;
        self.check_residual();
    }

    fn answer_pending(&mut self, p: &Pending, m: &Move) {
        self.pending = None;
        let MoveKind::Defend { claim, payload } = &m.kind else {
            unreachable!("checked by caller")
        };
        self.history.push(Played {
            mv: m.clone(),
            justification: None,
        });
        let plug = match (payload, &p.formula) {
            (Payload::Disjunct { side, .. }, _) => {
                let o = ProofTerm::Var(p.answer_name.clone());
                if *side == Side::Left {
                    ProofTerm::inl(o)
                } else {
                    ProofTerm::inr(o)
                }
            }
            (Payload::Witness { witness, .. }, Formula::Exists { var, sort, .. }) => {
                self.introduce(witness, sort);
                ProofTerm::ex_pair(
                    var.clone(),
                    ProofTerm::Var(p.answer_name.clone()),
                    witness.clone(),
                )
            }
            _ => return self.stall("unexpected answer"),
        };
        self.concede(p.answer_name.clone(), claim.clone());
        self.replace_and_normalize(p.site.clone(), plug);
    }

    /// Moves in `O: ...` / `P: ... [steps: k]` form.
    pub fn transcript_lines(&self) -> Vec<String> {
        self.history
            .iter()
            .map(|p| self.transcript_line(p))
            .collect()
    }

    pub fn transcript_line(&self, p: &Played) -> String {
        let label = match (&p.mv.kind, p.mv.actor) {
            (MoveKind::AttackImp(Some(ProofTerm::Var(o))), Actor::Opponent) => {
                match self.concessions.iter().find(|(n, _)| n == o) {
                    Some((_, f)) => format!("{} ? as {o}", print_formula(f, Notation::Ascii)),
                    None => format!("{o} ?"),
                }
            }
            _ => p.mv.label(|w| witness_sort(&self.ctx, w)),
        };
        let mut line = format!("{}: {label}", p.mv.actor.letter());
        if let Target::Concession(c) = &p.mv.target {
            if p.mv.kind.is_attack() {
                line.push_str(&format!(" against {c}"));
            }
        }
        if let Some(j) = &p.justification {
            line.push_str(&format!(" [steps: {}]", j.trace.steps.len()));
        }
        line
    }
}

/// The innermost elimination applied directly to a variable on the head
/// spine of a neutral term, with that variable. A bare variable counts as
/// its own site.
fn stuck_site(t: &ProofTerm) -> Option<(Path, Name)> {
    let mut path = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            ProofTerm::Ann(inner, _) => {
                path.push(0);
                cur = inner;
            }
            ProofTerm::Var(v) => return Some((path, v.clone())),
            ProofTerm::Fst(p)
            | ProofTerm::Snd(p)
            | ProofTerm::App(p, _)
            | ProofTerm::Extr(p, _)
            | ProofTerm::Abort(p)
            | ProofTerm::Case { scrut: p, .. }
            | ProofTerm::Inst { scrut: p, .. }
            | ProofTerm::Rewr { scrut: p, .. } => {
                if let ProofTerm::Var(v) = p.strip_ann() {
                    return Some((path, v.clone()));
                }
                path.push(0);
                cur = p;
            }
            _ => return None,
        }
    }
}
