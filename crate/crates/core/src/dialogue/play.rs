//! Playing games out: the exhaustive tree, seeded random plays, scripts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{DialogueError, DialogueState, Move, MoveKind, Payload, Played, Status, Target};
use crate::text::{print_formula, print_term, Notation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Leaf {
    ProponentWins,
    Stalled(String),
    DepthExceeded,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LeafCounts {
    pub leaves: usize,
    pub wins: usize,
    pub stalled: usize,
    pub depth_exceeded: usize,
}

impl LeafCounts {
    pub fn summary(&self) -> String {
        format!(
            "leaves: {}, ProponentWins: {}, Stalled: {}, DepthExceeded: {}",
            self.leaves, self.wins, self.stalled, self.depth_exceeded
        )
    }
}

/// Nodes are states where the Opponent is to move; each edge is one
/// Opponent move together with the Proponent's automatic replies.
#[derive(Debug, Clone)]
pub struct GameTree {
    pub state: DialogueState,
    pub leaf: Option<Leaf>,
    pub children: Vec<TreeEdge>,
}

#[derive(Debug, Clone)]
pub struct TreeEdge {
    pub mv: Move,
    pub label: String,
    /// Moves appended to the history by this edge, starting with `mv`.
    pub played: Vec<Played>,
    pub subtree: GameTree,
}

/// Every Opponent choice, down to `depth` Opponent moves.
pub fn explore(state: &DialogueState, depth: usize) -> GameTree {
    let leaf = |l| GameTree {
        state: state.clone(),
        leaf: Some(l),
        children: Vec::new(),
    };
    match &state.status {
        Status::ProponentWins => return leaf(Leaf::ProponentWins),
        Status::Stalled(r) => return leaf(Leaf::Stalled(r.clone())),
        Status::Open => {}
    }
    let legal = state.legal_moves();
    if legal.is_empty() {
        return leaf(Leaf::Stalled("Opponent has no legal move".into()));
    }
    if depth == 0 {
        return leaf(Leaf::DepthExceeded);
    }
    let children = legal
        .into_iter()
        .map(|mv| {
            let label = state.label(&mv);
            match state.apply_move(&mv) {
                Ok(next) => TreeEdge {
                    played: next.history[state.history.len()..].to_vec(),
                    subtree: explore(&next, depth - 1),
                    mv,
                    label,
                },
                Err(e) => TreeEdge {
                    played: Vec::new(),
                    subtree: GameTree {
                        state: state.clone(),
                        leaf: Some(Leaf::Stalled(format!("engine rejected its own move: {e}"))),
                        children: Vec::new(),
                    },
                    mv,
                    label,
                },
            }
        })
        .collect();
    GameTree {
        state: state.clone(),
        leaf: None,
        children,
    }
}

impl GameTree {
    pub fn leaf_counts(&self) -> LeafCounts {
        let mut c = LeafCounts::default();
        self.walk(&mut |t| match &t.leaf {
            Some(Leaf::ProponentWins) => {
                c.leaves += 1;
                c.wins += 1;
            }
            Some(Leaf::Stalled(_)) => {
                c.leaves += 1;
                c.stalled += 1;
            }
            Some(Leaf::DepthExceeded) => {
                c.leaves += 1;
                c.depth_exceeded += 1;
            }
            None => {}
        });
        c
    }

    /// Visits every node, parents first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a GameTree)) {
        f(self);
        for e in &self.children {
            e.subtree.walk(f);
        }
    }

    pub fn edges(&self) -> Vec<&TreeEdge> {
        let mut out = Vec::new();
        self.walk(&mut |t| out.extend(t.children.iter()));
        out
    }

    /// Reasons of the stalled leaves.
    pub fn stalls(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let Some(Leaf::Stalled(r)) = &t.leaf {
                out.push(r.clone());
            }
        });
        out
    }

    pub fn to_json(&self) -> Value {
        let leaf = self.leaf.as_ref().map(|l| match l {
            Leaf::ProponentWins => "ProponentWins".to_string(),
            Leaf::Stalled(r) => format!("Stalled: {r}"),
            Leaf::DepthExceeded => "DepthExceeded".to_string(),
        });
        json!({
            "state": {
                "standing": print_formula(&self.state.standing, Notation::Ascii),
                "residual": print_term(&self.state.residual, Notation::Ascii),
                "status": self.state.status.to_string(),
                "leaf": leaf,
            },
            "children": self.children.iter().map(|e| json!({
                "move": e.label,
                "replies": e.played.iter().skip(1).map(|p| self.state_line(e, p)).collect::<Vec<_>>(),
                "subtree": e.subtree.to_json(),
            })).collect::<Vec<_>>(),
        })
    }

    fn state_line(&self, e: &TreeEdge, p: &Played) -> String {
        e.subtree.state.transcript_line(p)
    }
}

/// A single play.
#[derive(Debug, Clone)]
pub struct Transcript {
    pub state: DialogueState,
    /// The play stopped because the depth bound was reached.
    pub depth_exceeded: bool,
}

impl Transcript {
    pub fn lines(&self) -> Vec<String> {
        self.state.transcript_lines()
    }

    pub fn len(&self) -> usize {
        self.state.history.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.history.is_empty()
    }

    pub fn status(&self) -> &Status {
        &self.state.status
    }

    pub fn to_json(&self) -> Value {
        json!({
            "status": self.state.status.to_string(),
            "depth_exceeded": self.depth_exceeded,
            "moves": self.state.history.iter().map(|p| played_json(&self.state, p)).collect::<Vec<_>>(),
            "transcript": self.lines(),
        })
    }
}

/// Wire form of one recorded move.
pub fn played_json(state: &DialogueState, p: &Played) -> Value {
    let target = match &p.mv.target {
        Target::Standing => Value::Null,
        Target::Concession(c) => Value::String(c.clone()),
    };
    let steps = p
        .justification
        .as_ref()
        .map(|j| serde_json::to_value(j.trace.to_json(Notation::Ascii)).unwrap_or(Value::Null));
    let mut v = json!({
        "actor": p.mv.actor,
        "kind": p.mv.kind.name(),
        "text": state.transcript_line(p),
        "against": target,
        "trace": steps,
    });
    match &p.mv.kind {
        MoveKind::AttackAll(w) => v["witness"] = json!(w.to_string()),
        MoveKind::Defend { claim, payload } => {
            v["claim"] = json!(print_formula(claim, Notation::Ascii));
            match payload {
                Payload::Witness { witness, .. } => v["witness"] = json!(witness.to_string()),
                Payload::Disjunct { side, .. } => v["side"] = json!(side),
                _ => {}
            }
        }
        _ => {}
    }
    v
}

/// Uniformly random Opponent moves from a seeded ChaCha8 stream.
pub fn play_random(state: &DialogueState, seed: u64, depth: usize) -> Transcript {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = state.clone();
    for _ in 0..depth {
        let legal = s.legal_moves();
        if s.is_over() || legal.is_empty() {
            return Transcript {
                state: s,
                depth_exceeded: false,
            };
        }
        let m = &legal[rng.random_range(0..legal.len())];
        s = s.apply_move(m).expect("legal move");
    }
    let depth_exceeded = !s.is_over() && !s.legal_moves().is_empty();
    Transcript {
        state: s,
        depth_exceeded,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("script move {index}: {error}")]
pub struct ScriptError {
    pub index: usize,
    pub error: DialogueError,
}

/// Plays the Opponent moves named by `labels`, in order.
pub fn play_script(state: &DialogueState, labels: &[String]) -> Result<Transcript, ScriptError> {
    let mut s = state.clone();
    for (index, label) in labels.iter().enumerate() {
        s = s.apply_label(label).map_err(|error| ScriptError {
            index: index + 1,
            error,
        })?;
    }
    Ok(Transcript {
        state: s,
        depth_exceeded: false,
    })
}
