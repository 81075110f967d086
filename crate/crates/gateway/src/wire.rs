//! JSON views. Only rendered text, move names and paths go on the wire.

use ndk_core::dialogue::{played_json, DialogueState, Move, MoveKind, Payload, Target};
use ndk_core::text::{print_formula, print_judgement, print_term, Notation};
use serde_json::{json, Value};

use crate::session::Session;

fn f(x: &ndk_core::Formula) -> String {
    print_formula(x, Notation::Ascii)
}

pub fn move_view(state: &DialogueState, m: &Move) -> Value {
    let mut v = json!({
        "label": state.label(m),
        "kind": m.kind.name(),
        "against": match &m.target {
            Target::Standing => Value::Null,
            Target::Concession(c) => Value::String(c.clone()),
        },
    });
    match &m.kind {
        MoveKind::AttackAll(w) => v["witness"] = json!(w.to_string()),
        MoveKind::Defend { claim, payload } => {
            v["claim"] = json!(f(claim));
            match payload {
                Payload::Disjunct { side, .. } => v["side"] = json!(side),
                Payload::Witness { witness, .. } => v["witness"] = json!(witness.to_string()),
                _ => {}
            }
        }
        _ => {}
    }
    v
}

pub fn moves_view(state: &DialogueState) -> Vec<Value> {
    state.legal_moves().iter().map(|m| move_view(state, m)).collect()
}

pub fn state_view(s: &Session) -> Value {
    let state = s.snapshot();
    json!({
        "id": s.id,
        "created_at": s.created_at,
        "index": s.index,
        "thesis": print_judgement(&state.thesis, Notation::Ascii),
        "standing": f(&state.standing),
        "residual": print_term(&state.residual, Notation::Ascii),
        "status": state.status.to_string(),
        "turn": state.turn,
        "concessions": state.concessions.iter().map(|(n, c)| json!({"name": n, "formula": f(c)})).collect::<Vec<_>>(),
        "attacks": moves_view(&state),
        "history": state.history.iter().map(|p| played_json(&state, p)).collect::<Vec<_>>(),
        "events": s.event_count(),
    })
}

/// The event for one applied Opponent move; `before` is the history length
/// of the state it was applied to.
pub fn move_event(seq: usize, label: &str, next: &DialogueState, before: usize) -> Value {
    json!({
        "seq": seq,
        "move": label,
        "played": next.history[before..].iter().map(|p| played_json(next, p)).collect::<Vec<_>>(),
        "standing": f(&next.standing),
        "residual": print_term(&next.residual, Notation::Ascii),
        "status": next.status.to_string(),
        "attacks": moves_view(next),
    })
}
