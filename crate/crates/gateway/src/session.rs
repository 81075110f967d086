use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use ndk_core::dialogue::{open_game, DialogueState};
use ndk_core::text::parse_problem;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tokio::sync::watch;

use crate::error::ApiError;
use crate::wire;

/// One line of a session's append-only log file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum LogRecord {
    Open {
        id: String,
        created_at: u64,
        problem: String,
        index: usize,
    },
    Move {
        label: String,
    },
}

struct Live {
    state: DialogueState,
    /// Opponent move labels in the order they were applied.
    moves: Vec<String>,
    /// Event payloads; event `k` (1-based) is `events[k - 1]`.
    events: Vec<Value>,
}

pub struct Session {
    pub id: String,
    pub created_at: u64,
    pub problem: String,
    pub index: usize,
    initial: DialogueState,
    live: RwLock<Live>,
    /// Number of events so far; subscribers wait on changes.
    tick: watch::Sender<usize>,
    log: Option<Mutex<File>>,
}

/// Parses `problem` and opens the game on judgement `index`.
pub fn initial_state(problem: &str, index: usize) -> Result<DialogueState, ApiError> {
    let p = parse_problem(problem).map_err(ApiError::Parse)?;
    let count = p.judgements.len();
    let (_, j) = p.judgements.get(index).ok_or(ApiError::BadIndex { index, count })?;
    open_game(j).map_err(ApiError::from)
}

/// Replays `moves` from `initial`.
pub fn fold(initial: &DialogueState, moves: &[String]) -> Result<DialogueState, ApiError> {
    moves.iter().try_fold(initial.clone(), |s, m| s.apply_label(m).map_err(ApiError::from))
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn append(file: &Mutex<File>, rec: &LogRecord) -> io::Result<()> {
    let mut f = file.lock().expect("log lock");
    let mut line = serde_json::to_string(rec).map_err(io::Error::other)?;
    line.push('\n');
    f.write_all(line.as_bytes())?;
    f.flush()
}

impl Session {
    pub fn create(problem: String, index: usize, persist: Option<&Path>) -> Result<Session, ApiError> {
        let initial = initial_state(&problem, index)?;
        let id = uuid::Uuid::new_v4().simple().to_string();
        let created_at = now();
        let log = match persist {
            Some(dir) => {
                let f = OpenOptions::new().create_new(true).append(true).open(log_path(dir, &id))?;
                let f = Mutex::new(f);
                append(&f, &LogRecord::Open { id: id.clone(), created_at, problem: problem.clone(), index })?;
                Some(f)
            }
            None => None,
        };
        Ok(Session::from_parts(id, created_at, problem, index, initial, log))
    }

    fn from_parts(
        id: String,
        created_at: u64,
        problem: String,
        index: usize,
        initial: DialogueState,
        log: Option<Mutex<File>>,
    ) -> Session {
        let (tick, _) = watch::channel(0);
        Session {
            id,
            created_at,
            problem,
            index,
            live: RwLock::new(Live { state: initial.clone(), moves: Vec::new(), events: Vec::new() }),
            initial,
            tick,
            log,
        }
    }

    /// Rebuilds a session from its log file, which stays open for appends.
    pub fn restore(path: &Path) -> Result<Session, ApiError> {
        let reader = BufReader::new(File::open(path)?);
        let mut records = Vec::new();
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str::<LogRecord>(&line).map_err(io::Error::other)?);
        }
        let mut it = records.into_iter();
        let Some(LogRecord::Open { id, created_at, problem, index }) = it.next() else {
            return Err(io::Error::other(format!("{}: log does not start with an open record", path.display())).into());
        };
        let initial = initial_state(&problem, index)?;
        let log = OpenOptions::new().append(true).open(path)?;
        let s = Session::from_parts(id, created_at, problem, index, initial, Some(Mutex::new(log)));
        for rec in it {
            if let LogRecord::Move { label } = rec {
                s.apply(&label, false)?;
            }
        }
        Ok(s)
    }

    pub fn snapshot(&self) -> DialogueState {
        self.live.read().expect("session lock").state.clone()
    }

    pub fn moves(&self) -> Vec<String> {
        self.live.read().expect("session lock").moves.clone()
    }

    pub fn initial(&self) -> &DialogueState {
        &self.initial
    }

    pub fn event_count(&self) -> usize {
        self.live.read().expect("session lock").events.len()
    }

    /// Event `k`, counting from 1.
    pub fn event(&self, k: usize) -> Option<Value> {
        let live = self.live.read().expect("session lock");
        k.checked_sub(1).and_then(|i| live.events.get(i)).cloned()
    }

    pub fn subscribe(&self) -> watch::Receiver<usize> {
        self.tick.subscribe()
    }

    /// Applies one Opponent move; returns the event it produced.
    pub fn post_move(&self, label: &str) -> Result<Value, ApiError> {
        self.apply(label, true)
    }

    fn apply(&self, label: &str, write_log: bool) -> Result<Value, ApiError> {
        let mut live = self.live.write().expect("session lock");
        let before = live.state.history.len();
        let next = live.state.apply_label(label)?;
        let label = label.trim().to_string();
        if write_log {
            if let Some(f) = &self.log {
                append(f, &LogRecord::Move { label: label.clone() })?;
            }
        }
        let seq = live.events.len() + 1;
        let event = wire::move_event(seq, &label, &next, before);
        live.moves.push(label);
        live.events.push(event.clone());
        live.state = next;
        if cfg!(debug_assertions) {
            let folded = fold(&self.initial, &live.moves).expect("logged moves replay");
            assert!(folded == live.state, "event log fold diverged from live state");
        }
        self.tick.send_replace(seq);
        Ok(event)
    }
}

pub fn log_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.jsonl"))
}
