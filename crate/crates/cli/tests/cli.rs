use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn ndk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ndk")).args(args).output().expect("run ndk")
}

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn path(f: &tempfile::NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

#[test]
fn check_corpus_succeeds() {
    let o = ndk(&["check", &corpus("basics.nd")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains(" judgements, 0 invalid"));
}

#[test]
fn eigenvariable_leak_is_a_semantic_failure() {
    let o = ndk(&["check", &corpus("leak.nd")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("line 4: EigenvariableViolation"), "{out}");
    assert!(out.contains("`u`"), "{out}");
}

#[test]
fn empty_file_has_zero_judgements() {
    let f = temp_file("");
    let o = ndk(&["check", path(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 judgements"));
}

#[test]
fn parse_errors_and_usage_exit_2() {
    let f = temp_file("pred A\n|- <a, : A\n");
    let o = ndk(&["check", path(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":2:"), "{}", stderr(&o));
    assert_eq!(ndk(&["check", "/no/such/file.nd"]).status.code(), Some(2));
    assert_eq!(ndk(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ndk(&["play", &corpus("swap.nd"), "--policy", "script"]).status.code(), Some(2));
}

#[test]
fn normalize_prints_reduct_and_rule() {
    let f = temp_file("pred A, B\na : A, b : B |- fst(<a, b>) : A\n|- app((\\x. x : (A -> A) -> A -> A), \\y. y) : A -> A\n");
    let o = ndk(&["normalize", "--trace", path(&f)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("line 2: a [1 step: AndFst]"), "{out}");
    assert!(out.contains("step 1: AndFst @ root : fst(<a, b>) ~> a"), "{out}");
    assert!(out.contains("line 3: \\y. y [1 step: Imp]"), "{out}");
    let o = ndk(&["--paper", "normalize", "--trace", path(&f)]);
    assert!(stdout(&o).contains("FST(⟨a, b⟩) ~> a"));
}

#[test]
fn normalize_json_has_trace_fields() {
    let f = temp_file("pred A, B\na : A, b : B |- snd(<a, b>) : B\n");
    let o = ndk(&["normalize", "--json", path(&f)]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let tr = &v[0]["trace"];
    assert_eq!(tr["initial"], "snd(<a, b>)");
    assert_eq!(tr["final"], "b");
    assert_eq!(tr["steps"][0]["rule"], "AndSnd");
}

#[test]
fn lambda_arithmetic() {
    let o = ndk(&["normalize", "--lambda", &corpus("church.lam")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("line 2: #5 "), "{out}");
    assert!(out.contains("line 3: #6 "), "{out}");
    let f = temp_file("(\\x. x x) (\\x. x x)\n");
    let o = ndk(&["lambda", "--max-steps", "50", path(&f)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("no normal form within 50 steps"));
}

#[test]
fn exhaustive_play_summary() {
    let o = ndk(&["play", &corpus("swap.nd"), "--depth", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "leaves: 2, ProponentWins: 2, Stalled: 0, DepthExceeded: 0");
    let o = ndk(&["play", "--all", &corpus("basics.nd")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("Stalled: 1"));
}

#[test]
fn random_play_is_reproducible() {
    let a = ndk(&["play", &corpus("basics.nd"), "--all", "--policy", "random", "--seed", "42"]);
    let b = ndk(&["play", &corpus("basics.nd"), "--all", "--policy", "random", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn scripted_play() {
    let o = ndk(&["play", &corpus("swap.nd"), "--policy", "script", "--script", &corpus("swap.script")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("O: A & B ? as o1\nP: B & A by <snd(o1), fst(o1)> [steps: 1]\nO: L?\n"), "{out}");
    assert!(out.ends_with("status: ProponentWins\n"));

    let f = temp_file("# first line is a comment\nA & B ?\nL?\nL?\n");
    let o = ndk(&["play", &corpus("swap.nd"), "--policy", "script", "--script", path(&f)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("script line 4: IllegalMove"), "{}", stdout(&o));
}

fn http(port: u16, method: &str, path: &str, body: &str) -> String {
    let mut s = TcpStream::connect(("127.0.0.1", port)).unwrap();
    write!(
        s,
        "{method} {path} HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut out = String::new();
    s.read_to_string(&mut out).unwrap();
    out
}

#[test]
fn serve_creates_sessions() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ndk"))
        .args(["serve", "--port", "0", "--corpus", &corpus("swap.nd")])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let port: u16 = line.trim().rsplit(':').next().unwrap().parse().unwrap();
    let resp = http(port, "POST", "/sessions", "{}");
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(resp.starts_with("HTTP/1.1 201"), "{resp}");
    assert!(resp.to_ascii_lowercase().contains("x-ndk-protocol: 1"));
    assert!(resp.contains("\"id\""));
}

#[test]
fn serve_rejects_bad_corpus_and_busy_port() {
    let f = temp_file("pred A\n|- <a, : A\n");
    let o = ndk(&["serve", "--port", "0", "--corpus", path(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":2:"));

    let busy = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = busy.local_addr().unwrap().port().to_string();
    let o = ndk(&["serve", "--port", &port]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("PortInUse"));
}
