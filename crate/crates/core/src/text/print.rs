use crate::syntax::{Evidence, Formula, Individual, ProofTerm};

/// Output notation. `Ascii` is the input language and round-trips through
/// the parser; `Paper` is the traditional typeset style and is display-only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Notation {
    #[default]
    Ascii,
    Paper,
}

// Binding strength of a formula's outermost connective.
const QUANT: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const ATOM: u8 = 4;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Forall { .. } | Formula::Exists { .. } => QUANT,
        Formula::Imp(..) => IMP,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => ATOM,
    }
}

fn args(xs: &[Individual]) -> String {
    xs.iter().map(|x| x.name()).collect::<Vec<_>>().join(", ")
}

struct FormulaPrinter {
    notation: Notation,
}

impl FormulaPrinter {
    /// `min` is the weakest connective allowed unparenthesized here;
    /// `rightmost` says nothing follows, so a quantifier body may extend freely.
    fn go(&self, f: &Formula, min: u8, rightmost: bool, out: &mut String) {
        let lvl = level(f);
        let paren = if lvl == QUANT {
            min > QUANT && !rightmost
        } else {
            lvl < min
        };
        if paren {
            out.push('(');
            self.go(f, QUANT, true, out);
            out.push(')');
            return;
        }
        let paper = self.notation == Notation::Paper;
        match f {
            Formula::Atom { pred, args: xs } => {
                out.push_str(pred);
                if !xs.is_empty() {
                    out.push('(');
                    out.push_str(&args(xs));
                    out.push(')');
                }
            }
            Formula::Bottom => out.push_str(if paper { "⊥" } else { "_|_" }),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                let (op, lvl) = match (f, paper) {
                    (Formula::And(..), false) => (" & ", AND),
                    (Formula::And(..), true) => (" ∧ ", AND),
                    (Formula::Or(..), false) => (" | ", OR),
                    (Formula::Or(..), true) => (" ∨ ", OR),
                    (_, false) => (" -> ", IMP),
                    (_, true) => (" → ", IMP),
                };
                // Right associative: the left operand must bind tighter.
                self.go(l, lvl + 1, false, out);
                out.push_str(op);
                self.go(r, lvl, rightmost, out);
            }
            Formula::Forall { var, sort, body } | Formula::Exists { var, sort, body } => {
                let forall = matches!(f, Formula::Forall { .. });
                if paper {
                    out.push_str(if forall { "∀" } else { "∃" });
                    out.push_str(&format!("{var}^{sort}."));
                } else {
                    out.push_str(if forall { "all " } else { "some " });
                    out.push_str(&format!("{var}:{sort}. "));
                }
                self.go(body, QUANT, true, out);
            }
            Formula::Id { sort, lhs, rhs } => {
                if paper {
                    out.push_str(&format!("Id_{sort}({lhs}, {rhs})"));
                } else {
                    out.push_str(&format!("Id{{{sort}}}({lhs}, {rhs})"));
                }
            }
        }
    }
}

pub fn print_formula(f: &Formula, notation: Notation) -> String {
    let mut out = String::new();
    FormulaPrinter { notation }.go(f, QUANT, true, &mut out);
    out
}

pub fn print_evidence(e: &Evidence) -> String {
    match e {
        Evidence::Var(t) => t.clone(),
        Evidence::Path(steps) if steps.is_empty() => "refl".to_string(),
        Evidence::Path(steps) => format!("path#{}", steps.len()),
    }
}

fn term(t: &ProofTerm, n: Notation, out: &mut String) {
    use ProofTerm as T;
    let paper = n == Notation::Paper;
    let call = |name: &str, out: &mut String| {
        out.push_str(name);
        out.push('(');
    };
    match t {
        T::Var(x) => out.push_str(x),
        T::Pair(a, b) => {
            out.push(if paper { '⟨' } else { '<' });
            term(a, n, out);
            out.push_str(", ");
            term(b, n, out);
            out.push(if paper { '⟩' } else { '>' });
        }
        T::Fst(p) | T::Snd(p) | T::Inl(p) | T::Inr(p) | T::Abort(p) => {
            let name = match (t, paper) {
                (T::Fst(_), false) => "fst",
                (T::Fst(_), true) => "FST",
                (T::Snd(_), false) => "snd",
                (T::Snd(_), true) => "SND",
                (T::Inl(_), _) => "inl",
                (T::Inr(_), _) => "inr",
                (_, false) => "abort",
                (_, true) => "ABORT",
            };
            call(name, out);
            term(p, n, out);
            out.push(')');
        }
        T::Case {
            scrut,
            left,
            left_body,
            right,
            right_body,
        } => {
            call(if paper { "CASE" } else { "case" }, out);
            term(scrut, n, out);
            let bind = if paper { "υ" } else { "" };
            out.push_str(&format!(", {bind}{left}. "));
            term(left_body, n, out);
            out.push_str(&format!(", {bind}{right}. "));
            term(right_body, n, out);
            out.push(')');
        }
        T::Lam { var, body } => {
            out.push_str(&format!("{}{var}. ", if paper { "λ" } else { "\\" }));
            term(body, n, out);
        }
        T::App(f, a) => {
            call(if paper { "APP" } else { "app" }, out);
            term(f, n, out);
            out.push_str(", ");
            term(a, n, out);
            out.push(')');
        }
        T::TLam { var, sort, body } => {
            if paper {
                out.push_str(&format!("Λ{var}^{sort}. "));
            } else {
                out.push_str(&format!("/\\{var}:{sort}. "));
            }
            term(body, n, out);
        }
        T::Extr(f, i) => {
            call(if paper { "EXTR" } else { "extr" }, out);
            term(f, n, out);
            out.push_str(&format!(", {i})"));
        }
        T::ExPair {
            binder,
            body,
            witness,
        } => {
            if paper {
                out.push_str(&format!("ε{binder}.("));
            } else {
                out.push_str(&format!("eps({binder}. "));
            }
            term(body, n, out);
            out.push_str(&format!(", {witness})"));
        }
        T::Inst {
            scrut,
            proof_var,
            ind_var,
            body,
        } => {
            call(if paper { "INST" } else { "inst" }, out);
            term(scrut, n, out);
            if paper {
                out.push_str(&format!(", σ{proof_var}.σ{ind_var}. "));
            } else {
                out.push_str(&format!(", {proof_var}.{ind_var}. "));
            }
            term(body, n, out);
            out.push(')');
        }
        T::IdIntro {
            evidence: e,
            lhs,
            rhs,
        } => {
            out.push_str(&format!("{}({lhs}, {rhs})", print_evidence(e)));
        }
        T::Rewr { scrut, var, body } => {
            call(if paper { "REWR" } else { "rewr" }, out);
            term(scrut, n, out);
            let bind = if paper { "σ" } else { "" };
            out.push_str(&format!(", {bind}{var}. "));
            term(body, n, out);
            out.push(')');
        }
        T::Ann(inner, f) => {
            out.push('(');
            term(inner, n, out);
            out.push_str(" : ");
            out.push_str(&print_formula(f, n));
            out.push(')');
        }
    }
}

pub fn print_term(t: &ProofTerm, notation: Notation) -> String {
    let mut out = String::new();
    term(t, notation, &mut out);
    out
}
