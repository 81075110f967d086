//! Well-formedness of formulas over a signature.

use crate::syntax::{Formula, Individual, Name, Sort};

use super::{CheckErrorKind, Context};

struct Scope<'a> {
    ctx: &'a Context,
    bound: Vec<(Name, Sort)>,
}

impl Scope<'_> {
    fn sort_of(&self, i: &Individual) -> Result<Option<Sort>, CheckErrorKind> {
        match i {
            Individual::Var(x) => {
                if let Some((_, s)) = self.bound.iter().rev().find(|(n, _)| n == x) {
                    return Ok(Some(s.clone()));
                }
                Ok(self.ctx.ind_sort(x).cloned())
            }
            Individual::Const { name, .. } => match self.ctx.sort_of(i) {
                Some(s) => Ok(Some(s)),
                None => Err(CheckErrorKind::UnboundVariable(name.clone())),
            },
        }
    }

    fn expect_sort(&self, i: &Individual, expected: &Sort) -> Result<(), CheckErrorKind> {
        match self.sort_of(i)? {
            Some(found) if &found != expected => Err(CheckErrorKind::SortMismatch {
                expected: expected.clone(),
                found,
            }),
            _ => Ok(()),
        }
    }

    fn go(&mut self, f: &Formula) -> Result<(), CheckErrorKind> {
        let sig = self.ctx.signature();
        match f {
            Formula::Atom { pred, args } => {
                let arity = sig
                    .pred_arity(pred)
                    .ok_or_else(|| CheckErrorKind::UnknownPredicate(pred.clone()))?;
                if arity.len() != args.len() {
                    return Err(CheckErrorKind::ArityMismatch {
                        pred: pred.clone(),
                        expected: arity.len(),
                        found: args.len(),
                    });
                }
                for (a, s) in args.iter().zip(arity) {
                    self.expect_sort(a, s)?;
                }
                Ok(())
            }
            Formula::Bottom => Ok(()),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                self.go(l)?;
                self.go(r)
            }
            Formula::Forall { var, sort, body } | Formula::Exists { var, sort, body } => {
                if !sig.has_sort(sort) {
                    return Err(CheckErrorKind::UnknownSort(sort.clone()));
                }
                self.bound.push((var.clone(), sort.clone()));
                let r = self.go(body);
                self.bound.pop();
                r
            }
            Formula::Id { sort, lhs, rhs } => {
                if !sig.has_sort(sort) {
                    return Err(CheckErrorKind::UnknownSort(sort.clone()));
                }
                self.expect_sort(lhs, sort)?;
                self.expect_sort(rhs, sort)
            }
        }
    }
}

/// Predicates exist with the right arity, sorts are declared and arguments
/// have the sorts the predicate expects. Undeclared free individual
/// variables are accepted with unknown sort.
pub fn formula(ctx: &Context, f: &Formula) -> Result<(), CheckErrorKind> {
    Scope {
        ctx,
        bound: Vec::new(),
    }
    .go(f)
}
