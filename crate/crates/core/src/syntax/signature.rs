use std::collections::BTreeMap;

use thiserror::Error;

use super::{Name, Sort};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("duplicate declaration of `{0}`")]
    Duplicate(Name),
    #[error("unknown sort `{0}`")]
    UnknownSort(Name),
}

/// Declared sorts, constants and predicates of a problem.
///
/// All three share one namespace, so `x : D` in a context is unambiguous.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    sorts: Vec<Sort>,
    consts: Vec<(Name, Sort)>,
    preds: BTreeMap<Name, Vec<Sort>>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.sorts.iter().any(|s| s.0 == name)
            || self.consts.iter().any(|(c, _)| c == name)
            || self.preds.contains_key(name)
    }

    fn fresh(&self, name: &str) -> Result<(), SignatureError> {
        if self.is_declared(name) {
            Err(SignatureError::Duplicate(name.to_string()))
        } else {
            Ok(())
        }
    }

    pub fn declare_sort(&mut self, name: impl Into<Name>) -> Result<(), SignatureError> {
        let name = name.into();
        self.fresh(&name)?;
        self.sorts.push(Sort(name));
        Ok(())
    }

    pub fn declare_const(
        &mut self,
        name: impl Into<Name>,
        sort: Sort,
    ) -> Result<(), SignatureError> {
        let name = name.into();
        self.fresh(&name)?;
        if !self.has_sort(&sort) {
            return Err(SignatureError::UnknownSort(sort.0));
        }
        self.consts.push((name, sort));
        Ok(())
    }

    pub fn declare_pred(
        &mut self,
        name: impl Into<Name>,
        arity: Vec<Sort>,
    ) -> Result<(), SignatureError> {
        let name = name.into();
        self.fresh(&name)?;
        if let Some(s) = arity.iter().find(|s| !self.has_sort(s)) {
            return Err(SignatureError::UnknownSort(s.0.clone()));
        }
        self.preds.insert(name, arity);
        Ok(())
    }

    pub fn has_sort(&self, sort: &Sort) -> bool {
        self.sorts.contains(sort)
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn const_sort(&self, name: &str) -> Option<&Sort> {
        self.consts.iter().find(|(c, _)| c == name).map(|(_, s)| s)
    }

    /// Declared constants of `sort`, in declaration order.
    pub fn constants_of<'a>(&'a self, sort: &'a Sort) -> impl Iterator<Item = &'a Name> + 'a {
        self.consts
            .iter()
            .filter(move |(_, s)| s == sort)
            .map(|(c, _)| c)
    }

    pub fn constants(&self) -> &[(Name, Sort)] {
        &self.consts
    }

    pub fn pred_arity(&self, name: &str) -> Option<&[Sort]> {
        self.preds.get(name).map(Vec::as_slice)
    }

    pub fn preds(&self) -> impl Iterator<Item = (&Name, &[Sort])> {
        self.preds.iter().map(|(n, a)| (n, a.as_slice()))
    }
}
