//! Declarative preferences: a definable property plus a lexicographic ordering.

use std::collections::BTreeSet;

use super::procedure::{FilterExpr, SortKey};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecMode {
    /// Property is a conjunction of atoms (or vacuous).
    Simple,
    /// Property uses disjunction somewhere.
    General,
}

/// `A(x, y) ≡ ¬F(y) ∨ (F(x) ∧ x ⪰ y)` with `F` the property and `⪰` the
/// lexicographic ordering.
///
/// `ordering[0]` is the primary key. A missing property is the vacuous
/// conjunction: every alternative satisfies it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreferenceSpec {
    property: Option<FilterExpr>,
    ordering: Vec<SortKey>,
}

impl PreferenceSpec {
    pub fn new(property: Option<FilterExpr>, ordering: Vec<SortKey>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for key in &ordering {
            if !seen.insert(key.attr.as_str()) {
                return Err(Error::DuplicateOrderingAttribute(key.attr.clone()));
            }
        }
        Ok(PreferenceSpec { property, ordering })
    }

    /// Total indifference: vacuous property, empty ordering.
    pub fn indifferent() -> Self {
        PreferenceSpec {
            property: None,
            ordering: Vec::new(),
        }
    }

    pub fn property(&self) -> Option<&FilterExpr> {
        self.property.as_ref()
    }

    pub fn ordering(&self) -> &[SortKey] {
        &self.ordering
    }

    pub fn mode(&self) -> SpecMode {
        match &self.property {
            Some(p) if !p.is_conjunctive() => SpecMode::General,
            _ => SpecMode::Simple,
        }
    }

    /// Distinct attributes used by the property and the ordering.
    pub fn attributes(&self) -> BTreeSet<&str> {
        let mut out: BTreeSet<&str> = self.ordering.iter().map(|k| k.attr.as_str()).collect();
        if let Some(p) = &self.property {
            out.extend(p.atoms().into_iter().map(|a| a.attr.as_str()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AtomicPredicate;

    #[test]
    fn duplicate_ordering_attribute_rejected() {
        let err = PreferenceSpec::new(None, vec![SortKey::asc("price"), SortKey::desc("price")])
            .unwrap_err();
        assert_eq!(err, Error::DuplicateOrderingAttribute("price".into()));
    }

    #[test]
    fn mode_follows_property_shape() {
        let atom = |a: &str| FilterExpr::Atom(AtomicPredicate::ge(a, 1));
        let simple =
            PreferenceSpec::new(Some(FilterExpr::and(vec![atom("a"), atom("b")])), vec![]).unwrap();
        assert_eq!(simple.mode(), SpecMode::Simple);
        let general =
            PreferenceSpec::new(Some(FilterExpr::or(vec![atom("a"), atom("b")])), vec![]).unwrap();
        assert_eq!(general.mode(), SpecMode::General);
        assert_eq!(PreferenceSpec::indifferent().mode(), SpecMode::Simple);
    }
}
