//! Canonical normal form of simple (conjunctive) procedures.
//!
//! Rewrites used, all exact on lists:
//! - filters commute with each other and with sorts, so every filter moves
//!   to the front;
//! - two lower bounds on one attribute merge into their maximum, two upper
//!   bounds into their minimum;
//! - a sort on attribute `a` followed later by another sort on `a` is erased,
//!   so only the last-applied sort per attribute survives.
//!
//! Filters are emitted in ascending attribute-name order, `>=` before `<=`.
//! The result has at most two filters and one sort per attribute, hence
//! length at most `3N`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::dsl::print_procedure;
use crate::engine::{equivalent_under, Plan};
use crate::error::{Error, Result, SchemaError, SchemaErrors};
use crate::model::{
    compare_values, validate_procedure, AtomicPredicate, Catalog, CmpOp, FilterExpr, Literal,
    Procedure, RankedList, Schema, SortKey, Stage,
};
use crate::testkit::{enumerate_lists, ListGuard};

/// Merged filters on one attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttrFilter {
    /// At least one of the bounds is present.
    Range {
        lower: Option<Literal>,
        upper: Option<Literal>,
    },
    /// Lower bound above upper bound: the pair rejects every item. Both dual
    /// filters are kept, so it counts as two stages.
    EmptyInterval { lower: Literal, upper: Literal },
}

impl AttrFilter {
    pub fn stage_count(&self) -> usize {
        match self {
            AttrFilter::Range { lower, upper } => {
                lower.is_some() as usize + upper.is_some() as usize
            }
            AttrFilter::EmptyInterval { .. } => 2,
        }
    }

    fn atoms(&self, attr: &str) -> Vec<AtomicPredicate> {
        let (lower, upper) = match self {
            AttrFilter::Range { lower, upper } => (lower.as_ref(), upper.as_ref()),
            AttrFilter::EmptyInterval { lower, upper } => (Some(lower), Some(upper)),
        };
        let mut out = Vec::with_capacity(2);
        if let Some(l) = lower {
            out.push(AtomicPredicate::new(attr, CmpOp::Ge, l.clone()));
        }
        if let Some(u) = upper {
            out.push(AtomicPredicate::new(attr, CmpOp::Le, u.clone()));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    filters: BTreeMap<String, AttrFilter>,
    sorts: Vec<SortKey>,
    take_first: bool,
}

impl NormalForm {
    /// Per-attribute filters, keyed and iterated in attribute-name order.
    pub fn filters(&self) -> &BTreeMap<String, AttrFilter> {
        &self.filters
    }

    /// Surviving sorts in application order; the last one is the primary key.
    pub fn sorts(&self) -> &[SortKey] {
        &self.sorts
    }

    pub fn takes_first(&self) -> bool {
        self.take_first
    }

    /// Filter stages plus sort stages. `first` is not counted.
    pub fn length(&self) -> usize {
        self.filters
            .values()
            .map(AttrFilter::stage_count)
            .sum::<usize>()
            + self.sorts.len()
    }

    pub fn attribute_count(&self) -> usize {
        let mut attrs: BTreeSet<&str> = self.filters.keys().map(String::as_str).collect();
        attrs.extend(self.sorts.iter().map(|k| k.attr.as_str()));
        attrs.len()
    }

    pub fn empty_intervals(&self) -> impl Iterator<Item = &str> {
        self.filters
            .iter()
            .filter(|(_, f)| matches!(f, AttrFilter::EmptyInterval { .. }))
            .map(|(a, _)| a.as_str())
    }

    /// Filter atoms in canonical order.
    pub fn filter_atoms(&self) -> Vec<AtomicPredicate> {
        self.filters.iter().flat_map(|(a, f)| f.atoms(a)).collect()
    }

    /// The normal form as a procedure: one stage per filter atom, then the
    /// sorts, then `first` if present.
    pub fn to_procedure(&self) -> Procedure {
        let mut stages: Vec<Stage> = self
            .filter_atoms()
            .into_iter()
            .map(|a| Stage::Filter(FilterExpr::Atom(a)))
            .collect();
        stages.extend(self.sorts.iter().cloned().map(Stage::Sort));
        Procedure {
            stages,
            take_first: self.take_first,
        }
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_procedure())
    }
}

fn cmp_bounds(attr: &str, a: &Literal, b: &Literal, schema: Option<&Schema>) -> Result<Ordering> {
    if let Some(schema) = schema {
        let idx = schema.lookup(attr)?;
        let va = schema.resolve_literal(idx, a)?;
        let vb = schema.resolve_literal(idx, b)?;
        return Ok(compare_values(&va, &vb)?);
    }
    match (a, b) {
        (Literal::Decimal(x), Literal::Decimal(y)) => Ok(x.cmp(y)),
        (Literal::Label(_), Literal::Label(_)) => Err(Error::UnresolvedBound(attr.to_string())),
        (_, other) => Err(SchemaError::KindMismatch {
            attr: attr.to_string(),
            expected: "bounds of a single kind",
            found: other.to_string(),
        }
        .into()),
    }
}

/// Rewrites a simple procedure to its normal form.
///
/// Without a schema, bounds are compared as decimals; two label bounds on
/// the same attribute then fail with `UnresolvedBound`. With a schema every
/// reference is validated first. Disjunctive filters yield `NotSimple`.
pub fn normalize(p: &Procedure, schema: Option<&Schema>) -> Result<NormalForm> {
    if !p.is_simple() {
        return Err(Error::NotSimple);
    }
    if let Some(schema) = schema {
        validate_procedure(p, schema).map_err(SchemaErrors)?;
    }

    let mut lower: BTreeMap<&str, &Literal> = BTreeMap::new();
    let mut upper: BTreeMap<&str, &Literal> = BTreeMap::new();
    for stage in &p.stages {
        let Stage::Filter(expr) = stage else { continue };
        for atom in expr.atoms() {
            let attr = atom.attr.as_str();
            let (slot, keep_new) = match atom.op {
                CmpOp::Ge => (&mut lower, Ordering::Greater),
                CmpOp::Le => (&mut upper, Ordering::Less),
            };
            match slot.get(attr) {
                Some(cur) if cmp_bounds(attr, &atom.bound, cur, schema)? != keep_new => {}
                _ => {
                    slot.insert(attr, &atom.bound);
                }
            }
        }
    }

    let attrs: BTreeSet<&str> = lower.keys().chain(upper.keys()).copied().collect();
    let mut filters = BTreeMap::new();
    for attr in attrs {
        let lo = lower.get(attr).copied();
        let hi = upper.get(attr).copied();
        let filter = match (lo, hi) {
            (Some(l), Some(u)) if cmp_bounds(attr, l, u, schema)? == Ordering::Greater => {
                AttrFilter::EmptyInterval {
                    lower: l.clone(),
                    upper: u.clone(),
                }
            }
            _ => AttrFilter::Range {
                lower: lo.cloned(),
                upper: hi.cloned(),
            },
        };
        filters.insert(attr.to_string(), filter);
    }

    let sorts = surviving_sorts(p);

    Ok(NormalForm {
        filters,
        sorts,
        take_first: p.take_first,
    })
}

/// For each attribute, only its last-applied sort, in application order.
pub(crate) fn surviving_sorts(p: &Procedure) -> Vec<SortKey> {
    let mut seen = HashSet::new();
    let mut sorts: Vec<SortKey> = p
        .stages
        .iter()
        .rev()
        .filter_map(|s| match s {
            Stage::Sort(k) if seen.insert(k.attr.as_str()) => Some(k.clone()),
            _ => None,
        })
        .collect();
    sorts.reverse();
    sorts
}

/// Number of filter and sort stages of a normal form.
pub fn length(nf: &NormalForm) -> usize {
    nf.length()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// First enumerated list on which the outputs are not A-equivalent.
    Counterexample(RankedList),
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent)
    }
}

/// Exhaustive A-equivalence check over every list of length `0..=max_len`
/// drawn with repetition from `universe`.
///
/// Two runs that both end in `EmptyChoice` (a `first` on an empty list)
/// count as agreeing.
pub fn check_equivalence(
    p1: &Procedure,
    p2: &Procedure,
    attrs: &[&str],
    universe: &Catalog,
    max_len: usize,
    guard: ListGuard,
) -> Result<Equivalence> {
    let schema = universe.schema();
    let plan1 = Plan::compile(p1, schema)?;
    let plan2 = Plan::compile(p2, schema)?;
    let attrs = attrs
        .iter()
        .map(|a| schema.lookup(a))
        .collect::<Result<Vec<_>, _>>()?;
    for list in enumerate_lists(universe, max_len, guard)? {
        let agree = match (plan1.run(&list, universe), plan2.run(&list, universe)) {
            (Ok(a), Ok(b)) => equivalent_under(&a, &b, &attrs, universe),
            (Err(Error::EmptyChoice), Err(Error::EmptyChoice)) => true,
            (Err(e), _) | (_, Err(e)) if e != Error::EmptyChoice => return Err(e),
            _ => false,
        };
        if !agree {
            return Ok(Equivalence::Counterexample(list));
        }
    }
    Ok(Equivalence::Equivalent)
}

/// Renders a normal form as pipeline text, or `<identity>`.
pub fn render(nf: &NormalForm) -> String {
    let p = nf.to_procedure();
    if p.is_identity() {
        "<identity>".to_string()
    } else {
        print_procedure(&p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_procedure;
    use crate::model::AttributeDecl;

    fn nf(text: &str) -> NormalForm {
        normalize(&parse_procedure(text).unwrap(), None).unwrap()
    }

    #[test]
    fn worked_example_has_length_three() {
        let n = nf("sort desc price |> filter rating >= 4 |> sort asc price |> sort desc rating");
        assert_eq!(
            n.filters().get("rating"),
            Some(&AttrFilter::Range {
                lower: Some(4.into()),
                upper: None
            })
        );
        assert_eq!(n.filters().len(), 1);
        assert_eq!(n.sorts(), &[SortKey::asc("price"), SortKey::desc("rating")]);
        assert_eq!(n.length(), 3);
        assert_eq!(
            render(&n),
            "filter rating >= 4 |> sort asc price |> sort desc rating"
        );
    }

    #[test]
    fn lower_bounds_merge_to_max() {
        let n = nf("filter price >= 5 |> filter price >= 9");
        assert_eq!(render(&n), "filter price >= 9");
        assert_eq!(n.length(), 1);
        let n = nf("filter price <= 5 |> filter price <= 9.5 |> filter price <= 5.0");
        assert_eq!(n.filter_atoms(), vec![AtomicPredicate::le("price", 5)]);
    }

    #[test]
    fn contradictory_bounds_are_marked() {
        let n = nf("filter price <= 3 |> filter price >= 7");
        assert_eq!(
            n.filters().get("price"),
            Some(&AttrFilter::EmptyInterval {
                lower: 7.into(),
                upper: 3.into()
            })
        );
        assert_eq!(n.length(), 2);
        assert_eq!(n.empty_intervals().collect::<Vec<_>>(), ["price"]);
        // Equal bounds select a point, not the empty set.
        let point = nf("filter price <= 3 |> filter price >= 3.0");
        assert_eq!(point.empty_intervals().count(), 0);
    }

    #[test]
    fn identity_and_full_bound() {
        assert_eq!(nf("first").length(), 0);
        assert_eq!(normalize(&Procedure::identity(), None).unwrap().length(), 0);
        let n = nf(
            "sort asc a |> filter a >= 1 |> filter b <= 2 |> sort desc b |> filter a <= 9 \
                    |> filter b >= 0 |> sort desc a",
        );
        assert_eq!(n.length(), 6);
        assert_eq!(n.attribute_count(), 2);
        assert_eq!(
            render(&n),
            "filter a >= 1 |> filter a <= 9 |> filter b >= 0 |> filter b <= 2 |> sort desc b |> sort desc a"
        );
    }

    #[test]
    fn disjunction_is_not_simple() {
        let p = parse_procedure("filter (a >= 1 or b >= 1)").unwrap();
        assert_eq!(normalize(&p, None), Err(Error::NotSimple));
    }

    #[test]
    fn label_bounds_need_schema() {
        let p =
            parse_procedure(r#"filter brand >= "Seagate" |> filter brand >= "Samsung""#).unwrap();
        assert_eq!(
            normalize(&p, None),
            Err(Error::UnresolvedBound("brand".into()))
        );
        let schema = Schema::new(vec![AttributeDecl::ordinal(
            "brand",
            ["Samsung", "Seagate", "Toshiba"],
        )])
        .unwrap();
        let n = normalize(&p, Some(&schema)).unwrap();
        assert_eq!(render(&n), r#"filter brand >= "Seagate""#);
        // A single label bound needs no comparison.
        let single = parse_procedure(r#"filter brand <= "Toshiba""#).unwrap();
        assert!(normalize(&single, None).is_ok());
    }

    #[test]
    fn normalization_is_idempotent_on_examples() {
        for text in [
            "sort desc price |> filter rating >= 4 |> sort asc price |> sort desc rating |> first",
            "filter price <= 3 |> filter price >= 7 |> sort asc price",
            "filter a >= 1 and b <= 2 and a >= 0",
        ] {
            let n = nf(text);
            assert_eq!(normalize(&n.to_procedure(), None).unwrap(), n, "{text}");
        }
    }

    #[test]
    fn equivalence_checker() {
        let schema = Schema::new(vec![
            AttributeDecl::numeric("price"),
            AttributeDecl::numeric("rating"),
        ])
        .unwrap();
        let c =
            Catalog::from_rows(schema, &[("x", vec!["1", "5"]), ("y", vec!["2", "5"])]).unwrap();
        let all = ["price", "rating"];
        let asc = parse_procedure("sort asc price").unwrap();
        let desc = parse_procedure("sort desc price").unwrap();
        let Equivalence::Counterexample(cx) =
            check_equivalence(&asc, &desc, &all, &c, 4, ListGuard::default()).unwrap()
        else {
            panic!("asc and desc differ");
        };
        assert_eq!(cx.len(), 2);
        assert!(
            check_equivalence(&asc, &asc, &all, &c, 4, ListGuard::default())
                .unwrap()
                .is_equivalent()
        );
        // Only rating is observed and both items share it.
        assert!(
            check_equivalence(&asc, &desc, &["rating"], &c, 4, ListGuard::default())
                .unwrap()
                .is_equivalent()
        );

        let p = parse_procedure(
            "sort desc price |> filter rating >= 4 |> sort asc price |> sort desc rating",
        )
        .unwrap();
        let n = normalize(&p, Some(c.schema())).unwrap().to_procedure();
        assert!(check_equivalence(&p, &n, &all, &c, 4, ListGuard::default())
            .unwrap()
            .is_equivalent());
    }

    #[test]
    fn equivalence_guard() {
        let schema = Schema::new(vec![AttributeDecl::numeric("a")]).unwrap();
        let rows: Vec<(&str, Vec<&str>)> = ["i0", "i1", "i2", "i3", "i4", "i5", "i6"]
            .iter()
            .map(|id| (*id, vec!["1"]))
            .collect();
        let c = Catalog::from_rows(schema, &rows).unwrap();
        let p = Procedure::identity();
        let err = check_equivalence(&p, &p, &["a"], &c, 8, ListGuard::new(1000)).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
    }
}
