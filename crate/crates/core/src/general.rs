//! Filters built from unions and intersections of atomic filters.
//!
//! Every such filter is put in conjunctive normal form: an intersection of
//! clauses, each clause a union of atomic filters. Atoms are treated as
//! opaque propositions, so `a >= 5` and `a >= 3` are never simplified
//! against each other.

use std::fmt;

use crate::engine::CompiledFilter;
use crate::error::{Error, Result};
use crate::model::{
    validate_procedure, AtomicPredicate, Catalog, FilterExpr, PreferenceSpec, Procedure,
    RankedList, Schema, SortKey, Stage,
};
use crate::normalizer::surviving_sorts;
use crate::preference::derive_spec;

pub const DEFAULT_CLAUSE_CAP: usize = 4096;

/// Conjunction of clauses; each clause is a disjunction of atoms.
///
/// Canonical: atoms sorted within a clause, clauses sorted, no duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFilter {
    clauses: Vec<Vec<AtomicPredicate>>,
}

impl CnfFilter {
    pub fn from_clauses(clauses: Vec<Vec<AtomicPredicate>>) -> Self {
        let mut clauses: Vec<Vec<AtomicPredicate>> = clauses
            .into_iter()
            .map(|mut c| {
                c.sort();
                c.dedup();
                c
            })
            .collect();
        clauses.sort();
        clauses.dedup();
        CnfFilter { clauses }
    }

    /// The vacuous conjunction.
    pub fn always() -> Self {
        CnfFilter {
            clauses: Vec::new(),
        }
    }

    pub fn clauses(&self) -> &[Vec<AtomicPredicate>] {
        &self.clauses
    }

    pub fn is_vacuous(&self) -> bool {
        self.clauses.is_empty()
    }

    /// True when every clause is a single atom.
    pub fn is_conjunctive(&self) -> bool {
        self.clauses.iter().all(|c| c.len() == 1)
    }

    pub fn eval_with(&self, atom: &mut impl FnMut(&AtomicPredicate) -> bool) -> bool {
        self.clauses.iter().all(|c| c.iter().any(&mut *atom))
    }

    /// As an expression tree, `None` when vacuous.
    pub fn to_expr(&self) -> Option<FilterExpr> {
        if self.clauses.is_empty() {
            return None;
        }
        let clauses = self
            .clauses
            .iter()
            .map(|c| FilterExpr::or(c.iter().cloned().map(FilterExpr::Atom).collect()))
            .collect();
        Some(FilterExpr::and(clauses))
    }
}

impl fmt::Display for CnfFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_expr() {
            Some(e) => write!(f, "{e}"),
            None => f.write_str("<always>"),
        }
    }
}

fn cnf_clauses(e: &FilterExpr, cap: usize) -> Result<Vec<Vec<AtomicPredicate>>> {
    let too_many = |needed: usize| Error::ResourceLimit {
        what: "CNF clauses",
        needed: needed as u128,
        limit: cap as u128,
    };
    match e {
        FilterExpr::Atom(a) => Ok(vec![vec![a.clone()]]),
        FilterExpr::And(ops) => {
            let mut out = Vec::new();
            for op in ops {
                out.extend(cnf_clauses(op, cap)?);
                if out.len() > cap {
                    return Err(too_many(out.len()));
                }
            }
            Ok(out)
        }
        FilterExpr::Or(ops) => {
            // The empty disjunction is a single empty clause (false).
            let mut acc: Vec<Vec<AtomicPredicate>> = vec![Vec::new()];
            for op in ops {
                let rhs = cnf_clauses(op, cap)?;
                let needed = acc.len().saturating_mul(rhs.len());
                if needed > cap {
                    return Err(too_many(needed));
                }
                let mut next = Vec::with_capacity(needed);
                for l in &acc {
                    for r in &rhs {
                        let mut c = l.clone();
                        c.extend(r.iter().cloned());
                        c.sort();
                        c.dedup();
                        next.push(c);
                    }
                }
                next.sort();
                next.dedup();
                acc = next;
            }
            Ok(acc)
        }
    }
}

/// Distributes Or over And and canonicalizes. `cap` bounds the number of
/// clauses at every step (default [`DEFAULT_CLAUSE_CAP`]).
pub fn to_cnf(e: &FilterExpr, cap: Option<usize>) -> Result<CnfFilter> {
    let cap = cap.unwrap_or(DEFAULT_CLAUSE_CAP);
    Ok(CnfFilter::from_clauses(cnf_clauses(e, cap)?))
}

/// Order-preserving selection of the items passing every clause.
pub fn apply_general_filter(
    f: &CnfFilter,
    l: &RankedList,
    catalog: &Catalog,
) -> Result<RankedList> {
    match f.to_expr() {
        None => Ok(l.clone()),
        Some(e) => Ok(CompiledFilter::compile(&e, catalog.schema())?.apply(l, catalog)),
    }
}

/// CNF of the intersection of all filter stages.
fn procedure_cnf(p: &Procedure, cap: Option<usize>) -> Result<CnfFilter> {
    let filters: Vec<FilterExpr> = p
        .stages
        .iter()
        .filter_map(|s| match s {
            Stage::Filter(e) => Some(e.clone()),
            Stage::Sort(_) => None,
        })
        .collect();
    if filters.is_empty() {
        return Ok(CnfFilter::always());
    }
    to_cnf(&FilterExpr::and(filters), cap)
}

/// Normal form of a general procedure: one CNF filter, then the surviving
/// sorts in application order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralNormalForm {
    pub filter: CnfFilter,
    pub sorts: Vec<SortKey>,
    pub take_first: bool,
}

impl GeneralNormalForm {
    /// Clause count plus sort count. Unlike the simple case this is not
    /// bounded by three times the number of attributes.
    pub fn length(&self) -> usize {
        self.filter.clauses().len() + self.sorts.len()
    }

    pub fn to_procedure(&self) -> Procedure {
        let mut stages: Vec<Stage> = self
            .filter
            .to_expr()
            .map(Stage::Filter)
            .into_iter()
            .collect();
        stages.extend(self.sorts.iter().cloned().map(Stage::Sort));
        Procedure {
            stages,
            take_first: self.take_first,
        }
    }
}

pub fn normalize_general(p: &Procedure, cap: Option<usize>) -> Result<GeneralNormalForm> {
    Ok(GeneralNormalForm {
        filter: procedure_cnf(p, cap)?,
        sorts: surviving_sorts(p),
        take_first: p.take_first,
    })
}

/// The spec a general procedure decides by. Simple procedures get exactly
/// [`derive_spec`]'s result.
pub fn derive_general_spec(
    p: &Procedure,
    schema: Option<&Schema>,
    cap: Option<usize>,
) -> Result<PreferenceSpec> {
    if p.is_simple() {
        return derive_spec(p, schema);
    }
    if let Some(schema) = schema {
        validate_procedure(p, schema).map_err(crate::error::SchemaErrors)?;
    }
    let nf = normalize_general(p, cap)?;
    PreferenceSpec::new(nf.filter.to_expr(), nf.sorts.into_iter().rev().collect())
}

/// One filter stage carrying the CNF of the property, then the sorts from
/// lowest to highest priority.
pub fn synthesize_general_procedure(
    spec: &PreferenceSpec,
    cap: Option<usize>,
) -> Result<Procedure> {
    let cnf = match spec.property() {
        Some(e) => to_cnf(e, cap)?,
        None => CnfFilter::always(),
    };
    let mut stages: Vec<Stage> = cnf.to_expr().map(Stage::Filter).into_iter().collect();
    stages.extend(spec.ordering().iter().rev().cloned().map(Stage::Sort));
    Ok(Procedure::new(stages))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_filter_expr, parse_procedure, print_procedure};
    use crate::model::AttributeDecl;

    fn cnf(text: &str) -> CnfFilter {
        to_cnf(&parse_filter_expr(text).unwrap(), None).unwrap()
    }

    #[test]
    fn house_query_cnf() {
        let f = cnf("price <= 2000 and (bedrooms >= 3 or distance <= 1)");
        assert_eq!(
            f.clauses(),
            &[
                vec![
                    AtomicPredicate::ge("bedrooms", 3),
                    AtomicPredicate::le("distance", 1)
                ],
                vec![AtomicPredicate::le("price", 2000)],
            ]
        );
        assert_eq!(
            f.to_string(),
            "(bedrooms >= 3 or distance <= 1) and price <= 2000"
        );
    }

    #[test]
    fn small_cases() {
        assert_eq!(
            cnf("a >= 1").clauses(),
            &[vec![AtomicPredicate::ge("a", 1)]]
        );
        assert_eq!(
            cnf("(a >= 1 or b >= 1) and (b >= 1 or a >= 1)")
                .clauses()
                .len(),
            1
        );
        let d = cnf("a >= 1 and b >= 1 or c >= 1");
        assert_eq!(
            d.clauses(),
            &[
                vec![AtomicPredicate::ge("a", 1), AtomicPredicate::ge("c", 1)],
                vec![AtomicPredicate::ge("b", 1), AtomicPredicate::ge("c", 1)],
            ]
        );
    }

    #[test]
    fn clause_cap() {
        // (a1 and b1) or (a2 and b2) or ... distributes into 2^k clauses.
        let text = (0..13)
            .map(|i| format!("x{i} >= 1 and y{i} >= 1"))
            .collect::<Vec<_>>()
            .join(" or ");
        let e = parse_filter_expr(&text).unwrap();
        assert!(matches!(to_cnf(&e, None), Err(Error::ResourceLimit { .. })));
        assert_eq!(to_cnf(&e, Some(1 << 13)).unwrap().clauses().len(), 1 << 13);
    }

    fn houses() -> Catalog {
        let schema = Schema::new(vec![
            AttributeDecl::numeric("price"),
            AttributeDecl::numeric("bedrooms"),
            AttributeDecl::numeric("distance"),
        ])
        .unwrap();
        Catalog::from_rows(
            schema,
            &[
                ("h1", vec!["1800", "2", "3"]),
                ("h2", vec!["1900", "3", "5"]),
                ("h3", vec!["2500", "4", "0.5"]),
                ("h4", vec!["1500", "1", "0.8"]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn general_filter_on_houses() {
        let c = houses();
        let f = cnf("price <= 2000 and (bedrooms >= 3 or distance <= 1)");
        let out = apply_general_filter(&f, &c.full_list(), &c).unwrap();
        // Brute-force membership.
        let expected: Vec<&str> = c
            .items()
            .iter()
            .filter(|it| {
                let v = |a: usize| it.values[a].to_string().parse::<f64>().unwrap();
                v(0) <= 2000.0 && (v(1) >= 3.0 || v(2) <= 1.0)
            })
            .map(|it| it.id.as_str())
            .collect();
        assert_eq!(out.ids(&c), expected);
        assert_eq!(out.ids(&c), ["h2", "h4"]);
        assert_eq!(
            apply_general_filter(&CnfFilter::always(), &c.full_list(), &c).unwrap(),
            c.full_list()
        );
        assert!(
            apply_general_filter(&cnf("price >= 1 and price <= 0"), &c.full_list(), &c)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn house_spec_round_trip() {
        let p =
            parse_procedure("filter (bedrooms >= 3 or distance <= 1) |> sort asc price").unwrap();
        let spec = derive_general_spec(&p, None, None).unwrap();
        assert_eq!(
            spec.property(),
            Some(&parse_filter_expr("bedrooms >= 3 or distance <= 1").unwrap())
        );
        assert_eq!(spec.ordering(), &[SortKey::asc("price")]);
        let back = synthesize_general_procedure(&spec, None).unwrap();
        assert_eq!(
            print_procedure(&back),
            "filter (bedrooms >= 3 or distance <= 1) |> sort asc price"
        );
    }

    #[test]
    fn simple_procedures_match_simple_derivation() {
        let p =
            parse_procedure("filter a >= 1 |> sort asc b |> filter a >= 3 |> sort desc a").unwrap();
        assert_eq!(
            derive_general_spec(&p, None, None).unwrap(),
            derive_spec(&p, None).unwrap()
        );
    }

    #[test]
    fn general_normal_form_length() {
        let p = parse_procedure(
            "sort asc price |> filter (bedrooms >= 3 or distance <= 1) |> filter price <= 2000 |> sort desc price",
        )
        .unwrap();
        let nf = normalize_general(&p, None).unwrap();
        assert_eq!(nf.length(), 3);
        assert_eq!(
            print_procedure(&nf.to_procedure()),
            "filter (bedrooms >= 3 or distance <= 1) and price <= 2000 |> sort desc price"
        );
    }
}
