//! Evaluation of filter and sort stages over ranked lists.
//!
//! Filtering keeps exactly the satisfying items in their original relative
//! order. Sorting is a stable permutation: items with equal keys keep their
//! input order, in both directions.

use crate::error::{Error, Result, SchemaError, SchemaErrors};
use crate::model::{
    AttrIdx, Catalog, CmpOp, Dir, FilterExpr, ItemRef, Procedure, RankedList, Schema, SortKey,
    Stage, Value,
};

#[derive(Debug, Clone)]
struct BoundAtom {
    attr: AttrIdx,
    op: CmpOp,
    bound: Value,
}

#[derive(Debug, Clone)]
enum Node {
    Atom(BoundAtom),
    And(Vec<Node>),
    Or(Vec<Node>),
}

impl Node {
    fn bind(expr: &FilterExpr, schema: &Schema, errors: &mut Vec<SchemaError>) -> Option<Self> {
        match expr {
            FilterExpr::Atom(a) => {
                let bound = schema
                    .lookup(&a.attr)
                    .and_then(|idx| Ok((idx, schema.resolve_literal(idx, &a.bound)?)));
                match bound {
                    Ok((attr, bound)) => Some(Node::Atom(BoundAtom {
                        attr,
                        op: a.op,
                        bound,
                    })),
                    Err(e) => {
                        errors.push(e);
                        None
                    }
                }
            }
            FilterExpr::And(xs) | FilterExpr::Or(xs) => {
                // Bind every child so all violations are reported.
                let parts: Vec<_> = xs.iter().map(|x| Self::bind(x, schema, errors)).collect();
                let parts = parts.into_iter().collect::<Option<Vec<_>>>()?;
                Some(if matches!(expr, FilterExpr::And(_)) {
                    Node::And(parts)
                } else {
                    Node::Or(parts)
                })
            }
        }
    }

    fn holds(&self, catalog: &Catalog, item: ItemRef) -> bool {
        match self {
            Node::Atom(a) => {
                a.op.holds(catalog.value(item, a.attr).cmp_same_attr(&a.bound))
            }
            Node::And(xs) => xs.iter().all(|x| x.holds(catalog, item)),
            Node::Or(xs) => xs.iter().any(|x| x.holds(catalog, item)),
        }
    }
}

/// A filter expression resolved against a schema.
#[derive(Debug, Clone)]
pub struct CompiledFilter(Node);

impl CompiledFilter {
    pub fn compile(expr: &FilterExpr, schema: &Schema) -> Result<Self> {
        let mut errors = Vec::new();
        match Node::bind(expr, schema, &mut errors) {
            Some(node) if errors.is_empty() => Ok(CompiledFilter(node)),
            _ => Err(SchemaErrors(errors).into()),
        }
    }

    pub fn holds(&self, catalog: &Catalog, item: ItemRef) -> bool {
        self.0.holds(catalog, item)
    }

    pub fn apply(&self, list: &[ItemRef], catalog: &Catalog) -> RankedList {
        list.iter()
            .copied()
            .filter(|&x| self.holds(catalog, x))
            .collect()
    }
}

#[derive(Debug, Clone)]
enum PlanStage {
    Filter(CompiledFilter),
    Sort(Dir, AttrIdx),
}

/// A procedure compiled against a schema, ready to run over many lists.
#[derive(Debug, Clone)]
pub struct Plan {
    stages: Vec<PlanStage>,
    take_first: bool,
}

impl Plan {
    pub fn compile(p: &Procedure, schema: &Schema) -> Result<Self> {
        let mut errors = Vec::new();
        let mut stages = Vec::with_capacity(p.stages.len());
        for stage in &p.stages {
            match stage {
                Stage::Filter(e) => {
                    if let Some(node) = Node::bind(e, schema, &mut errors) {
                        stages.push(PlanStage::Filter(CompiledFilter(node)));
                    }
                }
                Stage::Sort(k) => match schema.lookup(&k.attr) {
                    Ok(idx) => stages.push(PlanStage::Sort(k.dir, idx)),
                    Err(e) => errors.push(e),
                },
            }
        }
        if errors.is_empty() {
            Ok(Plan {
                stages,
                take_first: p.take_first,
            })
        } else {
            Err(SchemaErrors(errors).into())
        }
    }

    pub fn takes_first(&self) -> bool {
        self.take_first
    }

    /// Runs the filter/sort stages only, ignoring any `first` projection.
    pub fn run_stages(&self, list: &[ItemRef], catalog: &Catalog) -> RankedList {
        let mut cur: Vec<ItemRef> = list.to_vec();
        for stage in &self.stages {
            match stage {
                PlanStage::Filter(f) => cur.retain(|&x| f.holds(catalog, x)),
                PlanStage::Sort(dir, attr) => sort_in_place(&mut cur, *dir, *attr, catalog),
            }
        }
        RankedList(cur)
    }

    /// Runs the whole procedure. With `first` attached the result is a
    /// singleton, or `EmptyChoice` when nothing survives the stages.
    pub fn run(&self, list: &[ItemRef], catalog: &Catalog) -> Result<RankedList> {
        let out = self.run_stages(list, catalog);
        if self.take_first {
            Ok(RankedList(vec![first(&out)?]))
        } else {
            Ok(out)
        }
    }
}

fn sort_in_place(list: &mut [ItemRef], dir: Dir, attr: AttrIdx, catalog: &Catalog) {
    // slice::sort_by is stable.
    list.sort_by(|&x, &y| dir.orient(catalog.value(x, attr).cmp_same_attr(catalog.value(y, attr))));
}

pub fn apply_filter(pred: &FilterExpr, list: &RankedList, catalog: &Catalog) -> Result<RankedList> {
    Ok(CompiledFilter::compile(pred, catalog.schema())?.apply(list, catalog))
}

pub fn apply_sort(key: &SortKey, list: &RankedList, catalog: &Catalog) -> Result<RankedList> {
    let attr = catalog.schema().lookup(&key.attr)?;
    let mut out = list.to_vec();
    sort_in_place(&mut out, key.dir, attr, catalog);
    Ok(RankedList(out))
}

pub fn apply_procedure(p: &Procedure, list: &RankedList, catalog: &Catalog) -> Result<RankedList> {
    Plan::compile(p, catalog.schema())?.run(list, catalog)
}

/// Head of the list; `EmptyChoice` on an empty list.
pub fn first(list: &[ItemRef]) -> Result<ItemRef> {
    list.first().copied().ok_or(Error::EmptyChoice)
}

/// Pointwise equality of attribute values on two equally long lists.
pub fn equivalent_under(
    l1: &[ItemRef],
    l2: &[ItemRef],
    attrs: &[AttrIdx],
    catalog: &Catalog,
) -> bool {
    l1.len() == l2.len()
        && l1
            .iter()
            .zip(l2)
            .all(|(&x, &y)| items_equivalent(x, y, attrs, catalog))
}

pub fn items_equivalent(x: ItemRef, y: ItemRef, attrs: &[AttrIdx], catalog: &Catalog) -> bool {
    attrs.iter().all(|&a| {
        catalog
            .value(x, a)
            .cmp_same_attr(catalog.value(y, a))
            .is_eq()
    })
}

/// `l1 ≃_A l2` for the named attribute set `A`.
pub fn a_equivalent_lists(
    l1: &RankedList,
    l2: &RankedList,
    attrs: &[&str],
    catalog: &Catalog,
) -> Result<bool> {
    let idx = attrs
        .iter()
        .map(|a| catalog.schema().lookup(a))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(equivalent_under(l1, l2, &idx, catalog))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_filter_expr, parse_procedure};
    use crate::model::{AttributeDecl, Schema};

    fn shop(rows: &[(&str, Vec<&str>)]) -> Catalog {
        let schema = Schema::new(vec![
            AttributeDecl::numeric("price"),
            AttributeDecl::numeric("rating"),
        ])
        .unwrap();
        Catalog::from_rows(schema, rows).unwrap()
    }

    fn ids(l: &RankedList, c: &Catalog) -> Vec<String> {
        l.ids(c).into_iter().map(String::from).collect()
    }

    #[test]
    fn filter_keeps_order() {
        let c = shop(&[
            ("x1", vec!["12", "1"]),
            ("x2", vec!["9", "1"]),
            ("x3", vec!["10", "1"]),
            ("x4", vec!["3", "1"]),
        ]);
        let pred = parse_filter_expr("price <= 10").unwrap();
        let out = apply_filter(&pred, &c.full_list(), &c).unwrap();
        assert_eq!(ids(&out, &c), ["x2", "x3", "x4"]);

        let empty = parse_filter_expr("price <= 10 and price >= 11").unwrap();
        assert!(apply_filter(&empty, &c.full_list(), &c).unwrap().is_empty());
    }

    #[test]
    fn stable_descending_sort() {
        let c = shop(&[
            ("x1", vec!["1", "3"]),
            ("x2", vec!["1", "5"]),
            ("x3", vec!["1", "3"]),
            ("x4", vec!["1", "4"]),
        ]);
        let out = apply_sort(&SortKey::desc("rating"), &c.full_list(), &c).unwrap();
        assert_eq!(ids(&out, &c), ["x2", "x4", "x1", "x3"]);

        let sorted = apply_sort(&SortKey::asc("rating"), &c.full_list(), &c).unwrap();
        assert_eq!(
            apply_sort(&SortKey::asc("rating"), &sorted, &c).unwrap(),
            sorted
        );

        let single = RankedList::from_ids(&c, &["x3"]).unwrap();
        assert_eq!(
            apply_sort(&SortKey::desc("rating"), &single, &c).unwrap(),
            single
        );
    }

    #[test]
    fn procedure_with_first() {
        let c = shop(&[
            ("x1", vec!["5", "2"]),
            ("x2", vec!["3", "3"]),
            ("x3", vec!["3", "4"]),
            ("x4", vec!["1", "1"]),
        ]);
        let p = parse_procedure("filter rating >= 3 |> sort asc price |> first").unwrap();
        let out = apply_procedure(&p, &c.full_list(), &c).unwrap();
        assert_eq!(ids(&out, &c), ["x2"]);

        let identity = Procedure::identity();
        assert_eq!(
            apply_procedure(&identity, &c.full_list(), &c).unwrap(),
            c.full_list()
        );

        let none = parse_procedure("filter price <= 3 |> filter price >= 7").unwrap();
        assert!(apply_procedure(&none, &c.full_list(), &c)
            .unwrap()
            .is_empty());
        let none_first = none.clone().then_first();
        assert_eq!(
            apply_procedure(&none_first, &c.full_list(), &c),
            Err(Error::EmptyChoice)
        );
    }

    #[test]
    fn first_of_lists() {
        let c = shop(&[
            ("x2", vec!["1", "1"]),
            ("x4", vec!["1", "1"]),
            ("x9", vec!["1", "1"]),
        ]);
        let l = RankedList::from_ids(&c, &["x2", "x4"]).unwrap();
        assert_eq!(c.id(first(&l).unwrap()), "x2");
        assert_eq!(first(&[]), Err(Error::EmptyChoice));
        let l = RankedList::from_ids(&c, &["x9"]).unwrap();
        assert_eq!(c.id(first(&l).unwrap()), "x9");
    }

    #[test]
    fn a_equivalence() {
        let c = shop(&[
            ("x1", vec!["5", "2"]),
            ("x2", vec!["5", "2"]),
            ("x3", vec!["5", "3"]),
        ]);
        let l1 = RankedList::from_ids(&c, &["x1"]).unwrap();
        let l2 = RankedList::from_ids(&c, &["x2"]).unwrap();
        let l3 = RankedList::from_ids(&c, &["x3"]).unwrap();
        let both = ["price", "rating"];
        assert!(a_equivalent_lists(&l1, &l2, &both, &c).unwrap());
        assert!(!a_equivalent_lists(&l1, &l3, &both, &c).unwrap());
        assert!(a_equivalent_lists(&l1, &l3, &["price"], &c).unwrap());
        assert!(!a_equivalent_lists(&l1, &c.full_list(), &both, &c).unwrap());
        assert!(a_equivalent_lists(&c.full_list(), &c.full_list(), &both, &c).unwrap());
        assert!(a_equivalent_lists(&l1, &l2, &["weight"], &c).is_err());
    }

    #[test]
    fn schema_errors_surface() {
        let c = shop(&[("x1", vec!["5", "2"])]);
        let p = parse_procedure("filter weight >= 1 |> sort asc colour").unwrap();
        let Err(Error::Schema(errs)) = apply_procedure(&p, &c.full_list(), &c) else {
            panic!("expected schema errors");
        };
        assert_eq!(errs.0.len(), 2);
    }
}
