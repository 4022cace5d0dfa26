//! Seeded generators and exhaustive enumerators for small universes.
//!
//! Value pools are deliberately tiny so that ties are common: the stability
//! rules of filtering and sorting only matter when items compare equal.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::general::to_cnf;
use crate::model::{
    AtomicPredicate, AttrKind, AttributeDecl, Catalog, CmpOp, Decimal, Dir, FilterExpr, Item,
    ItemRef, Literal, PreferenceSpec, Procedure, RankedList, Schema, SortKey, Stage, Value,
};
use crate::preference::derive_spec;

pub const DEFAULT_MAX_LEN: usize = 4;

/// Upper bound on the number of lists an exhaustive check may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ListGuard {
    pub max_lists: u128,
}

impl ListGuard {
    pub const DEFAULT_MAX_LISTS: u128 = 1_000_000;

    pub fn new(max_lists: u128) -> Self {
        ListGuard { max_lists }
    }

    pub fn check(&self, items: usize, max_len: usize) -> Result<u128> {
        let needed = count_lists(items, max_len);
        match needed {
            Some(n) if n <= self.max_lists => Ok(n),
            _ => Err(Error::ResourceLimit {
                what: "list enumeration",
                needed: needed.unwrap_or(u128::MAX),
                limit: self.max_lists,
            }),
        }
    }
}

impl Default for ListGuard {
    fn default() -> Self {
        ListGuard::new(Self::DEFAULT_MAX_LISTS)
    }
}

/// Number of lists with repetition of length `0..=max_len` over `items`
/// elements, or `None` on overflow.
pub fn count_lists(items: usize, max_len: usize) -> Option<u128> {
    let mut total: u128 = 0;
    let mut power: u128 = 1;
    for k in 0..=max_len {
        if k > 0 {
            power = power.checked_mul(items as u128)?;
        }
        total = total.checked_add(power)?;
    }
    Some(total)
}

/// All lists of length `0..=max_len` over the universe, with repetition,
/// shortest first and lexicographic (by catalog position) within a length.
pub fn enumerate_lists(
    universe: &Catalog,
    max_len: usize,
    guard: ListGuard,
) -> Result<ListEnumerator> {
    guard.check(universe.len(), max_len)?;
    Ok(ListEnumerator {
        items: universe.len(),
        max_len,
        current: Some(Vec::new()),
    })
}

#[derive(Debug, Clone)]
pub struct ListEnumerator {
    items: usize,
    max_len: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for ListEnumerator {
    type Item = RankedList;

    fn next(&mut self) -> Option<RankedList> {
        let cur = self.current.take()?;
        let out = RankedList(cur.iter().map(|&i| ItemRef(i)).collect());
        let mut next = cur;
        // Odometer increment; rolls over into the next length.
        let mut pos = next.len();
        loop {
            if pos == 0 {
                if next.len() < self.max_len && self.items > 0 {
                    next = vec![0; next.len() + 1];
                    self.current = Some(next);
                }
                break;
            }
            pos -= 1;
            next[pos] += 1;
            if next[pos] < self.items {
                self.current = Some(next);
                break;
            }
            next[pos] = 0;
        }
        Some(out)
    }
}

/// Every ordered pair of items, in catalog order.
pub fn pairs(universe: &Catalog) -> impl Iterator<Item = (ItemRef, ItemRef)> + '_ {
    universe
        .refs()
        .flat_map(move |x| universe.refs().map(move |y| (x, y)))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn attr_name(i: usize) -> String {
    ((b'a' + (i % 26) as u8) as char).to_string() + &"x".repeat(i / 26)
}

/// A random universe with `1..=max_items` items and `1..=max_attrs`
/// attributes. Numeric attributes draw integers from `0..pool`; ordinal ones
/// declare `pool` labels in a shuffled order and draw from them.
pub fn gen_universe(max_items: usize, max_attrs: usize, pool: usize, seed: u64) -> Catalog {
    let mut rng = rng(seed);
    let pool = pool.max(1);
    let n_items = rng.gen_range(1..=max_items.max(1));
    let n_attrs = rng.gen_range(1..=max_attrs.max(1));
    let decls: Vec<AttributeDecl> = (0..n_attrs)
        .map(|i| {
            if rng.gen_bool(0.3) {
                let mut labels: Vec<String> = (0..pool).map(|k| format!("l{k}")).collect();
                labels.shuffle(&mut rng);
                AttributeDecl::ordinal(attr_name(i), labels)
            } else {
                AttributeDecl::numeric(attr_name(i))
            }
        })
        .collect();
    let schema = Schema::new(decls).expect("generated names are distinct identifiers");
    let items = (0..n_items)
        .map(|k| {
            let values = schema
                .attributes()
                .iter()
                .map(|d| {
                    let level = rng.gen_range(0..pool);
                    match &d.kind {
                        AttrKind::Numeric => Value::Decimal(Decimal::from(level as i64)),
                        AttrKind::Ordinal(order) => Value::Ordinal {
                            order: order.clone(),
                            level,
                        },
                    }
                })
                .collect();
            Item {
                id: format!("i{k}"),
                values,
            }
        })
        .collect();
    Catalog::new(schema, items).expect("generated catalog is valid")
}

/// Candidate bounds for an attribute: observed numeric values plus one step
/// either side, or every declared label.
fn bound_pool(universe: &Catalog, decl: &AttributeDecl, idx: usize) -> Vec<Literal> {
    match &decl.kind {
        AttrKind::Ordinal(order) => order.labels().iter().cloned().map(Literal::Label).collect(),
        AttrKind::Numeric => {
            let mut vals: Vec<i64> = universe
                .items()
                .iter()
                .filter_map(|it| match &it.values[idx] {
                    Value::Decimal(d) => d.to_string().parse().ok(),
                    _ => None,
                })
                .collect();
            let lo = vals.iter().min().copied().unwrap_or(0) - 1;
            let hi = vals.iter().max().copied().unwrap_or(0) + 1;
            vals.extend([lo, hi]);
            vals.sort_unstable();
            vals.dedup();
            vals.into_iter()
                .map(|v| Literal::Decimal(Decimal::from(v)))
                .collect()
        }
    }
}

fn gen_atom(universe: &Catalog, rng: &mut ChaCha8Rng) -> AtomicPredicate {
    let attrs = universe.schema().attributes();
    let idx = rng.gen_range(0..attrs.len());
    let decl = &attrs[idx];
    let pool = bound_pool(universe, decl, idx);
    let op = if rng.gen_bool(0.5) {
        CmpOp::Ge
    } else {
        CmpOp::Le
    };
    AtomicPredicate::new(
        decl.name.clone(),
        op,
        pool.choose(rng).expect("nonempty pool").clone(),
    )
}

fn gen_sort(universe: &Catalog, rng: &mut ChaCha8Rng) -> SortKey {
    let attrs = universe.schema().attributes();
    let dir = if rng.gen_bool(0.5) {
        Dir::Asc
    } else {
        Dir::Desc
    };
    SortKey::new(dir, attrs[rng.gen_range(0..attrs.len())].name.clone())
}

fn gen_expr(universe: &Catalog, atoms: usize, rng: &mut ChaCha8Rng) -> FilterExpr {
    if atoms <= 1 {
        return FilterExpr::Atom(gen_atom(universe, rng));
    }
    let left = rng.gen_range(1..atoms);
    let l = gen_expr(universe, left, rng);
    let r = gen_expr(universe, atoms - left, rng);
    if rng.gen_bool(0.5) {
        FilterExpr::And(vec![l, r])
    } else {
        FilterExpr::Or(vec![l, r])
    }
}

/// A random And/Or tree with `1..=max_atoms` atoms over the universe.
pub fn gen_filter_expr(universe: &Catalog, max_atoms: usize, seed: u64) -> FilterExpr {
    let mut rng = rng(seed);
    let n = rng.gen_range(1..=max_atoms.max(1));
    gen_expr(universe, n, &mut rng)
}

fn gen_stages(universe: &Catalog, max_stages: usize, general: bool, seed: u64) -> Procedure {
    let mut rng = rng(seed);
    let n = rng.gen_range(0..=max_stages);
    let stages = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                let atoms = if rng.gen_bool(0.25) { 2 } else { 1 };
                let expr = if general {
                    gen_expr(universe, rng.gen_range(1..=3), &mut rng)
                } else {
                    FilterExpr::conjunction((0..atoms).map(|_| gen_atom(universe, &mut rng)))
                        .expect("at least one atom")
                };
                Stage::Filter(expr)
            } else {
                Stage::Sort(gen_sort(universe, &mut rng))
            }
        })
        .collect();
    let take_first = max_stages > 0 && rng.gen_bool(0.25);
    Procedure { stages, take_first }
}

/// A random simple procedure of at most `max_stages` filter/sort stages
/// using only the universe's attributes, optionally ending in `first`.
pub fn gen_procedure(universe: &Catalog, max_stages: usize, seed: u64) -> Procedure {
    gen_stages(universe, max_stages, false, seed)
}

/// Like [`gen_procedure`] but filters are arbitrary And/Or trees.
pub fn gen_general_procedure(universe: &Catalog, max_stages: usize, seed: u64) -> Procedure {
    gen_stages(universe, max_stages, true, seed)
}

fn gen_ordering(universe: &Catalog, rng: &mut ChaCha8Rng) -> Vec<SortKey> {
    let mut names: Vec<String> = universe.schema().names().map(str::to_string).collect();
    names.shuffle(rng);
    let k = rng.gen_range(0..=names.len());
    names
        .into_iter()
        .take(k)
        .map(|a| {
            SortKey::new(
                if rng.gen_bool(0.5) {
                    Dir::Asc
                } else {
                    Dir::Desc
                },
                a,
            )
        })
        .collect()
}

/// A random simple spec in canonical form: at most one bound per attribute
/// and direction, atoms in attribute-name order with `>=` first, and a
/// random ordering over distinct attributes.
pub fn gen_spec(universe: &Catalog, seed: u64) -> PreferenceSpec {
    let mut rng = rng(seed);
    let schema = universe.schema();
    let mut names: Vec<(usize, &AttributeDecl)> = schema.attributes().iter().enumerate().collect();
    names.sort_by(|a, b| a.1.name.cmp(&b.1.name));
    let mut atoms = Vec::new();
    for (idx, decl) in names {
        let pool = bound_pool(universe, decl, idx);
        for op in [CmpOp::Ge, CmpOp::Le] {
            if rng.gen_bool(0.4) {
                let bound = pool.choose(&mut rng).expect("nonempty pool").clone();
                atoms.push(AtomicPredicate::new(decl.name.clone(), op, bound));
            }
        }
    }
    let ordering = gen_ordering(universe, &mut rng);
    PreferenceSpec::new(FilterExpr::conjunction(atoms), ordering).expect("distinct ordering")
}

/// A random general spec whose property is already in canonical CNF, with
/// bounds merged when the CNF is a plain conjunction.
pub fn gen_general_spec(universe: &Catalog, seed: u64) -> PreferenceSpec {
    let mut rng = rng(seed);
    let property = if rng.gen_bool(0.85) {
        let n = rng.gen_range(1..=4);
        let expr = gen_expr(universe, n, &mut rng);
        let cnf = to_cnf(&expr, None).expect("small expression");
        if cnf.is_conjunctive() {
            // Canonical conjunctions carry merged bounds.
            let p = Procedure::new(vec![Stage::Filter(cnf.to_expr().expect("nonempty"))]);
            derive_spec(&p, Some(universe.schema()))
                .expect("valid filter")
                .property()
                .cloned()
        } else {
            cnf.to_expr()
        }
    } else {
        None
    };
    let ordering = gen_ordering(universe, &mut rng);
    PreferenceSpec::new(property, ordering).expect("distinct ordering")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn universes_are_deterministic() {
        let a = gen_universe(5, 3, 3, 42);
        let b = gen_universe(5, 3, 3, 42);
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(gen_universe(1, 2, 3, 7).len(), 1);
    }

    #[test]
    fn unit_pool_makes_all_values_equal() {
        let c = gen_universe(5, 3, 1, 9);
        for attr in 0..c.schema().len() {
            let vals: HashSet<String> = c
                .items()
                .iter()
                .map(|it| format!("{:?}", it.values[attr]))
                .collect();
            assert_eq!(vals.len(), 1);
        }
    }

    #[test]
    fn list_counts() {
        let two = Catalog::from_rows(
            Schema::new(vec![AttributeDecl::numeric("a")]).unwrap(),
            &[("x", vec!["0"]), ("y", vec!["0"])],
        )
        .unwrap();
        let lists: Vec<RankedList> = enumerate_lists(&two, 2, ListGuard::default())
            .unwrap()
            .collect();
        assert_eq!(lists.len(), 7);
        assert!(lists[0].is_empty());
        assert_eq!(lists[1].ids(&two), ["x"]);
        assert_eq!(lists[3].ids(&two), ["x", "x"]);
        assert_eq!(lists[6].ids(&two), ["y", "y"]);
        assert_eq!(
            enumerate_lists(&two, 0, ListGuard::default())
                .unwrap()
                .count(),
            1
        );
        assert_eq!(count_lists(6, 4), Some(1555));
        assert_eq!(count_lists(0, 4), Some(1));
        assert!(enumerate_lists(&two, 40, ListGuard::default()).is_err());
    }

    #[test]
    fn enumeration_matches_count() {
        for seed in 0..10 {
            let c = gen_universe(4, 2, 2, seed);
            let n = enumerate_lists(&c, 3, ListGuard::default())
                .unwrap()
                .count();
            assert_eq!(Some(n as u128), count_lists(c.len(), 3));
        }
    }

    #[test]
    fn procedures_are_deterministic_and_valid() {
        let c = gen_universe(5, 3, 3, 1);
        for seed in 0..50 {
            let p = gen_procedure(&c, 6, seed);
            assert_eq!(p, gen_procedure(&c, 6, seed));
            assert!(p.is_simple());
            crate::model::validate_procedure(&p, c.schema()).unwrap();
            let g = gen_general_procedure(&c, 6, seed);
            crate::model::validate_procedure(&g, c.schema()).unwrap();
        }
        assert!(gen_procedure(&c, 0, 3).is_identity());
        assert!(!gen_procedure(&c, 0, 3).take_first);
    }

    #[test]
    fn specs_have_distinct_ordering_attributes() {
        for seed in 0..100 {
            let c = gen_universe(4, 3, 3, seed);
            for spec in [gen_spec(&c, seed), gen_general_spec(&c, seed)] {
                let attrs: HashSet<&str> =
                    spec.ordering().iter().map(|k| k.attr.as_str()).collect();
                assert_eq!(attrs.len(), spec.ordering().len());
            }
            assert_eq!(gen_spec(&c, seed), gen_spec(&c, seed));
        }
    }
}
