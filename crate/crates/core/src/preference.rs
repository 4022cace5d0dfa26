//! Preference relations defined by a property and a lexicographic ordering,
//! and their correspondence with filter/sort procedures.
//!
//! Priority convention: a spec's ordering lists the primary key first. In a
//! procedure the primary key is the sort applied LAST, because a later stable
//! sort dominates earlier ones. So for
//! `filter rating >= 4 |> sort asc price |> sort desc rating` the derived
//! ordering is `[desc rating, asc price]`, and synthesis reverses it back.

use std::cmp::Ordering;

use serde::Serialize;

use crate::engine::{CompiledFilter, Plan};
use crate::error::{Error, Result};
use crate::model::{
    AttrIdx, Catalog, Dir, FilterExpr, ItemRef, PreferenceSpec, Procedure, Schema, SortKey,
    SpecMode, Stage,
};
use crate::normalizer::normalize;
use crate::testkit::{enumerate_lists, ListGuard};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum LexOutcome {
    XBetter,
    YBetter,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum PrefOutcome {
    StrictlyPrefer,
    Indifferent,
    StrictlyDisprefer,
}

impl PrefOutcome {
    /// `x>y`, `x~y` or `x<y`.
    pub fn symbol(self) -> &'static str {
        match self {
            PrefOutcome::StrictlyPrefer => "x>y",
            PrefOutcome::Indifferent => "x~y",
            PrefOutcome::StrictlyDisprefer => "x<y",
        }
    }
}

/// A spec bound to a schema.
#[derive(Debug, Clone)]
pub struct CompiledSpec {
    property: Option<CompiledFilter>,
    keys: Vec<(Dir, AttrIdx)>,
}

impl CompiledSpec {
    pub fn compile(spec: &PreferenceSpec, schema: &Schema) -> Result<Self> {
        let property = spec
            .property()
            .map(|e| CompiledFilter::compile(e, schema))
            .transpose()?;
        let keys = compile_ordering(spec.ordering(), schema)?;
        Ok(CompiledSpec { property, keys })
    }

    /// `F(x)`; a vacuous property holds everywhere.
    pub fn satisfies(&self, catalog: &Catalog, x: ItemRef) -> bool {
        self.property.as_ref().is_none_or(|f| f.holds(catalog, x))
    }

    pub fn lex(&self, catalog: &Catalog, x: ItemRef, y: ItemRef) -> LexOutcome {
        lex_keys(&self.keys, catalog, x, y)
    }

    /// `A(x, y) = ¬F(y) ∨ (F(x) ∧ x ⪰ y)`.
    pub fn weakly_prefers(&self, catalog: &Catalog, x: ItemRef, y: ItemRef) -> bool {
        !self.satisfies(catalog, y)
            || (self.satisfies(catalog, x) && self.lex(catalog, x, y) != LexOutcome::YBetter)
    }

    pub fn compare(&self, catalog: &Catalog, x: ItemRef, y: ItemRef) -> PrefOutcome {
        match (
            self.weakly_prefers(catalog, x, y),
            self.weakly_prefers(catalog, y, x),
        ) {
            (true, true) => PrefOutcome::Indifferent,
            (true, false) => PrefOutcome::StrictlyPrefer,
            // Completeness rules out (false, false).
            (false, _) => PrefOutcome::StrictlyDisprefer,
        }
    }
}

fn compile_ordering(ordering: &[SortKey], schema: &Schema) -> Result<Vec<(Dir, AttrIdx)>> {
    ordering
        .iter()
        .map(|k| Ok((k.dir, schema.lookup(&k.attr)?)))
        .collect()
}

fn lex_keys(keys: &[(Dir, AttrIdx)], catalog: &Catalog, x: ItemRef, y: ItemRef) -> LexOutcome {
    for &(dir, attr) in keys {
        match dir.orient(catalog.value(x, attr).cmp_same_attr(catalog.value(y, attr))) {
            Ordering::Less => return LexOutcome::XBetter,
            Ordering::Greater => return LexOutcome::YBetter,
            Ordering::Equal => {}
        }
    }
    LexOutcome::Tie
}

/// Lexicographic comparison, primary key first. `asc` prefers the smaller
/// value, `desc` the larger.
pub fn lex_compare(
    ordering: &[SortKey],
    x: ItemRef,
    y: ItemRef,
    catalog: &Catalog,
) -> Result<LexOutcome> {
    let keys = compile_ordering(ordering, catalog.schema())?;
    Ok(lex_keys(&keys, catalog, x, y))
}

pub fn weakly_prefers(
    spec: &PreferenceSpec,
    x: ItemRef,
    y: ItemRef,
    catalog: &Catalog,
) -> Result<bool> {
    Ok(CompiledSpec::compile(spec, catalog.schema())?.weakly_prefers(catalog, x, y))
}

pub fn pref_compare(
    spec: &PreferenceSpec,
    x: ItemRef,
    y: ItemRef,
    catalog: &Catalog,
) -> Result<PrefOutcome> {
    Ok(CompiledSpec::compile(spec, catalog.schema())?.compare(catalog, x, y))
}

/// The spec a simple procedure decides by: the conjunction of its merged
/// filters and its surviving sorts, last-applied first. `first` is ignored.
pub fn derive_spec(p: &Procedure, schema: Option<&Schema>) -> Result<PreferenceSpec> {
    let nf = normalize(p, schema)?;
    let property = FilterExpr::conjunction(nf.filter_atoms());
    let ordering = nf.sorts().iter().rev().cloned().collect();
    PreferenceSpec::new(property, ordering)
}

/// One filter stage per property atom (sorted, duplicates dropped), then the
/// sorts from lowest to highest priority. General specs yield `NotSimple`.
pub fn synthesize_procedure(spec: &PreferenceSpec) -> Result<Procedure> {
    if spec.mode() == SpecMode::General {
        return Err(Error::NotSimple);
    }
    let mut atoms: Vec<_> = spec.property().map(|e| e.atoms()).unwrap_or_default();
    atoms.sort();
    atoms.dedup();
    let mut stages: Vec<Stage> = atoms
        .into_iter()
        .map(|a| Stage::Filter(FilterExpr::Atom(a.clone())))
        .collect();
    stages.extend(spec.ordering().iter().rev().cloned().map(Stage::Sort));
    Ok(Procedure::new(stages))
}

/// Does `x ⪰_P y` hold? Searches every list up to `max_len` over the
/// universe for one that contains both items and on whose output every
/// occurrence of `y` is preceded by an `x` (vacuously true when `y` was
/// filtered out). Only the filter and sort stages of `p` are run.
///
/// For `x = y` this is true exactly when `p` filters `x` out.
pub fn derived_preference_oracle(
    p: &Procedure,
    x: ItemRef,
    y: ItemRef,
    universe: &Catalog,
    max_len: usize,
    guard: ListGuard,
) -> Result<bool> {
    let plan = Plan::compile(p, universe.schema())?;
    for l in enumerate_lists(universe, max_len, guard)? {
        if !(l.contains(&x) && l.contains(&y)) {
            continue;
        }
        let out = plan.run_stages(&l, universe);
        let witnessed = (0..out.len())
            .filter(|&j| out[j] == y)
            .all(|j| (0..j).any(|i| out[i] == x));
        if witnessed {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `x ⪰_P y` for every ordered pair at once; `rel[x][y]` is indexed by
/// catalog position. Agrees with [`derived_preference_oracle`] pairwise but
/// runs the procedure once per list.
pub fn derived_preference_relation(
    p: &Procedure,
    universe: &Catalog,
    max_len: usize,
    guard: ListGuard,
) -> Result<Vec<Vec<bool>>> {
    let plan = Plan::compile(p, universe.schema())?;
    let n = universe.len();
    let mut rel = vec![vec![false; n]; n];
    let mut in_list = vec![false; n];
    let mut first_pos = vec![usize::MAX; n];
    for l in enumerate_lists(universe, max_len, guard)? {
        in_list.iter_mut().for_each(|b| *b = false);
        first_pos.iter_mut().for_each(|p| *p = usize::MAX);
        for r in l.iter() {
            in_list[r.index()] = true;
        }
        let out = plan.run_stages(&l, universe);
        for (pos, r) in out.iter().enumerate().rev() {
            first_pos[r.index()] = pos;
        }
        for x in (0..n).filter(|&x| in_list[x]) {
            for y in (0..n).filter(|&y| in_list[y]) {
                // Absent y is vacuous; otherwise x must occur before y's
                // first occurrence.
                if first_pos[y] == usize::MAX || first_pos[x] < first_pos[y] {
                    rel[x][y] = true;
                }
            }
        }
    }
    Ok(rel)
}
