//! Satisficing, local maximization, element-by-element maximization and the
//! unit step-count cost model.
//!
//! Cost model: a filter or sort stage costs one step, a pairwise comparison
//! one step, a satisficing inspection one step.

use std::collections::HashSet;

use serde::Serialize;

use crate::engine::{equivalent_under, first, CompiledFilter, Plan};
use crate::error::{Error, Result};
use crate::model::{
    AtomicPredicate, AttrIdx, Catalog, CostReport, Dir, FilterExpr, ItemRef, PreferenceSpec,
    Procedure, RankedList, Schema, SortKey, Stage, Verdict,
};
use crate::normalizer::{normalize, Equivalence};
use crate::preference::{synthesize_procedure, CompiledSpec, PrefOutcome};
use crate::testkit::{enumerate_lists, ListGuard};

/// The satisfactory alternatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatisficingSet {
    Predicate(FilterExpr),
    Members(HashSet<ItemRef>),
}

impl SatisficingSet {
    pub fn members<S: AsRef<str>>(catalog: &Catalog, ids: &[S]) -> Result<Self> {
        let set = ids
            .iter()
            .map(|id| catalog.resolve(id.as_ref()))
            .collect::<Result<HashSet<_>, _>>()?;
        Ok(SatisficingSet::Members(set))
    }

    /// Membership test for every item of `catalog`.
    pub fn membership<'a>(&'a self, catalog: &'a Catalog) -> Result<impl Fn(ItemRef) -> bool + 'a> {
        let compiled = match self {
            SatisficingSet::Predicate(e) => Some(CompiledFilter::compile(e, catalog.schema())?),
            SatisficingSet::Members(_) => None,
        };
        Ok(move |x: ItemRef| match (self, &compiled) {
            (SatisficingSet::Members(set), _) => set.contains(&x),
            (_, Some(f)) => f.holds(catalog, x),
            (SatisficingSet::Predicate(_), None) => unreachable!("predicate is compiled"),
        })
    }
}

/// First element in `S`, or the last element when none is.
pub fn satisfice_by(l: &[ItemRef], mut in_set: impl FnMut(ItemRef) -> bool) -> Result<ItemRef> {
    let last = *l.last().ok_or(Error::EmptyChoice)?;
    Ok(l.iter().copied().find(|&x| in_set(x)).unwrap_or(last))
}

pub fn satisfice(s: &SatisficingSet, l: &[ItemRef], catalog: &Catalog) -> Result<ItemRef> {
    satisfice_by(l, s.membership(catalog)?)
}

/// Scans the maximal prefix whose items agree with the head on every key
/// attribute and returns its best element on `target`, earliest on ties.
/// `desc` picks the largest target value, `asc` the smallest.
pub fn local_max(
    target: &SortKey,
    keys: &[&str],
    l: &[ItemRef],
    catalog: &Catalog,
) -> Result<ItemRef> {
    let schema = catalog.schema();
    let a = schema.lookup(&target.attr)?;
    let keys = keys
        .iter()
        .map(|k| schema.lookup(k))
        .collect::<Result<Vec<_>, _>>()?;
    local_max_idx(target.dir, a, &keys, l, catalog)
}

fn local_max_idx(
    dir: Dir,
    a: AttrIdx,
    keys: &[AttrIdx],
    l: &[ItemRef],
    catalog: &Catalog,
) -> Result<ItemRef> {
    let head = first(l)?;
    let mut best = head;
    for &x in &l[1..] {
        if !equivalent_under(&[x], &[head], keys, catalog) {
            break;
        }
        if dir
            .orient(catalog.value(x, a).cmp_same_attr(catalog.value(best, a)))
            .is_lt()
        {
            best = x;
        }
    }
    Ok(best)
}

/// Sequential tournament under the spec's preference relation. The
/// incumbent survives unless strictly beaten. Returns the winner and the
/// number of comparisons, `n - 1`.
pub fn element_by_element_max(
    spec: &PreferenceSpec,
    l: &[ItemRef],
    catalog: &Catalog,
) -> Result<(ItemRef, usize)> {
    let compiled = CompiledSpec::compile(spec, catalog.schema())?;
    element_by_element_with(&compiled, l, catalog)
}

pub fn element_by_element_with(
    spec: &CompiledSpec,
    l: &[ItemRef],
    catalog: &Catalog,
) -> Result<(ItemRef, usize)> {
    let mut best = first(l)?;
    let mut comparisons = 0;
    for &x in &l[1..] {
        comparisons += 1;
        if spec.compare(catalog, x, best) == PrefOutcome::StrictlyPrefer {
            best = x;
        }
    }
    Ok((best, comparisons))
}

/// Step counts of the synthesized procedure against element-by-element
/// maximization on a list of length `n`. The verdict compares the `3N`
/// bound with `n - 1`; the actual normalized length is reported alongside.
pub fn compare_costs(
    spec: &PreferenceSpec,
    n: usize,
    schema: Option<&Schema>,
) -> Result<CostReport> {
    let p = synthesize_procedure(spec)?;
    let nf = normalize(&p, schema)?;
    let attribute_count = spec.attributes().len();
    Ok(cost_report(attribute_count, nf.length(), n, None))
}

/// Cost report for `N` attributes and a list of length `n`, with the
/// procedure length taken at its `3N` bound.
pub fn cost_for(attribute_count: usize, n: usize) -> CostReport {
    cost_report(attribute_count, 3 * attribute_count, n, None)
}

fn cost_report(
    attribute_count: usize,
    procedure_length: usize,
    n: usize,
    filtered: Option<usize>,
) -> CostReport {
    let step_bound = 3 * attribute_count;
    let baseline_comparisons = n.saturating_sub(1);
    CostReport {
        procedure_length,
        attribute_count,
        input_length: n,
        filtered_length: filtered,
        baseline_comparisons,
        step_bound,
        verdict: Verdict::from_steps(step_bound, baseline_comparisons),
    }
}

/// Procedure-then-satisfice against element-by-element maximization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SatisficeCost {
    pub attribute_count: usize,
    pub input_length: usize,
    pub filtered_length: usize,
    /// `n′ + 3N` against `n`: procedure quicker iff `n > n′ + 3N`.
    pub verdict: Verdict,
    /// Secondary total: `3N + n′` steps against `n - 1` comparisons.
    pub procedure_steps: usize,
    pub baseline_comparisons: usize,
    pub secondary_verdict: Verdict,
}

pub fn satisfice_cost_check(
    attribute_count: usize,
    n: usize,
    filtered: usize,
) -> Result<SatisficeCost> {
    if filtered > n {
        return Err(Error::InvalidArgument(format!(
            "filtered length {filtered} exceeds list length {n}"
        )));
    }
    let procedure_steps = 3 * attribute_count + filtered;
    let baseline_comparisons = n.saturating_sub(1);
    Ok(SatisficeCost {
        attribute_count,
        input_length: n,
        filtered_length: filtered,
        verdict: Verdict::from_steps(procedure_steps, n),
        procedure_steps,
        baseline_comparisons,
        secondary_verdict: Verdict::from_steps(procedure_steps, baseline_comparisons),
    })
}

/// Runs the filter and sort stages of `p` (any `first` is ignored), then
/// satisfices on `missing`. Fails with `NoSatisfactoryElement` unless some
/// item of the output satisfies `missing`.
pub fn satisfice_after_procedure(
    p: &Procedure,
    missing: &AtomicPredicate,
    l: &[ItemRef],
    catalog: &Catalog,
) -> Result<ItemRef> {
    let plan = Plan::compile(p, catalog.schema())?;
    let pred = CompiledFilter::compile(&FilterExpr::Atom(missing.clone()), catalog.schema())?;
    satisfice_after_plan(&plan, &pred, l, catalog)
}

pub(crate) fn satisfice_after_plan(
    plan: &Plan,
    missing: &CompiledFilter,
    l: &[ItemRef],
    catalog: &Catalog,
) -> Result<ItemRef> {
    let out = plan.run_stages(l, catalog);
    if !out.iter().any(|&x| missing.holds(catalog, x)) {
        return Err(Error::NoSatisfactoryElement);
    }
    satisfice_by(&out, |x| missing.holds(catalog, x))
}

/// Both sides of "the first element of the synthesized procedure is the
/// satisficing choice when S is the set of maximal elements".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaximalSetOutcome {
    pub by_procedure: ItemRef,
    pub by_satisficing: ItemRef,
}

impl MaximalSetOutcome {
    pub fn holds(&self) -> bool {
        self.by_procedure == self.by_satisficing
    }
}

/// Items of the universe that satisfy the property and are weakly preferred
/// to every item. Empty when nothing satisfies the property.
pub fn maximal_elements(spec: &CompiledSpec, universe: &Catalog) -> HashSet<ItemRef> {
    universe
        .refs()
        .filter(|&x| {
            spec.satisfies(universe, x)
                && universe.refs().all(|y| spec.weakly_prefers(universe, x, y))
        })
        .collect()
}

/// Computes `first(P(l))` for the synthesized procedure and the satisficing
/// choice with S the maximal elements of the universe. Lists holding no
/// member of S are rejected with `NoSatisfactoryElement`.
pub fn satisficing_as_maximal_set(
    spec: &PreferenceSpec,
    l: &[ItemRef],
    universe: &Catalog,
) -> Result<MaximalSetOutcome> {
    let compiled = CompiledSpec::compile(spec, universe.schema())?;
    let plan = Plan::compile(&synthesize_procedure(spec)?, universe.schema())?;
    let s = maximal_elements(&compiled, universe);
    maximal_set_with(&plan, &s, l, universe)
}

pub(crate) fn maximal_set_with(
    plan: &Plan,
    s: &HashSet<ItemRef>,
    l: &[ItemRef],
    universe: &Catalog,
) -> Result<MaximalSetOutcome> {
    if !l.iter().any(|x| s.contains(x)) {
        return Err(Error::NoSatisfactoryElement);
    }
    Ok(MaximalSetOutcome {
        by_procedure: first(&plan.run_stages(l, universe))?,
        by_satisficing: satisfice_by(l, |x| s.contains(&x))?,
    })
}

/// Exhaustively compares, on every list up to `max_len`,
/// `P |> sort target |> sort key_n |> ... |> sort key_1 |> first`
/// with local maximization on `target` after `P |> sort key_n |> ... |> sort key_1`.
/// `keys` are in priority order (`keys[0]` applied last). Lists on which `P`
/// leaves nothing are skipped, both sides being undefined there.
pub fn local_max_equivalence_check(
    target: &SortKey,
    keys: &[SortKey],
    p: &Procedure,
    universe: &Catalog,
    max_len: usize,
    guard: ListGuard,
) -> Result<Equivalence> {
    let schema = universe.schema();
    let key_sorts: Vec<Stage> = keys.iter().rev().cloned().map(Stage::Sort).collect();
    let mut lhs = p.stages.clone();
    lhs.push(Stage::Sort(target.clone()));
    lhs.extend(key_sorts.iter().cloned());
    let lhs = Plan::compile(&Procedure::new(lhs).then_first(), schema)?;
    let mut rhs = p.stages.clone();
    rhs.extend(key_sorts);
    let rhs = Plan::compile(&Procedure::new(rhs), schema)?;
    let a = schema.lookup(&target.attr)?;
    let key_idx = keys
        .iter()
        .map(|k| schema.lookup(&k.attr))
        .collect::<Result<Vec<_>, _>>()?;
    for l in enumerate_lists(universe, max_len, guard)? {
        let left = match lhs.run(&l, universe) {
            Ok(out) => out[0],
            Err(Error::EmptyChoice) => continue,
            Err(e) => return Err(e),
        };
        let right = local_max_idx(
            target.dir,
            a,
            &key_idx,
            &rhs.run_stages(&l, universe),
            universe,
        )?;
        if left != right {
            return Ok(Equivalence::Counterexample(l));
        }
    }
    Ok(Equivalence::Equivalent)
}

/// `first(P(filter missing l))`, the left side of the satisficing identity.
pub fn first_after_filtering(
    p: &Procedure,
    missing: &AtomicPredicate,
    l: &RankedList,
    catalog: &Catalog,
) -> Result<ItemRef> {
    let mut stages = vec![Stage::Filter(FilterExpr::Atom(missing.clone()))];
    stages.extend(p.stages.iter().cloned());
    let plan = Plan::compile(&Procedure::new(stages), catalog.schema())?;
    first(&plan.run_stages(l, catalog))
}
