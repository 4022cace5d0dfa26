//! The procedure AST: filter and sort stages plus an optional `first`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::catalog::Schema;
use super::value::Decimal;
use crate::error::SchemaError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    Asc,
    Desc,
}

impl Dir {
    pub fn keyword(self) -> &'static str {
        match self {
            Dir::Asc => "asc",
            Dir::Desc => "desc",
        }
    }

    /// Orients a raw value comparison so that `Less` means "ranked earlier".
    pub fn orient(self, ord: Ordering) -> Ordering {
        match self {
            Dir::Asc => ord,
            Dir::Desc => ord.reverse(),
        }
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Threshold comparison of an atomic predicate. `Ge` sorts before `Le`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CmpOp {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Ge => ">=",
            CmpOp::Le => "<=",
        }
    }

    pub fn holds(self, value_vs_bound: Ordering) -> bool {
        match self {
            CmpOp::Ge => value_vs_bound != Ordering::Less,
            CmpOp::Le => value_vs_bound != Ordering::Greater,
        }
    }
}

/// A predicate bound as written, before it is resolved against a schema.
///
/// Ordering is syntactic: decimals (by value) before labels (by text). It
/// only serves canonical ordering of atoms, never filtering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Literal {
    Decimal(Decimal),
    Label(String),
}

impl Literal {
    pub fn decimal(text: &str) -> Self {
        Literal::Decimal(text.parse().expect("valid decimal literal"))
    }

    pub fn label(text: impl Into<String>) -> Self {
        Literal::Label(text.into())
    }
}

impl From<i64> for Literal {
    fn from(v: i64) -> Self {
        Literal::Decimal(v.into())
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Decimal(d) => d.fmt(f),
            Literal::Label(l) => {
                f.write_str("\"")?;
                for c in l.chars() {
                    if c == '"' || c == '\\' {
                        f.write_str("\\")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AtomicPredicate {
    pub attr: String,
    pub op: CmpOp,
    pub bound: Literal,
}

impl AtomicPredicate {
    pub fn new(attr: impl Into<String>, op: CmpOp, bound: Literal) -> Self {
        AtomicPredicate {
            attr: attr.into(),
            op,
            bound,
        }
    }

    pub fn ge(attr: impl Into<String>, bound: impl Into<Literal>) -> Self {
        Self::new(attr, CmpOp::Ge, bound.into())
    }

    pub fn le(attr: impl Into<String>, bound: impl Into<Literal>) -> Self {
        Self::new(attr, CmpOp::Le, bound.into())
    }
}

impl fmt::Display for AtomicPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.attr, self.op.symbol(), self.bound)
    }
}

/// Boolean tree over atomic predicates. There is no negation.
///
/// `And`/`Or` nodes produced by the parser always have at least two children;
/// use [`FilterExpr::and`] / [`FilterExpr::or`] to keep that shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterExpr {
    Atom(AtomicPredicate),
    And(Vec<FilterExpr>),
    Or(Vec<FilterExpr>),
}

impl FilterExpr {
    /// Conjunction; a single operand is returned as is. Panics on no operands.
    pub fn and(mut operands: Vec<FilterExpr>) -> Self {
        assert!(!operands.is_empty(), "conjunction needs an operand");
        if operands.len() == 1 {
            operands.pop().unwrap()
        } else {
            FilterExpr::And(operands)
        }
    }

    /// Disjunction; a single operand is returned as is. Panics on no operands.
    pub fn or(mut operands: Vec<FilterExpr>) -> Self {
        assert!(!operands.is_empty(), "disjunction needs an operand");
        if operands.len() == 1 {
            operands.pop().unwrap()
        } else {
            FilterExpr::Or(operands)
        }
    }

    /// The conjunction of `atoms`, or `None` for an empty slice.
    pub fn conjunction(atoms: impl IntoIterator<Item = AtomicPredicate>) -> Option<Self> {
        let ops: Vec<_> = atoms.into_iter().map(FilterExpr::Atom).collect();
        (!ops.is_empty()).then(|| FilterExpr::and(ops))
    }

    pub fn atoms(&self) -> Vec<&AtomicPredicate> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a AtomicPredicate>) {
        match self {
            FilterExpr::Atom(a) => out.push(a),
            FilterExpr::And(xs) | FilterExpr::Or(xs) => {
                xs.iter().for_each(|x| x.collect_atoms(out))
            }
        }
    }

    /// True when no `Or` node occurs anywhere in the tree.
    pub fn is_conjunctive(&self) -> bool {
        match self {
            FilterExpr::Atom(_) => true,
            FilterExpr::And(xs) => xs.iter().all(FilterExpr::is_conjunctive),
            FilterExpr::Or(_) => false,
        }
    }

    /// Evaluates the tree with atoms treated as opaque booleans.
    pub fn eval_with(&self, atom: &mut impl FnMut(&AtomicPredicate) -> bool) -> bool {
        match self {
            FilterExpr::Atom(a) => atom(a),
            FilterExpr::And(xs) => xs.iter().all(|x| x.eval_with(atom)),
            FilterExpr::Or(xs) => xs.iter().any(|x| x.eval_with(atom)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SortKey {
    pub dir: Dir,
    pub attr: String,
}

impl SortKey {
    pub fn new(dir: Dir, attr: impl Into<String>) -> Self {
        SortKey {
            dir,
            attr: attr.into(),
        }
    }

    pub fn asc(attr: impl Into<String>) -> Self {
        Self::new(Dir::Asc, attr)
    }

    pub fn desc(attr: impl Into<String>) -> Self {
        Self::new(Dir::Desc, attr)
    }
}

impl fmt::Display for SortKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.dir, self.attr)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Filter(FilterExpr),
    Sort(SortKey),
}

/// A decision procedure.
///
/// `stages` are stored in application order: the first stage runs first.
/// This is the reverse of composition notation, where `sort desc rating`
/// composed after `sort asc price` is written `sort_d rating ∘ sort_i price`
/// but stored here as `[sort asc price, sort desc rating]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Procedure {
    pub stages: Vec<Stage>,
    pub take_first: bool,
}

impl Procedure {
    pub fn identity() -> Self {
        Procedure::default()
    }

    pub fn new(stages: Vec<Stage>) -> Self {
        Procedure {
            stages,
            take_first: false,
        }
    }

    pub fn then_first(mut self) -> Self {
        self.take_first = true;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.stages.is_empty() && !self.take_first
    }

    /// Distinct attribute names referenced anywhere in the procedure.
    pub fn attributes(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        for stage in &self.stages {
            match stage {
                Stage::Filter(e) => out.extend(e.atoms().into_iter().map(|a| a.attr.as_str())),
                Stage::Sort(k) => {
                    out.insert(k.attr.as_str());
                }
            }
        }
        out
    }

    /// True when every filter stage is a pure conjunction of atoms.
    pub fn is_simple(&self) -> bool {
        self.stages.iter().all(|s| match s {
            Stage::Filter(e) => e.is_conjunctive(),
            Stage::Sort(_) => true,
        })
    }
}

/// Checks every attribute reference and bound of `p` against `schema`,
/// returning all violations found.
pub fn validate_procedure(p: &Procedure, schema: &Schema) -> Result<(), Vec<SchemaError>> {
    let mut errors = Vec::new();
    for stage in &p.stages {
        match stage {
            Stage::Filter(expr) => {
                for atom in expr.atoms() {
                    if let Err(e) = validate_atom(atom, schema) {
                        errors.push(e);
                    }
                }
            }
            Stage::Sort(key) => {
                if let Err(e) = schema.lookup(&key.attr) {
                    errors.push(e);
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

pub(crate) fn validate_atom(atom: &AtomicPredicate, schema: &Schema) -> Result<(), SchemaError> {
    let idx = schema.lookup(&atom.attr)?;
    schema.resolve_literal(idx, &atom.bound).map(drop)
}
