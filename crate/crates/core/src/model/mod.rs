//! Domain types shared by every other module.

mod catalog;
mod cost;
mod procedure;
mod spec;
mod value;

pub(crate) use catalog::is_identifier;
pub use catalog::{AttrIdx, AttrKind, AttributeDecl, Catalog, Item, ItemRef, RankedList, Schema};
pub use cost::{CostReport, Verdict};
pub use procedure::{
    validate_procedure, AtomicPredicate, CmpOp, Dir, FilterExpr, Literal, Procedure, SortKey, Stage,
};
pub use spec::{PreferenceSpec, SpecMode};
pub use value::{compare_values, Decimal, DecimalParseError, OrdinalOrder, Value};
