//! Attribute schemas, catalogs of alternatives and ranked lists over them.

use std::collections::{HashMap, HashSet};
use std::ops::Deref;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::procedure::Literal;
use super::value::{Decimal, OrdinalOrder, Value};
use crate::error::{Error, Result, SchemaError, SchemaErrors};

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b) if b.is_ascii_alphabetic() || b == b'_')
        && bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttrKind {
    Numeric,
    /// Labels lowest first.
    Ordinal(Arc<OrdinalOrder>),
}

impl AttrKind {
    pub fn ordinal<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        AttrKind::Ordinal(Arc::new(OrdinalOrder::new(
            labels.into_iter().map(Into::into).collect(),
        )))
    }

    pub fn name(&self) -> &'static str {
        match self {
            AttrKind::Numeric => "numeric",
            AttrKind::Ordinal(_) => "ordinal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDecl {
    pub name: String,
    pub kind: AttrKind,
}

impl AttributeDecl {
    pub fn numeric(name: impl Into<String>) -> Self {
        AttributeDecl {
            name: name.into(),
            kind: AttrKind::Numeric,
        }
    }

    pub fn ordinal<I, S>(name: impl Into<String>, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        AttributeDecl {
            name: name.into(),
            kind: AttrKind::ordinal(labels),
        }
    }
}

/// Index of an attribute within its schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttrIdx(pub(crate) usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    attrs: Vec<AttributeDecl>,
    index: HashMap<String, AttrIdx>,
}

impl Schema {
    pub fn new(attrs: Vec<AttributeDecl>) -> Result<Self, SchemaErrors> {
        let mut errors = Vec::new();
        let mut index = HashMap::new();
        for (i, decl) in attrs.iter().enumerate() {
            if !is_identifier(&decl.name) {
                errors.push(SchemaError::InvalidAttributeName(decl.name.clone()));
            }
            if index.insert(decl.name.clone(), AttrIdx(i)).is_some() {
                errors.push(SchemaError::DuplicateAttribute(decl.name.clone()));
            }
            if let AttrKind::Ordinal(order) = &decl.kind {
                let mut seen = HashSet::new();
                for label in order.labels() {
                    if !seen.insert(label) {
                        errors.push(SchemaError::DuplicateLabel {
                            attr: decl.name.clone(),
                            label: label.clone(),
                        });
                    }
                }
            }
        }
        if errors.is_empty() {
            Ok(Schema { attrs, index })
        } else {
            Err(SchemaErrors(errors))
        }
    }

    pub fn attributes(&self) -> &[AttributeDecl] {
        &self.attrs
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Result<AttrIdx, SchemaError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| SchemaError::UndeclaredAttribute(name.to_string()))
    }

    pub fn decl(&self, idx: AttrIdx) -> &AttributeDecl {
        &self.attrs[idx.0]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.attrs.iter().map(|a| a.name.as_str())
    }

    /// Turns a predicate bound into a value of the attribute's kind.
    pub fn resolve_literal(&self, idx: AttrIdx, lit: &Literal) -> Result<Value, SchemaError> {
        let decl = self.decl(idx);
        match (&decl.kind, lit) {
            (AttrKind::Numeric, Literal::Decimal(d)) => Ok(Value::Decimal(d.clone())),
            (AttrKind::Ordinal(order), Literal::Label(label)) => match order.level_of(label) {
                Some(level) => Ok(Value::Ordinal {
                    order: order.clone(),
                    level,
                }),
                None => Err(SchemaError::UnknownLabel {
                    attr: decl.name.clone(),
                    label: label.clone(),
                }),
            },
            (kind, lit) => Err(SchemaError::KindMismatch {
                attr: decl.name.clone(),
                expected: kind.name(),
                found: lit.to_string(),
            }),
        }
    }

    /// Parses a catalog cell: a decimal string for numeric attributes, a
    /// label for ordinal ones.
    pub fn parse_value(&self, idx: AttrIdx, text: &str) -> Result<Value, SchemaError> {
        let decl = self.decl(idx);
        match &decl.kind {
            AttrKind::Numeric => {
                text.parse::<Decimal>()
                    .map(Value::Decimal)
                    .map_err(|_| SchemaError::KindMismatch {
                        attr: decl.name.clone(),
                        expected: "numeric",
                        found: text.to_string(),
                    })
            }
            AttrKind::Ordinal(order) => match order.level_of(text) {
                Some(level) => Ok(Value::Ordinal {
                    order: order.clone(),
                    level,
                }),
                None => Err(SchemaError::UnknownLabel {
                    attr: decl.name.clone(),
                    label: text.to_string(),
                }),
            },
        }
    }

    fn check_value(&self, idx: AttrIdx, value: &Value) -> Result<(), SchemaError> {
        let decl = self.decl(idx);
        let ok = match (&decl.kind, value) {
            (AttrKind::Numeric, Value::Decimal(_)) => true,
            (AttrKind::Ordinal(order), Value::Ordinal { order: vo, level }) => {
                (Arc::ptr_eq(order, vo) || order == vo) && *level < order.labels().len()
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(SchemaError::KindMismatch {
                attr: decl.name.clone(),
                expected: decl.kind.name(),
                found: value.to_string(),
            })
        }
    }
}

/// Position of an item inside its catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ItemRef(pub(crate) usize);

impl ItemRef {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
pub struct Item {
    pub id: String,
    /// One value per schema attribute, in declaration order.
    pub values: Vec<Value>,
}

/// A universe of alternatives: every item assigns a value to every declared
/// attribute.
#[derive(Debug, Clone)]
pub struct Catalog {
    schema: Schema,
    items: Vec<Item>,
    ids: HashMap<String, ItemRef>,
}

impl Catalog {
    pub fn new(schema: Schema, items: Vec<Item>) -> Result<Self, SchemaErrors> {
        let mut errors = Vec::new();
        let mut ids = HashMap::new();
        for (i, item) in items.iter().enumerate() {
            if !is_identifier(&item.id) {
                errors.push(SchemaError::InvalidItemId(item.id.clone()));
            }
            if ids.insert(item.id.clone(), ItemRef(i)).is_some() {
                errors.push(SchemaError::DuplicateItem(item.id.clone()));
            }
            for (a, decl) in schema.attributes().iter().enumerate() {
                match item.values.get(a) {
                    Some(v) => {
                        if let Err(e) = schema.check_value(AttrIdx(a), v) {
                            errors.push(e);
                        }
                    }
                    None => errors.push(SchemaError::MissingValue {
                        item: item.id.clone(),
                        attr: decl.name.clone(),
                    }),
                }
            }
            if item.values.len() > schema.len() {
                errors.push(SchemaError::ExtraValue {
                    item: item.id.clone(),
                    attr: format!("#{}", schema.len()),
                });
            }
        }
        if errors.is_empty() {
            Ok(Catalog { schema, items, ids })
        } else {
            Err(SchemaErrors(errors))
        }
    }

    /// Builds a catalog from textual cells, one row per item, cells in schema
    /// order.
    pub fn from_rows<S: AsRef<str>>(schema: Schema, rows: &[(&str, Vec<S>)]) -> Result<Self> {
        let mut items = Vec::with_capacity(rows.len());
        let mut errors = Vec::new();
        for (id, cells) in rows {
            if cells.len() != schema.len() {
                return Err(Error::InvalidArgument(format!(
                    "item `{id}` has {} cells, schema declares {} attributes",
                    cells.len(),
                    schema.len()
                )));
            }
            let mut values = Vec::with_capacity(cells.len());
            for (a, cell) in cells.iter().enumerate() {
                match schema.parse_value(AttrIdx(a), cell.as_ref()) {
                    Ok(v) => values.push(v),
                    Err(e) => errors.push(e),
                }
            }
            items.push(Item {
                id: id.to_string(),
                values,
            });
        }
        if !errors.is_empty() {
            return Err(SchemaErrors(errors).into());
        }
        Ok(Catalog::new(schema, items)?)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn refs(&self) -> impl Iterator<Item = ItemRef> + '_ {
        (0..self.items.len()).map(ItemRef)
    }

    pub fn item(&self, r: ItemRef) -> &Item {
        &self.items[r.0]
    }

    pub fn id(&self, r: ItemRef) -> &str {
        &self.items[r.0].id
    }

    pub fn resolve(&self, id: &str) -> Result<ItemRef, SchemaError> {
        self.ids
            .get(id)
            .copied()
            .ok_or_else(|| SchemaError::UnknownItem(id.to_string()))
    }

    pub fn value(&self, r: ItemRef, attr: AttrIdx) -> &Value {
        &self.items[r.0].values[attr.0]
    }

    /// The catalog's own item order as a list.
    pub fn full_list(&self) -> RankedList {
        RankedList(self.refs().collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CatalogDoc = serde_json::from_str(text)?;
        let decls = doc
            .attributes
            .into_iter()
            .map(|a| match a.kind {
                KindDoc::Numeric => AttributeDecl::numeric(a.name),
                KindDoc::Ordinal { order } => AttributeDecl::ordinal(a.name, order),
            })
            .collect();
        let schema = Schema::new(decls)?;
        let mut errors = Vec::new();
        let mut items = Vec::with_capacity(doc.items.len());
        for item in doc.items {
            let mut values = Vec::with_capacity(schema.len());
            for (a, decl) in schema.attributes().iter().enumerate() {
                match item.values.get(&decl.name) {
                    Some(cell) => match schema.parse_value(AttrIdx(a), cell) {
                        Ok(v) => values.push(v),
                        Err(e) => errors.push(e),
                    },
                    None => errors.push(SchemaError::MissingValue {
                        item: item.id.clone(),
                        attr: decl.name.clone(),
                    }),
                }
            }
            for name in item.values.keys() {
                if schema.lookup(name).is_err() {
                    errors.push(SchemaError::ExtraValue {
                        item: item.id.clone(),
                        attr: name.clone(),
                    });
                }
            }
            items.push(Item {
                id: item.id,
                values,
            });
        }
        if !errors.is_empty() {
            return Err(SchemaErrors(errors).into());
        }
        Ok(Catalog::new(schema, items)?)
    }

    /// Canonical serialized form: pretty JSON, values in schema order,
    /// trailing newline.
    pub fn to_json(&self) -> String {
        let doc = CatalogDoc {
            attributes: self
                .schema
                .attributes()
                .iter()
                .map(|a| AttributeDoc {
                    name: a.name.clone(),
                    kind: match &a.kind {
                        AttrKind::Numeric => KindDoc::Numeric,
                        AttrKind::Ordinal(order) => KindDoc::Ordinal {
                            order: order.labels().to_vec(),
                        },
                    },
                })
                .collect(),
            items: self
                .items
                .iter()
                .map(|item| ItemDoc {
                    id: item.id.clone(),
                    values: self
                        .schema
                        .names()
                        .zip(&item.values)
                        .map(|(n, v)| (n.to_string(), v.to_string()))
                        .collect(),
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("catalog documents serialize");
        out.push('\n');
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogDoc {
    attributes: Vec<AttributeDoc>,
    items: Vec<ItemDoc>,
}

#[derive(Serialize, Deserialize)]
struct AttributeDoc {
    name: String,
    #[serde(flatten)]
    kind: KindDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum KindDoc {
    Numeric,
    Ordinal { order: Vec<String> },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemDoc {
    id: String,
    values: IndexMap<String, String>,
}

/// An ordered sequence of catalog items. Duplicates are allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct RankedList(pub(crate) Vec<ItemRef>);

impl RankedList {
    pub fn empty() -> Self {
        RankedList(Vec::new())
    }

    pub fn from_ids<S: AsRef<str>>(catalog: &Catalog, ids: &[S]) -> Result<Self, SchemaErrors> {
        let mut refs = Vec::with_capacity(ids.len());
        let mut errors = Vec::new();
        for id in ids {
            match catalog.resolve(id.as_ref()) {
                Ok(r) => refs.push(r),
                Err(e) => errors.push(e),
            }
        }
        if errors.is_empty() {
            Ok(RankedList(refs))
        } else {
            Err(SchemaErrors(errors))
        }
    }

    pub fn ids<'c>(&self, catalog: &'c Catalog) -> Vec<&'c str> {
        self.0.iter().map(|&r| catalog.id(r)).collect()
    }

    pub fn into_vec(self) -> Vec<ItemRef> {
        self.0
    }
}

impl Deref for RankedList {
    type Target = [ItemRef];

    fn deref(&self) -> &[ItemRef] {
        &self.0
    }
}

impl FromIterator<ItemRef> for RankedList {
    fn from_iter<I: IntoIterator<Item = ItemRef>>(iter: I) -> Self {
        RankedList(iter.into_iter().collect())
    }
}
