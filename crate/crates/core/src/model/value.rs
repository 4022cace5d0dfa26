//! Exact scalar values.
//!
//! Attribute values are either exact decimals or positions in a declared
//! ordinal order. Nothing here touches binary floating point: the stability
//! rules of filtering and sorting depend on deciding `a(x) = a(y)` exactly.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::SchemaError;

/// An arbitrary precision decimal kept as sign, integer digits and fraction
/// digits.
///
/// Equality and ordering are by numeric value, so `10` and `10.0` are equal.
/// The fraction digits are kept as written so that a value prints back the
/// way it was read.
#[derive(Debug, Clone)]
pub struct Decimal {
    negative: bool,
    // No leading zeros; empty for a zero integer part.
    int: Box<str>,
    frac: Box<str>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is not a decimal literal")]
pub struct DecimalParseError(pub String);

impl Decimal {
    fn frac_significant(&self) -> &str {
        self.frac.trim_end_matches('0')
    }

    pub fn is_zero(&self) -> bool {
        self.int.is_empty() && self.frac_significant().is_empty()
    }

    pub fn is_negative(&self) -> bool {
        self.negative && !self.is_zero()
    }

    fn cmp_magnitude(&self, other: &Self) -> Ordering {
        self.int
            .len()
            .cmp(&other.int.len())
            .then_with(|| self.int.cmp(&other.int))
            // Trailing zeros trimmed, plain string order on the fraction is
            // numeric order.
            .then_with(|| self.frac_significant().cmp(other.frac_significant()))
    }
}

impl FromStr for Decimal {
    type Err = DecimalParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || DecimalParseError(s.to_string());
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if !digits(int) || (body.contains('.') && !digits(frac)) {
            return Err(err());
        }
        Ok(Decimal {
            negative,
            int: int.trim_start_matches('0').into(),
            frac: frac.into(),
        })
    }
}

impl From<i64> for Decimal {
    fn from(v: i64) -> Self {
        let digits = v.unsigned_abs().to_string();
        Decimal {
            negative: v < 0,
            int: digits.trim_start_matches('0').into(),
            frac: "".into(),
        }
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_negative() {
            f.write_str("-")?;
        }
        if self.int.is_empty() {
            f.write_str("0")?;
        } else {
            f.write_str(&self.int)?;
        }
        if !self.frac.is_empty() {
            write!(f, ".{}", self.frac)?;
        }
        Ok(())
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_negative(), other.is_negative()) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => self.cmp_magnitude(other),
            (true, true) => other.cmp_magnitude(self),
        }
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Decimal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Decimal {}

impl Hash for Decimal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.is_negative().hash(state);
        self.int.hash(state);
        self.frac_significant().hash(state);
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite total order of labels, lowest first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrdinalOrder {
    labels: Vec<String>,
}

impl OrdinalOrder {
    /// Labels must be distinct; the caller (schema construction) checks that.
    pub(crate) fn new(labels: Vec<String>) -> Self {
        OrdinalOrder { labels }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn level_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn label(&self, level: usize) -> Option<&str> {
        self.labels.get(level).map(String::as_str)
    }
}

/// A resolved attribute value.
#[derive(Debug, Clone)]
pub enum Value {
    Decimal(Decimal),
    Ordinal {
        order: Arc<OrdinalOrder>,
        level: usize,
    },
}

impl Value {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Decimal(_) => "numeric",
            Value::Ordinal { .. } => "ordinal",
        }
    }

    /// Comparison for values already known to belong to the same attribute.
    ///
    /// Panics on a kind mismatch, which binding against the schema rules out.
    pub(crate) fn cmp_same_attr(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Decimal(a), Value::Decimal(b)) => a.cmp(b),
            (Value::Ordinal { level: a, .. }, Value::Ordinal { level: b, .. }) => a.cmp(b),
            _ => unreachable!("values bound to one attribute share a kind"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Decimal(d) => d.fmt(f),
            Value::Ordinal { order, level } => {
                f.write_str(order.label(*level).unwrap_or("<invalid level>"))
            }
        }
    }
}

/// Total order on values of one attribute.
///
/// Decimals compare exactly. Ordinals compare by position in their declared
/// order and only against ordinals of the same order.
pub fn compare_values(a: &Value, b: &Value) -> Result<Ordering, SchemaError> {
    match (a, b) {
        (Value::Decimal(x), Value::Decimal(y)) => Ok(x.cmp(y)),
        (
            Value::Ordinal {
                order: oa,
                level: la,
            },
            Value::Ordinal {
                order: ob,
                level: lb,
            },
        ) if Arc::ptr_eq(oa, ob) || oa == ob => Ok(la.cmp(lb)),
        _ => Err(SchemaError::Incomparable),
    }
}
