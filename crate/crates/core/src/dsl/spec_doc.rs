use serde::{Deserialize, Serialize};

use super::{parse_filter_expr, print_filter_expr};
use crate::error::{Error, Result};
use crate::model::{Dir, PreferenceSpec, SortKey};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    /// Predicate in the `orexpr` grammar; empty or absent means vacuous.
    #[serde(default)]
    property: Option<String>,
    #[serde(default)]
    ordering: Vec<KeyDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KeyDoc {
    dir: DirDoc,
    attr: String,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum DirDoc {
    Asc,
    Desc,
}

/// Reads a spec document:
/// `{"property": "<orexpr>", "ordering": [{"dir": "asc"|"desc", "attr": ...}, ...]}`.
///
/// Ordering entries are listed highest priority first.
pub fn parse_preference_spec(json: &str) -> Result<PreferenceSpec> {
    let doc: SpecDoc = serde_json::from_str(json)?;
    let property = match doc.property.as_deref().map(str::trim) {
        None | Some("") => None,
        Some(text) => Some(parse_filter_expr(text)?),
    };
    let ordering = doc
        .ordering
        .into_iter()
        .map(|k| {
            if !crate::model::is_identifier(&k.attr) {
                return Err(Error::Format(format!(
                    "`{}` is not an attribute name",
                    k.attr
                )));
            }
            let dir = match k.dir {
                DirDoc::Asc => Dir::Asc,
                DirDoc::Desc => Dir::Desc,
            };
            Ok(SortKey::new(dir, k.attr))
        })
        .collect::<Result<Vec<_>>>()?;
    PreferenceSpec::new(property, ordering)
}

/// Canonical spec document, pretty printed with a trailing newline.
pub fn print_preference_spec(spec: &PreferenceSpec) -> String {
    let doc = SpecDoc {
        property: Some(spec.property().map(print_filter_expr).unwrap_or_default()),
        ordering: spec
            .ordering()
            .iter()
            .map(|k| KeyDoc {
                dir: match k.dir {
                    Dir::Asc => DirDoc::Asc,
                    Dir::Desc => DirDoc::Desc,
                },
                attr: k.attr.clone(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("spec documents serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AtomicPredicate, FilterExpr, SpecMode};

    #[test]
    fn simple_spec_from_document() {
        let spec = parse_preference_spec(
            r#"{"property": "rating >= 4",
                "ordering": [{"dir": "asc", "attr": "price"}, {"dir": "desc", "attr": "rating"}]}"#,
        )
        .unwrap();
        assert_eq!(spec.mode(), SpecMode::Simple);
        assert_eq!(
            spec.property(),
            Some(&FilterExpr::Atom(AtomicPredicate::ge("rating", 4)))
        );
        assert_eq!(
            spec.ordering(),
            &[SortKey::asc("price"), SortKey::desc("rating")]
        );
    }

    #[test]
    fn duplicate_ordering_attribute() {
        let err = parse_preference_spec(
            r#"{"property": "", "ordering": [{"dir": "asc", "attr": "price"}, {"dir": "desc", "attr": "price"}]}"#,
        )
        .unwrap_err();
        assert_eq!(err, Error::DuplicateOrderingAttribute("price".into()));
    }

    #[test]
    fn disjunctive_property_is_general() {
        let spec = parse_preference_spec(
            r#"{"property": "(bedrooms >= 3 or distance <= 1)", "ordering": [{"dir": "asc", "attr": "price"}]}"#,
        )
        .unwrap();
        assert_eq!(spec.mode(), SpecMode::General);
    }

    #[test]
    fn vacuous_property_and_round_trip() {
        let spec = parse_preference_spec(r#"{"ordering": []}"#).unwrap();
        assert_eq!(spec, PreferenceSpec::indifferent());
        let text = print_preference_spec(&spec);
        assert_eq!(parse_preference_spec(&text).unwrap(), spec);

        let spec = parse_preference_spec(
            r#"{"property": "price <= 10 and brand >= \"Seagate\"", "ordering": [{"dir": "desc", "attr": "rating"}]}"#,
        )
        .unwrap();
        let text = print_preference_spec(&spec);
        assert_eq!(parse_preference_spec(&text).unwrap(), spec);
        assert_eq!(
            print_preference_spec(&parse_preference_spec(&text).unwrap()),
            text
        );
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(parse_preference_spec("{"), Err(Error::Format(_))));
        assert!(matches!(
            parse_preference_spec(r#"{"property": "price >="}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_preference_spec(r#"{"ordering": [{"dir": "up", "attr": "price"}]}"#),
            Err(Error::Format(_))
        ));
    }
}
