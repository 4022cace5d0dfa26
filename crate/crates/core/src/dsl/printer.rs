use std::fmt::Write;

use crate::model::{FilterExpr, Procedure, Stage};

/// Renders a procedure in pipeline syntax.
///
/// Output is deterministic: single spaces, ` |> ` between stages, `or`
/// groups always parenthesized, nested `and` groups parenthesized. The
/// identity procedure renders as the empty string; its `Display` form is
/// `<identity>`.
pub fn print_procedure(p: &Procedure) -> String {
    let mut parts: Vec<String> = p
        .stages
        .iter()
        .map(|stage| match stage {
            Stage::Filter(e) => format!("filter {}", print_filter_expr(e)),
            Stage::Sort(k) => format!("sort {} {}", k.dir, k.attr),
        })
        .collect();
    if p.take_first {
        parts.push("first".to_string());
    }
    parts.join(" |> ")
}

pub fn print_filter_expr(e: &FilterExpr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn write_expr(out: &mut String, e: &FilterExpr) {
    match e {
        FilterExpr::Atom(a) => {
            let _ = write!(out, "{a}");
        }
        FilterExpr::And(xs) => {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" and ");
                }
                match x {
                    FilterExpr::And(_) => {
                        out.push('(');
                        write_expr(out, x);
                        out.push(')');
                    }
                    _ => write_expr(out, x),
                }
            }
        }
        FilterExpr::Or(xs) => {
            out.push('(');
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" or ");
                }
                write_expr(out, x);
            }
            out.push(')');
        }
    }
}

impl std::fmt::Display for Procedure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_identity() {
            f.write_str("<identity>")
        } else {
            f.write_str(&print_procedure(self))
        }
    }
}

impl std::fmt::Display for FilterExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print_filter_expr(self))
    }
}
