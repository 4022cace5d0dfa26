use super::{ParseError, SourceSpan};
use crate::model::Decimal;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number(Decimal),
    Label(String),
    Ge,
    Le,
    Pipe,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(d) => format!("number `{d}`"),
            Tok::Label(l) => format!("label {l:?}"),
            Tok::Ge => "`>=`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Pipe => "`|>`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = |tok, len| Token {
            tok,
            span: SourceSpan::new(start, start + len),
        };
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => out.push(simple(Tok::LParen, 1)),
            b')' => out.push(simple(Tok::RParen, 1)),
            b'>' | b'<' | b'|' => {
                let (expect, tok) = match c {
                    b'>' => (b'=', Tok::Ge),
                    b'<' => (b'=', Tok::Le),
                    _ => (b'>', Tok::Pipe),
                };
                if bytes.get(i + 1) != Some(&expect) {
                    let shown = format!("{}{}", c as char, expect as char);
                    return Err(ParseError::new(
                        SourceSpan::new(start, start + 1),
                        format!("unexpected character `{}`", c as char),
                        vec![format!("`{shown}`")],
                    ));
                }
                out.push(simple(tok, 2));
            }
            b'"' => {
                let mut label = String::new();
                let mut j = i + 1;
                let mut closed = false;
                while j < bytes.len() {
                    match bytes[j] {
                        b'"' => {
                            closed = true;
                            j += 1;
                            break;
                        }
                        b'\\' if matches!(bytes.get(j + 1), Some(b'"' | b'\\')) => {
                            label.push(bytes[j + 1] as char);
                            j += 2;
                        }
                        _ => {
                            let ch = src[j..].chars().next().unwrap();
                            label.push(ch);
                            j += ch.len_utf8();
                        }
                    }
                }
                if !closed {
                    return Err(ParseError::new(
                        SourceSpan::new(start, bytes.len()),
                        "unterminated label".into(),
                        vec!["`\"`".into()],
                    ));
                }
                out.push(Token {
                    tok: Tok::Label(label),
                    span: SourceSpan::new(start, j),
                });
                i = j;
                continue;
            }
            b'-' | b'0'..=b'9' => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                    j += 1;
                }
                let text = &src[start..j];
                let value = text.parse::<Decimal>().map_err(|_| {
                    ParseError::new(
                        SourceSpan::new(start, j),
                        format!("malformed number `{text}`"),
                        vec!["decimal literal".into()],
                    )
                })?;
                out.push(Token {
                    tok: Tok::Number(value),
                    span: SourceSpan::new(start, j),
                });
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(src[start..j].to_string()),
                    span: SourceSpan::new(start, j),
                });
                i = j;
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap();
                return Err(ParseError::new(
                    SourceSpan::new(start, start + ch.len_utf8()),
                    format!("unexpected character `{ch}`"),
                    Vec::new(),
                ));
            }
        }
        i += out.last().map_or(1, |t: &Token| t.span.end - t.span.start);
    }
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan::new(src.len(), src.len()),
    });
    Ok(out)
}
