use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, SourceSpan};
use crate::model::{AtomicPredicate, CmpOp, Dir, FilterExpr, Literal, Procedure, SortKey, Stage};

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn error(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError::new(
            t.span,
            message.into(),
            expected.iter().map(|s| s.to_string()).collect(),
        )
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        self.error(
            format!("unexpected {}", self.peek().tok.describe()),
            expected,
        )
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek().tok {
            Tok::Eof => Ok(()),
            _ => Err(self.unexpected(&["end of input"])),
        }
    }

    fn procedure(&mut self) -> Result<Procedure, ParseError> {
        if matches!(self.peek().tok, Tok::Eof) {
            return Err(self.error("expected stage", &["`filter`", "`sort`"]));
        }
        if self.at_keyword("first") {
            self.bump();
            self.expect_end()?;
            return Ok(Procedure::identity().then_first());
        }
        let mut stages = vec![self.stage()?];
        let mut take_first = false;
        while matches!(self.peek().tok, Tok::Pipe) {
            self.bump();
            if self.at_keyword("first") {
                let first_span = self.bump().span;
                if !matches!(self.peek().tok, Tok::Eof) {
                    return Err(ParseError::new(
                        first_span,
                        "`first` may only appear as the last stage".into(),
                        vec!["end of input".into()],
                    ));
                }
                take_first = true;
                break;
            }
            stages.push(self.stage()?);
        }
        self.expect_end()?;
        Ok(Procedure { stages, take_first })
    }

    fn stage(&mut self) -> Result<Stage, ParseError> {
        if self.at_keyword("filter") {
            self.bump();
            Ok(Stage::Filter(self.or_expr()?))
        } else if self.at_keyword("sort") {
            self.bump();
            let dir = if self.at_keyword("asc") {
                Dir::Asc
            } else if self.at_keyword("desc") {
                Dir::Desc
            } else {
                return Err(self.unexpected(&["`asc`", "`desc`"]));
            };
            self.bump();
            let attr = self.ident()?;
            Ok(Stage::Sort(SortKey::new(dir, attr)))
        } else {
            Err(self.unexpected(&["`filter`", "`sort`", "`first`"]))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(&["attribute name"])),
        }
    }

    fn or_expr(&mut self) -> Result<FilterExpr, ParseError> {
        let mut ops = vec![self.and_expr()?];
        while self.at_keyword("or") {
            self.bump();
            ops.push(self.and_expr()?);
        }
        Ok(FilterExpr::or(ops))
    }

    fn and_expr(&mut self) -> Result<FilterExpr, ParseError> {
        let mut ops = vec![self.atom()?];
        while self.at_keyword("and") {
            self.bump();
            ops.push(self.atom()?);
        }
        Ok(FilterExpr::and(ops))
    }

    fn atom(&mut self) -> Result<FilterExpr, ParseError> {
        match &self.peek().tok {
            Tok::LParen => {
                let open = self.bump().span;
                let inner = self.or_expr()?;
                match self.peek().tok {
                    Tok::RParen => {
                        self.bump();
                        Ok(inner)
                    }
                    _ => Err(ParseError::new(
                        SourceSpan::new(open.start, self.peek().span.end),
                        "unclosed `(`".into(),
                        vec!["`)`".into()],
                    )),
                }
            }
            Tok::Ident(_) => {
                // An identifier followed by a comparison; anything else here
                // (e.g. `filter sort ...`) gets the comparison error.
                let attr = self.ident()?;
                let op = match self.peek().tok {
                    Tok::Ge => CmpOp::Ge,
                    Tok::Le => CmpOp::Le,
                    _ => return Err(self.unexpected(&["`>=`", "`<=`"])),
                };
                self.bump();
                let bound = match &self.peek().tok {
                    Tok::Number(d) => Literal::Decimal(d.clone()),
                    Tok::Label(l) => Literal::Label(l.clone()),
                    _ => return Err(self.unexpected(&["decimal literal", "quoted label"])),
                };
                self.bump();
                Ok(FilterExpr::Atom(AtomicPredicate::new(attr, op, bound)))
            }
            _ => Err(self.unexpected(&["attribute name", "`(`"])),
        }
    }
}

/// Parses a pipeline such as `filter rating >= 3 |> sort asc price |> first`.
pub fn parse_procedure(text: &str) -> Result<Procedure, ParseError> {
    Parser::new(text)?.procedure()
}

/// Parses a bare predicate (the `orexpr` production).
pub fn parse_filter_expr(text: &str) -> Result<FilterExpr, ParseError> {
    let mut p = Parser::new(text)?;
    if matches!(p.peek().tok, Tok::Eof) {
        return Err(p.error("expected predicate", &["attribute name", "`(`"]));
    }
    let e = p.or_expr()?;
    p.expect_end()?;
    Ok(e)
}

/// Parses a single atomic predicate such as `capacity >= 1000`.
pub fn parse_atom(text: &str) -> Result<AtomicPredicate, ParseError> {
    match parse_filter_expr(text)? {
        FilterExpr::Atom(a) => Ok(a),
        _ => Err(ParseError::new(
            SourceSpan::new(0, text.len()),
            "expected a single atomic predicate".into(),
            vec!["IDENT >= VALUE".into(), "IDENT <= VALUE".into()],
        )),
    }
}
