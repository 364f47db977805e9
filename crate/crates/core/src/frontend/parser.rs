//! Recursive-descent parser.
//!
//! ```text
//! program  := group*
//! group    := binder ':' clause+
//! binder   := 'exists' IDENT 'in' IDENT '.' 'all' '(' IDENT ')'
//!           | 'hist' IDENT '=' 'histogram' '(' IDENT '.' IDENT (',' IDENT '=' literal)* ')'
//!           | 'lasers' IDENT 'in' 'lasers' '(' IDENT ')'
//! clause   := expr '{' action (';' action)* ';'? '}'
//! action   := 'stop' | 'cap_speed' | 'sound' IDENT
//! expr     := additive (CMP additive)?
//! additive := term (('+' | '-') term)*
//! term     := primary (('*' | '/') primary)*
//! primary  := NUMBER | 'true' | 'false' | '(' expr ')'
//!           | 'distance' '(' IDENT ')' | AGG '(' setexpr ')'
//!           | IDENT | IDENT '.' IDENT
//! setexpr  := IDENT 'in' expr (':' expr)? | expr
//! ```
//!
//! A clause belongs to the most recent binder; line breaks and indentation
//! carry no meaning. On error the parser abandons the current group and
//! resumes at the next binder keyword.

use crate::ast::{
    Action, AggFunc, ArithOp, Binder, Clause, CmpOp, Expr, ExprKind, Ident, Program, RuleGroup,
    SetExpr, SourcePath,
};
use crate::diagnostic::{DiagCode, Diagnostic, SourceSpan};

use super::lexer::{Keyword, Punct, Token, TokenKind};

/// Maximum expression nesting (parentheses, aggregates, operator chains).
pub const MAX_NESTING: usize = 128;

type PResult<T> = Result<T, Diagnostic>;

pub fn parse(tokens: &[Token]) -> Result<Program, Vec<Diagnostic>> {
    let mut parser = Parser {
        tokens,
        pos: 0,
        depth: 0,
    };
    let mut groups = Vec::new();
    let mut errors = Vec::new();
    while !parser.at_eof() {
        let start = parser.pos;
        let result = if parser.at_group_start() {
            parser.group()
        } else {
            Err(parser.error_here("expected `exists`, `hist`, or `lasers` to start a rule group"))
        };
        match result {
            Ok(group) => groups.push(group),
            Err(diag) => {
                errors.push(diag);
                parser.recover(start);
            }
        }
    }
    if errors.is_empty() {
        Ok(Program::new(String::new(), groups))
    } else {
        Err(errors)
    }
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    depth: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn peek_kind_at(&self, offset: usize) -> Option<TokenKind> {
        self.tokens.get(self.pos + offset).map(|t| t.kind)
    }

    fn at_eof(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn at_group_start(&self) -> bool {
        match self.peek_kind() {
            Some(TokenKind::Keyword(Keyword::Exists | Keyword::Hist)) => true,
            // the second `lasers` in `lasers a in lasers(alive)` is not a group start
            Some(TokenKind::Keyword(Keyword::Lasers)) => {
                self.pos == 0 || self.tokens[self.pos - 1].kind != TokenKind::Keyword(Keyword::In)
            }
            _ => false,
        }
    }

    fn recover(&mut self, start: usize) {
        self.depth = 0;
        if self.pos <= start {
            self.pos = start + 1;
        }
        while !self.at_eof() && !self.at_group_start() {
            self.pos += 1;
        }
    }

    fn eof_span(&self) -> SourceSpan {
        match self.tokens.last() {
            Some(last) => SourceSpan {
                offset: last.span.end(),
                len: 0,
                line: last.span.line,
                column: last.span.column + last.text.chars().count() as u32,
            },
            None => SourceSpan {
                offset: 0,
                len: 0,
                line: 1,
                column: 1,
            },
        }
    }

    fn here(&self) -> SourceSpan {
        self.peek()
            .map(|t| t.span)
            .unwrap_or_else(|| self.eof_span())
    }

    fn prev_span(&self) -> SourceSpan {
        self.pos
            .checked_sub(1)
            .and_then(|i| self.tokens.get(i))
            .map(|t| t.span)
            .unwrap_or_else(|| self.here())
    }

    fn error_here(&self, message: impl Into<String>) -> Diagnostic {
        let message = message.into();
        let found = match self.peek() {
            Some(t) => format!(", found `{}`", t.text),
            None => ", found end of input".to_string(),
        };
        Diagnostic::new(DiagCode::Parse, format!("{message}{found}"), self.here())
    }

    fn bump(&mut self) -> &'t Token {
        let tok = &self.tokens[self.pos];
        self.pos += 1;
        tok
    }

    fn eat(&mut self, kind: TokenKind) -> bool {
        if self.peek_kind() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<&'t Token> {
        if self.peek_kind() == Some(kind) {
            Ok(self.bump())
        } else {
            Err(self.error_here(format!("expected {kind}")))
        }
    }

    fn expect_punct(&mut self, p: Punct) -> PResult<&'t Token> {
        self.expect(TokenKind::Punct(p))
    }

    fn expect_keyword(&mut self, k: Keyword) -> PResult<&'t Token> {
        self.expect(TokenKind::Keyword(k))
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek_kind() {
            Some(TokenKind::Ident) => {
                let tok = self.bump();
                Ok(Ident::spanned(tok.text.clone(), tok.span))
            }
            _ => Err(self.error_here(format!("expected {what}"))),
        }
    }

    fn group(&mut self) -> PResult<RuleGroup> {
        let start = self.here();
        let binder = self.binder()?;
        self.expect_punct(Punct::Colon)?;
        if self.at_eof() || self.at_group_start() {
            return Err(self.error_here("expected clause"));
        }
        let mut clauses = Vec::new();
        while !self.at_eof() && !self.at_group_start() {
            clauses.push(self.clause()?);
        }
        Ok(RuleGroup {
            binder,
            clauses,
            span: start.to(self.prev_span()),
        })
    }

    fn binder(&mut self) -> PResult<Binder> {
        match self.bump().kind {
            TokenKind::Keyword(Keyword::Exists) => {
                let var = self.ident("binder variable")?;
                self.expect_keyword(Keyword::In)?;
                let sensor = self.ident("sensor name")?;
                self.expect_punct(Punct::Dot)?;
                match self.peek() {
                    Some(t) if t.kind == TokenKind::Ident && t.text == "all" => {
                        self.bump();
                    }
                    _ => return Err(self.error_here("expected `all`")),
                }
                self.expect_punct(Punct::LParen)?;
                let class_label = self.ident("class label")?;
                self.expect_punct(Punct::RParen)?;
                Ok(Binder::Exists {
                    var,
                    sensor,
                    class_label,
                })
            }
            TokenKind::Keyword(Keyword::Hist) => self.hist_binder(),
            TokenKind::Keyword(Keyword::Lasers) => {
                let var = self.ident("binder variable")?;
                self.expect_keyword(Keyword::In)?;
                self.expect_keyword(Keyword::Lasers)?;
                self.expect_punct(Punct::LParen)?;
                let selector = self.ident("laser selector")?;
                self.expect_punct(Punct::RParen)?;
                Ok(Binder::Lasers { var, selector })
            }
            _ => unreachable!("binder() called off a group start"),
        }
    }

    fn hist_binder(&mut self) -> PResult<Binder> {
        let var = self.ident("binder variable")?;
        self.expect(TokenKind::Cmp(CmpOp::Eq))?;
        self.expect_keyword(Keyword::Histogram)?;
        self.expect_punct(Punct::LParen)?;
        let base = self.ident("image source")?;
        self.expect_punct(Punct::Dot)?;
        let field = self.ident("image source field")?;

        let mut bins = None;
        let mut normalized = None;
        while self.eat(TokenKind::Punct(Punct::Comma)) {
            let name = self.ident("argument name")?;
            self.expect(TokenKind::Cmp(CmpOp::Eq))?;
            match name.as_str() {
                "bins" => {
                    if bins.is_some() {
                        return Err(dup_arg(&name));
                    }
                    bins = Some(self.bins_value()?);
                }
                "normalized" => {
                    if normalized.is_some() {
                        return Err(dup_arg(&name));
                    }
                    normalized = Some(match self.peek_kind() {
                        Some(TokenKind::Keyword(Keyword::True)) => true,
                        Some(TokenKind::Keyword(Keyword::False)) => false,
                        _ => return Err(self.error_here("expected `true` or `false`")),
                    });
                    self.pos += 1;
                }
                other => {
                    return Err(Diagnostic::new(
                        DiagCode::Parse,
                        format!(
                        "unknown histogram argument `{other}` (expected `bins` or `normalized`)"
                    ),
                        name.span,
                    ))
                }
            }
        }
        let close = self.expect_punct(Punct::RParen)?;
        let bins = bins.ok_or_else(|| {
            Diagnostic::new(
                DiagCode::Parse,
                "histogram requires a `bins` argument",
                close.span,
            )
        })?;
        Ok(Binder::Hist {
            var,
            source: SourcePath { base, field },
            bins,
            normalized: normalized.unwrap_or(false),
        })
    }

    fn bins_value(&mut self) -> PResult<u16> {
        let Some(tok) = self.peek() else {
            return Err(self.error_here("expected bin count"));
        };
        let TokenKind::Number(lit) = tok.kind else {
            return Err(self.error_here("expected bin count"));
        };
        self.pos += 1;
        let valid = lit.suffix.is_none() && lit.value.fract().is_zero();
        match u16::try_from(lit.value.mantissa()) {
            Ok(n) if valid && (1..=256).contains(&n) && lit.value.scale() == 0 => Ok(n),
            _ => Err(Diagnostic::new(
                DiagCode::Parse,
                format!(
                    "bin count must be an integer in 1..=256, found `{}`",
                    tok.text
                ),
                tok.span,
            )),
        }
    }

    fn clause(&mut self) -> PResult<Clause> {
        let start = self.here();
        let guard = self.expr()?;
        self.expect_punct(Punct::LBrace)?;
        let mut actions: Vec<Action> = Vec::new();
        self.push_action(&mut actions)?;
        loop {
            if self.eat(TokenKind::Punct(Punct::Semi)) {
                if self.eat(TokenKind::Punct(Punct::RBrace)) {
                    break;
                }
                self.push_action(&mut actions)?;
            } else {
                self.expect_punct(Punct::RBrace)?;
                break;
            }
        }
        Ok(Clause {
            guard,
            actions,
            span: start.to(self.prev_span()),
        })
    }

    fn push_action(&mut self, actions: &mut Vec<Action>) -> PResult<()> {
        let span = self.here();
        let action = match self.peek_kind() {
            Some(TokenKind::Keyword(Keyword::Stop)) => {
                self.pos += 1;
                Action::Stop
            }
            Some(TokenKind::Keyword(Keyword::CapSpeed)) => {
                self.pos += 1;
                Action::CapSpeed
            }
            Some(TokenKind::Keyword(Keyword::Sound)) => {
                self.pos += 1;
                Action::Sound(self.ident("sound label")?)
            }
            _ => {
                return Err(
                    self.error_here("expected action (`stop`, `cap_speed`, or `sound <label>`)")
                )
            }
        };
        if actions.iter().any(|a| a.same_effect(&action)) {
            return Err(Diagnostic::new(
                DiagCode::Parse,
                format!("duplicate action `{action}` in clause"),
                span.to(self.prev_span()),
            ));
        }
        actions.push(action);
        Ok(())
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            Err(Diagnostic::new(
                DiagCode::Parse,
                "expression nested too deeply",
                self.here(),
            ))
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.enter()?;
        let result = self.comparison();
        self.depth -= 1;
        result
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        let Some(TokenKind::Cmp(op)) = self.peek_kind() else {
            return Ok(lhs);
        };
        self.pos += 1;
        let rhs = self.additive()?;
        if let Some(TokenKind::Cmp(_)) = self.peek_kind() {
            return Err(self.error_here("comparisons cannot be chained; add parentheses"));
        }
        let span = lhs.span.to(rhs.span);
        Ok(Expr {
            span,
            ..Expr::compare(op, lhs, rhs)
        })
    }

    fn additive(&mut self) -> PResult<Expr> {
        self.binary_chain(true)
    }

    fn binary_chain(&mut self, additive: bool) -> PResult<Expr> {
        let mut lhs = if additive {
            self.binary_chain(false)?
        } else {
            self.primary()?
        };
        let entered = self.depth;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Arith(op))
                    if additive == matches!(op, ArithOp::Add | ArithOp::Sub) =>
                {
                    op
                }
                _ => break,
            };
            self.pos += 1;
            self.enter()?;
            let rhs = if additive {
                self.binary_chain(false)?
            } else {
                self.primary()?
            };
            let span = lhs.span.to(rhs.span);
            lhs = Expr {
                span,
                ..Expr::arith(op, lhs, rhs)
            };
        }
        self.depth = entered;
        Ok(lhs)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(tok) = self.peek() else {
            return Err(self.error_here("expected expression"));
        };
        let span = tok.span;
        match tok.kind {
            TokenKind::Number(lit) => {
                self.pos += 1;
                Ok(Expr {
                    span,
                    ..Expr::new(ExprKind::Literal(lit))
                })
            }
            TokenKind::Keyword(k @ (Keyword::True | Keyword::False)) => {
                self.pos += 1;
                Ok(Expr {
                    span,
                    ..Expr::new(ExprKind::Bool(k == Keyword::True))
                })
            }
            TokenKind::Punct(Punct::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect_punct(Punct::RParen)?;
                Ok(inner)
            }
            TokenKind::Ident => {
                let name = self.ident("identifier")?;
                match self.peek_kind() {
                    Some(TokenKind::Punct(Punct::LParen)) => self.call(name),
                    Some(TokenKind::Punct(Punct::Dot)) => {
                        self.pos += 1;
                        let field = self.ident("field name")?;
                        let base = Expr {
                            span: name.span,
                            ..Expr::new(ExprKind::Var(name))
                        };
                        Ok(Expr {
                            span: span.to(field.span),
                            ..Expr::new(ExprKind::Field {
                                base: Box::new(base),
                                field,
                            })
                        })
                    }
                    _ => Ok(Expr {
                        span,
                        ..Expr::new(ExprKind::Var(name))
                    }),
                }
            }
            _ => Err(self.error_here("expected expression")),
        }
    }

    fn call(&mut self, name: Ident) -> PResult<Expr> {
        self.expect_punct(Punct::LParen)?;
        let kind = if name.as_str() == "distance" {
            let var = self.ident("detection variable")?;
            ExprKind::Distance(var)
        } else if let Some(func) = AggFunc::from_name(name.as_str()) {
            self.enter()?;
            let arg = self.set_expr();
            self.depth -= 1;
            ExprKind::Aggregate {
                func,
                arg: Box::new(arg?),
            }
        } else {
            return Err(Diagnostic::new(
                DiagCode::Parse,
                format!(
                    "unknown function `{}` (expected distance, size, count, max, or min)",
                    name.as_str()
                ),
                name.span,
            ));
        };
        let close = self.expect_punct(Punct::RParen)?;
        Ok(Expr {
            span: name.span.to(close.span),
            ..Expr::new(kind)
        })
    }

    fn set_expr(&mut self) -> PResult<SetExpr> {
        if self.peek_kind() == Some(TokenKind::Ident)
            && self.peek_kind_at(1) == Some(TokenKind::Keyword(Keyword::In))
        {
            let var = self.ident("comprehension variable")?;
            self.pos += 1;
            let domain = self.expr()?;
            let filter = if self.eat(TokenKind::Punct(Punct::Colon)) {
                Some(self.expr()?)
            } else {
                None
            };
            Ok(SetExpr::Comprehension {
                var,
                domain,
                filter,
            })
        } else {
            Ok(SetExpr::Plain(self.expr()?))
        }
    }
}

fn dup_arg(name: &Ident) -> Diagnostic {
    Diagnostic::new(
        DiagCode::Parse,
        format!("duplicate histogram argument `{}`", name.as_str()),
        name.span,
    )
}
