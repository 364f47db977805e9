use std::fmt;

use rust_decimal::Decimal;

use crate::ast::{ArithOp, CmpOp, Literal, UnitSuffix};
use crate::diagnostic::{DiagCode, Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident,
    /// A numeric literal with its optional, directly attached unit suffix.
    Number(Literal),
    Punct(Punct),
    Cmp(CmpOp),
    Arith(ArithOp),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Exists,
    In,
    Hist,
    Histogram,
    Lasers,
    Sound,
    Stop,
    CapSpeed,
    True,
    False,
}

impl Keyword {
    fn from_word(word: &str) -> Option<Keyword> {
        Some(match word {
            "exists" => Keyword::Exists,
            "in" => Keyword::In,
            "hist" => Keyword::Hist,
            "histogram" => Keyword::Histogram,
            "lasers" => Keyword::Lasers,
            "sound" => Keyword::Sound,
            "stop" => Keyword::Stop,
            "cap_speed" => Keyword::CapSpeed,
            "true" => Keyword::True,
            "false" => Keyword::False,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Exists => "exists",
            Keyword::In => "in",
            Keyword::Hist => "hist",
            Keyword::Histogram => "histogram",
            Keyword::Lasers => "lasers",
            Keyword::Sound => "sound",
            Keyword::Stop => "stop",
            Keyword::CapSpeed => "cap_speed",
            Keyword::True => "true",
            Keyword::False => "false",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Punct {
    LParen,
    RParen,
    LBrace,
    RBrace,
    Colon,
    Semi,
    Comma,
    Dot,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        match self {
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::Colon => ":",
            Punct::Semi => ";",
            Punct::Comma => ",",
            Punct::Dot => ".",
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Ident => f.write_str("identifier"),
            TokenKind::Number(_) => f.write_str("number"),
            TokenKind::Punct(p) => write!(f, "`{}`", p.as_str()),
            TokenKind::Cmp(op) => write!(f, "`{}`", op.symbol()),
            TokenKind::Arith(op) => write!(f, "`{}`", op.symbol()),
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat_while(&mut self, pred: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
    }

    fn mark(&self) -> (usize, u32, u32) {
        (self.pos, self.line, self.column)
    }

    fn span_from(&self, mark: (usize, u32, u32)) -> SourceSpan {
        SourceSpan {
            offset: mark.0,
            len: self.pos - mark.0,
            line: mark.1,
            column: mark.2,
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits source text into tokens. Whitespace and `#` line comments are
/// skipped. Stops at the first unrecognized character.
pub fn tokenize(source: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut cur = Cursor {
        src: source,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            cur.eat_while(|c| c != '\n');
            continue;
        }
        let start = cur.mark();
        let kind = if is_ident_start(c) {
            cur.eat_while(is_ident_continue);
            match Keyword::from_word(&source[start.0..cur.pos]) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident,
            }
        } else if c.is_ascii_digit() {
            lex_number(&mut cur, start)?
        } else {
            cur.bump();
            match c {
                '(' => TokenKind::Punct(Punct::LParen),
                ')' => TokenKind::Punct(Punct::RParen),
                '{' => TokenKind::Punct(Punct::LBrace),
                '}' => TokenKind::Punct(Punct::RBrace),
                ':' => TokenKind::Punct(Punct::Colon),
                ';' => TokenKind::Punct(Punct::Semi),
                ',' => TokenKind::Punct(Punct::Comma),
                '.' => TokenKind::Punct(Punct::Dot),
                '+' => TokenKind::Arith(ArithOp::Add),
                '-' => TokenKind::Arith(ArithOp::Sub),
                '*' => TokenKind::Arith(ArithOp::Mul),
                '/' => TokenKind::Arith(ArithOp::Div),
                '=' => TokenKind::Cmp(CmpOp::Eq),
                '<' | '>' | '!' => {
                    let eq = cur.peek() == Some('=');
                    if eq {
                        cur.bump();
                    }
                    match (c, eq) {
                        ('<', false) => TokenKind::Cmp(CmpOp::Lt),
                        ('<', true) => TokenKind::Cmp(CmpOp::Le),
                        ('>', false) => TokenKind::Cmp(CmpOp::Gt),
                        ('>', true) => TokenKind::Cmp(CmpOp::Ge),
                        ('!', true) => TokenKind::Cmp(CmpOp::Ne),
                        _ => {
                            return Err(Diagnostic::new(
                                DiagCode::Lex,
                                "unexpected character `!` (did you mean `!=`?)",
                                cur.span_from(start),
                            ))
                        }
                    }
                }
                other => {
                    return Err(Diagnostic::new(
                        DiagCode::Lex,
                        format!("unrecognized character `{}`", other.escape_debug()),
                        cur.span_from(start),
                    ))
                }
            }
        };
        let span = cur.span_from(start);
        tokens.push(Token {
            kind,
            text: source[span.offset..span.end()].to_string(),
            span,
        });
    }
    Ok(tokens)
}

fn lex_number(cur: &mut Cursor<'_>, start: (usize, u32, u32)) -> Result<TokenKind, Diagnostic> {
    cur.eat_while(|c| c.is_ascii_digit());
    if cur.peek() == Some('.') && cur.peek_second().is_some_and(|c| c.is_ascii_digit()) {
        cur.bump();
        cur.eat_while(|c| c.is_ascii_digit());
    }
    let digits_end = cur.pos;
    let suffix = if cur.peek().is_some_and(is_ident_start) {
        let suffix_start = cur.pos;
        cur.eat_while(is_ident_continue);
        match &cur.src[suffix_start..cur.pos] {
            "m" => Some(UnitSuffix::Meters),
            "px" => Some(UnitSuffix::Pixels),
            other => {
                return Err(Diagnostic::new(
                    DiagCode::Lex,
                    format!("unknown unit suffix `{other}` (expected `m` or `px`)"),
                    cur.span_from(start),
                ))
            }
        }
    } else {
        None
    };
    let value = Decimal::from_str_exact(&cur.src[start.0..digits_end])
        .map_err(|_| {
            Diagnostic::new(
                DiagCode::Lex,
                "numeric literal out of range",
                cur.span_from(start),
            )
        })?
        .normalize();
    Ok(TokenKind::Number(Literal { value, suffix }))
}
