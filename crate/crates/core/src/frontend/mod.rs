//! Source text to [`Program`](crate::ast::Program).

mod lexer;
mod parser;

pub use lexer::{tokenize, Keyword, Punct, Token, TokenKind};
pub use parser::{parse, MAX_NESTING};

use crate::ast::Program;
use crate::diagnostic::Diagnostic;

/// Tokenizes and parses `source`, naming the result `source_name`.
pub fn parse_source(source_name: &str, source: &str) -> Result<Program, Vec<Diagnostic>> {
    let tokens = tokenize(source).map_err(|d| vec![d])?;
    let mut program = parse(&tokens)?;
    program.source_name = source_name.to_string();
    Ok(program)
}
