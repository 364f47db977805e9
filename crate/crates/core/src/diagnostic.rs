//! Source locations and compiler diagnostics.

use std::fmt;

/// A region of the original source text.
///
/// `offset` and `len` are byte based; `line` and `column` are 1-based, with the
/// column counted in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SourceSpan {
    pub offset: usize,
    pub len: usize,
    pub line: u32,
    pub column: u32,
}

impl SourceSpan {
    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        let first = if self.offset <= other.offset {
            self
        } else {
            other
        };
        let end = (self.offset + self.len).max(other.offset + other.len);
        SourceSpan {
            offset: first.offset,
            len: end - first.offset,
            line: first.line,
            column: first.column,
        }
    }

    pub fn end(&self) -> usize {
        self.offset + self.len
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagCode {
    Lex,
    Parse,
    Unit,
    Unresolved,
    Sensor,
    Guard,
    Subsume,
    Unreachable,
    Const,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::Lex => "E-LEX",
            DiagCode::Parse => "E-PARSE",
            DiagCode::Unit => "E-UNIT",
            DiagCode::Unresolved => "E-UNRESOLVED",
            DiagCode::Sensor => "E-SENSOR",
            DiagCode::Guard => "E-GUARD",
            DiagCode::Subsume => "W-SUBSUME",
            DiagCode::Unreachable => "W-UNREACHABLE",
            DiagCode::Const => "W-CONST",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            DiagCode::Subsume | DiagCode::Unreachable | DiagCode::Const => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    pub message: String,
    pub span: SourceSpan,
}

impl Diagnostic {
    pub fn new(code: DiagCode, message: impl Into<String>, span: SourceSpan) -> Self {
        Diagnostic {
            severity: code.severity(),
            code,
            message: message.into(),
            span,
        }
    }

    /// `<file>:<line>:<col>: <severity> <code>: <message>`
    pub fn render(&self, file: &str) -> String {
        format!(
            "{}:{}:{}: {} {}: {}",
            file, self.span.line, self.span.column, self.severity, self.code, self.message
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {} {}: {}",
            self.span.line, self.span.column, self.severity, self.code, self.message
        )
    }
}

impl std::error::Error for Diagnostic {}

/// Renders a list of diagnostics, one per line, each terminated by `\n`.
pub fn render_all(diagnostics: &[Diagnostic], file: &str) -> String {
    let mut out = String::new();
    for d in diagnostics {
        out.push_str(&d.render(file));
        out.push('\n');
    }
    out
}
