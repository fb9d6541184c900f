use super::ast::Span;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyntaxErrorKind {
    Lex,
    Parse,
}

/// A lexing or parsing failure, positioned by byte span.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct SyntaxError {
    pub kind: SyntaxErrorKind,
    pub span: Span,
    pub message: String,
    /// Tokens that would have been accepted at `span`, when known.
    pub expected: Vec<String>,
}

impl SyntaxError {
    pub fn lex(span: Span, message: impl Into<String>) -> Self {
        SyntaxError {
            kind: SyntaxErrorKind::Lex,
            span,
            message: message.into(),
            expected: Vec::new(),
        }
    }

    pub fn parse(span: Span, message: impl Into<String>) -> Self {
        SyntaxError {
            kind: SyntaxErrorKind::Parse,
            span,
            message: message.into(),
            expected: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResolveErrorKind {
    UnknownName,
    ArityMismatch,
    TypeMismatch,
    DuplicateName,
    /// Program invocations form a cycle.
    Recursion,
    /// Anything else structurally invalid: wrong argument counts, bad assignment targets.
    Invalid,
}

impl fmt::Display for ResolveErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ResolveErrorKind::UnknownName => "unknown name",
            ResolveErrorKind::ArityMismatch => "arity mismatch",
            ResolveErrorKind::TypeMismatch => "type mismatch",
            ResolveErrorKind::DuplicateName => "duplicate name",
            ResolveErrorKind::Recursion => "recursive invocation",
            ResolveErrorKind::Invalid => "invalid",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind}: {message}")]
pub struct ResolveError {
    pub kind: ResolveErrorKind,
    pub span: Span,
    pub message: String,
}

impl ResolveError {
    pub fn new(kind: ResolveErrorKind, span: Span, message: impl Into<String>) -> Self {
        ResolveError {
            kind,
            span,
            message: message.into(),
        }
    }
}

/// Any error a model can produce before analysis starts.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{} resolution error(s)", .0.len())]
    Resolve(Vec<ResolveError>),
}

/// A single positioned diagnostic, the common rendering form of [`ModelError`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: Span,
    pub message: String,
}

impl ModelError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            ModelError::Syntax(e) => {
                let mut message = e.message.clone();
                if !e.expected.is_empty() {
                    message.push_str(&format!(" (expected one of: {})", e.expected.join(", ")));
                }
                vec![Diagnostic { span: e.span, message }]
            }
            ModelError::Resolve(errs) => errs
                .iter()
                .map(|e| Diagnostic {
                    span: e.span,
                    message: e.to_string(),
                })
                .collect(),
        }
    }
}

/// Renders `file:line:col: message` followed by the offending source line and a caret.
pub fn render_diagnostic(file: &str, src: &str, d: &Diagnostic) -> String {
    let (line, col) = d.span.line_col(src);
    let text = src.lines().nth(line - 1).unwrap_or("");
    let width = d
        .span
        .end
        .saturating_sub(d.span.start)
        .clamp(1, text.len().saturating_sub(col - 1).max(1));
    format!(
        "{file}:{line}:{col}: {}\n  | {text}\n  | {}{}",
        d.message,
        " ".repeat(col - 1),
        "^".repeat(width)
    )
}
