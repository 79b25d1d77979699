//! A small agent language with explicit timing instructions, compiled to
//! relative automata.
//!
//! ```text
//! agent p {
//!   loop { after(1); work(x, 1/2); before(1); }
//! }
//! ```

mod compile;
pub mod lexer;
pub mod parser;

use crate::model::TcaGraph;

pub use compile::compile;
pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse, Agent, Program, Stmt, StmtKind};

/// Byte range into the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    /// 1-based line and column (in characters) of the start.
    pub fn line_col(&self, src: &str) -> (usize, usize) {
        let before = &src[..self.start.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        (line, before[line_start..].chars().count() + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FrontendError {
    #[error("{message}")]
    Lex { span: Span, message: String },
    #[error("expected {}, found {found}", expected_list(.expected))]
    Parse {
        span: Span,
        expected: Vec<String>,
        found: String,
    },
    #[error("statement can never run: the enclosing `loop` does not exit")]
    Unreachable { span: Span },
    #[error("loop body neither consumes nor waits for time")]
    EmptyLoop { span: Span },
    #[error("loop can repeat without time advancing (no positive after/advance on the cycle)")]
    ZenoCycle { span: Span, nodes: Vec<String> },
    #[error("this `before` can never be met after the preceding `after`")]
    ImpossibleConstraints { span: Span, after: String, before: String },
}

fn expected_list(items: &[String]) -> String {
    match items {
        [one] => one.clone(),
        _ => format!("one of {}", items.join(", ")),
    }
}

impl FrontendError {
    pub fn span(&self) -> Span {
        match self {
            FrontendError::Lex { span, .. }
            | FrontendError::Parse { span, .. }
            | FrontendError::Unreachable { span }
            | FrontendError::EmptyLoop { span }
            | FrontendError::ZenoCycle { span, .. }
            | FrontendError::ImpossibleConstraints { span, .. } => *span,
        }
    }

    /// `file:line:col: message`, then the offending line with a caret
    /// underline.
    pub fn render(&self, file: &str, src: &str) -> String {
        let span = self.span();
        let (line, col) = span.line_col(src);
        let text = src.lines().nth(line - 1).unwrap_or("");
        let line_start = src[..span.start.min(src.len())].rfind('\n').map_or(0, |i| i + 1);
        let line_end = line_start + text.len();
        let start = span.start.min(line_end);
        let width = src[start..span.end.clamp(start, line_end)].chars().count().max(1);
        format!(
            "{file}:{line}:{col}: {self}\n{text}\n{}{}\n",
            " ".repeat(col - 1),
            "^".repeat(width)
        )
    }
}

/// Tokenizes, parses and compiles `src`, one graph per agent.
pub fn compile_source(src: &str) -> Result<Vec<TcaGraph>, FrontendError> {
    compile(&parse(&tokenize(src)?)?)
}
