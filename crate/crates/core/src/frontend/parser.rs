use crate::time::Rat;

use super::lexer::{Tok, Token};
use super::{FrontendError, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub agents: Vec<Agent>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    pub name: String,
    pub span: Span,
    pub body: Vec<Stmt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Work { name: String, cost: Rat },
    After(Rat),
    Before(Rat),
    Advance(Rat),
    IfChoice { then: Vec<Stmt>, els: Vec<Stmt> },
    WhileChoice(Vec<Stmt>),
    Loop(Vec<Stmt>),
}

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
}

const STMT_START: &[&str] = &["work", "after", "before", "advance", "if", "while", "loop"];

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> &'t Token {
        let t = &self.toks[self.pos];
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> FrontendError {
        let t = self.peek();
        FrontendError::Parse {
            span: t.span,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok, shown: &str) -> Result<Span, FrontendError> {
        if self.peek().tok == tok {
            Ok(self.bump().span)
        } else {
            Err(self.error(&[shown]))
        }
    }

    fn ident(&mut self) -> Result<String, FrontendError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                self.bump();
                Ok(s.clone())
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn number(&mut self) -> Result<Rat, FrontendError> {
        match self.peek().tok {
            Tok::Rat(r) => {
                self.bump();
                Ok(r)
            }
            _ => Err(self.error(&["number"])),
        }
    }

    fn program(&mut self) -> Result<Program, FrontendError> {
        let mut agents = vec![self.agent()?];
        while self.peek().tok != Tok::Eof {
            if self.peek().tok != Tok::Agent {
                return Err(self.error(&["agent", "end of input"]));
            }
            agents.push(self.agent()?);
        }
        Ok(Program { agents })
    }

    fn agent(&mut self) -> Result<Agent, FrontendError> {
        let start = self.expect(Tok::Agent, "agent")?;
        let name = self.ident()?;
        let (body, end) = self.block()?;
        Ok(Agent {
            name,
            span: start.to(end),
            body,
        })
    }

    /// `{ stmt+ }`, returning the closing brace span.
    fn block(&mut self) -> Result<(Vec<Stmt>, Span), FrontendError> {
        self.expect(Tok::LBrace, "{")?;
        let mut body = Vec::new();
        loop {
            if self.peek().tok == Tok::RBrace && !body.is_empty() {
                let end = self.bump().span;
                return Ok((body, end));
            }
            body.push(self.stmt()?);
        }
    }

    fn call(&mut self) -> Result<(Rat, Span), FrontendError> {
        self.expect(Tok::LParen, "(")?;
        let r = self.number()?;
        self.expect(Tok::RParen, ")")?;
        let end = self.expect(Tok::Semi, ";")?;
        Ok((r, end))
    }

    fn stmt(&mut self) -> Result<Stmt, FrontendError> {
        let first = self.peek();
        let start = first.span;
        let (kind, end) = match first.tok {
            Tok::Work => {
                self.bump();
                self.expect(Tok::LParen, "(")?;
                let name = self.ident()?;
                self.expect(Tok::Comma, ",")?;
                let cost = self.number()?;
                self.expect(Tok::RParen, ")")?;
                let end = self.expect(Tok::Semi, ";")?;
                (StmtKind::Work { name, cost }, end)
            }
            Tok::After | Tok::Before | Tok::Advance => {
                self.bump();
                let (d, end) = self.call()?;
                let kind = match first.tok {
                    Tok::After => StmtKind::After(d),
                    Tok::Before => StmtKind::Before(d),
                    _ => StmtKind::Advance(d),
                };
                (kind, end)
            }
            Tok::If => {
                self.bump();
                self.expect(Tok::Choice, "choice")?;
                let (then, _) = self.block()?;
                self.expect(Tok::Else, "else")?;
                let (els, end) = self.block()?;
                (StmtKind::IfChoice { then, els }, end)
            }
            Tok::While => {
                self.bump();
                self.expect(Tok::Choice, "choice")?;
                let (body, end) = self.block()?;
                (StmtKind::WhileChoice(body), end)
            }
            Tok::Loop => {
                self.bump();
                let (body, end) = self.block()?;
                (StmtKind::Loop(body), end)
            }
            _ => return Err(self.error(STMT_START)),
        };
        Ok(Stmt {
            kind,
            span: start.to(end),
        })
    }
}

pub fn parse(tokens: &[Token]) -> Result<Program, FrontendError> {
    Parser { toks: tokens, pos: 0 }.program()
}
