use crate::time::Rat;

use super::{FrontendError, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Agent,
    Work,
    After,
    Before,
    Advance,
    If,
    Choice,
    Else,
    While,
    Loop,
    Ident(String),
    Rat(Rat),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Rat(r) => format!("number `{r}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Agent => "agent",
            Tok::Work => "work",
            Tok::After => "after",
            Tok::Before => "before",
            Tok::Advance => "advance",
            Tok::If => "if",
            Tok::Choice => "choice",
            Tok::Else => "else",
            Tok::While => "while",
            Tok::Loop => "loop",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Ident(_) | Tok::Rat(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "agent" => Tok::Agent,
        "work" => Tok::Work,
        "after" => Tok::After,
        "before" => Tok::Before,
        "advance" => Tok::Advance,
        "if" => Tok::If,
        "choice" => Tok::Choice,
        "else" => Tok::Else,
        "while" => Tok::While,
        "loop" => Tok::Loop,
        _ => return None,
    })
}

/// Splits source text into tokens. The last token is always `Eof`.
pub fn tokenize(src: &str) -> Result<Vec<Token>, FrontendError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let lex_err = |start: usize, end: usize, message: String| FrontendError::Lex {
        span: Span::new(start, end),
        message,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            i = src[i..].find('\n').map_or(bytes.len(), |n| i + n);
            continue;
        }
        let start = i;
        let single = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'{' => Some(Tok::LBrace),
            b'}' => Some(Tok::RBrace),
            b',' => Some(Tok::Comma),
            b';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            out.push(Token {
                tok,
                span: Span::new(start, i),
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &src[start..i];
            let tok = keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string()));
            out.push(Token {
                tok,
                span: Span::new(start, i),
            });
            continue;
        }
        if c.is_ascii_digit() {
            let digits = |mut j: usize| {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                j
            };
            i = digits(i);
            let num_end = i;
            let mut den_range = None;
            if i < bytes.len() && bytes[i] == b'/' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                let d0 = i + 1;
                i = digits(d0);
                den_range = Some((d0, i));
            }
            if i < bytes.len() && (bytes[i] == b'.' || bytes[i].is_ascii_alphabetic()) {
                let mut end = i + 1;
                while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'.') {
                    end += 1;
                }
                let message = if bytes[i] == b'.' {
                    format!(
                        "decimal literal `{}` is not allowed; write a fraction `p/q`",
                        &src[start..end]
                    )
                } else {
                    format!("malformed number `{}`", &src[start..end])
                };
                return Err(lex_err(start, end, message));
            }
            let parse = |s: &str| {
                s.parse::<i64>()
                    .map_err(|_| lex_err(start, i, format!("number `{}` is too large", &src[start..i])))
            };
            let num = parse(&src[start..num_end])?;
            let value = match den_range {
                None => Rat::from_integer(num),
                Some((a, b)) => {
                    let den = parse(&src[a..b])?;
                    if den == 0 {
                        return Err(lex_err(start, i, "zero denominator".into()));
                    }
                    Rat::new(num, den)
                }
            };
            out.push(Token {
                tok: Tok::Rat(value),
                span: Span::new(start, i),
            });
            continue;
        }
        let ch = src[i..].chars().next().expect("in bounds");
        return Err(lex_err(
            start,
            start + ch.len_utf8(),
            format!("unexpected character `{ch}`"),
        ));
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(bytes.len(), bytes.len()),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::{rat, ratio};

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn basic_statements() {
        assert_eq!(
            toks("after(2);"),
            vec![Tok::After, Tok::LParen, Tok::Rat(rat(2)), Tok::RParen, Tok::Semi, Tok::Eof]
        );
        assert_eq!(
            toks("work(a, 3/2); // trailing"),
            vec![
                Tok::Work,
                Tok::LParen,
                Tok::Ident("a".into()),
                Tok::Comma,
                Tok::Rat(ratio(3, 2)),
                Tok::RParen,
                Tok::Semi,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn rejects_decimals_and_strays() {
        let e = tokenize("after(2.5);").unwrap_err();
        assert!(matches!(e, FrontendError::Lex { span, .. } if span == Span::new(6, 9)));
        assert!(tokenize("work(a, 1/0);").is_err());
        assert!(tokenize("after(1) @").is_err());
        assert!(tokenize("after(2x)").is_err());
    }

    #[test]
    fn spans_point_into_the_source() {
        let t = tokenize("agent  foo").unwrap();
        assert_eq!(t[1].span, Span::new(7, 10));
        assert_eq!(t[2].span, Span::new(10, 10));
    }
}
