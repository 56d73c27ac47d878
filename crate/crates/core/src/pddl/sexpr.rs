//! S-expression reader for PDDL text, tracking line/column positions.

use std::fmt;

use super::error::ParseError;

/// A 1-based line/column position in the input text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SExpr {
    /// A bare symbol. PDDL is case-insensitive, so atoms are lowercased.
    Atom { text: String, pos: Pos },
    List { items: Vec<SExpr>, pos: Pos },
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom { pos, .. } | SExpr::List { pos, .. } => *pos,
        }
    }

    pub fn as_atom(&self) -> Option<(&str, Pos)> {
        match self {
            SExpr::Atom { text, pos } => Some((text, *pos)),
            SExpr::List { .. } => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            SExpr::Atom { .. } => None,
        }
    }

    pub fn expect_atom(&self) -> Result<(&str, Pos), ParseError> {
        self.as_atom().ok_or_else(|| ParseError::Syntax {
            pos: self.pos(),
            msg: "expected a symbol, found a list".into(),
        })
    }

    pub fn expect_list(&self) -> Result<&[SExpr], ParseError> {
        self.as_list().ok_or_else(|| ParseError::Syntax {
            pos: self.pos(),
            msg: "expected a list, found a symbol".into(),
        })
    }
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    at: usize,
    line: u32,
    col: u32,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    LParen(Pos),
    RParen(Pos),
    Symbol(String, Pos),
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, bytes: src.as_bytes(), at: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) {
        if self.bytes[self.at] == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        self.at += 1;
    }

    fn skip_trivia(&mut self) {
        while self.at < self.bytes.len() {
            match self.bytes[self.at] {
                b' ' | b'\t' | b'\r' | b'\n' => self.bump(),
                b';' => {
                    while self.at < self.bytes.len() && self.bytes[self.at] != b'\n' {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, ParseError> {
        self.skip_trivia();
        if self.at >= self.bytes.len() {
            return Ok(None);
        }
        let pos = Pos::new(self.line, self.col);
        match self.bytes[self.at] {
            b'(' => {
                self.bump();
                Ok(Some(Token::LParen(pos)))
            }
            b')' => {
                self.bump();
                Ok(Some(Token::RParen(pos)))
            }
            _ => {
                let start = self.at;
                while self.at < self.bytes.len()
                    && !matches!(self.bytes[self.at], b'(' | b')' | b' ' | b'\t' | b'\r' | b'\n' | b';')
                {
                    self.bump();
                }
                let text = self.src[start..self.at].to_ascii_lowercase();
                Ok(Some(Token::Symbol(text, pos)))
            }
        }
    }
}

/// Reads a single top-level s-expression; trailing non-whitespace is an error.
pub fn parse_one(src: &str) -> Result<SExpr, ParseError> {
    let mut lexer = Lexer::new(src);
    let first = lexer.next_token()?.ok_or(ParseError::Syntax {
        pos: Pos::new(1, 1),
        msg: "empty input".into(),
    })?;
    let expr = parse_expr(&mut lexer, first)?;
    if let Some(tok) = lexer.next_token()? {
        return Err(ParseError::Syntax {
            pos: token_pos(&tok),
            msg: "unexpected trailing input".into(),
        });
    }
    Ok(expr)
}

fn token_pos(tok: &Token) -> Pos {
    match tok {
        Token::LParen(p) | Token::RParen(p) | Token::Symbol(_, p) => *p,
    }
}

fn parse_expr(lexer: &mut Lexer<'_>, first: Token) -> Result<SExpr, ParseError> {
    match first {
        Token::Symbol(text, pos) => Ok(SExpr::Atom { text, pos }),
        Token::RParen(pos) => Err(ParseError::Syntax { pos, msg: "unmatched `)`".into() }),
        Token::LParen(pos) => {
            let mut items = Vec::new();
            loop {
                let tok = lexer.next_token()?.ok_or(ParseError::Syntax {
                    pos,
                    msg: "unclosed `(`".into(),
                })?;
                if let Token::RParen(_) = tok {
                    return Ok(SExpr::List { items, pos });
                }
                items.push(parse_expr(lexer, tok)?);
            }
        }
    }
}
