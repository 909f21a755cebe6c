//! Minimal s-expression reader shared by the text formats.
//!
//! Round and square brackets both delimit lists; `|` is a standalone token
//! and `;` starts a comment running to the end of the line.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bracket {
    Round,
    Square,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String, Pos),
    Bar(Pos),
    List(Bracket, Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::Bar(p) | SExpr::List(_, _, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(_, items, _) => Some(items),
            _ => None,
        }
    }

    /// Returns `(head, rest)` if this is a round list starting with an atom.
    pub fn as_form(&self) -> Option<(&str, &[SExpr])> {
        match self {
            SExpr::List(Bracket::Round, items, _) => match items.split_first() {
                Some((SExpr::Atom(head, _), rest)) => Some((head, rest)),
                _ => None,
            },
            _ => None,
        }
    }
}

pub fn syntax_error(pos: Pos, message: impl Into<String>) -> Error {
    Error::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open(Bracket),
    Close(Bracket),
    Bar,
    Atom(String),
}

fn tokenize(text: &str) -> Result<Vec<(Token, Pos)>> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        let single = match c {
            '(' => Some(Token::Open(Bracket::Round)),
            ')' => Some(Token::Close(Bracket::Round)),
            '[' => Some(Token::Open(Bracket::Square)),
            ']' => Some(Token::Close(Bracket::Square)),
            '|' => Some(Token::Bar),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            column += 1;
            tokens.push((tok, pos));
            continue;
        }
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
        } else if c.is_whitespace() {
            chars.next();
            column += 1;
        } else if c == ';' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
        } else {
            let mut atom = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() || "()[]|;".contains(c) {
                    break;
                }
                atom.push(c);
                chars.next();
                column += 1;
            }
            tokens.push((Token::Atom(atom), pos));
        }
    }
    Ok(tokens)
}

/// Parses exactly one expression; trailing tokens are an error.
pub fn parse_one(text: &str) -> Result<SExpr> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut idx = 0;
    let expr = parse_expr(&tokens, &mut idx)?;
    if let Some((_, pos)) = tokens.get(idx) {
        return Err(syntax_error(*pos, "unexpected trailing input"));
    }
    Ok(expr)
}

fn parse_expr(tokens: &[(Token, Pos)], idx: &mut usize) -> Result<SExpr> {
    let (tok, pos) = tokens[*idx].clone();
    *idx += 1;
    match tok {
        Token::Atom(s) => Ok(SExpr::Atom(s, pos)),
        Token::Bar => Ok(SExpr::Bar(pos)),
        Token::Close(_) => Err(syntax_error(pos, "unexpected closing bracket")),
        Token::Open(kind) => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*idx) {
                    None => return Err(syntax_error(pos, "unclosed bracket")),
                    Some((Token::Close(close), cpos)) => {
                        if *close != kind {
                            return Err(syntax_error(*cpos, "mismatched closing bracket"));
                        }
                        *idx += 1;
                        return Ok(SExpr::List(kind, items, pos));
                    }
                    Some(_) => items.push(parse_expr(tokens, idx)?),
                }
            }
        }
    }
}
