//! Recursive-descent parser for connected-sum expressions.
//!
//! Grammar:
//! ```text
//! expr := term ("#" term)*
//! term := INT "*" atom | atom
//! atom := IDENT | "~" atom | "(" expr ")"
//! ```
//! `~` reverses orientation, `k * M` is the k-fold connected sum, `#` builds
//! sums left-associatively through the surgery rules.

use std::fmt;

use thiserror::Error;

use super::{Catalog, ManifoldModel};
use crate::surgery;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {position}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        position: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown manifold `{0}`")]
    UnknownManifold(String),
    #[error("multiplicity must be at least 1, got {0}")]
    ZeroMultiplicity(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Ident(String),
    Reverse(Box<Atom>),
    Group(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub multiplicity: Option<u32>,
    pub atom: Atom,
}

/// Parsed connected-sum expression; `terms` is nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub terms: Vec<Term>,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Ident(name) => write!(f, "{name}"),
            Atom::Reverse(inner) => write!(f, "~{inner}"),
            Atom::Group(expr) => write!(f, "({expr})"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.multiplicity {
            Some(k) => write!(f, "{k}*{}", self.atom),
            None => write!(f, "{}", self.atom),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, term) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " # ")?;
            }
            write!(f, "{term}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Int(u64),
    Hash,
    Star,
    Tilde,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Int(v) => format!("integer `{v}`"),
            Token::Hash => "`#`".into(),
            Token::Star => "`*`".into(),
            Token::Tilde => "`~`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
        }
    }
}

struct Lexer {
    tokens: Vec<(usize, Token)>,
    end: usize,
}

fn lex(text: &str) -> Result<Lexer, ParseError> {
    let mut tokens = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '#' => {
                tokens.push((i, Token::Hash));
                i += 1;
            }
            '*' => {
                tokens.push((i, Token::Star));
                i += 1;
            }
            '~' => {
                tokens.push((i, Token::Tilde));
                i += 1;
            }
            '(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let value: u64 = text[start..i].parse().map_err(|_| ParseError::Syntax {
                    position: start,
                    expected: vec!["integer"],
                    found: text[start..i].to_string(),
                })?;
                tokens.push((start, Token::Int(value)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push((start, Token::Ident(text[start..i].to_string())));
            }
            other => {
                return Err(ParseError::Syntax {
                    position: i,
                    expected: vec!["identifier", "integer", "`#`", "`*`", "`~`", "`(`", "`)`"],
                    found: format!("`{other}`"),
                });
            }
        }
    }
    Ok(Lexer { tokens, end: text.len() })
}

struct Parser {
    lexer: Lexer,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.lexer.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.lexer
            .tokens
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.lexer.end)
    }

    fn found(&self) -> String {
        self.peek()
            .map(|t| t.describe())
            .unwrap_or_else(|| "end of input".into())
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.lexer.tokens.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError::Syntax {
            position: self.position(),
            expected,
            found: self.found(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        while matches!(self.peek(), Some(Token::Hash)) {
            self.advance();
            terms.push(self.term()?);
        }
        Ok(Expr { terms })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if let Some(Token::Int(value)) = self.peek().cloned() {
            self.advance();
            if !matches!(self.peek(), Some(Token::Star)) {
                return Err(self.error(vec!["`*`"]));
            }
            self.advance();
            if value < 1 {
                return Err(ParseError::ZeroMultiplicity(value));
            }
            let multiplicity = u32::try_from(value).map_err(|_| ParseError::Syntax {
                position: self.position(),
                expected: vec!["multiplicity fitting in 32 bits"],
                found: format!("`{value}`"),
            })?;
            let atom = self.atom()?;
            return Ok(Term { multiplicity: Some(multiplicity), atom });
        }
        Ok(Term { multiplicity: None, atom: self.atom()? })
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        match self.peek().cloned() {
            Some(Token::Ident(name)) => {
                self.advance();
                Ok(Atom::Ident(name))
            }
            Some(Token::Tilde) => {
                self.advance();
                Ok(Atom::Reverse(Box::new(self.atom()?)))
            }
            Some(Token::LParen) => {
                self.advance();
                let inner = self.expr()?;
                if !matches!(self.peek(), Some(Token::RParen)) {
                    return Err(self.error(vec!["`)`"]));
                }
                self.advance();
                Ok(Atom::Group(Box::new(inner)))
            }
            _ => Err(self.error(vec!["identifier", "`~`", "`(`"])),
        }
    }
}

/// Parse expression text into its syntax tree.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let lexer = lex(text)?;
    let mut parser = Parser { lexer, pos: 0 };
    let expr = parser.expr()?;
    if parser.peek().is_some() {
        return Err(parser.error(vec!["`#`", "end of input"]));
    }
    Ok(expr)
}

impl Atom {
    fn build(&self, catalog: &Catalog) -> Result<ManifoldModel, ParseError> {
        match self {
            Atom::Ident(name) => catalog
                .lookup(name)
                .cloned()
                .ok_or_else(|| ParseError::UnknownManifold(name.clone())),
            Atom::Reverse(inner) => Ok(inner.build(catalog)?.reversed()),
            Atom::Group(expr) => expr.build_unnamed(catalog).map(|(m, _)| m),
        }
    }
}

impl Expr {
    /// Build the model, naming it by the canonical printed form.
    pub fn build(&self, catalog: &Catalog) -> Result<ManifoldModel, ParseError> {
        Ok(self.build_with_decomposition(catalog)?.0)
    }

    /// Build the model together with the outermost sum decomposition when
    /// the expression is a connected sum (the last left-associative fold).
    pub fn build_with_decomposition(
        &self,
        catalog: &Catalog,
    ) -> Result<(ManifoldModel, Option<surgery::SumDecomposition>), ParseError> {
        let (model, split) = self.build_unnamed(catalog)?;
        if self.terms.len() == 1
            && self.terms[0].multiplicity.is_none()
            && matches!(self.terms[0].atom, Atom::Ident(_))
        {
            // identity parse: hand back the catalog entry untouched
            return Ok((model, split));
        }
        Ok((model.with_name(self.to_string()), split))
    }

    fn build_unnamed(
        &self,
        catalog: &Catalog,
    ) -> Result<(ManifoldModel, Option<surgery::SumDecomposition>), ParseError> {
        let mut acc: Option<ManifoldModel> = None;
        let mut last_split = None;
        for term in &self.terms {
            let atom_model = term.atom.build(catalog)?;
            let copies = term.multiplicity.unwrap_or(1);
            for _ in 0..copies {
                acc = Some(match acc {
                    None => atom_model.clone(),
                    Some(prev) => {
                        let (sum, split) = surgery::connected_sum(&prev, &atom_model);
                        last_split = Some(split);
                        sum
                    }
                });
            }
        }
        Ok((acc.expect("grammar guarantees at least one term"), last_split))
    }
}
