//! Recursive-descent parser for the scalar expression grammar.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          right-associative, constant exponent
//! atom    := number | name | name '(' sum ')' | '(' sum ')'
//! ```
//!
//! `-x^2` therefore parses as `-(x^2)`. The parser never rewrites the tree, so
//! printing a parsed expression reproduces its text up to whitespace and
//! redundant parentheses.

use thiserror::Error;

use crate::expr::{Context, Exponent, Func, Node, ScalarExpr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::UnknownFunction { offset, .. } => *offset,
        }
    }
}

/// Parses `text` over the variables of `ctx`.
///
/// The name `pi` denotes the constant unless the context defines a variable
/// with that name.
pub fn parse_expr(text: &str, ctx: &Context) -> Result<ScalarExpr, ParseError> {
    let mut parser = Parser { src: text, bytes: text.as_bytes(), pos: 0, ctx };
    let expr = parser.sum()?;
    parser.skip_ws();
    if parser.pos < parser.bytes.len() {
        return Err(parser.syntax("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    ctx: &'a Context,
}

impl Parser<'_> {
    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let node = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    Node::Add(lhs, self.product()?)
                }
                Some(b'-') => {
                    self.pos += 1;
                    Node::Sub(lhs, self.product()?)
                }
                _ => return Ok(lhs),
            };
            lhs = ScalarExpr::from_node(node);
        }
    }

    fn product(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let node = match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    Node::Mul(lhs, self.unary()?)
                }
                Some(b'/') => {
                    self.pos += 1;
                    Node::Div(lhs, self.unary()?)
                }
                _ => return Ok(lhs),
            };
            lhs = ScalarExpr::from_node(node);
        }
    }

    fn unary(&mut self) -> Result<ScalarExpr, ParseError> {
        if self.eat(b'-') {
            let inner = self.unary()?;
            return Ok(ScalarExpr::from_node(Node::Neg(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ScalarExpr, ParseError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let start = self.pos;
        let exponent = self.unary()?;
        let value = fold_constant(&exponent).ok_or(ParseError::Syntax {
            offset: start,
            message: "exponent must be a constant".to_string(),
        })?;
        if !value.is_finite() {
            return Err(ParseError::Syntax {
                offset: start,
                message: "exponent is not finite".to_string(),
            });
        }
        Ok(ScalarExpr::from_node(Node::Pow(base, Exponent::from_f64(value))))
    }

    fn atom(&mut self) -> Result<ScalarExpr, ParseError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.name(),
            Some(_) => Err(self.syntax("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<ScalarExpr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.bytes.len() && p.bytes[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            self.pos = start;
            return Err(self.syntax("malformed number"));
        }
        if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
                return Err(self.syntax("malformed exponent in number"));
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>()
            .map(ScalarExpr::constant)
            .map_err(|_| ParseError::Syntax { offset: start, message: "malformed number".into() })
    }

    fn name(&mut self) -> Result<ScalarExpr, ParseError> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        if self.peek() == Some(b'(') {
            let func = Func::from_name(name).ok_or_else(|| ParseError::UnknownFunction {
                name: name.to_string(),
                offset: start,
            })?;
            self.pos += 1;
            let arg = self.sum()?;
            if !self.eat(b')') {
                return Err(self.syntax("expected `)` after function argument"));
            }
            return Ok(ScalarExpr::from_node(Node::Call(func, arg)));
        }
        if let Some(index) = self.ctx.index_of(name) {
            return Ok(ScalarExpr::var(index));
        }
        if name == "pi" {
            return Ok(ScalarExpr::constant(std::f64::consts::PI));
        }
        Err(ParseError::UnknownIdentifier { name: name.to_string(), offset: start })
    }
}

fn fold_constant(expr: &ScalarExpr) -> Option<f64> {
    if expr.max_var().is_some() {
        return None;
    }
    expr.eval(&[]).ok()
}
