use thiserror::Error;

use super::{Expr, Func, Rational, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push((Tok::Num(chars[start..i].iter().collect()), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), col));
            i += 1;
        } else {
            return Err(ParseError { column: col, message: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    resolve: &'a dyn Fn(&str) -> Option<Symbol>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { column: self.column(), message: message.into() })
    }

    fn eat(&mut self, op: char) -> bool {
        if *self.peek() == Tok::Op(op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        if self.eat(op) {
            Ok(())
        } else {
            self.err(format!("expected `{op}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(-self.term()?);
            } else {
                return Ok(Expr::add(terms));
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let col = self.column();
                let rhs = self.unary()?;
                if rhs.is_zero() {
                    return Err(ParseError { column: col, message: "division by zero".into() });
                }
                acc = acc / rhs;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let col = self.column();
        let r = self.exponent()?;
        if r.denom() > 2 {
            return Err(ParseError { column: col, message: "exponent must be an integer or half-integer".into() });
        }
        if base.is_zero() && r.is_negative() {
            return Err(ParseError { column: col, message: "division by zero".into() });
        }
        Ok(Expr::pow(base, r))
    }

    fn signed_rational(&mut self) -> Result<Rational, ParseError> {
        let negative = self.eat('-');
        let col = self.column();
        let Tok::Num(n) = self.peek().clone() else {
            return self.err("expected a rational exponent");
        };
        self.pos += 1;
        let mut text = n;
        if self.eat('/') {
            let Tok::Num(d) = self.peek().clone() else {
                return self.err("expected a denominator");
            };
            self.pos += 1;
            text = format!("{text}/{d}");
        }
        let r = Rational::parse(&text)
            .ok_or_else(|| ParseError { column: col, message: format!("invalid number `{text}`") })?;
        Ok(if negative { -r } else { r })
    }

    fn exponent(&mut self) -> Result<Rational, ParseError> {
        let r = if self.eat('(') {
            let r = self.signed_rational()?;
            self.expect(')')?;
            r
        } else {
            self.signed_rational()?
        };
        if !self.eat('^') {
            return Ok(r);
        }
        let col = self.column();
        let k = self.exponent()?;
        if !k.is_integer() {
            return Err(ParseError { column: col, message: "iterated exponent must be an integer".into() });
        }
        r.checked_powi(k.numer() as i64)
            .ok_or_else(|| ParseError { column: col, message: "exponent overflow".into() })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let col = self.column();
        match self.peek().clone() {
            Tok::Num(text) => {
                self.pos += 1;
                Rational::parse(&text)
                    .map(Expr::constant)
                    .ok_or_else(|| ParseError { column: col, message: format!("invalid number `{text}`") })
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if *self.peek() == Tok::Op('(') {
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return match name.as_str() {
                        "sqrt" => Ok(arg.sqrt()),
                        "sin" => Ok(Expr::apply(Func::Sin, arg)),
                        "cos" => Ok(Expr::apply(Func::Cos, arg)),
                        "exp" => Ok(Expr::apply(Func::Exp, arg)),
                        "ln" => Ok(Expr::apply(Func::Ln, arg)),
                        _ => Err(ParseError { column: col, message: format!("unknown function `{name}`") }),
                    };
                }
                (self.resolve)(&name)
                    .map(Expr::symbol)
                    .ok_or_else(|| ParseError { column: col, message: format!("unknown identifier `{name}`") })
            }
            Tok::Op('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::End => self.err("unexpected end of expression"),
            Tok::Op(c) => self.err(format!("unexpected `{c}`")),
        }
    }
}

/// Parses an infix expression, resolving identifiers through `resolve`.
pub fn parse_expr(src: &str, resolve: &dyn Fn(&str) -> Option<Symbol>) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, resolve };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}
