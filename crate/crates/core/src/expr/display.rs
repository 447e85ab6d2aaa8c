use std::fmt::{self, Write};

use super::{Expr, Kind, Rational};

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn negated(e: &Expr) -> Option<Expr> {
    match e.kind() {
        Kind::Const(c) if c.is_negative() => Some(Expr::constant(-*c)),
        Kind::Mul(fs) => match fs[0].as_const() {
            Some(c) if c.is_negative() => Some(e.scale(Rational::MINUS_ONE)),
            _ => None,
        },
        _ => None,
    }
}

fn precedence(e: &Expr) -> u8 {
    match e.kind() {
        Kind::Const(c) if c.is_negative() => PREC_NEG,
        Kind::Const(c) if !c.is_integer() => PREC_MUL,
        Kind::Const(_) | Kind::Symbol(_) | Kind::Func(..) => PREC_ATOM,
        Kind::Pow(_, r) if *r == Rational::HALF => PREC_ATOM,
        Kind::Pow(..) => PREC_POW,
        Kind::Mul(fs) if fs[0].as_const().is_some_and(|c| c.is_negative()) => PREC_NEG,
        Kind::Mul(_) => PREC_MUL,
        Kind::Add(_) => PREC_ADD,
    }
}

fn write_at(out: &mut String, e: &Expr, min: u8) {
    if precedence(e) < min {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e.kind() {
        Kind::Const(c) => {
            let _ = write!(out, "{c}");
        }
        Kind::Symbol(s) => out.push_str(&s.name()),
        Kind::Func(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_expr(out, a);
            out.push(')');
        }
        Kind::Pow(b, r) if *r == Rational::HALF => {
            out.push_str("sqrt(");
            write_expr(out, b);
            out.push(')');
        }
        Kind::Pow(b, r) => {
            write_at(out, b, PREC_ATOM);
            if r.is_integer() && !r.is_negative() {
                let _ = write!(out, "^{r}");
            } else {
                let _ = write!(out, "^({r})");
            }
        }
        Kind::Mul(fs) => {
            let mut rest: &[Expr] = fs;
            if let Some(c) = fs[0].as_const() {
                if c == Rational::MINUS_ONE {
                    out.push('-');
                    rest = &fs[1..];
                } else if c.is_negative() {
                    out.push('-');
                    let _ = write!(out, "{}*", -c);
                    rest = &fs[1..];
                }
            }
            for (i, f) in rest.iter().enumerate() {
                if i > 0 {
                    out.push('*');
                }
                // A leading positive fraction is fine unparenthesized; any
                // later one would be read as a division.
                let min = if i == 0 { PREC_MUL } else { PREC_POW };
                write_at(out, f, min);
            }
        }
        Kind::Add(ts) => {
            for (i, t) in ts.iter().enumerate() {
                match (i, negated(t)) {
                    (0, _) => write_at(out, t, PREC_ADD),
                    (_, Some(pos)) => {
                        out.push_str(" - ");
                        write_at(out, &pos, PREC_MUL);
                    }
                    (_, None) => {
                        out.push_str(" + ");
                        write_at(out, t, PREC_MUL);
                    }
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self);
        f.write_str(&s)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
