//! Parser for the fixture expression language.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := atom (('^' | '**') unary)?
//! atom    := number | name | name '(' expr ')' | '(' expr ')'
//! number  := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//! name    := letter (letter | digit | '_')*
//! ```
//!
//! `^` is right associative and binds tighter than unary minus on its left,
//! so `-x^2` is `-(x^2)` and `2^-1` is `0.5`. Names resolve, in order, to the
//! declared variables, to named parameters, to the constants `pi` and `e`.
//! Functions: `exp`, `ln` (alias `log`), `sin`, `cos`, `sqrt`.

use std::collections::BTreeMap;
use std::fmt;

use subriemann_core::{Expr, Func};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub source: String,
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at offset {} in `{}`", self.message, self.offset, self.source)
    }
}

impl std::error::Error for ParseError {}

/// Names an expression may refer to.
#[derive(Debug, Clone, Default)]
pub struct Scope<'a> {
    pub vars: &'a [&'a str],
    pub params: Option<&'a BTreeMap<String, f64>>,
}

impl<'a> Scope<'a> {
    pub fn new(vars: &'a [&'a str]) -> Self {
        Scope { vars, params: None }
    }

    pub fn with_params(mut self, params: &'a BTreeMap<String, f64>) -> Self {
        self.params = Some(params);
        self
    }
}

pub fn parse(src: &str, scope: &Scope) -> Result<Expr, ParseError> {
    let mut p = Parser { src, pos: 0, scope };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses an expression without variables and evaluates it.
pub fn parse_constant(src: &str, params: Option<&BTreeMap<String, f64>>) -> Result<f64, ParseError> {
    let scope = Scope { vars: &[], params };
    let e = parse(src, &scope)?;
    Ok(e.eval::<f64>(&[]))
}

struct Parser<'s, 'c> {
    src: &'s str,
    pos: usize,
    scope: &'c Scope<'c>,
}

impl Parser<'_, '_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError { source: self.src.to_string(), offset: self.pos, message: message.to_string() }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat("+") {
                lhs = lhs + self.term()?;
            } else if self.eat("-") {
                lhs = lhs - self.term()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            self.skip_ws();
            if self.src[self.pos..].starts_with("**") {
                return Ok(lhs);
            }
            if self.eat("*") {
                lhs = lhs * self.unary()?;
            } else if self.eat("/") {
                lhs = lhs / self.unary()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat("-") {
            return Ok(-self.unary()?);
        }
        if self.eat("+") {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat("^") || self.eat("**") {
            return Ok(Expr::pow(base, self.unary()?));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(")") {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() => self.name(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let digits = |p: &mut usize| {
            while *p < bytes.len() && bytes[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        let mut p = self.pos;
        digits(&mut p);
        if p < bytes.len() && bytes[p] == b'.' {
            p += 1;
            digits(&mut p);
        }
        if p < bytes.len() && (bytes[p] == b'e' || bytes[p] == b'E') {
            let mut q = p + 1;
            if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                q += 1;
            }
            if q < bytes.len() && bytes[q].is_ascii_digit() {
                digits(&mut q);
                p = q;
            }
        }
        self.pos = p;
        self.src[start..p].parse::<f64>().map(Expr::c).map_err(|_| {
            let mut e = self.error("malformed number");
            e.offset = start;
            e
        })
    }

    fn name(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        let name = &self.src[start..self.pos];
        let func = match name {
            "exp" => Some(Func::Exp),
            "ln" | "log" => Some(Func::Ln),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        };
        if let Some(f) = func {
            if !self.eat("(") {
                return Err(self.error("expected `(` after function name"));
            }
            let arg = self.expr()?;
            if !self.eat(")") {
                return Err(self.error("expected `)`"));
            }
            return Ok(Expr::call(f, arg));
        }
        if let Some(i) = self.scope.vars.iter().position(|v| *v == name) {
            return Ok(Expr::var(i));
        }
        if let Some(v) = self.scope.params.and_then(|p| p.get(name)) {
            return Ok(Expr::c(*v));
        }
        match name {
            "pi" => Ok(Expr::c(std::f64::consts::PI)),
            "e" => Ok(Expr::c(std::f64::consts::E)),
            _ => {
                let mut e = self.error(&format!("unknown name `{name}`"));
                e.offset = start;
                Err(e)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, x: [f64; 3]) -> f64 {
        parse(src, &Scope::new(&["x", "y", "z"])).unwrap().eval(&x)
    }

    #[test]
    fn precedence() {
        assert_eq!(eval("1 + 2 * 3", [0.0; 3]), 7.0);
        assert_eq!(eval("(1 + 2) * 3", [0.0; 3]), 9.0);
        assert_eq!(eval("-x^2", [3.0, 0.0, 0.0]), -9.0);
        assert!((eval("2^3^2", [0.0; 3]) - 512.0).abs() < 1e-12);
        assert!((eval("2**-1", [0.0; 3]) - 0.5).abs() < 1e-15);
        assert_eq!(eval("8 / 4 / 2", [0.0; 3]), 1.0);
        assert_eq!(eval("1 - 2 - 3", [0.0; 3]), -4.0);
    }

    #[test]
    fn names_and_functions() {
        let v = eval("exp(0.3*z)*(x/2) + sin(pi/2) - log(e)", [2.0, 0.0, 1.0]);
        assert!((v - (0.3f64).exp()).abs() < 1e-15);
        assert_eq!(eval("sqrt(4) + cos(0)", [0.0; 3]), 3.0);
        assert_eq!(eval("1.5e-1 + 2E1", [0.0; 3]), 20.15);
    }

    #[test]
    fn parameters_shadow_constants_but_not_variables() {
        let mut p = BTreeMap::new();
        p.insert("lambda".to_string(), 0.3);
        p.insert("x".to_string(), 100.0);
        let e = parse("lambda * x", &Scope::new(&["x"]).with_params(&p)).unwrap();
        assert_eq!(e.eval(&[2.0]), 0.6);
        assert_eq!(parse_constant("2*pi", None).unwrap(), 2.0 * std::f64::consts::PI);
    }

    #[test]
    fn errors_carry_positions() {
        let s = Scope::new(&["x"]);
        assert_eq!(parse("x + q", &s).unwrap_err().offset, 4);
        assert!(parse("sin x", &s).is_err());
        assert!(parse("(x", &s).is_err());
        assert!(parse("x)", &s).is_err());
        assert!(parse("", &s).is_err());
        assert!(parse("1..2", &s).is_err());
    }
}
