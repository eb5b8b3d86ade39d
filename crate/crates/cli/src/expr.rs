//! Expression syntax shared by the command line and definition files:
//! sums of rational multiples of monomials in `d`, `l`, `mu`, `nu`, `l1`,
//! …, `Delta`, `alpha`, times at most one generator (or module basis) name.
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary ("*" unary)*
//! unary := "-" unary | power
//! power := atom ("^" int)?
//! atom  := int ("/" int)? | ident | "(" expr ")"
//! ```

use std::collections::BTreeMap;
use std::fmt;

use lambda_forge::arith::rat::{fmt_rat, parse_rat};
use lambda_forge::arith::{MPoly, Rat, Var};
use lambda_forge::elt::FreeElt;
use num_traits::One;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprAst {
    Num(Rat),
    Ident(String),
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Pow(Box<ExprAst>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, CliError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push((st, Tok::Int(chars[st..i].iter().collect())));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((st, Tok::Ident(chars[st..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(CliError::Parse(format!("unexpected character `{c}` at column {}", i + 1)));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(0, |(c, _)| *c) + 1
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ExprAst, CliError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = ExprAst::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat('-') {
                acc = ExprAst::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst, CliError> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            acc = ExprAst::Mul(Box::new(acc), Box::new(self.unary()?));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<ExprAst, CliError> {
        if self.eat('-') {
            return Ok(ExprAst::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let col = self.col();
            match self.peek().cloned() {
                Some(Tok::Int(s)) => {
                    self.pos += 1;
                    let e = s
                        .parse()
                        .map_err(|_| CliError::Parse(format!("exponent `{s}` is too large")))?;
                    Ok(ExprAst::Pow(Box::new(base), e))
                }
                _ => Err(CliError::Parse(format!("expected an exponent at column {col}"))),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<ExprAst, CliError> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let mut text = n;
                if self.eat('/') {
                    match self.peek().cloned() {
                        Some(Tok::Int(d)) => {
                            self.pos += 1;
                            text = format!("{text}/{d}");
                        }
                        _ => return Err(CliError::Parse(format!("expected a denominator after column {col}"))),
                    }
                }
                let r = parse_rat(&text).ok_or_else(|| CliError::Parse(format!("bad number `{text}`")))?;
                Ok(ExprAst::Num(r))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(ExprAst::Ident(s))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(CliError::Parse(format!("expected `)` at column {}", self.col())));
                }
                Ok(e)
            }
            Some(t) => Err(CliError::Parse(format!("unexpected {t:?} at column {col}"))),
            None => Err(CliError::Parse("unexpected end of expression".into())),
        }
    }
}

pub fn parse(s: &str) -> Result<ExprAst, CliError> {
    let mut p = Parser { toks: lex(s)?, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(CliError::Parse(format!("trailing input at column {}", p.col())));
    }
    Ok(e)
}

fn prec(e: &ExprAst) -> u8 {
    match e {
        ExprAst::Add(..) | ExprAst::Sub(..) => 1,
        ExprAst::Mul(..) => 2,
        ExprAst::Neg(..) => 3,
        ExprAst::Pow(..) => 4,
        ExprAst::Num(_) | ExprAst::Ident(_) => 5,
    }
}

fn wrap(f: &mut fmt::Formatter<'_>, e: &ExprAst, need: bool) -> fmt::Result {
    if need {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Num(r) => f.write_str(&fmt_rat(r)),
            ExprAst::Ident(s) => f.write_str(s),
            ExprAst::Neg(a) => {
                f.write_str("-")?;
                wrap(f, a, prec(a) < 3)
            }
            ExprAst::Add(a, b) | ExprAst::Sub(a, b) => {
                wrap(f, a, prec(a) < 1)?;
                f.write_str(if matches!(self, ExprAst::Add(..)) { " + " } else { " - " })?;
                wrap(f, b, prec(b) <= 1)
            }
            ExprAst::Mul(a, b) => {
                wrap(f, a, prec(a) < 2)?;
                f.write_str("*")?;
                wrap(f, b, prec(b) <= 2)
            }
            ExprAst::Pow(a, e) => {
                wrap(f, a, prec(a) < 5)?;
                write!(f, "^{e}")
            }
        }
    }
}

/// Value of an expression: a polynomial, or a combination of named
/// symbols with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Poly(MPoly),
    Elt(FreeElt<String>),
}

fn var_of(name: &str) -> Option<Var> {
    match Var::from_name(name) {
        Some(Var::T(_)) | None => None,
        v => v,
    }
}

impl ExprAst {
    pub fn eval(&self) -> Result<Value, CliError> {
        Ok(match self {
            ExprAst::Num(r) => Value::Poly(MPoly::constant(r.clone())),
            ExprAst::Ident(s) => match var_of(s) {
                Some(v) => Value::Poly(MPoly::var(v)),
                None => Value::Elt(FreeElt::basis(s.clone())),
            },
            ExprAst::Neg(a) => match a.eval()? {
                Value::Poly(p) => Value::Poly(-p),
                Value::Elt(e) => Value::Elt(-e),
            },
            ExprAst::Add(a, b) | ExprAst::Sub(a, b) => {
                let sign = if matches!(self, ExprAst::Add(..)) { Rat::one() } else { -Rat::one() };
                match (a.eval()?, b.eval()?) {
                    (Value::Poly(x), Value::Poly(y)) => Value::Poly(&x + &y.scale(&sign)),
                    (Value::Elt(x), Value::Elt(y)) => Value::Elt(&x + &y.scale_rat(&sign)),
                    (Value::Elt(x), Value::Poly(p)) if p.is_zero() => Value::Elt(x),
                    (Value::Poly(p), Value::Elt(y)) if p.is_zero() => Value::Elt(y.scale_rat(&sign)),
                    _ => return Err(CliError::Parse(format!("`{self}` adds a polynomial to an element"))),
                }
            }
            ExprAst::Mul(a, b) => match (a.eval()?, b.eval()?) {
                (Value::Poly(x), Value::Poly(y)) => Value::Poly(&x * &y),
                (Value::Poly(p), Value::Elt(e)) | (Value::Elt(e), Value::Poly(p)) => Value::Elt(e.scale(&p)),
                _ => return Err(CliError::Parse(format!("`{self}` multiplies two elements"))),
            },
            ExprAst::Pow(a, k) => match a.eval()? {
                Value::Poly(p) => Value::Poly(p.pow(*k)),
                Value::Elt(_) => return Err(CliError::Parse(format!("`{self}` raises an element to a power"))),
            },
        })
    }
}

/// Parses a polynomial.
pub fn parse_poly(s: &str) -> Result<MPoly, CliError> {
    match parse(s)?.eval()? {
        Value::Poly(p) => Ok(p),
        Value::Elt(e) => Err(CliError::Parse(format!(
            "`{s}` mentions {}, which is not a variable",
            e.keys().next().cloned().unwrap_or_default()
        ))),
    }
}

/// Parses a combination of named symbols, each resolved by `resolve`.
pub fn parse_elt<K: Ord + Clone>(
    s: &str,
    resolve: impl Fn(&str) -> Option<K>,
) -> Result<FreeElt<K>, CliError> {
    let e = match parse(s)?.eval()? {
        Value::Elt(e) => e,
        Value::Poly(p) if p.is_zero() => FreeElt::zero(),
        Value::Poly(_) => return Err(CliError::Parse(format!("`{s}` has no generator"))),
    };
    let mut out = FreeElt::zero();
    for (name, p) in e.terms() {
        let k = resolve(name).ok_or_else(|| CliError::Input(format!("unknown generator `{name}`")))?;
        out.add_term(k, p.clone());
    }
    Ok(out)
}

/// Parses `int` or `int/int`, also accepting a leading sign.
pub fn parse_rational(s: &str) -> Result<Rat, CliError> {
    parse_rat(s.trim()).ok_or_else(|| CliError::Input(format!("`{s}` is not a rational number")))
}

/// Names that cannot be used for generators or basis vectors.
pub fn is_reserved(name: &str) -> bool {
    var_of(name).is_some()
}

/// Renders a map from names to polynomial coefficients with the same
/// conventions as the engine.
pub fn render_named(terms: &BTreeMap<String, MPoly>) -> String {
    let e = FreeElt::from_terms(terms.iter().map(|(k, v)| (k.clone(), v.clone())));
    e.render(|k| k.clone())
}
