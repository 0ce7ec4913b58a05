//! Text input layer: a small expression language for structure equations and
//! standalone forms, plus the shorthand tuple notation for real nilpotent
//! structure equations.
//!
//! Grammar (whitespace-insensitive, `#` comments to end of line):
//!
//! ```text
//! file  := stmt*
//! stmt  := 'basis' ident ident ident ';'
//!        | 'param' ident '=' expr ';'
//!        | 'd' ident '=' expr ';'
//! expr  := ['-'] term (('+'|'-') term)*
//! term  := factor (('*'|'^') factor)*
//! factor:= number ['/' number] | number '.' digits | 'i' | ['~'] ident
//! ```
//!
//! `^` doubles as wedge between coframe generators and integer power after a
//! scalar; `~` marks conjugation. Coefficients are rational literals,
//! optionally times `i`; decimal literals are only legal when binding in
//! approximate mode.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::Error;
use crate::form::{Basis, Form};
use crate::scalar::{ExactComplex, Scalar};
use crate::structure::StructureSpec;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Decimal(f64),
    Tilde,
    Caret,
    Star,
    Slash,
    Plus,
    Minus,
    Equals,
    Semi,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, Error> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |ch: char, line: &mut usize, col: &mut usize| {
            if ch == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match c {
            '#' => {
                while let Some(&ch) = chars.peek() {
                    chars.next();
                    bump(ch, &mut line, &mut col);
                    if ch == '\n' {
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                bump(c, &mut line, &mut col);
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                let mut decimal = false;
                while let Some(&ch) = chars.peek() {
                    if ch.is_ascii_digit() {
                        digits.push(ch);
                        chars.next();
                        bump(ch, &mut line, &mut col);
                    } else if ch == '.' && !decimal {
                        decimal = true;
                        digits.push(ch);
                        chars.next();
                        bump(ch, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                let tok = if decimal {
                    Tok::Decimal(digits.parse().map_err(|_| Error::Syntax {
                        line: tline,
                        col: tcol,
                        msg: format!("bad decimal literal `{digits}`"),
                    })?)
                } else {
                    Tok::Int(digits.parse().expect("digits"))
                };
                out.push(Spanned { tok, line: tline, col: tcol });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_ascii_alphanumeric() || ch == '_' {
                        name.push(ch);
                        chars.next();
                        bump(ch, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Ident(name), line: tline, col: tcol });
            }
            _ => {
                chars.next();
                bump(c, &mut line, &mut col);
                let tok = match c {
                    '~' => Tok::Tilde,
                    '^' => Tok::Caret,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '=' => Tok::Equals,
                    ';' => Tok::Semi,
                    other => {
                        return Err(Error::Syntax {
                            line: tline,
                            col: tcol,
                            msg: format!("unexpected character `{other}`"),
                        })
                    }
                };
                out.push(Spanned { tok, line: tline, col: tcol });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Value {
    Scalar(Scalar),
    Form(Form),
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    basis_names: Vec<String>,
    basis: Basis,
    params: BTreeMap<String, Scalar>,
    allow_decimal: bool,
    saw_decimal: Option<(usize, usize)>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: &str) -> Error {
        let (line, col) = self
            .peek()
            .map(|s| (s.line, s.col))
            .or_else(|| self.toks.last().map(|s| (s.line, s.col)))
            .unwrap_or((1, 1));
        Error::Syntax { line, col, msg: msg.to_string() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), Error> {
        match self.next() {
            Some(s) if s.tok == tok => Ok(()),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err_here(&format!("expected {what}")))
            }
        }
    }

    fn generator_index(&self, name: &str) -> Option<usize> {
        self.basis_names.iter().position(|b| b == name)
    }

    /// Atomic factor with postfix integer powers (binding tighter than `*`),
    /// so `3*m^2` is `3*(m^2)`.
    fn parse_factor(&mut self) -> Result<Value, Error> {
        let mut value = self.parse_atom()?;
        while matches!(self.peek().map(|s| &s.tok), Some(Tok::Caret)) {
            let is_power = matches!(self.toks.get(self.pos + 1).map(|s| &s.tok), Some(Tok::Int(_)))
                && matches!(value, Value::Scalar(_));
            if !is_power {
                break;
            }
            self.next(); // caret
            let Some(Spanned { tok: Tok::Int(n), .. }) = self.next() else { unreachable!() };
            let exp: i64 = n
                .to_string()
                .parse()
                .map_err(|_| self.err_here("exponent too large"))?;
            if let Value::Scalar(base) = value {
                value = Value::Scalar(base.powi(exp)?);
            }
        }
        Ok(value)
    }

    fn parse_atom(&mut self) -> Result<Value, Error> {
        let spanned = self.next().ok_or_else(|| self.err_here("unexpected end of input"))?;
        match spanned.tok {
            Tok::Int(n) => {
                // optional /denominator
                if matches!(self.peek().map(|s| &s.tok), Some(Tok::Slash)) {
                    self.next();
                    match self.next() {
                        Some(Spanned { tok: Tok::Int(d), line, col }) => {
                            if d.is_zero() {
                                return Err(Error::Syntax {
                                    line,
                                    col,
                                    msg: "zero denominator".into(),
                                });
                            }
                            Ok(Value::Scalar(Scalar::from_rational(BigRational::new(n, d))))
                        }
                        _ => Err(self.err_here("expected denominator")),
                    }
                } else {
                    Ok(Value::Scalar(Scalar::from_rational(BigRational::from_integer(n))))
                }
            }
            Tok::Decimal(v) => {
                if !self.allow_decimal {
                    return Err(Error::NonRationalLiteral { line: spanned.line, col: spanned.col });
                }
                self.saw_decimal.get_or_insert((spanned.line, spanned.col));
                Ok(Value::Scalar(Scalar::approx(v, 0.0)))
            }
            Tok::Tilde => match self.next() {
                Some(Spanned { tok: Tok::Ident(name), .. }) => {
                    let idx = self.generator_index(&name).ok_or_else(|| {
                        self.err_here(&format!("`~` applies to coframe generators, got `{name}`"))
                    })?;
                    Ok(Value::Form(Form::generator(idx + 3, self.basis)))
                }
                _ => Err(self.err_here("expected generator name after `~`")),
            },
            Tok::Ident(name) => {
                if name == "i" {
                    return Ok(Value::Scalar(Scalar::i()));
                }
                if let Some(idx) = self.generator_index(&name) {
                    return Ok(Value::Form(Form::generator(idx, self.basis)));
                }
                match self.params.get(&name) {
                    Some(v) => Ok(Value::Scalar(v.clone())),
                    None => Err(Error::UnboundParameter(name)),
                }
            }
            Tok::Minus => {
                let v = self.parse_factor()?;
                Ok(match v {
                    Value::Scalar(s) => Value::Scalar(-s),
                    Value::Form(f) => Value::Form(f.neg()),
                })
            }
            _ => Err({
                self.pos -= 1;
                self.err_here("expected a coefficient or generator")
            }),
        }
    }

    fn combine(&self, a: Value, b: Value) -> Result<Value, Error> {
        Ok(match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(&x * &y),
            (Value::Scalar(x), Value::Form(f)) | (Value::Form(f), Value::Scalar(x)) => {
                Value::Form(f.scale(&x))
            }
            (Value::Form(f), Value::Form(g)) => Value::Form(f.wedge(&g)?),
        })
    }

    fn parse_term(&mut self) -> Result<Value, Error> {
        let mut acc = self.parse_factor()?;
        loop {
            match self.peek().map(|s| s.tok.clone()) {
                Some(Tok::Star) => {
                    self.next();
                    let rhs = self.parse_factor()?;
                    acc = self.combine(acc, rhs)?;
                }
                Some(Tok::Caret) => {
                    self.next();
                    let rhs = self.parse_factor()?;
                    match (&acc, &rhs) {
                        (Value::Form(_), Value::Scalar(_)) => {
                            return Err(self.err_here("cannot raise a form to a power"))
                        }
                        _ => acc = self.combine(acc, rhs)?,
                    }
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_expr(&mut self) -> Result<Value, Error> {
        let mut negate = false;
        if matches!(self.peek().map(|s| &s.tok), Some(Tok::Minus)) {
            self.next();
            negate = true;
        }
        let mut acc = self.parse_term()?;
        if negate {
            acc = match acc {
                Value::Scalar(s) => Value::Scalar(-s),
                Value::Form(f) => Value::Form(f.neg()),
            };
        }
        loop {
            let op = match self.peek().map(|s| s.tok.clone()) {
                Some(Tok::Plus) => 1,
                Some(Tok::Minus) => -1,
                _ => break,
            };
            self.next();
            let rhs = self.parse_term()?;
            acc = add_values(acc, rhs, op)?;
        }
        Ok(acc)
    }
}

fn add_values(a: Value, b: Value, sign: i32) -> Result<Value, Error> {
    match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => {
            Ok(Value::Scalar(if sign > 0 { &x + &y } else { &x - &y }))
        }
        (Value::Form(f), Value::Form(g)) => {
            // adding zero of mismatched degree is tolerated
            if f.is_zero() && f.degree() != g.degree() {
                return Ok(Value::Form(if sign > 0 { g } else { g.neg() }));
            }
            if g.is_zero() && f.degree() != g.degree() {
                return Ok(Value::Form(f));
            }
            Ok(Value::Form(if sign > 0 { f.add(&g)? } else { f.sub(&g)? }))
        }
        (Value::Scalar(x), Value::Form(g)) if x.is_zero() => {
            Ok(Value::Form(if sign > 0 { g } else { g.neg() }))
        }
        (Value::Form(f), Value::Scalar(y)) if y.is_zero() => Ok(Value::Form(f)),
        _ => Err(Error::Syntax {
            line: 0,
            col: 0,
            msg: "cannot add a scalar and a form".into(),
        }),
    }
}

/// Parsed structure-equation file, prior to parameter binding.
#[derive(Clone, Debug)]
pub struct StructureText {
    source: String,
}

/// Parses a structure-equation file. Parameters are resolved at [`bind`]
/// time; `param` statements in the file provide defaults.
///
/// [`bind`]: StructureText::bind
pub fn parse_structure(text: &str) -> Result<StructureText, Error> {
    // validate lexing eagerly so syntax errors surface before binding
    lex(text)?;
    Ok(StructureText { source: text.to_string() })
}

impl StructureText {
    /// Binds parameters and evaluates the structure equations exactly.
    /// Decimal literals are rejected (`NonRationalLiteral`).
    pub fn bind(&self, params: &[(&str, Scalar)]) -> Result<StructureSpec, Error> {
        self.bind_with_mode(params, false)
    }

    /// Binds parameters allowing decimal (approximate) literals.
    pub fn bind_approx(&self, params: &[(&str, Scalar)]) -> Result<StructureSpec, Error> {
        self.bind_with_mode(params, true)
    }

    fn bind_with_mode(
        &self,
        params: &[(&str, Scalar)],
        allow_decimal: bool,
    ) -> Result<StructureSpec, Error> {
        let toks = lex(&self.source)?;
        let mut parser = Parser {
            toks: &toks,
            pos: 0,
            basis_names: vec!["w1".into(), "w2".into(), "w3".into()],
            basis: Basis::Complex,
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            allow_decimal,
            saw_decimal: None,
        };
        let mut d_omega = [
            Form::zero(2, Basis::Complex),
            Form::zero(2, Basis::Complex),
            Form::zero(2, Basis::Complex),
        ];
        while let Some(s) = parser.peek() {
            match &s.tok {
                Tok::Ident(kw) if kw == "basis" => {
                    parser.next();
                    let mut names = Vec::new();
                    for _ in 0..3 {
                        match parser.next() {
                            Some(Spanned { tok: Tok::Ident(n), .. }) => names.push(n),
                            _ => return Err(parser.err_here("expected basis generator name")),
                        }
                    }
                    parser.expect(Tok::Semi, "`;`")?;
                    parser.basis_names = names;
                }
                Tok::Ident(kw) if kw == "param" => {
                    parser.next();
                    let name = match parser.next() {
                        Some(Spanned { tok: Tok::Ident(n), .. }) => n,
                        _ => return Err(parser.err_here("expected parameter name")),
                    };
                    parser.expect(Tok::Equals, "`=`")?;
                    let value = parser.parse_expr()?;
                    parser.expect(Tok::Semi, "`;`")?;
                    // explicit bindings take precedence over file defaults
                    match value {
                        Value::Scalar(v) => {
                            parser.params.entry(name).or_insert(v);
                        }
                        Value::Form(_) => {
                            return Err(parser.err_here("parameter value must be a scalar"))
                        }
                    }
                }
                Tok::Ident(kw) if kw == "d" => {
                    parser.next();
                    let name = match parser.next() {
                        Some(Spanned { tok: Tok::Ident(n), .. }) => n,
                        _ => return Err(parser.err_here("expected generator after `d`")),
                    };
                    let idx = parser
                        .generator_index(&name)
                        .ok_or_else(|| parser.err_here(&format!("unknown generator `{name}`")))?;
                    parser.expect(Tok::Equals, "`=`")?;
                    let value = parser.parse_expr()?;
                    parser.expect(Tok::Semi, "`;`")?;
                    d_omega[idx] = match value {
                        Value::Form(f) if f.degree() == 2 => f,
                        Value::Form(f) if f.is_zero() => Form::zero(2, Basis::Complex),
                        Value::Scalar(sv) if sv.is_zero() => Form::zero(2, Basis::Complex),
                        _ => return Err(parser.err_here("differential must be a 2-form or 0")),
                    };
                }
                _ => return Err(parser.err_here("expected `basis`, `param` or `d` statement")),
            }
        }
        Ok(StructureSpec::new(d_omega))
    }
}

/// Parses a standalone form expression over the complex coframe
/// `w1,w2,w3` (with `~` conjugates), e.g. `"1/2*w1^~w1 - i*w2^w3"`.
pub fn parse_form(text: &str, params: &[(&str, Scalar)]) -> Result<Form, Error> {
    parse_form_in(text, Basis::Complex, params)
}

/// Parses a standalone form expression over the real coframe `e1..e6`.
pub fn parse_real_form(text: &str, params: &[(&str, Scalar)]) -> Result<Form, Error> {
    parse_form_in(text, Basis::Real, params)
}

fn parse_form_in(text: &str, basis: Basis, params: &[(&str, Scalar)]) -> Result<Form, Error> {
    let toks = lex(text)?;
    let basis_names = match basis {
        Basis::Complex => vec!["w1".to_string(), "w2".to_string(), "w3".to_string()],
        Basis::Real => (1..=6).map(|k| format!("e{k}")).collect(),
    };
    let mut parser = Parser {
        toks: &toks,
        pos: 0,
        basis_names,
        basis,
        params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        allow_decimal: true,
        saw_decimal: None,
    };
    let value = parser.parse_expr()?;
    if parser.peek().is_some() {
        return Err(parser.err_here("trailing input after expression"));
    }
    match value {
        Value::Form(f) => Ok(f),
        Value::Scalar(s) if s.is_zero() => Ok(Form::zero(0, basis)),
        Value::Scalar(s) => Ok(Form::constant(s, basis)),
    }
}

/// Real generators for the `~wK` names in [`parse_real_form`] do not exist;
/// the real coframe has six independent generators `e1..e6`.
///
/// Normalizes the compact tuple notation for real nilpotent structure
/// equations, e.g. `"(0,0,0,0,13+42,14+23)"`, into the six differentials
/// `d e^k` as real 2-forms. Digit pairs `ab` denote `e^a ^ e^b`.
pub fn parse_salamon(text: &str) -> Result<[Form; 6], Error> {
    let t = text.trim().trim_start_matches('(').trim_end_matches(')');
    let entries: Vec<&str> = t.split(',').collect();
    if entries.len() != 6 {
        return Err(Error::Syntax {
            line: 1,
            col: 1,
            msg: format!("expected 6 entries, got {}", entries.len()),
        });
    }
    let mut out: Vec<Form> = Vec::with_capacity(6);
    for entry in entries {
        let mut form = Form::zero(2, Basis::Real);
        let e = entry.trim();
        if e == "0" {
            out.push(form);
            continue;
        }
        let mut sign = 1i64;
        let mut token = String::new();
        let flush = |token: &mut String, sign: i64, form: &mut Form| -> Result<(), Error> {
            if token.is_empty() {
                return Ok(());
            }
            if token.len() != 2 || !token.chars().all(|c| ('1'..='6').contains(&c)) {
                return Err(Error::Syntax {
                    line: 1,
                    col: 1,
                    msg: format!("bad tuple monomial `{token}`"),
                });
            }
            let a = token.as_bytes()[0] - b'1';
            let b = token.as_bytes()[1] - b'1';
            let mono =
                Form::monomial(Scalar::from_int(sign), &[a as usize, b as usize], Basis::Real);
            *form = form.add(&mono).expect("real basis");
            token.clear();
            Ok(())
        };
        for c in e.chars() {
            match c {
                '+' => {
                    flush(&mut token, sign, &mut form)?;
                    sign = 1;
                }
                '-' => {
                    flush(&mut token, sign, &mut form)?;
                    sign = -1;
                }
                c if c.is_ascii_digit() => token.push(c),
                c if c.is_whitespace() => {}
                other => {
                    return Err(Error::Syntax {
                        line: 1,
                        col: 1,
                        msg: format!("unexpected `{other}` in tuple"),
                    })
                }
            }
        }
        flush(&mut token, sign, &mut form)?;
        out.push(form);
    }
    Ok(out.try_into().expect("length 6"))
}

/// Convenience: scalar literal from the report syntax (`"3/10+2/5 i"`).
pub fn parse_scalar(text: &str) -> Result<Scalar, Error> {
    text.parse()
}

/// Exact rational helper used by family constructors.
pub fn rational(p: i64, q: i64) -> ExactComplex {
    ExactComplex::new(
        BigRational::new(BigInt::from(p), BigInt::from(q)),
        BigRational::zero(),
    )
}
