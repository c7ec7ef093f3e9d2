//! The small expression language used for scenario fields.
//!
//! Spatial fields are sums of terms
//!
//! ```text
//! [coef [*]] cos(k1 x1 + k2 x2 + ...)     [coef [*]] sin(...)
//! const c        zero        c
//! [coef [*]] gaussian(center = [c1, ...], width = w)   (alone)
//! ```
//!
//! with rational coefficients such as `3/4`, `-2` or `0.5`. Time profiles are
//! sums of `[coef [*]] cos(w t)`, `sin(w t)`, `exp(w t)`, `t^p`, `t` and
//! constants. Numbers may also be written `pi`, `2pi`, `pi/2`, `-3*pi/4`.

use std::f64::consts::PI;

use biwave_core::{ScalarField, TimeProfile, TrigPoly};

#[derive(Debug, Clone, PartialEq)]
pub struct ExprError(pub String);

impl std::fmt::Display for ExprError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

type PResult<T> = Result<T, ExprError>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> PResult<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part, e.g. 1e-3
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| ExprError(format!("bad number '{text}'")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()[],=".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(ExprError(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn new(s: &str) -> PResult<Self> {
        Ok(Self {
            toks: tokenize(s)?,
            pos: 0,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn at_op(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Op(c))
    }

    fn eat_op(&mut self, c: char) -> bool {
        if self.at_op(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, c: char) -> PResult<()> {
        if self.eat_op(c) {
            Ok(())
        } else {
            Err(ExprError(format!("expected '{c}' {}", self.where_())))
        }
    }

    fn expect_ident(&mut self, name: &str) -> PResult<()> {
        match self.next() {
            Some(Tok::Ident(s)) if s == name => Ok(()),
            _ => Err(ExprError(format!("expected '{name}'"))),
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn where_(&self) -> String {
        match self.peek() {
            None => "at end of input".into(),
            Some(t) => format!("near {t:?}"),
        }
    }

    /// `[sign] factor [/ factor]` where a factor is a number, `pi`, or `N pi`.
    fn number(&mut self) -> PResult<f64> {
        let mut sign = 1.0;
        while self.at_op('-') || self.at_op('+') {
            if self.eat_op('-') {
                sign = -sign;
            } else {
                self.pos += 1;
            }
        }
        let mut v = self.factor()?;
        loop {
            if self.at_op('*') && matches!(self.toks.get(self.pos + 1), Some(Tok::Ident(s)) if s == "pi") {
                self.pos += 2;
                v *= PI;
            } else if self.at_op('/') {
                self.pos += 1;
                let d = self.factor()?;
                if d == 0.0 {
                    return Err(ExprError("division by zero".into()));
                }
                v /= d;
            } else {
                break;
            }
        }
        Ok(sign * v)
    }

    fn factor(&mut self) -> PResult<f64> {
        match self.next() {
            Some(Tok::Num(v)) => {
                if matches!(self.peek(), Some(Tok::Ident(s)) if s == "pi") {
                    self.pos += 1;
                    Ok(v * PI)
                } else {
                    Ok(v)
                }
            }
            Some(Tok::Ident(s)) if s == "pi" => Ok(PI),
            _ => {
                self.pos -= 1;
                Err(ExprError(format!("expected a number {}", self.where_())))
            }
        }
    }

    fn starts_number(&self) -> bool {
        match self.peek() {
            Some(Tok::Num(_)) => true,
            Some(Tok::Ident(s)) => s == "pi",
            _ => false,
        }
    }

    /// Optional leading coefficient of a term, followed by an optional `*`.
    fn coefficient(&mut self) -> PResult<Option<f64>> {
        if !self.starts_number() {
            return Ok(None);
        }
        let v = self.number()?;
        self.eat_op('*');
        Ok(Some(v))
    }
}

/// Parse a plain number such as `0.5`, `-3/4`, `pi/2` or `2pi`.
pub fn parse_number(s: &str) -> PResult<f64> {
    let mut p = Parser::new(s)?;
    let v = p.number()?;
    if !p.done() {
        return Err(ExprError(format!("trailing input {}", p.where_())));
    }
    if !v.is_finite() {
        return Err(ExprError(format!("non-finite number '{s}'")));
    }
    Ok(v)
}

fn axis_index(name: &str, n: usize) -> PResult<usize> {
    let idx = name
        .strip_prefix('x')
        .and_then(|d| d.parse::<usize>().ok())
        .ok_or_else(|| ExprError(format!("expected a coordinate x1..x{n}, got '{name}'")))?;
    if idx == 0 || idx > n {
        return Err(ExprError(format!("coordinate '{name}' outside x1..x{n}")));
    }
    Ok(idx - 1)
}

/// `k1 x1 + k2 x2 ...` with integer coefficients.
fn linear_form(p: &mut Parser, n: usize) -> PResult<Vec<i32>> {
    let mut k = vec![0i32; n];
    let mut first = true;
    loop {
        let mut sign = 1i32;
        if p.eat_op('-') {
            sign = -1;
        } else if !p.eat_op('+') && !first {
            break;
        }
        first = false;
        let mut coef = 1i32;
        if let Some(Tok::Num(v)) = p.peek().cloned() {
            p.pos += 1;
            if v.fract() != 0.0 || v.abs() > 1e6 {
                return Err(ExprError(format!("wavevector entries must be integers, got {v}")));
            }
            coef = v as i32;
            p.eat_op('*');
        }
        match p.next() {
            Some(Tok::Ident(name)) => {
                let i = axis_index(&name, n)?;
                k[i] += sign * coef;
            }
            _ => return Err(ExprError("expected a coordinate in the argument".into())),
        }
        if p.at_op(')') || p.done() {
            break;
        }
    }
    Ok(k)
}

fn gaussian_args(p: &mut Parser, n: usize) -> PResult<(Vec<f64>, f64)> {
    p.expect_op('(')?;
    let mut center = None;
    let mut width = None;
    loop {
        let key = match p.next() {
            Some(Tok::Ident(s)) => s,
            _ => return Err(ExprError("expected 'center' or 'width' in gaussian(...)".into())),
        };
        p.expect_op('=')?;
        match key.as_str() {
            "center" => {
                p.expect_op('[')?;
                let mut c = Vec::new();
                if !p.at_op(']') {
                    loop {
                        c.push(p.number()?);
                        if !p.eat_op(',') {
                            break;
                        }
                    }
                }
                p.expect_op(']')?;
                if c.len() != n {
                    return Err(ExprError(format!("gaussian center has {} entries, expected {n}", c.len())));
                }
                center = Some(c);
            }
            "width" => width = Some(p.number()?),
            other => return Err(ExprError(format!("unknown gaussian argument '{other}'"))),
        }
        if !p.eat_op(',') {
            break;
        }
    }
    p.expect_op(')')?;
    match (center, width) {
        (Some(c), Some(w)) => Ok((c, w)),
        _ => Err(ExprError("gaussian needs both center and width".into())),
    }
}

/// Parse a spatial field in `n` dimensions with base frequency `omega`.
pub fn parse_field(s: &str, n: usize, omega: f64) -> PResult<ScalarField> {
    let mut p = Parser::new(s)?;
    if p.done() {
        return Err(ExprError("empty field expression".into()));
    }
    let mut terms: Vec<(Vec<i32>, f64, f64)> = Vec::new();
    let mut gaussian = None;
    let mut count = 0;
    loop {
        let mut sign = 1.0;
        if p.eat_op('-') {
            sign = -1.0;
        } else if count > 0 && !p.eat_op('+') {
            return Err(ExprError(format!("expected '+' or '-' {}", p.where_())));
        }
        count += 1;
        let explicit = p.coefficient()?;
        let coef = sign * explicit.unwrap_or(1.0);
        match p.peek().cloned() {
            Some(Tok::Ident(name)) if name == "cos" || name == "sin" => {
                p.pos += 1;
                p.expect_op('(')?;
                let k = linear_form(&mut p, n)?;
                p.expect_op(')')?;
                if name == "cos" {
                    terms.push((k, coef, 0.0));
                } else {
                    terms.push((k, 0.0, coef));
                }
            }
            Some(Tok::Ident(name)) if name == "const" => {
                p.pos += 1;
                let c = p.number()?;
                terms.push((vec![0; n], coef * c, 0.0));
            }
            Some(Tok::Ident(name)) if name == "zero" => {
                p.pos += 1;
            }
            Some(Tok::Ident(name)) if name == "gaussian" => {
                p.pos += 1;
                let (c, w) = gaussian_args(&mut p, n)?;
                gaussian = Some((c, w, coef));
            }
            Some(Tok::Ident(name)) => {
                return Err(ExprError(format!("unknown function '{name}'")));
            }
            // a bare number is a constant term
            _ if explicit.is_some() => terms.push((vec![0; n], coef, 0.0)),
            _ => return Err(ExprError(format!("expected a term {}", p.where_()))),
        }
        if p.done() {
            break;
        }
    }
    if let Some((center, width, amplitude)) = gaussian {
        if count > 1 {
            return Err(ExprError("gaussian(...) cannot be combined with other terms".into()));
        }
        return ScalarField::gaussian(center, width, amplitude).map_err(|e| ExprError(e.to_string()));
    }
    if terms.is_empty() {
        return Ok(ScalarField::zero(n));
    }
    let poly = TrigPoly::from_real_terms(n, omega, &terms).map_err(|e| ExprError(e.to_string()))?;
    if poly.is_empty() {
        Ok(ScalarField::zero(n))
    } else {
        Ok(ScalarField::Trig(poly))
    }
}

/// Parse a spatial field that must be a trigonometric polynomial.
pub fn parse_trig(s: &str, n: usize, omega: f64) -> PResult<TrigPoly> {
    match parse_field(s, n, omega)? {
        ScalarField::Zero { dim } => Ok(TrigPoly::zero(dim)),
        ScalarField::Trig(p) => Ok(p),
        _ => Err(ExprError("expected a trigonometric polynomial".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum TimeTerm {
    Const(f64),
    Cos(f64, f64),
    Sin(f64, f64),
    Exp(f64, f64),
    Pow(f64, i32),
}

impl TimeTerm {
    fn value(&self, t: f64) -> f64 {
        match *self {
            TimeTerm::Const(c) => c,
            TimeTerm::Cos(c, w) => c * (w * t).cos(),
            TimeTerm::Sin(c, w) => c * (w * t).sin(),
            TimeTerm::Exp(c, w) => c * (w * t).exp(),
            TimeTerm::Pow(c, p) => c * t.powi(p),
        }
    }
}

/// `w t` or `t` inside a time function.
fn time_argument(p: &mut Parser) -> PResult<f64> {
    p.expect_op('(')?;
    let sign = if p.eat_op('-') { -1.0 } else { 1.0 };
    let w = if p.starts_number() {
        let w = p.number()?;
        p.eat_op('*');
        sign * w
    } else {
        sign
    };
    p.expect_ident("t")?;
    p.expect_op(')')?;
    Ok(w)
}

/// Parse a time profile `g(t)`.
pub fn parse_time(s: &str) -> PResult<TimeProfile> {
    let mut p = Parser::new(s)?;
    if p.done() {
        return Err(ExprError("empty time expression".into()));
    }
    let mut terms = Vec::new();
    let mut count = 0;
    loop {
        let mut sign = 1.0;
        if p.eat_op('-') {
            sign = -1.0;
        } else if count > 0 && !p.eat_op('+') {
            return Err(ExprError(format!("expected '+' or '-' {}", p.where_())));
        }
        count += 1;
        let explicit = p.coefficient()?;
        let coef = sign * explicit.unwrap_or(1.0);
        let term = match p.peek().cloned() {
            Some(Tok::Ident(name)) if name == "cos" => {
                p.pos += 1;
                TimeTerm::Cos(coef, time_argument(&mut p)?)
            }
            Some(Tok::Ident(name)) if name == "sin" => {
                p.pos += 1;
                TimeTerm::Sin(coef, time_argument(&mut p)?)
            }
            Some(Tok::Ident(name)) if name == "exp" => {
                p.pos += 1;
                TimeTerm::Exp(coef, time_argument(&mut p)?)
            }
            Some(Tok::Ident(name)) if name == "t" => {
                p.pos += 1;
                let power = if p.eat_op('^') {
                    match p.next() {
                        Some(Tok::Num(v)) if v.fract() == 0.0 && (0.0..=16.0).contains(&v) => v as i32,
                        _ => return Err(ExprError("t^p needs an integer power in 0..=16".into())),
                    }
                } else {
                    1
                };
                TimeTerm::Pow(coef, power)
            }
            Some(Tok::Ident(name)) => return Err(ExprError(format!("unknown time function '{name}'"))),
            _ if explicit.is_some() => TimeTerm::Const(coef),
            _ => return Err(ExprError(format!("expected a term {}", p.where_()))),
        };
        terms.push(term);
        if p.done() {
            break;
        }
    }
    Ok(TimeProfile::new(move |t| terms.iter().map(|term| term.value(t)).sum()))
}
