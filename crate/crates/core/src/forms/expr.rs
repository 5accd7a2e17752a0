//! A small expression grammar for writing forms on the command line.
//!
//! Scalar layer: real literals, variables `x1..xn`, `+ - * / ^`, parentheses,
//! and the functions `sin cos exp log sqrt abs step` (`step(u)` is 1 for
//! `u >= 0`, else 0).  Form layer: wedge monomials `dxi^dxj^...`; the `^`
//! inside a monomial is disambiguated from scalar powers by the `dx` prefix on
//! both sides.  Each additive term carries at most one wedge monomial; wedge
//! factors combine with `^` only, never `*`.
//!
//! Parsing normalizes a form into coefficient expressions keyed by increasing
//! [`MultiIndex`], flipping signs as factors sort.  A term with a repeated
//! wedge factor is identically zero: it is dropped with a warning, not an
//! error.  Printing is canonical so that parse -> print -> parse is a fixed
//! point.

use crate::forms::{AlternatingTensor, FormField};
use crate::multiindex::{self, MultiIndex, SortOutcome};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Builtin {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Step,
}

impl Builtin {
    fn name(self) -> &'static str {
        match self {
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
            Builtin::Exp => "exp",
            Builtin::Log => "log",
            Builtin::Sqrt => "sqrt",
            Builtin::Abs => "abs",
            Builtin::Step => "step",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "sin" => Builtin::Sin,
            "cos" => Builtin::Cos,
            "exp" => Builtin::Exp,
            "log" => Builtin::Log,
            "sqrt" => Builtin::Sqrt,
            "abs" => Builtin::Abs,
            "step" => Builtin::Step,
            _ => return None,
        })
    }

    fn eval(self, u: f64) -> f64 {
        match self {
            Builtin::Sin => u.sin(),
            Builtin::Cos => u.cos(),
            Builtin::Exp => u.exp(),
            Builtin::Log => u.ln(),
            Builtin::Sqrt => u.sqrt(),
            Builtin::Abs => u.abs(),
            // Heaviside with step(0) = 1
            Builtin::Step => {
                if u >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug, PartialEq)]
enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Func(Builtin, Box<Expr>),
    Wedge(Vec<usize>),
}

impl Expr {
    fn contains_wedge(&self) -> bool {
        match self {
            Expr::Wedge(_) => true,
            Expr::Num(_) | Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Func(_, a) => a.contains_wedge(),
            Expr::Bin(_, a, b) => a.contains_wedge() || b.contains_wedge(),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x[i - 1],
            Expr::Neg(a) => -a.eval(x),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Func(f, a) => f.eval(a.eval(x)),
            Expr::Wedge(_) => unreachable!("wedge monomials never appear in coefficients"),
        }
    }

    /// Printing precedence; children below the required level get parens.
    fn prec(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) | Expr::Neg(_) => 2,
            Expr::Bin(BinOp::Pow, ..) => 3,
            Expr::Num(_) | Expr::Var(_) | Expr::Func(..) | Expr::Wedge(_) => 4,
        }
    }

    fn write(&self, out: &mut String, min_prec: u8) {
        let needs_parens = self.prec() < min_prec;
        if needs_parens {
            out.push('(');
        }
        match self {
            Expr::Num(v) => out.push_str(&v.to_string()),
            Expr::Var(i) => {
                out.push('x');
                out.push_str(&i.to_string());
            }
            Expr::Neg(a) => {
                out.push('-');
                a.write(out, 3);
            }
            Expr::Bin(op, a, b) => {
                let (sym, left, right) = match op {
                    // right operand one level up to keep left associativity
                    // structurally stable under reparse
                    BinOp::Add => ("+", 1, 2),
                    BinOp::Sub => ("-", 1, 2),
                    BinOp::Mul => ("*", 2, 3),
                    BinOp::Div => ("/", 2, 3),
                    // `^` is right associative, so the asymmetry flips
                    BinOp::Pow => ("^", 4, 3),
                };
                a.write(out, left);
                out.push_str(sym);
                b.write(out, right);
            }
            Expr::Func(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write(out, 0);
                out.push(')');
            }
            Expr::Wedge(indices) => {
                let parts: Vec<String> = indices.iter().map(|i| format!("dx{i}")).collect();
                out.push_str(&parts.join("^"));
            }
        }
        if needs_parens {
            out.push(')');
        }
    }
}

// ---------------------------------------------------------------------------
// tokenizer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Var(usize),
    Dx(usize),
    Func(Builtin),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax_error(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column: col,
        message: message.into(),
    }
}

fn tokenize(text: &str, n: usize) -> Result<Vec<Spanned>> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    while i < chars.len() {
        let (tline, tcol) = (line, col);
        let c = chars[i];
        let advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                advance(&mut i, &mut line, &mut col);
            }
            // exponent part: e/E, optional sign, at least one digit
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while i < j {
                        advance(&mut i, &mut line, &mut col);
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        advance(&mut i, &mut line, &mut col);
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value: f64 = text
                .parse()
                .map_err(|_| syntax_error(tline, tcol, format!("bad number literal {text:?}")))?;
            toks.push(Spanned {
                tok: Tok::Num(value),
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col);
            }
            let name: String = chars[start..i].iter().collect();
            let tok = classify_identifier(&name, n, tline, tcol)?;
            toks.push(Spanned {
                tok,
                line: tline,
                col: tcol,
            });
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(syntax_error(
                    tline,
                    tcol,
                    format!("unexpected character {other:?}"),
                ))
            }
        };
        advance(&mut i, &mut line, &mut col);
        toks.push(Spanned {
            tok,
            line: tline,
            col: tcol,
        });
    }
    Ok(toks)
}

fn classify_identifier(name: &str, n: usize, line: usize, col: usize) -> Result<Tok> {
    if let Some(f) = Builtin::from_name(name) {
        return Ok(Tok::Func(f));
    }
    let parse_index = |digits: &str, what: &str| -> Result<usize> {
        let idx: usize = digits
            .parse()
            .map_err(|_| syntax_error(line, col, format!("unknown identifier {name:?}")))?;
        if idx < 1 {
            return Err(syntax_error(line, col, format!("{what} index must be >= 1")));
        }
        if idx > n {
            return Err(syntax_error(
                line,
                col,
                format!("{name} exceeds ambient dimension {n}"),
            ));
        }
        Ok(idx)
    };
    if let Some(digits) = name.strip_prefix("dx") {
        if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            return Ok(Tok::Dx(parse_index(digits, "wedge factor")?));
        }
    }
    if let Some(digits) = name.strip_prefix('x') {
        if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            return Ok(Tok::Var(parse_index(digits, "variable")?));
        }
    }
    Err(syntax_error(
        line,
        col,
        format!("unknown identifier {name:?}"),
    ))
}

// ---------------------------------------------------------------------------
// parser

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            let (line, col) = self.here();
            Err(syntax_error(line, col, format!("expected {what}")))
        }
    }

    fn parse_sum(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_product()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.parse_product()?;
                    lhs = Expr::Bin(BinOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.parse_product()?;
                    lhs = Expr::Bin(BinOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_product(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.parse_unary()?;
                    lhs = Expr::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    let (line, col) = self.here();
                    self.pos += 1;
                    let rhs = self.parse_unary()?;
                    if rhs.contains_wedge() {
                        return Err(syntax_error(line, col, "wedge monomial in denominator"));
                    }
                    lhs = Expr::Bin(BinOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.parse_unary()?)))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.parse_unary()
            }
            _ => self.parse_power(),
        }
    }

    fn parse_power(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        if self.peek() == Some(&Tok::Caret) {
            let (line, col) = self.here();
            if matches!(base, Expr::Wedge(_)) {
                // the atom already absorbed every `^dx`; a leftover caret
                // means someone wrote `dx1^<scalar>`
                return Err(syntax_error(
                    line,
                    col,
                    "wedge monomials combine only with dx factors after '^'",
                ));
            }
            self.pos += 1;
            let exp = self.parse_unary()?;
            if exp.contains_wedge() {
                return Err(syntax_error(line, col, "wedge monomial in exponent"));
            }
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        let (line, col) = self.here();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Var(i)) => {
                self.pos += 1;
                Ok(Expr::Var(i))
            }
            Some(Tok::Dx(i)) => {
                self.pos += 1;
                let mut indices = vec![i];
                // greedy: `^` extends the monomial only when a dx follows
                while self.peek() == Some(&Tok::Caret) {
                    match self.peek2() {
                        Some(Tok::Dx(j)) => {
                            let j = *j;
                            self.pos += 2;
                            indices.push(j);
                        }
                        _ => break,
                    }
                }
                Ok(Expr::Wedge(indices))
            }
            Some(Tok::Func(f)) => {
                self.pos += 1;
                self.expect(Tok::LParen, &format!("'(' after {}", f.name()))?;
                let arg = self.parse_sum()?;
                self.expect(Tok::RParen, "')'")?;
                if arg.contains_wedge() {
                    return Err(syntax_error(
                        line,
                        col,
                        format!("wedge monomial inside {}(..)", f.name()),
                    ));
                }
                Ok(Expr::Func(f, Box::new(arg)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.parse_sum()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(syntax_error(line, col, "expected a value")),
        }
    }
}

// ---------------------------------------------------------------------------
// normalization

/// One additive term: a wedge-free coefficient and an optional raw monomial.
type RawTerm = (Expr, Option<Vec<usize>>);

fn split_terms(e: &Expr) -> Result<Vec<RawTerm>> {
    if !e.contains_wedge() {
        return Ok(vec![(e.clone(), None)]);
    }
    match e {
        Expr::Wedge(v) => Ok(vec![(Expr::Num(1.0), Some(v.clone()))]),
        Expr::Neg(a) => Ok(split_terms(a)?
            .into_iter()
            .map(|(c, w)| (negate(c), w))
            .collect()),
        Expr::Bin(BinOp::Add, a, b) => {
            let mut out = split_terms(a)?;
            out.extend(split_terms(b)?);
            Ok(out)
        }
        Expr::Bin(BinOp::Sub, a, b) => {
            let mut out = split_terms(a)?;
            out.extend(split_terms(b)?.into_iter().map(|(c, w)| (negate(c), w)));
            Ok(out)
        }
        Expr::Bin(BinOp::Mul, a, b) => {
            let mut out = Vec::new();
            for (ca, wa) in split_terms(a)? {
                for (cb, wb) in split_terms(b)? {
                    let wedge = match (&wa, &wb) {
                        (Some(_), Some(_)) => {
                            return Err(Error::Format {
                                what: "form expression",
                                detail: "wedge factors combine with '^', not '*'".to_string(),
                            })
                        }
                        (Some(w), None) | (None, Some(w)) => Some(w.clone()),
                        (None, None) => None,
                    };
                    out.push((multiply(ca.clone(), cb), wedge));
                }
            }
            Ok(out)
        }
        // the parser guarantees divisors are wedge-free
        Expr::Bin(BinOp::Div, a, b) => Ok(split_terms(a)?
            .into_iter()
            .map(|(c, w)| {
                (
                    Expr::Bin(BinOp::Div, Box::new(c), Box::new((**b).clone())),
                    w,
                )
            })
            .collect()),
        // Pow/Func with wedges inside were rejected during parsing
        other => Err(Error::Format {
            what: "form expression",
            detail: format!("wedge monomial in unsupported position: {other:?}"),
        }),
    }
}

fn negate(e: Expr) -> Expr {
    Expr::Neg(Box::new(e))
}

/// Multiply, eliding the unit coefficients produced by bare wedge monomials
/// so that printing round-trips structurally.
fn multiply(a: Expr, b: Expr) -> Expr {
    if a == Expr::Num(1.0) {
        return b;
    }
    if b == Expr::Num(1.0) {
        return a;
    }
    Expr::Bin(BinOp::Mul, Box::new(a), Box::new(b))
}

/// A parsed form: coefficient expressions keyed by increasing multi-index.
///
/// Equality ignores the warning list (a reparse of the printed form is equal
/// to the original even when zero terms were dropped with warnings).
#[derive(Clone, Debug)]
pub struct FormExpression {
    n: usize,
    degree: usize,
    coefficients: BTreeMap<MultiIndex, Expr>,
    warnings: Vec<String>,
}

impl PartialEq for FormExpression {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.degree == other.degree
            && self.coefficients == other.coefficients
    }
}

/// Parse `text` as a degree-p form on `R^n`.
pub fn parse_form(text: &str, n: usize, degree: usize) -> Result<FormExpression> {
    FormExpression::parse(text, n, degree)
}

impl FormExpression {
    pub fn parse(text: &str, n: usize, degree: usize) -> Result<Self> {
        if degree > n {
            return Err(Error::DegreeOutOfRange { degree, n });
        }
        let toks = tokenize(text, n)?;
        if toks.is_empty() {
            return Err(syntax_error(1, 1, "empty expression"));
        }
        let (end_line, end_col) = toks
            .last()
            .map(|s| (s.line, s.col + 1))
            .unwrap_or((1, 1));
        let mut parser = Parser {
            toks,
            pos: 0,
            end_line,
            end_col,
        };
        let ast = parser.parse_sum()?;
        if parser.pos < parser.toks.len() {
            let (line, col) = parser.here();
            return Err(syntax_error(line, col, "unexpected trailing input"));
        }

        let mut coefficients: BTreeMap<MultiIndex, Expr> = BTreeMap::new();
        let mut warnings = Vec::new();
        for (coef, raw_wedge) in split_terms(&ast)? {
            let found = raw_wedge.as_ref().map_or(0, |w| w.len());
            if found != degree {
                return Err(Error::DegreeMismatch {
                    declared: degree,
                    found,
                });
            }
            let (idx, signed_coef) = match raw_wedge {
                None => (MultiIndex::empty(n), coef),
                Some(w) => match multiindex::sort_with_sign(n, &w)? {
                    SortOutcome::Repeated => {
                        let msg = format!(
                            "term with repeated wedge factor ({}) is identically zero; dropped",
                            w.iter()
                                .map(|i| format!("dx{i}"))
                                .collect::<Vec<_>>()
                                .join("^")
                        );
                        log::warn!("{msg}");
                        warnings.push(msg);
                        continue;
                    }
                    SortOutcome::Sorted(idx, sign) => {
                        (idx, if sign < 0 { negate(coef) } else { coef })
                    }
                },
            };
            // a literal zero coefficient stores nothing; this keeps the
            // canonical zero form's print/parse cycle closed
            if signed_coef == Expr::Num(0.0) {
                continue;
            }
            match coefficients.remove(&idx) {
                None => {
                    coefficients.insert(idx, signed_coef);
                }
                Some(existing) => {
                    coefficients.insert(
                        idx,
                        Expr::Bin(BinOp::Add, Box::new(existing), Box::new(signed_coef)),
                    );
                }
            }
        }
        Ok(FormExpression {
            n,
            degree,
            coefficients,
            warnings,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Warnings accumulated while normalizing (dropped zero terms).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Evaluate every coefficient at `x`.
    pub fn sample_tensor(&self, x: &[f64]) -> Result<AlternatingTensor> {
        if x.len() != self.n {
            return Err(Error::dim("sample point length", self.n, x.len()));
        }
        let mut t = AlternatingTensor::zero(self.n, self.degree)?;
        for (idx, coef) in &self.coefficients {
            t.set(idx, coef.eval(x));
        }
        Ok(t)
    }

    /// Package as a [`FormField`] sampler.
    pub fn to_field(&self) -> FormField {
        let expr = self.clone();
        FormField::from_fn(self.n, self.degree, move |x| expr.sample_tensor(x))
            .expect("degree validated at parse time")
    }
}

impl fmt::Display for FormExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            // canonical zero form
            if self.degree == 0 {
                return f.write_str("0");
            }
            let wedge: Vec<String> = (1..=self.degree).map(|i| format!("dx{i}")).collect();
            return write!(f, "0*{}", wedge.join("^"));
        }
        let mut first = true;
        for (idx, coef) in &self.coefficients {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mut buf = String::new();
            if self.degree == 0 {
                coef.write(&mut buf, 0);
            } else {
                // coefficient sits to the left of `*`, so it needs product
                // precedence; the wedge follows verbatim
                coef.write(&mut buf, 2);
                buf.push('*');
                Expr::Wedge(idx.indices().to_vec()).write(&mut buf, 0);
            }
            f.write_str(&buf)?;
        }
        Ok(())
    }
}
