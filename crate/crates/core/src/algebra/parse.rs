//! Structure-equation strings such as `(0,0,e^{12},(lambda-1)e^{13})`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::ParseError;
use crate::linalg::rat::{fmt_rat, Rat};

/// `constant + Σ coef·param`; a plain rational when `terms` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Affine {
    pub constant: Rat,
    pub terms: BTreeMap<String, Rat>,
}

impl Affine {
    pub fn rational(c: Rat) -> Self {
        Self { constant: c, terms: BTreeMap::new() }
    }

    pub fn param(name: &str) -> Self {
        Self { constant: Rat::zero(), terms: BTreeMap::from([(name.to_string(), Rat::one())]) }
    }

    pub fn is_rational(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn add(&self, o: &Affine) -> Affine {
        let mut terms = self.terms.clone();
        for (k, v) in &o.terms {
            let e = terms.entry(k.clone()).or_insert_with(Rat::zero);
            *e += v;
        }
        terms.retain(|_, v| !v.is_zero());
        Affine { constant: &self.constant + &o.constant, terms }
    }

    pub fn scale(&self, s: &Rat) -> Affine {
        if s.is_zero() {
            return Affine::default();
        }
        Affine { constant: &self.constant * s, terms: self.terms.iter().map(|(k, v)| (k.clone(), v * s)).collect() }
    }

    /// Substitutes the given values; fails on the first unbound parameter.
    pub fn eval(&self, values: &BTreeMap<String, Rat>) -> Result<Rat, ParseError> {
        let mut acc = self.constant.clone();
        for (k, v) in &self.terms {
            let x = values.get(k).ok_or_else(|| ParseError::UnboundParameter(k.clone()))?;
            acc += v * x;
        }
        Ok(acc)
    }

    /// Substitutes what is available and keeps the rest symbolic.
    pub fn partial(&self, values: &BTreeMap<String, Rat>) -> Affine {
        let mut out = Affine::rational(self.constant.clone());
        for (k, v) in &self.terms {
            match values.get(k) {
                Some(x) => out.constant += v * x,
                None => {
                    out.terms.insert(k.clone(), v.clone());
                }
            }
        }
        out
    }

    pub fn params(&self) -> impl Iterator<Item = &String> {
        self.terms.keys()
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (k, v) in &self.terms {
            let body = if v.is_one() {
                k.clone()
            } else if (-v).is_one() {
                format!("-{k}")
            } else {
                format!("{}{k}", fmt_rat(v))
            };
            parts.push(body);
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(fmt_rat(&self.constant));
        }
        let mut s = String::new();
        for (n, p) in parts.iter().enumerate() {
            if n > 0 && !p.starts_with('-') {
                s.push('+');
            }
            s.push_str(p);
        }
        write!(f, "{s}")
    }
}

/// One term `coef · e^{ij}` of `de^k`, with `i < j` after normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedTerm {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coef: Affine,
}

/// Parsed string: dimension and the list of nonzero terms in order of appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedStructure {
    pub n: usize,
    pub terms: Vec<ParsedTerm>,
}

struct Lexer<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self { chars: src.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(), pos: 0, src }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn peek_at(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).map(|&(_, c)| c)
    }

    fn byte_pos(&self) -> usize {
        self.chars.get(self.pos).map_or(self.src.len(), |&(b, _)| b)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { pos: self.byte_pos(), msg: msg.into() }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            other => Err(self.err(format!("expected `{want}`, found {other:?}"))),
        }
    }

    fn at_form(&self) -> bool {
        self.peek() == Some('e') && self.peek_at(1) == Some('^')
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                Some(false)
            }
            Some('-') | Some('−') => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    fn digits(&mut self) -> Option<String> {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.pos += 1;
        }
        (!s.is_empty()).then_some(s)
    }

    fn unsigned_rational(&mut self) -> Result<Option<Rat>, ParseError> {
        let Some(num) = self.digits() else { return Ok(None) };
        let mut r: Rat = Rat::from_integer(num.parse().unwrap());
        if self.peek() == Some('/') {
            self.pos += 1;
            let den = self.digits().ok_or_else(|| self.err("expected denominator"))?;
            let den: num_bigint::BigInt = den.parse().unwrap();
            if den.is_zero() {
                return Err(self.err("zero denominator"));
            }
            r /= Rat::from_integer(den);
        }
        Ok(Some(r))
    }

    fn ident(&mut self) -> Option<String> {
        let c = self.peek()?;
        if !(c.is_alphabetic() || c == '_') || self.at_form() {
            return None;
        }
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if self.at_form() || !(c.is_alphanumeric() || c == '_') {
                break;
            }
            s.push(c);
            self.pos += 1;
        }
        Some(s)
    }

    /// `[rational] [ident | "(" affine ")"]`, at least one present.
    fn coefficient(&mut self) -> Result<Option<Affine>, ParseError> {
        let r = self.unsigned_rational()?;
        if self.peek() == Some('*') {
            self.pos += 1;
        }
        let factor = if self.peek() == Some('(') {
            self.pos += 1;
            let a = self.affine()?;
            self.expect(')')?;
            Some(a)
        } else {
            self.ident().map(|name| Affine::param(&name))
        };
        Ok(match (r, factor) {
            (None, None) => None,
            (Some(r), None) => Some(Affine::rational(r)),
            (None, Some(a)) => Some(a),
            (Some(r), Some(a)) => Some(a.scale(&r)),
        })
    }

    fn affine(&mut self) -> Result<Affine, ParseError> {
        let mut acc = Affine::default();
        let mut first = true;
        loop {
            let neg = match self.sign() {
                Some(n) => n,
                None if first => false,
                None => break,
            };
            first = false;
            let r = self.unsigned_rational()?;
            let id = self.ident();
            let term = match (r, id) {
                (None, None) => return Err(self.err("expected rational or parameter")),
                (Some(r), None) => Affine::rational(r),
                (None, Some(k)) => Affine::param(&k),
                (Some(r), Some(k)) => Affine::param(&k).scale(&r),
            };
            acc = acc.add(&if neg { term.scale(&-Rat::one()) } else { term });
            if self.peek() == Some(')') {
                break;
            }
        }
        Ok(acc)
    }

    fn node(&mut self) -> Result<usize, ParseError> {
        match self.bump() {
            Some(c) if c.is_ascii_digit() => {
                let d = c.to_digit(10).unwrap() as usize;
                Ok(if d == 0 { 10 } else { d })
            }
            other => Err(self.err(format!("expected node digit, found {other:?}"))),
        }
    }

    fn indices(&mut self) -> Result<Vec<usize>, ParseError> {
        if self.peek() == Some('{') {
            self.pos += 1;
            let mut body = String::new();
            while let Some(c) = self.peek() {
                if c == '}' {
                    break;
                }
                body.push(c);
                self.pos += 1;
            }
            self.expect('}')?;
            if body.contains(',') {
                return body
                    .split(',')
                    .map(|x| x.parse::<usize>().map_err(|_| self.err(format!("bad index `{x}`"))))
                    .collect();
            }
            body.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| if d == 0 { 10 } else { d as usize })
                        .ok_or_else(|| self.err(format!("bad index `{c}`")))
                })
                .collect()
        } else {
            Ok(vec![self.node()?, self.node()?])
        }
    }
}

/// Parses the grammar, leaving parameter coefficients symbolic.
pub fn parse_structure(s: &str) -> Result<ParsedStructure, ParseError> {
    let mut lx = Lexer::new(s);
    lx.expect('(')?;
    let mut exprs: Vec<Vec<(usize, usize, Affine)>> = Vec::new();
    loop {
        exprs.push(parse_expr(&mut lx)?);
        match lx.bump() {
            Some(',') => continue,
            Some(')') => break,
            other => {
                lx.pos -= 1;
                return Err(lx.err(format!("expected `,` or `)`, found {other:?}")));
            }
        }
    }
    if lx.peek().is_some() {
        return Err(lx.err("trailing input"));
    }
    let n = exprs.len();
    let mut terms = Vec::new();
    for (t, e) in exprs.into_iter().enumerate() {
        let mut merged: Vec<(usize, usize, Affine)> = Vec::new();
        for (a, b, coef) in e {
            if a > n || b > n {
                return Err(ParseError::NodeOutOfRange { node: a.max(b), n });
            }
            if let Some(slot) = merged.iter_mut().find(|(x, y, _)| (*x, *y) == (a, b)) {
                slot.2 = slot.2.add(&coef);
            } else {
                merged.push((a, b, coef));
            }
        }
        for (i, j, coef) in merged {
            if !coef.is_zero() {
                terms.push(ParsedTerm { i, j, k: t + 1, coef });
            }
        }
    }
    Ok(ParsedStructure { n, terms })
}

fn parse_expr(lx: &mut Lexer<'_>) -> Result<Vec<(usize, usize, Affine)>, ParseError> {
    if lx.peek() == Some('0') && matches!(lx.peek_at(1), Some(',') | Some(')')) {
        lx.pos += 1;
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut first = true;
    loop {
        let neg = match lx.sign() {
            Some(n) => n,
            None if first => false,
            None => break,
        };
        first = false;
        let coef = lx.coefficient()?.unwrap_or_else(|| Affine::rational(Rat::one()));
        if !lx.at_form() {
            return Err(lx.err("expected `e^`"));
        }
        lx.pos += 2;
        let idx = lx.indices()?;
        if idx.len() != 2 {
            return Err(lx.err("a 2-form needs exactly two indices"));
        }
        let (a, b) = (idx[0], idx[1]);
        if a == b {
            return Err(ParseError::RepeatedIndex(format!("{a}{b}")));
        }
        let mut c = if neg { coef.scale(&-Rat::one()) } else { coef };
        if a > b {
            c = c.scale(&-Rat::one());
        }
        out.push((a.min(b), a.max(b), c));
        if !matches!(lx.peek(), Some('+') | Some('-') | Some('−')) {
            break;
        }
    }
    Ok(out)
}

fn format_pair(i: usize, j: usize, n: usize) -> String {
    if n > 10 {
        format!("{{{i},{j}}}")
    } else {
        format!("{{{}{}}}", crate::diagram::node_label(i), crate::diagram::node_label(j))
    }
}

/// Renders terms `(i, j, k, coef)` grouped by target in the given order.
pub fn format_structure(n: usize, terms: &[(usize, usize, usize, Affine)]) -> String {
    let mut exprs: Vec<String> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut s = String::new();
        for (i, j, _, c) in terms.iter().filter(|t| t.2 == k) {
            let form = format!("e^{}", format_pair(*i, *j, n));
            let piece = if c.is_rational() {
                let v = &c.constant;
                if v.is_one() {
                    format!("+{form}")
                } else if (-v).is_one() {
                    format!("-{form}")
                } else if v.is_negative() {
                    format!("{}{form}", fmt_rat(v))
                } else {
                    format!("+{}{form}", fmt_rat(v))
                }
            } else if c.terms.len() == 1 && c.constant.is_zero() && c.terms.values().next().unwrap().is_one() {
                format!("+{} {form}", c)
            } else {
                format!("+({c}){form}")
            };
            s.push_str(&piece);
        }
        if s.is_empty() {
            s.push('0');
        }
        exprs.push(s.strip_prefix('+').map(str::to_string).unwrap_or(s));
    }
    format!("({})", exprs.join(","))
}
