//! A small claim language for bounded identity checking.
//!
//! Grammar:
//!
//! ```text
//! claim  := expr "=" expr ["," "n" "in" set]
//! set    := "A" | "B" | "R[" int "," int "]"
//! expr   := term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := int | "n" | "-" factor | "(" expr ")"
//!         | ("a" | "b" | "fib") "(" expr ")"
//!         | "f[" int "," int "]" "(" expr ")"
//!         | "floorphi" "(" int "," int "," int ";" expr ")"
//! ```
//!
//! `a` and `b` are the two Wythoff sequences, `f[i,j]` the generalized
//! Beatty sequences, and `floorphi(p,q,r; t)` denotes
//! `floor((p*phi + q)*t + r)`, which is an integer expression because the
//! fractional part comes solely from `p*t*phi`.  The golden ratio never
//! appears as a raw value, so evaluation is exact in 128-bit arithmetic.
//!
//! Statements involving the conjugate `1/phi = phi - 1` or the square
//! `phi^2 = phi + 1` are written in integer form through the exact
//! translations (valid for every positive integer `m`):
//!
//! ```text
//! floor(m/phi)      = floor((phi - 1)m) = a(m) - m = floorphi(1,-1,0; m)
//! floor(phi^2 * m)  = a(m) + m = b(m)
//! ```
//!
//! so, for instance, `floor((1/phi) * floor(phi^2 n))` becomes
//! `a(b(n)) - b(n)`.  The claim corpus records these spellings next to
//! each affected claim.
//!
//! A claim is checked for every `n` from 1 to a bound, restricted by the
//! optional membership guard.  This is a bounded checker: it refutes or
//! accumulates evidence, it never proves.

use crate::gbs::{GbsBlock, GbsError};
use crate::report::{IdentityOutcome, IdentityReport};
use crate::wythoff::{
    fib, floor_phi_mul, is_lower_member, is_upper_member, ArithError, MAX_FIB_INDEX,
};
use rayon::prelude::*;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at offset {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("evaluation failed at n = {n}: {source}")]
pub struct CheckError {
    pub n: i128,
    pub source: ArithError,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i128),
    N,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    A(Box<Expr>),
    B(Box<Expr>),
    Fib(Box<Expr>),
    F { i: u32, j: i64, arg: Box<Expr> },
    FloorPhi { p: i64, q: i64, r: i64, arg: Box<Expr> },
}

/// Membership guard on the checked variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Lower,
    Upper,
    Range(GbsBlock),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    pub lhs: Expr,
    pub rhs: Expr,
    pub guard: Option<Domain>,
}

fn flatten_gbs(e: GbsError) -> ArithError {
    match e {
        GbsError::Arith(a) => a,
        other => ArithError::Overflow(match other {
            GbsError::SecondKindTooSmall(_) | GbsError::FirstKindTooSmall(_) => "gbs misuse",
            GbsError::Arith(_) => unreachable!(),
        }),
    }
}

impl Expr {
    pub fn eval(&self, n: i128) -> Result<i128, ArithError> {
        match self {
            Expr::Int(v) => Ok(*v),
            Expr::N => Ok(n),
            Expr::Neg(e) => e
                .eval(n)?
                .checked_neg()
                .ok_or(ArithError::Overflow("negation")),
            Expr::Add(l, r) => l
                .eval(n)?
                .checked_add(r.eval(n)?)
                .ok_or(ArithError::Overflow("addition")),
            Expr::Sub(l, r) => l
                .eval(n)?
                .checked_sub(r.eval(n)?)
                .ok_or(ArithError::Overflow("subtraction")),
            Expr::Mul(l, r) => l
                .eval(n)?
                .checked_mul(r.eval(n)?)
                .ok_or(ArithError::Overflow("multiplication")),
            Expr::A(e) => {
                let v = e.eval(n)?;
                if v < 1 {
                    return Err(ArithError::NotPositive(v));
                }
                floor_phi_mul(v)
            }
            Expr::B(e) => {
                let v = e.eval(n)?;
                if v < 1 {
                    return Err(ArithError::NotPositive(v));
                }
                crate::wythoff::floor_phi_sq_mul(v)
            }
            Expr::Fib(e) => {
                let v = e.eval(n)?;
                if !(0..=MAX_FIB_INDEX as i128).contains(&v) {
                    return Err(ArithError::FibIndexOutOfRange(
                        v.clamp(0, u32::MAX as i128) as u32,
                    ));
                }
                fib(v as u32)
            }
            Expr::F { i, j, arg } => {
                let v = arg.eval(n)?;
                GbsBlock::new(*i, *j).eval(v).map_err(flatten_gbs)
            }
            Expr::FloorPhi { p, q, r, arg } => {
                let t = arg.eval(n)?;
                let pt = (*p as i128)
                    .checked_mul(t)
                    .ok_or(ArithError::Overflow("floorphi"))?;
                let qt = (*q as i128)
                    .checked_mul(t)
                    .ok_or(ArithError::Overflow("floorphi"))?;
                floor_phi_mul(pt)?
                    .checked_add(qt)
                    .and_then(|x| x.checked_add(*r as i128))
                    .ok_or(ArithError::Overflow("floorphi"))
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(..) => 3,
            _ => 4,
        }
    }
}

fn fmt_child(f: &mut fmt::Formatter<'_>, child: &Expr, min: u8) -> fmt::Result {
    if child.precedence() < min {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::N => write!(f, "n"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                fmt_child(f, e, 4)
            }
            Expr::Add(l, r) => {
                fmt_child(f, l, 1)?;
                write!(f, " + ")?;
                fmt_child(f, r, 2)
            }
            Expr::Sub(l, r) => {
                fmt_child(f, l, 1)?;
                write!(f, " - ")?;
                fmt_child(f, r, 2)
            }
            Expr::Mul(l, r) => {
                fmt_child(f, l, 2)?;
                write!(f, "*")?;
                fmt_child(f, r, 3)
            }
            Expr::A(e) => write!(f, "a({e})"),
            Expr::B(e) => write!(f, "b({e})"),
            Expr::Fib(e) => write!(f, "fib({e})"),
            Expr::F { i, j, arg } => write!(f, "f[{i},{j}]({arg})"),
            Expr::FloorPhi { p, q, r, arg } => write!(f, "floorphi({p},{q},{r}; {arg})"),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Lower => write!(f, "A"),
            Domain::Upper => write!(f, "B"),
            Domain::Range(b) => write!(f, "R[{},{}]", b.i, b.j),
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)?;
        if let Some(g) = &self.guard {
            write!(f, ", n in {g}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i128),
    Word(String),
    Sym(char),
}

fn describe(tok: Option<&(usize, Tok)>) -> String {
    match tok {
        None => "end of input".into(),
        Some((_, Tok::Int(v))) => format!("{v}"),
        Some((_, Tok::Word(w))) => format!("{w:?}"),
        Some((_, Tok::Sym(c))) => format!("{c:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos] as char;
        if c.is_ascii_whitespace() {
            pos += 1;
        } else if c.is_ascii_digit() {
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let v: i128 = text[start..pos].parse().map_err(|_| ParseError {
                offset: start,
                expected: "an integer that fits in 128 bits".into(),
                found: text[start..pos].to_string(),
            })?;
            toks.push((start, Tok::Int(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = pos;
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            toks.push((start, Tok::Word(text[start..pos].to_string())));
        } else if "+-*()[],;=".contains(c) {
            toks.push((pos, Tok::Sym(c)));
            pos += 1;
        } else {
            return Err(ParseError {
                offset: pos,
                expected: "a token".into(),
                found: format!("{c:?}"),
            });
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |&(o, _)| o)
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.here(),
            expected: expected.into(),
            found: describe(self.peek()),
        }
    }

    fn eat_sym(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some((_, Tok::Sym(s))) if *s == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("{c:?}"))),
        }
    }

    fn try_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some((_, Tok::Sym(s))) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some((_, Tok::Word(s))) if s == w => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("{w:?}"))),
        }
    }

    /// Signed integer literal (used for indices and coefficients).
    fn signed_int(&mut self) -> Result<i128, ParseError> {
        let neg = self.try_sym('-');
        match self.peek() {
            Some(&(_, Tok::Int(v))) => {
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.error("an integer")),
        }
    }

    fn small_int(&mut self) -> Result<i64, ParseError> {
        let offset = self.here();
        let v = self.signed_int()?;
        i64::try_from(v).map_err(|_| ParseError {
            offset,
            expected: "an integer that fits in 64 bits".into(),
            found: v.to_string(),
        })
    }

    fn block_index(&mut self) -> Result<u32, ParseError> {
        let offset = self.here();
        let v = self.signed_int()?;
        u32::try_from(v).map_err(|_| ParseError {
            offset,
            expected: "a non-negative block index".into(),
            found: v.to_string(),
        })
    }

    fn bracketed_pair(&mut self) -> Result<(u32, i64), ParseError> {
        self.eat_sym('[')?;
        let i = self.block_index()?;
        self.eat_sym(',')?;
        let j = self.small_int()?;
        self.eat_sym(']')?;
        Ok((i, j))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some((_, Tok::Int(v))) => {
                self.pos += 1;
                Ok(Expr::Int(v))
            }
            Some((_, Tok::Sym('-'))) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some((_, Tok::Sym('('))) => {
                self.pos += 1;
                let e = self.expr()?;
                self.eat_sym(')')?;
                Ok(e)
            }
            Some((offset, Tok::Word(w))) => {
                self.pos += 1;
                match w.as_str() {
                    "n" => Ok(Expr::N),
                    "a" | "b" | "fib" => {
                        self.eat_sym('(')?;
                        let arg = Box::new(self.expr()?);
                        self.eat_sym(')')?;
                        Ok(match w.as_str() {
                            "a" => Expr::A(arg),
                            "b" => Expr::B(arg),
                            _ => Expr::Fib(arg),
                        })
                    }
                    "f" => {
                        let (i, j) = self.bracketed_pair()?;
                        self.eat_sym('(')?;
                        let arg = Box::new(self.expr()?);
                        self.eat_sym(')')?;
                        Ok(Expr::F { i, j, arg })
                    }
                    "floorphi" => {
                        self.eat_sym('(')?;
                        let p = self.small_int()?;
                        self.eat_sym(',')?;
                        let q = self.small_int()?;
                        self.eat_sym(',')?;
                        let r = self.small_int()?;
                        self.eat_sym(';')?;
                        let arg = Box::new(self.expr()?);
                        self.eat_sym(')')?;
                        Ok(Expr::FloorPhi { p, q, r, arg })
                    }
                    _ => Err(ParseError {
                        offset,
                        expected: "one of n, a, b, fib, f, floorphi".into(),
                        found: format!("{w:?}"),
                    }),
                }
            }
            _ => Err(self.error("a factor")),
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.factor()?;
        while self.try_sym('*') {
            e = Expr::Mul(Box::new(e), Box::new(self.factor()?));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.term()?;
        loop {
            if self.try_sym('+') {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.try_sym('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn guard(&mut self) -> Result<Domain, ParseError> {
        self.eat_word("n")?;
        self.eat_word("in")?;
        match self.peek().cloned() {
            Some((_, Tok::Word(w))) if w == "A" => {
                self.pos += 1;
                Ok(Domain::Lower)
            }
            Some((_, Tok::Word(w))) if w == "B" => {
                self.pos += 1;
                Ok(Domain::Upper)
            }
            Some((_, Tok::Word(w))) if w == "R" => {
                self.pos += 1;
                let (i, j) = self.bracketed_pair()?;
                Ok(Domain::Range(GbsBlock::new(i, j)))
            }
            _ => Err(self.error("one of A, B, R")),
        }
    }

    fn claim(&mut self) -> Result<Claim, ParseError> {
        let lhs = self.expr()?;
        self.eat_sym('=')?;
        let rhs = self.expr()?;
        let guard = if self.try_sym(',') {
            Some(self.guard()?)
        } else {
            None
        };
        if self.peek().is_some() {
            return Err(self.error("end of claim"));
        }
        Ok(Claim { lhs, rhs, guard })
    }
}

fn parser_for(text: &str) -> Result<Parser, ParseError> {
    Ok(Parser {
        toks: lex(text)?,
        pos: 0,
        end: text.len(),
    })
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = parser_for(text)?;
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error("end of expression"));
    }
    Ok(e)
}

pub fn parse_claim(text: &str) -> Result<Claim, ParseError> {
    parser_for(text)?.claim()
}

impl Domain {
    pub fn contains(&self, n: i128) -> Result<bool, ArithError> {
        match self {
            Domain::Lower => is_lower_member(n),
            Domain::Upper => is_upper_member(n),
            Domain::Range(b) => b.range_contains(n).map(|p| p.is_some()).map_err(flatten_gbs),
        }
    }
}

impl Claim {
    /// Evaluates both sides for every guarded `n` up to the bound.
    pub fn check(&self, n_max: i128) -> Result<IdentityOutcome, CheckError> {
        let mut outcome = IdentityOutcome::new(self.to_string());
        for n in 1..=n_max {
            let wrap = |source: ArithError| CheckError { n, source };
            if let Some(g) = &self.guard {
                if !g.contains(n).map_err(wrap)? {
                    continue;
                }
            }
            let l = self.lhs.eval(n).map_err(wrap)?;
            let r = self.rhs.eval(n).map_err(wrap)?;
            if l == r {
                outcome.record_pass();
            } else {
                outcome.record_failure(n, format!("lhs = {l}, rhs = {r}"));
            }
        }
        Ok(outcome)
    }
}

/// The claim corpus shipped with the crate, one claim per line.
pub const CLAIM_CORPUS: &str = include_str!("../corpus/identities.txt");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("line {line} ({claim}): {source}")]
    Check {
        line: usize,
        claim: String,
        source: CheckError,
    },
}

/// Parses a corpus file (one claim per line, `#` comments) and checks every
/// claim up to the bound, in parallel.
pub fn check_corpus(text: &str, n_max: i128) -> Result<IdentityReport, CorpusError> {
    let mut claims = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let claim = parse_claim(line).map_err(|source| CorpusError::Parse {
            line: lineno + 1,
            source,
        })?;
        claims.push((lineno + 1, claim));
    }
    let outcomes: Result<Vec<IdentityOutcome>, CorpusError> = claims
        .par_iter()
        .map(|(line, claim)| {
            claim.check(n_max).map_err(|source| CorpusError::Check {
                line: *line,
                claim: claim.to_string(),
                source,
            })
        })
        .collect();
    let mut report = IdentityReport::new(n_max);
    for outcome in outcomes? {
        report.push(outcome);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(text: &str) {
        let claim = parse_claim(text).unwrap();
        let printed = claim.to_string();
        assert_eq!(parse_claim(&printed).unwrap(), claim, "{text} -> {printed}");
    }

    #[test]
    fn parses_basic_claims() {
        let c = parse_claim("a(a(n)) = a(n) + n - 1").unwrap();
        assert_eq!(c.guard, None);
        assert_eq!(c.to_string(), "a(a(n)) = a(n) + n - 1");

        let c = parse_claim("f[1,1](n) + 1 = f[1,0](n)").unwrap();
        assert_eq!(
            c.lhs,
            Expr::Add(
                Box::new(Expr::F {
                    i: 1,
                    j: 1,
                    arg: Box::new(Expr::N)
                }),
                Box::new(Expr::Int(1))
            )
        );
    }

    #[test]
    fn parses_guards() {
        let c = parse_claim("a(n + 1) = a(n) + 2, n in A").unwrap();
        assert_eq!(c.guard, Some(Domain::Lower));
        let c = parse_claim("n = n, n in R[1,0]").unwrap();
        assert_eq!(c.guard, Some(Domain::Range(GbsBlock::new(1, 0))));
        roundtrip("a(n + 1) = a(n) + 1, n in B");
    }

    #[test]
    fn reports_positioned_errors() {
        let err = parse_claim("a(n = 3").unwrap_err();
        assert_eq!(err.offset, 4);
        assert_eq!(err.expected, "')'");
        assert_eq!(err.found, "'='");

        let err = parse_claim("q(n) = n").unwrap_err();
        assert_eq!(err.offset, 0);
        assert!(err.expected.contains("floorphi"));

        let err = parse_claim("n + = n").unwrap_err();
        assert_eq!(err.offset, 4);

        let err = parse_claim("n = n extra").unwrap_err();
        assert_eq!(err.found, "\"extra\"");

        let err = parse_claim("f[-1,0](n) = n").unwrap_err();
        assert_eq!(err.offset, 2);
        assert!(err.expected.contains("non-negative"));

        let err = parse_claim("n ? n").unwrap_err();
        assert_eq!(err.offset, 2);
    }

    #[test]
    fn evaluation_is_exact() {
        let e = parse_expr("a(b(n)) - 2*a(n)").unwrap();
        for n in 1..200 {
            assert_eq!(e.eval(n).unwrap(), n);
        }
        let e = parse_expr("fib(12)").unwrap();
        assert_eq!(e.eval(1).unwrap(), 144);
        let e = parse_expr("floorphi(1,0,0; n)").unwrap();
        for n in 1..100 {
            assert_eq!(e.eval(n).unwrap(), crate::wythoff::lower_wythoff(n).unwrap());
        }
        // floor((phi - 1)*b(n)) = b(n) - n, via the n-shifted fraction
        let e = parse_expr("floorphi(1,-1,0; b(n))").unwrap();
        for n in 1..100 {
            let b = crate::wythoff::upper_wythoff(n).unwrap();
            assert_eq!(e.eval(n).unwrap(), b - n);
        }
    }

    #[test]
    fn unary_minus_and_parens() {
        let e = parse_expr("-(n + 1)*2").unwrap();
        assert_eq!(e.eval(4).unwrap(), -10);
        let e = parse_expr("--3").unwrap();
        assert_eq!(e.eval(1).unwrap(), 3);
        roundtrip("-(n + 1)*2 = -2*n - 2");
        roundtrip("(n + 1)*(n - 1) = n*n - 1");
        roundtrip("n - (n - 1) = 1");
    }

    #[test]
    fn checking_finds_counterexamples() {
        let claim = parse_claim("a(n) = n").unwrap();
        let outcome = claim.check(10).unwrap();
        assert!(!outcome.is_pass());
        assert_eq!(outcome.failures[0].input, 2);

        let claim = parse_claim("a(b(n)) = 2*a(n) + n").unwrap();
        assert!(claim.check(2000).unwrap().is_pass());
    }

    #[test]
    fn guards_filter_the_range()  {
        let claim = parse_claim("a(n + 1) = a(n) + 2, n in A").unwrap();
        let outcome = claim.check(1000).unwrap();
        assert!(outcome.is_pass());
        // 618 of the first 1000 integers lie in the lower sequence
        assert_eq!(outcome.passed, 618);

        let unguarded = parse_claim("a(n + 1) = a(n) + 2").unwrap();
        assert!(!unguarded.check(1000).unwrap().is_pass());
    }

    #[test]
    fn fib_eval_guards() {
        let e = parse_expr("fib(n)").unwrap();
        assert!(e.eval(-1).is_err());
        assert!(e.eval(185).is_err());
        assert_eq!(e.eval(184).unwrap(), crate::wythoff::fib(184).unwrap());
    }

    #[test]
    fn overflow_carries_the_witness() {
        let claim = parse_claim("a(n*n*n*n*n*n*n*n*n*n*n*n*n) = n").unwrap();
        let err = claim.check(100_000).unwrap_err();
        assert!(err.n >= 1);
        assert!(matches!(err.source, ArithError::Overflow(_)));
    }

    #[test]
    fn corpus_checking() {
        let text = "\
# two identities and a comment
a(a(n)) = a(n) + n - 1
b(n) = a(n) + n
";
        let report = check_corpus(text, 500).unwrap();
        assert!(report.is_pass());
        assert_eq!(report.identities.len(), 2);

        let bad = check_corpus("a(n = 3\n", 10);
        assert!(matches!(bad, Err(CorpusError::Parse { line: 1, .. })));

        let falsy = check_corpus("n = 1\n", 10).unwrap();
        assert!(!falsy.is_pass());
    }
}
