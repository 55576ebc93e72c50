//! Recursive-descent parser for source documents, with line/column
//! diagnostics. The grammar:
//!
//! ```text
//! doc      := decl* command*
//! decl     := "param" NAME ("," NAME)* ";"
//!           | "series" NAME "=" poly(b) ";"
//!           | "generator" NAME "=" xi_expr ";"
//!           | "cov" NAME "=" ("theta" poly(a) | "subst" poly(t)) ";"
//! command  := ("analyze" | "annihilator") NAME ";"
//!           | "pushforward" NAME "by" NAME ";"
//! xi_expr  := xi_term (("+" | "-") xi_term)*
//! xi_term  := [coeff "*"] monomial
//! monomial := "s" "^" "(" RATIONAL ")" ["*" "L" "^" NAT]
//! coeff    := factor ("*" factor)*
//! poly(v)  := pterm (("+" | "-") pterm)*
//! pterm    := factor ("*" factor)*
//! factor   := "(" poly(v) ")" | "-" factor | RATIONAL | PARAM
//!           | SERIES_NAME | v ["^" NAT]
//! ```
//!
//! `s^(q)*L^j` denotes s^q (Log s)^j / j!. Scalars are exact rationals
//! and declared parameter names; series names may appear inside
//! b-polynomials. Undeclared names, non-positive minimal exponent, and
//! exponents spanning several classes mod 1 are rejected.

use std::collections::BTreeMap;
use std::fmt;

use abtheme_core::scalar::Rat;
use abtheme_core::Scalar;
use num::bigint::BigInt;

use crate::ast::{Command, CovForm, Decl, Poly, SourceDocument, XiTerm};

#[derive(Debug, Clone)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '#' {
            while let Some(&d) = chars.peek() {
                if d == '\n' {
                    break;
                }
                chars.next();
                col += 1;
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let (l0, c0) = (line, col);
            let mut name = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    name.push(d);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Spanned {
                tok: Tok::Ident(name),
                line: l0,
                col: c0,
            });
        } else if c.is_ascii_digit() {
            let (l0, c0) = (line, col);
            let mut digits = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() {
                    digits.push(d);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Spanned {
                tok: Tok::Int(digits.parse().unwrap()),
                line: l0,
                col: c0,
            });
        } else if "();,=^*+-/".contains(c) {
            out.push(Spanned {
                tok: Tok::Sym(c),
                line,
                col,
            });
            chars.next();
            col += 1;
        } else {
            return Err(ParseError {
                line,
                col,
                message: format!("unexpected character '{}'", c),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    params: Vec<String>,
    series: BTreeMap<String, Poly>,
    generators: Vec<String>,
    covs: Vec<String>,
}

impl Parser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or_else(|| {
                self.toks
                    .last()
                    .map(|s| (s.line, s.col + 1))
                    .unwrap_or((1, 1))
            });
        Err(ParseError {
            line,
            col,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|s| &s.tok)
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Sym(d)) if *d == c => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected '{}'", c)),
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected a name"),
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if let Some(Tok::Ident(n)) = self.peek() {
            if n == kw {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn nat(&mut self) -> Result<usize, ParseError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let v: usize = n
                    .to_string()
                    .parse()
                    .map_err(|_| ParseError {
                        line: self.toks[self.pos].line,
                        col: self.toks[self.pos].col,
                        message: "integer too large".into(),
                    })?;
                self.pos += 1;
                Ok(v)
            }
            _ => self.err("expected an integer"),
        }
    }

    /// RATIONAL := ["-"] INT ["/" INT]
    fn rational(&mut self) -> Result<Rat, ParseError> {
        let neg = matches!(self.peek(), Some(Tok::Sym('-'))) && {
            self.pos += 1;
            true
        };
        let num = match self.peek() {
            Some(Tok::Int(n)) => {
                let n = n.clone();
                self.pos += 1;
                n
            }
            _ => return self.err("expected a number"),
        };
        let den = if matches!(self.peek(), Some(Tok::Sym('/'))) {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Int(n)) => {
                    let n = n.clone();
                    self.pos += 1;
                    n
                }
                _ => return self.err("expected a denominator"),
            }
        } else {
            BigInt::from(1)
        };
        if den == BigInt::from(0) {
            return self.err("zero denominator");
        }
        let r = Rat::new(num, den);
        Ok(if neg { -r } else { r })
    }

    fn scalar_name(&mut self, name: &str) -> Result<Option<Scalar>, ParseError> {
        if self.params.iter().any(|p| p == name) {
            Ok(Some(Scalar::param(name)))
        } else {
            Ok(None)
        }
    }

    /// factor in a polynomial over variable `var`.
    fn factor(&mut self, var: char) -> Result<Poly, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let p = self.poly(var)?;
                self.expect_sym(')')?;
                Ok(p)
            }
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                Ok(self.factor(var)?.neg())
            }
            Some(Tok::Int(_)) => {
                let r = self.rational()?;
                Ok(Poly::constant(Scalar::from_rat(r)))
            }
            Some(Tok::Ident(name)) => {
                if name.len() == 1 && name.starts_with(var) {
                    self.pos += 1;
                    let e = if matches!(self.peek(), Some(Tok::Sym('^'))) {
                        self.pos += 1;
                        self.nat()?
                    } else {
                        1
                    };
                    let mut coeffs = vec![Scalar::zero(); e + 1];
                    coeffs[e] = Scalar::one();
                    Ok(Poly::new(coeffs))
                } else if let Some(s) = self.scalar_name(&name)? {
                    self.pos += 1;
                    let e = if matches!(self.peek(), Some(Tok::Sym('^'))) {
                        self.pos += 1;
                        self.nat()?
                    } else {
                        1
                    };
                    let mut acc = Scalar::one();
                    for _ in 0..e {
                        acc = acc.mul(&s);
                    }
                    Ok(Poly::constant(acc))
                } else if var == 'b' && self.series.contains_key(&name) {
                    self.pos += 1;
                    Ok(self.series[&name].clone())
                } else {
                    self.err(format!("undeclared name '{}'", name))
                }
            }
            _ => self.err("expected a factor"),
        }
    }

    fn pterm(&mut self, var: char) -> Result<Poly, ParseError> {
        let mut p = self.factor(var)?;
        while matches!(self.peek(), Some(Tok::Sym('*'))) {
            self.pos += 1;
            p = p.mul(&self.factor(var)?);
        }
        Ok(p)
    }

    fn poly(&mut self, var: char) -> Result<Poly, ParseError> {
        let mut p = self.pterm(var)?;
        loop {
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.pos += 1;
                    p = p.add(&self.pterm(var)?);
                }
                Some(Tok::Sym('-')) => {
                    self.pos += 1;
                    p = p.add(&self.pterm(var)?.neg());
                }
                _ => return Ok(p),
            }
        }
    }

    /// True when the upcoming tokens start a monomial `s ^ ( ... )`.
    fn at_monomial(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(n)) if n == "s")
            && matches!(self.peek2(), Some(Tok::Sym('^')))
    }

    fn monomial(&mut self) -> Result<(Rat, usize), ParseError> {
        let name = self.expect_ident()?;
        if name != "s" {
            return self.err("expected 's'");
        }
        self.expect_sym('^')?;
        self.expect_sym('(')?;
        let q = self.rational()?;
        self.expect_sym(')')?;
        let mut log_pow = 0;
        if matches!(self.peek(), Some(Tok::Sym('*')))
            && matches!(self.peek2(), Some(Tok::Ident(n)) if n == "L")
        {
            self.pos += 2;
            self.expect_sym('^')?;
            log_pow = self.nat()?;
        }
        Ok((q, log_pow))
    }

    fn xi_term(&mut self, negated: bool) -> Result<XiTerm, ParseError> {
        if self.at_monomial() {
            let (exponent, log_pow) = self.monomial()?;
            return Ok(XiTerm {
                negated,
                coeff: Poly::constant(Scalar::one()),
                exponent,
                log_pow,
            });
        }
        let mut coeff = self.factor('b')?;
        loop {
            if matches!(self.peek(), Some(Tok::Sym('*'))) {
                if self.toks.get(self.pos + 1).map(|s| &s.tok)
                    == Some(&Tok::Ident("s".to_string()))
                    && matches!(
                        self.toks.get(self.pos + 2).map(|s| &s.tok),
                        Some(Tok::Sym('^'))
                    )
                {
                    self.pos += 1;
                    break;
                }
                self.pos += 1;
                coeff = coeff.mul(&self.factor('b')?);
            } else if self.at_monomial() {
                break;
            } else {
                return self.err("expected '*' and a monomial s^(..)");
            }
        }
        let (exponent, log_pow) = self.monomial()?;
        Ok(XiTerm {
            negated,
            coeff,
            exponent,
            log_pow,
        })
    }

    fn xi_expr(&mut self) -> Result<Vec<XiTerm>, ParseError> {
        let mut terms = Vec::new();
        let first_neg = matches!(self.peek(), Some(Tok::Sym('-'))) && {
            self.pos += 1;
            true
        };
        terms.push(self.xi_term(first_neg)?);
        loop {
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.pos += 1;
                    terms.push(self.xi_term(false)?);
                }
                Some(Tok::Sym('-')) => {
                    self.pos += 1;
                    terms.push(self.xi_term(true)?);
                }
                _ => return Ok(terms),
            }
        }
    }

    fn validate_generator(&self, terms: &[XiTerm]) -> Result<(), ParseError> {
        let exps: Vec<&Rat> = terms.iter().map(|t| &t.exponent).collect();
        let min = exps.iter().min().unwrap();
        let one = Rat::from_integer(BigInt::from(1));
        if (*min).clone() + one <= Rat::from_integer(BigInt::from(0)) {
            return Err(ParseError {
                line: 0,
                col: 0,
                message: format!(
                    "minimal exponent {} gives a non-positive base exponent",
                    crate::ast::rat_str(min)
                ),
            });
        }
        for e in &exps {
            let diff = (*e).clone() - (*min).clone();
            if !diff.is_integer() {
                return Err(ParseError {
                    line: 0,
                    col: 0,
                    message: "exponents span several classes mod 1".into(),
                });
            }
        }
        Ok(())
    }

    fn decl(&mut self) -> Result<Option<Decl>, ParseError> {
        if self.eat_keyword("param") {
            let mut names = vec![self.expect_ident()?];
            while matches!(self.peek(), Some(Tok::Sym(','))) {
                self.pos += 1;
                names.push(self.expect_ident()?);
            }
            self.expect_sym(';')?;
            self.params.extend(names.clone());
            Ok(Some(Decl::Params(names)))
        } else if self.eat_keyword("series") {
            let name = self.expect_ident()?;
            self.expect_sym('=')?;
            let value = self.poly('b')?;
            self.expect_sym(';')?;
            self.series.insert(name.clone(), value.clone());
            Ok(Some(Decl::Series { name, value }))
        } else if self.eat_keyword("generator") {
            let name = self.expect_ident()?;
            self.expect_sym('=')?;
            let terms = self.xi_expr()?;
            self.expect_sym(';')?;
            self.validate_generator(&terms).map_err(|mut e| {
                if e.line == 0 {
                    let s = &self.toks[self.pos.saturating_sub(1)];
                    e.line = s.line;
                    e.col = s.col;
                }
                e
            })?;
            self.generators.push(name.clone());
            Ok(Some(Decl::Generator { name, terms }))
        } else if self.eat_keyword("cov") {
            let name = self.expect_ident()?;
            self.expect_sym('=')?;
            let form = if self.eat_keyword("theta") {
                CovForm::Theta(self.poly('a')?)
            } else if self.eat_keyword("subst") {
                CovForm::Subst(self.poly('t')?)
            } else {
                return self.err("expected 'theta' or 'subst'");
            };
            self.expect_sym(';')?;
            self.covs.push(name.clone());
            Ok(Some(Decl::Cov { name, form }))
        } else {
            Ok(None)
        }
    }

    fn require_declared(&self, name: &str, kind: &str) -> Result<(), ParseError> {
        let known = match kind {
            "generator" => self.generators.iter().any(|g| g == name),
            "cov" => self.covs.iter().any(|c| c == name),
            _ => false,
        };
        if known {
            Ok(())
        } else {
            Err(ParseError {
                line: self.toks[self.pos.saturating_sub(1)].line,
                col: self.toks[self.pos.saturating_sub(1)].col,
                message: format!("undeclared {} '{}'", kind, name),
            })
        }
    }

    fn command(&mut self) -> Result<Command, ParseError> {
        if self.eat_keyword("analyze") {
            let name = self.expect_ident()?;
            self.require_declared(&name, "generator")?;
            self.expect_sym(';')?;
            Ok(Command::Analyze(name))
        } else if self.eat_keyword("annihilator") {
            let name = self.expect_ident()?;
            self.require_declared(&name, "generator")?;
            self.expect_sym(';')?;
            Ok(Command::Annihilator(name))
        } else if self.eat_keyword("pushforward") {
            let generator = self.expect_ident()?;
            self.require_declared(&generator, "generator")?;
            if !self.eat_keyword("by") {
                return self.err("expected 'by'");
            }
            let cov = self.expect_ident()?;
            self.require_declared(&cov, "cov")?;
            self.expect_sym(';')?;
            Ok(Command::Pushforward { generator, cov })
        } else {
            self.err("expected a declaration or a command")
        }
    }
}

pub fn parse(text: &str) -> Result<SourceDocument, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        params: Vec::new(),
        series: BTreeMap::new(),
        generators: Vec::new(),
        covs: Vec::new(),
    };
    let mut doc = SourceDocument::default();
    while p.peek().is_some() {
        match p.decl()? {
            Some(d) => doc.decls.push(d),
            None => break,
        }
    }
    while p.peek().is_some() {
        doc.commands.push(p.command()?);
    }
    Ok(doc)
}
