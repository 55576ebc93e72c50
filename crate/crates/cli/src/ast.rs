//! Abstract syntax for source documents: declarations of parameters,
//! series, generators, and changes of variable, followed by commands.
//! Printing produces canonical text that reparses to the same syntax.

use std::fmt;

use abtheme_core::scalar::Rat;
use abtheme_core::Scalar;

/// A polynomial in a single variable, stored dense with no trailing
/// zeros; coefficients may involve declared parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().map(Scalar::is_zero).unwrap_or(false) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Scalar::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] = out[i].add(c);
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] = out[i].add(c);
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(Scalar::neg).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::new(Vec::new());
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out)
    }

    /// Renders the polynomial over the given variable name.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = scalar_factor(c);
            let part = match (m, c.is_one()) {
                (0, _) => cs,
                (1, true) => var.to_string(),
                (1, false) => format!("{}*{}", cs, var),
                (_, true) => format!("{}^{}", var, m),
                (_, false) => format!("{}*{}^{}", cs, var, m),
            };
            parts.push(part);
        }
        parts.join(" + ")
    }
}

/// A scalar as a multiplicative factor: sums need parentheses so the
/// printed form reparses as a single factor.
fn scalar_factor(c: &Scalar) -> String {
    let s = c.to_string();
    if s.contains(' ') {
        format!("({})", s)
    } else {
        s
    }
}

/// A change of variable, written either as a series in a (the operator
/// form) or as a substitution series in t; both denote the same series.
#[derive(Debug, Clone, PartialEq)]
pub enum CovForm {
    Theta(Poly),
    Subst(Poly),
}

/// One term of a generator expression: coeff * s^(exponent) * L^log_pow,
/// where s^(q)*L^j denotes s^q (Log s)^j / j!.
#[derive(Debug, Clone, PartialEq)]
pub struct XiTerm {
    pub negated: bool,
    pub coeff: Poly,
    pub exponent: Rat,
    pub log_pow: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    Params(Vec<String>),
    Series { name: String, value: Poly },
    Generator { name: String, terms: Vec<XiTerm> },
    Cov { name: String, form: CovForm },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Analyze(String),
    Annihilator(String),
    Pushforward { generator: String, cov: String },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SourceDocument {
    pub decls: Vec<Decl>,
    pub commands: Vec<Command>,
}

fn render_xi_term(t: &XiTerm) -> String {
    let mono = if t.log_pow == 0 {
        format!("s^({})", rat_str(&t.exponent))
    } else {
        format!("s^({})*L^{}", rat_str(&t.exponent), t.log_pow)
    };
    let trivial = t.coeff.coeffs.len() == 1 && t.coeff.coeffs[0].is_one();
    if trivial {
        mono
    } else if t.coeff.coeffs.len() <= 1 {
        format!("{}*{}", t.coeff.render("b"), mono)
    } else {
        format!("({})*{}", t.coeff.render("b"), mono)
    }
}

pub fn rat_str(r: &Rat) -> String {
    Scalar::from_rat(r.clone()).to_string()
}

impl fmt::Display for SourceDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            match d {
                Decl::Params(names) => writeln!(f, "param {};", names.join(", "))?,
                Decl::Series { name, value } => {
                    writeln!(f, "series {} = {};", name, value.render("b"))?
                }
                Decl::Generator { name, terms } => {
                    let mut body = String::new();
                    for (i, t) in terms.iter().enumerate() {
                        if i == 0 {
                            if t.negated {
                                body.push_str("- ");
                            }
                        } else if t.negated {
                            body.push_str(" - ");
                        } else {
                            body.push_str(" + ");
                        }
                        body.push_str(&render_xi_term(t));
                    }
                    writeln!(f, "generator {} = {};", name, body)?
                }
                Decl::Cov { name, form } => match form {
                    CovForm::Theta(p) => {
                        writeln!(f, "cov {} = theta {};", name, p.render("a"))?
                    }
                    CovForm::Subst(p) => {
                        writeln!(f, "cov {} = subst {};", name, p.render("t"))?
                    }
                },
            }
        }
        for c in &self.commands {
            match c {
                Command::Analyze(n) => writeln!(f, "analyze {};", n)?,
                Command::Annihilator(n) => writeln!(f, "annihilator {};", n)?,
                Command::Pushforward { generator, cov } => {
                    writeln!(f, "pushforward {} by {};", generator, cov)?
                }
            }
        }
        Ok(())
    }
}
