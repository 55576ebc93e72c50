//! Executes the commands of a parsed document: builds generators and
//! changes of variable at the working order, runs the analyses, and
//! renders text or JSON reports.

use std::collections::BTreeMap;

use abtheme_core::abalg::ChangeOfVariable;
use abtheme_core::theme::{analyze_checked, annihilator_of, rank_of, ThemeReport};
use abtheme_core::changevar::verify_parameter_transform;
use abtheme_core::ximodel::{monomial_to_abstract, XiElement};
use abtheme_core::{Scalar, TruncSeries, VarTag};
use num::bigint::BigInt;
use serde_json::{json, Value};

use crate::ast::{Command, CovForm, Decl, Poly, SourceDocument, XiTerm};

/// Failures split by exit code: `Input` is a malformed or inconsistent
/// document (exit 2), `Math` is a mathematical failure of the engine on
/// well-formed input (exit 1).
#[derive(Debug)]
pub enum RunError {
    Input(String),
    Math(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Input(m) => write!(f, "input error: {}", m),
            RunError::Math(m) => write!(f, "error: {}", m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

pub struct Options {
    pub order: usize,
    pub margin: usize,
    pub format: Format,
}

struct Env {
    generators: BTreeMap<String, Vec<XiTerm>>,
    covs: BTreeMap<String, Poly>,
}

impl Env {
    fn from_doc(doc: &SourceDocument) -> Result<Env, RunError> {
        let mut generators = BTreeMap::new();
        let mut covs = BTreeMap::new();
        for d in &doc.decls {
            match d {
                Decl::Params(_) | Decl::Series { .. } => {}
                Decl::Generator { name, terms } => {
                    generators.insert(name.clone(), terms.clone());
                }
                Decl::Cov { name, form } => {
                    let p = match form {
                        CovForm::Theta(p) | CovForm::Subst(p) => p.clone(),
                    };
                    if !p.coeffs.first().map(Scalar::is_zero).unwrap_or(true) {
                        return Err(RunError::Input(format!(
                            "cov '{}' has a nonzero constant term",
                            name
                        )));
                    }
                    if p.coeffs.len() < 2 || p.coeffs[1].is_zero() {
                        return Err(RunError::Input(format!(
                            "cov '{}' has no invertible linear term",
                            name
                        )));
                    }
                    covs.insert(name.clone(), p);
                }
            }
        }
        Ok(Env { generators, covs })
    }

    fn build_generator(&self, name: &str, order: usize) -> Result<XiElement, RunError> {
        let terms = self
            .generators
            .get(name)
            .ok_or_else(|| RunError::Input(format!("unknown generator '{}'", name)))?;
        let min = terms
            .iter()
            .map(|t| t.exponent.clone())
            .min()
            .ok_or_else(|| RunError::Input("empty generator".into()))?;
        let lambda0 = min.clone() + num::rational::BigRational::from_integer(BigInt::from(1));
        let log_bound = terms.iter().map(|t| t.log_pow).max().unwrap_or(0) + 1;
        let mut out = XiElement::zero(lambda0.clone(), log_bound, order);
        for t in terms {
            let m_rat = t.exponent.clone() - min.clone();
            let m: usize = m_rat
                .to_integer()
                .to_string()
                .parse()
                .map_err(|_| RunError::Input("exponent gap too large".into()))?;
            let mono = monomial_to_abstract(lambda0.clone(), m, t.log_pow, log_bound, order);
            let coeff = poly_to_series(&t.coeff, VarTag::B, order);
            let mut term = mono.mul_series(&coeff);
            if t.negated {
                term = term.neg();
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    fn build_cov(&self, name: &str, order: usize) -> Result<ChangeOfVariable, RunError> {
        let p = self
            .covs
            .get(name)
            .ok_or_else(|| RunError::Input(format!("unknown cov '{}'", name)))?;
        let theta = poly_to_series(p, VarTag::A, order);
        ChangeOfVariable::new(theta)
            .map_err(|e| RunError::Input(format!("cov '{}': {}", name, e)))
    }
}

fn poly_to_series(p: &Poly, var: VarTag, order: usize) -> TruncSeries {
    let mut coeffs = p.coeffs.clone();
    coeffs.resize(order, Scalar::zero());
    coeffs.truncate(order);
    TruncSeries::new(var, coeffs)
}

fn rat_json(r: &num::rational::BigRational) -> Value {
    Value::String(crate::ast::rat_str(r))
}

fn scalar_json(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

fn report_json(r: &ThemeReport) -> Value {
    json!({
        "rank": r.rank,
        "lambda1": rat_json(&r.exponents[0]),
        "p": r.gaps,
        "principal_params": r
            .params
            .iter()
            .map(|p| p.as_ref().map(scalar_json).unwrap_or(Value::Null))
            .collect::<Vec<_>>(),
        "effective_order": r.effective_order,
        "assumptions": r.assumptions,
    })
}

fn report_text(r: &ThemeReport) -> String {
    let mut out = r.to_string();
    if r.rank == 1 {
        out.push_str("isomorphic to E_lambda: true\n");
    }
    out
}

/// Runs every command in the document and returns one rendered block per
/// command (newline-delimited JSON objects in JSON mode).
pub fn run(doc: &SourceDocument, opts: &Options) -> Result<Vec<String>, RunError> {
    let env = Env::from_doc(doc)?;
    let mut outputs = Vec::new();
    for cmd in &doc.commands {
        let block = match cmd {
            Command::Analyze(name) => {
                let report = analyze_checked(
                    |n| env.build_generator(name, n).map_err(run_to_core),
                    opts.order,
                    opts.margin,
                )
                .map_err(math)?;
                match opts.format {
                    Format::Text => format!("analyze {}:\n{}", name, report_text(&report)),
                    Format::Json => report_json(&report).to_string(),
                }
            }
            Command::Annihilator(name) => {
                let x = env.build_generator(name, opts.order)?;
                let k = rank_of(&x).map_err(math)?;
                let (p, eff) = annihilator_of(&x, k).map_err(math)?;
                match opts.format {
                    Format::Text => format!(
                        "annihilator {}:\nrank {}\nP = {}\neffective order {}\n",
                        name, k, p, eff
                    ),
                    Format::Json => json!({
                        "rank": k,
                        "annihilator": p.to_string(),
                        "effective_order": eff,
                    })
                    .to_string(),
                }
            }
            Command::Pushforward { generator, cov } => {
                let x = env.build_generator(generator, opts.order)?;
                let c = env.build_cov(cov, opts.order + opts.margin + 6)?;
                let report = verify_parameter_transform(&x, &c).map_err(math)?;
                if !report.verified() {
                    return Err(RunError::Math(format!(
                        "pushforward verification failed:\n{}",
                        report
                    )));
                }
                match opts.format {
                    Format::Text => format!(
                        "pushforward {} by {}:\n{}pushed invariants:\n{}",
                        generator,
                        cov,
                        report,
                        report_text(&report.pushed)
                    ),
                    Format::Json => {
                        let mut v = report_json(&report.pushed);
                        v["r"] = scalar_json(&report.r);
                        v["verified"] = Value::Bool(true);
                        v.to_string()
                    }
                }
            }
        };
        outputs.push(block);
    }
    Ok(outputs)
}

fn math(e: abtheme_core::Error) -> RunError {
    RunError::Math(e.to_string())
}

/// Adapter for closures that must return the core error type.
fn run_to_core(e: RunError) -> abtheme_core::Error {
    abtheme_core::Error::NotATheme(e.to_string())
}
