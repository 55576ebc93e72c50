//! Analysis of monogenic submodules of Xi: Jordan-Hoelder filtration,
//! fundamental invariants, principal parameters, annihilators, lattice
//! saturation and Bernstein polynomials.

use num::bigint::BigInt;
use num::integer::lcm;
use num::{One, Signed, Zero};
use std::fmt;

use crate::abalg::{right_divide_linear, AbElement};
use crate::error::{Error, Result};
use crate::linsolve::{scalar_nullspace, series_solve};
use crate::scalar::{Rat, Scalar};
use crate::series::{TruncSeries, VarTag};
use crate::ximodel::{
    express_in_span, from_function_monomials, monomial_to_abstract, pochhammer,
    to_function_monomials, MatrixModule, XiElement,
};

/// Invariants of a monogenic module generated by an element of Xi.
///
/// `exponents` lists the Jordan-Hoelder exponents lambda_1, ..., lambda_k
/// bottom-up, `gaps` the natural numbers p_j = lambda_{j+1} - lambda_j + 1,
/// and `params` the principal parameters alpha_j (absent exactly when
/// p_j = 0).
#[derive(Debug, Clone)]
pub struct ThemeReport {
    pub rank: usize,
    pub lambda0: Rat,
    pub exponents: Vec<Rat>,
    pub gaps: Vec<usize>,
    pub params: Vec<Option<Scalar>>,
    pub annihilator: AbElement,
    pub effective_order: usize,
    pub assumptions: Vec<String>,
}

impl ThemeReport {
    /// Agreement of all invariant data that is independent of the working
    /// order (everything except the annihilator coefficients and the
    /// bookkeeping fields).
    pub fn data_eq(&self, other: &ThemeReport) -> bool {
        self.rank == other.rank
            && self.exponents == other.exponents
            && self.gaps == other.gaps
            && self.params == other.params
    }
}

impl fmt::Display for ThemeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank {}", self.rank)?;
        for (j, e) in self.exponents.iter().enumerate() {
            write!(f, "lambda_{} = {}", j + 1, e)?;
            if j + 1 < self.rank {
                write!(f, ", p_{} = {}", j + 1, self.gaps[j])?;
                match &self.params[j] {
                    Some(a) => write!(f, ", alpha_{} = {}", j + 1, a)?,
                    None => write!(f, ", alpha_{} = (none)", j + 1)?,
                }
            }
            writeln!(f)?;
        }
        writeln!(f, "effective order {}", self.effective_order)?;
        for a in &self.assumptions {
            writeln!(f, "assumption: {}", a)?;
        }
        Ok(())
    }
}

/// One stage of the Jordan-Hoelder filtration: a generator of the rank-j
/// submodule F_j together with the exponent of F_j / F_{j-1}.
#[derive(Debug, Clone)]
pub struct JhStage {
    pub generator: XiElement,
    pub exponent: Rat,
}

fn rat_usize(n: usize) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// The rank of the monogenic module generated by `x`: one more than the
/// top log index of the generator.
pub fn rank_of(x: &XiElement) -> Result<usize> {
    x.top_log_index()
        .map(|t| t + 1)
        .ok_or(Error::ZeroGenerator)
}

/// The monic annihilator of `x` as a generator of a rank-`k` module:
/// P = a^k - sum_j c_j(b)·a^j where a^k·x = sum c_j·a^j·x over C[[b]].
///
/// Returns the annihilator and the effective order of the coefficient
/// solve. Fails with `RankMismatch` when the powers a^j·x, j < k, do not
/// span a^k·x, i.e. when the true rank differs from `k`.
pub fn annihilator_of(x: &XiElement, k: usize) -> Result<(AbElement, usize)> {
    let mut pows: Vec<XiElement> = Vec::with_capacity(k + 1);
    pows.push(x.clone());
    for _ in 0..k {
        pows.push(pows.last().unwrap().act_a());
    }
    let basis: Vec<&XiElement> = pows[..k].iter().collect();
    let (c, eff) = match express_in_span(&pows[k], &basis) {
        Ok(v) => v,
        Err(Error::NotInSpan { .. }) => return Err(Error::RankMismatch { rank: k }),
        Err(e) => return Err(e),
    };
    // the coefficient c_j is only known up to its own order, so the
    // element is reliable below the weight min_j(order(c_j) + j)
    let mut w = x.order() + k + 1;
    for (j, cj) in c.iter().enumerate() {
        w = w.min(cj.order() + j);
    }
    if w <= k {
        return Err(Error::OrderExhausted {
            loss: x.order(),
            order: x.order(),
        });
    }
    let mut p = AbElement::term(0, k, Scalar::one(), w);
    for (j, cj) in c.iter().enumerate() {
        for m in 0..cj.order() {
            let co = cj.coeff(m);
            if !co.is_zero() {
                p = p.sub(&AbElement::term(m, j, co.clone(), w));
            }
        }
    }
    Ok((p, eff))
}

/// The Jordan-Hoelder filtration of the module generated by `x`,
/// bottom-up: stage j (0-based) holds a generator of F_{j+1} and the
/// exponent of F_{j+1}/F_j.
///
/// The descent from rank k to rank k-1 kills the top log component: the
/// syzygies of the top components of a^i·x form a C[[b]]-basis of the
/// corank-one submodule, which must again be monogenic.
pub fn jh_filtration(x: &XiElement) -> Result<Vec<JhStage>> {
    let mut cur = x.clone();
    let mut rev: Vec<JhStage> = Vec::new();
    loop {
        let top = cur.top_log_index().ok_or(Error::ZeroGenerator)?;
        let v = cur
            .comp(top)
            .valuation()
            .expect("top log component is nonzero");
        let exponent = cur.lambda0().clone() + rat_usize(v);
        rev.push(JhStage {
            generator: cur.clone(),
            exponent,
        });
        if top == 0 {
            break;
        }
        let kc = top + 1;
        let mut apows: Vec<XiElement> = Vec::with_capacity(kc);
        apows.push(cur.clone());
        for _ in 1..kc {
            apows.push(apows.last().unwrap().act_a());
        }
        // reference index: minimal valuation of the top component
        let mut jstar = None;
        for (i, e) in apows.iter().enumerate() {
            if let Some(vv) = e.comp(top).valuation() {
                let better = match jstar {
                    None => true,
                    Some((_, bv)) => vv < bv,
                };
                if better {
                    jstar = Some((i, vv));
                }
            }
        }
        let (jstar, _) = jstar.ok_or_else(|| {
            Error::DerivationFault("all top components vanish during descent".into())
        })?;
        let mut subs: Vec<XiElement> = Vec::with_capacity(kc - 1);
        for (i, e) in apows.iter().enumerate() {
            if i == jstar {
                continue;
            }
            if e.comp(top).is_zero() {
                subs.push(XiElement::new(
                    e.lambda0().clone(),
                    e.comps()[..top].to_vec(),
                )?);
                continue;
            }
            let q = e.comp(top).div(apows[jstar].comp(top))?;
            let red = e.sub(&apows[jstar].mul_series(&q));
            if !red.comp(top).is_zero() {
                return Err(Error::DerivationFault(
                    "top log component survives the syzygy reduction".into(),
                ));
            }
            subs.push(XiElement::new(
                red.lambda0().clone(),
                red.comps()[..top].to_vec(),
            )?);
        }
        // a-action matrix on the syzygy basis
        let refs: Vec<&XiElement> = subs.iter().collect();
        let kk = subs.len();
        let order = subs.iter().map(XiElement::order).min().unwrap_or(0);
        let mut amat = vec![vec![TruncSeries::zero(VarTag::B, order); kk]; kk];
        for (j, s) in subs.iter().enumerate() {
            let (col, _) = express_in_span(&s.act_a(), &refs)?;
            for (i, ci) in col.into_iter().enumerate() {
                amat[i][j] = ci;
            }
        }
        let module = MatrixModule::new(amat);
        let (dim, wit) = module.monogenic_witness()?;
        if dim != 1 {
            return Err(Error::NotATheme(format!(
                "corank-one submodule needs {dim} generators"
            )));
        }
        cur = subs[wit.expect("dim 1 yields a witness")].clone();
    }
    rev.reverse();
    Ok(rev)
}

/// Full rank-2 data of a generator with top log index 1: both exponents,
/// the gap p_1, the normalized unit S of the standard presentation
/// (a - lambda_1·b)·S^{-1}·(a - lambda_2·b) and, when p_1 >= 1, the
/// principal parameter alpha = S[p_1].
#[derive(Debug, Clone)]
pub struct Rank2Data {
    pub lambda1: Rat,
    pub lambda2: Rat,
    pub p1: usize,
    pub alpha: Option<Scalar>,
    pub unit: TruncSeries,
    pub annihilator: AbElement,
    pub effective_order: usize,
}

/// Peels the right factor a - lambda_2·b off a monic degree-2 annihilator
/// and reconstructs the unit S (normalized to S(0) = 1) from the quotient
/// a + q0(b): q0 = -lambda_1·b - b^2·S'/S.
pub fn extract_rank2_from_annihilator(
    p: &AbElement,
    lambda2: &Rat,
) -> Result<(Rat, TruncSeries)> {
    let (q, r) = right_divide_linear(p, &Scalar::from_rat(lambda2.clone()));
    if !r.is_zero() {
        return Err(Error::NotATheme(
            "annihilator is not right-divisible by a - lambda2*b".into(),
        ));
    }
    if q.a_degree() != Some(1) {
        return Err(Error::RankMismatch { rank: 2 });
    }
    let lead = q.coeff_series(1);
    if !lead.eq_trunc(&TruncSeries::one(VarTag::B, lead.order())) {
        return Err(Error::DerivationFault(
            "quotient of a monic annihilator is not monic".into(),
        ));
    }
    // dividing by a weight-1 factor loses one weight: the quotient
    // coefficient is reliable only below weight_cap - 1
    let q0 = q
        .coeff_series(0)
        .truncate(q.weight_cap().saturating_sub(1));
    if q0.order() > 0 && !q0.coeff(0).is_zero() {
        return Err(Error::NotATheme(
            "quotient has a nonzero constant term".into(),
        ));
    }
    if q0.order() < 2 {
        return Err(Error::OrderInsufficient(q0.order(), 2));
    }
    let neg = q0.coeff(1).neg();
    let lambda1 = neg
        .as_rational()
        .cloned()
        .ok_or_else(|| Error::NotATheme("non-rational exponent".into()))?;
    let numer = q0.add(
        &TruncSeries::gen(VarTag::B, q0.order()).scale(&Scalar::from_rat(lambda1.clone())),
    );
    let h = numer.neg().shr(2)?; // S'/S
    let s = h.primitive().exp()?;
    Ok((lambda1, s))
}

/// Rank-2 analysis of a generator with top log index 1.
pub fn extract_rank2_parameter(x: &XiElement) -> Result<Rank2Data> {
    if x.top_log_index() != Some(1) {
        return Err(Error::RankMismatch { rank: 2 });
    }
    let v2 = x.comp(1).valuation().expect("top component is nonzero");
    let lambda2 = x.lambda0().clone() + rat_usize(v2);
    // adapt the generator: a unit-series multiple makes the top log
    // component an exact monomial, so that a - lambda2*b kills it
    let g1 = x.comp(1);
    let mut mono = TruncSeries::zero(VarTag::B, x.order());
    mono.set_coeff(v2, g1.coeff(v2).clone());
    let adapted = if g1.eq_trunc(&mono) {
        x.clone()
    } else {
        x.mul_series(&mono.div(g1)?)
    };
    let (p, eff) = annihilator_of(&adapted, 2)?;
    let (lambda1, unit) = extract_rank2_from_annihilator(&p, &lambda2)?;
    let diff = lambda2.clone() - lambda1.clone() + Rat::one();
    if !diff.is_integer() || diff.is_negative() {
        return Err(Error::NotATheme(format!(
            "lambda2 - lambda1 + 1 = {diff} is not a natural number"
        )));
    }
    let p1 = diff
        .to_integer()
        .try_into()
        .map_err(|_| Error::NotATheme("gap overflows".into()))?;
    let alpha = if p1 == 0 {
        None
    } else {
        if p1 >= unit.order() {
            return Err(Error::OrderInsufficient(unit.order(), p1 + 1));
        }
        let a = unit.coeff(p1).clone();
        if a.is_zero() {
            return Err(Error::NotATheme(
                "principal coefficient of the unit vanishes".into(),
            ));
        }
        Some(a)
    };
    Ok(Rank2Data {
        lambda1,
        lambda2,
        p1,
        alpha,
        unit,
        annihilator: p,
        effective_order: eff,
    })
}

/// Full analysis of the monogenic module generated by `x`: rank,
/// Jordan-Hoelder exponents, gaps, principal parameters (from the rank-2
/// quotients F_{j+1}/F_{j-1}) and the monic annihilator.
pub fn analyze(x: &XiElement) -> Result<ThemeReport> {
    let stages = jh_filtration(x)?;
    let k = stages.len();
    let exponents: Vec<Rat> = stages.iter().map(|s| s.exponent.clone()).collect();
    let mut gaps: Vec<usize> = Vec::with_capacity(k.saturating_sub(1));
    for j in 0..k.saturating_sub(1) {
        let diff = exponents[j + 1].clone() - exponents[j].clone() + Rat::one();
        if !diff.is_integer() || diff.is_negative() {
            return Err(Error::NotATheme(format!(
                "lambda_{} - lambda_{} + 1 = {diff} is not a natural number",
                j + 2,
                j + 1
            )));
        }
        gaps.push(
            diff.to_integer()
                .try_into()
                .map_err(|_| Error::NotATheme("gap overflows".into()))?,
        );
    }
    let (annihilator, mut eff) = annihilator_of(x, k)?;
    let mut params: Vec<Option<Scalar>> = Vec::with_capacity(k.saturating_sub(1));
    for j in 1..k {
        let g = &stages[j].generator;
        // quotient F_{j+1}/F_{j-1}: log components j-1 and j survive
        let quot = XiElement::new(
            g.lambda0().clone(),
            vec![g.comp(j - 1).clone(), g.comp(j).clone()],
        )?;
        let data = extract_rank2_parameter(&quot)?;
        if data.lambda1 != exponents[j - 1] || data.lambda2 != exponents[j] {
            return Err(Error::DerivationFault(
                "quotient exponents disagree with the filtration".into(),
            ));
        }
        if data.p1 != gaps[j - 1] {
            return Err(Error::DerivationFault(
                "quotient gap disagrees with the filtration".into(),
            ));
        }
        eff = eff.min(data.effective_order);
        params.push(data.alpha);
    }
    let mut assumptions = Vec::new();
    if exponents[0] <= Rat::one() {
        assumptions.push(
            "lambda_1 <= 1: outside the hypothesis lambda_1 > 1 of the rank-2 classification"
                .to_string(),
        );
    }
    Ok(ThemeReport {
        rank: k,
        lambda0: x.lambda0().clone(),
        exponents,
        gaps,
        params,
        annihilator,
        effective_order: eff,
        assumptions,
    })
}

/// Runs the analysis at `order` and again at `order + margin`; the two
/// results must agree on all order-independent data, otherwise the working
/// order is deemed insufficient.
pub fn analyze_checked<F>(build: F, order: usize, margin: usize) -> Result<ThemeReport>
where
    F: Fn(usize) -> Result<XiElement>,
{
    let r1 = analyze(&build(order)?)?;
    let r2 = analyze(&build(order + margin)?)?;
    if !r1.data_eq(&r2) {
        return Err(Error::OrderInsufficient(order, order + margin));
    }
    Ok(r1)
}

/// The rank-3 family
/// e = s^{l-1}(Log s)^2/2 + xi(b)s^{l-1}Log s + (eta0+eta1 b)s^{l-3}
///     + zeta(b)s^{l-1},
/// with l in 2 + Q^{+*} and eta0 != 0, written over lambda0 = l - 2.
#[derive(Debug, Clone)]
pub struct Rank3FamilySpec {
    pub lambda: Rat,
    pub xi: TruncSeries,
    pub zeta: TruncSeries,
    pub eta0: Scalar,
    pub eta1: Scalar,
}

impl Rank3FamilySpec {
    pub fn new(
        lambda: Rat,
        xi: TruncSeries,
        zeta: TruncSeries,
        eta0: Scalar,
        eta1: Scalar,
    ) -> Result<Self> {
        if lambda <= rat_usize(2) {
            return Err(Error::Invalid("lambda must lie in 2 + Q^{+*}".into()));
        }
        if eta0.is_zero() {
            return Err(Error::Invalid("eta0 must be nonzero".into()));
        }
        Ok(Rank3FamilySpec {
            lambda,
            xi,
            zeta,
            eta0,
            eta1,
        })
    }

    /// The generator as an element of Xi_{lambda-2}^{(2)}. The series xi
    /// and zeta are taken as exact polynomial data and padded with zeros
    /// up to `order`.
    pub fn generator(&self, order: usize) -> XiElement {
        let l0 = self.lambda.clone() - rat_usize(2);
        let x22 = monomial_to_abstract(l0.clone(), 2, 2, 3, order);
        let x21 = monomial_to_abstract(l0.clone(), 2, 1, 3, order);
        let x20 = monomial_to_abstract(l0.clone(), 2, 0, 3, order);
        let x0 = XiElement::basis(l0, 0, 3, order);
        let eta = TruncSeries::new(
            VarTag::B,
            vec![self.eta0.clone(), self.eta1.clone()],
        )
        .pad_to(order);
        x22.add(&x21.mul_series(&self.xi.pad_to(order)))
            .add(&x0.mul_series(&eta))
            .add(&x20.mul_series(&self.zeta.pad_to(order)))
    }
}

/// The normal-form data of a rank-3 family member: the coefficients u and
/// alpha of the presentation
/// (a - l·b)(1 + u·b + alpha·b^2 + ...)^{-1}(a - (l+1)·b)(a - l·b).
#[derive(Debug, Clone)]
pub struct Rank3Analysis {
    pub u: Scalar,
    pub alpha: Scalar,
    pub unit: TruncSeries,
    pub report: ThemeReport,
}

/// Normal form of the rank-3 family: peels the two right linear factors
/// off the generator, expands the log-free result in function monomials
/// and reads off the unit S with u = S[1] + xi'(0), alpha = S[2].
///
/// Internal consistency is checked aggressively: the log components of
/// the reduced element must vanish, the coefficient of s^{l+1} must
/// collapse to the data-independent constant 1/(l(l+1)), and u, alpha
/// must match their closed forms 4·eta0·u = eta1 + 2·eta0·xi'(0) and
/// 4·eta0·alpha = (l-1)(l-2). (The closed forms are re-derived from the
/// adapted-generator construction and verified against the pipeline;
/// alpha is independent of xi and zeta, u shifts by xi'(0)/2.)
pub fn rank3_family_analysis(spec: &Rank3FamilySpec, order: usize) -> Result<Rank3Analysis> {
    if order < 5 {
        return Err(Error::OrderInsufficient(order, 5));
    }
    let e = spec.generator(order);
    let report = analyze(&e)?;
    let lam = &spec.lambda;
    let expected = vec![lam.clone(), lam.clone() + Rat::one(), lam.clone()];
    if report.exponents != expected || report.gaps != vec![2, 0] {
        return Err(Error::NotATheme(
            "family generator has unexpected invariants".into(),
        ));
    }
    let lam_s = Scalar::from_rat(lam.clone());
    let xid = spec.xi.pad_to(order + 1).derivative();
    let one_plus = TruncSeries::one(VarTag::B, order).add(&xid.shl(1).truncate(order));
    let inv = one_plus.invert()?;
    let step = |y: &XiElement, nu: &Scalar| y.act_a().sub(&y.act_b().scale(nu));
    let e2 = step(&e, &lam_s).mul_series(&inv);
    let f = step(&e2, &Scalar::from_rat(lam.clone() + Rat::one()));
    let d = to_function_monomials(&f);
    for (m, row) in d.iter().enumerate() {
        for (i, c) in row.iter().enumerate() {
            if i >= 1 && !c.is_zero() {
                return Err(Error::DerivationFault(format!(
                    "log component survives the reduction at (m={m}, i={i})"
                )));
            }
        }
    }
    let ut = d[2][0].clone();
    if ut.is_zero() {
        return Err(Error::DerivationFault(
            "leading coefficient of the reduced element vanishes".into(),
        ));
    }
    // the coefficient of s^{l+1} collapses to a constant independent of
    // the family data
    let w_expect = Scalar::from_rat(
        Rat::one() / (lam.clone() * (lam.clone() + Rat::one())),
    );
    if d[4][0] != w_expect {
        return Err(Error::DerivationFault(format!(
            "coefficient of s^(lambda+1) is {} instead of 1/(lambda(lambda+1))",
            d[4][0]
        )));
    }
    let s_order = f.order().saturating_sub(2);
    let mut s_coeffs = Vec::with_capacity(s_order);
    for m in 0..s_order {
        let c = d[m + 2][0].mul(&Scalar::from_rat(pochhammer(lam, m)));
        s_coeffs.push(c.checked_div(&ut)?);
    }
    let s = TruncSeries::new(VarTag::B, s_coeffs);
    if !s.coeff(0).is_one() {
        return Err(Error::DerivationFault(
            "normalized unit has a constant term different from 1".into(),
        ));
    }
    let u = s.coeff(1).add(xid.coeff(0));
    let alpha = s.coeff(2).clone();
    // closed forms from the family data: 4·eta0·u = eta1 + 2·eta0·xi'(0)
    // (the xi'(0) shift is forced by the adapted-triple construction; it
    // cancels only when xi'(0) = 0)
    let four_eta0 = spec.eta0.mul(&Scalar::from_int(4));
    let u_cf = spec
        .eta1
        .add(&spec.eta0.mul(&Scalar::from_int(2)).mul(xid.coeff(0)))
        .checked_div(&four_eta0)?;
    let a_cf = Scalar::from_rat((lam.clone() - Rat::one()) * (lam.clone() - rat_usize(2)))
        .checked_div(&four_eta0)?;
    if u != u_cf || alpha != a_cf {
        return Err(Error::DerivationFault(
            "normal form disagrees with its closed form".into(),
        ));
    }
    // the principal parameter alpha_1 coincides with the normal-form alpha
    if report.params.first() != Some(&Some(alpha.clone())) {
        return Err(Error::DerivationFault(
            "principal parameter disagrees with the normal form".into(),
        ));
    }
    Ok(Rank3Analysis {
        u,
        alpha,
        unit: s,
        report,
    })
}

/// Rewrites `x` over the smallest base exponent with a nonzero function
/// monomial: the same element of Xi, viewed in Xi_{lambda0 + m0}.
pub fn rebase_to_min(x: &XiElement) -> Result<XiElement> {
    let d = to_function_monomials(x);
    let m0 = d
        .iter()
        .position(|row| row.iter().any(|c| !c.is_zero()))
        .ok_or(Error::ZeroGenerator)?;
    if m0 == 0 {
        return Ok(x.clone());
    }
    let l0 = x.lambda0().clone() + rat_usize(m0);
    Ok(from_function_monomials(
        &d[m0..],
        l0,
        x.log_bound(),
        x.order() - m0,
    ))
}

/// Recognizes an arbitrary generator of a rank-3 family member: rebases
/// to the minimal exponent, normalizes the top log component by a unit,
/// and reads off the family data (xi, zeta, eta0, eta1) by exact
/// decomposition. Returns the recognized data and its normal form.
pub fn rank3_extract(x: &XiElement) -> Result<(Rank3FamilySpec, Rank3Analysis)> {
    if x.top_log_index() != Some(2) {
        return Err(Error::RankMismatch { rank: 3 });
    }
    let x = x.with_log_bound(3);
    let y = rebase_to_min(&x)?;
    let n = y.order();
    let l0 = y.lambda0().clone();
    let v2 = y.comp(2).valuation().ok_or(Error::ZeroGenerator)?;
    if v2 != 2 {
        return Err(Error::NotATheme(
            "top log component does not start at b^2 after rebasing".into(),
        ));
    }
    let poch2 = Scalar::from_rat(pochhammer(&l0, 2));
    let mut b2 = TruncSeries::zero(VarTag::B, n);
    b2.set_coeff(2, poch2.clone());
    // unit normalization: force the top component to lambda0(lambda0+1)b^2
    let w = b2.div(y.comp(2))?;
    let y = y.mul_series(&w);
    let n = y.order();
    let r22 = monomial_to_abstract(l0.clone(), 2, 2, 3, n);
    let r21 = monomial_to_abstract(l0.clone(), 2, 1, 3, n);
    let h1 = y.comp(1).sub(r22.comp(1));
    let xi = if h1.is_zero() {
        TruncSeries::zero(VarTag::B, n.saturating_sub(2))
    } else {
        if h1.valuation().map(|v| v < 2).unwrap_or(false) {
            return Err(Error::NotATheme(
                "middle log component is not in family form".into(),
            ));
        }
        h1.shr(2)?.scale(&poch2.inverse()?)
    };
    let r0 = y
        .comp(0)
        .sub(r22.comp(0))
        .sub(&xi.mul(r21.comp(0)));
    let eta0 = r0.coeff(0).clone();
    let eta1 = r0.coeff(1).clone();
    let mut tail = r0.clone();
    tail.set_coeff(0, Scalar::zero());
    tail.set_coeff(1, Scalar::zero());
    let zeta = if tail.is_zero() {
        TruncSeries::zero(VarTag::B, tail.order().saturating_sub(2))
    } else {
        tail.shr(2)?.scale(&poch2.inverse()?)
    };
    let lambda = l0 + rat_usize(2);
    let spec = Rank3FamilySpec::new(lambda, xi, zeta, eta0, eta1)?;
    // the recognized data must rebuild the normalized generator exactly
    let ord = spec
        .xi
        .order()
        .min(spec.zeta.order())
        .min(n);
    let rebuilt = spec.generator(ord);
    if !rebuilt.sub(&y.truncate(ord)).is_zero() {
        return Err(Error::DerivationFault(
            "family decomposition does not rebuild the generator".into(),
        ));
    }
    let analysis = rank3_family_analysis(&spec, ord)?;
    Ok((spec, analysis))
}

/// The quotient module A / A·P as a free C[[b]]-module with basis
/// eps_j = a^j·eps_0: the companion-matrix a-action of the monic
/// normalization of P.
pub fn theme_from_presentation(p: &AbElement, order: usize) -> Result<MatrixModule> {
    let monic = p.monic()?;
    let k = monic.a_degree().ok_or(Error::ZeroGenerator)?;
    if k == 0 {
        return Err(Error::ZeroGenerator);
    }
    if monic.weight_cap() < order + k {
        return Err(Error::InsufficientWeightCap {
            needed: order + k,
            have: monic.weight_cap(),
        });
    }
    let mut a = vec![vec![TruncSeries::zero(VarTag::B, order); k]; k];
    for j in 0..k - 1 {
        a[j + 1][j] = TruncSeries::one(VarTag::B, order);
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[k - 1] = monic.coeff_series(i).neg().truncate(order);
    }
    Ok(MatrixModule::new(a))
}

/// Divisors of a positive integer, by trial division.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= *n {
        if (n % &i).is_zero() {
            out.push(i.clone());
            out.push(n / &i);
        }
        i += 1;
    }
    out
}

/// All rational roots of a polynomial with rational coefficients
/// (ascending order), by the rational root theorem.
fn rational_roots(poly: &[Rat]) -> Vec<Rat> {
    let mut c: Vec<Rat> = poly.to_vec();
    while c.last().map(|x| x.is_zero()).unwrap_or(false) {
        c.pop();
    }
    let mut roots = Vec::new();
    if c.len() <= 1 {
        return roots;
    }
    let v = c
        .iter()
        .position(|x| !x.is_zero())
        .expect("nonzero polynomial");
    if v > 0 {
        roots.push(Rat::zero());
        c.drain(..v);
    }
    if c.len() <= 1 {
        return roots;
    }
    let denom_lcm = c
        .iter()
        .fold(BigInt::one(), |acc, x| lcm(acc, x.denom().clone()));
    let scale = Rat::from_integer(denom_lcm);
    let ints: Vec<BigInt> = c.iter().map(|x| (x * &scale).to_integer()).collect();
    let a0 = ints[0].abs();
    let an = ints.last().unwrap().abs();
    let eval = |x: &Rat| -> Rat {
        let mut acc = Rat::zero();
        for co in c.iter().rev() {
            acc = acc * x + co;
        }
        acc
    };
    for p in divisors(&a0) {
        for q in divisors(&an) {
            for sign in [1i64, -1] {
                let cand = Rat::new(&p * BigInt::from(sign), q.clone());
                if !roots.contains(&cand) && eval(&cand).is_zero() {
                    roots.push(cand.clone());
                }
            }
        }
    }
    roots
}

/// Realizes a generator of the theme presented by a (rational-coefficient)
/// annihilator: finds the primitivity class from the indicial equation and
/// solves P·phi = 0 inside Xi_{mu0}^{(k-1)} by exact linear algebra,
/// picking a solution of full log degree with minimal top valuation.
pub fn realize_annihilator(p: &AbElement, order: usize) -> Result<XiElement> {
    // left multiplication by a unit series does not change the kernel, so
    // no monic normalization is needed (and none may exist: the pushforward
    // of a polynomial presentation is an a-series whose truncation can have
    // a non-unit coefficient in top a-degree)
    p.a_degree().ok_or(Error::ZeroGenerator)?;
    for (_, c) in p.terms() {
        if c.as_rational().is_none() {
            return Err(Error::Invalid(
                "annihilator analysis needs rational coefficients".into(),
            ));
        }
    }
    // indicial polynomial at the lowest nonzero weight n:
    // g_n(mu) = sum over nu+j=n of c_{nu,j}·mu(mu+1)...(mu+j-1)
    let cap = p.weight_cap();
    let mut indicial: Option<Vec<Rat>> = None;
    for n in 0..cap {
        let mut g = vec![Rat::zero(); n + 2];
        for j in 0..=n {
            let c = p.coeff_of(n - j, j);
            let Some(c) = c.as_rational() else { continue };
            if c.is_zero() {
                continue;
            }
            // pochhammer polynomial mu(mu+1)...(mu+j-1), ascending
            let mut pp = vec![Rat::one()];
            for i in 0..j {
                let shift = rat_usize(i);
                let mut next = vec![Rat::zero(); pp.len() + 1];
                for (deg, co) in pp.iter().enumerate() {
                    next[deg + 1] += co;
                    next[deg] += co * &shift;
                }
                pp = next;
            }
            for (deg, co) in pp.iter().enumerate() {
                g[deg] += co * c;
            }
        }
        if g.iter().any(|x| !x.is_zero()) {
            indicial = Some(g);
            break;
        }
    }
    let indicial = indicial.ok_or(Error::ZeroGenerator)?;
    // the rank of the theme is the degree of the indicial polynomial, not
    // the a-degree of the annihilator: a change of variable turns a - l·b
    // into a full series in a, but scales the lowest-weight graded piece
    // by a power of theta'(0), preserving the indicial equation
    let k = indicial
        .iter()
        .rposition(|c| !c.is_zero())
        .ok_or(Error::ZeroGenerator)?;
    if k == 0 {
        return Err(Error::NotATheme(
            "indicial polynomial is a nonzero constant: no solutions".into(),
        ));
    }
    let roots = rational_roots(&indicial);
    if roots.is_empty() {
        return Err(Error::NotATheme(
            "indicial equation has no rational root".into(),
        ));
    }
    // primitivity class mu0 in (0, 1]
    let class_of = |r: &Rat| -> Rat {
        let f = r - r.floor();
        if f.is_zero() {
            Rat::one()
        } else {
            f
        }
    };
    let mu0 = class_of(&roots[0]);
    for r in &roots[1..] {
        if class_of(r) != mu0 {
            return Err(Error::NotATheme(
                "indicial roots span several primitivity classes".into(),
            ));
        }
    }
    // kernel of P acting on Xi_{mu0}^{(k-1)} truncated at b-order `order`
    let dim = k * order;
    let idx = |j: usize, m: usize| j * order + m;
    let mut rows = vec![vec![Scalar::zero(); dim]; dim];
    for j in 0..k {
        let base = XiElement::basis(mu0.clone(), j, k, order);
        for m in 0..order {
            let mut el = base.clone();
            if m > 0 {
                let mut bm = TruncSeries::zero(VarTag::B, order);
                bm.set_coeff(m, Scalar::one());
                el = el.mul_series(&bm);
            }
            let img = el.act_ab(p);
            for jj in 0..k {
                for mm in 0..order {
                    rows[idx(jj, mm)][idx(j, m)] = img.comp(jj).coeff(mm).clone();
                }
            }
        }
    }
    let (_, kernel) = scalar_nullspace(&rows)?;
    // pick a kernel element whose top log component has minimal valuation
    let mut best: Option<(XiElement, usize)> = None;
    for v in &kernel {
        let comps: Vec<TruncSeries> = (0..k)
            .map(|j| {
                TruncSeries::new(VarTag::B, (0..order).map(|m| v[idx(j, m)].clone()).collect())
            })
            .collect();
        let el = XiElement::new(mu0.clone(), comps)?;
        if el.top_log_index() != Some(k - 1) {
            continue;
        }
        let val = el.comp(k - 1).valuation().unwrap();
        if best.as_ref().map(|(_, bv)| val < *bv).unwrap_or(true) {
            best = Some((el, val));
        }
    }
    let (gen, _) = best.ok_or(Error::RankMismatch { rank: k })?;
    Ok(gen)
}

/// Analysis of a theme given only by its annihilator: realizes a generator
/// and analyzes it.
pub fn analyze_annihilator(p: &AbElement, order: usize) -> Result<ThemeReport> {
    analyze(&realize_annihilator(p, order)?)
}

/// A saturated lattice: the simple-pole module E^sharp containing E with
/// E^sharp inside b^{-shift}·E.
#[derive(Debug, Clone)]
pub struct Saturation {
    pub module: MatrixModule,
    pub shift: usize,
}

fn act_shifted(e: &MatrixModule, v: &[TruncSeries], d: usize) -> Vec<TruncSeries> {
    let mut w = e.act_a(v);
    if d > 0 {
        let ds = Scalar::from_int(d as i64);
        for (wi, vi) in w.iter_mut().zip(v) {
            let n = wi.order();
            *wi = wi.sub(&vi.shl(1).truncate(n).scale(&ds));
        }
    }
    w
}

/// Column triangularization of a generating family over the discrete
/// valuation ring C[[b]]: picks the globally minimal-valuation entry as a
/// pivot, clears its row from the other columns, and repeats until a
/// basis of `k` columns remains.
fn lattice_reduce(cand: Vec<Vec<TruncSeries>>, k: usize) -> Result<Vec<Vec<TruncSeries>>> {
    let mut active: Vec<Vec<TruncSeries>> = cand
        .into_iter()
        .filter(|c| c.iter().any(|s| !s.is_zero()))
        .collect();
    let mut result: Vec<Vec<TruncSeries>> = Vec::with_capacity(k);
    let mut used = vec![false; k];
    while result.len() < k {
        let mut best: Option<(usize, usize, usize, bool)> = None;
        for (ci, col) in active.iter().enumerate() {
            for (row, &u) in used.iter().enumerate() {
                if u {
                    continue;
                }
                if let Some(v) = col[row].valuation() {
                    let unit = col[row].coeff(v).is_unit();
                    let better = match &best {
                        None => true,
                        Some((_, _, bv, bu)) => v < *bv || (v == *bv && unit && !bu),
                    };
                    if better {
                        best = Some((ci, row, v, unit));
                    }
                }
            }
        }
        let Some((ci, row, _, _)) = best else {
            return Err(Error::DerivationFault(
                "lattice generating family is rank deficient".into(),
            ));
        };
        let pivot = active.swap_remove(ci);
        let mut next = Vec::with_capacity(active.len());
        for mut col in active {
            if !col[row].is_zero() {
                let q = col[row].div(&pivot[row])?;
                for i in 0..k {
                    col[i] = col[i].sub(&q.mul(&pivot[i]));
                }
                let n = col[row].order();
                col[row] = TruncSeries::zero(col[row].var(), n);
            }
            if col.iter().any(|s| !s.is_zero()) {
                next.push(col);
            }
        }
        active = next;
        used[row] = true;
        result.push(pivot);
    }
    Ok(result)
}

/// Saturation of a regular lattice: iteratively adjoins b^{-1}·a of the
/// current generators (shifting the pole reference when a constant term
/// appears) until the lattice is a-stable after division by b, then
/// expresses the a-action in the saturated basis.
pub fn saturate(e: &MatrixModule) -> Result<Saturation> {
    let k = e.rank();
    let n = e.order();
    let mut d = 0usize;
    let mut cols: Vec<Vec<TruncSeries>> = (0..k)
        .map(|j| {
            (0..k)
                .map(|i| {
                    if i == j {
                        TruncSeries::one(VarTag::B, n)
                    } else {
                        TruncSeries::zero(VarTag::B, n)
                    }
                })
                .collect()
        })
        .collect();
    for _ in 0..(k * n + 2) {
        let ws: Vec<Vec<TruncSeries>> = cols.iter().map(|c| act_shifted(e, c, d)).collect();
        let needs_shift = ws
            .iter()
            .flatten()
            .any(|s| s.valuation() == Some(0));
        let new_gens: Vec<Vec<TruncSeries>> = if needs_shift {
            // move the reference pole: the new columns are b times the old
            // ones, and b^{-1}·a of a new column equals the old image
            d += 1;
            cols = cols
                .iter()
                .map(|c| c.iter().map(|s| s.shl(1).truncate(n)).collect())
                .collect();
            ws
        } else {
            ws.iter()
                .map(|c| c.iter().map(|s| s.shr(1)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?
        };
        if !needs_shift {
            let rows: Vec<Vec<TruncSeries>> = (0..k)
                .map(|i| (0..k).map(|j| cols[j][i].clone()).collect())
                .collect();
            let stable = new_gens
                .iter()
                .all(|g| series_solve(&rows, g).is_ok());
            if stable {
                let mut amat = vec![vec![TruncSeries::zero(VarTag::B, n); k]; k];
                for (j, c) in cols.iter().enumerate() {
                    let w = act_shifted(e, c, d);
                    let (x, _) = series_solve(&rows, &w)?;
                    for (i, xi) in x.into_iter().enumerate() {
                        amat[i][j] = xi;
                    }
                }
                let m = MatrixModule::new(amat);
                if !m.is_simple_pole() {
                    return Err(Error::NotRegular);
                }
                return Ok(Saturation { module: m, shift: d });
            }
        }
        let mut cand = cols.clone();
        cand.extend(new_gens);
        cols = lattice_reduce(cand, k)?;
    }
    Err(Error::NotRegular)
}

/// det(x·I - A) for a scalar matrix, by the Faddeev-LeVerrier recursion;
/// coefficients ascending in x.
fn char_poly(a: &[Vec<Scalar>]) -> Result<Vec<Scalar>> {
    let k = a.len();
    let mut coeffs = vec![Scalar::zero(); k + 1];
    coeffs[k] = Scalar::one();
    let mut m = a.to_vec();
    for step in 1..=k {
        let tr = (0..k).fold(Scalar::zero(), |acc, i| acc.add(&m[i][i]));
        let c = tr.neg().checked_div(&Scalar::from_int(step as i64))?;
        coeffs[k - step] = c.clone();
        if step < k {
            let mut mc = m.clone();
            for (i, row) in mc.iter_mut().enumerate() {
                row[i] = row[i].add(&c);
            }
            let mut next = vec![vec![Scalar::zero(); k]; k];
            for i in 0..k {
                for j in 0..k {
                    for (l, mrow) in mc.iter().enumerate() {
                        next[i][j] = next[i][j].add(&a[i][l].mul(&mrow[j]));
                    }
                }
            }
            m = next;
        }
    }
    Ok(coeffs)
}

/// The Bernstein polynomial of a regular module:
/// det(x·I + M0) where M0 is the residue of b^{-1}·a on the saturation.
/// Coefficients ascending in x; monic of degree equal to the rank.
pub fn bernstein_polynomial(e: &MatrixModule) -> Result<Vec<Scalar>> {
    let sat = saturate(e)?;
    let k = sat.module.rank();
    let mut neg_m0 = vec![vec![Scalar::zero(); k]; k];
    for (i, row) in neg_m0.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let s = &sat.module.matrix()[i][j];
            if s.order() < 2 {
                return Err(Error::OrderInsufficient(s.order(), 2));
            }
            // entries have valuation >= 1: the residue is the b-coefficient
            *entry = s.coeff(1).neg();
        }
    }
    char_poly(&neg_m0)
}

/// Rank-2 themes are classified by (lambda_1, p_1, alpha_1): two reports
/// describe isomorphic themes exactly when these agree.
pub fn isomorphism_test_rank2(r1: &ThemeReport, r2: &ThemeReport) -> Result<bool> {
    if r1.rank != 2 || r2.rank != 2 {
        return Err(Error::Invalid(
            "isomorphism test only covers rank 2".into(),
        ));
    }
    Ok(r1.exponents == r2.exponents && r1.gaps == r2.gaps && r1.params == r2.params)
}

/// Outcome of comparing two members of the rank-3 family by their
/// normal-form data (u, alpha).
#[derive(Debug, Clone)]
pub struct Rank3Comparison {
    pub isomorphic: bool,
    pub assumptions: Vec<String>,
}

/// Compares two rank-3 family members through their normal-form data
/// (u, alpha) and fundamental invariants. Distinct data is reported as
/// non-isomorphic under the uniqueness property of this family: the pair
/// (u, alpha) determines the isomorphism class (an external criterion,
/// recorded as an assumption rather than re-derived here).
pub fn isomorphism_test_rank3(a: &Rank3Analysis, b: &Rank3Analysis) -> Rank3Comparison {
    let data_equal = a.report.data_eq(&b.report) && a.u == b.u && a.alpha == b.alpha;
    let mut assumptions = Vec::new();
    if !data_equal {
        assumptions.push(
            "non-isomorphic under the uniqueness assumption that the (u, alpha) \
             normal form determines the isomorphism class of this rank-3 family"
                .to_string(),
        );
    }
    Rank3Comparison {
        isomorphic: data_equal,
        assumptions,
    }
}
