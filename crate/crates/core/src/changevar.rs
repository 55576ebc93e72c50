//! The change-of-variable functor at every level: presentations, matrix
//! modules, and elements of Xi, together with the basis-rebase series
//! (chi_n, S_theta, S_l) and the verification harnesses for the
//! invariance of the fundamental invariants and the transformation law
//! of the principal parameters.

use std::fmt;

use crate::abalg::{theta_endomorphism, AbElement, ChangeOfVariable};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{TruncSeries, VarTag};
use crate::theme::{analyze, analyze_annihilator, ThemeReport};
use crate::ximodel::{
    express_in_span, from_function_monomials, to_function_monomials, MatrixModule,
    XiElement,
};

fn unit_vector(k: usize, i: usize, order: usize) -> Vec<TruncSeries> {
    (0..k)
        .map(|j| {
            if j == i {
                TruncSeries::one(VarTag::B, order)
            } else {
                TruncSeries::zero(VarTag::B, order)
            }
        })
        .collect()
}

fn vec_sub(a: &[TruncSeries], b: &[TruncSeries]) -> Vec<TruncSeries> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

fn vec_scale(a: &[TruncSeries], c: &Scalar) -> Vec<TruncSeries> {
    a.iter().map(|x| x.scale(c)).collect()
}

fn vec_is_zero(a: &[TruncSeries]) -> bool {
    a.iter().all(TruncSeries::is_zero)
}

/// Applies a series in the a-action to a coordinate vector:
/// s(a)·v = sum_m s_m·a^m·v.
fn apply_a_series(e: &MatrixModule, s: &TruncSeries, v: &[TruncSeries]) -> Vec<TruncSeries> {
    let k = e.rank();
    let order = v.iter().map(TruncSeries::order).min().unwrap_or(0);
    let mut out = vec![TruncSeries::zero(VarTag::B, order); k];
    let mut cur = v.to_vec();
    for m in 0..s.order() {
        let c = s.coeff(m);
        if !c.is_zero() {
            out = out
                .iter()
                .zip(&cur)
                .map(|(acc, x)| acc.add(&x.scale(c)))
                .collect();
        }
        if m + 1 < s.order() {
            if vec_is_zero(&cur) {
                break;
            }
            cur = e.act_a(&cur);
        }
    }
    out
}

/// The new a-action alpha = theta(a) on coordinate vectors.
fn alpha_op(e: &MatrixModule, cov: &ChangeOfVariable, v: &[TruncSeries]) -> Vec<TruncSeries> {
    apply_a_series(e, cov.theta(), v)
}

/// The new b-action beta = b·theta'(a) on coordinate vectors.
fn beta_op(e: &MatrixModule, cov: &ChangeOfVariable, v: &[TruncSeries]) -> Vec<TruncSeries> {
    e.act_b(&apply_a_series(e, &cov.theta().derivative(), v))
}

/// The pushforward of a presentation: the monic annihilator of the image
/// generator of A/A·P inside the pushed module.
///
/// The change of variable theta is the substitution s = theta(t); on
/// operators this sends the old a to eta(a) with eta = theta^{-1}, so an
/// element u annihilates the pushed generator exactly when Theta_eta(u)
/// annihilates the original one, and the annihilator ideal transforms by
/// Theta_eta^{-1} = Theta_theta. With this orientation the principal
/// parameters scale by theta'(0)^{p_j}.
pub fn pushforward_presentation(p: &AbElement, cov: &ChangeOfVariable) -> Result<AbElement> {
    if cov.theta().order() < p.weight_cap() {
        return Err(Error::OrderInsufficient(
            cov.theta().order(),
            p.weight_cap(),
        ));
    }
    let q = theta_endomorphism(cov, p);
    // normalize when the leading a-coefficient is a unit series; the image
    // of a polynomial presentation is an a-series whose truncation can put
    // a non-unit coefficient in top a-degree, and left multiplication by a
    // unit does not change the left ideal anyway
    Ok(q.monic().unwrap_or(q))
}

/// The pushforward of a simple-pole module: the same underlying space with
/// the new actions alpha = eta(a) and beta = b·eta'(a), eta = theta^{-1},
/// expressed as a matrix in the C[[beta]]-basis given by the original
/// basis vectors. On a simple-pole module the a-action raises the
/// b-valuation, so beta^m·e_i = eta'(0)^m·b^m·e_i modulo b^{m+1} and the
/// re-expansion in beta-powers is triangular.
pub fn pushforward_simple_pole(
    e: &MatrixModule,
    cov: &ChangeOfVariable,
) -> Result<MatrixModule> {
    if !e.is_simple_pole() {
        return Err(Error::NotSimplePole);
    }
    let cov = cov.inverse();
    let cov = &cov;
    let k = e.rank();
    let n = e.order();
    let rinv = cov.r().inverse()?;
    // beta^m applied to each basis vector
    let bpows: Vec<Vec<Vec<TruncSeries>>> = (0..k)
        .map(|i| {
            let mut row = vec![unit_vector(k, i, n)];
            for _ in 1..n {
                row.push(beta_op(e, cov, row.last().unwrap()));
            }
            row
        })
        .collect();
    let mut amat = vec![vec![TruncSeries::zero(VarTag::B, n); k]; k];
    for j in 0..k {
        let mut res = alpha_op(e, cov, &unit_vector(k, j, n));
        let mut rm = Scalar::one(); // rinv^m
        for m in 0..n {
            for i in 0..k {
                let c = res[i].coeff(m).mul(&rm);
                if !c.is_zero() {
                    res = vec_sub(&res, &vec_scale(&bpows[i][m], &c));
                    amat[i][j].set_coeff(m, c);
                }
            }
            rm = rm.mul(&rinv);
        }
        if !vec_is_zero(&res) {
            return Err(Error::DerivationFault(
                "beta-adic re-expansion left a nonzero residual".into(),
            ));
        }
    }
    MatrixModule::simple_pole(amat)
}

/// The image of an element of Xi under the substitution s = psi(t): each
/// function monomial s^{mu-1}(Log s)^i/i! is re-expanded over t using
/// (psi/t)^{mu-1} = c^{mu-1}·(1+z)^{mu-1} (generalized binomial, exact
/// rational coefficients) and Log s = Log t + Log c + log(1+z), where
/// c = psi'(0) and z = psi/(c·t) - 1. This realizes the pushforward by
/// theta = compositional_inverse(psi), because the new a-operator is
/// multiplication by t.
///
/// The result is composed with the module automorphism
/// c^{1-lambda0}·exp(-Log c · d/dLog) of Xi over t, which removes the
/// transcendental constants Log c and c^{lambda0-1} and keeps every
/// coefficient in the scalar ring; it commutes with a and b, so no
/// invariant of the generated module is affected.
pub fn pushforward_xi_substitution(x: &XiElement, psi: &TruncSeries) -> Result<XiElement> {
    if psi.order() == 0 || !psi.coeff(0).is_zero() {
        return Err(Error::CompositionUndefined);
    }
    let c = psi.coeff(1).clone();
    if !c.is_unit() {
        return Err(Error::NotInvertibleForComposition);
    }
    let n = x.order().min(psi.order() - 1);
    if n == 0 {
        return Err(Error::OrderInsufficient(psi.order(), 2));
    }
    let x = x.truncate(n);
    let lb = x.log_bound();
    let one = TruncSeries::one(VarTag::T, n);
    let z = psi
        .shr(1)?
        .scale(&c.inverse()?)
        .truncate(n)
        .retag(VarTag::T)
        .sub(&one);
    let one_plus = one.add(&z);
    // log(1+z) and its divided powers
    let ell = z
        .derivative()
        .mul(&one_plus.invert()?)
        .primitive()
        .truncate(n);
    let mut lpow: Vec<TruncSeries> = vec![TruncSeries::one(VarTag::T, n)];
    for d in 1..lb {
        let next = lpow
            .last()
            .unwrap()
            .mul(&ell)
            .scale(&Scalar::from_int(d as i64).inverse()?);
        lpow.push(next);
    }
    let l0 = x.lambda0().clone();
    let q0 = Scalar::from_rat(l0.clone() - num::BigRational::from_integer(1.into()));
    let d_in = to_function_monomials(&x);
    let mut d_out = vec![vec![Scalar::zero(); lb]; n];
    // g_m = c^m·(1+z)^{lambda0-1+m}
    let mut g_m = ell.scale(&q0).exp()?;
    for (m, row) in d_in.iter().enumerate() {
        for (i, coef) in row.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            for (j, lp) in lpow.iter().enumerate().take(i + 1) {
                let g = g_m.mul(&lp);
                for (p, out_row) in d_out.iter_mut().enumerate().skip(m).take(g.order()) {
                    let gc = g.coeff(p - m);
                    if !gc.is_zero() {
                        out_row[i - j] = out_row[i - j].add(&coef.mul(gc));
                    }
                }
            }
        }
        g_m = g_m.mul(&one_plus).scale(&c);
    }
    Ok(from_function_monomials(&d_out, l0, lb, n))
}

/// The series chi_n with b^n·e_lambda = beta^n·chi_n(beta)·e_lambda in the
/// pushed rank-one module; its leading coefficient is theta'(0)^{-n}.
pub fn rebase_b_powers(
    lambda: &Scalar,
    cov: &ChangeOfVariable,
    n: usize,
    order: usize,
) -> Result<TruncSeries> {
    if n >= order {
        return Err(Error::OrderInsufficient(order, n + 1));
    }
    let e = MatrixModule::e_lambda(lambda, order);
    let rinv = cov.r().inverse()?;
    let v0 = unit_vector(1, 0, order);
    let mut bpow = v0.clone();
    for _ in 0..n {
        bpow = e.act_b(&bpow);
    }
    let mut res = bpow;
    let mut chi = TruncSeries::zero(VarTag::Beta, order - n);
    let mut bv = v0;
    for _ in 0..n {
        bv = beta_op(&e, cov, &bv); // beta^n·e
    }
    let mut rm = rinv.pow(n as u32);
    for m in 0..(order - n) {
        let c = res[0].coeff(n + m).mul(&rm);
        if !c.is_zero() {
            res = vec_sub(&res, &vec_scale(&bv, &c));
            chi.set_coeff(m, c);
        }
        bv = beta_op(&e, cov, &bv);
        rm = rm.mul(&rinv);
    }
    if !vec_is_zero(&res) {
        return Err(Error::DerivationFault(
            "b-power rebase left a nonzero residual".into(),
        ));
    }
    Ok(chi)
}

/// The unit S_theta with alpha·(S_theta(beta)·e_lambda) =
/// lambda·beta·(S_theta(beta)·e_lambda): the pushed module is again
/// E_lambda on the rescaled eigenvector. Computed as exp(-primitive(R))
/// from alpha·e = lambda·beta·e + beta^2·R(beta)·e, and verified on the
/// eigenvector equation before returning.
pub fn eigenvector_after_cov(
    lambda: &Scalar,
    cov: &ChangeOfVariable,
    order: usize,
) -> Result<TruncSeries> {
    let e = MatrixModule::e_lambda(lambda, order);
    let rinv = cov.r().inverse()?;
    let v0 = unit_vector(1, 0, order);
    let w = vec_sub(
        &alpha_op(&e, cov, &v0),
        &vec_scale(&beta_op(&e, cov, &v0), lambda),
    );
    // expand w = sum rho_m·beta^m·e; the first two coefficients vanish
    let mut res = w;
    let mut bv = v0.clone();
    let mut rm = Scalar::one();
    let mut rho = TruncSeries::zero(VarTag::Beta, order);
    for m in 0..order {
        let c = res[0].coeff(m).mul(&rm);
        if !c.is_zero() {
            res = vec_sub(&res, &vec_scale(&bv, &c));
            rho.set_coeff(m, c);
        }
        if m + 1 < order {
            bv = beta_op(&e, cov, &bv);
        }
        rm = rm.mul(&rinv);
    }
    if !rho.coeff(0).is_zero() || !rho.coeff(1).is_zero() {
        return Err(Error::DerivationFault(
            "alpha·e - lambda·beta·e is not divisible by beta^2".into(),
        ));
    }
    let r_series = rho.shr(2)?;
    let s = r_series.neg().primitive().exp()?;
    // verify the eigenvector equation at the available order
    let mut eps = vec![TruncSeries::zero(VarTag::B, order)];
    let mut bv = unit_vector(1, 0, order);
    for m in 0..s.order() {
        let c = s.coeff(m);
        if !c.is_zero() {
            eps[0] = eps[0].add(&bv[0].scale(c));
        }
        if m + 1 < s.order() {
            bv = beta_op(&e, cov, &bv);
        }
    }
    let lhs = alpha_op(&e, cov, &eps);
    let rhs = vec_scale(&beta_op(&e, cov, &eps), lambda);
    if !lhs[0].truncate(s.order()).eq_trunc(&rhs[0]) {
        return Err(Error::DerivationFault(
            "rescaled eigenvector fails the eigenvalue equation".into(),
        ));
    }
    Ok(s)
}

/// The expansion S(b) = sum_l S_l(beta)·alpha^l in the algebra: the
/// weight-graded part of beta^nu·alpha^l is exactly r^{nu+l}·b^nu·a^l, so
/// the re-expansion is triangular by total weight. Returns the series
/// S_l(beta), index l ascending.
pub fn rebase_series(
    s: &TruncSeries,
    cov: &ChangeOfVariable,
    weight_cap: usize,
) -> Result<Vec<TruncSeries>> {
    let w = weight_cap;
    let mut residual = AbElement::from_b_series(s, w);
    let ia = cov.image_a(w);
    let ib = cov.image_b(w);
    let rinv = cov.r().inverse()?;
    let mut ia_pows = vec![AbElement::one(w)];
    let mut ib_pows = vec![AbElement::one(w)];
    let mut coeffs = vec![vec![Scalar::zero(); w]; w]; // [l][nu]
    let mut rw = Scalar::one(); // rinv^wt
    for wt in 0..w {
        for l in 0..=wt {
            let nu = wt - l;
            let cval = residual.coeff_of(nu, l);
            if cval.is_zero() {
                continue;
            }
            let c = cval.mul(&rw);
            while ia_pows.len() <= l {
                let next = ia_pows.last().unwrap().normal_mul(&ia);
                ia_pows.push(next);
            }
            while ib_pows.len() <= nu {
                let next = ib_pows.last().unwrap().normal_mul(&ib);
                ib_pows.push(next);
            }
            let basis = ib_pows[nu].normal_mul(&ia_pows[l]);
            residual = residual.sub(&basis.scale(&c));
            coeffs[l][nu] = c;
        }
        rw = rw.mul(&rinv);
    }
    if !residual.is_zero() {
        return Err(Error::DerivationFault(
            "weight-graded re-expansion left a nonzero residual".into(),
        ));
    }
    Ok((0..w)
        .map(|l| TruncSeries::new(VarTag::Beta, coeffs[l][..w - l].to_vec()))
        .collect())
}

/// The transition matrix F with a^j·phi = sum_i F[i][j](beta)·alpha^i·phi
/// for a k-thematic generator phi: modulo beta it must be triangular with
/// diagonal r^{-j} (unitriangular for r = 1), which is asserted.
///
/// The expansion is graded by the weight in which the basis vector a^j·phi
/// carries weight j and b weight 1: the weight-(m+i) part of
/// beta^m·(alpha^i·phi) is exactly r^{m+i}·b^m·(a^i·phi).
pub fn verify_thematic_basis(
    x: &XiElement,
    k: usize,
    cov: &ChangeOfVariable,
) -> Result<Vec<Vec<TruncSeries>>> {
    let mut pows = vec![x.clone()];
    for _ in 0..k {
        pows.push(pows.last().unwrap().act_a());
    }
    let basis: Vec<&XiElement> = pows[..k].iter().collect();
    let (c, _) = match express_in_span(&pows[k], &basis) {
        Ok(v) => v,
        Err(Error::NotInSpan { .. }) => return Err(Error::NotThematic),
        Err(e) => return Err(e),
    };
    let n = c
        .iter()
        .map(TruncSeries::order)
        .min()
        .unwrap_or(x.order())
        .min(x.order());
    // coordinate module over the basis a^j·phi: companion action
    let mut amat = vec![vec![TruncSeries::zero(VarTag::B, n); k]; k];
    for j in 0..k.saturating_sub(1) {
        amat[j + 1][j] = TruncSeries::one(VarTag::B, n);
    }
    for (i, ci) in c.iter().enumerate() {
        amat[i][k - 1] = ci.truncate(n);
    }
    let e = MatrixModule::new(amat);
    let rinv = cov.r().inverse()?;
    let mut eps = vec![unit_vector(k, 0, n)];
    for _ in 1..k {
        eps.push(alpha_op(&e, cov, eps.last().unwrap()));
    }
    let bpows: Vec<Vec<Vec<TruncSeries>>> = eps
        .iter()
        .map(|v| {
            let mut row = vec![v.clone()];
            for _ in 1..n {
                row.push(beta_op(&e, cov, row.last().unwrap()));
            }
            row
        })
        .collect();
    let mut f = vec![vec![TruncSeries::zero(VarTag::Beta, n); k]; k];
    for j in 0..k {
        let mut res = unit_vector(k, j, n);
        let mut fm = vec![vec![Scalar::zero(); n]; k];
        let mut rw = Scalar::one(); // rinv^wt
        for wt in 0..n {
            for i in 0..k.min(wt + 1) {
                let m = wt - i;
                if m >= n {
                    continue;
                }
                let cv = res[i].coeff(m).mul(&rw);
                if !cv.is_zero() {
                    res = vec_sub(&res, &vec_scale(&bpows[i][m], &cv));
                    fm[i][m] = cv;
                }
            }
            rw = rw.mul(&rinv);
        }
        for (i, fi) in fm.into_iter().enumerate() {
            f[i][j] = TruncSeries::new(VarTag::Beta, fi[..n - i].to_vec());
        }
    }
    for j in 0..k {
        for (i, row) in f.iter().enumerate().take(j) {
            if !row[j].coeff(0).is_zero() {
                return Err(Error::DerivationFault(format!(
                    "transition matrix is not triangular modulo beta at ({i}, {j})"
                )));
            }
        }
        if *f[j][j].coeff(0) != rinv.pow(j as u32) {
            return Err(Error::DerivationFault(format!(
                "transition diagonal at {j} differs from r^(-{j})"
            )));
        }
    }
    Ok(f)
}

/// Comparison of a theme with its pushforward: the fundamental invariants
/// must coincide and the principal parameters transform as
/// alpha_j -> r^{p_j}·alpha_j.
#[derive(Debug, Clone)]
pub struct PushforwardReport {
    pub original: ThemeReport,
    pub pushed: ThemeReport,
    pub r: Scalar,
    pub expected_params: Vec<Option<Scalar>>,
    pub param_matches: Vec<bool>,
    pub invariants_match: bool,
}

impl PushforwardReport {
    pub fn verified(&self) -> bool {
        self.invariants_match && self.param_matches.iter().all(|&m| m)
    }
}

impl fmt::Display for PushforwardReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "r = {}", self.r)?;
        writeln!(
            f,
            "invariants: {}",
            if self.invariants_match {
                "preserved"
            } else {
                "MISMATCH"
            }
        )?;
        if !self.invariants_match {
            writeln!(f, "  original exponents {:?}", self.original.exponents)?;
            writeln!(f, "  pushed exponents   {:?}", self.pushed.exponents)?;
        }
        for (j, ok) in self.param_matches.iter().enumerate() {
            let exp = self.expected_params[j]
                .as_ref()
                .map(|a| format!("{a}"))
                .unwrap_or_else(|| "(none)".into());
            let got = self.pushed.params[j]
                .as_ref()
                .map(|a| format!("{a}"))
                .unwrap_or_else(|| "(none)".into());
            writeln!(
                f,
                "alpha_{}: expected {}, pushed {} [{}]",
                j + 1,
                exp,
                got,
                if *ok { "ok" } else { "MISMATCH" }
            )?;
        }
        Ok(())
    }
}

/// Full verification of the parameter transformation law: analyzes the
/// generator and its pushforward (via the Xi substitution s = theta(t))
/// and compares the invariants. When the annihilator and theta have
/// rational coefficients, the presentation-level pushforward is run as an
/// independent second route and must agree.
pub fn verify_parameter_transform(
    x: &XiElement,
    cov: &ChangeOfVariable,
) -> Result<PushforwardReport> {
    let original = analyze(x)?;
    let psi = cov.theta().clone().retag(VarTag::T);
    let pushed_gen = pushforward_xi_substitution(x, &psi)?;
    let pushed = analyze(&pushed_gen)?;
    let rational = original
        .annihilator
        .terms()
        .all(|(_, c)| c.as_rational().is_some())
        && cov
            .theta()
            .coeffs()
            .iter()
            .all(|c| c.as_rational().is_some());
    if rational {
        let p = if cov.theta().order() < original.annihilator.weight_cap() {
            original.annihilator.truncate(cov.theta().order())
        } else {
            original.annihilator.clone()
        };
        let q = pushforward_presentation(&p, cov)?;
        let via_presentation = analyze_annihilator(&q, x.order())?;
        if !via_presentation.data_eq(&pushed) {
            return Err(Error::DerivationFault(
                "presentation and substitution pushforwards disagree".into(),
            ));
        }
    }
    let r = cov.r();
    let expected_params: Vec<Option<Scalar>> = original
        .params
        .iter()
        .zip(&original.gaps)
        .map(|(p, &gap)| p.as_ref().map(|a| a.mul(&r.pow(gap as u32))))
        .collect();
    let param_matches: Vec<bool> = expected_params
        .iter()
        .zip(&pushed.params)
        .map(|(e, g)| e == g)
        .collect();
    let invariants_match = original.rank == pushed.rank
        && original.exponents == pushed.exponents
        && original.gaps == pushed.gaps;
    Ok(PushforwardReport {
        original,
        pushed,
        r: r.clone(),
        expected_params,
        param_matches,
        invariants_match,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abalg::standard_form_compose;
    use crate::scalar::Rat;
    use crate::theme::{
        bernstein_polynomial, rank3_extract, realize_annihilator, Rank3FamilySpec,
    };
    use crate::ximodel::monomial_to_abstract;
    use num::bigint::BigInt;

    fn rr(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    fn cov_poly(coeffs: &[(usize, Scalar)], order: usize) -> ChangeOfVariable {
        let mut t = TruncSeries::zero(VarTag::A, order);
        for (m, c) in coeffs {
            t.set_coeff(*m, c.clone());
        }
        ChangeOfVariable::new(t).unwrap()
    }

    #[test]
    fn presentation_pushforward_identity_and_e_lambda() {
        let w = 10;
        let lam = Scalar::from_int(3);
        let p = AbElement::gen_a(w).sub(&AbElement::gen_b(w).scale(&lam));
        let id = ChangeOfVariable::identity(w);
        assert_eq!(pushforward_presentation(&p, &id).unwrap(), p);
        // theta(a) = a + a^2: theta_*(E_lambda) is again E_lambda
        let cov = cov_poly(&[(1, Scalar::one()), (2, Scalar::one())], w);
        let q = pushforward_presentation(&p, &cov).unwrap();
        let report = analyze_annihilator(&q, 8).unwrap();
        assert_eq!(report.rank, 1);
        assert_eq!(report.exponents, vec![rr(3, 1)]);
    }

    /// Thm "th. fond." with r = 2: a rank-2 theme with p_1 = 3, alpha = 5
    /// pushed by theta(a) = 2a + a^3 has parameter 2^3·5 = 40.
    #[test]
    fn rank2_parameter_scales_by_r_to_the_p() {
        // the generator realized from the annihilator sits at valuation 4,
        // so every coefficient solve pays that in effective order
        let n = 24;
        let w = n + 4;
        let unit = TruncSeries::from_ints(VarTag::B, &[1, 0, 0, 5], w);
        let (_, p) = standard_form_compose(
            &[Scalar::from_ratio(5, 2), Scalar::from_ratio(9, 2)],
            &[unit],
            w,
        )
        .unwrap();
        let phi = realize_annihilator(&p, n).unwrap();
        let direct = analyze(&phi).unwrap();
        assert_eq!(direct.gaps, vec![3]);
        assert_eq!(direct.params, vec![Some(Scalar::from_int(5))]);
        let cov = cov_poly(&[(1, Scalar::from_int(2)), (3, Scalar::one())], n + 6);
        let report = verify_parameter_transform(&phi, &cov).unwrap();
        assert!(report.verified(), "{report}");
        assert_eq!(report.pushed.params, vec![Some(Scalar::from_int(40))]);
    }

    /// With r = 1 and symbolic higher coefficients the pushed parameter is
    /// the constant it started as.
    #[test]
    fn rank2_parameter_constant_for_symbolic_tangent_identity() {
        let n = 12;
        let l0 = rr(3, 2);
        let s = TruncSeries::from_ints(VarTag::B, &[1, 1], n);
        let phi = monomial_to_abstract(l0.clone(), 2, 1, 2, n)
            .add(&XiElement::basis(l0, 0, 2, n).mul_series(&s));
        let cov = cov_poly(
            &[
                (1, Scalar::one()),
                (2, Scalar::param("theta2")),
                (3, Scalar::param("theta3")),
            ],
            n + 4,
        );
        let report = verify_parameter_transform(&phi, &cov).unwrap();
        assert!(report.verified(), "{report}");
        assert_eq!(
            report.pushed.params,
            vec![Some(Scalar::from_ratio(-15, 8))]
        );
    }

    #[test]
    fn simple_pole_pushforward_preserves_residue_and_bernstein() {
        let n = 12;
        let lam = Scalar::from_int(2);
        let cov = cov_poly(&[(1, Scalar::one()), (2, Scalar::from_int(3))], n + 2);
        // E_lambda: rank 1, residue lambda
        let e = MatrixModule::e_lambda(&lam, n);
        let pe = pushforward_simple_pole(&e, &cov).unwrap();
        assert_eq!(*pe.matrix()[0][0].coeff(1), lam);
        assert_eq!(
            bernstein_polynomial(&pe).unwrap(),
            bernstein_polynomial(&e).unwrap()
        );
        // Xi^{(1)}: residue matrix [[lambda, 1], [0, lambda]]
        let xi = MatrixModule::xi_module(&lam, 2, n);
        let pxi = pushforward_simple_pole(&xi, &cov).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(
                    pxi.matrix()[i][j].coeff(1),
                    xi.matrix()[i][j].coeff(1),
                    "residue entry ({i}, {j})"
                );
            }
        }
        assert_eq!(
            bernstein_polynomial(&pxi).unwrap(),
            bernstein_polynomial(&xi).unwrap()
        );
        // identity change of variable acts trivially
        let id = ChangeOfVariable::identity(n + 2);
        assert_eq!(pushforward_simple_pole(&xi, &id).unwrap(), xi);
    }

    #[test]
    fn simple_pole_pushforward_with_r_not_one() {
        let n = 12;
        let lam = Scalar::from_ratio(5, 2);
        let cov = cov_poly(&[(1, Scalar::from_int(2)), (2, Scalar::one())], n + 2);
        let e = MatrixModule::e_lambda(&lam, n);
        let pe = pushforward_simple_pole(&e, &cov).unwrap();
        assert_eq!(*pe.matrix()[0][0].coeff(1), lam);
        assert_eq!(
            bernstein_polynomial(&pe).unwrap(),
            bernstein_polynomial(&e).unwrap()
        );
    }

    #[test]
    fn chi_series_oracle() {
        let n = 12;
        let lam = Scalar::from_int(3);
        let id = ChangeOfVariable::identity(n + 2);
        let chi = rebase_b_powers(&lam, &id, 2, n).unwrap();
        assert!(chi.eq_trunc(&TruncSeries::one(VarTag::Beta, n - 2)));
        // theta(a) = a + theta2·a^2, n = 1: chi_1 = 1 - 2·theta2·lambda·beta + ...
        let t2 = Scalar::param("theta2");
        let cov = cov_poly(&[(1, Scalar::one()), (2, t2.clone())], n + 2);
        let chi1 = rebase_b_powers(&lam, &cov, 1, n).unwrap();
        assert!(chi1.coeff(0).is_one());
        assert_eq!(
            *chi1.coeff(1),
            t2.mul(&lam).mul(&Scalar::from_int(-2))
        );
        // every coefficient is polynomial in theta (no division happened):
        // reconstruction oracle b·e = beta·chi_1(beta)·e
        let e = MatrixModule::e_lambda(&lam, n);
        let v0 = unit_vector(1, 0, n);
        let mut acc = vec![TruncSeries::zero(VarTag::B, n)];
        let mut bv = beta_op(&e, &cov, &v0);
        for m in 0..chi1.order() {
            acc[0] = acc[0].add(&bv[0].scale(chi1.coeff(m)));
            bv = beta_op(&e, &cov, &bv);
        }
        assert!(acc[0].truncate(n - 1).eq_trunc(&e.act_b(&v0)[0]));
    }

    #[test]
    fn chi_leading_coefficient_is_r_to_minus_n() {
        let n = 10;
        let lam = Scalar::from_int(2);
        let cov = cov_poly(&[(1, Scalar::from_int(3)), (2, Scalar::one())], n + 2);
        let chi = rebase_b_powers(&lam, &cov, 2, n).unwrap();
        assert_eq!(*chi.coeff(0), Scalar::from_ratio(1, 9));
    }

    #[test]
    fn eigenvector_series_oracle() {
        let n = 12;
        let lam = Scalar::from_int(3);
        let id = ChangeOfVariable::identity(n + 2);
        let s = eigenvector_after_cov(&lam, &id, n).unwrap();
        assert!(s.eq_trunc(&TruncSeries::one(VarTag::Beta, s.order())));
        // theta(a) = a + theta2·a^2: S = 1 + theta2·lambda·(lambda-1)·beta + ...
        let t2 = Scalar::param("theta2");
        let cov = cov_poly(&[(1, Scalar::one()), (2, t2.clone())], n + 2);
        let s2 = eigenvector_after_cov(&lam, &cov, n).unwrap();
        assert!(s2.coeff(0).is_one());
        assert_eq!(
            *s2.coeff(1),
            t2.mul(&lam).mul(&lam.sub(&Scalar::one()))
        );
    }

    #[test]
    fn rebase_series_reconstruction() {
        let w = 10;
        let id = ChangeOfVariable::identity(w);
        let one = TruncSeries::one(VarTag::B, w);
        let sl = rebase_series(&one, &id, w).unwrap();
        assert!(sl[0].eq_trunc(&TruncSeries::one(VarTag::Beta, w)));
        assert!(sl[1..].iter().all(TruncSeries::is_zero));
        let b = TruncSeries::gen(VarTag::B, w);
        let slb = rebase_series(&b, &id, w).unwrap();
        assert!(slb[0].eq_trunc(&TruncSeries::gen(VarTag::Beta, w)));
        assert!(slb[1..].iter().all(TruncSeries::is_zero));
        // theta(a) = a + a^2: reconstruct sum S_l(beta)·alpha^l = b
        let cov = cov_poly(&[(1, Scalar::one()), (2, Scalar::one())], w);
        let sl2 = rebase_series(&b, &cov, w).unwrap();
        let ia = cov.image_a(w);
        let ib = cov.image_b(w);
        let mut acc = AbElement::zero(w);
        let mut ial = AbElement::one(w);
        for l in 0..w {
            let mut ibn = AbElement::one(w);
            for nu in 0..sl2[l].order() {
                let c = sl2[l].coeff(nu);
                if !c.is_zero() {
                    acc = acc.add(&ibn.normal_mul(&ial).scale(c));
                }
                ibn = ibn.normal_mul(&ib);
            }
            ial = ial.normal_mul(&ia);
        }
        assert_eq!(acc, AbElement::from_b_series(&b, w));
    }

    #[test]
    fn substitution_identity_and_binomial_expansion() {
        let n = 10;
        let l0 = rr(5, 2);
        let x = XiElement::basis(l0.clone(), 1, 2, n)
            .mul_series(&TruncSeries::from_ints(VarTag::B, &[1, 2, 3], n));
        let ident = TruncSeries::gen(VarTag::T, n + 1);
        assert_eq!(pushforward_xi_substitution(&x, &ident).unwrap(), x);
        // s^{lambda0-1} under psi = t(1+sigma·t):
        // (1+sigma·t)^{lambda0-1} = 1 + sigma(lambda0-1)t + ...
        let sigma = Scalar::param("sigma");
        let mut psi = TruncSeries::gen(VarTag::T, n + 1);
        psi.set_coeff(2, sigma.clone());
        let x0 = XiElement::basis(l0.clone(), 0, 1, n);
        let pushed = pushforward_xi_substitution(&x0, &psi).unwrap();
        let d = to_function_monomials(&pushed);
        let q = Scalar::from_rat(l0.clone() - rr(1, 1));
        assert_eq!(d[0][0], Scalar::one());
        assert_eq!(d[1][0], sigma.mul(&q));
        // binomial: sigma^2·(lambda0-1)(lambda0-2)/2
        let q2 = q
            .mul(&Scalar::from_rat(l0 - rr(2, 1)))
            .mul(&Scalar::from_ratio(1, 2));
        assert_eq!(d[2][0], sigma.mul(&sigma).mul(&q2));
    }

    /// The eta-slot of the rank-3 family transforms as
    /// theta_1 = eta_1 + eta_0·(lambda-2)(lambda-3)·sigma under
    /// s = t(1 + sigma·t).
    #[test]
    fn family_eta_slot_under_substitution() {
        let n = 14;
        let lam = rr(7, 2);
        let spec = Rank3FamilySpec::new(
            lam.clone(),
            TruncSeries::zero(VarTag::B, 1),
            TruncSeries::zero(VarTag::B, 1),
            Scalar::from_int(1),
            Scalar::from_int(2),
        )
        .unwrap();
        let e = spec.generator(n);
        let sigma = Scalar::param("sigma");
        let mut psi = TruncSeries::gen(VarTag::T, n + 1);
        psi.set_coeff(2, sigma.clone());
        let pushed = pushforward_xi_substitution(&e, &psi).unwrap();
        let d = to_function_monomials(&pushed);
        // d[1][0] = theta_1 / (lambda - 2) with
        // theta_1 = eta_1 + eta_0·(lambda-2)(lambda-3)·sigma
        let lm2 = Scalar::from_rat(lam.clone() - rr(2, 1));
        let lm3 = Scalar::from_rat(lam - rr(3, 1));
        let theta1 = Scalar::from_int(2).add(&lm2.mul(&lm3).mul(&sigma));
        assert_eq!(d[1][0], theta1.checked_div(&lm2).unwrap());
    }

    /// The counterexample of the closing section: the substitution
    /// s = t(1+t) changes u but fixes alpha, so (u, alpha) separates
    /// non-isomorphic themes with equal fundamental invariants.
    #[test]
    fn substitution_changes_u_but_not_alpha() {
        let n = 24;
        let lam = rr(7, 2);
        let spec = Rank3FamilySpec::new(
            lam,
            TruncSeries::zero(VarTag::B, 1),
            TruncSeries::zero(VarTag::B, 1),
            Scalar::from_int(1),
            Scalar::from_int(0),
        )
        .unwrap();
        let e = spec.generator(n);
        let before = rank3_extract(&e).unwrap().1;
        assert_eq!(before.u, Scalar::zero());
        assert_eq!(before.alpha, Scalar::from_ratio(15, 16));
        let mut psi = TruncSeries::gen(VarTag::T, n + 1);
        psi.set_coeff(2, Scalar::one());
        let pushed = pushforward_xi_substitution(&e, &psi).unwrap();
        let (pspec, after) = rank3_extract(&pushed).unwrap();
        assert_eq!(pspec.lambda, rr(7, 2));
        assert_eq!(after.alpha, before.alpha);
        assert_ne!(after.u, before.u);
        // the invariants and the principal parameters agree nonetheless
        assert!(before.report.data_eq(&after.report));
    }

    #[test]
    fn thematic_basis_is_unitriangular() {
        let n = 16;
        // k = 1: a rank-one generator
        let x0 = XiElement::basis(rr(5, 2), 0, 1, n);
        let cov = cov_poly(&[(1, Scalar::one()), (2, Scalar::one())], n + 2);
        let f1 = verify_thematic_basis(&x0, 1, &cov).unwrap();
        assert!(f1[0][0].coeff(0).is_one());
        // the rank-3 family generator with a symbolic theta coefficient
        let spec = Rank3FamilySpec::new(
            rr(7, 2),
            TruncSeries::zero(VarTag::B, 1),
            TruncSeries::zero(VarTag::B, 1),
            Scalar::from_int(1),
            Scalar::from_int(2),
        )
        .unwrap();
        let e = spec.generator(n);
        let sym = cov_poly(&[(1, Scalar::one()), (2, Scalar::param("sigma"))], n + 2);
        let f = verify_thematic_basis(&e, 3, &sym).unwrap();
        for j in 0..3 {
            assert!(f[j][j].coeff(0).is_one());
            for i in 0..j {
                assert!(f[i][j].coeff(0).is_zero());
            }
        }
        // with r = 2 the diagonal is r^{-j}
        let cov2 = cov_poly(&[(1, Scalar::from_int(2)), (2, Scalar::one())], n + 2);
        let f2 = verify_thematic_basis(&e, 3, &cov2).unwrap();
        for (j, want) in [(0, 1i64), (1, 2), (2, 4)] {
            assert_eq!(
                *f2[j as usize][j as usize].coeff(0),
                Scalar::from_ratio(1, want)
            );
        }
        // non-thematic input is rejected
        let not_them = XiElement::basis(rr(5, 2), 1, 2, n);
        assert!(matches!(
            verify_thematic_basis(&not_them, 1, &cov),
            Err(Error::NotThematic)
        ));
    }

    /// Functoriality: pushing forward by theta and then by theta^{-1}
    /// restores the original invariants.
    #[test]
    fn pushforward_round_trip() {
        let n = 14;
        let l0 = rr(3, 2);
        let s = TruncSeries::from_ints(VarTag::B, &[1, 1], n);
        let phi = monomial_to_abstract(l0.clone(), 2, 1, 2, n)
            .add(&XiElement::basis(l0, 0, 2, n).mul_series(&s));
        let direct = analyze(&phi).unwrap();
        let cov = cov_poly(&[(1, Scalar::one()), (2, Scalar::from_int(2))], n + 4);
        let psi = cov.eta().clone().retag(VarTag::T);
        let once = pushforward_xi_substitution(&phi, &psi).unwrap();
        let back =
            pushforward_xi_substitution(&once, &cov.theta().clone().retag(VarTag::T))
                .unwrap();
        let report = analyze(&back).unwrap();
        assert!(report.data_eq(&direct));
    }

}
