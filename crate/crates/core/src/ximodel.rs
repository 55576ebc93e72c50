//! The universal model Xi_{lambda0}^(L-1): coordinates over the basis
//! x_j = s^{lambda0-1}(Log s)^j/j!, with the a-action
//! a·x_j = lambda0·b·x_j + b·x_{j-1} and b acting as the series variable.
//!
//! Also the matrix representation of general (a,b)-modules: a free
//! C[[b]]-module with the a-action given by a matrix of series, extended
//! to series coefficients by a·(S·e) = S·(a·e) + b²S'·e.

use num::bigint::BigInt;
use num::{One, Zero};

use crate::abalg::AbElement;
use crate::error::{Error, Result};
use crate::linsolve::{scalar_nullspace, series_solve};
use crate::scalar::{Rat, Scalar};
use crate::series::{TruncSeries, VarTag};

/// Rising factorial lambda0·(lambda0+1)···(lambda0+m-1).
pub fn pochhammer(lambda0: &Rat, m: usize) -> Rat {
    let mut acc = Rat::one();
    for i in 0..m {
        acc *= lambda0 + Rat::from_integer(BigInt::from(i));
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiElement {
    lambda0: Rat,
    comps: Vec<TruncSeries>,
}

impl XiElement {
    pub fn new(lambda0: Rat, comps: Vec<TruncSeries>) -> Result<Self> {
        if lambda0 <= Rat::zero() {
            return Err(Error::Invalid(format!(
                "base exponent must be positive, got {}",
                lambda0
            )));
        }
        if comps.is_empty() {
            return Err(Error::Invalid("empty component list".into()));
        }
        Ok(XiElement { lambda0, comps })
    }

    pub fn zero(lambda0: Rat, log_bound: usize, order: usize) -> Self {
        XiElement {
            lambda0,
            comps: (0..log_bound)
                .map(|_| TruncSeries::zero(VarTag::B, order))
                .collect(),
        }
    }

    /// The basis element x_j.
    pub fn basis(lambda0: Rat, j: usize, log_bound: usize, order: usize) -> Self {
        let mut e = Self::zero(lambda0, log_bound, order);
        e.comps[j] = TruncSeries::one(VarTag::B, order);
        e
    }

    pub fn lambda0(&self) -> &Rat {
        &self.lambda0
    }

    pub fn log_bound(&self) -> usize {
        self.comps.len()
    }

    pub fn order(&self) -> usize {
        self.comps.iter().map(TruncSeries::order).min().unwrap_or(0)
    }

    pub fn comp(&self, j: usize) -> &TruncSeries {
        &self.comps[j]
    }

    pub fn comps(&self) -> &[TruncSeries] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(TruncSeries::is_zero)
    }

    /// Largest log index with a nonzero component.
    pub fn top_log_index(&self) -> Option<usize> {
        (0..self.comps.len()).rev().find(|&j| !self.comps[j].is_zero())
    }

    /// Truncate every component to a common order.
    pub fn truncate(&self, order: usize) -> Self {
        XiElement {
            lambda0: self.lambda0.clone(),
            comps: self.comps.iter().map(|c| c.truncate(order)).collect(),
        }
    }

    /// Extend the log bound (new top components are zero).
    pub fn with_log_bound(&self, log_bound: usize) -> Self {
        assert!(log_bound >= self.comps.len());
        let n = self.order();
        let mut comps = self.comps.clone();
        while comps.len() < log_bound {
            comps.push(TruncSeries::zero(VarTag::B, n));
        }
        XiElement {
            lambda0: self.lambda0.clone(),
            comps,
        }
    }

    /// Drop components of log degree <= cut and reindex: the image in
    /// Xi^(L-1)/Xi^(cut), which satisfies the same defining relations.
    pub fn quotient_above(&self, cut: usize) -> Self {
        XiElement {
            lambda0: self.lambda0.clone(),
            comps: self.comps[cut + 1..].to_vec(),
        }
    }

    pub fn add(&self, other: &XiElement) -> Self {
        assert_eq!(self.lambda0, other.lambda0);
        assert_eq!(self.comps.len(), other.comps.len());
        XiElement {
            lambda0: self.lambda0.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &XiElement) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        XiElement {
            lambda0: self.lambda0.clone(),
            comps: self.comps.iter().map(TruncSeries::neg).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        XiElement {
            lambda0: self.lambda0.clone(),
            comps: self.comps.iter().map(|g| g.scale(c)).collect(),
        }
    }

    /// Multiplication by a series in b (componentwise).
    pub fn mul_series(&self, s: &TruncSeries) -> Self {
        XiElement {
            lambda0: self.lambda0.clone(),
            comps: self.comps.iter().map(|g| g.mul(s)).collect(),
        }
    }

    /// The b-action: multiplication by b.
    pub fn act_b(&self) -> Self {
        let n = self.order();
        XiElement {
            lambda0: self.lambda0.clone(),
            comps: self.comps.iter().map(|g| g.shl(1).truncate(n)).collect(),
        }
    }

    /// The a-action: a·(g_j x_j) = lambda0·b·g_j·x_j + b²·g_j'·x_j
    /// + b·g_j·x_{j-1}.
    pub fn act_a(&self) -> Self {
        let n = self.order();
        let lam = Scalar::from_rat(self.lambda0.clone());
        let comps: Vec<TruncSeries> = (0..self.comps.len())
            .map(|j| {
                let g = &self.comps[j];
                let mut out = g.shl(1).scale(&lam).add(&g.derivative().shl(2).truncate(n + 1));
                if j + 1 < self.comps.len() {
                    out = out.add(&self.comps[j + 1].shl(1).truncate(n + 1));
                }
                out.truncate(n)
            })
            .collect();
        XiElement {
            lambda0: self.lambda0.clone(),
            comps,
        }
    }

    pub fn act_a_pow(&self, m: usize) -> Self {
        let mut acc = self.clone();
        for _ in 0..m {
            acc = acc.act_a();
        }
        acc
    }

    /// Action of a normal-ordered algebra element.
    pub fn act_ab(&self, u: &AbElement) -> Self {
        let mut apows: Vec<XiElement> = vec![self.clone()];
        let mut out = Self::zero(self.lambda0.clone(), self.comps.len(), self.order());
        for (&(nu, j), c) in u.terms() {
            while apows.len() <= j {
                let next = apows.last().unwrap().act_a();
                apows.push(next);
            }
            let n = self.order();
            let mut term = apows[j].clone();
            term = XiElement {
                lambda0: term.lambda0.clone(),
                comps: term
                    .comps
                    .iter()
                    .map(|g| g.shl(nu).truncate(n))
                    .collect(),
            };
            out = out.add(&term.scale(c));
        }
        out
    }
}

/// The element a^m·x_i = s^{lambda0+m-1}(Log s)^i/i!.
pub fn monomial_to_abstract(
    lambda0: Rat,
    m: usize,
    i: usize,
    log_bound: usize,
    order: usize,
) -> XiElement {
    XiElement::basis(lambda0, i, log_bound, order).act_a_pow(m)
}

/// Coefficients c with x = sum c_i·basis_i over C[[b]], plus the
/// effective order of the solve.
pub fn express_in_span(
    x: &XiElement,
    basis: &[&XiElement],
) -> Result<(Vec<TruncSeries>, usize)> {
    let l = x.log_bound();
    let rows: Vec<Vec<TruncSeries>> = (0..l)
        .map(|j| basis.iter().map(|b| b.comp(j).clone()).collect())
        .collect();
    let rhs: Vec<TruncSeries> = (0..l).map(|j| x.comp(j).clone()).collect();
    series_solve(&rows, &rhs)
}

/// Function-monomial expansion: x = sum d[m][i]·s^{lambda0+m-1}(Log s)^i/i!.
/// Triangular inversion of `monomial_to_abstract`: at b-order m the top
/// log component of a^m·x_i has the exact coefficient
/// pochhammer(lambda0, m).
pub fn to_function_monomials(x: &XiElement) -> Vec<Vec<Scalar>> {
    let n = x.order();
    let l = x.log_bound();
    // cache a^m x_i for all m < n, i < l
    let mut cache: Vec<Vec<XiElement>> = Vec::with_capacity(l);
    for i in 0..l {
        let mut row = Vec::with_capacity(n);
        let mut cur = XiElement::basis(x.lambda0.clone(), i, l, n);
        row.push(cur.clone());
        for _ in 1..n {
            cur = cur.act_a();
            row.push(cur.clone());
        }
        cache.push(row);
    }
    let mut d = vec![vec![Scalar::zero(); l]; n];
    let mut residual = x.clone();
    for m in 0..n {
        let poch = Scalar::from_rat(pochhammer(&x.lambda0, m));
        for i in (0..l).rev() {
            let c = residual.comp(i).coeff(m).clone();
            if c.is_zero() {
                continue;
            }
            let c = c
                .checked_div(&poch)
                .expect("pochhammer of a positive rational is a nonzero rational");
            residual = residual.sub(&cache[i][m].scale(&c));
            d[m][i] = c;
        }
    }
    debug_assert!(residual.is_zero());
    d
}

/// Inverse of `to_function_monomials`.
pub fn from_function_monomials(
    d: &[Vec<Scalar>],
    lambda0: Rat,
    log_bound: usize,
    order: usize,
) -> XiElement {
    let mut out = XiElement::zero(lambda0.clone(), log_bound, order);
    let mut cache: Vec<Vec<XiElement>> = Vec::with_capacity(log_bound);
    for i in 0..log_bound {
        let mut row = Vec::with_capacity(order);
        let mut cur = XiElement::basis(lambda0.clone(), i, log_bound, order);
        row.push(cur.clone());
        for _ in 1..order {
            cur = cur.act_a();
            row.push(cur.clone());
        }
        cache.push(row);
    }
    for (m, row) in d.iter().enumerate().take(order) {
        for (i, c) in row.iter().enumerate().take(log_bound) {
            if !c.is_zero() {
                out = out.add(&cache[i][m].scale(c));
            }
        }
    }
    out
}

/// A free C[[b]]-module of finite rank with a-action matrix A:
/// a·e_j = sum_i A[i][j]·e_i, Leibniz-extended to series coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixModule {
    a: Vec<Vec<TruncSeries>>,
}

impl MatrixModule {
    pub fn new(a: Vec<Vec<TruncSeries>>) -> Self {
        let k = a.len();
        assert!(k >= 1);
        for row in &a {
            assert_eq!(row.len(), k, "action matrix must be square");
        }
        MatrixModule { a }
    }

    /// Checked constructor for simple-pole modules: every entry must be
    /// divisible by b.
    pub fn simple_pole(a: Vec<Vec<TruncSeries>>) -> Result<Self> {
        let m = Self::new(a);
        if !m.is_simple_pole() {
            return Err(Error::NotSimplePole);
        }
        Ok(m)
    }

    /// E_lambda: rank 1, a·e = lambda·b·e.
    pub fn e_lambda(lambda: &Scalar, order: usize) -> Self {
        let e = TruncSeries::gen(VarTag::B, order).scale(lambda);
        MatrixModule { a: vec![vec![e]] }
    }

    /// Xi_lambda^(k-1) truncated to rank k: a·x_j = lambda·b·x_j + b·x_{j-1}.
    pub fn xi_module(lambda: &Scalar, k: usize, order: usize) -> Self {
        let b = TruncSeries::gen(VarTag::B, order);
        let mut a = vec![vec![TruncSeries::zero(VarTag::B, order); k]; k];
        for j in 0..k {
            a[j][j] = b.scale(lambda);
            if j > 0 {
                a[j - 1][j] = b.clone();
            }
        }
        MatrixModule { a }
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn matrix(&self) -> &Vec<Vec<TruncSeries>> {
        &self.a
    }

    pub fn order(&self) -> usize {
        self.a
            .iter()
            .flatten()
            .map(TruncSeries::order)
            .min()
            .unwrap_or(0)
    }

    pub fn is_simple_pole(&self) -> bool {
        self.a
            .iter()
            .flatten()
            .all(|e| e.valuation().map(|v| v >= 1).unwrap_or(true))
    }

    pub fn act_a(&self, v: &[TruncSeries]) -> Vec<TruncSeries> {
        let k = self.rank();
        assert_eq!(v.len(), k);
        let n = v.iter().map(TruncSeries::order).min().unwrap_or(0);
        (0..k)
            .map(|i| {
                let mut acc = v[i].derivative().shl(2).truncate(n);
                for j in 0..k {
                    if !self.a[i][j].is_zero() && !v[j].is_zero() {
                        acc = acc.add(&self.a[i][j].mul(&v[j]));
                    }
                }
                acc.truncate(n)
            })
            .collect()
    }

    pub fn act_b(&self, v: &[TruncSeries]) -> Vec<TruncSeries> {
        let n = v.iter().map(TruncSeries::order).min().unwrap_or(0);
        v.iter().map(|c| c.shl(1).truncate(n)).collect()
    }

    /// dim E/(aE+bE) and, when it is 1, a witness generator index: the
    /// class of a basis vector outside the column span of A(0).
    pub fn monogenic_witness(&self) -> Result<(usize, Option<usize>)> {
        let k = self.rank();
        // columns of A(0) as rows for rank computation
        let a0: Vec<Vec<Scalar>> = (0..k)
            .map(|i| (0..k).map(|j| self.a[i][j].coeff(0).clone()).collect())
            .collect();
        let (rank0, _) = scalar_nullspace(&a0)?;
        let dim = k - rank0;
        if dim != 1 {
            return Ok((dim, None));
        }
        for j in 0..k {
            // is e_j in the column span of A(0)? augment and re-rank
            let aug: Vec<Vec<Scalar>> = (0..k)
                .map(|i| {
                    let mut row: Vec<Scalar> =
                        (0..k).map(|c| self.a[i][c].coeff(0).clone()).collect();
                    row.push(if i == j { Scalar::one() } else { Scalar::zero() });
                    row
                })
                .collect();
            let (rank_aug, _) = scalar_nullspace(&aug)?;
            if rank_aug > rank0 {
                return Ok((1, Some(j)));
            }
        }
        Err(Error::DerivationFault(
            "dim 1 but no witness basis vector found".into(),
        ))
    }

    pub fn is_monogenic(&self) -> Result<bool> {
        Ok(self.monogenic_witness()?.0 == 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn a_action_on_basis() {
        let n = 8;
        let l0 = lam(5, 2);
        let x0 = XiElement::basis(l0.clone(), 0, 2, n);
        let x1 = XiElement::basis(l0.clone(), 1, 2, n);
        let ax0 = x0.act_a();
        // a·x0 = lambda0·b·x0
        assert_eq!(
            *ax0.comp(0).coeff(1),
            Scalar::from_ratio(5, 2)
        );
        assert!(ax0.comp(1).is_zero());
        // a·x1 = lambda0·b·x1 + b·x0
        let ax1 = x1.act_a();
        assert_eq!(*ax1.comp(1).coeff(1), Scalar::from_ratio(5, 2));
        assert_eq!(*ax1.comp(0).coeff(1), Scalar::one());
    }

    #[test]
    fn commutator_is_b_squared() {
        let n = 10;
        let l0 = lam(7, 3);
        // a random-ish element
        let mut x = XiElement::basis(l0.clone(), 1, 3, n)
            .mul_series(&TruncSeries::from_ints(VarTag::B, &[1, 2, 0, 5], n));
        x = x.add(
            &XiElement::basis(l0.clone(), 2, 3, n)
                .mul_series(&TruncSeries::from_ints(VarTag::B, &[3, 0, 1], n)),
        );
        let lhs = x.act_b().act_a().sub(&x.act_a().act_b());
        let rhs = x.act_b().act_b();
        // compare at order n-1 (derivative costs one order)
        for j in 0..3 {
            assert!(lhs.comp(j).truncate(n - 1).eq_trunc(&rhs.comp(j)));
        }
    }

    #[test]
    fn monomials_and_leading_pochhammer() {
        let n = 10;
        let l0 = lam(3, 2);
        let m = monomial_to_abstract(l0.clone(), 0, 2, 3, n);
        assert_eq!(m, XiElement::basis(l0.clone(), 2, 3, n));
        let m11 = monomial_to_abstract(l0.clone(), 1, 1, 3, n);
        assert_eq!(*m11.comp(1).coeff(1), Scalar::from_ratio(3, 2));
        assert_eq!(*m11.comp(0).coeff(1), Scalar::one());
        // (m,i) = (p,0): pochhammer leading scalar
        let p = 4;
        let mp = monomial_to_abstract(l0.clone(), p, 0, 1, n);
        assert_eq!(mp.comp(0).valuation(), Some(p));
        assert_eq!(
            *mp.comp(0).coeff(p),
            Scalar::from_rat(pochhammer(&l0, p))
        );
    }

    #[test]
    fn express_in_span_examples() {
        let n = 10;
        let l0 = lam(5, 2);
        let x0 = XiElement::basis(l0.clone(), 0, 2, n);
        let x1 = XiElement::basis(l0.clone(), 1, 2, n);
        let s = TruncSeries::from_ints(VarTag::B, &[1, 3, 0, 2], n);
        let (c, eff) = express_in_span(&x0.mul_series(&s), &[&x0]).unwrap();
        assert_eq!(eff, n);
        assert!(c[0].eq_trunc(&s));
        // a·x1 in {x1, x0} -> {lambda0·b, b}
        let ax1 = x1.act_a();
        let (c2, _) = express_in_span(&ax1, &[&x1, &x0]).unwrap();
        assert_eq!(*c2[0].coeff(1), Scalar::from_ratio(5, 2));
        assert_eq!(*c2[1].coeff(1), Scalar::one());
        assert!(c2[0].coeff(0).is_zero());
    }

    #[test]
    fn function_monomial_round_trip() {
        let n = 8;
        let l0 = lam(7, 2);
        let mut x = monomial_to_abstract(l0.clone(), 2, 1, 3, n)
            .mul_series(&TruncSeries::from_ints(VarTag::B, &[1, -1], n));
        x = x.add(
            &XiElement::basis(l0.clone(), 2, 3, n)
                .mul_series(&TruncSeries::from_ints(VarTag::B, &[2, 0, 3], n)),
        );
        let d = to_function_monomials(&x);
        let back = from_function_monomials(&d, l0, 3, n);
        assert_eq!(back, x);
    }

    #[test]
    fn xi_is_simple_pole_and_modules_behave() {
        let n = 8;
        let l0 = lam(5, 2);
        let x = XiElement::basis(l0.clone(), 2, 3, n)
            .mul_series(&TruncSeries::from_ints(VarTag::B, &[1, 4], n));
        let ax = x.act_a();
        for j in 0..3 {
            assert!(ax.comp(j).valuation().map(|v| v >= 1).unwrap_or(true));
        }
        let lam_s = Scalar::from_ratio(5, 2);
        let e = MatrixModule::e_lambda(&lam_s, n);
        assert!(e.is_simple_pole());
        assert!(e.is_monogenic().unwrap());
        let xi2 = MatrixModule::xi_module(&lam_s, 2, n);
        assert!(xi2.is_simple_pole());
        // Xi^(1) as a lattice is not monogenic (dim E/(aE+bE) = 2)
        assert_eq!(xi2.monogenic_witness().unwrap().0, 2);
        // direct sum E_lambda ⊕ E_lambda: dim 2
        let z = TruncSeries::zero(VarTag::B, n);
        let bl = TruncSeries::gen(VarTag::B, n).scale(&lam_s);
        let sum = MatrixModule::new(vec![
            vec![bl.clone(), z.clone()],
            vec![z, bl],
        ]);
        assert_eq!(sum.monogenic_witness().unwrap().0, 2);
    }
}
