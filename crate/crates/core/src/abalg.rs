//! The noncommutative algebra on generators a, b with a·b − b·a = b²,
//! truncated by total weight (a and b both have weight 1; the relation is
//! weight-homogeneous, so truncation is a two-sided ideal).
//!
//! Canonical normal order is "b-left": every element is stored as
//! sum c_{nu,j} · b^nu · a^j. Commutation is performed with
//! a·b^m = b^m·a + m·b^{m+1}.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{TruncSeries, VarTag};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbElement {
    weight_cap: usize,
    /// (b-power, a-power) -> coefficient; no zero entries, all keys have
    /// nu + j < weight_cap.
    terms: BTreeMap<(usize, usize), Scalar>,
}

impl AbElement {
    pub fn zero(weight_cap: usize) -> Self {
        AbElement {
            weight_cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(weight_cap: usize) -> Self {
        Self::term(0, 0, Scalar::one(), weight_cap)
    }

    pub fn gen_a(weight_cap: usize) -> Self {
        Self::term(0, 1, Scalar::one(), weight_cap)
    }

    pub fn gen_b(weight_cap: usize) -> Self {
        Self::term(1, 0, Scalar::one(), weight_cap)
    }

    /// c · b^nu · a^j (dropped silently when the weight cap cuts it).
    pub fn term(nu: usize, j: usize, c: Scalar, weight_cap: usize) -> Self {
        let mut terms = BTreeMap::new();
        if nu + j < weight_cap && !c.is_zero() {
            terms.insert((nu, j), c);
        }
        AbElement { weight_cap, terms }
    }

    /// Embeds a series in b.
    pub fn from_b_series(s: &TruncSeries, weight_cap: usize) -> Self {
        let mut out = Self::zero(weight_cap);
        for m in 0..s.order().min(weight_cap) {
            let c = s.coeff(m);
            if !c.is_zero() {
                out.terms.insert((m, 0), c.clone());
            }
        }
        out
    }

    /// Embeds a series in a (e.g. theta(a)).
    pub fn from_a_series(s: &TruncSeries, weight_cap: usize) -> Self {
        let mut out = Self::zero(weight_cap);
        for m in 0..s.order().min(weight_cap) {
            let c = s.coeff(m);
            if !c.is_zero() {
                out.terms.insert((0, m), c.clone());
            }
        }
        out
    }

    pub fn weight_cap(&self) -> usize {
        self.weight_cap
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff_of(&self, nu: usize, j: usize) -> Scalar {
        self.terms.get(&(nu, j)).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Largest a-power with a nonzero coefficient, if any term exists.
    pub fn a_degree(&self) -> Option<usize> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    /// The coefficient series c_j(b) of a^j, at order weight_cap - j.
    pub fn coeff_series(&self, j: usize) -> TruncSeries {
        let order = self.weight_cap.saturating_sub(j);
        let mut s = TruncSeries::zero(VarTag::B, order);
        for (&(nu, jj), c) in &self.terms {
            if jj == j {
                s.set_coeff(nu, c.clone());
            }
        }
        s
    }

    fn insert_add(&mut self, nu: usize, j: usize, c: &Scalar) {
        if nu + j >= self.weight_cap || c.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry((nu, j))
            .or_insert_with(Scalar::zero)
            .add(c);
        if entry.is_zero() {
            self.terms.remove(&(nu, j));
        } else {
            self.terms.insert((nu, j), entry);
        }
    }

    pub fn truncate(&self, weight_cap: usize) -> Self {
        let mut out = Self::zero(weight_cap.min(self.weight_cap));
        for (&(nu, j), c) in &self.terms {
            out.insert_add(nu, j, c);
        }
        out
    }

    pub fn add(&self, other: &AbElement) -> Self {
        let mut out = self.truncate(self.weight_cap.min(other.weight_cap));
        for (&(nu, j), c) in &other.terms {
            out.insert_add(nu, j, c);
        }
        out
    }

    pub fn sub(&self, other: &AbElement) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        AbElement {
            weight_cap: self.weight_cap,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, v.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.weight_cap);
        }
        AbElement {
            weight_cap: self.weight_cap,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, v.mul(c)))
                .collect(),
        }
    }

    /// Left multiplication by a series in b (b-series commute with the
    /// left coefficients, so this is coefficientwise).
    pub fn mul_b_series_left(&self, s: &TruncSeries) -> Self {
        let mut out = Self::zero(self.weight_cap);
        for (&(nu, j), c) in &self.terms {
            for m in 0..s.order() {
                let sc = s.coeff(m);
                if !sc.is_zero() {
                    out.insert_add(nu + m, j, &sc.mul(c));
                }
            }
        }
        out
    }

    /// Normal-ordered product. Exact on all terms of weight < min cap.
    pub fn normal_mul(&self, other: &AbElement) -> Self {
        let cap = self.weight_cap.min(other.weight_cap);
        let mut out = Self::zero(cap);
        for (&(nu1, j1), c1) in &self.terms {
            if nu1 + j1 >= cap {
                continue;
            }
            for (&(nu2, j2), c2) in &other.terms {
                if nu1 + j1 + nu2 + j2 >= cap {
                    continue;
                }
                // b^nu1 (a^j1 b^nu2) a^j2
                let c = c1.mul(c2);
                for (&(nu, j), k) in apow_bpow(j1, nu2).iter() {
                    out.insert_add(
                        nu1 + nu,
                        j + j2,
                        &c.mul(&Scalar::from_rat(k.clone())),
                    );
                }
            }
        }
        out
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::one(self.weight_cap);
        for _ in 0..n {
            acc = acc.normal_mul(self);
        }
        acc
    }

    /// Monic normalization: left-multiply by the inverse of the top
    /// a-degree coefficient series (which must be a unit series).
    pub fn monic(&self) -> Result<Self> {
        let k = self.a_degree().ok_or(Error::ZeroGenerator)?;
        let lead = self.coeff_series(k);
        let inv = lead.invert()?;
        Ok(self.mul_b_series_left(&inv))
    }
}

/// Normal order of a^j · b^nu, with exact rational coefficients:
/// returns the map (b-power, a-power) -> coefficient.
fn apow_bpow(j: usize, nu: usize) -> BTreeMap<(usize, usize), num::BigRational> {
    use num::{BigRational, One};
    let mut cur: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
    cur.insert((nu, 0), BigRational::one());
    // apply "multiply by a on the left" j times: a·b^m = b^m·a + m·b^{m+1}
    for _ in 0..j {
        let mut next: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
        for (&(m, p), c) in &cur {
            *next.entry((m, p + 1)).or_default() += c;
            if m > 0 {
                *next.entry((m + 1, p)).or_default() +=
                    c * BigRational::from_integer(m.into());
            }
        }
        cur = next;
    }
    cur
}

/// The closed form a^n·b = sum_{p=1}^{n+1} n!/(n-p+1)! · b^p · a^{n-p+1}.
pub fn anb_closed_form(n: usize, weight_cap: usize) -> Result<AbElement> {
    if n + 2 > weight_cap {
        return Err(Error::InsufficientWeightCap {
            needed: n + 2,
            have: weight_cap,
        });
    }
    let mut out = AbElement::zero(weight_cap);
    // n!/(n-p+1)! = n·(n-1)···(n-p+2), a falling factorial of length p-1
    let mut coeff: i64 = 1;
    for p in 1..=(n + 1) {
        out = out.add(&AbElement::term(
            p,
            n + 1 - p,
            Scalar::from_int(coeff),
            weight_cap,
        ));
        if p <= n {
            coeff *= (n + 1 - p) as i64;
        }
    }
    Ok(out)
}

/// A change of variable theta with theta(0) = 0 and unit theta'(0) = r,
/// together with its cached compositional inverse eta.
#[derive(Debug, Clone)]
pub struct ChangeOfVariable {
    theta: TruncSeries,
    eta: TruncSeries,
    r: Scalar,
}

impl ChangeOfVariable {
    pub fn new(theta: TruncSeries) -> Result<Self> {
        if theta.order() > 0 && !theta.coeff(0).is_zero() {
            return Err(Error::CompositionUndefined);
        }
        if theta.order() < 2 || !theta.coeff(1).is_unit() {
            return Err(Error::NotInvertibleForComposition);
        }
        let eta = theta.compositional_inverse()?;
        let r = theta.coeff(1).clone();
        Ok(ChangeOfVariable { theta, eta, r })
    }

    pub fn identity(order: usize) -> Self {
        Self::new(TruncSeries::gen(VarTag::A, order)).expect("identity is valid")
    }

    pub fn theta(&self) -> &TruncSeries {
        &self.theta
    }

    pub fn eta(&self) -> &TruncSeries {
        &self.eta
    }

    pub fn r(&self) -> &Scalar {
        &self.r
    }

    /// The inverse change of variable (theta and eta swapped).
    pub fn inverse(&self) -> Self {
        ChangeOfVariable {
            theta: self.eta.clone(),
            eta: self.theta.clone(),
            r: self.r.inverse().expect("r is a unit"),
        }
    }

    /// Theta(a) = theta(a) as a normal-ordered element.
    pub fn image_a(&self, weight_cap: usize) -> AbElement {
        AbElement::from_a_series(&self.theta, weight_cap)
    }

    /// Theta(b) = b·theta'(a) as a normal-ordered element.
    pub fn image_b(&self, weight_cap: usize) -> AbElement {
        let d = self.theta.derivative();
        let mut out = AbElement::zero(weight_cap);
        for m in 0..d.order() {
            let c = d.coeff(m);
            if !c.is_zero() && 1 + m < weight_cap {
                out = out.add(&AbElement::term(1, m, c.clone(), weight_cap));
            }
        }
        out
    }
}

/// The unital algebra endomorphism a -> theta(a), b -> b·theta'(a),
/// applied term by term and normal-ordered.
pub fn theta_endomorphism(cov: &ChangeOfVariable, u: &AbElement) -> AbElement {
    let w = u.weight_cap();
    let ia = cov.image_a(w);
    let ib = cov.image_b(w);
    // cache powers as needed
    let mut pa: Vec<AbElement> = vec![AbElement::one(w)];
    let mut pb: Vec<AbElement> = vec![AbElement::one(w)];
    let mut out = AbElement::zero(w);
    for (&(nu, j), c) in u.terms() {
        while pb.len() <= nu {
            let next = pb.last().unwrap().normal_mul(&ib);
            pb.push(next);
        }
        while pa.len() <= j {
            let next = pa.last().unwrap().normal_mul(&ia);
            pa.push(next);
        }
        out = out.add(&pb[nu].normal_mul(&pa[j]).scale(c));
    }
    out
}

/// Right division by a - nu·b: returns (Q, R) with P = Q·(a - nu·b) + R
/// and R a pure series in b.
pub fn right_divide_linear(p: &AbElement, nu: &Scalar) -> (AbElement, TruncSeries) {
    let w = p.weight_cap();
    let divisor = AbElement::gen_a(w).sub(&AbElement::gen_b(w).scale(nu));
    let mut r = p.clone();
    let mut q = AbElement::zero(w);
    while let Some(d) = r.a_degree() {
        if d == 0 {
            break;
        }
        let top = r.coeff_series(d);
        let mut piece = AbElement::zero(w);
        for m in 0..top.order() {
            let c = top.coeff(m);
            if !c.is_zero() {
                piece = piece.add(&AbElement::term(m, d - 1, c.clone(), w));
            }
        }
        q = q.add(&piece);
        r = r.sub(&piece.normal_mul(&divisor));
    }
    (q, r.coeff_series(0))
}

/// The standard presentation product
/// (a - l1·b)·S1^{-1}·(a - l2·b)···S_{k-1}^{-1}·(a - lk·b),
/// returned together with its monic normalization.
pub fn standard_form_compose(
    lambdas: &[Scalar],
    units: &[TruncSeries],
    weight_cap: usize,
) -> Result<(AbElement, AbElement)> {
    assert_eq!(lambdas.len(), units.len() + 1, "k = len(units)+1");
    for (i, s) in units.iter().enumerate() {
        if s.order() == 0 || !s.coeff(0).is_one() {
            return Err(Error::UnitNormalization { index: i + 1 });
        }
    }
    let w = weight_cap;
    let linear = |l: &Scalar| AbElement::gen_a(w).sub(&AbElement::gen_b(w).scale(l));
    let mut p = linear(&lambdas[0]);
    for (i, s) in units.iter().enumerate() {
        let sinv = AbElement::from_b_series(&s.invert()?, w);
        p = p.normal_mul(&sinv).normal_mul(&linear(&lambdas[i + 1]));
    }
    let monic = p.monic()?;
    Ok((p, monic))
}

impl fmt::Display for AbElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 (cap {})", self.weight_cap);
        }
        // sort by descending a-power, then ascending b-power
        let mut keys: Vec<&(usize, usize)> = self.terms.keys().collect();
        keys.sort_by(|(n1, j1), (n2, j2)| j2.cmp(j1).then(n1.cmp(n2)));
        let mut parts = Vec::new();
        for &&(nu, j) in &keys {
            let c = &self.terms[&(nu, j)];
            let cs = format!("{}", c);
            let mut factors = Vec::new();
            if !(c.is_one() && (nu > 0 || j > 0)) {
                if cs.contains('+') || (cs.contains('-') && !cs.starts_with('-')) {
                    factors.push(format!("({})", cs));
                } else {
                    factors.push(cs);
                }
            }
            if nu == 1 {
                factors.push("b".into());
            } else if nu > 1 {
                factors.push(format!("b^{}", nu));
            }
            if j == 1 {
                factors.push("a".into());
            } else if j > 1 {
                factors.push(format!("a^{}", j));
            }
            parts.push(factors.join("*"));
        }
        write!(f, "{} (cap {})", parts.join(" + "), self.weight_cap)
    }
}
