//! Truncated formal power series in one commuting variable over exact
//! scalars.
//!
//! The truncation order is explicit: a series of order `N` stores the
//! coefficients of `x^0 .. x^(N-1)` and guarantees nothing beyond.
//! Arithmetic truncates to the minimum order of its inputs, so precision
//! loss is always visible in the result's order.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Informational variable tag; arithmetic ignores it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarTag {
    B,
    S,
    T,
    Beta,
    A,
}

impl VarTag {
    pub fn name(self) -> &'static str {
        match self {
            VarTag::B => "b",
            VarTag::S => "s",
            VarTag::T => "t",
            VarTag::Beta => "beta",
            VarTag::A => "a",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    var: VarTag,
    coeffs: Vec<Scalar>,
}

impl TruncSeries {
    pub fn new(var: VarTag, coeffs: Vec<Scalar>) -> Self {
        TruncSeries { var, coeffs }
    }

    pub fn zero(var: VarTag, order: usize) -> Self {
        TruncSeries {
            var,
            coeffs: vec![Scalar::zero(); order],
        }
    }

    pub fn one(var: VarTag, order: usize) -> Self {
        let mut s = Self::zero(var, order);
        if order > 0 {
            s.coeffs[0] = Scalar::one();
        }
        s
    }

    pub fn constant(var: VarTag, c: Scalar, order: usize) -> Self {
        let mut s = Self::zero(var, order);
        if order > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    /// The variable itself.
    pub fn gen(var: VarTag, order: usize) -> Self {
        let mut s = Self::zero(var, order);
        if order > 1 {
            s.coeffs[1] = Scalar::one();
        }
        s
    }

    /// Convenience: polynomial from integer coefficients, at the given order.
    pub fn from_ints(var: VarTag, ints: &[i64], order: usize) -> Self {
        let mut s = Self::zero(var, order);
        for (m, &c) in ints.iter().enumerate() {
            if m < order {
                s.coeffs[m] = Scalar::from_int(c);
            }
        }
        s
    }

    pub fn var(&self) -> VarTag {
        self.var
    }

    pub fn retag(mut self, var: VarTag) -> Self {
        self.var = var;
        self
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, m: usize) -> &Scalar {
        &self.coeffs[m]
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, m: usize, c: Scalar) {
        self.coeffs[m] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// Least index with nonzero coefficient; `None` means every stored
    /// coefficient vanishes ("infinite" valuation at this truncation).
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.coeffs.len());
        TruncSeries {
            var: self.var,
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    /// Extend with explicit zeros: declares the series exactly known to
    /// the larger order (use only for polynomial data).
    pub fn pad_to(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() < order {
            coeffs.push(Scalar::zero());
        }
        TruncSeries {
            var: self.var,
            coeffs,
        }
    }

    /// Equality up to the minimum of the two orders.
    pub fn eq_trunc(&self, other: &TruncSeries) -> bool {
        let n = self.order().min(other.order());
        self.coeffs[..n] == other.coeffs[..n]
    }

    pub fn add(&self, other: &TruncSeries) -> Self {
        let n = self.order().min(other.order());
        TruncSeries {
            var: self.var,
            coeffs: (0..n)
                .map(|m| self.coeffs[m].add(&other.coeffs[m]))
                .collect(),
        }
    }

    pub fn sub(&self, other: &TruncSeries) -> Self {
        let n = self.order().min(other.order());
        TruncSeries {
            var: self.var,
            coeffs: (0..n)
                .map(|m| self.coeffs[m].sub(&other.coeffs[m]))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TruncSeries {
            var: self.var,
            coeffs: self.coeffs.iter().map(Scalar::neg).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        TruncSeries {
            var: self.var,
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn mul(&self, other: &TruncSeries) -> Self {
        let n = self.order().min(other.order());
        let mut coeffs = vec![Scalar::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        TruncSeries {
            var: self.var,
            coeffs,
        }
    }

    /// Multiply by `x^m`; the result is exact to order `N + m`.
    pub fn shl(&self, m: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); m];
        coeffs.extend_from_slice(&self.coeffs);
        TruncSeries {
            var: self.var,
            coeffs,
        }
    }

    /// Exact quotient by `x^m`; requires valuation >= m.
    pub fn shr(&self, m: usize) -> Result<Self> {
        if self.coeffs.iter().take(m).any(|c| !c.is_zero()) {
            return Err(Error::NotDivisible);
        }
        Ok(TruncSeries {
            var: self.var,
            coeffs: self.coeffs.iter().skip(m).cloned().collect(),
        })
    }

    pub fn derivative(&self) -> Self {
        let n = self.order().saturating_sub(1);
        TruncSeries {
            var: self.var,
            coeffs: (0..n)
                .map(|m| self.coeffs[m + 1].mul(&Scalar::from_int((m + 1) as i64)))
                .collect(),
        }
    }

    /// Primitive with zero constant term; order grows by one.
    pub fn primitive(&self) -> Self {
        let mut coeffs = vec![Scalar::zero(); self.order() + 1];
        for (m, c) in self.coeffs.iter().enumerate() {
            coeffs[m + 1] = c
                .checked_div(&Scalar::from_int((m + 1) as i64))
                .expect("integer division");
        }
        TruncSeries {
            var: self.var,
            coeffs,
        }
    }

    /// Exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if self.order() > 0 && !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let n = self.order();
        let mut e = vec![Scalar::zero(); n];
        if n > 0 {
            e[0] = Scalar::one();
        }
        for m in 1..n {
            // m*e_m = sum_{j=1..m} j*s_j*e_{m-j}
            let mut acc = Scalar::zero();
            for j in 1..=m {
                let t = self.coeffs[j]
                    .mul(&Scalar::from_int(j as i64))
                    .mul(&e[m - j]);
                acc = acc.add(&t);
            }
            e[m] = acc
                .checked_div(&Scalar::from_int(m as i64))
                .expect("integer division");
        }
        Ok(TruncSeries {
            var: self.var,
            coeffs: e,
        })
    }

    /// Multiplicative inverse; requires the constant term to be a unit
    /// scalar.
    pub fn invert(&self) -> Result<Self> {
        if self.order() == 0 || !self.coeffs[0].is_unit() {
            return Err(Error::NotInvertible {
                valuation: self.valuation(),
            });
        }
        Self::one(self.var, self.order()).div(self)
    }

    /// Exact series division. The divisor's valuation `v` is shifted out
    /// (the dividend must have valuation >= v) and the result's order
    /// shrinks by `v`. Coefficient divisions are exact scalar divisions,
    /// so non-unit polynomial leading scalars are allowed as long as each
    /// step divides exactly.
    pub fn div(&self, divisor: &TruncSeries) -> Result<Self> {
        let v = match divisor.valuation() {
            Some(v) => v,
            None => {
                return Err(Error::NotInvertible {
                    valuation: None,
                })
            }
        };
        let n = self.order().min(divisor.order());
        let out_len = n.saturating_sub(v);
        if self.is_zero() {
            return Ok(Self::zero(self.var, out_len));
        }
        if let Some(va) = self.valuation() {
            if va < v {
                return Err(Error::NotDivisible);
            }
        }
        let lead = &divisor.coeffs[v];
        let mut c = vec![Scalar::zero(); out_len];
        for m in 0..out_len {
            let mut acc = self.coeffs[m + v].clone();
            for j in 0..m {
                // subtract c_j * divisor_{m-j+v}
                let idx = m - j + v;
                if idx < divisor.order() {
                    acc = acc.sub(&c[j].mul(&divisor.coeffs[idx]));
                }
            }
            c[m] = acc.checked_div(lead)?;
        }
        Ok(TruncSeries {
            var: self.var,
            coeffs: c,
        })
    }

    /// Composition `self(inner)`; `inner` must vanish at 0.
    pub fn compose(&self, inner: &TruncSeries) -> Result<Self> {
        if inner.order() > 0 && !inner.coeffs[0].is_zero() {
            return Err(Error::CompositionUndefined);
        }
        let n = self.order().min(inner.order());
        let mut acc = Self::zero(inner.var, n);
        for m in (0..self.order().min(n)).rev() {
            acc = acc.mul(&inner.truncate(n));
            acc.coeffs[0] = acc.coeffs[0].add(&self.coeffs[m]);
        }
        Ok(acc)
    }

    /// Compositional inverse: the unique `eta` with `eta(self) = x`.
    /// Requires zero constant term and a unit linear coefficient.
    pub fn compositional_inverse(&self) -> Result<Self> {
        if self.order() > 0 && !self.coeffs[0].is_zero() {
            return Err(Error::CompositionUndefined);
        }
        if self.order() < 2 || !self.coeffs[1].is_unit() {
            return Err(Error::NotInvertibleForComposition);
        }
        let n = self.order();
        let t1 = &self.coeffs[1];
        let mut eta = vec![Scalar::zero(); n];
        // powers of self, built incrementally
        let mut power = Self::one(self.var, n); // self^m
        let mut partial = Self::zero(self.var, n); // sum_{m<cur} eta_m self^m
        for m in 1..n {
            power = power.mul(self);
            // choose eta_m so that [x^m](partial + eta_m*self^m) = delta_{m,1}
            let target = if m == 1 { Scalar::one() } else { Scalar::zero() };
            let have = partial.coeffs[m].clone();
            let lead = t1.pow(m as u32);
            eta[m] = target
                .sub(&have)
                .checked_div(&lead)
                .map_err(|_| Error::NotInvertibleForComposition)?;
            partial = partial.add(&power.scale(&eta[m]));
        }
        Ok(TruncSeries {
            var: self.var,
            coeffs: eta,
        })
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.var.name();
        let mut parts = Vec::new();
        for (m, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = format!("{}", c);
            let needs_parens = cs.contains('+') || (cs.contains('-') && !cs.starts_with('-'));
            let cs = if needs_parens && m > 0 {
                format!("({})", cs)
            } else {
                cs
            };
            let part = match m {
                0 => cs,
                1 if c.is_one() => v.to_string(),
                1 => format!("{}*{}", cs, v),
                _ if c.is_one() => format!("{}^{}", v, m),
                _ => format!("{}*{}^{}", cs, v, m),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            write!(f, "0 + O({}^{})", v, self.order())
        } else {
            write!(f, "{} + O({}^{})", parts.join(" + "), v, self.order())
        }
    }
}

/// Solves `G + x*G' = rhs` (the coefficient recurrence is
/// `(n+1)*G_n = rhs_n`, always solvable).
pub fn solve_euler_shifted(rhs: &TruncSeries) -> TruncSeries {
    let n = rhs.order();
    let mut g = TruncSeries::zero(rhs.var(), n);
    for m in 0..n {
        g.coeffs[m] = rhs.coeffs[m]
            .checked_div(&Scalar::from_int((m + 1) as i64))
            .expect("integer division");
    }
    g
}

/// Solves `(1 + x*S)*U + x*U' = -S` via `U = G*exp(-Sigma)` with `Sigma`
/// the zero-constant primitive of `S` and `G + x*G' = -S*exp(Sigma)`.
pub fn solve_ode_a(s: &TruncSeries) -> TruncSeries {
    let sigma = s.primitive();
    let e = sigma.exp().expect("zero constant term");
    let rhs = s.neg().mul(&e);
    let gamma = solve_euler_shifted(&rhs);
    let em = sigma.neg().exp().expect("zero constant term");
    gamma.mul(&em)
}

/// Solves `x*V' + V = -U*(1 + x*T) - T`.
pub fn solve_ode_b(u: &TruncSeries, t: &TruncSeries) -> TruncSeries {
    let one = TruncSeries::one(u.var(), u.order().min(t.order()));
    let rhs = u.neg().mul(&one.add(&t.shl(1))).sub(t);
    solve_euler_shifted(&rhs)
}
