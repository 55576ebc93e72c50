//! Exact coefficient scalars: arbitrary-precision rationals, optionally
//! extended by named parameter indeterminates (polynomials over Q).
//!
//! Polynomials are kept canonical (sorted monomial map, no zero
//! coefficients, constants collapse to the rational variant), so `==` is
//! semantic equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Power product of parameter names; no zero exponents stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(BTreeMap<String, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(name: &str) -> Self {
        let mut m = BTreeMap::new();
        m.insert(name.to_string(), 1);
        Monomial(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (v, e) in &other.0 {
            *out.entry(v.clone()).or_insert(0) += e;
        }
        Monomial(out)
    }

    /// Exact quotient, or `None` when some exponent of `other` exceeds ours.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = self.0.clone();
        for (v, e) in &other.0 {
            match out.get_mut(v) {
                Some(f) if *f >= *e => {
                    *f -= e;
                    if *f == 0 {
                        out.remove(v);
                    }
                }
                _ => return None,
            }
        }
        Some(Monomial(out))
    }

    /// Graded-lex order (a proper monomial order, used for division).
    pub fn cmp_grlex(&self, other: &Monomial) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| {
                // lex on the sorted variable list: earlier variable with a
                // higher exponent wins
                let mut it_a = self.0.iter();
                let mut it_b = other.0.iter();
                loop {
                    match (it_a.next(), it_b.next()) {
                        (None, None) => return Ordering::Equal,
                        (None, Some(_)) => return Ordering::Less,
                        (Some(_), None) => return Ordering::Greater,
                        (Some((va, ea)), Some((vb, eb))) => {
                            // a smaller variable name means "more significant"
                            match va.cmp(vb) {
                                Ordering::Less => return Ordering::Greater,
                                Ordering::Greater => return Ordering::Less,
                                Ordering::Equal => match ea.cmp(eb) {
                                    Ordering::Equal => continue,
                                    ord => return ord,
                                },
                            }
                        }
                    }
                }
            })
    }
}

/// Exact scalar: a rational or a polynomial in named parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(Rat),
    Poly(BTreeMap<Monomial, Rat>),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(Rat::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(Rat::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rat(Rat::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Rat(Rat::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rat(r: Rat) -> Self {
        Scalar::Rat(r)
    }

    pub fn param(name: &str) -> Self {
        let mut m = BTreeMap::new();
        m.insert(Monomial::var(name), Rat::one());
        Scalar::Poly(m)
    }

    fn normalize(map: BTreeMap<Monomial, Rat>) -> Scalar {
        let mut map: BTreeMap<Monomial, Rat> =
            map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if map.is_empty() {
            return Scalar::zero();
        }
        if map.len() == 1 {
            if let Some(c) = map.get(&Monomial::one()) {
                return Scalar::Rat(c.clone());
            }
        }
        let _ = &mut map;
        Scalar::Poly(map)
    }

    fn as_map(&self) -> BTreeMap<Monomial, Rat> {
        match self {
            Scalar::Rat(r) => {
                let mut m = BTreeMap::new();
                if !r.is_zero() {
                    m.insert(Monomial::one(), r.clone());
                }
                m
            }
            Scalar::Poly(m) => m.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_one())
    }

    /// The rational value, when this scalar is a constant polynomial.
    pub fn as_rational(&self) -> Option<&Rat> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Poly(_) => None,
        }
    }

    /// Units of Q[params] are the nonzero rationals.
    pub fn is_unit(&self) -> bool {
        matches!(self, Scalar::Rat(r) if !r.is_zero())
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => {
                let mut m = self.as_map();
                for (mon, c) in other.as_map() {
                    let e = m.entry(mon).or_insert_with(Rat::zero);
                    *e += c;
                }
                Scalar::normalize(m)
            }
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Poly(m) => {
                Scalar::Poly(m.iter().map(|(k, v)| (k.clone(), -v)).collect())
            }
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => {
                if self.is_zero() || other.is_zero() {
                    return Scalar::zero();
                }
                let mut out: BTreeMap<Monomial, Rat> = BTreeMap::new();
                for (ma, ca) in self.as_map() {
                    for (mb, cb) in other.as_map() {
                        let m = ma.mul(&mb);
                        let e = out.entry(m).or_insert_with(Rat::zero);
                        *e += &ca * &cb;
                    }
                }
                Scalar::normalize(out)
            }
        }
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse of a unit scalar.
    pub fn inverse(&self) -> Result<Scalar> {
        match self {
            Scalar::Rat(r) if !r.is_zero() => Ok(Scalar::Rat(r.recip())),
            _ => Err(Error::NotInvertible { valuation: None }),
        }
    }

    fn leading_grlex(map: &BTreeMap<Monomial, Rat>) -> (&Monomial, &Rat) {
        map.iter()
            .max_by(|(a, _), (b, _)| a.cmp_grlex(b))
            .expect("nonempty")
    }

    /// Exact division. Succeeds for unit divisors and for polynomial
    /// divisors that divide exactly; fails otherwise.
    pub fn checked_div(&self, divisor: &Scalar) -> Result<Scalar> {
        if divisor.is_zero() {
            return Err(Error::InexactDivision("division by zero".into()));
        }
        if let Scalar::Rat(d) = divisor {
            return Ok(self.mul(&Scalar::Rat(d.recip())));
        }
        if self.is_zero() {
            return Ok(Scalar::zero());
        }
        // leading-term division in graded-lex order
        let dmap = divisor.as_map();
        let (dlm, dlc) = Self::leading_grlex(&dmap);
        let mut rem = self.as_map();
        let mut quo: BTreeMap<Monomial, Rat> = BTreeMap::new();
        while !rem.is_empty() {
            let (rlm, rlc) = {
                let (m, c) = Self::leading_grlex(&rem);
                (m.clone(), c.clone())
            };
            let qm = rlm.div(dlm).ok_or_else(|| {
                Error::InexactDivision(format!("{} by {}", self, divisor))
            })?;
            let qc = &rlc / dlc;
            // rem -= qc*qm * divisor
            for (m, c) in &dmap {
                let t = qm.mul(m);
                let e = rem.entry(t).or_insert_with(Rat::zero);
                *e -= &qc * c;
            }
            rem.retain(|_, c| !c.is_zero());
            quo.insert(qm, qc);
        }
        Ok(Scalar::normalize(quo))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn rat_str(r: &Rat) -> String {
            if r.denom().is_one() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        fn mono_str(m: &Monomial) -> String {
            m.0.iter()
                .map(|(v, e)| {
                    if *e == 1 {
                        v.clone()
                    } else {
                        format!("{}^{}", v, e)
                    }
                })
                .collect::<Vec<_>>()
                .join("*")
        }
        match self {
            Scalar::Rat(r) => write!(f, "{}", rat_str(r)),
            Scalar::Poly(map) => {
                let mut terms: Vec<(&Monomial, &Rat)> = map.iter().collect();
                terms.sort_by(|(a, _), (b, _)| b.cmp_grlex(a));
                let mut out = String::new();
                for (i, (m, c)) in terms.iter().enumerate() {
                    let neg = c.is_negative();
                    let mag = if neg { -*c } else { (*c).clone() };
                    if i == 0 {
                        if neg {
                            out.push('-');
                        }
                    } else {
                        out.push_str(if neg { " - " } else { " + " });
                    }
                    if m.is_one() {
                        out.push_str(&rat_str(&mag));
                    } else if mag.is_one() {
                        out.push_str(&mono_str(m));
                    } else {
                        out.push_str(&format!("{}*{}", rat_str(&mag), mono_str(m)));
                    }
                }
                write!(f, "{}", out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn rationals_stay_reduced() {
        let half = Scalar::from_ratio(2, 4);
        assert_eq!(half, Scalar::from_ratio(1, 2));
        assert_eq!(format!("{}", half), "1/2");
    }

    #[test]
    fn constants_collapse_out_of_poly_form() {
        let sigma = Scalar::param("sigma");
        let p = sigma.mul(&s(0));
        assert!(p.is_zero());
        let q = sigma.sub(&sigma);
        assert_eq!(q, Scalar::zero());
        let r = sigma.add(&s(1)).sub(&sigma);
        assert_eq!(r, s(1));
        assert!(r.as_rational().is_some());
    }

    #[test]
    fn poly_arithmetic_and_display() {
        let x = Scalar::param("sigma");
        let y = Scalar::param("theta2");
        let p = x.add(&y).mul(&x.sub(&y));
        let expect = x.mul(&x).sub(&y.mul(&y));
        assert_eq!(p, expect);
        assert_eq!(format!("{}", x.mul(&x).add(&s(1))), "sigma^2 + 1");
    }

    #[test]
    fn exact_division_succeeds_and_fails() {
        let x = Scalar::param("sigma");
        let p = x.pow(2).sub(&s(1)); // sigma^2 - 1
        let d = x.sub(&s(1)); // sigma - 1
        let q = p.checked_div(&d).unwrap();
        assert_eq!(q, x.add(&s(1)));
        assert!(p.checked_div(&x.add(&s(2))).is_err());
        // rational divisor always works
        assert_eq!(p.checked_div(&s(2)).unwrap().mul(&s(2)), p);
    }

    #[test]
    fn multivariate_exact_division() {
        let x = Scalar::param("x");
        let y = Scalar::param("y");
        let d = x.add(&y.mul(&s(2)));
        let q0 = x.mul(&y).add(&s(3)).add(&y.pow(2));
        let p = d.mul(&q0);
        assert_eq!(p.checked_div(&d).unwrap(), q0);
    }

    #[test]
    fn units_are_nonzero_rationals() {
        assert!(s(3).is_unit());
        assert!(!Scalar::zero().is_unit());
        assert!(!Scalar::param("sigma").is_unit());
        assert_eq!(s(4).inverse().unwrap(), Scalar::from_ratio(1, 4));
        assert!(Scalar::param("sigma").inverse().is_err());
    }
}
