//! Property-based laws for the whole stack: series ring calculus, the
//! noncommutative algebra, the Xi model, theme analysis, and the
//! change-of-variable functor.

use abtheme_core::abalg::{
    right_divide_linear, standard_form_compose, theta_endomorphism, AbElement,
    ChangeOfVariable,
};
use abtheme_core::changevar::pushforward_simple_pole;
use abtheme_core::scalar::Rat;
use abtheme_core::series::{solve_ode_a, solve_ode_b};
use abtheme_core::theme::{
    analyze_annihilator, annihilator_of, bernstein_polynomial, extract_rank2_parameter,
    rank_of,
};
use abtheme_core::ximodel::{express_in_span, monomial_to_abstract, MatrixModule, XiElement};
use abtheme_core::{Scalar, TruncSeries, VarTag};
use num::bigint::BigInt;
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

fn scalar_strategy() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Scalar::from_ratio(n, d))
}

fn nonzero_scalar_strategy() -> impl Strategy<Value = Scalar> {
    (1i64..=6, 1i64..=4, any::<bool>()).prop_map(|(n, d, neg)| {
        let s = Scalar::from_ratio(n, d);
        if neg {
            s.neg()
        } else {
            s
        }
    })
}

fn series_strategy(var: VarTag, order: usize) -> impl Strategy<Value = TruncSeries> {
    proptest::collection::vec(scalar_strategy(), order)
        .prop_map(move |cs| TruncSeries::new(var, cs))
}

/// A unit series with constant term 1.
fn unit_series_strategy(order: usize) -> impl Strategy<Value = TruncSeries> {
    series_strategy(VarTag::B, order).prop_map(move |mut s| {
        s.set_coeff(0, Scalar::one());
        s
    })
}

fn ab_strategy(cap: usize) -> impl Strategy<Value = AbElement> {
    proptest::collection::vec((0..cap, 0..cap, scalar_strategy()), 0..6).prop_map(
        move |terms| {
            let mut u = AbElement::zero(cap);
            for (nu, j, c) in terms {
                if nu + j < cap {
                    u = u.add(&AbElement::term(nu, j, c, cap));
                }
            }
            u
        },
    )
}

/// A change of variable theta = r·a + theta2·a² + theta3·a³ with r ≠ 0.
fn cov_strategy(order: usize) -> impl Strategy<Value = ChangeOfVariable> {
    (nonzero_scalar_strategy(), scalar_strategy(), scalar_strategy()).prop_map(
        move |(r, t2, t3)| {
            let mut t = TruncSeries::zero(VarTag::A, order);
            t.set_coeff(1, r);
            t.set_coeff(2, t2);
            t.set_coeff(3, t3);
            ChangeOfVariable::new(t).unwrap()
        },
    )
}

fn lambda0_strategy() -> impl Strategy<Value = Rat> {
    prop_oneof![
        Just(rat(1, 2)),
        Just(rat(3, 2)),
        Just(rat(5, 3)),
        Just(rat(7, 4)),
        Just(rat(3, 1)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn series_ring_laws(
        s in series_strategy(VarTag::B, 24),
        t in series_strategy(VarTag::B, 24),
        u in series_strategy(VarTag::B, 24),
    ) {
        prop_assert!(s.add(&t).add(&u).eq_trunc(&s.add(&t.add(&u))));
        prop_assert!(s.mul(&t).eq_trunc(&t.mul(&s)));
        prop_assert!(s.mul(&t.add(&u)).eq_trunc(&s.mul(&t).add(&s.mul(&u))));
        prop_assert!(s.mul(&t).mul(&u).eq_trunc(&s.mul(&t.mul(&u))));
    }

    #[test]
    fn series_valuation_multiplicative(
        s in series_strategy(VarTag::B, 16),
        t in series_strategy(VarTag::B, 16),
    ) {
        if let (Some(vs), Some(vt)) = (s.valuation(), t.valuation()) {
            // rational leading scalars: the product of the leading terms
            // cannot vanish
            if vs + vt < 16 {
                prop_assert_eq!(s.mul(&t).valuation(), Some(vs + vt));
            }
        }
    }

    #[test]
    fn exp_is_a_homomorphism(
        s in series_strategy(VarTag::B, 12),
        t in series_strategy(VarTag::B, 12),
    ) {
        let mut s = s;
        let mut t = t;
        s.set_coeff(0, Scalar::zero());
        t.set_coeff(0, Scalar::zero());
        let lhs = s.add(&t).exp().unwrap();
        let rhs = s.exp().unwrap().mul(&t.exp().unwrap());
        prop_assert!(lhs.eq_trunc(&rhs));
    }

    #[test]
    fn compositional_inverse_is_an_involution(
        lead in nonzero_scalar_strategy(),
        tail in proptest::collection::vec(scalar_strategy(), 10),
    ) {
        let mut t = TruncSeries::zero(VarTag::T, 12);
        t.set_coeff(1, lead);
        for (m, c) in tail.into_iter().enumerate() {
            t.set_coeff(m + 2, c);
        }
        let eta = t.compositional_inverse().unwrap();
        prop_assert!(eta.compose(&t).unwrap().eq_trunc(&TruncSeries::gen(VarTag::T, 12)));
        prop_assert!(eta.compositional_inverse().unwrap().eq_trunc(&t));
    }

    #[test]
    fn ode_solutions_satisfy_their_equations(
        s in series_strategy(VarTag::B, 10),
        t in series_strategy(VarTag::B, 10),
    ) {
        let n = 10;
        let b = TruncSeries::gen(VarTag::B, n);
        let one = TruncSeries::one(VarTag::B, n);
        // (A): (1 + b·S)·U + b·U' = -S
        let u = solve_ode_a(&s);
        let res_a = one
            .add(&b.mul(&s))
            .mul(&u)
            .add(&b.mul(&u.derivative()))
            .add(&s);
        prop_assert!(res_a.truncate(n - 1).is_zero());
        // (B): b·V' + V = -U·(1 + b·T) - T
        let v = solve_ode_b(&u, &t);
        let res_b = b
            .mul(&v.derivative())
            .add(&v)
            .add(&u.mul(&one.add(&b.mul(&t))))
            .add(&t);
        prop_assert!(res_b.truncate(n - 1).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn normal_mul_is_associative(
        u in ab_strategy(12),
        v in ab_strategy(12),
        w in ab_strategy(12),
    ) {
        prop_assert_eq!(
            u.normal_mul(&v).normal_mul(&w),
            u.normal_mul(&v.normal_mul(&w))
        );
    }

    #[test]
    fn theta_is_a_homomorphism(
        u in ab_strategy(12),
        v in ab_strategy(12),
        cov in cov_strategy(14),
    ) {
        prop_assert_eq!(
            theta_endomorphism(&cov, &u.normal_mul(&v)),
            theta_endomorphism(&cov, &u).normal_mul(&theta_endomorphism(&cov, &v))
        );
        // composing with the inverse change of variable is the identity
        let inv = cov.inverse();
        prop_assert_eq!(
            theta_endomorphism(&inv, &theta_endomorphism(&cov, &u)),
            u
        );
    }

    #[test]
    fn right_division_reconstructs(
        l1 in scalar_strategy(),
        l2 in scalar_strategy(),
        unit in unit_series_strategy(12),
        nu in scalar_strategy(),
    ) {
        let w = 12;
        let (_, p) = standard_form_compose(&[l1, l2], &[unit], w).unwrap();
        let (q, r) = right_divide_linear(&p, &nu);
        let lin = AbElement::gen_a(w).sub(&AbElement::gen_b(w).scale(&nu));
        let back = q.normal_mul(&lin).add(&AbElement::from_b_series(&r, w));
        prop_assert_eq!(back.truncate(w - 1), p.truncate(w - 1));
    }

    #[test]
    fn xi_satisfies_the_defining_relation(
        l0 in lambda0_strategy(),
        g0 in series_strategy(VarTag::B, 10),
        g1 in series_strategy(VarTag::B, 10),
        g2 in series_strategy(VarTag::B, 10),
    ) {
        let x = XiElement::new(l0, vec![g0, g1, g2]).unwrap();
        let lhs = x.act_b().act_a().sub(&x.act_a().act_b());
        let rhs = x.act_b().act_b();
        prop_assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn monomial_top_log_leading_coefficient(
        l0 in lambda0_strategy(),
        m in 0usize..6,
        i in 0usize..3,
    ) {
        let x = monomial_to_abstract(l0.clone(), m, i, 3, 10);
        let top = x.comp(i);
        prop_assert_eq!(top.valuation(), Some(m));
        let mut poch = Rat::from_integer(BigInt::from(1));
        for j in 0..m {
            poch *= &l0 + Rat::from_integer(BigInt::from(j as i64));
        }
        prop_assert_eq!(top.coeff(m), &Scalar::from_rat(poch));
    }

    #[test]
    fn express_in_span_round_trips(
        l0 in lambda0_strategy(),
        c0 in series_strategy(VarTag::B, 10),
        c1 in series_strategy(VarTag::B, 10),
    ) {
        let n = 10;
        let b0 = XiElement::basis(l0.clone(), 0, 2, n);
        let b1 = monomial_to_abstract(l0, 1, 1, 2, n);
        let x = b0.mul_series(&c0).add(&b1.mul_series(&c1));
        let (coeffs, eff) = express_in_span(&x, &[&b0, &b1]).unwrap();
        let back = b0.mul_series(&coeffs[0]).add(&b1.mul_series(&coeffs[1]));
        prop_assert!(back.sub(&x).truncate(eff).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn annihilator_kills_its_generator(
        l0 in lambda0_strategy(),
        gap in 1usize..=3,
        s in unit_series_strategy(16),
    ) {
        let n = 16;
        let x = monomial_to_abstract(l0.clone(), gap, 1, 2, n)
            .add(&XiElement::basis(l0, 0, 2, n).mul_series(&s));
        let k = rank_of(&x).unwrap();
        prop_assert_eq!(k, 2);
        let (p, cap) = annihilator_of(&x, k).unwrap();
        prop_assert!(x.act_ab(&p).truncate(cap).is_zero());
    }

    #[test]
    fn rank2_parameter_is_generator_independent(
        l0 in lambda0_strategy(),
        gap in 1usize..=3,
        s in unit_series_strategy(18),
        u in unit_series_strategy(18),
    ) {
        let n = 18;
        let x = monomial_to_abstract(l0.clone(), gap, 1, 2, n)
            .add(&XiElement::basis(l0, 0, 2, n).mul_series(&s));
        let d1 = extract_rank2_parameter(&x).unwrap();
        let d2 = extract_rank2_parameter(&x.mul_series(&u)).unwrap();
        prop_assert_eq!(&d1.lambda1, &d2.lambda1);
        prop_assert_eq!(d1.p1, d2.p1);
        prop_assert_eq!(&d1.alpha, &d2.alpha);
    }

    #[test]
    fn presentation_analysis_round_trips(
        class in prop_oneof![Just(rat(1, 2)), Just(rat(1, 3)), Just(rat(3, 4))],
        base in 2i64..=3,
        k in 1usize..=3,
        gaps in proptest::collection::vec(0usize..=2, 2),
        alphas in proptest::collection::vec(nonzero_scalar_strategy(), 2),
    ) {
        // generators realized from the annihilator sit at the valuation of
        // the top exponent, so the order budget must cover it
        let n = 26;
        let w = n + 4;
        let l1 = class + Rat::from_integer(BigInt::from(base));
        let mut lambdas = vec![l1.clone()];
        for j in 0..k - 1 {
            let next = lambdas[j].clone()
                + Rat::from_integer(BigInt::from(gaps[j] as i64 - 1));
            lambdas.push(next);
        }
        let lam_scalars: Vec<Scalar> =
            lambdas.iter().map(|l| Scalar::from_rat(l.clone())).collect();
        let units: Vec<TruncSeries> = (0..k - 1)
            .map(|j| {
                let mut s = TruncSeries::one(VarTag::B, w);
                if gaps[j] > 0 {
                    s.set_coeff(gaps[j], alphas[j].clone());
                }
                s
            })
            .collect();
        let (_, p) = standard_form_compose(&lam_scalars, &units, w).unwrap();
        let report = analyze_annihilator(&p, n).unwrap();
        prop_assert_eq!(report.rank, k);
        prop_assert_eq!(&report.exponents, &lambdas);
        prop_assert_eq!(&report.gaps, &gaps[..k - 1]);
        for j in 0..k - 1 {
            let expected = if gaps[j] == 0 {
                None
            } else {
                Some(alphas[j].clone())
            };
            prop_assert_eq!(&report.params[j], &expected);
        }
    }

    #[test]
    fn pushforward_preserves_bernstein_and_residue(
        k in 1usize..=3,
        entries in proptest::collection::vec((scalar_strategy(), scalar_strategy()), 9),
        cov in cov_strategy(12),
    ) {
        let n = 10;
        let mat: Vec<Vec<TruncSeries>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let (c1, c2) = &entries[i * 3 + j];
                        let mut e = TruncSeries::zero(VarTag::B, n);
                        e.set_coeff(1, c1.clone());
                        e.set_coeff(2, c2.clone());
                        e
                    })
                    .collect()
            })
            .collect();
        let e = MatrixModule::simple_pole(mat).unwrap();
        let pushed = pushforward_simple_pole(&e, &cov).unwrap();
        prop_assert!(pushed.is_simple_pole());
        // the residue (mod-b action matrix) is preserved
        for i in 0..k {
            for j in 0..k {
                prop_assert_eq!(
                    pushed.matrix()[i][j].coeff(1),
                    e.matrix()[i][j].coeff(1)
                );
            }
        }
        prop_assert_eq!(
            bernstein_polynomial(&pushed).unwrap(),
            bernstein_polynomial(&e).unwrap()
        );
    }
}
