use a2lab::bilaurent::{
    bl_add, bl_coeff, bl_mul, expand_inverse_one_minus, expand_weyl_denominator, BiLaurentSeries, Support, Unit,
};
use a2lab::falsetheta::{coeff_f, g_frak, g_hyper, rank_one_coeff};
use a2lab::numeric::{self, Law, SamplePoint, Transform};
use a2lab::rational::{ex, exi, int, rho, sgn_star};
use a2lab::series::eta_series;
use a2lab::thetas::{cal_t, f_series, theta_a2, theta_hat, LPath};
use a2lab::{Exp, PuiseuxSeries, Rational, Region};
use num_complex::Complex64;
use proptest::prelude::*;

const ORDER: i64 = 4;

/// Small series with exponents in sixths on `[-1, ORDER)`.
fn series() -> impl Strategy<Value = PuiseuxSeries> {
    prop::collection::vec((-6i64..6 * ORDER, -4i64..=4), 0..6).prop_map(|ts| {
        PuiseuxSeries::from_terms(ts.into_iter().map(|(e, c)| (ex(e, 6), int(c))), exi(ORDER))
    })
}

fn unit_series() -> impl Strategy<Value = PuiseuxSeries> {
    (series(), -6i64..6, prop_oneof![-3i64..=-1, 1i64..=3]).prop_map(|(s, lead, c)| {
        let v = ex(lead, 6);
        let tail = PuiseuxSeries::from_terms(s.terms().filter(|(e, _)| *e > v).map(|(e, c)| (e, c.clone())), exi(ORDER));
        &PuiseuxSeries::monomial(int(c), v, exi(ORDER)) + &tail
    })
}

fn agree(a: &PuiseuxSeries, b: &PuiseuxSeries) -> bool {
    let m = a.order().min(b.order());
    a.truncate(m) == b.truncate(m)
}

fn laurent_poly() -> impl Strategy<Value = BiLaurentSeries> {
    prop::collection::vec(((-2i64..=2, -2i64..=2), series()), 0..4).prop_map(|ts| {
        BiLaurentSeries::from_terms(
            ts.into_iter().map(|((a, b), s)| ((exi(a), exi(b)), s.shift(exi(2)).truncate(exi(ORDER)))),
            exi(ORDER),
            Region::Inner,
            Support::Complete,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in series(), b in series(), c in series()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!(agree(&(&a * &b), &(&b * &a)));
        prop_assert!(agree(&(&(&a + &b) + &c), &(&a + &(&b + &c))));
        prop_assert!(agree(&(&(&a * &b) * &c), &(&a * &(&b * &c))));
        prop_assert!(agree(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))));
        prop_assert!(agree(&(&a * &PuiseuxSeries::one(exi(ORDER))), &a));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn inverse_of_unit(a in unit_series()) {
        let inv = a.invert().unwrap();
        let prod = &a * &inv;
        prop_assert!(prod.order() > exi(0));
        prop_assert_eq!(prod.clone(), PuiseuxSeries::one(prod.order()));
    }

    #[test]
    fn series_json_round_trip(a in series()) {
        let text = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<PuiseuxSeries>(&text).unwrap(), a);
    }

    #[test]
    fn coefficient_extraction_is_linear(a in laurent_poly(), b in laurent_poly(), k in (-2i64..=2, -2i64..=2)) {
        let (k1, k2) = (exi(k.0), exi(k.1));
        let sum = bl_add(&a, &b).unwrap();
        let lhs = bl_coeff(&sum, k1, k2).unwrap();
        let rhs = &bl_coeff(&a, k1, k2).unwrap() + &bl_coeff(&b, k1, k2).unwrap();
        prop_assert!(agree(&lhs, &rhs));
    }

    #[test]
    fn coefficient_of_product_is_convolution(a in laurent_poly(), b in laurent_poly(), k in (-4i64..=4, -4i64..=4)) {
        let prod = bl_mul(&a, &b).unwrap();
        let lhs = bl_coeff(&prod, exi(k.0), exi(k.1)).unwrap();
        let mut rhs = PuiseuxSeries::zero(prod.qorder());
        for j1 in -2i64..=2 {
            for j2 in -2i64..=2 {
                let x = bl_coeff(&a, exi(j1), exi(j2)).unwrap();
                let y = bl_coeff(&b, exi(k.0 - j1), exi(k.1 - j2)).unwrap();
                rhs = &rhs + &(&x * &y);
            }
        }
        prop_assert!(agree(&lhs, &rhs));
    }
}

fn unit_strategy() -> impl Strategy<Value = Unit> {
    (prop::sample::select(vec![1i64, -1]), prop::sample::select(vec![(1i64, 0i64), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)]))
        .prop_map(|(s, d)| Unit::new(s, d).unwrap())
}

fn region_strategy() -> impl Strategy<Value = Region> {
    prop::sample::select(vec![Region::Inner, Region::Outer, Region::Wide])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn inverse_factor_expansions_invert(u in unit_strategy(), n in -3i64..=3, region in region_strategy()) {
        let order = exi(8);
        let e = match expand_inverse_one_minus(u, n, region, order, Some(6)) {
            Ok(e) => e,
            Err(_) => return Ok(()),
        };
        let g = BiLaurentSeries::from_terms(
            [
                ((exi(0), exi(0)), PuiseuxSeries::one(order)),
                (u.key(exi(1)), PuiseuxSeries::monomial(int(-u.sign), exi(n), order)),
            ],
            order,
            region,
            Support::Complete,
        );
        let p = bl_mul(&e, &g).unwrap();
        let support = p.support();
        for (k, c) in p.terms() {
            if !support.is_exact(k) {
                continue;
            }
            let expected = if *k == (exi(0), exi(0)) { PuiseuxSeries::one(p.qorder()) } else { PuiseuxSeries::zero(p.qorder()) };
            prop_assert!(agree(c, &expected), "key {:?}: {}", k, c);
        }
        prop_assert!(support.is_exact(&(exi(0), exi(0))));
    }

    #[test]
    fn weyl_denominator_symmetric(w in 1i64..8, a in 0i64..8, b in 0i64..8) {
        let d = expand_weyl_denominator(Region::Outer, exi(1), w).unwrap();
        let c1 = bl_coeff(&d, exi(-a.min(w)), exi(-b.min(w))).unwrap();
        let c2 = bl_coeff(&d, exi(-b.min(w)), exi(-a.min(w))).unwrap();
        prop_assert_eq!(c1, c2);
    }

    #[test]
    fn sign_weights(a in -50i64..50, b in -50i64..50) {
        prop_assert_eq!(sgn_star(0), 1);
        prop_assert_eq!(rho(a, b), rho(b, a));
        prop_assert!([-1, 0, 1].contains(&rho(a, b)));
        prop_assert_eq!(rho(a, b) == 0, sgn_star(a) != sgn_star(b));
    }
}

fn truncates_back(big: &PuiseuxSeries, small: &PuiseuxSeries) -> bool {
    big.truncate(small.order()) == *small
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn builders_truncate_consistently(n in 3i64..10, k in 1i64..5, l1 in -2i64..=2, l2 in -2i64..=2, p in 2i64..=3) {
        let (small, big) = (exi(n), exi(n + k));
        prop_assert!(truncates_back(&eta_series(1, big).unwrap(), &eta_series(1, small).unwrap()));
        prop_assert!(truncates_back(&g_frak((exi(l1), exi(l2)), p, big).unwrap(), &g_frak((exi(l1), exi(l2)), p, small).unwrap()));
        prop_assert!(truncates_back(&coeff_f((l1, l2), p, big).unwrap(), &coeff_f((l1, l2), p, small).unwrap()));
        prop_assert!(truncates_back(&g_hyper((l1, l2), big), &g_hyper((l1, l2), small)));
        prop_assert!(truncates_back(&rank_one_coeff(p, l1, big).unwrap(), &rank_one_coeff(p, l1, small).unwrap()));
        let fs = f_series(small, Region::Inner, LPath::Geometric, Some(3)).unwrap();
        let fb = f_series(big, Region::Inner, LPath::Geometric, Some(3)).unwrap();
        prop_assert_eq!(fb.truncate(small), fs);
        let ts = theta_hat(Unit::Z12, 2, small, Region::Wide, Some(4)).unwrap();
        let tb = theta_hat(Unit::Z12, 2, big, Region::Wide, Some(4)).unwrap();
        prop_assert_eq!(tb.truncate(small), ts);
    }

    #[test]
    fn lattice_thetas_are_monomials(n in 2i64..14) {
        let order = exi(n);
        let a2 = theta_a2(order, Region::Wide, None);
        for (k, c) in a2.terms() {
            let (a, b) = (k.0, k.1);
            prop_assert_eq!(c.len(), 1);
            prop_assert_eq!(c.coeff(a * a + b * b - a * b), Rational::from_integer(1.into()));
        }
        let t = cal_t(order, Region::Wide, None);
        let mut count = 0;
        for (k, c) in t.terms() {
            // n1 = (e1 + e2) / 3 and n2 = e1 - n1 invert the key map.
            let n1 = (k.0 + k.1) / exi(3);
            prop_assert!(n1.is_integer());
            let n2 = k.0 - n1;
            prop_assert_eq!(c.len(), 1);
            prop_assert_eq!(c.coeff(exi(2) * (n1 * n1 + n2 * n2 - n1 * n2)), Rational::from_integer(1.into()));
            count += 1;
        }
        // Distinct lattice points never share a key.
        let points = (-n..=n).flat_map(|a| (-n..=n).map(move |b| (a, b))).filter(|&(a, b)| 2 * (a * a + b * b - a * b) < n).count();
        prop_assert_eq!(count, points);
    }
}

fn complex(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn theta_odd_and_periodic(re in -0.5f64..0.5, im in -0.3f64..0.3, tre in -0.5f64..0.5, tim in 0.5f64..1.5) {
        let (z, tau) = (complex(re, im), complex(tre, tim));
        let v = numeric::theta(z, tau, 1);
        prop_assert!((v + numeric::theta(-z, tau, 1)).norm() < 1e-12 * v.norm().max(1.0));
        prop_assert!((v + numeric::theta(z + 1.0, tau, 1)).norm() < 1e-12 * v.norm().max(1.0));
    }

    #[test]
    fn random_points_give_finite_residuals(
        re in -0.5f64..0.5, im in 0.0f64..0.2, tre in -0.5f64..0.5, tim in 0.5f64..1.0, law_ix in 0usize..8
    ) {
        let law = Law::ALL[law_ix];
        let t = match law {
            Law::ThetaMod | Law::FMod | Law::TMod | Law::JMod => Transform::Modular(numeric::ModularMatrix::new(1, 0, 6, 1).unwrap()),
            Law::ThetaEll => Transform::Elliptic { m: (1, 0), l: (1, 0) },
            _ => Transform::Elliptic { m: (2, 0), l: (0, 1) },
        };
        let p = SamplePoint { tau: complex(tre, tim), z: (complex(re, im), complex(0.31 - re / 2.0, 0.05)) };
        match numeric::check_transformation(law, &t, &p, 1e-8) {
            Ok(r) => {
                prop_assert!(r.residual.is_finite());
                prop_assert!(r.residual < 1e-8, "{} {}", law, r.residual);
            }
            Err(a2lab::Error::NearThetaZero(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

#[test]
fn eta_product_is_pentagonal_to_200() {
    let n = 200i64;
    let eta = eta_series(1, exi(n)).unwrap();
    let mut terms = Vec::new();
    for k in -20i64..=20 {
        let e = ex(1, 24) + exi(k * (3 * k - 1) / 2);
        if e < exi(n) {
            terms.push((e, int(if k % 2 == 0 { 1 } else { -1 })));
        }
    }
    assert_eq!(eta, PuiseuxSeries::from_terms(terms, exi(n)));
}

#[test]
fn exp_type_is_exact() {
    let e: Exp = ex(2, 6);
    assert_eq!(e, ex(1, 3));
}
