//! Registry of identities as pairs of independently built series, and the
//! engine that compares them coefficient by coefficient.
//!
//! Every entry expands to a grid of cases. A report covers the whole grid
//! (or the cases matching a parameter filter) and names the grid point of
//! the first discrepancy inside its key.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bilaurent::{
    bl_add, bl_coeff, bl_coeff_of_product, bl_elliptic_shift, bl_mul, bl_translate_z, expand_inverse_one_minus,
    laurent_poly_exact_divide, BiLaurentSeries, Region, Support, Unit,
};
use crate::error::{Error, Result};
use crate::falsetheta::{
    coeff_f, elegant_identity_lhs, f0_antisymmetric_sum, f0_series, f_summand_monomials, g_frak, g_frak_closed_p2,
    g_frak_closed_p2_two_sided, g_frak_rewrite_p2, g_hyper, h_frak_direct, h_frak_f_order, h_frak_with,
    sgn_double_sum, vanishing_sum, F0Form,
};
use crate::rational::{abs_exp, ex, exi, int, parse_exp, parse_rational, render_exp, render_rational, Exp, Rational};
use crate::series::{eta_quotient, pochhammer, PuiseuxSeries};
use crate::thetas::{
    cal_t, f_series, kw_character_n3, l_factor, minus_q_product, quad_q, t2t_factor, theta_hat, theta_hat_sum, FCoefficients, LPath,
};

/// One side of an identity.
#[derive(Clone, Debug)]
pub enum Side {
    Uni(PuiseuxSeries),
    Bi(BiLaurentSeries),
}

impl From<PuiseuxSeries> for Side {
    fn from(s: PuiseuxSeries) -> Self {
        Side::Uni(s)
    }
}

impl From<BiLaurentSeries> for Side {
    fn from(s: BiLaurentSeries) -> Self {
        Side::Bi(s)
    }
}

/// A single grid point of an identity.
#[derive(Clone, Debug)]
pub struct Case {
    pub params: Value,
    pub lhs: Side,
    pub rhs: Side,
}

fn case(params: Value, lhs: impl Into<Side>, rhs: impl Into<Side>) -> Case {
    Case { params, lhs: lhs.into(), rhs: rhs.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Equal,
    Unequal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    /// `{"case": params, "q": exponent}` plus `"z": [e1, e2]` for bivariate sides.
    pub key: Value,
    #[serde(with = "rational_str")]
    pub lhs: Rational,
    #[serde(with = "rational_str")]
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub id: String,
    pub params: Value,
    #[serde(with = "exp_str")]
    pub order: Exp,
    pub verdict: Verdict,
    pub discrepancy: Option<Discrepancy>,
    pub ms: u64,
}

mod rational_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&render_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

mod exp_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(e: &Exp, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&render_exp(*e))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Exp, D::Error> {
        let s = String::deserialize(d)?;
        parse_exp(&s).map_err(serde::de::Error::custom)
    }
}

/// JSON for a parameter pair: integers when both are integral, else "n/d" strings.
pub fn pair_json(a: Exp, b: Exp) -> Value {
    if a.is_integer() && b.is_integer() {
        json!([a.to_integer(), b.to_integer()])
    } else {
        json!([render_exp(a), render_exp(b)])
    }
}

fn ipair(r: (i64, i64)) -> Value {
    pair_json(exi(r.0), exi(r.1))
}

// ---------------------------------------------------------------- comparison

fn check_order(which: &str, built: Exp, order: Exp) -> Result<()> {
    if built < order {
        return Err(Error::Convergence(format!("{which} side built only to q^{built}, need q^{order}")));
    }
    Ok(())
}

/// First exponent below `order` where the two series differ.
fn first_series_difference(a: &PuiseuxSeries, b: &PuiseuxSeries, order: Exp) -> Option<(Exp, Rational, Rational)> {
    let mut exps: Vec<Exp> = a.terms().chain(b.terms()).map(|(e, _)| e).filter(|e| *e < order).collect();
    exps.sort();
    exps.dedup();
    exps.into_iter().find_map(|e| {
        let (x, y) = (a.coeff(e), b.coeff(e));
        (x != y).then_some((e, x, y))
    })
}

fn first_difference(c: &Case, order: Exp) -> Result<Option<Discrepancy>> {
    match (&c.lhs, &c.rhs) {
        (Side::Uni(a), Side::Uni(b)) => {
            check_order("left", a.order(), order)?;
            check_order("right", b.order(), order)?;
            Ok(first_series_difference(a, b, order).map(|(e, lhs, rhs)| Discrepancy {
                key: json!({"case": c.params, "q": render_exp(e)}),
                lhs,
                rhs,
            }))
        }
        (Side::Bi(a), Side::Bi(b)) => {
            if a.region() != b.region() {
                return Err(Error::RegionMismatch(a.region(), b.region()));
            }
            check_order("left", a.qorder(), order)?;
            check_order("right", b.qorder(), order)?;
            let (sa, sb) = (a.support(), b.support());
            let mut keys: Vec<_> = a.terms().chain(b.terms()).map(|(k, _)| *k).collect();
            keys.sort();
            keys.dedup();
            for k in keys.into_iter().filter(|k| sa.is_exact(k) && sb.is_exact(k)) {
                let x = bl_coeff(a, k.0, k.1)?;
                let y = bl_coeff(b, k.0, k.1)?;
                if let Some((e, lhs, rhs)) = first_series_difference(&x, &y, order) {
                    return Ok(Some(Discrepancy {
                        key: json!({"case": c.params, "z": [render_exp(k.0), render_exp(k.1)], "q": render_exp(e)}),
                        lhs,
                        rhs,
                    }));
                }
            }
            Ok(None)
        }
        _ => Err(Error::InvalidParam("identity sides have different shapes".into())),
    }
}

fn mid_exponent(s: &PuiseuxSeries, order: Exp) -> Exp {
    let exps: Vec<Exp> = s.terms().map(|(e, _)| e).filter(|e| *e < order).collect();
    if exps.is_empty() {
        exi((order / exi(2)).floor().to_integer())
    } else {
        exps[exps.len() / 2]
    }
}

/// Adds 1 to one coefficient of `side` below `order`, at a key `other` also
/// knows exactly; returns the perturbed side and the `(key, exponent)` altered.
fn perturb(side: &Side, other: &Side, order: Exp) -> Result<(Side, Option<(Exp, Exp)>, Exp)> {
    match side {
        Side::Uni(s) => {
            let e = mid_exponent(s, order);
            let bump = PuiseuxSeries::monomial(Rational::one(), e, s.order());
            Ok((Side::Uni(s + &bump), None, e))
        }
        Side::Bi(s) => {
            let sup = s.support();
            let other = match other {
                Side::Bi(o) => o.support(),
                Side::Uni(_) => sup,
            };
            let key = s
                .terms()
                .map(|(k, _)| *k)
                .find(|k| sup.is_exact(k) && other.is_exact(k))
                .unwrap_or((exi(0), exi(0)));
            let e = mid_exponent(&bl_coeff(s, key.0, key.1)?, order);
            let bump = BiLaurentSeries::monomial(Rational::one(), e, key, s.qorder(), s.region());
            Ok((Side::Bi(bl_add(s, &bump)?), Some(key), e))
        }
    }
}

// ---------------------------------------------------------------- registry

type Builder = fn(Exp) -> Result<Vec<Case>>;

/// Static description of a registered identity.
#[derive(Clone, Copy, Debug)]
pub struct IdentityInfo {
    pub id: &'static str,
    pub statement: &'static str,
    pub default_order: i64,
    build: Builder,
}

const REGISTRY: &[IdentityInfo] = &[
    IdentityInfo { id: "E1", statement: "theta sum form equals the triple product", default_order: 30, build: e1 },
    IdentityInfo {
        id: "E2",
        statement: "theta(z + m tau + l) = (-1)^(m+l) q^(-m^2/2) zeta^(-m) theta(z), formally",
        default_order: 20,
        build: e2,
    },
    IdentityInfo {
        id: "E3",
        statement: "eta^3 th(z1z2)/(th(z1)th(z2)) = sum zeta1^n/(1 - zeta2 q^n) = rho double sum, INNER",
        default_order: 12,
        build: e3,
    },
    IdentityInfo {
        id: "E4",
        statement: "zeta^(-1/2) eta^3/th(z) = sum (-1)^n q^(n(n+1)/2)/(1 - zeta q^n) = rho double sum, INNER",
        default_order: 15,
        build: e4,
    },
    IdentityInfo {
        id: "E5",
        statement: "th(z;2tau)/th(z;tau) = q^(1/8)(-q;q)/(zeta q, zeta^-1 q; q^2), and q^(1/8)(-q;q) = q^(1/12) eta(2tau)/eta(tau)",
        default_order: 25,
        build: e5,
    },
    IdentityInfo {
        id: "E6",
        statement: "f via geometric factors = f via the two closed forms for 1/(uq, u^-1 q; q^2)",
        default_order: 12,
        build: e6,
    },
    IdentityInfo {
        id: "E6b",
        statement: "1/(uq, u^-1 q; q^2) via the Ramanujan-type closed form",
        default_order: 20,
        build: e6b,
    },
    IdentityInfo { id: "E7", statement: "coeff_r F = G_r for p in {2, 3}", default_order: 20, build: e7 },
    IdentityInfo {
        id: "E8",
        statement: "G_lambda (p = 2) = three quadrant sums = closed double sum",
        default_order: 20,
        build: e8,
    },
    IdentityInfo {
        id: "E9",
        statement: "eta^5/eta(2tau) coeff_r f = two-sided rho double sum = one-sided form",
        default_order: 20,
        build: e9,
    },
    IdentityInfo {
        id: "E10",
        statement: "q^(-2Q(r)/3) G_((r1+r2)/3, (2r2-r1)/3) = eta^5/eta(2tau) coeff_r f",
        default_order: 20,
        build: e10,
    },
    IdentityInfo {
        id: "E11",
        statement: "coeff_r F = q^(2Q(r)) eta^5/eta(2tau) coeff_(2r1-r2, r1+r2) f",
        default_order: 20,
        build: e11,
    },
    IdentityInfo {
        id: "E12",
        statement: "H_r = q^(-2Q(r)/3) G_((r1+r2)/3 - 1/2, (2r2-r1)/3 - 1/2)",
        default_order: 15,
        build: e12,
    },
    IdentityInfo {
        id: "E12b",
        statement: "H_r via zeta2 -> zeta2/q equals H_r via the unshifted product",
        default_order: 12,
        build: e12b,
    },
    IdentityInfo {
        id: "E13",
        statement: "eta^5/eta(2tau) CT f = sum sgn*(n2)(-1)^n1 q^(n1(n1+1)/2 + n1n2 + 2n2^2 + 2n2 + 1/2)",
        default_order: 20,
        build: e13,
    },
    IdentityInfo {
        id: "E14",
        statement: "q^(-1/4 - 2Q(r)/3)/(eta^2 eta(2tau)^2) G = coeff_r of the Pochhammer product = G_r(q^2)",
        default_order: 15,
        build: e14,
    },
    IdentityInfo {
        id: "E15",
        statement: "(q)^-2 (q^2;q^2)^-2 sum sgn*(n2)(-1)^n1 q^(...) = G_0(q^2), and q^(-1/4) eta^3/eta(2tau)^3 f_r = G_r(q^2)",
        default_order: 30,
        build: e15,
    },
    IdentityInfo {
        id: "E15b",
        statement: "q^(-1/4) coeff_r F = eta^2 eta(2tau)^2 q^(2Q(r)) G_(2r1-r2, r1+r2)(q^2), |r_i| <= 2",
        default_order: 30,
        build: e15b,
    },
    IdentityInfo {
        id: "E16",
        statement: "sum (q;q^2)_n (wq;q^2)_n (wq)^n/(-wq;q)_(2n+1) = sum (-1)^n q^(n^2+n) w^n",
        default_order: 20,
        build: e16,
    },
    IdentityInfo { id: "E17", statement: "F0 = CT J", default_order: 15, build: e17 },
    IdentityInfo {
        id: "E18",
        statement: "F0 (p = 2) = 1/4 sum (12n1n2 - 3n1^2 - 3n2^2 - n1 - n2) q^(2Q(n - 1/2))",
        default_order: 25,
        build: e18,
    },
    IdentityInfo {
        id: "E19",
        statement: "the numerator of F's summand is divisible by the Weyl denominator",
        default_order: 1,
        build: e19,
    },
    IdentityInfo {
        id: "E20",
        statement: "sum_n (-1)^n q^(n(n+1)/2 + kn) = 0 for integer k",
        default_order: 40,
        build: e20,
    },
];

pub fn registry() -> &'static [IdentityInfo] {
    REGISTRY
}

pub fn lookup(id: &str) -> Result<&'static IdentityInfo> {
    REGISTRY.iter().find(|i| i.id == id).ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

fn matches(filter: &Value, params: &Value) -> bool {
    match filter.as_object() {
        None => true,
        Some(f) => f.iter().all(|(k, v)| params.get(k) == Some(v)),
    }
}

fn build_cases(info: &IdentityInfo, params: &Value, order: Exp) -> Result<Vec<Case>> {
    if order <= exi(0) {
        return Err(Error::InvalidParam(format!("order must be positive, got {order}")));
    }
    let cases: Vec<Case> = (info.build)(order)?.into_iter().filter(|c| matches(params, &c.params)).collect();
    if cases.is_empty() {
        return Err(Error::InvalidParam(format!("no case of {} matches {params}", info.id)));
    }
    Ok(cases)
}

fn report(id: &str, params: &Value, order: Exp, cases: &[Case], start: Instant) -> Result<IdentityReport> {
    let mut discrepancy = None;
    for c in cases {
        if let Some(d) = first_difference(c, order)? {
            discrepancy = Some(d);
            break;
        }
    }
    Ok(IdentityReport {
        id: id.to_string(),
        params: params.clone(),
        order,
        verdict: if discrepancy.is_none() { Verdict::Equal } else { Verdict::Unequal },
        discrepancy,
        ms: start.elapsed().as_millis() as u64,
    })
}

/// Compares both sides of `id` below `order` (its default when `None`) over
/// every grid point whose parameters contain `params`.
pub fn verify_identity(id: &str, params: &Value, order: Option<Exp>) -> Result<IdentityReport> {
    let start = Instant::now();
    let info = lookup(id)?;
    let order = order.unwrap_or_else(|| exi(info.default_order));
    let cases = build_cases(info, params, order)?;
    report(id, params, order, &cases, start)
}

/// Where a perturbation was placed: the grid point, the ζ key for bivariate
/// sides, and the q-exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct Mutation {
    pub params: Value,
    pub key: Option<(Exp, Exp)>,
    pub exponent: Exp,
}

impl Mutation {
    /// The discrepancy key a correct engine reports for this mutation.
    pub fn expected_key(&self) -> Value {
        match self.key {
            None => json!({"case": self.params, "q": render_exp(self.exponent)}),
            Some(k) => json!({
                "case": self.params,
                "z": [render_exp(k.0), render_exp(k.1)],
                "q": render_exp(self.exponent),
            }),
        }
    }
}

/// Runs `id` with one coefficient of its first case's right side raised by one.
pub fn verify_identity_mutated(id: &str, order: Option<Exp>) -> Result<(IdentityReport, Mutation)> {
    let start = Instant::now();
    let info = lookup(id)?;
    let order = order.unwrap_or_else(|| exi(info.default_order));
    let mut cases = build_cases(info, &json!({}), order)?;
    let (rhs, key, exponent) = perturb(&cases[0].rhs, &cases[0].lhs, order)?;
    cases[0].rhs = rhs;
    let m = Mutation { params: cases[0].params.clone(), key, exponent };
    Ok((report(id, &json!({}), order, &cases, start)?, m))
}

/// Ids selected by `filter`: `"*"` or `"all"` for everything, otherwise
/// `|`-separated ids. Unknown names select nothing.
pub fn select(filter: &str) -> Vec<&'static str> {
    let f = filter.trim();
    if f == "*" || f == "all" {
        return REGISTRY.iter().map(|i| i.id).collect();
    }
    let wanted: Vec<&str> = f.split('|').map(str::trim).filter(|s| !s.is_empty()).collect();
    REGISTRY.iter().map(|i| i.id).filter(|id| wanted.contains(id)).collect()
}

/// Runs every selected identity concurrently; reports come back in registry order.
pub fn run_suite(filter: &str, order_overrides: &BTreeMap<String, Exp>) -> Result<Vec<IdentityReport>> {
    let ids = select(filter);
    ids.par_iter()
        .map(|id| verify_identity(id, &json!({}), order_overrides.get(*id).copied()))
        .collect()
}

// ---------------------------------------------------------------- helpers

const INNER: Region = Region::Inner;

fn eta5_over_eta2(order: Exp) -> Result<PuiseuxSeries> {
    eta_quotient(&[(1, 5), (2, -1)], order)
}

fn q_form(r: (i64, i64)) -> Exp {
    quad_q(exi(r.0), exi(r.1))
}

fn grid(bound: i64) -> Vec<(i64, i64)> {
    let mut v = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            v.push((a, b));
        }
    }
    v
}

/// `(η^5/η(2τ)) coeff_e f`, exact below `order`.
fn eta_f_coeff(fc: &FCoefficients, e: (i64, i64), order: Exp) -> Result<PuiseuxSeries> {
    let c = fc.coeff(exi(e.0), exi(e.1));
    Ok((&c * &eta5_over_eta2(order + exi(1))?).truncate(order))
}

/// `q^{-2Q(r)/3} 𝔾_{((r1+r2)/3 + s, (2r2-r1)/3 + s)}` at `p = 2`.
fn g_frak_normalized(r: (Exp, Exp), s: Exp, order: Exp) -> Result<PuiseuxSeries> {
    let shift = ex(2, 3) * quad_q(r.0, r.1);
    let lambda = ((r.0 + r.1) / exi(3) + s, (exi(2) * r.1 - r.0) / exi(3) + s);
    Ok(g_frak(lambda, 2, order + shift)?.shift(-shift).truncate(order))
}

fn poly_monomial(c: i64, key: (i64, i64), order: Exp) -> BiLaurentSeries {
    BiLaurentSeries::monomial(int(c), exi(0), (exi(key.0), exi(key.1)), order, INNER)
}

// ---------------------------------------------------------------- builders

fn e1(n: Exp) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (name, u) in [("z1", Unit::Z1), ("z1z2", Unit::Z12)] {
        for k in [1, 2] {
            let lhs = theta_hat_sum(u, k, n, INNER, None)?;
            let rhs = theta_hat(u, k, n, INNER, None)?;
            out.push(case(json!({"unit": name, "k": k}), lhs, rhs));
        }
    }
    Ok(out)
}

fn e2(n: Exp) -> Result<Vec<Case>> {
    let w = 4;
    let mut out = Vec::new();
    for m in -2..=2i64 {
        for l in 0..=1i64 {
            let th = theta_hat(Unit::Z1, 1, n + exi(w * m.abs()), INNER, Some(w))?;
            let lhs = bl_translate_z(&bl_elliptic_shift(&th, m, 0)?, (exi(l), exi(0)))?;
            let half = ex(m * m, 2);
            let base = theta_hat(Unit::Z1, 1, n + half, INNER, None)?;
            let rhs = base.shift_keys((exi(-m), exi(0)))?.shift_q(-half);
            let rhs = if (m + l) % 2 == 0 { rhs } else { rhs.neg() };
            out.push(case(json!({"m": m, "l": l}), lhs, rhs));
        }
    }
    Ok(out)
}

fn windowed(terms: Vec<((i64, i64), PuiseuxSeries)>, order: Exp, w: i64) -> BiLaurentSeries {
    BiLaurentSeries::from_terms(
        terms.into_iter().map(|(k, s)| ((exi(k.0), exi(k.1)), s)),
        order,
        INNER,
        Support::Windowed { bound: w, orthant: None },
    )
}

/// `Σ ϱ_{n1,n2} q^{n1 n2} ζ1^{n1} ζ2^{n2}` over the box of radius `w`.
fn rho_sum_two(order: Exp, w: i64) -> BiLaurentSeries {
    let mut terms = Vec::new();
    for (a, b) in grid(w) {
        let c = crate::rational::rho(a, b);
        if c != 0 && exi(a * b) < order {
            terms.push(((a, b), PuiseuxSeries::monomial(int(c), exi(a * b), order)));
        }
    }
    windowed(terms, order, w)
}

fn e3(n: Exp) -> Result<Vec<Case>> {
    let big = n + exi(1);
    // Σ_n ζ1^n / (1 - ζ2 q^n), keys with |n| > w fall outside the box.
    let w = 6;
    let mut geo = BiLaurentSeries::zero(big, INNER).restrict(w);
    for m in -w..=w {
        let g = expand_inverse_one_minus(Unit::Z2, m, INNER, big, Some(w))?;
        let g = if m == 0 { g } else { g.shift_keys((exi(m), exi(0)))?.restrict(w) };
        geo = bl_add(&geo, &g)?;
    }
    let mut out = vec![case(json!({"form": "geometric"}), geo, rho_sum_two(big, w))];

    let t1 = theta_hat(Unit::Z1, 1, big, INNER, None)?;
    let t2 = theta_hat(Unit::Z2, 1, big, INNER, None)?;
    let den = bl_mul(&t1, &t2)?;
    let ww = den.spread().ceil().to_integer() + 3;
    let rhs = bl_mul(&den, &rho_sum_two(big, ww))?;
    let lhs = theta_hat(Unit::Z12, 1, big, INNER, None)?.scale(&eta_quotient(&[(1, 3)], big)?);
    out.push(case(json!({"form": "theta"}), lhs, rhs));
    Ok(out)
}

/// `Σ ϱ_{n1,n2} (-1)^{n1} q^{n1(n1+1)/2 + n1 n2} ζ^{n2}` for `|n2| <= w`.
fn rho_sum_one(order: Exp, w: i64) -> BiLaurentSeries {
    let span = 2 * order.ceil().to_integer() + 2 * w + 4;
    let mut by_key: BTreeMap<i64, Vec<(Exp, Rational)>> = BTreeMap::new();
    for b in -w..=w {
        for a in -span..=span {
            let c = crate::rational::rho(a, b);
            let e = ex(a * (a + 1), 2) + exi(a * b);
            if c != 0 && e < order {
                let s = if a % 2 == 0 { c } else { -c };
                by_key.entry(b).or_default().push((e, int(s)));
            }
        }
    }
    let terms = by_key.into_iter().map(|(b, t)| ((b, 0), PuiseuxSeries::from_terms(t, order))).collect();
    windowed(terms, order, w)
}

fn e4(n: Exp) -> Result<Vec<Case>> {
    let big = n + exi(1);
    let w = 6;
    let mut geo = BiLaurentSeries::zero(big, INNER).restrict(w);
    let mut m = 0i64;
    loop {
        let mut any = false;
        for k in if m == 0 { vec![0] } else { vec![m, -m] } {
            let e = ex(k * (k + 1), 2);
            if e >= big {
                continue;
            }
            any = true;
            let g = expand_inverse_one_minus(Unit::Z1, k, INNER, big, Some(w))?;
            let g = if k == 0 { g } else { g.restrict(w) };
            let c = PuiseuxSeries::monomial(int(if k % 2 == 0 { 1 } else { -1 }), e, big + exi(1));
            geo = bl_add(&geo, &g.scale(&c).truncate(big))?;
        }
        if !any {
            break;
        }
        m += 1;
    }
    let mut out = vec![case(json!({"form": "geometric"}), geo, rho_sum_one(big, w))];

    let th = theta_hat(Unit::Z1, 1, big, INNER, None)?;
    let ww = th.spread().ceil().to_integer() + 3;
    let rhs = bl_mul(&th, &rho_sum_one(big, ww))?;
    let eta3 = eta_quotient(&[(1, 3)], big)?;
    let lhs = BiLaurentSeries::from_terms([((ex(-1, 2), exi(0)), eta3)], big, INNER, Support::Complete);
    out.push(case(json!({"form": "theta"}), lhs, rhs));
    Ok(out)
}

fn e5(n: Exp) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (rname, region) in [("INNER", Region::Inner), ("WIDE", Region::Wide)] {
        for (uname, u) in [("z1", Unit::Z1), ("z1z2", Unit::Z12)] {
            let lhs = theta_hat(u, 2, n, region, None)?;
            let big = n + exi(1);
            let rhs = bl_mul(&theta_hat(u, 1, big, region, None)?, &t2t_factor(u, big, region, LPath::Geometric)?)?;
            out.push(case(json!({"region": rname, "unit": uname}), lhs, rhs));
        }
    }
    let lhs = minus_q_product(n).shift(ex(1, 8));
    let rhs = eta_quotient(&[(2, 1), (1, -1)], n)?.shift(ex(1, 12));
    out.push(case(json!({"form": "eta"}), lhs, rhs));
    Ok(out)
}

fn e6(n: Exp) -> Result<Vec<Case>> {
    let geo = f_series(n, INNER, LPath::Geometric, None)?;
    let mut out = Vec::new();
    for (name, path) in [("middle", LPath::Middle), ("right", LPath::Right)] {
        out.push(case(json!({"path": name}), geo.clone(), f_series(n, INNER, path, None)?));
    }
    Ok(out)
}

fn e6b(n: Exp) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (name, u) in [("z1", Unit::Z1), ("z1z2", Unit::Z12)] {
        let lhs = l_factor(u, n, INNER, LPath::Ramanujan)?;
        let rhs = l_factor(u, n, INNER, LPath::Geometric)?;
        out.push(case(json!({"unit": name}), lhs, rhs));
    }
    Ok(out)
}

fn e7(n: Exp) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for p in [2, 3] {
        for r in grid(2) {
            let lhs = coeff_f(r, p, n)?;
            let rhs = g_frak((exi(r.0), exi(r.1)), p, n)?;
            out.push(case(json!({"p": p, "r": ipair(r)}), lhs, rhs));
        }
    }
    Ok(out)
}

fn e8(n: Exp) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    let mut lambdas: Vec<(Exp, Exp)> = grid(2).into_iter().map(|(a, b)| (exi(a), exi(b))).collect();
    lambdas.push((ex(1, 3), ex(2, 3)));
    lambdas.push((ex(-1, 2), ex(-1, 2)));
    for l in lambdas {
        let lhs = g_frak_rewrite_p2(l, n);
        let rhs = g_frak(l, 2, n)?;
        out.push(case(json!({"form": "quadrants", "lambda": pair_json(l.0, l.1)}), lhs, rhs));
    }
    for r in grid(2) {
        let lhs = g_frak_closed_p2(r, n);
        let rhs = g_frak_normalized((exi(r.0), exi(r.1)), exi(0), n)?;
        out.push(case(json!({"form": "closed", "r": ipair(r)}), lhs, rhs));
    }
    Ok(out)
}

fn e9(n: Exp) -> Result<Vec<Case>> {
    let fc = FCoefficients::new(n)?;
    let mut out = Vec::new();
    for r in grid(2) {
        let two = g_frak_closed_p2_two_sided(r, n);
        out.push(case(json!({"form": "two-sided", "r": ipair(r)}), eta_f_coeff(&fc, r, n)?, two.clone()));
        out.push(case(json!({"form": "one-sided", "r": ipair(r)}), two, g_frak_closed_p2(r, n)));
    }
    Ok(out)
}

fn e10(n: Exp) -> Result<Vec<Case>> {
    let fc = FCoefficients::new(n)?;
    let mut out = Vec::new();
    for r in grid(2) {
        let lhs = g_frak_normalized((exi(r.0), exi(r.1)), exi(0), n)?;
        out.push(case(json!({"r": ipair(r)}), lhs, eta_f_coeff(&fc, r, n)?));
    }
    Ok(out)
}

fn e11(n: Exp) -> Result<Vec<Case>> {
    let fc = FCoefficients::new(n)?;
    let mut out = Vec::new();
    for r in grid(2) {
        let lhs = coeff_f(r, 2, n)?;
        let shift = exi(2) * q_form(r);
        let rhs = if shift >= n {
            PuiseuxSeries::zero(n)
        } else {
            eta_f_coeff(&fc, (2 * r.0 - r.1, r.0 + r.1), n - shift)?.shift(shift)
        };
        out.push(case(json!({"r": ipair(r)}), lhs, rhs));
    }
    Ok(out)
}

fn h_grid() -> Vec<(Exp, Exp)> {
    let mut v = Vec::new();
    for r1 in [ex(-3, 2), ex(-1, 2), ex(1, 2), ex(3, 2)] {
        for r2 in -2..=2 {
            v.push((r1, exi(r2)));
        }
    }
    v
}

fn e12(n: Exp) -> Result<Vec<Case>> {
    let pts = h_grid();
    let mut fo = n;
    let mut w = 0;
    for &(r1, r2) in &pts {
        fo = fo.max(h_frak_f_order(r1, r2, n)?);
        w = w.max(abs_exp(r1 - ex(1, 2)).to_integer().max(abs_exp(r2 - exi(1)).to_integer()));
    }
    let f = FCoefficients::new(fo)?.window(w);
    let mut out = Vec::new();
    for (r1, r2) in pts {
        let lhs = h_frak_with(&f, r1, r2, n)?;
        let rhs = g_frak_normalized((r1, r2), ex(-1, 2), n)?;
        out.push(case(json!({"r": pair_json(r1, r2)}), lhs, rhs));
    }
    Ok(out)
}

fn e12b(n: Exp) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (r1, r2) in [(ex(1, 2), exi(0)), (ex(-1, 2), exi(1)), (ex(3, 2), exi(-1))] {
        let fo = h_frak_f_order(r1, r2, n)?;
        let w = abs_exp(r1 - ex(1, 2)).to_integer().max(abs_exp(r2 - exi(1)).to_integer());
        let lhs = h_frak_with(&FCoefficients::new(fo)?.window(w), r1, r2, n)?;
        let rhs = h_frak_direct(r1, r2, n)?;
        out.push(case(json!({"r": pair_json(r1, r2)}), lhs, rhs));
    }
    Ok(out)
}

fn e13(n: Exp) -> Result<Vec<Case>> {
    let fc = FCoefficients::new(n)?;
    let lhs = eta_f_coeff(&fc, (0, 0), n)?;
    let rhs = sgn_double_sum(ex(1, 2), n);
    let kw = kw_character_n3(n, Some(0))?;
    let via_kw = (&bl_coeff(&kw, exi(0), exi(0))? * &eta_quotient(&[(1, 4)], n + exi(1))?).truncate(n);
    Ok(vec![
        case(json!({"form": "f"}), lhs, rhs.clone()),
        case(json!({"form": "character"}), via_kw, rhs),
    ])
}

/// Coefficients `(n1, L_{n1})` of `1/(uq, u^{-1}q; q^2)_∞` in one variable.
fn l_coeffs(order: Exp) -> Result<BTreeMap<i64, PuiseuxSeries>> {
    let l = l_factor(Unit::Z1, order, INNER, LPath::Geometric)?;
    Ok(l.terms().map(|(k, s)| (k.0.to_integer(), s.clone())).collect())
}

/// `coeff_r L(ζ1) L(ζ2) L(ζ1ζ2) = Σ_c L_{r1-c} L_{r2-c} L_c`.
fn triple_l_coeff(l: &BTreeMap<i64, PuiseuxSeries>, r: (i64, i64), order: Exp) -> PuiseuxSeries {
    let mut acc = PuiseuxSeries::zero(order);
    for (c, lc) in l {
        if let (Some(a), Some(b)) = (l.get(&(r.0 - c)), l.get(&(r.1 - c))) {
            acc = &acc + &(&(a * b) * lc).truncate(order);
        }
    }
    acc
}

fn g_hyper_q2(r: (i64, i64), order: Exp) -> PuiseuxSeries {
    let half = (order / exi(2)).max(exi(0)) + exi(1);
    g_hyper(r, half).scale_q(exi(2))
}

fn e14(n: Exp) -> Result<Vec<Case>> {
    let l = l_coeffs(n)?;
    let inv = eta_quotient(&[(1, -2), (2, -2)], n + exi(1))?;
    let mut out = Vec::new();
    for r in grid(1) {
        let rhs = g_hyper_q2(r, n);
        let g = g_frak_normalized((exi(r.0), exi(r.1)), exi(0), n + exi(1))?.shift(ex(-1, 4));
        let lhs = (&g * &inv).truncate(n);
        out.push(case(json!({"form": "theta", "r": ipair(r)}), lhs, rhs.clone()));
        out.push(case(json!({"form": "pochhammer", "r": ipair(r)}), triple_l_coeff(&l, r, n), rhs));
    }
    Ok(out)
}

fn e15(n: Exp) -> Result<Vec<Case>> {
    let mut out = vec![case(json!({"form": "theorem"}), elegant_identity_lhs(n), g_hyper_q2((0, 0), n))];
    let big = n + exi(1);
    let fc = FCoefficients::new(big)?;
    let pre = eta_quotient(&[(1, 3), (2, -3)], big)?.shift(ex(-1, 4));
    for r in [(0, 0), (1, 0), (1, 1), (-1, 2)] {
        let lhs = (&fc.coeff(exi(r.0), exi(r.1)) * &pre).truncate(n);
        out.push(case(json!({"form": "rescaled", "r": ipair(r)}), lhs, g_hyper_q2(r, n)));
    }
    Ok(out)
}

fn e15b(n: Exp) -> Result<Vec<Case>> {
    let eta = eta_quotient(&[(1, 2), (2, 2)], n + exi(1))?;
    let mut out = Vec::new();
    for r in grid(2) {
        let lhs = coeff_f(r, 2, n + ex(1, 4))?.shift(ex(-1, 4));
        let shift = exi(2) * q_form(r);
        let g = g_hyper_q2((2 * r.0 - r.1, r.0 + r.1), n - shift).shift(shift);
        out.push(case(json!({"r": ipair(r)}), lhs, (&g * &eta).truncate(n)));
    }
    Ok(out)
}

fn e16(n: Exp) -> Result<Vec<Case>> {
    let minus_w = Unit::new(-1, (1, 0))?;
    let one = BiLaurentSeries::constant(PuiseuxSeries::one(n), INNER);
    let mut lhs = BiLaurentSeries::zero(n, INNER);
    let mut k = 0i64;
    while exi(k) < n {
        let scalar = pochhammer(1, exi(1), exi(2), Some(k as u64), n)?;
        let mut t = BiLaurentSeries::monomial(Rational::one(), exi(k), (exi(k), exi(0)), n, INNER).scale(&scalar);
        for j in 0..k {
            let factor = bl_add(&one, &BiLaurentSeries::monomial(-Rational::one(), exi(2 * j + 1), (exi(1), exi(0)), n, INNER))?;
            t = bl_mul(&t, &factor)?;
        }
        for j in 1..=2 * k + 1 {
            t = bl_mul(&t, &expand_inverse_one_minus(minus_w, j, INNER, n, None)?)?;
        }
        lhs = bl_add(&lhs, &t)?;
        k += 1;
    }
    let mut terms = Vec::new();
    let mut k = 0i64;
    while exi(k * k + k) < n {
        let c = int(if k % 2 == 0 { 1 } else { -1 });
        terms.push(((exi(k), exi(0)), PuiseuxSeries::monomial(c, exi(k * k + k), n)));
        k += 1;
    }
    let rhs = BiLaurentSeries::from_terms(terms, n, INNER, Support::Complete);
    Ok(vec![case(json!({}), lhs, rhs)])
}

fn e17(n: Exp) -> Result<Vec<Case>> {
    let t = cal_t(n, INNER, None);
    let w = t.spread().ceil().to_integer();
    let f = FCoefficients::new(n)?.window(w);
    let ct = bl_coeff_of_product(&t, &f, (exi(0), exi(0)))?;
    let lhs = (&ct * &eta5_over_eta2(n + exi(1))?).truncate(n);
    Ok(vec![case(json!({"p": 2}), lhs, f0_series(2, n, F0Form::General)?)])
}

fn e18(n: Exp) -> Result<Vec<Case>> {
    Ok(vec![
        case(
            json!({"form": "simplified"}),
            f0_series(2, n, F0Form::General)?,
            f0_series(2, n, F0Form::P2Simplified)?,
        ),
        case(json!({"form": "antisymmetric"}), f0_antisymmetric_sum(n), PuiseuxSeries::zero(n)),
    ])
}

fn e19(n: Exp) -> Result<Vec<Case>> {
    let d = bl_mul(
        &bl_mul(
            &bl_add(&poly_monomial(1, (0, 0), n), &poly_monomial(-1, (-1, 0), n))?,
            &bl_add(&poly_monomial(1, (0, 0), n), &poly_monomial(-1, (0, -1), n))?,
        )?,
        &bl_add(&poly_monomial(1, (0, 0), n), &poly_monomial(-1, (-1, -1), n))?,
    )?;
    let mut out = Vec::new();
    for (a, b) in grid(6) {
        let mut num = BiLaurentSeries::zero(n, INNER);
        for (k, s) in f_summand_monomials(a, b) {
            num = bl_add(&num, &poly_monomial(s, k, n))?;
        }
        let quot = laurent_poly_exact_divide(&num, &d)?;
        out.push(case(json!({"n": ipair((a, b))}), bl_mul(&d, &quot)?.truncate(n), num));
    }
    Ok(out)
}

fn e20(n: Exp) -> Result<Vec<Case>> {
    Ok((-10..=10).map(|k| case(json!({"k": k}), vanishing_sum(k, n), PuiseuxSeries::zero(n))).collect())
}
