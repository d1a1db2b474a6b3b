//! Theta functions and the two-variable Jacobi forms built from them.
//!
//! Everything uses `θ̂ := iϑ = q^{1/8} ζ^{-1/2} (ζ, ζ^{-1}q, q; q)_∞`, which has
//! rational coefficients. Ratios of thetas are never formed by series
//! division; they come from the closed form
//! `θ̂(z; 2τ) / θ̂(z; τ) = q^{1/8} (-q; q)_∞ L(ζ)` with
//! `L(u) = 1 / (uq, u^{-1}q; q^2)_∞`.

use std::collections::BTreeMap;

use num_traits::One;

use crate::bilaurent::{bl_mul, bl_product, expand_inverse_one_minus, BiLaurentSeries, Region, Support, Unit};
use crate::error::{Error, Result};
use crate::lattice::{Quadratic1, Quadratic2};
use crate::rational::{ex, exi, int, Exp, Rational};
use crate::series::{eta_quotient, euler_product, inverse_pochhammer_table, pochhammer, PuiseuxSeries};

fn check_unit(u: Unit) -> Result<()> {
    if u.sign != 1 {
        return Err(Error::InvalidParam("theta needs a unit with sign +1".into()));
    }
    Ok(())
}

fn check_scale(k: i64) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidParam(format!("scale must be positive, got {k}")));
    }
    Ok(())
}

fn restrict(s: BiLaurentSeries, window: Option<i64>) -> BiLaurentSeries {
    match window {
        Some(w) => s.restrict(w),
        None => s,
    }
}

/// `1 - sign * u * q^e` as a Laurent polynomial.
fn binomial(u: Unit, e: Exp, qorder: Exp, region: Region) -> BiLaurentSeries {
    let one = ((exi(0), exi(0)), PuiseuxSeries::one(qorder));
    let lin = (u.key(exi(1)), PuiseuxSeries::monomial(int(-u.sign), e, qorder));
    BiLaurentSeries::from_terms([one, lin], qorder, region, Support::Complete)
}

/// `(u q^s; q^t)_∞` for `s >= 0` and `t > 0`.
fn unit_pochhammer(u: Unit, s: Exp, t: Exp, qorder: Exp, region: Region) -> Result<BiLaurentSeries> {
    let mut acc = BiLaurentSeries::constant(PuiseuxSeries::one(qorder), region);
    let mut e = s;
    while e < qorder {
        acc = bl_mul(&acc, &binomial(u, e, qorder, region))?;
        e += t;
    }
    Ok(acc)
}

/// `θ̂(u; kτ)` from the triple product.
pub fn theta_hat(u: Unit, k: i64, qorder: Exp, region: Region, window: Option<i64>) -> Result<BiLaurentSeries> {
    check_unit(u)?;
    check_scale(k)?;
    let kq = exi(k);
    let lead = ex(k, 8);
    let inner = qorder - lead;
    let a = unit_pochhammer(u, exi(0), kq, inner, region)?;
    let b = unit_pochhammer(u.inverse(), kq, kq, inner, region)?;
    let c = BiLaurentSeries::constant(euler_product(k, inner), region);
    let p = bl_product(&[&a, &b, &c])?;
    let half = u.key(ex(-1, 2));
    Ok(restrict(p.shift_keys(half)?.shift_q(lead), window))
}

/// `θ̂(u; kτ) = Σ_{n ∈ 1/2 + ℤ} (-1)^{n+1/2} q^{k n^2 / 2} u^n`.
pub fn theta_hat_sum(u: Unit, k: i64, qorder: Exp, region: Region, window: Option<i64>) -> Result<BiLaurentSeries> {
    check_unit(u)?;
    check_scale(k)?;
    // n = m + 1/2, so k n^2 / 2 = (k/2)(m^2 + m) + k/8.
    let quad = Quadratic1 { a: ex(k, 2), b: ex(k, 2), c: ex(k, 8) };
    let terms = quad.points_below(qorder).into_iter().map(|m| {
        let sign = if m % 2 == 0 { -1 } else { 1 };
        (u.key(exi(m) + ex(1, 2)), PuiseuxSeries::monomial(int(sign), quad.eval(m), qorder))
    });
    Ok(restrict(BiLaurentSeries::from_terms(terms, qorder, region, Support::Complete), window))
}

/// `ϑ01(u; kτ) = (q^k, u q^{k/2}, u^{-1} q^{k/2}; q^k)_∞`.
pub fn theta01(u: Unit, k: i64, qorder: Exp, region: Region, window: Option<i64>) -> Result<BiLaurentSeries> {
    check_unit(u)?;
    check_scale(k)?;
    let kq = exi(k);
    let a = unit_pochhammer(u, ex(k, 2), kq, qorder, region)?;
    let b = unit_pochhammer(u.inverse(), ex(k, 2), kq, qorder, region)?;
    let c = BiLaurentSeries::constant(euler_product(k, qorder), region);
    Ok(restrict(bl_product(&[&a, &b, &c])?, window))
}

/// `Q(n) = n1^2 + n2^2 - n1 n2`.
pub fn quad_q(n1: Exp, n2: Exp) -> Exp {
    n1 * n1 + n2 * n2 - n1 * n2
}

/// `Q*(z) = z1^2 + z2^2 + z1 z2`.
pub fn quad_q_star(z1: Exp, z2: Exp) -> Exp {
    z1 * z1 + z2 * z2 + z1 * z2
}

/// `Θ_{A2}(z; τ) = Σ_n q^{Q(n)} ζ^n`.
pub fn theta_a2(qorder: Exp, region: Region, window: Option<i64>) -> BiLaurentSeries {
    let q = Quadratic2::scaled_q(exi(1), (exi(0), exi(0)));
    let terms = q
        .points_below(qorder)
        .into_iter()
        .map(|(a, b)| ((exi(a), exi(b)), PuiseuxSeries::monomial(Rational::one(), q.eval(a, b), qorder)));
    restrict(BiLaurentSeries::from_terms(terms, qorder, region, Support::Complete), window)
}

/// `𝒯(z; τ) = Θ_{A2}(z1 + 2z2, z1 - z2; 2τ) = Σ_n q^{2Q(n)} ζ1^{n1+n2} ζ2^{2n1-n2}`.
pub fn cal_t(qorder: Exp, region: Region, window: Option<i64>) -> BiLaurentSeries {
    let q = Quadratic2::scaled_q(exi(2), (exi(0), exi(0)));
    let terms = q.points_below(qorder).into_iter().map(|(a, b)| {
        (
            (exi(a + b), exi(2 * a - b)),
            PuiseuxSeries::monomial(Rational::one(), q.eval(a, b), qorder),
        )
    });
    restrict(BiLaurentSeries::from_terms(terms, qorder, region, Support::Complete), window)
}

/// Construction path for `L(u) = 1 / (uq, u^{-1}q; q^2)_∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LPath {
    /// Product of geometric expansions of each `1 / (1 - u^{±1} q^{2j+1})`.
    Geometric,
    /// `(q^2;q^2)^{-2} Σ_{n2 >= |n1|} (-1)^{n1+n2} q^{n2(n2+1) - n1^2} u^{n1}`
    Middle,
    /// `Σ_{n2 >= 0} q^{|n1| + 2n2} / ((q^2;q^2)_{n2} (q^2;q^2)_{|n1|+n2}) u^{n1}`
    Right,
    /// `(q^2;q^2)^{-1} Σ_{n2 >= 0} q^{2n2^2 + 2n2(|n1|+1) + |n1|} / (...) u^{n1}`
    Ramanujan,
}

fn check_annulus(region: Region) -> Result<()> {
    if region == Region::Outer {
        return Err(Error::UnsupportedExpansion("theta quotient in OUTER".into()));
    }
    Ok(())
}

/// Coefficients of `L(u)` as `(n1, series)` pairs, built by a closed form.
fn l_closed_coeffs(path: LPath, qorder: Exp) -> Vec<(i64, PuiseuxSeries)> {
    let nmax = qorder.ceil().to_integer().max(0);
    let inv = inverse_pochhammer_table(exi(2), (2 * nmax + 2) as usize, qorder);
    let mut out = Vec::new();
    for n1 in -nmax..=nmax {
        let a = n1.abs();
        let mut terms: Vec<(Exp, Rational)> = Vec::new();
        let mut acc = PuiseuxSeries::zero(qorder);
        match path {
            LPath::Middle => {
                // n2 = a + t gives exponent a(2t+1) + t(t+1).
                let mut t = 0;
                loop {
                    let e = exi(a * (2 * t + 1) + t * (t + 1));
                    if e >= qorder {
                        break;
                    }
                    let sign = if (n1 + a + t) % 2 == 0 { 1 } else { -1 };
                    terms.push((e, int(sign)));
                    t += 1;
                }
            }
            LPath::Right | LPath::Ramanujan => {
                let mut n2 = 0;
                loop {
                    let e = match path {
                        LPath::Right => exi(a + 2 * n2),
                        _ => exi(2 * n2 * n2 + 2 * n2 * (a + 1) + a),
                    };
                    if e >= qorder {
                        break;
                    }
                    let den = &inv[n2 as usize] * &inv[(a + n2) as usize];
                    acc = &acc + &den.shift(e).truncate(qorder);
                    n2 += 1;
                }
            }
            LPath::Geometric => unreachable!(),
        }
        let s = &acc + &PuiseuxSeries::from_terms(terms, qorder);
        if !s.is_zero() {
            out.push((n1, s));
        }
    }
    let pre = match path {
        LPath::Middle => Some(-2),
        LPath::Ramanujan => Some(-1),
        _ => None,
    };
    if let Some(pw) = pre {
        let p = euler_product(2, qorder).pow(pw).expect("unit");
        for (_, s) in out.iter_mut() {
            *s = (&*s * &p).truncate(qorder);
        }
    }
    out
}

/// `L(u) = 1 / (uq, u^{-1}q; q^2)_∞` in `region` (INNER or WIDE).
pub fn l_factor(u: Unit, qorder: Exp, region: Region, path: LPath) -> Result<BiLaurentSeries> {
    check_unit(u)?;
    check_annulus(region)?;
    if path == LPath::Geometric {
        let mut acc = BiLaurentSeries::constant(PuiseuxSeries::one(qorder), region);
        let mut n = 1;
        while exi(n) < qorder {
            let a = expand_inverse_one_minus(u, n, region, qorder, None)?;
            let b = expand_inverse_one_minus(u.inverse(), n, region, qorder, None)?;
            acc = bl_mul(&bl_mul(&acc, &a)?, &b)?;
            n += 2;
        }
        return Ok(acc);
    }
    let terms = l_closed_coeffs(path, qorder).into_iter().map(|(n1, s)| (u.key(exi(n1)), s));
    Ok(BiLaurentSeries::from_terms(terms, qorder, region, Support::Complete))
}

/// `(-q; q)_∞`
pub fn minus_q_product(order: Exp) -> PuiseuxSeries {
    pochhammer(-1, exi(1), exi(1), None, order).expect("convergent")
}

/// `θ̂(u; 2τ) / θ̂(u; τ) = q^{1/8} (-q; q)_∞ L(u)`.
pub fn t2t_factor(u: Unit, qorder: Exp, region: Region, path: LPath) -> Result<BiLaurentSeries> {
    let lead = ex(1, 8);
    let l = l_factor(u, qorder - lead, region, path)?;
    Ok(l.scale(&minus_q_product(qorder).shift(lead)))
}

/// `q^{3/8} (-q; q)_∞^3`, the scalar part of `f`.
fn f_prefactor(qorder: Exp) -> PuiseuxSeries {
    minus_q_product(qorder).pow(3).expect("unit").shift(ex(3, 8)).truncate(qorder)
}

/// `f(z; τ) = Π_{u ∈ {ζ1, ζ2, ζ1ζ2}} θ̂(u; 2τ) / θ̂(u; τ)`.
pub fn f_series(qorder: Exp, region: Region, path: LPath, window: Option<i64>) -> Result<BiLaurentSeries> {
    let inner = qorder - ex(3, 8);
    let ls = [Unit::Z1, Unit::Z2, Unit::Z12]
        .into_iter()
        .map(|u| l_factor(u, inner, region, path))
        .collect::<Result<Vec<_>>>()?;
    let p = bl_product(&[&ls[0], &ls[1], &ls[2]])?;
    Ok(restrict(p.scale(&f_prefactor(qorder)), window))
}

/// Single Fourier coefficients of `f`, via
/// `f_e = q^{3/8} (-q;q)^3 Σ_c L_{e1-c} L_{e2-c} L_c`.
pub struct FCoefficients {
    qorder: Exp,
    inner: Exp,
    l: BTreeMap<i64, PuiseuxSeries>,
    prefactor: PuiseuxSeries,
}

impl FCoefficients {
    pub fn new(qorder: Exp) -> Result<Self> {
        let inner = qorder - ex(3, 8);
        let lf = l_factor(Unit::Z1, inner, Region::Inner, LPath::Geometric)?;
        let l = lf
            .terms()
            .map(|(k, s)| (k.0.to_integer(), s.clone()))
            .collect();
        Ok(FCoefficients { qorder, inner, l, prefactor: f_prefactor(qorder) })
    }

    pub fn qorder(&self) -> Exp {
        self.qorder
    }

    /// Coefficient of `ζ1^e1 ζ2^e2`; zero unless both are integers.
    pub fn coeff(&self, e1: Exp, e2: Exp) -> PuiseuxSeries {
        if !e1.is_integer() || !e2.is_integer() {
            return PuiseuxSeries::zero(self.qorder);
        }
        let (e1, e2) = (e1.to_integer(), e2.to_integer());
        let mut prods = Vec::new();
        for (c, lc) in &self.l {
            if let (Some(a), Some(b)) = (self.l.get(&(e1 - c)), self.l.get(&(e2 - c))) {
                if a.valuation() + b.valuation() + lc.valuation() < self.inner {
                    prods.push((a * b, lc));
                }
            }
        }
        let pairs: Vec<_> = prods.iter().map(|(ab, c)| (ab, *c)).collect();
        let s = PuiseuxSeries::sum_of_products(&pairs, self.inner);
        let s = if pairs.is_empty() { PuiseuxSeries::zero(self.inner) } else { s };
        (&s * &self.prefactor).truncate(self.qorder)
    }

    /// `f` restricted to the box `|e_i| <= bound`, INNER.
    pub fn window(&self, bound: i64) -> BiLaurentSeries {
        let mut terms = Vec::new();
        for e1 in -bound..=bound {
            for e2 in -bound..=bound {
                terms.push(((exi(e1), exi(e2)), self.coeff(exi(e1), exi(e2))));
            }
        }
        BiLaurentSeries::from_terms(terms, self.qorder, Region::Inner, Support::Windowed { bound, orthant: None })
    }
}

/// `J(z; τ) = η(τ)^5 / η(2τ) 𝒯(z; τ) f(z; τ)`.
pub fn j_series(qorder: Exp, window: Option<i64>) -> Result<BiLaurentSeries> {
    let inner = qorder - ex(1, 8);
    let f = f_series(inner, Region::Inner, LPath::Geometric, None)?;
    let t = cal_t(inner, Region::Inner, None);
    let p = bl_mul(&t, &f)?;
    Ok(restrict(p.scale(&eta_quotient(&[(1, 5), (2, -1)], qorder)?), window))
}

/// `(η(τ)/η(2τ)) f(z; τ)`, the level `-3/2` character of `sl3^`.
pub fn kw_character_n3(qorder: Exp, window: Option<i64>) -> Result<BiLaurentSeries> {
    let inner = qorder + ex(1, 24);
    let f = f_series(inner, Region::Inner, LPath::Geometric, None)?;
    Ok(restrict(f.scale(&eta_quotient(&[(1, 1), (2, -1)], qorder + exi(1))?).truncate(qorder), window))
}

/// The same character assembled from the product over pairs `j <= k` of
/// `θ̂(z_j + ... + z_k; 2τ) / θ̂(z_j + ... + z_k; τ)` for rank `n - 1`,
/// specialised to `n = 3`.
pub fn kw_character_pairs(qorder: Exp) -> Result<BiLaurentSeries> {
    let n = 3usize;
    let inner = qorder + ex(1, 24);
    let mut acc = BiLaurentSeries::constant(PuiseuxSeries::one(inner), Region::Inner);
    for j in 0..n - 1 {
        for k in j..n - 1 {
            let mut dir = [0i64; 2];
            for d in dir.iter_mut().take(k + 1).skip(j) {
                *d = 1;
            }
            let u = Unit::new(1, (dir[0], dir[1]))?;
            acc = bl_mul(&acc, &t2t_factor(u, inner, Region::Inner, LPath::Geometric)?)?;
        }
    }
    let power = ((n - 1) * (n - 2) / 2) as i64;
    let eta = eta_quotient(&[(1, power), (2, -power)], qorder + exi(1))?;
    Ok(acc.scale(&eta).truncate(qorder))
}

/// `1 / (uq^2, u^{-1}q^2; q^2)_∞`, the regular part of `ϑ01(z;2τ)/ϑ(z;τ)`.
pub fn c_factor(u: Unit, qorder: Exp, region: Region) -> Result<BiLaurentSeries> {
    check_unit(u)?;
    let mut acc = BiLaurentSeries::constant(PuiseuxSeries::one(qorder), region);
    let mut n = 2;
    while exi(n) < qorder {
        let a = expand_inverse_one_minus(u, n, region, qorder, None)?;
        let b = expand_inverse_one_minus(u.inverse(), n, region, qorder, None)?;
        acc = bl_mul(&bl_mul(&acc, &a)?, &b)?;
        n += 2;
    }
    Ok(acc)
}
