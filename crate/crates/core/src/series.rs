//! Truncated formal series in `q` with rational exponents.
//!
//! A [`PuiseuxSeries`] stores finitely many nonzero terms `c q^e` together
//! with a truncation bound `order`: every exponent strictly below `order` is
//! exact, nothing is claimed at or above it.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{exi, parse_exp, parse_rational, render_exp, render_rational, Exp, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuiseuxSeries {
    terms: BTreeMap<Exp, Rational>,
    order: Exp,
}

impl PuiseuxSeries {
    pub fn zero(order: Exp) -> Self {
        PuiseuxSeries { terms: BTreeMap::new(), order }
    }

    pub fn one(order: Exp) -> Self {
        Self::monomial(Rational::one(), exi(0), order)
    }

    pub fn constant(c: Rational, order: Exp) -> Self {
        Self::monomial(c, exi(0), order)
    }

    pub fn monomial(c: Rational, e: Exp, order: Exp) -> Self {
        let mut terms = BTreeMap::new();
        if e < order && !c.is_zero() {
            terms.insert(e, c);
        }
        PuiseuxSeries { terms, order }
    }

    /// Sums duplicate exponents; drops zeros and anything at or above `order`.
    pub fn from_terms<I: IntoIterator<Item = (Exp, Rational)>>(terms: I, order: Exp) -> Self {
        let mut map: BTreeMap<Exp, Rational> = BTreeMap::new();
        for (e, c) in terms {
            if e < order && !c.is_zero() {
                *map.entry(e).or_insert_with(Rational::zero) += c;
            }
        }
        map.retain(|_, c| !c.is_zero());
        PuiseuxSeries { terms: map, order }
    }

    pub fn order(&self) -> Exp {
        self.order
    }

    /// Smallest stored exponent; `order` for the empty series.
    pub fn valuation(&self) -> Exp {
        self.terms.keys().next().copied().unwrap_or(self.order)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (Exp, &Rational)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, e: Exp) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<(Exp, &Rational)> {
        self.terms.iter().next().map(|(e, c)| (*e, c))
    }

    pub fn truncate(&self, order: Exp) -> Self {
        let order = order.min(self.order);
        PuiseuxSeries {
            terms: self.terms.range(..order).map(|(e, c)| (*e, c.clone())).collect(),
            order,
        }
    }

    pub fn scalar_mul(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.order);
        }
        PuiseuxSeries {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
            order: self.order,
        }
    }

    /// Multiplication by `q^e`; the order moves with the exponents.
    pub fn shift(&self, e: Exp) -> Self {
        PuiseuxSeries {
            terms: self.terms.iter().map(|(k, c)| (*k + e, c.clone())).collect(),
            order: self.order + e,
        }
    }

    /// Realizes `q -> q^k` (that is `τ -> kτ`).
    pub fn scale_q(&self, k: Exp) -> Self {
        assert!(k > exi(0), "scale_q needs a positive factor");
        PuiseuxSeries {
            terms: self.terms.iter().map(|(e, c)| (*e * k, c.clone())).collect(),
            order: self.order * k,
        }
    }

    /// `self * (1 - sign q^e)`, truncated at the current order.
    pub fn mul_one_minus(&self, sign: i64, e: Exp) -> Self {
        assert!(e >= exi(0));
        let mut terms = self.terms.clone();
        let s = Rational::from_integer(BigInt::from(sign));
        for (k, c) in self.terms.range(..self.order - e) {
            let slot = terms.entry(*k + e).or_insert_with(Rational::zero);
            *slot -= c * &s;
            if slot.is_zero() {
                terms.remove(&(*k + e));
            }
        }
        PuiseuxSeries { terms, order: self.order }
    }

    pub fn add_series(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut terms: BTreeMap<Exp, Rational> =
            self.terms.range(..order).map(|(e, c)| (*e, c.clone())).collect();
        for (e, c) in other.terms.range(..order) {
            let slot = terms.entry(*e).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                terms.remove(e);
            }
        }
        PuiseuxSeries { terms, order }
    }

    pub fn mul_series(&self, other: &Self) -> Self {
        let order = (self.order + other.valuation()).min(other.order + self.valuation());
        let terms = convolve(&[(self, other)], order);
        PuiseuxSeries { terms, order }
    }

    /// Sum of products `Σ a_i b_i`. The result order is the smallest of the
    /// individual product orders, capped by `cap`.
    pub fn sum_of_products(pairs: &[(&PuiseuxSeries, &PuiseuxSeries)], cap: Exp) -> Self {
        let order = pairs
            .iter()
            .map(|(a, b)| (a.order + b.valuation()).min(b.order + a.valuation()))
            .fold(cap, Exp::min);
        let terms = convolve(pairs, order);
        PuiseuxSeries { terms, order }
    }

    /// Inverse of a unit `c q^v (1 + h)`. The result has valuation `-v` and
    /// order `order - 2v`, so that `self * inverse` is exact up to `order - v`.
    pub fn invert(&self) -> Result<Self> {
        let (v, c) = self.leading().ok_or(Error::NotInvertible)?;
        let c_inv = c.recip();
        let rel = self.order - v;
        let den = self
            .terms
            .keys()
            .fold(*rel.denom(), |acc, e| acc.lcm((*e - v).denom()));
        let len = (rel * exi(den)).ceil().to_integer().max(0) as usize;
        let h: Vec<(usize, Rational)> = self
            .terms
            .iter()
            .skip(1)
            .map(|(e, x)| (((*e - v) * exi(den)).to_integer() as usize, x * &c_inv))
            .filter(|(i, _)| *i < len)
            .collect();
        let mut g: Vec<Rational> = vec![Rational::zero(); len];
        if len > 0 {
            g[0] = Rational::one();
        }
        for i in 1..len {
            let mut acc = Rational::zero();
            for (j, hj) in &h {
                if *j > i {
                    break;
                }
                let gi = &g[i - j];
                if !gi.is_zero() {
                    acc -= hj * gi;
                }
            }
            g[i] = acc;
        }
        let terms = g
            .into_iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (Exp::new(i as i64, den) - v, x * &c_inv));
        Ok(Self::from_terms(terms, self.order - v - v))
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.invert()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(base.order - base.valuation());
        let mut sq = base;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                acc = if first { sq.clone() } else { acc.mul_series(&sq) };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_series(&sq);
            }
        }
        Ok(acc)
    }

    pub fn map_coeffs<F: Fn(Exp, &Rational) -> Rational>(&self, f: F) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, f(*e, c))), self.order)
    }
}

/// Accumulates `Σ a_i * b_i` below `limit`.
///
/// Exponents are mapped onto a common grid `(1/D)ℤ`. Integer coefficients
/// that fit in `i64` go through an `i128` accumulator; anything else (or an
/// overflow) falls back to big rationals.
fn convolve(pairs: &[(&PuiseuxSeries, &PuiseuxSeries)], limit: Exp) -> BTreeMap<Exp, Rational> {
    let pairs: Vec<_> = pairs.iter().filter(|(a, b)| !a.is_zero() && !b.is_zero()).collect();
    if pairs.is_empty() {
        return BTreeMap::new();
    }
    let mut den: i64 = *limit.denom();
    let mut small = true;
    for (a, b) in &pairs {
        for s in [a, b] {
            for (e, c) in s.terms.iter() {
                den = den.lcm(e.denom());
                if small && !(c.denom().is_one() && c.numer().to_i64().is_some()) {
                    small = false;
                }
            }
        }
    }
    let index = |e: Exp| -> i64 { *e.numer() * (den / *e.denom()) };
    let lim = (limit * exi(den)).ceil().to_integer();
    let lo = pairs
        .iter()
        .map(|(a, b)| index(a.valuation()) + index(b.valuation()))
        .min()
        .unwrap();
    if lo >= lim {
        return BTreeMap::new();
    }
    let width = (lim - lo) as usize;
    let prepared: Vec<(Vec<(i64, &Rational)>, Vec<(i64, &Rational)>)> = pairs
        .iter()
        .map(|(a, b)| {
            (
                a.terms.iter().map(|(e, c)| (index(*e), c)).collect(),
                b.terms.iter().map(|(e, c)| (index(*e), c)).collect(),
            )
        })
        .collect();

    let to_exp = |i: usize| Exp::new(i as i64 + lo, den);

    if small && width <= (1 << 22) {
        let mut acc = vec![0i128; width];
        let mut ok = true;
        'outer: for (xa, xb) in &prepared {
            for (ia, ca) in xa {
                let ca = ca.numer().to_i64().unwrap() as i128;
                for (ib, cb) in xb {
                    let k = ia + ib;
                    if k >= lim {
                        break;
                    }
                    let cb = cb.numer().to_i64().unwrap() as i128;
                    let slot = &mut acc[(k - lo) as usize];
                    match ca.checked_mul(cb).and_then(|p| slot.checked_add(p)) {
                        Some(v) => *slot = v,
                        None => {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
            }
        }
        if ok {
            return acc
                .into_iter()
                .enumerate()
                .filter(|(_, v)| *v != 0)
                .map(|(i, v)| (to_exp(i), Rational::from_integer(BigInt::from(v))))
                .collect();
        }
    }

    let mut acc: BTreeMap<i64, Rational> = BTreeMap::new();
    for (xa, xb) in &prepared {
        for (ia, ca) in xa {
            for (ib, cb) in xb {
                let k = ia + ib;
                if k >= lim {
                    break;
                }
                *acc.entry(k).or_insert_with(Rational::zero) += *ca * *cb;
            }
        }
    }
    acc.into_iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, v)| (Exp::new(k, den), v))
        .collect()
}

impl Add for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn add(self, rhs: Self) -> PuiseuxSeries {
        self.add_series(rhs)
    }
}

impl Sub for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn sub(self, rhs: Self) -> PuiseuxSeries {
        self.add_series(&-rhs)
    }
}

impl Neg for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        PuiseuxSeries {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
            order: self.order,
        }
    }
}

impl Mul for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn mul(self, rhs: Self) -> PuiseuxSeries {
        self.mul_series(rhs)
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = a.is_one();
            if e.is_zero() {
                write!(f, "{a}")?;
            } else {
                if !unit {
                    write!(f, "{a}*")?;
                }
                if e.is_one() {
                    write!(f, "q")?;
                } else if e.is_integer() && e.is_positive() {
                    write!(f, "q^{e}")?;
                } else {
                    write!(f, "q^({e})")?;
                }
            }
        }
        if !first {
            write!(f, " + ")?;
        }
        if self.order.is_integer() && !self.order.is_negative() {
            write!(f, "O(q^{})", self.order)
        } else {
            write!(f, "O(q^({}))", self.order)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: String,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    order: String,
    terms: Vec<TermRepr>,
}

impl Serialize for PuiseuxSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            order: render_exp(self.order),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr { exp: render_exp(*e), coeff: render_rational(c) })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PuiseuxSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SeriesRepr::deserialize(d)?;
        let order = parse_exp(&repr.order).map_err(D::Error::custom)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            let e = parse_exp(&t.exp).map_err(D::Error::custom)?;
            if e >= order {
                return Err(D::Error::custom(format!("exponent {e} not below order {order}")));
            }
            terms.push((e, parse_rational(&t.coeff).map_err(D::Error::custom)?));
        }
        Ok(PuiseuxSeries::from_terms(terms, order))
    }
}

/// Number of factors `n` in a Pochhammer symbol; `None` means infinite.
pub type Count = Option<u64>;

/// `(σ q^s; q^t)_n = ∏_{j<n} (1 - σ q^{s + j t})`, exact below `order`.
pub fn pochhammer(sign: i64, s: Exp, t: Exp, n: Count, order: Exp) -> Result<PuiseuxSeries> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidParam(format!("pochhammer sign must be ±1, got {sign}")));
    }
    if t <= exi(0) {
        return Err(Error::Convergence(format!("step must be positive, got {t}")));
    }
    match n {
        None if s <= exi(0) => {
            return Err(Error::Convergence(format!("infinite product needs s > 0, got {s}")))
        }
        Some(k) if k > 0 && s < exi(0) => {
            return Err(Error::Convergence(format!("factor exponents must be >= 0, got {s}")))
        }
        _ => {}
    }
    let mut acc = PuiseuxSeries::one(order);
    let mut j: u64 = 0;
    loop {
        if let Some(k) = n {
            if j >= k {
                break;
            }
        }
        let e = s + t * exi(j as i64);
        if e >= order {
            break;
        }
        acc = acc.mul_one_minus(sign, e);
        j += 1;
    }
    Ok(acc)
}

/// `(q^k; q^k)_∞` below `order`.
pub fn euler_product(k: i64, order: Exp) -> PuiseuxSeries {
    pochhammer(1, exi(k), exi(k), None, order).expect("k > 0")
}

/// `η(kτ) = q^{k/24} (q^k; q^k)_∞` below `order`.
pub fn eta_series(k: i64, order: Exp) -> Result<PuiseuxSeries> {
    if k <= 0 {
        return Err(Error::InvalidParam(format!("eta scale must be positive, got {k}")));
    }
    let v = Exp::new(k, 24);
    Ok(euler_product(k, order - v).shift(v))
}

/// `∏ η(k τ)^{e}` below `order`, for a list of `(k, e)` pairs.
pub fn eta_quotient(factors: &[(i64, i64)], order: Exp) -> Result<PuiseuxSeries> {
    let v: Exp = factors.iter().map(|&(k, e)| Exp::new(k * e, 24)).sum();
    let inner = order - v;
    let mut acc = PuiseuxSeries::one(inner);
    for &(k, e) in factors {
        if k <= 0 {
            return Err(Error::InvalidParam(format!("eta scale must be positive, got {k}")));
        }
        if e != 0 {
            acc = acc.mul_series(&euler_product(k, inner).pow(e)?);
        }
    }
    Ok(acc.shift(v))
}

/// `1 / (q^t; q^t)_k` for `k = 0..=kmax`, each exact below `order`.
pub fn inverse_pochhammer_table(t: Exp, kmax: usize, order: Exp) -> Vec<PuiseuxSeries> {
    assert!(t > exi(0));
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(PuiseuxSeries::one(order));
    for k in 1..=kmax {
        let step = t * exi(k as i64);
        let mut geo = Vec::new();
        let mut e = exi(0);
        while e < order {
            geo.push((e, Rational::one()));
            e += step;
        }
        let g = PuiseuxSeries::from_terms(geo, order);
        let next = out[k - 1].mul_series(&g).truncate(order);
        out.push(next);
    }
    out
}
