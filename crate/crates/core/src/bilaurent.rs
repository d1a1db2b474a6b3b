//! Two-variable Laurent series in `ζ1, ζ2` over [`PuiseuxSeries`].
//!
//! Every value is tagged with the [`Region`] its expansion is valid in and a
//! [`Support`] describing where its coefficients can be trusted:
//!
//! * `Complete`: every key whose coefficient has terms below `qorder` is
//!   stored. Absent keys are `O(q^qorder)`.
//! * `Windowed`: only keys with `|e1|, |e2| <= bound` are exact. If an orthant
//!   is recorded, the untruncated series is supported inside it, so keys
//!   outside the orthant are exactly zero.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{exi, parse_exp, render_exp, Exp, Rational};
use crate::series::PuiseuxSeries;

pub type Key = (Exp, Exp);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Region {
    /// `|q| < |ζ1|, |ζ2|, |ζ1ζ2| < 1`
    Inner,
    /// `|ζ1|, |ζ2| > 1`
    Outer,
    /// `|q| < |u| < |q|^{-1}` for each unit
    Wide,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Inner => "INNER",
            Region::Outer => "OUTER",
            Region::Wide => "WIDE",
        })
    }
}

impl std::str::FromStr for Region {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "INNER" => Ok(Region::Inner),
            "OUTER" => Ok(Region::Outer),
            "WIDE" => Ok(Region::Wide),
            _ => Err(Error::Parse(format!("unknown region `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orthant {
    /// `e1, e2 >= 0`
    Positive,
    /// `e1, e2 <= 0`
    Negative,
}

impl Orthant {
    fn contains(self, k: &Key) -> bool {
        let z = exi(0);
        match self {
            Orthant::Positive => k.0 >= z && k.1 >= z,
            Orthant::Negative => k.0 <= z && k.1 <= z,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    Complete,
    Windowed { bound: i64, orthant: Option<Orthant> },
}

impl Support {
    fn in_box(bound: i64, k: &Key) -> bool {
        k.0.abs() <= exi(bound) && k.1.abs() <= exi(bound)
    }

    /// True when the coefficient at `k` is known below `qorder`.
    pub fn is_exact(&self, k: &Key) -> bool {
        match *self {
            Support::Complete => true,
            Support::Windowed { bound, .. } => Self::in_box(bound, k),
        }
    }

    fn keeps(&self, k: &Key) -> bool {
        match *self {
            Support::Complete => true,
            Support::Windowed { bound, orthant } => {
                Self::in_box(bound, k) && orthant.is_none_or(|o| o.contains(k))
            }
        }
    }

    pub fn window(&self) -> Option<i64> {
        match *self {
            Support::Complete => None,
            Support::Windowed { bound, .. } => Some(bound),
        }
    }
}

/// A unit `sign * ζ1^d1 ζ2^d2` with `d` one of `±(1,0), ±(0,1), ±(1,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Unit {
    pub sign: i64,
    pub dir: (i64, i64),
}

impl Unit {
    pub const Z1: Unit = Unit { sign: 1, dir: (1, 0) };
    pub const Z2: Unit = Unit { sign: 1, dir: (0, 1) };
    pub const Z12: Unit = Unit { sign: 1, dir: (1, 1) };

    pub fn new(sign: i64, dir: (i64, i64)) -> Result<Self> {
        let ok_dir = matches!(dir, (1, 0) | (0, 1) | (1, 1) | (-1, 0) | (0, -1) | (-1, -1));
        if (sign != 1 && sign != -1) || !ok_dir {
            return Err(Error::InvalidParam(format!("bad unit {sign}*zeta^{dir:?}")));
        }
        Ok(Unit { sign, dir })
    }

    pub fn inverse(self) -> Self {
        Unit { sign: self.sign, dir: (-self.dir.0, -self.dir.1) }
    }

    pub fn negated(self) -> Self {
        Unit { sign: -self.sign, dir: self.dir }
    }

    /// Key of `u^k`, ignoring the sign.
    pub fn key(self, k: Exp) -> Key {
        (k * exi(self.dir.0), k * exi(self.dir.1))
    }

    fn positive_dir(self) -> bool {
        self.dir.0 >= 0 && self.dir.1 >= 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiLaurentSeries {
    terms: BTreeMap<Key, PuiseuxSeries>,
    qorder: Exp,
    region: Region,
    support: Support,
}

impl BiLaurentSeries {
    /// Builds a series, truncating every coefficient to `qorder` and dropping
    /// keys the support cannot hold.
    pub fn from_terms<I>(terms: I, qorder: Exp, region: Region, support: Support) -> Self
    where
        I: IntoIterator<Item = (Key, PuiseuxSeries)>,
    {
        let mut map: BTreeMap<Key, PuiseuxSeries> = BTreeMap::new();
        for (k, c) in terms {
            if !support.keeps(&k) {
                continue;
            }
            let c = c.truncate(qorder);
            match map.remove(&k) {
                Some(prev) => {
                    let s = &prev + &c;
                    if !s.is_zero() {
                        map.insert(k, s);
                    }
                }
                None if !c.is_zero() => {
                    map.insert(k, c);
                }
                None => {}
            }
        }
        for c in map.values_mut() {
            if c.order() > qorder {
                *c = c.truncate(qorder);
            }
        }
        BiLaurentSeries { terms: map, qorder, region, support }
    }

    pub fn zero(qorder: Exp, region: Region) -> Self {
        Self::from_terms([], qorder, region, Support::Complete)
    }

    /// The series `c` placed at key `(0, 0)`.
    pub fn constant(c: PuiseuxSeries, region: Region) -> Self {
        let q = c.order();
        Self::from_terms([((exi(0), exi(0)), c)], q, region, Support::Complete)
    }

    /// `c q^qe ζ1^e1 ζ2^e2`, exact as a Laurent polynomial.
    pub fn monomial(c: Rational, qe: Exp, key: Key, qorder: Exp, region: Region) -> Self {
        Self::from_terms(
            [(key, PuiseuxSeries::monomial(c, qe, qorder))],
            qorder,
            region,
            Support::Complete,
        )
    }

    pub fn qorder(&self) -> Exp {
        self.qorder
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn window(&self) -> Option<i64> {
        self.support.window()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &PuiseuxSeries)> {
        self.terms.iter()
    }

    /// Lower bound for the valuation of every coefficient, stored or not.
    pub fn vfloor(&self) -> Exp {
        self.terms.values().map(|c| c.valuation()).fold(self.qorder, Exp::min)
    }

    /// Largest `|e_i|` over stored keys.
    pub fn spread(&self) -> Exp {
        self.terms.keys().map(|k| k.0.abs().max(k.1.abs())).fold(exi(0), Exp::max)
    }

    fn keys_in(&self, o: Orthant) -> bool {
        self.terms.keys().all(|k| o.contains(k))
    }

    pub fn truncate(&self, qorder: Exp) -> Self {
        Self::from_terms(self.terms.clone(), qorder.min(self.qorder), self.region, self.support)
    }

    /// Keeps only the box `|e_i| <= bound`.
    pub fn restrict(&self, bound: i64) -> Self {
        let support = match self.support {
            Support::Complete => Support::Windowed { bound, orthant: None },
            Support::Windowed { bound: b, orthant } => Support::Windowed { bound: b.min(bound), orthant },
        };
        Self::from_terms(self.terms.clone(), self.qorder, self.region, support)
    }

    pub fn neg(&self) -> Self {
        BiLaurentSeries {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
            ..self.clone()
        }
    }

    /// Multiplies by `q^e`.
    pub fn shift_q(&self, e: Exp) -> Self {
        BiLaurentSeries {
            terms: self.terms.iter().map(|(k, c)| (*k, c.shift(e))).collect(),
            qorder: self.qorder + e,
            region: self.region,
            support: self.support,
        }
    }

    /// Multiplies every coefficient by the one-variable series `p`.
    pub fn scale(&self, p: &PuiseuxSeries) -> Self {
        let qorder = (self.qorder + p.valuation()).min(p.order() + self.vfloor());
        let terms: Vec<_> = self.terms.iter().map(|(k, c)| (*k, c * p)).collect();
        Self::from_terms(terms, qorder, self.region, self.support)
    }

    /// Multiplies by the monomial `ζ1^d1 ζ2^d2`. Windowed series would lose
    /// their symmetric box, so only complete ones are accepted.
    pub fn shift_keys(&self, d: Key) -> Result<Self> {
        if self.support != Support::Complete {
            return Err(Error::UnsupportedExpansion("key shift of a windowed series".into()));
        }
        let terms: Vec<_> = self.terms.iter().map(|(k, c)| ((k.0 + d.0, k.1 + d.1), c.clone())).collect();
        Ok(Self::from_terms(terms, self.qorder, self.region, self.support))
    }

    pub fn map_coeffs<F: Fn(&Key, &PuiseuxSeries) -> PuiseuxSeries>(&self, f: F) -> Self {
        let terms: Vec<_> = self.terms.iter().map(|(k, c)| (*k, f(k, c))).collect();
        Self::from_terms(terms, self.qorder, self.region, self.support)
    }
}

fn check_regions(a: &BiLaurentSeries, b: &BiLaurentSeries) -> Result<()> {
    if a.region != b.region {
        return Err(Error::RegionMismatch(a.region, b.region));
    }
    Ok(())
}

pub fn bl_add(a: &BiLaurentSeries, b: &BiLaurentSeries) -> Result<BiLaurentSeries> {
    check_regions(a, b)?;
    let support = match (a.support, b.support) {
        (Support::Complete, Support::Complete) => Support::Complete,
        (Support::Windowed { bound, orthant }, Support::Complete)
        | (Support::Complete, Support::Windowed { bound, orthant }) => {
            let other = if a.support == Support::Complete { a } else { b };
            let orthant = orthant.filter(|o| other.keys_in(*o));
            Support::Windowed { bound, orthant }
        }
        (Support::Windowed { bound: w1, orthant: o1 }, Support::Windowed { bound: w2, orthant: o2 }) => {
            Support::Windowed { bound: w1.min(w2), orthant: if o1 == o2 { o1 } else { None } }
        }
    };
    let qorder = a.qorder.min(b.qorder);
    let terms = a.terms.iter().chain(b.terms.iter()).map(|(k, c)| (*k, c.clone()));
    Ok(BiLaurentSeries::from_terms(terms, qorder, a.region, support))
}

pub fn bl_sub(a: &BiLaurentSeries, b: &BiLaurentSeries) -> Result<BiLaurentSeries> {
    bl_add(a, &b.neg())
}

fn product_support(a: &BiLaurentSeries, b: &BiLaurentSeries) -> Result<Support> {
    let windowed_times_complete = |bound: i64, orthant: Option<Orthant>, c: &BiLaurentSeries| {
        if let Some(o) = orthant {
            if c.keys_in(o) {
                return Ok(Support::Windowed { bound, orthant: Some(o) });
            }
        }
        let s = c.spread().ceil().to_integer();
        if s > bound {
            return Err(Error::WindowExhausted(format!(
                "window {bound} cannot absorb a factor of spread {s}"
            )));
        }
        Ok(Support::Windowed { bound: bound - s, orthant: None })
    };
    match (a.support, b.support) {
        (Support::Complete, Support::Complete) => Ok(Support::Complete),
        (Support::Windowed { bound, orthant }, Support::Complete) => windowed_times_complete(bound, orthant, b),
        (Support::Complete, Support::Windowed { bound, orthant }) => windowed_times_complete(bound, orthant, a),
        (Support::Windowed { bound: w1, orthant: Some(o1) }, Support::Windowed { bound: w2, orthant: Some(o2) })
            if o1 == o2 =>
        {
            Ok(Support::Windowed { bound: w1.min(w2), orthant: Some(o1) })
        }
        _ => Err(Error::UnsupportedExpansion(
            "product of two windowed series needs a shared orthant".into(),
        )),
    }
}

fn product_qorder(a: &BiLaurentSeries, b: &BiLaurentSeries) -> Exp {
    (a.qorder + b.vfloor()).min(b.qorder + a.vfloor())
}

pub fn bl_mul(a: &BiLaurentSeries, b: &BiLaurentSeries) -> Result<BiLaurentSeries> {
    check_regions(a, b)?;
    let support = product_support(a, b)?;
    let qorder = product_qorder(a, b);
    let mut groups: BTreeMap<Key, Vec<(&PuiseuxSeries, &PuiseuxSeries)>> = BTreeMap::new();
    for (ka, ca) in &a.terms {
        let va = ca.valuation();
        for (kb, cb) in &b.terms {
            if va + cb.valuation() >= qorder {
                continue;
            }
            let k = (ka.0 + kb.0, ka.1 + kb.1);
            if support.keeps(&k) {
                groups.entry(k).or_default().push((ca, cb));
            }
        }
    }
    let groups: Vec<_> = groups.into_iter().collect();
    let terms: Vec<(Key, PuiseuxSeries)> = groups
        .into_par_iter()
        .map(|(k, pairs)| (k, PuiseuxSeries::sum_of_products(&pairs, qorder)))
        .collect();
    Ok(BiLaurentSeries::from_terms(terms, qorder, a.region, support))
}

/// Product of several factors, left to right.
pub fn bl_product(factors: &[&BiLaurentSeries]) -> Result<BiLaurentSeries> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidParam("empty product".into()))?;
    let mut acc = (*first).clone();
    for f in rest {
        acc = bl_mul(&acc, f)?;
    }
    Ok(acc)
}

/// Coefficient at `key` of `a * b` without forming the whole product.
pub fn bl_coeff_of_product(a: &BiLaurentSeries, b: &BiLaurentSeries, key: Key) -> Result<PuiseuxSeries> {
    check_regions(a, b)?;
    let support = product_support(a, b)?;
    if !support.is_exact(&key) {
        return Err(Error::OutsideWindow(key.0.to_string(), key.1.to_string()));
    }
    let qorder = product_qorder(a, b);
    let pairs: Vec<_> = a
        .terms
        .iter()
        .filter_map(|(ka, ca)| b.terms.get(&(key.0 - ka.0, key.1 - ka.1)).map(|cb| (ca, cb)))
        .collect();
    Ok(PuiseuxSeries::sum_of_products(&pairs, qorder).truncate(qorder))
}

/// Coefficient of `ζ1^r1 ζ2^r2`, or the zero series of order `qorder`.
pub fn bl_coeff(a: &BiLaurentSeries, r1: Exp, r2: Exp) -> Result<PuiseuxSeries> {
    if !a.support.is_exact(&(r1, r2)) {
        return Err(Error::OutsideWindow(r1.to_string(), r2.to_string()));
    }
    Ok(a.terms.get(&(r1, r2)).cloned().unwrap_or_else(|| PuiseuxSeries::zero(a.qorder)))
}

/// Expansion of `1 / (1 - u q^n)` in `region`.
///
/// When `|u q^n| < 1` on the region this is `Σ_{k>=0} u^k q^{kn}`, otherwise
/// `-Σ_{k>=1} u^{-k} q^{-kn}`. For `n = 0` the result has infinitely many
/// keys at q-order zero and needs a window.
pub fn expand_inverse_one_minus(
    u: Unit,
    n: i64,
    region: Region,
    qorder: Exp,
    window: Option<i64>,
) -> Result<BiLaurentSeries> {
    let unsupported = || {
        Err(Error::UnsupportedExpansion(format!(
            "1/(1 - u q^{n}) with u = {}zeta^{:?} in {region}",
            if u.sign < 0 { "-" } else { "" },
            u.dir
        )))
    };
    // Whether |u| < 1 throughout the region; None when it straddles 1.
    let small = match region {
        Region::Inner => Some(u.positive_dir()),
        Region::Outer => Some(!u.positive_dir()),
        Region::Wide => None,
    };
    let forward = match (n, small) {
        (0, None) => return unsupported(),
        (0, Some(s)) => s,
        (n, Some(true)) => n >= 0,
        (n, _) => n >= 1,
    };
    let (step_unit, start, sign) = if forward { (u, 0i64, 1i64) } else { (u.inverse(), 1, -1) };
    let qstep = if forward { n } else { -n };
    let orthant = if step_unit.positive_dir() { Orthant::Positive } else { Orthant::Negative };
    let support = if n == 0 {
        let bound = window.ok_or(Error::WindowRequired)?;
        Support::Windowed { bound, orthant: Some(orthant) }
    } else {
        Support::Complete
    };
    let limit = match support {
        Support::Windowed { bound, .. } => bound,
        Support::Complete => {
            // qstep > 0 here; keys stop once k * qstep reaches qorder.
            (qorder / exi(qstep)).ceil().to_integer().max(0)
        }
    };
    let mut terms = Vec::new();
    for k in start..=limit {
        let qe = exi(k * qstep);
        if qe >= qorder {
            break;
        }
        let c = sign * if k % 2 == 1 { step_unit.sign } else { 1 };
        terms.push((step_unit.key(exi(k)), PuiseuxSeries::monomial(Rational::from_integer(c.into()), qe, qorder)));
    }
    Ok(BiLaurentSeries::from_terms(terms, qorder, region, support))
}

/// Outer expansion of the A2 Weyl denominator
/// `1 / ((1 - ζ1^{-1})(1 - ζ2^{-1})(1 - ζ1^{-1}ζ2^{-1}))`.
pub fn expand_weyl_denominator(region: Region, qorder: Exp, window: i64) -> Result<BiLaurentSeries> {
    if region != Region::Outer {
        return Err(Error::UnsupportedExpansion(format!("Weyl denominator in {region}")));
    }
    let mut terms = Vec::new();
    for l1 in 0..=window {
        for l2 in 0..=window {
            let c = Rational::from_integer((l1.min(l2) + 1).into());
            terms.push(((exi(-l1), exi(-l2)), PuiseuxSeries::constant(c, qorder)));
        }
    }
    Ok(BiLaurentSeries::from_terms(
        terms,
        qorder,
        region,
        Support::Windowed { bound: window, orthant: Some(Orthant::Negative) },
    ))
}

/// Substitutes `ζ_j -> ζ_j q^{m_j}`.
///
/// The q-order drops by the most negative `m·e` over the exact box, so the
/// result stays sound for keys that were never stored.
pub fn bl_elliptic_shift(a: &BiLaurentSeries, m1: i64, m2: i64) -> Result<BiLaurentSeries> {
    let Support::Windowed { bound, orthant } = a.support else {
        return Err(Error::WindowRequired);
    };
    let w = exi(bound);
    let corner = |s1: Exp, s2: Exp| exi(m1) * s1 + exi(m2) * s2;
    let (lo1, hi1, lo2, hi2) = match orthant {
        None => (-w, w, -w, w),
        Some(Orthant::Positive) => (exi(0), w, exi(0), w),
        Some(Orthant::Negative) => (-w, exi(0), -w, exi(0)),
    };
    let min_box = [corner(lo1, lo2), corner(lo1, hi2), corner(hi1, lo2), corner(hi1, hi2)]
        .into_iter()
        .fold(exi(0), Exp::min);
    let qorder = a.qorder + min_box;
    let terms: Vec<_> = a
        .terms
        .iter()
        .map(|(k, c)| (*k, c.shift(exi(m1) * k.0 + exi(m2) * k.1)))
        .collect();
    Ok(BiLaurentSeries::from_terms(terms, qorder, a.region, a.support))
}

/// Substitutes `z -> z + l`, i.e. multiplies the coefficient at `e` by
/// `e^{2πi e·l}`. Only sign changes are representable.
pub fn bl_translate_z(a: &BiLaurentSeries, l: (Exp, Exp)) -> Result<BiLaurentSeries> {
    let mut terms = Vec::with_capacity(a.terms.len());
    for (k, c) in &a.terms {
        let phase = k.0 * l.0 + k.1 * l.1;
        let twice = phase * exi(2);
        if !twice.is_integer() {
            return Err(Error::InvalidParam(format!("phase e^(2 pi i {phase}) is not real")));
        }
        let odd = (twice.to_integer() % 2) != 0;
        terms.push((*k, if odd { -c } else { c.clone() }));
    }
    Ok(BiLaurentSeries::from_terms(terms, a.qorder, a.region, a.support))
}

/// Remaps keys `e -> M e`.
pub fn bl_monomial_substitution(a: &BiLaurentSeries, m: [[i64; 2]; 2]) -> Result<BiLaurentSeries> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det == 0 {
        return Err(Error::SingularMatrix);
    }
    let map = |k: &Key| {
        (
            exi(m[0][0]) * k.0 + exi(m[0][1]) * k.1,
            exi(m[1][0]) * k.0 + exi(m[1][1]) * k.1,
        )
    };
    let support = match a.support {
        Support::Complete => Support::Complete,
        Support::Windowed { bound, .. } => {
            // Box of radius W' whose preimage under M fits inside radius W.
            let row = (m[1][1].abs() + m[0][1].abs()).max(m[1][0].abs() + m[0][0].abs());
            let inv_norm = Exp::new(row, det.abs());
            let bound = (exi(bound) / inv_norm).floor().to_integer();
            let orthant = if m == [[1, 0], [0, 1]] { a.support_orthant() } else { None };
            Support::Windowed { bound, orthant }
        }
    };
    let terms: Vec<_> = a.terms.iter().map(|(k, c)| (map(k), c.clone())).collect();
    Ok(BiLaurentSeries::from_terms(terms, a.qorder, a.region, support))
}

impl BiLaurentSeries {
    fn support_orthant(&self) -> Option<Orthant> {
        match self.support {
            Support::Windowed { orthant, .. } => orthant,
            Support::Complete => None,
        }
    }
}

fn constant_poly(a: &BiLaurentSeries) -> Result<BTreeMap<Key, Rational>> {
    let mut out = BTreeMap::new();
    for (k, c) in &a.terms {
        match c.leading() {
            Some((e, v)) if c.len() == 1 && e.is_zero() => {
                out.insert(*k, v.clone());
            }
            _ => return Err(Error::NotLaurentPolynomial(format!("coefficient at {k:?} is {c}"))),
        }
    }
    Ok(out)
}

/// Exact division of Laurent polynomials with constant coefficients, by
/// repeated cancellation of the lexicographically leading term.
pub fn laurent_poly_exact_divide(numer: &BiLaurentSeries, denom: &BiLaurentSeries) -> Result<BiLaurentSeries> {
    check_regions(numer, denom)?;
    let n = constant_poly(numer)?;
    let d = constant_poly(denom)?;
    let (d_hi, d_lead) = d.iter().next_back().map(|(k, c)| (*k, c.clone())).ok_or(Error::NotInvertible)?;
    // In each coordinate the quotient's exponents lie between the
    // numerator's extremes minus the denominator's.
    let range = |m: &BTreeMap<Key, Rational>, pick: fn(&Key) -> Exp| {
        let it = m.keys().map(pick);
        (it.clone().min(), it.max())
    };
    let bounds: Vec<(Exp, Exp)> = [(|k: &Key| k.0) as fn(&Key) -> Exp, |k: &Key| k.1]
        .into_iter()
        .map(|pick| match (range(&n, pick), range(&d, pick)) {
            ((Some(nl), Some(nh)), (Some(dl), Some(dh))) => (nl - dl, nh - dh),
            _ => (Exp::zero(), -Exp::one()),
        })
        .collect();
    let mut rem = n.clone();
    let mut quot: BTreeMap<Key, Rational> = BTreeMap::new();
    while let Some((lead, c)) = rem.iter().next_back().map(|(k, c)| (*k, c.clone())) {
        let qk = (lead.0 - d_hi.0, lead.1 - d_hi.1);
        if qk.0 < bounds[0].0 || qk.0 > bounds[0].1 || qk.1 < bounds[1].0 || qk.1 > bounds[1].1 {
            return Err(Error::InexactDivision(lead.0.to_string(), lead.1.to_string()));
        }
        let qc = &c / &d_lead;
        for (dk, dc) in &d {
            let k = (qk.0 + dk.0, qk.1 + dk.1);
            let slot = rem.entry(k).or_insert_with(Rational::zero);
            *slot -= &qc * dc;
            if slot.is_zero() {
                rem.remove(&k);
            }
        }
        quot.insert(qk, qc);
    }
    let qorder = numer.qorder.min(denom.qorder);
    Ok(BiLaurentSeries::from_terms(
        quot.into_iter().map(|(k, c)| (k, PuiseuxSeries::constant(c, qorder))),
        qorder,
        numer.region,
        Support::Complete,
    ))
}

/// Laurent polynomial with constant coefficients.
pub fn laurent_poly<I: IntoIterator<Item = (Key, Rational)>>(terms: I, region: Region) -> BiLaurentSeries {
    let qorder = exi(1);
    BiLaurentSeries::from_terms(
        terms.into_iter().map(|(k, c)| (k, PuiseuxSeries::constant(c, qorder))),
        qorder,
        region,
        Support::Complete,
    )
}

fn render_key_exp(e: Exp, var: &str) -> String {
    if e.is_zero() {
        String::new()
    } else if e.is_one() {
        var.to_string()
    } else if e.is_integer() && e.is_positive() {
        format!("{var}^{e}")
    } else {
        format!("{var}^({e})")
    }
}

impl fmt::Display for BiLaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "region {}, q-order {}, window {}",
            self.region,
            self.qorder,
            self.window().map_or("none".to_string(), |w| w.to_string())
        )?;
        for (k, c) in &self.terms {
            let mono = [render_key_exp(k.0, "z1"), render_key_exp(k.1, "z2")]
                .into_iter()
                .filter(|s| !s.is_empty())
                .collect::<Vec<_>>()
                .join("*");
            writeln!(f, "  [{}] {}", if mono.is_empty() { "1" } else { &mono }, c)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    e1: String,
    e2: String,
    series: PuiseuxSeries,
}

#[derive(Serialize, Deserialize)]
struct BiRepr {
    region: Region,
    qorder: String,
    window: Option<i64>,
    terms: Vec<TermRepr>,
}

impl Serialize for BiLaurentSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BiRepr {
            region: self.region,
            qorder: render_exp(self.qorder),
            window: self.window(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TermRepr { e1: render_exp(k.0), e2: render_exp(k.1), series: c.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BiLaurentSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = BiRepr::deserialize(d)?;
        let qorder = parse_exp(&repr.qorder).map_err(D::Error::custom)?;
        let support = match repr.window {
            None => Support::Complete,
            Some(bound) => Support::Windowed { bound, orthant: None },
        };
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            let k = (
                parse_exp(&t.e1).map_err(D::Error::custom)?,
                parse_exp(&t.e2).map_err(D::Error::custom)?,
            );
            if t.series.order() < qorder {
                return Err(D::Error::custom("coefficient order below qorder"));
            }
            terms.push((k, t.series));
        }
        Ok(BiLaurentSeries::from_terms(terms, qorder, repr.region, support))
    }
}
