//! Scalar types of the exact layer.
//!
//! Coefficients are arbitrary-precision rationals. Exponents (of `q` and of
//! the elliptic variables) are small rationals and are kept as `Ratio<i64>`:
//! they never grow beyond a few thousand in magnitude, and cheap comparisons
//! matter because every series is keyed by them.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type Exp = Rational64;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ex(n: i64, d: i64) -> Exp {
    Exp::new(n, d)
}

pub fn exi(n: i64) -> Exp {
    Exp::from_integer(n)
}

pub fn exp_to_rational(e: Exp) -> Rational {
    rat(*e.numer(), *e.denom())
}

pub fn rational_to_exp(r: &Rational) -> Result<Exp> {
    let n = i64::try_from(r.numer()).map_err(|_| Error::Parse(format!("exponent {r} out of range")))?;
    let d = i64::try_from(r.denom()).map_err(|_| Error::Parse(format!("exponent {r} out of range")))?;
    Ok(Exp::new(n, d))
}

/// `num/den` with the denominator always present.
pub fn render_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn render_exp(e: Exp) -> String {
    format!("{}/{}", e.numer(), e.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("malformed rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn parse_exp(s: &str) -> Result<Exp> {
    rational_to_exp(&parse_rational(s)?)
}

/// Smallest integer `>= e`.
pub fn ceil_exp(e: Exp) -> i64 {
    e.ceil().to_integer()
}

pub fn floor_exp(e: Exp) -> i64 {
    e.floor().to_integer()
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn abs_exp(e: Exp) -> Exp {
    e.abs()
}

/// `sgn*(n)`: `+1` for `n >= 0` and `-1` otherwise.
pub fn sgn_star(n: i64) -> i64 {
    if n >= 0 {
        1
    } else {
        -1
    }
}

/// `ϱ_{a,b} = (sgn*(a) + sgn*(b)) / 2`, always one of `-1, 0, 1`.
pub fn rho(a: i64, b: i64) -> i64 {
    (sgn_star(a) + sgn_star(b)) / 2
}
