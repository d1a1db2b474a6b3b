//! Enumeration of lattice points under positive definite quadratics.
//!
//! Candidate ranges come from floating point root bounds widened by one
//! shell; every candidate is then filtered with exact arithmetic.

use crate::rational::{exi, Exp};

fn to_f64(e: Exp) -> f64 {
    *e.numer() as f64 / *e.denom() as f64
}

/// Integer interval containing all real `x` with `a x^2 + b x + c < 0`
/// (`a > 0`), widened by one on each side. Empty when there are no roots.
fn root_interval(a: f64, b: f64, c: f64) -> Option<(i64, i64)> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        // Allow for rounding when the minimum sits right at the bound.
        if disc > -1e-9 * (b * b + (4.0 * a * c).abs()).max(1.0) {
            let x = -b / (2.0 * a);
            return Some((x.floor() as i64 - 1, x.ceil() as i64 + 1));
        }
        return None;
    }
    let s = disc.sqrt();
    let lo = (-b - s) / (2.0 * a);
    let hi = (-b + s) / (2.0 * a);
    Some((lo.floor() as i64 - 1, hi.ceil() as i64 + 1))
}

/// `a n^2 + b n + c` over the integers.
#[derive(Clone, Copy, Debug)]
pub struct Quadratic1 {
    pub a: Exp,
    pub b: Exp,
    pub c: Exp,
}

impl Quadratic1 {
    pub fn eval(&self, n: i64) -> Exp {
        let n = exi(n);
        self.a * n * n + self.b * n + self.c
    }

    /// All `n` with value below `bound`, ascending. Requires `a > 0`.
    pub fn points_below(&self, bound: Exp) -> Vec<i64> {
        assert!(self.a > exi(0), "quadratic must open upwards");
        let Some((lo, hi)) = root_interval(to_f64(self.a), to_f64(self.b), to_f64(self.c - bound)) else {
            return Vec::new();
        };
        (lo..=hi).filter(|&n| self.eval(n) < bound).collect()
    }
}

/// `a n1^2 + b n1 n2 + c n2^2 + d n1 + e n2 + f` over `ℤ^2`.
#[derive(Clone, Copy, Debug)]
pub struct Quadratic2 {
    pub a: Exp,
    pub b: Exp,
    pub c: Exp,
    pub d: Exp,
    pub e: Exp,
    pub f: Exp,
}

impl Quadratic2 {
    /// `k * Q(n + s)` with `Q(x) = x1^2 + x2^2 - x1 x2`.
    pub fn scaled_q(k: Exp, s: (Exp, Exp)) -> Self {
        let (s1, s2) = s;
        Quadratic2 {
            a: k,
            b: -k,
            c: k,
            d: k * (exi(2) * s1 - s2),
            e: k * (exi(2) * s2 - s1),
            f: k * (s1 * s1 + s2 * s2 - s1 * s2),
        }
    }

    /// Adds the linear form `l1 n1 + l2 n2 + l0`.
    pub fn plus_linear(mut self, l1: Exp, l2: Exp, l0: Exp) -> Self {
        self.d += l1;
        self.e += l2;
        self.f += l0;
        self
    }

    pub fn eval(&self, n1: i64, n2: i64) -> Exp {
        let (x, y) = (exi(n1), exi(n2));
        self.a * x * x + self.b * x * y + self.c * y * y + self.d * x + self.e * y + self.f
    }

    /// All points with value below `bound`, in lexicographic order.
    /// Requires a positive definite quadratic part.
    pub fn points_below(&self, bound: Exp) -> Vec<(i64, i64)> {
        let [a, b, c, d, e, f] = [self.a, self.b, self.c, self.d, self.e, self.f - bound].map(to_f64);
        assert!(a > 0.0 && 4.0 * a * c - b * b > 0.0, "quadratic form must be positive definite");
        // Minimizing over n1 leaves a quadratic in n2.
        let a2 = c - b * b / (4.0 * a);
        let b2 = e - b * d / (2.0 * a);
        let c2 = f - d * d / (4.0 * a);
        let Some((lo2, hi2)) = root_interval(a2, b2, c2) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for n2 in lo2..=hi2 {
            let y = n2 as f64;
            if let Some((lo1, hi1)) = root_interval(a, b * y + d, c * y * y + e * y + f) {
                for n1 in lo1..=hi1 {
                    if self.eval(n1, n2) < bound {
                        out.push((n1, n2));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ex;

    fn brute2(q: &Quadratic2, bound: Exp, r: i64) -> Vec<(i64, i64)> {
        let mut v = Vec::new();
        for n1 in -r..=r {
            for n2 in -r..=r {
                if q.eval(n1, n2) < bound {
                    v.push((n1, n2));
                }
            }
        }
        v
    }

    #[test]
    fn one_variable_matches_brute_force() {
        let q = Quadratic1 { a: ex(1, 2), b: ex(7, 2), c: exi(0) };
        let want: Vec<i64> = (-100..100).filter(|&n| q.eval(n) < exi(10)).collect();
        assert_eq!(q.points_below(exi(10)), want);
        assert!(q.points_below(exi(-20)).is_empty());
    }

    #[test]
    fn boundary_points_are_excluded() {
        // n^2 < 4 excludes ±2 exactly.
        let q = Quadratic1 { a: exi(1), b: exi(0), c: exi(0) };
        assert_eq!(q.points_below(exi(4)), vec![-1, 0, 1]);
    }

    #[test]
    fn two_variable_matches_brute_force() {
        for (k, s) in [(exi(2), (ex(-1, 2), ex(-1, 2))), (exi(3), (ex(1, 3), ex(-2, 3))), (exi(1), (exi(0), exi(0)))] {
            let q = Quadratic2::scaled_q(k, s).plus_linear(exi(2), exi(-1), exi(0));
            for bound in [exi(0), ex(1, 2), exi(7), exi(25)] {
                assert_eq!(q.points_below(bound), brute2(&q, bound, 40));
            }
        }
        let skew = Quadratic2 { a: ex(1, 2), b: exi(1), c: exi(2), d: ex(1, 2), e: exi(2), f: ex(1, 2) };
        assert_eq!(skew.points_below(exi(30)), brute2(&skew, exi(30), 60));
    }
}
