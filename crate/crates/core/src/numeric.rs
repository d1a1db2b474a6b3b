//! Floating point evaluation and numerical checks of transformation laws.
//!
//! Truncations are chosen from the point: a Gaussian sum is cut once the
//! exponent of every omitted term is below `-TAIL`, so omitted terms are
//! smaller than `e^{-TAIL}` relative to the unit term.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bilaurent::BiLaurentSeries;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::series::PuiseuxSeries;

type C = Complex64;

const TAIL: f64 = 45.0;
const I: C = C::new(0.0, 1.0);

fn e2pi(x: C) -> C {
    (2.0 * PI * I * x).exp()
}

fn exp_f64(e: crate::rational::Exp) -> f64 {
    *e.numer() as f64 / *e.denom() as f64
}

fn rational_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn check_tau(tau: C) -> Result<()> {
    if tau.im <= 0.0 || !tau.im.is_finite() {
        return Err(Error::InvalidParam(format!("tau must lie in the upper half plane, got {}", fmt_complex(tau))));
    }
    Ok(())
}

/// Smallest `R` with `a R^2 - b R` at least `TAIL` below the peak `b^2 / 4a`.
fn gaussian_radius(a: f64, b: f64) -> usize {
    ((b + (2.0 * b * b + 4.0 * a * TAIL).sqrt()) / (2.0 * a)).ceil() as usize + 2
}

/// Terms needed in `Σ_n e^{πi k τ n^2 + 2πi n z}` so that omitted terms are
/// below `e^{-TAIL}` times the largest term.
pub fn theta_terms(z: C, tau: C, k: f64) -> usize {
    gaussian_radius(PI * k * tau.im, 2.0 * PI * z.im.abs())
}

/// `ϑ(z; kτ) = Σ_{n ∈ 1/2 + ℤ} q^{kn^2/2} e^{2πi n (z + 1/2)}` over `|n| <= terms + 1/2`.
pub fn eval_theta(z: C, tau: C, k: u32, terms: usize) -> C {
    let kt = tau * k as f64;
    let mut acc = C::new(0.0, 0.0);
    let t = terms as i64;
    for j in -t - 1..=t {
        let n = j as f64 + 0.5;
        acc += (PI * I * kt * n * n + 2.0 * PI * I * n * (z + 0.5)).exp();
    }
    acc
}

/// `ϑ(z; kτ)` with an automatic truncation.
pub fn theta(z: C, tau: C, k: u32) -> C {
    eval_theta(z, tau, k, theta_terms(z, tau, k as f64))
}

/// `ϑ(z; τ)` from the triple product with `terms` factors, for cross-checks.
pub fn eval_theta_product(z: C, tau: C, terms: usize) -> C {
    let q = e2pi(tau);
    let zeta = e2pi(z);
    let mut acc = -I * e2pi(tau / 8.0) * e2pi(-z / 2.0) * (C::new(1.0, 0.0) - zeta);
    let mut qn = C::new(1.0, 0.0);
    for _ in 1..=terms {
        qn *= q;
        acc *= (1.0 - zeta * qn) * (1.0 - qn / zeta) * (1.0 - qn);
    }
    acc
}

/// `η(τ) = q^{1/24} Π_{n>=1} (1 - q^n)` with `terms` factors.
pub fn eval_eta(tau: C, terms: usize) -> C {
    let q = e2pi(tau);
    let mut acc = e2pi(tau / 24.0);
    let mut qn = C::new(1.0, 0.0);
    for _ in 0..terms {
        qn *= q;
        acc *= 1.0 - qn;
    }
    acc
}

/// `η(τ)` with enough factors that `|q|^n < e^{-TAIL}`.
pub fn eta(tau: C) -> C {
    eval_eta(tau, (TAIL / (2.0 * PI * tau.im)).ceil() as usize + 2)
}

/// `f(z; τ)` as a ratio of six theta values.
pub fn eval_f(z: (C, C), tau: C, terms: usize) -> Result<C> {
    let z12 = z.0 + z.1;
    let mut num = C::new(1.0, 0.0);
    let mut den = C::new(1.0, 0.0);
    for w in [z.0, z.1, z12] {
        let d = eval_theta(w, tau, 1, terms);
        if d.norm() < 1e-6 {
            return Err(Error::NearThetaZero(d.norm()));
        }
        den *= d;
        num *= eval_theta(w, tau, 2, terms);
    }
    Ok(num / den)
}

fn f_terms(z: (C, C), tau: C) -> usize {
    [z.0, z.1, z.0 + z.1].iter().map(|&w| theta_terms(w, tau, 1.0)).max().unwrap_or(1)
}

/// `𝒯(z; τ) = Σ_{n ∈ ℤ^2} q^{2Q(n)} ζ1^{n1+n2} ζ2^{2n1-n2}` over `|n_i| <= terms`.
pub fn eval_t(z: (C, C), tau: C, terms: usize) -> C {
    let t = terms as i64;
    let mut acc = C::new(0.0, 0.0);
    for n1 in -t..=t {
        for n2 in -t..=t {
            let qf = (n1 * n1 + n2 * n2 - n1 * n2) as f64;
            let arg = 2.0 * tau * qf + z.0 * (n1 + n2) as f64 + z.1 * (2 * n1 - n2) as f64;
            acc += e2pi(arg);
        }
    }
    acc
}

fn t_terms(z: (C, C), tau: C) -> usize {
    // 2Q(n) >= |n|^2 and the linear part is at most 3|n| max|Im z|.
    gaussian_radius(2.0 * PI * tau.im, 2.0 * PI * 3.0 * z.0.im.abs().max(z.1.im.abs()) * 2f64.sqrt())
}

/// `J(z; τ) = η(τ)^5 / η(2τ) 𝒯(z; τ) f(z; τ)`.
pub fn eval_j(z: (C, C), tau: C, terms: usize) -> Result<C> {
    let eta_part = eta(tau).powi(5) / eta(2.0 * tau);
    Ok(eta_part * eval_t(z, tau, terms) * eval_f(z, tau, terms)?)
}

/// Termwise value of a one-variable series at `τ`.
pub fn eval_series(s: &PuiseuxSeries, tau: C) -> C {
    s.terms().map(|(e, c)| rational_f64(c) * e2pi(tau * exp_f64(e))).sum()
}

/// Termwise value of a two-variable series at `(z, τ)`.
pub fn eval_bilaurent(s: &BiLaurentSeries, z: (C, C), tau: C) -> C {
    s.terms()
        .map(|(k, c)| eval_series(c, tau) * e2pi(z.0 * exp_f64(k.0) + z.1 * exp_f64(k.1)))
        .sum()
}

/// Points with `|q| < |ζ1|, |ζ2|, |ζ1ζ2| < 1`, where the INNER expansion converges.
pub fn inner_points() -> Vec<SamplePoint> {
    vec![
        SamplePoint { tau: C::new(0.05, 0.6), z: (C::new(0.17, 0.2), C::new(-0.23, 0.15)) },
        SamplePoint { tau: C::new(-0.2, 0.8), z: (C::new(0.31, 0.3), C::new(0.08, 0.25)) },
        SamplePoint { tau: C::new(0.3, 0.7), z: (C::new(-0.12, 0.1), C::new(0.4, 0.35)) },
    ]
}

/// Largest `|formal - numeric| / max(1, |numeric|)` of `f` over `points`,
/// with the formal side summed termwise from the INNER expansion to `order`.
pub fn f_bridge(order: crate::rational::Exp, points: &[SamplePoint]) -> Result<f64> {
    let formal = crate::thetas::f_series(order, crate::Region::Inner, crate::thetas::LPath::Geometric, None)?;
    let mut worst: f64 = 0.0;
    for p in points {
        check_tau(p.tau)?;
        let exact = eval_f(p.z, p.tau, f_terms(p.z, p.tau))?;
        let approx = eval_bilaurent(&formal, p.z, p.tau);
        worst = worst.max((approx - exact).norm() / exact.norm().max(1.0));
    }
    Ok(worst)
}

// ---------------------------------------------------------------- arithmetic

fn sawtooth(num: i64, den: i64) -> Rational {
    if num.rem_euclid(den) == 0 {
        return Rational::from_integer(0.into());
    }
    Rational::new(num.into(), den.into()) - Rational::from_integer(num.div_euclid(den).into())
        - Rational::new(1.into(), 2.into())
}

/// Dedekind sum `s(d, c) = Σ_{k=1}^{c-1} ((k/c)) ((kd/c))`.
pub fn dedekind_sum(d: i64, c: i64) -> Result<Rational> {
    if c <= 0 {
        return Err(Error::InvalidParam(format!("dedekind sum needs c > 0, got {c}")));
    }
    if d.gcd(&c) != 1 {
        return Err(Error::InvalidParam(format!("dedekind sum needs gcd(d, c) = 1, got ({d}, {c})")));
    }
    let mut acc = Rational::from_integer(0.into());
    for k in 1..c {
        acc += sawtooth(k, c) * sawtooth(k * d, c);
    }
    Ok(acc)
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi_symbol(a: i64, n: i64) -> Result<i64> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::InvalidParam(format!("jacobi symbol needs odd positive n, got {n}")));
    }
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    Ok(if n == 1 { t } else { 0 })
}

/// `(-3/d)` extended to negative odd `d` by `(-3/-1) = -1`.
fn chi_minus3(d: i64) -> Result<i64> {
    let s = jacobi_symbol(-3, d.abs())?;
    Ok(if d < 0 { -s } else { s })
}

/// A matrix in `SL2(ℤ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl ModularMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::InvalidParam(format!("determinant of ({a} {b}; {c} {d}) is not 1")));
        }
        Ok(ModularMatrix { a, b, c, d })
    }

    pub fn in_gamma0(&self, level: i64) -> bool {
        self.c % level == 0
    }

    fn require_gamma0(&self, level: i64) -> Result<()> {
        if self.in_gamma0(level) {
            Ok(())
        } else {
            Err(Error::NotInSubgroup(format!("{self} is not in Gamma0({level})")))
        }
    }

    pub fn act(&self, tau: C) -> C {
        (tau * self.a as f64 + self.b as f64) / (tau * self.c as f64 + self.d as f64)
    }

    pub fn j(&self, tau: C) -> C {
        tau * self.c as f64 + self.d as f64
    }

    fn neg(&self) -> Self {
        ModularMatrix { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// `(a, 2b; c/2, d)`, the matrix acting on `2τ`.
    fn doubled(&self) -> Result<Self> {
        self.require_gamma0(2)?;
        let m = ModularMatrix { a: self.a, b: 2 * self.b, c: self.c / 2, d: self.d };
        assert_eq!(m.a * m.d - m.b * m.c, 1);
        Ok(m)
    }

    pub fn as_json(&self) -> Value {
        json!([self.a, self.b, self.c, self.d])
    }
}

impl fmt::Display for ModularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// Multiplier `χ(γ)` of `η(γτ) = χ(γ) (cτ+d)^{1/2} η(τ)`, principal square root.
pub fn eta_multiplier(g: &ModularMatrix) -> C {
    let ModularMatrix { a, b, c, d } = *g;
    if c == 0 {
        let t = (PI * I * (b * d) as f64 / 12.0).exp();
        return if d == 1 { t } else { -I * t };
    }
    if c < 0 {
        return I * eta_multiplier(&g.neg());
    }
    let s = rational_f64(&dedekind_sum(d, c).expect("coprime entries"));
    (PI * I * ((a + d) as f64 / (12.0 * c as f64) - s - 0.25)).exp()
}

fn multiplier_residual(g: &ModularMatrix, tau: C) -> f64 {
    let lhs = eta(g.act(tau));
    let rhs = eta_multiplier(g) * g.j(tau).sqrt() * eta(tau);
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

const VALIDATION_TAUS: [C; 3] = [C::new(0.1, 1.2), C::new(-0.3, 0.9), C::new(0.25, 0.7)];

/// Checks the η functional equation for a fixed set of matrices at three
/// points, once per process; the worst residual must be below `1e-9`.
pub fn validate_multiplier() -> Result<f64> {
    static CHECK: OnceLock<f64> = OnceLock::new();
    let worst = *CHECK.get_or_init(|| {
        let mut set: Vec<ModularMatrix> = vec![
            ModularMatrix { a: 0, b: -1, c: 1, d: 0 },
            ModularMatrix { a: 1, b: 1, c: 0, d: 1 },
            ModularMatrix { a: -1, b: 2, c: 0, d: -1 },
            ModularMatrix { a: 2, b: 1, c: 1, d: 1 },
            ModularMatrix { a: -1, b: 0, c: -2, d: -1 },
        ];
        set.extend(gamma0_6_samples());
        let mut worst: f64 = 0.0;
        for g in set {
            for tau in VALIDATION_TAUS {
                worst = worst.max(multiplier_residual(&g, tau));
            }
        }
        worst
    });
    if worst < 1e-9 {
        Ok(worst)
    } else {
        Err(Error::MultiplierValidation(worst))
    }
}

fn validate_matrix(g: &ModularMatrix) -> Result<()> {
    validate_multiplier()?;
    let worst = VALIDATION_TAUS.iter().map(|&t| multiplier_residual(g, t)).fold(0.0, f64::max);
    if worst < 1e-9 {
        Ok(())
    } else {
        Err(Error::MultiplierValidation(worst))
    }
}

/// Sample elements of `Γ0(6)`.
pub fn gamma0_6_samples() -> Vec<ModularMatrix> {
    [(1, 0, 6, 1), (5, 1, 24, 5), (7, 2, 24, 7), (5, -1, 6, -1), (7, -2, 18, -5), (13, 2, 6, 1), (1, 1, 0, 1)]
        .into_iter()
        .map(|(a, b, c, d)| ModularMatrix { a, b, c, d })
        .collect()
}

/// Sample points `τ` with `Im τ >= 0.6`.
pub fn sample_taus() -> Vec<C> {
    vec![C::new(0.1, 1.2), C::new(-0.3, 0.9), C::new(0.25, 0.7), C::new(0.4, 1.0), C::new(-0.15, 0.6)]
}

fn elliptic_taus() -> Vec<C> {
    vec![C::new(0.1, 0.75), C::new(-0.3, 0.6), C::new(0.25, 0.7), C::new(0.4, 0.55), C::new(-0.15, 0.65)]
}

fn elliptic_zs() -> Vec<(C, C)> {
    vec![
        (C::new(0.21, 0.07), C::new(0.11, 0.1)),
        (C::new(0.37, 0.05), C::new(-0.13, -0.08)),
        (C::new(-0.08, 0.12), C::new(0.29, -0.06)),
        (C::new(0.15, -0.11), C::new(0.33, 0.09)),
        (C::new(0.41, 0.03), C::new(-0.27, 0.14)),
    ]
}

// ---------------------------------------------------------------- laws

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Law {
    ThetaMod,
    ThetaEll,
    FMod,
    FEll,
    TMod,
    TEll,
    JMod,
    JEll,
}

impl Law {
    pub const ALL: [Law; 8] =
        [Law::ThetaMod, Law::ThetaEll, Law::FMod, Law::FEll, Law::TMod, Law::TEll, Law::JMod, Law::JEll];

    pub fn is_modular(self) -> bool {
        matches!(self, Law::ThetaMod | Law::FMod | Law::TMod | Law::JMod)
    }

    pub fn name(self) -> &'static str {
        match self {
            Law::ThetaMod => "THETA_MOD",
            Law::ThetaEll => "THETA_ELL",
            Law::FMod => "F_MOD",
            Law::FEll => "F_ELL",
            Law::TMod => "T_MOD",
            Law::TEll => "T_ELL",
            Law::JMod => "J_MOD",
            Law::JEll => "J_ELL",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Law {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Law::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown law {s}")))
    }
}

/// A modular substitution or a lattice shift `z -> z + mτ + l`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Transform {
    Modular(ModularMatrix),
    Elliptic { m: (i64, i64), l: (i64, i64) },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplePoint {
    pub tau: C,
    pub z: (C, C),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformationResidual {
    pub law: Law,
    pub params: Value,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub ms: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

fn q_star(z: (C, C)) -> C {
    z.0 * z.0 + z.1 * z.1 + z.0 * z.1
}

/// `μ` for `J` on `Γ0(6)`: `χ(γ)^{-4} χ(a, 2b; c/2, d)^8 (-3/d)`.
pub fn j_multiplier(g: &ModularMatrix) -> Result<C> {
    let chi = eta_multiplier(g);
    let chi2 = eta_multiplier(&g.doubled()?);
    Ok(chi.powi(-4) * chi2.powi(8) * chi_minus3(g.d)? as f64)
}

/// `(lhs, factor, rhs)` with the law asserting `lhs = factor * rhs`.
fn law_sides(law: Law, t: &Transform, p: &SamplePoint) -> Result<(C, C, C)> {
    let tau = p.tau;
    let z = p.z;
    match (law, t) {
        (Law::ThetaMod, Transform::Modular(g)) => {
            validate_matrix(g)?;
            let j = g.j(tau);
            let (z2, tau2) = (z.0 / j, g.act(tau));
            let factor = eta_multiplier(g).powi(3) * j.sqrt() * (PI * I * g.c as f64 * z.0 * z.0 / j).exp();
            Ok((theta(z2, tau2, 1), factor, theta(z.0, tau, 1)))
        }
        (Law::ThetaEll, Transform::Elliptic { m, l }) => {
            if m.1 != 0 || l.1 != 0 {
                return Err(Error::NotInLattice("theta has a single elliptic variable".into()));
            }
            let (m, l) = (m.0, l.0);
            let w = z.0 + tau * m as f64 + l as f64;
            let sign = if (m + l).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let factor = sign * e2pi(-tau * (m * m) as f64 / 2.0 - z.0 * m as f64);
            Ok((theta(w, tau, 1), factor, theta(z.0, tau, 1)))
        }
        (Law::FMod, Transform::Modular(g)) => {
            let g2 = g.doubled()?;
            validate_matrix(g)?;
            validate_matrix(&g2)?;
            let j = g.j(tau);
            let (zz, tau2) = ((z.0 / j, z.1 / j), g.act(tau));
            let nu = eta_multiplier(&g2).powi(9) * eta_multiplier(g).powi(-9);
            let factor = nu * (-PI * I * g.c as f64 * q_star(z) / j).exp();
            Ok((eval_f(zz, tau2, f_terms(zz, tau2))?, factor, eval_f(z, tau, f_terms(z, tau))?))
        }
        (Law::FEll, Transform::Elliptic { m, l }) => {
            if m.0 % 2 != 0 || m.1 % 2 != 0 {
                return Err(Error::NotInLattice(format!("m = {m:?} is not in 2Z^2")));
            }
            let (m1, m2) = (m.0 as f64, m.1 as f64);
            let w = (z.0 + tau * m1 + l.0 as f64, z.1 + tau * m2 + l.1 as f64);
            let qs = m1 * m1 + m2 * m2 + m1 * m2;
            let factor = e2pi(tau * qs / 2.0 + z.0 * (m1 + m2 / 2.0) + z.1 * (m2 + m1 / 2.0));
            Ok((eval_f(w, tau, f_terms(w, tau))?, factor, eval_f(z, tau, f_terms(z, tau))?))
        }
        (Law::TMod, Transform::Modular(g)) => {
            g.require_gamma0(6)?;
            validate_matrix(g)?;
            let j = g.j(tau);
            let (zz, tau2) = ((z.0 / j, z.1 / j), g.act(tau));
            let factor = chi_minus3(g.d)? as f64 * j * (PI * I * g.c as f64 * q_star(z) / j).exp();
            Ok((eval_t(zz, tau2, t_terms(zz, tau2)), factor, eval_t(z, tau, t_terms(z, tau))))
        }
        (Law::TEll, Transform::Elliptic { m, l }) => {
            if m.0 % 2 != 0 || m.1 % 2 != 0 {
                return Err(Error::NotInLattice(format!("m = {m:?} is not in 2Z^2")));
            }
            let (m1, m2) = (m.0 as f64, m.1 as f64);
            let w = (z.0 + tau * m1 + l.0 as f64, z.1 + tau * m2 + l.1 as f64);
            let qs = m1 * m1 + m2 * m2 + m1 * m2;
            let factor = e2pi(-tau * qs / 2.0 - z.0 * (m1 + m2 / 2.0) - z.1 * (m1 / 2.0 + m2));
            Ok((eval_t(w, tau, t_terms(w, tau)), factor, eval_t(z, tau, t_terms(z, tau))))
        }
        (Law::JMod, Transform::Modular(g)) => {
            g.require_gamma0(6)?;
            validate_matrix(g)?;
            validate_matrix(&g.doubled()?)?;
            let j = g.j(tau);
            let (zz, tau2) = ((z.0 / j, z.1 / j), g.act(tau));
            let factor = j_multiplier(g)? * j.powi(3);
            let n2 = f_terms(zz, tau2).max(t_terms(zz, tau2));
            let n1 = f_terms(z, tau).max(t_terms(z, tau));
            Ok((eval_j(zz, tau2, n2)?, factor, eval_j(z, tau, n1)?))
        }
        (Law::JEll, Transform::Elliptic { m, l }) => {
            if m.0 % 2 != 0 || m.1 % 2 != 0 {
                return Err(Error::NotInLattice(format!("m = {m:?} is not in 2Z^2")));
            }
            let w = (z.0 + tau * m.0 as f64 + l.0 as f64, z.1 + tau * m.1 as f64 + l.1 as f64);
            let n2 = f_terms(w, tau).max(t_terms(w, tau));
            let n1 = f_terms(z, tau).max(t_terms(z, tau));
            Ok((eval_j(w, tau, n2)?, C::new(1.0, 0.0), eval_j(z, tau, n1)?))
        }
        (law, _) => Err(Error::InvalidParam(format!(
            "{law} needs a {} transform",
            if law.is_modular() { "modular" } else { "elliptic" }
        ))),
    }
}

pub fn fmt_complex(z: C) -> String {
    format!("{}{}{}i", z.re, if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) { "-" } else { "+" }, z.im.abs())
}

/// Parses `"re+imi"`, `"re-imi"`, `"re"` or `"imi"`.
pub fn parse_complex(s: &str) -> Result<C> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || Error::Parse(format!("bad complex number {s:?}"));
    if t.is_empty() {
        return Err(err());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| C::new(re, 0.0)).map_err(|_| err());
    };
    // Split at the last sign that is not part of an exponent or the leading sign.
    let bytes = body.as_bytes();
    let mut cut = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            cut = Some(i);
            break;
        }
    }
    let im_of = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| err()),
        }
    };
    match cut {
        Some(i) => Ok(C::new(body[..i].parse::<f64>().map_err(|_| err())?, im_of(&body[i..])?)),
        None => Ok(C::new(0.0, im_of(body)?)),
    }
}

fn point_json(p: &SamplePoint) -> Value {
    json!({"tau": fmt_complex(p.tau), "z": [fmt_complex(p.z.0), fmt_complex(p.z.1)]})
}

/// Residual `|LHS - factor * RHS| / max(1, |RHS|)` of `law` at `point`.
pub fn check_transformation(
    law: Law,
    t: &Transform,
    point: &SamplePoint,
    tolerance: f64,
) -> Result<TransformationResidual> {
    let start = Instant::now();
    check_tau(point.tau)?;
    let (lhs, factor, rhs) = law_sides(law, t, point)?;
    let residual = (lhs - factor * rhs).norm() / rhs.norm().max(1.0);
    let mut params: BTreeMap<String, Value> =
        serde_json::from_value(point_json(point)).expect("object");
    match t {
        Transform::Modular(g) => {
            params.insert("gamma".into(), g.as_json());
        }
        Transform::Elliptic { m, l } => {
            params.insert("m".into(), json!([m.0, m.1]));
            params.insert("l".into(), json!([l.0, l.1]));
        }
    }
    Ok(TransformationResidual {
        law,
        params: serde_json::to_value(params).expect("map"),
        residual,
        tolerance,
        verdict: if residual.is_finite() && residual < tolerance { Verdict::Pass } else { Verdict::Fail },
        ms: start.elapsed().as_millis() as u64,
    })
}

/// The registered grid for `law`: five sample points times five elements or shifts.
pub fn law_grid(law: Law) -> Vec<(Transform, SamplePoint)> {
    let zs = [
        (C::new(0.21, 0.3), C::new(0.11, 0.4)),
        (C::new(0.37, 0.05), C::new(-0.13, 0.22)),
        (C::new(-0.08, 0.17), C::new(0.29, -0.06)),
        (C::new(0.15, -0.12), C::new(0.33, 0.09)),
        (C::new(0.41, 0.21), C::new(-0.27, 0.14)),
    ];
    let transforms: Vec<Transform> = match law {
        Law::ThetaMod => [(0, -1, 1, 0), (1, 1, 0, 1), (2, 1, 1, 1), (1, 0, 6, 1), (5, 1, 24, 5)]
            .into_iter()
            .map(|(a, b, c, d)| Transform::Modular(ModularMatrix { a, b, c, d }))
            .collect(),
        Law::FMod => [(1, 0, 2, 1), (3, 1, 2, 1), (1, 0, 6, 1), (5, -1, 6, -1), (7, 2, 24, 7)]
            .into_iter()
            .map(|(a, b, c, d)| Transform::Modular(ModularMatrix { a, b, c, d }))
            .collect(),
        Law::TMod | Law::JMod => gamma0_6_samples().into_iter().take(5).map(Transform::Modular).collect(),
        Law::ThetaEll => [(1, 0), (-1, 1), (1, 1), (-1, 0), (1, -2)]
            .into_iter()
            .map(|(m, l)| Transform::Elliptic { m: (m, 0), l: (l, 0) })
            .collect(),
        Law::FEll | Law::TEll | Law::JEll => [((2, 0), (0, 0)), ((0, 2), (1, 0)), ((2, -2), (0, 1)), ((-2, 0), (1, 1)), ((0, -2), (-1, 2))]
            .into_iter()
            .map(|(m, l)| Transform::Elliptic { m, l })
            .collect(),
    };
    // Elliptic factors grow like |q|^{-|m|^2}; in double precision the
    // residual floor is about 1e-16 |factor|, so those points stay low.
    let points: Vec<(C, (C, C))> = if law.is_modular() {
        sample_taus().into_iter().zip(zs).collect()
    } else {
        elliptic_taus().into_iter().zip(elliptic_zs()).collect()
    };
    let mut out = Vec::new();
    for (tau, z) in points {
        for t in &transforms {
            out.push((*t, SamplePoint { tau, z }));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn theta_is_odd_and_matches_product() {
        let tau = C::new(0.1, 1.0);
        for z in [C::new(0.3, 0.1), C::new(-0.2, 0.25)] {
            assert!((theta(z, tau, 1) + theta(-z, tau, 1)).norm() < 1e-12);
        }
        let v = theta(C::new(0.5, 0.0), C::new(0.0, 1.0), 1);
        let w = eval_theta_product(C::new(0.5, 0.0), C::new(0.0, 1.0), 60);
        assert!((v - w).norm() < 1e-10);
    }

    #[test]
    fn t_at_zero_is_real() {
        let v = eval_t((C::new(0.0, 0.0), C::new(0.0, 0.0)), C::new(0.0, 0.8), 12);
        assert!(v.im.abs() < 1e-12);
        assert!(v.re > 1.0);
    }

    #[test]
    fn j_assembles() {
        let z = (C::new(0.21, 0.3), C::new(0.11, 0.4));
        let tau = C::new(0.1, 1.2);
        let n = 30;
        let direct = eval_j(z, tau, n).unwrap();
        let parts = eta(tau).powi(5) / eta(2.0 * tau) * eval_t(z, tau, n) * eval_f(z, tau, n).unwrap();
        assert!((direct - parts).norm() < 1e-10 * parts.norm().max(1.0));
    }

    #[test]
    fn near_zero_rejected() {
        let r = eval_f((C::new(0.0, 0.0), C::new(0.2, 0.1)), C::new(0.0, 1.0), 20);
        assert!(matches!(r, Err(Error::NearThetaZero(_))));
    }

    #[test]
    fn dedekind_values_and_reciprocity() {
        assert_eq!(dedekind_sum(1, 2).unwrap(), rat(0, 1));
        assert_eq!(dedekind_sum(1, 3).unwrap(), rat(1, 18));
        assert!(dedekind_sum(2, 4).is_err());
        let mut count = 0;
        for c in 1..12i64 {
            for d in 1..12i64 {
                if c.gcd(&d) != 1 {
                    continue;
                }
                let lhs = dedekind_sum(d, c).unwrap() + dedekind_sum(c, d).unwrap();
                let rhs = rat(-1, 4) + rat(1, 12) * (rat(c, d) + rat(d, c) + rat(1, c * d));
                assert_eq!(lhs, rhs);
                count += 1;
            }
        }
        assert!(count >= 30);
    }

    #[test]
    fn jacobi_symbols() {
        assert_eq!(jacobi_symbol(-3, 5).unwrap(), -1);
        assert_eq!(jacobi_symbol(-3, 7).unwrap(), 1);
        assert_eq!(jacobi_symbol(17, 1).unwrap(), 1);
        assert_eq!(jacobi_symbol(6, 9).unwrap(), 0);
        assert!(jacobi_symbol(3, 4).is_err());
    }

    #[test]
    fn multiplier_special_cases() {
        assert!((eta_multiplier(&ModularMatrix { a: 1, b: 1, c: 0, d: 1 }) - (PI * I / 12.0).exp()).norm() < 1e-15);
        let s = ModularMatrix { a: 0, b: -1, c: 1, d: 0 };
        for tau in VALIDATION_TAUS {
            let lhs = eta(-1.0 / tau);
            let rhs = (-I * tau).sqrt() * eta(tau);
            assert!((lhs - rhs).norm() < 1e-10);
            assert!(multiplier_residual(&s, tau) < 1e-10);
        }
        assert!(validate_multiplier().unwrap() < 1e-9);
    }

    #[test]
    fn multiplier_has_unit_modulus() {
        let mut seen = 0;
        for c in 1..12i64 {
            for d in -7..8i64 {
                if c.gcd(&d) != 1 {
                    continue;
                }
                // a d - b c = 1 with a = d^{-1} mod c.
                let (g, x, _) = ext_gcd(d, c);
                assert_eq!(g, 1);
                let a = x;
                let b = (a * d - 1) / c;
                let m = ModularMatrix::new(a, b, c, d).unwrap();
                assert!((eta_multiplier(&m).norm() - 1.0).abs() < 1e-12);
                seen += 1;
            }
        }
        assert!(seen >= 50);
    }

    fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
        if b == 0 {
            (a.abs(), a.signum(), 0)
        } else {
            let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
            (g, y, x - a.div_euclid(b) * y)
        }
    }

    #[test]
    fn spec_examples() {
        let p = SamplePoint { tau: C::new(0.1, 1.2), z: (C::new(0.21, 0.3), C::new(0.11, 0.4)) };
        let t = Transform::Modular(ModularMatrix { a: 1, b: 0, c: 6, d: 1 });
        assert!(check_transformation(Law::TMod, &t, &p, 1e-8).unwrap().residual < 1e-8);
        let e = Transform::Elliptic { m: (2, 0), l: (0, 0) };
        assert!(check_transformation(Law::FEll, &e, &p, 1e-8).unwrap().residual < 1e-8);
        let g = Transform::Modular(ModularMatrix { a: 5, b: 1, c: 24, d: 5 });
        assert!(check_transformation(Law::JMod, &g, &p, 1e-8).unwrap().residual < 1e-8);
        let bad = Transform::Modular(ModularMatrix { a: 1, b: 1, c: 1, d: 2 });
        assert!(matches!(check_transformation(Law::FMod, &bad, &p, 1e-8), Err(Error::NotInSubgroup(_))));
        let odd = Transform::Elliptic { m: (1, 0), l: (0, 0) };
        assert!(matches!(check_transformation(Law::FEll, &odd, &p, 1e-8), Err(Error::NotInLattice(_))));
    }

    #[test]
    fn printed_j_multiplier_differs() {
        // χ(γ)^2 χ(γ')^8 without the Jacobi symbol fails where the derived one passes.
        let p = SamplePoint { tau: C::new(0.1, 1.2), z: (C::new(0.21, 0.3), C::new(0.11, 0.4)) };
        let mut printed_fails = 0;
        for g in gamma0_6_samples() {
            let (lhs, factor, rhs) = law_sides(Law::JMod, &Transform::Modular(g), &p).unwrap();
            assert!((lhs - factor * rhs).norm() / rhs.norm().max(1.0) < 1e-8);
            let printed = eta_multiplier(&g).powi(2) * eta_multiplier(&g.doubled().unwrap()).powi(8) * g.j(p.tau).powi(3);
            if (lhs - printed * rhs).norm() / rhs.norm().max(1.0) > 1e-6 {
                printed_fails += 1;
            }
        }
        assert!(printed_fails > 0);
    }

    #[test]
    fn full_grid_passes() {
        for law in Law::ALL {
            let grid = law_grid(law);
            assert!(grid.len() >= 25);
            for (t, p) in grid {
                let r = check_transformation(law, &t, &p, 1e-8).unwrap();
                assert_eq!(r.verdict, Verdict::Pass, "{law} {:?} {}", t, r.residual);
            }
        }
    }

    #[test]
    fn t_shift_by_odd_vector() {
        let p = SamplePoint { tau: C::new(0.25, 0.7), z: (C::new(0.21, 0.07), C::new(0.11, 0.1)) };
        let odd = Transform::Elliptic { m: (1, 0), l: (0, 0) };
        assert!(matches!(check_transformation(Law::TEll, &odd, &p, 1e-8), Err(Error::NotInLattice(_))));
        // The printed factor holds on 2Z^2 only.
        let (z, tau) = (p.z, p.tau);
        let w = (z.0 + tau, z.1);
        let printed = e2pi(-tau / 2.0 - z.0 - z.1 / 2.0);
        let lhs = eval_t(w, tau, 20);
        let rhs = eval_t(z, tau, 20);
        assert!((lhs - printed * rhs).norm() / rhs.norm().max(1.0) > 1e-3);
    }

    #[test]
    fn formal_f_matches_numeric() {
        assert!(f_bridge(crate::rational::exi(25), &inner_points()).unwrap() < 1e-8);
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.1+1.2i").unwrap(), C::new(0.1, 1.2));
        assert_eq!(parse_complex("-0.3-0.9i").unwrap(), C::new(-0.3, -0.9));
        assert_eq!(parse_complex("2i").unwrap(), C::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), C::new(0.0, -1.0));
        assert_eq!(parse_complex("1.5").unwrap(), C::new(1.5, 0.0));
        assert_eq!(parse_complex("1e-3+2e-1i").unwrap(), C::new(0.001, 0.2));
        assert!(parse_complex("abc").is_err());
        assert_eq!(parse_complex(&fmt_complex(C::new(0.25, -0.5))).unwrap(), C::new(0.25, -0.5));
    }
}
