//! Order-3 complex jets.
//!
//! A [`Jet3`] is the germ `(f, f', f'', f''')` of an analytic function at a
//! point. Arithmetic on jets propagates the first three derivatives exactly
//! (up to floating-point rounding) through the Leibniz and Faà di Bruno rules.
//!
//! The infallible operator impls (`+`, `-`, `*`, unary `-`) perform raw
//! arithmetic. Anything that can divide by zero, overflow, or leave the finite
//! range goes through the `checked_*` methods or a [`JetConfig`], which return
//! a [`JetError`] instead of storing a non-finite component.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Smallest `|b.v|` accepted as a divisor (subnormal guard).
pub const DEFAULT_DIV_FLOOR: f64 = 1e-300;

/// Largest `|Re u.v|` accepted by `exp`.
pub const DEFAULT_EXP_RE_LIMIT: f64 = 700.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum JetError {
    #[error("division by zero (|divisor| = {magnitude:e})")]
    DivisionByZero { magnitude: f64 },
    #[error("logarithm of zero (|argument| = {magnitude:e})")]
    LogOfZero { magnitude: f64 },
    #[error("overflow (exponent real part {re_exponent})")]
    Overflow { re_exponent: f64 },
    #[error("non-finite result")]
    NonFinite,
}

impl JetError {
    /// True for errors caused by a vanishing divisor or log argument.
    pub fn is_pole(&self) -> bool {
        matches!(self, JetError::DivisionByZero { .. } | JetError::LogOfZero { .. })
    }
}

/// Value and first three complex derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub v: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

impl Jet3 {
    pub const fn new(v: Complex64, d1: Complex64, d2: Complex64, d3: Complex64) -> Self {
        Jet3 { v, d1, d2, d3 }
    }

    /// The identity map seeded at `z0`: `(z0, 1, 0, 0)`.
    pub fn var(z0: Complex64) -> Self {
        Jet3::new(z0, ONE, ZERO, ZERO)
    }

    /// A constant: `(c, 0, 0, 0)`.
    pub fn constant(c: Complex64) -> Self {
        Jet3::new(c, ZERO, ZERO, ZERO)
    }

    pub fn components(&self) -> [Complex64; 4] {
        [self.v, self.d1, self.d2, self.d3]
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }

    /// The k-th derivative, `k` in `0..=3`.
    pub fn derivative(&self, k: usize) -> Complex64 {
        self.components()[k]
    }

    fn finite(self) -> Result<Self, JetError> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(JetError::NonFinite)
        }
    }

    /// Compose an outer function with this jet, given the outer function's
    /// value and first three derivatives at `self.v`.
    pub fn compose(&self, outer: [Complex64; 4]) -> Jet3 {
        let [g0, g1, g2, g3] = outer;
        let (u1, u2, u3) = (self.d1, self.d2, self.d3);
        Jet3 {
            v: g0,
            d1: g1 * u1,
            d2: g2 * u1 * u1 + g1 * u2,
            d3: g3 * u1 * u1 * u1 + 3.0 * g2 * u1 * u2 + g1 * u3,
        }
    }

    pub fn scale(&self, c: Complex64) -> Jet3 {
        Jet3::new(c * self.v, c * self.d1, c * self.d2, c * self.d3)
    }

    pub fn checked_add(self, rhs: Jet3) -> Result<Jet3, JetError> {
        (self + rhs).finite()
    }

    pub fn checked_sub(self, rhs: Jet3) -> Result<Jet3, JetError> {
        (self - rhs).finite()
    }

    pub fn checked_mul(self, rhs: Jet3) -> Result<Jet3, JetError> {
        (self * rhs).finite()
    }

    pub fn checked_div(self, rhs: Jet3) -> Result<Jet3, JetError> {
        JetConfig::default().div(self, rhs)
    }

    pub fn recip(self) -> Result<Jet3, JetError> {
        JetConfig::default().recip(self)
    }

    pub fn exp(self) -> Result<Jet3, JetError> {
        JetConfig::default().exp(self)
    }

    /// Principal-branch logarithm.
    pub fn ln(self) -> Result<Jet3, JetError> {
        JetConfig::default().ln(self)
    }

    pub fn powi(self, k: i32) -> Result<Jet3, JetError> {
        JetConfig::default().powi(self, k)
    }
}

impl Add for Jet3 {
    type Output = Jet3;

    fn add(self, rhs: Jet3) -> Jet3 {
        Jet3::new(self.v + rhs.v, self.d1 + rhs.d1, self.d2 + rhs.d2, self.d3 + rhs.d3)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;

    fn sub(self, rhs: Jet3) -> Jet3 {
        Jet3::new(self.v - rhs.v, self.d1 - rhs.d1, self.d2 - rhs.d2, self.d3 - rhs.d3)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;

    fn mul(self, b: Jet3) -> Jet3 {
        let a = self;
        Jet3 {
            v: a.v * b.v,
            d1: a.d1 * b.v + a.v * b.d1,
            d2: a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2,
            d3: a.d3 * b.v + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.v * b.d3,
        }
    }
}

impl Neg for Jet3 {
    type Output = Jet3;

    fn neg(self) -> Jet3 {
        Jet3::new(-self.v, -self.d1, -self.d2, -self.d3)
    }
}

/// Guards used by the fallible jet operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetConfig {
    pub div_floor: f64,
    pub exp_re_limit: f64,
}

impl Default for JetConfig {
    fn default() -> Self {
        JetConfig { div_floor: DEFAULT_DIV_FLOOR, exp_re_limit: DEFAULT_EXP_RE_LIMIT }
    }
}

impl JetConfig {
    pub fn recip(&self, b: Jet3) -> Result<Jet3, JetError> {
        let w = b.v;
        let magnitude = w.norm();
        if !(magnitude >= self.div_floor) {
            return Err(JetError::DivisionByZero { magnitude });
        }
        let r = w.inv();
        let r2 = r * r;
        b.compose([r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2]).finite()
    }

    /// `a / b`, computed as `a * (1/b)`.
    pub fn div(&self, a: Jet3, b: Jet3) -> Result<Jet3, JetError> {
        a.checked_mul(self.recip(b)?)
    }

    pub fn exp(&self, u: Jet3) -> Result<Jet3, JetError> {
        let re = u.v.re;
        if !(re.abs() <= self.exp_re_limit) {
            return Err(JetError::Overflow { re_exponent: re });
        }
        let e = u.v.exp();
        u.compose([e, e, e, e]).finite()
    }

    pub fn ln(&self, u: Jet3) -> Result<Jet3, JetError> {
        let w = u.v;
        let magnitude = w.norm();
        if !(magnitude >= self.div_floor) {
            return Err(JetError::LogOfZero { magnitude });
        }
        let r = w.inv();
        u.compose([w.ln(), r, -r * r, 2.0 * r * r * r]).finite()
    }

    /// Integer power by binary exponentiation; negative powers take the
    /// reciprocal of the positive power.
    pub fn powi(&self, u: Jet3, k: i32) -> Result<Jet3, JetError> {
        let mut exp = k.unsigned_abs();
        let mut base = u;
        let mut acc = Jet3::constant(ONE);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.checked_mul(base)?;
            }
            exp >>= 1;
            if exp > 0 {
                base = base.checked_mul(base)?;
            }
        }
        if k < 0 {
            self.recip(acc)
        } else {
            Ok(acc)
        }
    }
}
