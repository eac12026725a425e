//! Complex numbers with an unbounded binary exponent.
//!
//! Determinants of the Stark model grow like `exp(c / f)` as the field strength
//! `f` goes to zero, which overflows `f64` long before the regime of interest.
//! An [`ExtendedComplex`] stores `mantissa * 2^scale` with the modulus of the
//! mantissa kept in `[1, 2)` (or the mantissa exactly zero).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;

/// Exponent gap beyond which the smaller addend cannot affect the sum.
const ALIGN_LIMIT: i64 = 110;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedComplex {
    mantissa: Complex64,
    scale: i64,
}

/// `floor(log2(x))` for finite `x > 0`.
fn ilog2(x: f64) -> i64 {
    let bits = x.to_bits();
    let e = ((bits >> 52) & 0x7ff) as i64;
    if e == 0 {
        ilog2(x * f64::from_bits((1023 + 64) << 52)) - 64
    } else {
        e - 1023
    }
}

/// `2^k`, valid for the normal exponent range.
fn pow2(k: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// Multiplies by `2^k` for any `k`, saturating to zero or infinity.
fn ldexp(x: f64, k: i64) -> f64 {
    if k > 2046 {
        return x * f64::INFINITY;
    }
    if k < -2200 {
        return x * 0.0;
    }
    let mut x = x;
    let mut k = k;
    while k > 1023 {
        x *= pow2(1023);
        k -= 1023;
    }
    while k < -1022 {
        x *= pow2(-1022);
        k += 1022;
    }
    x * pow2(k)
}

fn scale_complex(z: Complex64, k: i64) -> Complex64 {
    Complex64::new(ldexp(z.re, k), ldexp(z.im, k))
}

/// Complex product with each component accumulated through a fused
/// multiply-add, which keeps the result within about one ulp per component.
fn accurate_mul(a: Complex64, b: Complex64) -> Complex64 {
    let bd = a.im * b.im;
    let re = a.re.mul_add(b.re, -bd) - a.im.mul_add(b.im, -bd);
    let bc = a.im * b.re;
    let im = a.re.mul_add(b.im, bc) + a.im.mul_add(b.re, -bc);
    Complex64::new(re, im)
}

impl ExtendedComplex {
    pub const ZERO: Self = Self { mantissa: Complex64::new(0.0, 0.0), scale: 0 };
    pub const ONE: Self = Self { mantissa: Complex64::new(1.0, 0.0), scale: 0 };

    /// Builds `mantissa * 2^scale` and normalises it.
    pub fn new(mantissa: Complex64, scale: i64) -> Self {
        if mantissa.re == 0.0 && mantissa.im == 0.0 {
            return Self::ZERO;
        }
        let r = mantissa.norm();
        if !r.is_finite() {
            if mantissa.re.is_finite() && mantissa.im.is_finite() {
                // hypot overflowed: both parts are huge but finite
                return Self::new(mantissa * 0.5f64.powi(4), scale + 4);
            }
            return Self { mantissa, scale };
        }
        let k = ilog2(r);
        let m = scale_complex(mantissa, -k);
        Self { mantissa: m, scale: scale + k }
    }

    pub fn mantissa(&self) -> Complex64 {
        self.mantissa
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.re.is_finite() && self.mantissa.im.is_finite()
    }

    pub fn from_real(x: f64) -> Self {
        Self::new(Complex64::new(x, 0.0), 0)
    }

    /// `exp(z)` without overflow for any finite `z`.
    pub fn exp(z: Complex64) -> Self {
        let k = (z.re / std::f64::consts::LN_2).floor();
        let frac = (z.re - k * LN2_HI) - k * LN2_LO;
        let m = Complex64::from_polar(frac.exp(), z.im);
        Self::new(m, k as i64)
    }

    /// Converts back to `f64` components, overflowing to infinity or
    /// underflowing to zero when out of range.
    pub fn to_complex(&self) -> Complex64 {
        scale_complex(self.mantissa, self.scale)
    }

    /// Natural logarithm of the modulus.
    pub fn log_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.norm().ln() + self.scale as f64 * std::f64::consts::LN_2
    }

    /// Principal argument in `(-pi, pi]`.
    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }

    /// Principal logarithm as an ordinary complex number.
    pub fn ln(&self) -> Result<Complex64> {
        if self.is_zero() {
            return Err(Error::Domain("logarithm of zero"));
        }
        Ok(Complex64::new(self.log_abs(), self.arg()))
    }

    pub fn conj(&self) -> Self {
        Self { mantissa: self.mantissa.conj(), scale: self.scale }
    }

    pub fn scale_by(&self, c: Complex64) -> Self {
        Self::new(accurate_mul(self.mantissa, c), self.scale)
    }

    pub fn recip(&self) -> Self {
        Self::new(self.mantissa.inv(), -self.scale)
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        if self.scale.rem_euclid(2) == 0 {
            Self::new(self.mantissa.sqrt(), self.scale.div_euclid(2))
        } else {
            Self::new((self.mantissa * 2.0).sqrt(), (self.scale - 1).div_euclid(2))
        }
    }

    pub fn powi(&self, n: i32) -> Self {
        let mut acc = Self::ONE;
        let mut base = if n < 0 { self.recip() } else { *self };
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Ratio `self / other` as an ordinary complex number.
    pub fn ratio(&self, other: &Self) -> Complex64 {
        (*self / *other).to_complex()
    }
}

impl From<Complex64> for ExtendedComplex {
    fn from(z: Complex64) -> Self {
        Self::new(z, 0)
    }
}

impl From<f64> for ExtendedComplex {
    fn from(x: f64) -> Self {
        Self::from_real(x)
    }
}

impl Mul for ExtendedComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(accurate_mul(self.mantissa, rhs.mantissa), self.scale + rhs.scale)
    }
}

impl Mul<Complex64> for ExtendedComplex {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        self.scale_by(rhs)
    }
}

impl Mul<f64> for ExtendedComplex {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.mantissa * rhs, self.scale)
    }
}

impl Div for ExtendedComplex {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self::new(self.mantissa / rhs.mantissa, self.scale - rhs.scale)
    }
}

impl Add for ExtendedComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.scale >= rhs.scale { (self, rhs) } else { (rhs, self) };
        let gap = big.scale - small.scale;
        if gap > ALIGN_LIMIT {
            return big;
        }
        Self::new(big.mantissa + scale_complex(small.mantissa, -gap), big.scale)
    }
}

impl Add<Complex64> for ExtendedComplex {
    type Output = Self;
    fn add(self, rhs: Complex64) -> Self {
        self + Self::from(rhs)
    }
}

impl Neg for ExtendedComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self { mantissa: -self.mantissa, scale: self.scale }
    }
}

impl Sub for ExtendedComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl fmt::Display for ExtendedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i) * 2^{}", self.mantissa.re, self.mantissa.im, self.scale)
    }
}
