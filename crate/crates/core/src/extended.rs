//! Complex numbers with an unbounded binary exponent.
//!
//! Linearization coefficients grow like `r^{-n}` and iterates of `P^{∘q}`
//! escape doubly exponentially; both overflow `f64` long before the
//! computations stop being meaningful. `ExtComplex` keeps a
//! `Complex64` mantissa with `max(|re|, |im|)` in `[0.5, 1)` and an `i64`
//! exponent, so `value = mantissa · 2^exp`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtComplex {
    mant: Complex64,
    exp: i64,
}

/// Exponent `e` with `x = m · 2^e`, `|m| ∈ [0.5, 1)`. `x` must be finite and nonzero.
fn frexp_exp(x: f64) -> i64 {
    let bits = x.abs().to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    if raw == 0 {
        // subnormal
        frexp_exp(x * 2f64.powi(64)) - 64
    } else {
        raw - 1022
    }
}

/// `2^k` for `k ≤ 0`, flushing to zero below the normal range.
#[inline]
pub(crate) fn pow2_nonpos(k: i64) -> f64 {
    if k < -1022 {
        0.0
    } else {
        f64::from_bits(((k + 1023) as u64) << 52)
    }
}

/// `x · 2^k` without intermediate overflow/underflow artefacts.
pub(crate) fn ldexp(mut x: f64, mut k: i64) -> f64 {
    while k > 1000 {
        x *= 2f64.powi(1000);
        k -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -1000 {
        x *= 2f64.powi(-1000);
        k += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(k as i32)
}

impl ExtComplex {
    pub const ZERO: ExtComplex = ExtComplex {
        mant: Complex64::new(0.0, 0.0),
        exp: 0,
    };

    pub fn one() -> Self {
        Self::from_c64(Complex64::new(1.0, 0.0))
    }

    pub fn from_c64(z: Complex64) -> Self {
        Self::normalized(z, 0)
    }

    fn normalized(z: Complex64, exp: i64) -> Self {
        let m = z.re.abs().max(z.im.abs());
        if m == 0.0 || !m.is_finite() {
            if m == 0.0 {
                return Self::ZERO;
            }
            return Self { mant: z, exp };
        }
        let e = frexp_exp(m);
        let s = ldexp(1.0, -e);
        Self {
            mant: z * s,
            exp: exp + e,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    pub fn mantissa(&self) -> Complex64 {
        self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// Natural log of the modulus; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mant.norm().ln() + self.exp as f64 * std::f64::consts::LN_2
    }

    pub fn arg(&self) -> f64 {
        self.mant.arg()
    }

    /// Unit-modulus phase factor.
    pub fn phase(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(1.0, 0.0);
        }
        self.mant / self.mant.norm()
    }

    /// Conversion to `f64` parts; saturates to infinity / flushes to zero.
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(ldexp(self.mant.re, self.exp), ldexp(self.mant.im, self.exp))
    }

    pub fn norm(&self) -> f64 {
        ldexp(self.mant.norm(), self.exp)
    }

    pub fn scale_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return *self;
        }
        Self {
            mant: self.mant,
            exp: self.exp + k,
        }
    }

    pub fn mul_c64(&self, c: Complex64) -> Self {
        Self::normalized(self.mant * c, self.exp)
    }
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        Self::from_c64(z)
    }
}

impl Mul for ExtComplex {
    type Output = ExtComplex;
    fn mul(self, rhs: ExtComplex) -> ExtComplex {
        if self.is_zero() || rhs.is_zero() {
            return ExtComplex::ZERO;
        }
        ExtComplex::normalized(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl Div for ExtComplex {
    type Output = ExtComplex;
    fn div(self, rhs: ExtComplex) -> ExtComplex {
        if self.is_zero() {
            return ExtComplex::ZERO;
        }
        ExtComplex::normalized(self.mant / rhs.mant, self.exp - rhs.exp)
    }
}

impl Add for ExtComplex {
    type Output = ExtComplex;
    fn add(self, rhs: ExtComplex) -> ExtComplex {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exp >= rhs.exp {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = small.exp - big.exp;
        let s = pow2_nonpos(shift);
        ExtComplex::normalized(big.mant + small.mant * s, big.exp)
    }
}

impl Neg for ExtComplex {
    type Output = ExtComplex;
    fn neg(self) -> ExtComplex {
        ExtComplex {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl Sub for ExtComplex {
    type Output = ExtComplex;
    fn sub(self, rhs: ExtComplex) -> ExtComplex {
        self + (-rhs)
    }
}

/// Sum of many terms `m_k · 2^{e_k}` aligned against a common maximal
/// exponent; one pass to find the exponent, one to accumulate.
pub(crate) fn sum_aligned(terms: impl Iterator<Item = (Complex64, i64)> + Clone) -> ExtComplex {
    let top = terms
        .clone()
        .filter(|(m, _)| m.re != 0.0 || m.im != 0.0)
        .map(|(_, e)| e)
        .max();
    let Some(top) = top else {
        return ExtComplex::ZERO;
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, e) in terms {
        acc += m * pow2_nonpos(e - top);
    }
    ExtComplex::normalized(acc, top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_products_do_not_overflow() {
        let x = ExtComplex::from_c64(Complex64::new(1e300, -1e300));
        let mut acc = ExtComplex::one();
        for _ in 0..50 {
            acc = acc * x;
        }
        let expected = 50.0 * (1e300f64 * 2f64.sqrt()).ln();
        assert!((acc.ln_abs() - expected).abs() < 1e-9 * expected);
        let back = acc / acc;
        assert!((back.to_c64() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn addition_aligns_exponents() {
        let a = ExtComplex::from_c64(Complex64::new(3.0, 0.0)).scale_pow2(5000);
        let b = ExtComplex::from_c64(Complex64::new(1.0, 0.0)).scale_pow2(4999);
        let s = a + b;
        let rel = (s.ln_abs() - (3.5f64.ln() + 5000.0 * std::f64::consts::LN_2)).abs();
        assert!(rel < 1e-12);
        assert!((a - a).is_zero());
    }

    #[test]
    fn round_trip_small_values() {
        for z in [
            Complex64::new(0.25, -3.0),
            Complex64::new(1e-300, 0.0),
            Complex64::new(-7.5e200, 2.0),
        ] {
            let e = ExtComplex::from_c64(z);
            assert!((e.to_c64() - z).norm() <= 1e-15 * z.norm());
        }
    }
}
