//! Multi-precision complex numbers on top of MPFR floats.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rug::float::Constant;
use rug::{Assign, Float, Rational};

/// Default working precision (bits of mantissa) for high-precision paths.
pub const DEFAULT_PRECISION: u32 = 128;

/// A complex number whose parts are MPFR floats of a common precision.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn zero(prec: u32) -> Self {
        Self {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, 1),
            im: Float::new(prec),
        }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// `e^{2iπ t}` for a real `t` given in turns.
    pub fn cis_turns(turns: &Float) -> Self {
        let prec = turns.prec();
        let mut angle = Float::with_val(prec, Constant::Pi);
        angle *= turns;
        angle *= 2;
        let (s, c) = angle.sin_cos(Float::new(prec));
        Self { re: c, im: s }
    }

    /// `e^{2iπ r}` for a rational `r`; the angle is reduced modulo 1 exactly
    /// before any rounding happens.
    pub fn cis_rational(r: &Rational, prec: u32) -> Self {
        let reduced = reduce_turns(r);
        let turns = Float::with_val(prec + 16, &reduced);
        let z = Self::cis_turns(&turns);
        z.with_prec(prec)
    }

    pub fn with_prec(mut self, prec: u32) -> Self {
        self.re.set_prec(prec);
        self.im.set_prec(prec);
        self
    }

    pub fn abs(&self) -> Float {
        let mut h = self.re.clone();
        h.hypot_mut(&self.im);
        h
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale(&self, k: &Float) -> Self {
        let prec = self.prec();
        Self {
            re: Float::with_val(prec, &self.re * k),
            im: Float::with_val(prec, &self.im * k),
        }
    }

    pub fn recip(&self) -> Self {
        let prec = self.prec();
        let mut den = Float::with_val(prec, self.re.square_ref());
        den += Float::with_val(prec, self.im.square_ref());
        Self {
            re: Float::with_val(prec, &self.re / &den),
            im: -Float::with_val(prec, &self.im / &den),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `self += a * b`.
    pub fn add_mul(&mut self, a: &BigComplex, b: &BigComplex) {
        let prec = self.prec();
        let mut t = Float::with_val(prec, &a.re * &b.re);
        t -= Float::with_val(prec, &a.im * &b.im);
        self.re += &t;
        t.assign(&a.re * &b.im);
        t += Float::with_val(prec, &a.im * &b.re);
        self.im += &t;
    }
}

/// Reduce a rational angle (in turns) to the representative in `[-1/2, 1/2)`.
pub fn reduce_turns(r: &Rational) -> Rational {
    let shifted = r + Rational::from((1, 2));
    let fl = shifted.floor_ref();
    let fl = Rational::from(fl);
    Rational::from(r - &fl)
}

impl Add for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        let prec = self.prec();
        BigComplex {
            re: Float::with_val(prec, &self.re + &rhs.re),
            im: Float::with_val(prec, &self.im + &rhs.im),
        }
    }
}

impl Sub for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        let prec = self.prec();
        BigComplex {
            re: Float::with_val(prec, &self.re - &rhs.re),
            im: Float::with_val(prec, &self.im - &rhs.im),
        }
    }
}

impl Mul for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        let mut out = BigComplex::zero(self.prec());
        out.add_mul(self, rhs);
        out
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: Float::with_val(self.prec(), -&self.re),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }
}
