//! Exact arithmetic on real quadratic irrationals `(p + √d) / q`.

use rug::{Complete, Float, Integer};

/// A real quadratic irrational `(p + √d) / q` with `d > 0` not a perfect
/// square, `q ≠ 0` and `q | d − p²`. The divisibility condition is preserved
/// by the Gauss and nearest-integer steps, so their digits are computed
/// exactly in integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    p: Integer,
    q: Integer,
    d: Integer,
    sqrt_floor: Integer,
}

impl QuadraticSurd {
    /// Returns `None` unless `d` is a positive non-square and `q | d − p²`.
    pub fn new(p: Integer, q: Integer, d: Integer) -> Option<Self> {
        if d <= 0 || q == 0 {
            return None;
        }
        let sqrt_floor = d.sqrt_ref().complete();
        if Integer::from(sqrt_floor.square_ref()) == d {
            return None;
        }
        let rem = Integer::from(&d - p.square_ref()) % &q;
        if rem != 0 {
            return None;
        }
        Some(Self {
            p,
            q,
            d,
            sqrt_floor,
        })
    }

    /// The surd in lowest inner form; any multiplier common to `p`, `q`
    /// and `(d − p²)/q` is left in place.
    pub fn parts(&self) -> (&Integer, &Integer, &Integer) {
        (&self.p, &self.q, &self.d)
    }

    pub fn floor(&self) -> Integer {
        let n = Integer::from(&self.p + &self.sqrt_floor);
        if self.q > 0 {
            n.div_rem_floor(self.q.clone()).0
        } else {
            // y/q with q < 0 and y irrational: floor = -(floor(n/|q|) + 1)
            let absq = Integer::from(-&self.q);
            -(n.div_rem_floor(absq).0 + 1u32)
        }
    }

    /// Nearest integer `round(x)`; ties cannot occur for irrationals.
    pub fn round(&self) -> Integer {
        let f = self.floor();
        let frac = self.sub_int(&f);
        // frac ∈ (0,1): compare with 1/2 via 2·frac − 1 ≷ 0
        let twice = Self {
            p: Integer::from(&frac.p * 2u32) - &frac.q,
            q: frac.q.clone(),
            d: Integer::from(&frac.d * 4u32),
            sqrt_floor: (frac.d.clone() * 4u32).sqrt(),
        };
        if twice.is_positive() {
            f + 1u32
        } else {
            f
        }
    }

    pub fn is_positive(&self) -> bool {
        // sign of p + √d times sign of q
        let num_positive = if self.p >= 0 {
            true
        } else {
            Integer::from(self.p.square_ref()) < self.d
        };
        num_positive == (self.q > 0)
    }

    pub fn sub_int(&self, k: &Integer) -> Self {
        Self {
            p: Integer::from(&self.p - k * &self.q),
            q: self.q.clone(),
            d: self.d.clone(),
            sqrt_floor: self.sqrt_floor.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        // -(p + √d)/q = (p + √d)/(-q)
        Self {
            p: self.p.clone(),
            q: Integer::from(-&self.q),
            d: self.d.clone(),
            sqrt_floor: self.sqrt_floor.clone(),
        }
    }

    pub fn recip(&self) -> Self {
        // q/(p + √d) = (−p + √d) / ((d − p²)/q)
        let q = Integer::from(&self.d - self.p.square_ref()) / &self.q;
        Self {
            p: Integer::from(-&self.p),
            q,
            d: self.d.clone(),
            sqrt_floor: self.sqrt_floor.clone(),
        }
    }

    /// Value at `prec` bits without cancellation: for `p < 0` the
    /// numerator is rewritten as `(d − p²)/(√d − p)`.
    pub fn to_float(&self, prec: u32) -> Float {
        let work = prec + 32;
        let root = Float::with_val(work, &self.d).sqrt();
        let num = if self.p >= 0 {
            root + &self.p
        } else {
            let top = Integer::from(&self.d - self.p.square_ref());
            let bottom = root - &self.p;
            Float::with_val(work, &top) / bottom
        };
        let mut v = num / &self.q;
        v.set_prec(prec);
        v
    }

    pub fn to_f64(&self) -> f64 {
        self.to_float(64).to_f64()
    }

    /// Reduced state used for eventual-periodicity detection.
    pub(crate) fn state(&self) -> (Integer, Integer) {
        (self.p.clone(), self.q.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surd(p: i64, q: i64, d: i64) -> QuadraticSurd {
        QuadraticSurd::new(p.into(), q.into(), d.into()).unwrap()
    }

    #[test]
    fn golden_mean_gauss_map_is_fixed() {
        // g = (−1 + √5)/2
        let g = surd(-1, 2, 5);
        assert_eq!(g.floor(), 0);
        let inv = g.recip();
        assert_eq!(inv.floor(), 1);
        let next = inv.sub_int(&Integer::from(1));
        assert!((next.to_f64() - g.to_f64()).abs() < 1e-16);
    }

    #[test]
    fn negative_denominators_floor_correctly() {
        // (1 + √2)/(−1) = −2.414…
        let s = surd(1, -1, 2);
        assert_eq!(s.floor(), -3);
        assert!(!s.is_positive());
        assert_eq!(s.neg().floor(), 2);
        assert_eq!(s.round(), -2);
    }

    #[test]
    fn rejects_squares_and_bad_forms() {
        assert!(QuadraticSurd::new(0.into(), 1.into(), 9.into()).is_none());
        assert!(QuadraticSurd::new(1.into(), 3.into(), 5.into()).is_none());
    }

    #[test]
    fn float_value_avoids_cancellation() {
        // √10001 − 100 ≈ 0.0049998750…, numerator rewritten
        let s = surd(-100, 1, 10001);
        let expected = 1.0 / (10001f64.sqrt() + 100.0);
        let got = s.to_f64();
        assert!((got - expected).abs() / expected < 1e-15);
    }
}
