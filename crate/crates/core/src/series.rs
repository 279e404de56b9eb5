//! Truncated power series fixing the origin, and the parabolic data of
//! `P_{p/q}^{∘q}`.

use rug::Float;

use crate::cf::Rational;
use crate::error::{Error, Result};
use crate::precision::{BigComplex, DEFAULT_PRECISION};

/// `c_1 z + … + c_N z^N`; every operation discards degrees above `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    /// `coeffs[k]` is the coefficient of `z^{k+1}`.
    coeffs: Vec<BigComplex>,
}

impl TruncatedSeries {
    pub fn zero(order: usize, prec: u32) -> Self {
        Self {
            coeffs: vec![BigComplex::zero(prec); order],
        }
    }

    pub fn identity(order: usize, prec: u32) -> Self {
        let mut s = Self::zero(order, prec);
        if order > 0 {
            s.coeffs[0] = BigComplex::one(prec);
        }
        s
    }

    /// Coefficients given from degree 1 upward; missing ones are zero.
    pub fn from_coeffs(order: usize, prec: u32, coeffs: &[BigComplex]) -> Self {
        let mut s = Self::zero(order, prec);
        for (slot, c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = c.clone().with_prec(prec);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn precision(&self) -> u32 {
        self.coeffs.first().map_or(DEFAULT_PRECISION, |c| c.prec())
    }

    /// Coefficient of `z^k`; zero for `k = 0` and `k > N`.
    pub fn coeff(&self, k: usize) -> BigComplex {
        if k == 0 || k > self.order() {
            BigComplex::zero(self.precision())
        } else {
            self.coeffs[k - 1].clone()
        }
    }

    pub fn coeffs(&self) -> &[BigComplex] {
        &self.coeffs
    }

    fn highest_nonzero(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .map_or(0, |i| i + 1)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigComplex) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Truncated product; the result has valuation ≥ 2.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order();
        let prec = self.precision();
        let mut out = Self::zero(n, prec);
        let top_a = self.highest_nonzero();
        let top_b = other.highest_nonzero();
        for i in 1..=top_a {
            let a = &self.coeffs[i - 1];
            if a.is_zero() {
                continue;
            }
            for j in 1..=top_b.min(n.saturating_sub(i)) {
                out.coeffs[i + j - 1].add_mul(a, &other.coeffs[j - 1]);
            }
        }
        out
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// `f ∘ g`, summing `f_k g^k` over the nonzero coefficients of `f`.
    pub fn compose(&self, g: &Self) -> Self {
        assert_eq!(self.order(), g.order(), "orders must match");
        let n = self.order();
        let prec = self.precision().max(g.precision());
        let mut out = Self::zero(n, prec);
        let mut power = g.clone();
        let top = self.highest_nonzero();
        for k in 1..=top {
            if k > 1 {
                power = power.mul(g);
            }
            let fk = &self.coeffs[k - 1];
            if !fk.is_zero() {
                for (slot, c) in out.coeffs.iter_mut().zip(&power.coeffs) {
                    slot.add_mul(fk, c);
                }
            }
        }
        out
    }

    /// `λ·self + self²`, i.e. `P_λ ∘ self`, in one squaring.
    pub fn apply_quadratic(&self, lambda: &BigComplex) -> Self {
        self.scale(lambda).add(&self.square())
    }
}

/// `λz + z²` to order `N`.
pub fn quadratic_jet(lambda: &BigComplex, order: usize) -> TruncatedSeries {
    assert!(order >= 2, "order must be at least 2");
    let prec = lambda.prec();
    let mut s = TruncatedSeries::zero(order, prec);
    s.coeffs[0] = lambda.clone();
    s.coeffs[1] = BigComplex::one(prec);
    s
}

/// `e^{2iπα}z + z²` for rational `α`, the angle reduced exactly first.
pub fn quadratic_jet_rational(alpha: &Rational, order: usize, prec: u32) -> TruncatedSeries {
    quadratic_jet(&BigComplex::cis_rational(alpha.as_big(), prec), order)
}

/// `P^{∘k}` truncated at `order`, built as `P ∘ (P^{∘(k−1)})`.
pub fn iterate_jet(lambda: &BigComplex, k: usize, order: usize) -> TruncatedSeries {
    let mut h = TruncatedSeries::identity(order, lambda.prec());
    for _ in 0..k {
        h = h.apply_quadratic(lambda);
    }
    h
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParabolicData {
    pub pq: Rational,
    /// Coefficient of `z^{q+1}` in `P_{p/q}^{∘q}`.
    pub a: BigComplex,
    /// `log L_a = −(log q + log|A|)/q`.
    pub log_la: f64,
    pub la: f64,
    /// Largest modulus among the coefficients of degrees `1..=q` of
    /// `P^{∘q} − id`, all of which vanish exactly.
    pub residual: f64,
    pub precision: u32,
}

/// Largest accepted residual. Absolute: `|A|` grows like `e^{cq}`, and so
/// does the cancellation in the lower coefficients, which escalation of the
/// working precision absorbs.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

pub fn parabolic_coefficient(pq: &Rational) -> Result<ParabolicData> {
    parabolic_coefficient_with(pq, DEFAULT_PRECISION)
}

/// Parabolic data at a given working precision; fails with
/// [`Error::ResidualTooLarge`] if the precision cannot resolve the
/// cancellation in degrees `2..=q`.
pub fn parabolic_coefficient_with(pq: &Rational, prec: u32) -> Result<ParabolicData> {
    let q = pq.q() as usize;
    let lambda = BigComplex::cis_rational(pq.as_big(), prec);
    let jet = iterate_jet(&lambda, q, q + 2);
    let mut residual: f64 = (&jet.coeff(1) - &BigComplex::one(prec)).abs_f64();
    for k in 2..=q {
        residual = residual.max(jet.coeff(k).abs_f64());
    }
    let a = jet.coeff(q + 1);
    let abs_a = a.abs();
    let tolerance = RESIDUAL_TOLERANCE;
    if abs_a.is_zero() || abs_a.to_f64() <= residual {
        return Err(Error::DegenerateParabolic(pq.to_string()));
    }
    if residual > tolerance {
        return Err(Error::ResidualTooLarge {
            residual,
            tolerance,
        });
    }
    let qf = Float::with_val(prec, q as u64);
    let mut log = Float::with_val(prec, abs_a.ln_ref()) + qf.ln();
    log /= q as u64;
    let log_la = -log.to_f64();
    Ok(ParabolicData {
        pq: pq.clone(),
        a,
        log_la,
        la: log_la.exp(),
        residual,
        precision: prec,
    })
}

/// Retries with doubled precision until the residual check passes.
pub fn parabolic_coefficient_escalating(pq: &Rational, start_prec: u32) -> Result<ParabolicData> {
    let mut prec = start_prec;
    loop {
        match parabolic_coefficient_with(pq, prec) {
            Err(Error::ResidualTooLarge { .. }) if prec < 4096 => prec *= 2,
            other => return other,
        }
    }
}
