//! The linearizing series of `P_α` at the origin and the conformal radius
//! of its Siegel disk.

use num_complex::Complex64;
use rug::{Float, Rational as BigRational};

use crate::brjuno::{self, BrjunoValue};
use crate::cf::{self, AlphaSpec, CfFlavor, ExpandOptions, StopReason};
use crate::error::{Error, Result};
use crate::extended::{sum_aligned, ExtComplex};
use crate::precision::{reduce_turns, BigComplex};
use crate::upsilon::{Method, UpsilonDiagnostics, UpsilonValue};

/// Working precision for the angles `nα mod 1`.
pub const DIVISOR_PRECISION: u32 = 256;

/// Shortest series accepted by [`conformal_radius`].
pub const MIN_RADIUS_ORDER: usize = 64;

/// Converts an MPFR complex to the extended-exponent form without passing
/// through `f64` range limits.
pub(crate) fn ext_from_big(z: &BigComplex) -> ExtComplex {
    let part = |x: &Float| -> (f64, i64) {
        if x.is_zero() {
            (0.0, i64::MIN)
        } else {
            let (m, e) = x.to_f64_exp();
            (m, e as i64)
        }
    };
    let (mr, er) = part(&z.re);
    let (mi, ei) = part(&z.im);
    let top = er.max(ei);
    if top == i64::MIN {
        return ExtComplex::ZERO;
    }
    let shift = |m: f64, e: i64| {
        if e == i64::MIN {
            0.0
        } else {
            crate::extended::ldexp(m, e - top)
        }
    };
    ExtComplex::from_c64(Complex64::new(shift(mr, er), shift(mi, ei))).scale_pow2(top)
}

/// The angles `mα mod 1` for `m` up to a fixed bound, through the
/// Ostrowski expansion `m = Σ b_k q_k`, for which
/// `mα − Σ b_k p_k = Σ b_k (−1)^k β_k`.
#[derive(Clone, Debug)]
pub struct SmallDivisors {
    alpha: Float,
    exact: Option<BigRational>,
    q: Vec<u64>,
    signed_beta: Vec<Float>,
    alpha_radius: f64,
    max_index: u64,
    prec: u32,
}

impl SmallDivisors {
    /// Prepares angles for every `m ≤ max_index`.
    pub fn new(alpha: &AlphaSpec, max_index: u64, prec: u32) -> Result<Self> {
        if let Some(r) = alpha.as_rational() {
            return Ok(Self {
                alpha: Float::with_val(prec, r.as_big()),
                exact: Some(r.into_big()),
                q: Vec::new(),
                signed_beta: Vec::new(),
                alpha_radius: 0.0,
                max_index,
                prec,
            });
        }
        let mut max_terms = 64;
        loop {
            let exp = cf::expand(
                alpha,
                CfFlavor::Gauss,
                ExpandOptions {
                    max_terms,
                    precision: prec,
                },
            )?;
            let n = exp.len();
            let mut q = Vec::with_capacity(n);
            let mut signed_beta = Vec::with_capacity(n);
            let mut covered = false;
            for k in 0..n {
                let Some(qk) = exp.convergent(k).1.to_u64() else {
                    covered = true;
                    break;
                };
                q.push(qk);
                let mut b = exp.beta(k).clone();
                if k % 2 == 1 {
                    b = -b;
                }
                signed_beta.push(b);
                if qk > max_index {
                    covered = true;
                    break;
                }
            }
            if covered {
                return Ok(Self {
                    alpha: exp.value().clone(),
                    exact: None,
                    q,
                    signed_beta,
                    alpha_radius: exp.alpha_radius(0),
                    max_index,
                    prec,
                });
            }
            if exp.stop() != StopReason::MaxTerms {
                return Err(Error::PrecisionExhausted { certified: n });
            }
            max_terms *= 4;
        }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// `mα` reduced to `[−1/2, 1/2]`.
    pub fn theta(&self, m: u64) -> Result<Float> {
        if m > self.max_index {
            return Err(Error::InvalidArgument(format!(
                "index {m} beyond prepared bound {}",
                self.max_index
            )));
        }
        if let Some(r) = &self.exact {
            let t = reduce_turns(&BigRational::from(r * m));
            return Ok(Float::with_val(self.prec, &t));
        }
        let mut theta = Float::with_val(self.prec + 32, 0);
        let mut rest = m;
        let mut k = self.q.len();
        while rest > 0 {
            k -= 1;
            let qk = self.q[k];
            if qk <= rest {
                let b = rest / qk;
                rest -= b * qk;
                theta += Float::with_val(self.prec + 32, &self.signed_beta[k] * b);
            }
        }
        let shifted = Float::with_val(self.prec + 32, &theta + 0.5f64).floor();
        theta -= shifted;
        let uncertainty = m as f64 * self.alpha_radius;
        if uncertainty > 0.0 && uncertainty > 1e-3 * theta.to_f64().abs() {
            return Err(Error::PrecisionExhausted {
                certified: self.q.len(),
            });
        }
        theta.set_prec(self.prec);
        Ok(theta)
    }

    /// `λ^m = e^{2iπ mα}` from the reduced angle.
    pub fn rotation(&self, m: u64) -> Result<BigComplex> {
        Ok(BigComplex::cis_turns(&self.theta(m)?))
    }

    /// `λ^n − λ = 2i sin(πθ) e^{iπ(θ + 2α)}` with `θ = (n−1)α mod 1`.
    pub fn divisor(&self, n: u64) -> Result<BigComplex> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let theta = self.theta(n - 1)?;
        if theta.is_zero() {
            return Ok(BigComplex::zero(self.prec));
        }
        let prec = self.prec + 16;
        let mut half_angle = Float::with_val(prec, rug::float::Constant::Pi);
        half_angle *= &theta;
        let sin = Float::with_val(prec, half_angle.sin_ref()) * 2u32;
        let mut turns = Float::with_val(prec, &theta / 2u32);
        turns += &self.alpha;
        let mut phase = BigComplex::cis_turns(&turns);
        // i·phase
        std::mem::swap(&mut phase.re, &mut phase.im);
        phase.re = -phase.re;
        Ok(phase.scale(&sin).with_prec(self.prec))
    }
}

/// `λ^n − λ` for `P_α`, computed from the continued fraction of `α`.
pub fn small_divisor(alpha: &AlphaSpec, n: u64) -> Result<BigComplex> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    SmallDivisors::new(alpha, n, DIVISOR_PRECISION)?.divisor(n)
}

#[derive(Clone, Copy, Debug)]
pub struct LinearizeOptions {
    pub precision: u32,
    /// Coefficient `b` of the map `λz + bz²`; `b = 1/c` linearizes
    /// `c·P_α(z/c)`.
    pub quadratic: Complex64,
}

impl Default for LinearizeOptions {
    fn default() -> Self {
        Self {
            precision: DIVISOR_PRECISION,
            quadratic: Complex64::new(1.0, 0.0),
        }
    }
}

/// `h(w) = w + Σ_{n≥2} h_n wⁿ` with `P_α(h(w)) = h(λw)`.
#[derive(Clone, Debug)]
pub struct LinearizingSeries {
    alpha: AlphaSpec,
    /// `coeffs[n]` is `h_n`; index 0 is unused.
    coeffs: Vec<ExtComplex>,
    /// `rotations[n]` is `λⁿ`.
    rotations: Vec<Complex64>,
    quadratic: Complex64,
    small_divisor_floor: f64,
}

impl LinearizingSeries {
    pub fn alpha(&self) -> &AlphaSpec {
        &self.alpha
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> ExtComplex {
        self.coeffs[n]
    }

    /// `log|h_n|` for `n = 2..=N`.
    pub fn log_mag(&self) -> Vec<f64> {
        self.coeffs[2..].iter().map(|h| h.ln_abs()).collect()
    }

    /// Unit phases of `h_n` for `n = 2..=N`.
    pub fn phases(&self) -> Vec<Complex64> {
        self.coeffs[2..].iter().map(|h| h.phase()).collect()
    }

    pub fn lambda(&self) -> Complex64 {
        self.rotations[1]
    }

    pub fn small_divisor_floor(&self) -> f64 {
        self.small_divisor_floor
    }

    /// `|P(h(w)) − h(λw)|` for the truncated series.
    pub fn residual(&self, w: Complex64) -> f64 {
        let (h, h_rot) = self.evaluate_pair(w);
        let lambda = ExtComplex::from_c64(self.lambda());
        let b = ExtComplex::from_c64(self.quadratic);
        (lambda * h + b * h * h - h_rot).norm()
    }

    fn evaluate_pair(&self, w: Complex64) -> (ExtComplex, ExtComplex) {
        let w = ExtComplex::from_c64(w);
        let mut pow = ExtComplex::one();
        let mut terms = Vec::with_capacity(self.order());
        let mut rotated = Vec::with_capacity(self.order());
        for n in 1..=self.order() {
            pow = pow * w;
            let t = self.coeffs[n] * pow;
            terms.push((t.mantissa(), t.exponent()));
            let r = t.mul_c64(self.rotations[n]);
            rotated.push((r.mantissa(), r.exponent()));
        }
        (
            sum_aligned(terms.iter().copied()),
            sum_aligned(rotated.iter().copied()),
        )
    }

    /// Expected size of the residual at `w`: the first dropped coefficient
    /// plus a rounding floor proportional to `Σ n|h_n||w|ⁿ`.
    pub fn tail_estimate(&self, w: Complex64) -> f64 {
        let lw = w.norm().ln();
        let n = self.order();
        let mut rounding = 0.0;
        for k in 1..=n {
            let l = self.coeffs[k].ln_abs() + k as f64 * lw;
            rounding += k as f64 * l.exp();
        }
        let last = (self.coeffs[n].ln_abs() + (n as f64 + 1.0) * lw).exp();
        last * self.quadratic.norm() + 4.0 * f64::EPSILON * rounding
    }
}

pub fn linearize(alpha: &AlphaSpec, order: usize) -> Result<LinearizingSeries> {
    linearize_with(alpha, order, LinearizeOptions::default())
}

/// Runs the recurrence `h_n (λⁿ − λ) = b Σ_{i+j=n} h_i h_j`, `h_1 = 1`.
pub fn linearize_with(
    alpha: &AlphaSpec,
    order: usize,
    opts: LinearizeOptions,
) -> Result<LinearizingSeries> {
    if alpha.is_rational() {
        return Err(Error::RationalInput);
    }
    if order < 2 {
        return Err(Error::SeriesTooShort { order, min: 2 });
    }
    let divisors = SmallDivisors::new(alpha, order as u64, opts.precision)?;
    let b = ExtComplex::from_c64(opts.quadratic);
    let mut coeffs = vec![ExtComplex::ZERO; order + 1];
    let mut rotations = vec![Complex64::new(1.0, 0.0); order + 1];
    coeffs[1] = ExtComplex::one();
    rotations[1] = divisors.rotation(1)?.to_c64();
    let mut floor = f64::INFINITY;
    for n in 2..=order {
        rotations[n] = divisors.rotation(n as u64)?.to_c64();
        let d = divisors.divisor(n as u64)?;
        if d.is_zero() {
            return Err(Error::ZeroSmallDivisor(n as u64));
        }
        let d = ext_from_big(&d);
        floor = floor.min(d.norm());
        let half = n / 2;
        let pairs = (1..=half).map(|i| {
            let t = coeffs[i] * coeffs[n - i];
            let m = if 2 * i == n {
                t.mantissa()
            } else {
                t.mantissa() * 2.0
            };
            (m, t.exponent())
        });
        let conv = sum_aligned(pairs);
        coeffs[n] = b * conv / d;
    }
    Ok(LinearizingSeries {
        alpha: alpha.clone(),
        coeffs,
        rotations,
        quadratic: opts.quadratic,
        small_divisor_floor: floor,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusMethod {
    /// `exp(−max log|h_n|/n)` over the trailing half.
    Hadamard,
    /// `exp(−s)`, `s` the least-squares slope of `log|h_n|` against `n`
    /// over the trailing half.
    SlopeFit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadiusEstimate {
    pub value: f64,
    pub method: RadiusMethod,
    /// Largest pairwise difference between the Hadamard estimate and the
    /// slope fits over the trailing half and quarter.
    pub spread: f64,
    pub n_used: usize,
    pub hadamard: f64,
    pub slope_half: f64,
    pub slope_quarter: f64,
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for &(x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

pub fn conformal_radius(
    series: &LinearizingSeries,
    method: RadiusMethod,
) -> Result<RadiusEstimate> {
    let n = series.order();
    if n < MIN_RADIUS_ORDER {
        return Err(Error::SeriesTooShort {
            order: n,
            min: MIN_RADIUS_ORDER,
        });
    }
    let window = |from: usize| -> Vec<(f64, f64)> {
        (from..=n)
            .map(|k| (k as f64, series.coeffs[k].ln_abs()))
            .filter(|p| p.1.is_finite())
            .collect()
    };
    let half = window(n / 2);
    let quarter = window(3 * n / 4);
    let hadamard = (-half
        .iter()
        .map(|&(k, l)| l / k)
        .fold(f64::NEG_INFINITY, f64::max))
    .exp();
    let slope_half = (-slope(&half)).exp();
    let slope_quarter = (-slope(&quarter)).exp();
    let all = [hadamard, slope_half, slope_quarter];
    let mut spread: f64 = 0.0;
    for a in all {
        for b in all {
            spread = spread.max((a - b).abs());
        }
    }
    let value = match method {
        RadiusMethod::Hadamard => hadamard,
        RadiusMethod::SlopeFit => slope_half,
    };
    Ok(RadiusEstimate {
        value,
        method,
        spread,
        n_used: n,
        hadamard,
        slope_half,
        slope_quarter,
    })
}

/// `Υ(α) = Φ(α) + log r(α)` for a Brjuno number.
pub fn upsilon_brjuno(alpha: &AlphaSpec, order: usize, tol: f64) -> Result<UpsilonValue> {
    let phi = brjuno::phi(alpha, tol)?;
    if phi.divergence_suspected {
        return Err(Error::BudgetExhausted(
            "Brjuno sum exceeds the divergence ceiling".into(),
        ));
    }
    upsilon_from_phi(alpha, &phi, order, LinearizeOptions::default())
}

/// `Φ + log r` given an already summed `Φ`.
pub(crate) fn upsilon_from_phi(
    alpha: &AlphaSpec,
    phi: &BrjunoValue,
    order: usize,
    opts: LinearizeOptions,
) -> Result<UpsilonValue> {
    let series = linearize_with(alpha, order, opts)?;
    let radius = conformal_radius(&series, RadiusMethod::SlopeFit)?;
    Ok(UpsilonValue {
        value: phi.value + radius.value.ln(),
        method: Method::BrjunoSeries,
        error_estimate: phi.tail_bound + radius.spread / radius.value,
        diagnostics: UpsilonDiagnostics::Brjuno {
            phi: phi.value,
            phi_tail: phi.tail_bound,
            radius,
        },
    })
}
