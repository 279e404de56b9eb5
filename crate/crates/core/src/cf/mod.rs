//! Continued-fraction expansions: Gauss map and nearest-integer variant.

mod spec;
mod surd;

use std::collections::HashMap;

use rug::{Float, Integer, Rational as BigRational};

use crate::error::{Error, Result};
use crate::precision::DEFAULT_PRECISION;

pub use spec::{evaluate_digits, AlphaSpec, Rational};
pub use surd::QuadraticSurd;

/// Default number of terms requested by callers that do not drive the
/// count through tail bounds.
pub const DEFAULT_MAX_TERMS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CfFlavor {
    /// `α_{n+1} = {1/α_n}`.
    Gauss,
    /// `α̃_{n+1} = d(1/α̃_n, ℤ)`.
    NearestInteger,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// `α_m = 0`; the input is rational.
    Terminated { m: usize },
    /// The requested number of terms was reached.
    MaxTerms,
    /// The next digit cannot be certified from the available information.
    PrecisionExhausted,
}

/// A computed continued-fraction expansion.
///
/// Index `n` refers to `α_n`, `β_n = α_0⋯α_n` and the convergent `p_n/q_n`.
/// When the input is only known to lie in an interval, `digits` may hold one
/// more certified partial quotient than there are certified `α_n`.
#[derive(Clone, Debug)]
pub struct CFExpansion {
    flavor: CfFlavor,
    digits: Vec<Integer>,
    signs: Vec<i8>,
    alphas: Vec<Float>,
    alpha_radius: Vec<f64>,
    betas: Vec<Float>,
    p: Vec<Integer>,
    q: Vec<Integer>,
    stop: StopReason,
    precision: u32,
    period: Option<(usize, usize)>,
    value: Float,
}

impl CFExpansion {
    pub fn flavor(&self) -> CfFlavor {
        self.flavor
    }

    /// Number of certified `α_n`.
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Partial quotients; for the nearest-integer flavor these are the
    /// unsigned `round(1/α̃_{n−1})` and the signs live in [`Self::signs`].
    pub fn digits(&self) -> &[Integer] {
        &self.digits
    }

    /// `ε_n = ±1` with `x_n = a_n + ε_n α̃_n`; all `+1` for the Gauss flavor.
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn alphas(&self) -> &[Float] {
        &self.alphas
    }

    pub fn alpha(&self, n: usize) -> &Float {
        &self.alphas[n]
    }

    /// Half-width of the certified enclosure of `α_n` (zero for exact inputs).
    pub fn alpha_radius(&self, n: usize) -> f64 {
        self.alpha_radius[n]
    }

    pub fn betas(&self) -> &[Float] {
        &self.betas
    }

    pub fn beta(&self, n: usize) -> &Float {
        &self.betas[n]
    }

    /// `β_{k−1}`, with `β_{−1} = 1`.
    pub fn beta_before(&self, k: usize) -> Float {
        if k == 0 {
            Float::with_val(self.precision, 1)
        } else {
            self.betas[k - 1].clone()
        }
    }

    pub fn convergent(&self, n: usize) -> (&Integer, &Integer) {
        (&self.p[n], &self.q[n])
    }

    pub fn numerators(&self) -> &[Integer] {
        &self.p
    }

    pub fn denominators(&self) -> &[Integer] {
        &self.q
    }

    pub fn stop(&self) -> StopReason {
        self.stop
    }

    pub fn terminated(&self) -> Option<usize> {
        match self.stop {
            StopReason::Terminated { m } => Some(m),
            _ => None,
        }
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `(start, length)` of the detected period of the `α_n`, if any.
    pub fn period(&self) -> Option<(usize, usize)> {
        self.period
    }

    /// The expanded number (interval midpoint for inexact inputs).
    pub fn value(&self) -> &Float {
        &self.value
    }

    /// Upper bound for `log(1/α_k)` over all `k > n`, available when the
    /// tail is known to be periodic and has been computed through one period.
    pub fn tail_log_bound(&self, n: usize) -> Option<f64> {
        let (start, len) = self.period?;
        let from = n + 1;
        let to = from.max(start) + len;
        if to > self.len() {
            return None;
        }
        let mut worst: f64 = 0.0;
        for k in from..to {
            worst = worst.max(-self.alphas[k].to_f64().ln());
        }
        Some(worst)
    }
}

/// `(p_n, q_n, β_n, α_n)` at index `n`.
pub fn convergent_tail_data(
    exp: &CFExpansion,
    n: usize,
) -> Result<(Integer, Integer, Float, Float)> {
    if n >= exp.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: exp.len(),
        });
    }
    Ok((
        exp.p[n].clone(),
        exp.q[n].clone(),
        exp.betas[n].clone(),
        exp.alphas[n].clone(),
    ))
}

#[derive(Clone, Copy, Debug)]
pub struct ExpandOptions {
    /// Largest index computed: entries `0..=max_terms`.
    pub max_terms: usize,
    pub precision: u32,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        Self {
            max_terms: DEFAULT_MAX_TERMS,
            precision: DEFAULT_PRECISION,
        }
    }
}

/// Gauss expansion through index `max_terms`, failing if the input does not
/// determine that many digits.
pub fn expand_gauss(x: &AlphaSpec, max_terms: usize) -> Result<CFExpansion> {
    strict(expand(
        x,
        CfFlavor::Gauss,
        ExpandOptions {
            max_terms,
            ..Default::default()
        },
    )?)
}

pub fn expand_nearest(x: &AlphaSpec, max_terms: usize) -> Result<CFExpansion> {
    strict(expand(
        x,
        CfFlavor::NearestInteger,
        ExpandOptions {
            max_terms,
            ..Default::default()
        },
    )?)
}

fn strict(exp: CFExpansion) -> Result<CFExpansion> {
    match exp.stop {
        StopReason::PrecisionExhausted => Err(Error::PrecisionExhausted {
            certified: exp.len(),
        }),
        _ => Ok(exp),
    }
}

/// Expansion that stops early, labelled, instead of failing when the input
/// runs out of certified digits.
pub fn expand(x: &AlphaSpec, flavor: CfFlavor, opts: ExpandOptions) -> Result<CFExpansion> {
    x.validate()?;
    let source = Source::from_spec(x, opts.precision)?;
    Ok(run(source, flavor, opts))
}

/// Both finite expansions of a rational: the Euclidean one ending at
/// `α_m = 0`, and the one with `α_m = 1`, `α_{m+1} = 0`.
pub fn rational_expansions(r: &Rational) -> (CFExpansion, CFExpansion) {
    let opts = ExpandOptions {
        max_terms: usize::MAX,
        precision: DEFAULT_PRECISION,
    };
    let euclid = run(Source::Exact(r.as_big().clone()), CfFlavor::Gauss, opts);
    let m = euclid.terminated().expect("rationals terminate");
    let prec = euclid.precision;

    let mut v = euclid.clone();
    v.digits[m] -= 1u32;
    v.digits.push(Integer::from(1));
    v.signs.push(1);
    v.alphas[m] = Float::with_val(prec, 1);
    v.alphas.push(Float::new(prec));
    v.alpha_radius.push(0.0);
    v.betas[m] = v.beta_before(m);
    v.betas.push(Float::new(prec));
    v.p.truncate(m);
    v.q.truncate(m);
    for n in m..=m + 1 {
        push_convergent(&mut v.p, &mut v.q, &v.digits[n], 1);
    }
    v.stop = StopReason::Terminated { m: m + 1 };
    (euclid, v)
}

fn push_convergent(p: &mut Vec<Integer>, q: &mut Vec<Integer>, a: &Integer, prev_sign: i8) {
    let n = p.len();
    let (p1, q1) = if n >= 1 {
        (p[n - 1].clone(), q[n - 1].clone())
    } else {
        (Integer::from(1), Integer::from(0))
    };
    let (p2, q2) = if n >= 2 {
        (p[n - 2].clone(), q[n - 2].clone())
    } else if n == 1 {
        (Integer::from(1), Integer::from(0))
    } else {
        (Integer::from(0), Integer::from(1))
    };
    let np = Integer::from(a * &p1) + p2 * prev_sign as i32;
    let nq = Integer::from(a * &q1) + q2 * prev_sign as i32;
    p.push(np);
    q.push(nq);
}

// ------------------------------------------------------------------ sources

#[derive(Clone, Debug)]
enum Source {
    Exact(BigRational),
    Surd(QuadraticSurd),
    /// `lo ≤ x ≤ hi` (or strict when `open`).
    Interval {
        lo: BigRational,
        hi: BigRational,
        open: bool,
    },
}

impl Source {
    fn from_spec(x: &AlphaSpec, prec: u32) -> Result<Self> {
        Ok(match x {
            AlphaSpec::Rational(r) => Source::Exact(r.as_big().clone()),
            AlphaSpec::Digits {
                digits,
                terminal: true,
            } => Source::Exact(evaluate_digits(digits)),
            AlphaSpec::Digits {
                digits,
                terminal: false,
            } => {
                let a = evaluate_digits(digits);
                let mut bumped = digits.clone();
                *bumped.last_mut().expect("non-empty") += 1u32;
                let b = evaluate_digits(&bumped);
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                Source::Interval { lo, hi, open: true }
            }
            AlphaSpec::PeriodicCf { preperiod, period } => {
                Source::Surd(periodic_to_surd(preperiod, period, prec))
            }
            AlphaSpec::Decimal {
                literal,
                precision_bits,
            } => {
                let (n, k) = spec::parse_decimal_literal(literal, 0)?;
                let scale = Integer::from(Integer::u_pow_u(10, k));
                let lit = BigRational::from((n, scale.clone()));
                let delta = BigRational::from((Integer::from(1), scale));
                let (lo, hi) = if lit < 0 {
                    (BigRational::from(&lit - &delta), lit)
                } else {
                    let hi = BigRational::from(&lit + &delta);
                    (lit, hi)
                };
                let bits = *precision_bits;
                Source::Interval {
                    lo: round_dyadic(&lo, bits, false),
                    hi: round_dyadic(&hi, bits, true),
                    open: false,
                }
            }
        })
    }
}

/// Outward rounding of `r` to a multiple of `2^-bits`.
fn round_dyadic(r: &BigRational, bits: u32, up: bool) -> BigRational {
    let scale = Integer::from(1) << bits;
    let scaled = BigRational::from(r * &scale);
    let k = if up { scaled.ceil() } else { scaled.floor() };
    BigRational::from((k.numer().clone(), scale))
}

/// `[a_0; b, (c)]` as `(u + √d)/v`: the number is the attracting fixed
/// point of `M_pre · M_per · M_pre⁻¹`.
fn periodic_to_surd(pre: &[Integer], per: &[Integer], prec: u32) -> QuadraticSurd {
    let mat = |digits: &[Integer]| {
        let mut m = [
            Integer::from(1),
            Integer::from(0),
            Integer::from(0),
            Integer::from(1),
        ];
        for a in digits {
            // m · [[a, 1], [1, 0]]
            let n0 = Integer::from(&m[0] * a) + &m[1];
            let n2 = Integer::from(&m[2] * a) + &m[3];
            m = [n0, m[0].clone(), n2, m[2].clone()];
        }
        m
    };
    let mp = mat(pre);
    let mq = mat(per);
    let det = Integer::from(&mp[0] * &mp[3]) - Integer::from(&mp[1] * &mp[2]);
    // inverse of mp up to the factor det = ±1
    let inv = [
        Integer::from(&mp[3] * &det),
        Integer::from(-&mp[1]) * &det,
        Integer::from(-&mp[2]) * &det,
        Integer::from(&mp[0] * &det),
    ];
    let mul = |x: &[Integer; 4], y: &[Integer; 4]| {
        [
            Integer::from(&x[0] * &y[0]) + Integer::from(&x[1] * &y[2]),
            Integer::from(&x[0] * &y[1]) + Integer::from(&x[1] * &y[3]),
            Integer::from(&x[2] * &y[0]) + Integer::from(&x[3] * &y[2]),
            Integer::from(&x[2] * &y[1]) + Integer::from(&x[3] * &y[3]),
        ]
    };
    let n = mul(&mul(&mp, &mq), &inv);
    // c x² + (d − a) x − b = 0
    let (a, b, c, d) = (&n[0], &n[1], &n[2], &n[3]);
    let u = Integer::from(a - d);
    let disc = Integer::from(u.square_ref()) + Integer::from(b * c) * 4u32;
    let v = Integer::from(c * 2u32);
    let plus = QuadraticSurd::new(u.clone(), v.clone(), disc.clone()).expect("irrational");
    // (u − √d)/v = (−u + √d)/(−v)
    let minus = QuadraticSurd::new(-u, -v, disc).expect("irrational");
    let mut approx_digits = pre.to_vec();
    let reps = (prec as usize / (2 * per.len()) + 4).max(8);
    for _ in 0..reps {
        approx_digits.extend(per.iter().cloned());
    }
    let target = Float::with_val(prec + 32, evaluate_digits(&approx_digits));
    let err = |s: &QuadraticSurd| Float::with_val(prec + 32, s.to_float(prec + 32) - &target).abs();
    if err(&plus) <= err(&minus) {
        plus
    } else {
        minus
    }
}

// --------------------------------------------------------------- expansion

enum Step {
    /// Digit, sign, α enclosure (midpoint, radius), next complete quotient.
    Next {
        digit: Integer,
        sign: i8,
        alpha: Float,
        radius: f64,
        next: Option<Source>,
        state: Option<(Integer, Integer)>,
    },
    /// Digit certified, but `α` not bounded away from zero.
    DigitOnly {
        digit: Integer,
        sign: i8,
    },
    Exhausted,
}

fn run(source: Source, flavor: CfFlavor, opts: ExpandOptions) -> CFExpansion {
    let prec = opts.precision;
    let work = prec + 64;
    let value = match &source {
        Source::Exact(r) => Float::with_val(prec, r),
        Source::Surd(s) => s.to_float(prec),
        Source::Interval { lo, hi, .. } => Float::with_val(prec, BigRational::from(lo + hi) / 2u32),
    };
    let mut exp = CFExpansion {
        flavor,
        digits: Vec::new(),
        signs: Vec::new(),
        alphas: Vec::new(),
        alpha_radius: Vec::new(),
        betas: Vec::new(),
        p: Vec::new(),
        q: Vec::new(),
        stop: StopReason::MaxTerms,
        precision: prec,
        period: None,
        value,
    };
    let mut seen: HashMap<(Integer, Integer), usize> = HashMap::new();
    let mut beta = Float::with_val(work, 1);
    let mut prev_sign: i8 = 1;
    let mut cur = source;
    let mut n = 0usize;
    loop {
        if n > opts.max_terms {
            exp.stop = StopReason::MaxTerms;
            break;
        }
        let step = match flavor {
            CfFlavor::Gauss => gauss_step(&cur, prec),
            CfFlavor::NearestInteger => nearest_step(&cur, prec),
        };
        match step {
            Step::Next {
                digit,
                sign,
                alpha,
                radius,
                next,
                state,
            } => {
                push_convergent(&mut exp.p, &mut exp.q, &digit, prev_sign);
                exp.digits.push(digit);
                exp.signs.push(sign);
                prev_sign = sign;
                beta *= &alpha;
                let mut stored_beta = beta.clone();
                stored_beta.set_prec(prec);
                exp.betas.push(stored_beta);
                let zero = alpha.is_zero();
                exp.alphas.push(alpha);
                exp.alpha_radius.push(radius);
                if let (Some(st), None) = (state, exp.period) {
                    if let Some(&j) = seen.get(&st) {
                        exp.period = Some((j, n - j));
                    } else {
                        seen.insert(st, n);
                    }
                }
                if zero {
                    exp.stop = StopReason::Terminated { m: n };
                    break;
                }
                match next {
                    Some(s) => cur = s,
                    None => {
                        exp.stop = StopReason::PrecisionExhausted;
                        break;
                    }
                }
            }
            Step::DigitOnly { digit, sign } => {
                push_convergent(&mut exp.p, &mut exp.q, &digit, prev_sign);
                exp.digits.push(digit);
                exp.signs.push(sign);
                exp.stop = StopReason::PrecisionExhausted;
                break;
            }
            Step::Exhausted => {
                exp.stop = StopReason::PrecisionExhausted;
                break;
            }
        }
        n += 1;
    }
    exp
}

fn interval_alpha(lo: &BigRational, hi: &BigRational, prec: u32) -> (Float, f64) {
    let mid = Float::with_val(prec, BigRational::from(lo + hi) / 2u32);
    let rad = BigRational::from(hi - lo).to_f64() / 2.0;
    (mid, rad)
}

fn gauss_step(cur: &Source, prec: u32) -> Step {
    match cur {
        Source::Exact(x) => {
            let a = x.clone().floor().numer().clone();
            let frac = BigRational::from(x - &a);
            let alpha = Float::with_val(prec, &frac);
            let next = (frac != 0).then(|| Source::Exact(frac.recip()));
            Step::Next {
                digit: a,
                sign: 1,
                alpha,
                radius: 0.0,
                next,
                state: None,
            }
        }
        Source::Surd(s) => {
            let a = s.floor();
            let frac = s.sub_int(&a);
            let alpha = frac.to_float(prec);
            let state = Some(frac.state());
            Step::Next {
                digit: a,
                sign: 1,
                alpha,
                radius: 0.0,
                next: Some(Source::Surd(frac.recip())),
                state,
            }
        }
        Source::Interval { lo, hi, open } => {
            let a = lo.clone().floor().numer().clone();
            let a_plus = Integer::from(&a + 1u32);
            let fits = if *open { *hi <= a_plus } else { *hi < a_plus };
            if !fits {
                return Step::Exhausted;
            }
            let flo = BigRational::from(lo - &a);
            let fhi = BigRational::from(hi - &a);
            if flo == 0 {
                if *open {
                    return Step::DigitOnly { digit: a, sign: 1 };
                }
                return Step::Exhausted;
            }
            let (alpha, radius) = interval_alpha(&flo, &fhi, prec);
            let next = Source::Interval {
                lo: fhi.recip(),
                hi: flo.recip(),
                open: *open,
            };
            Step::Next {
                digit: a,
                sign: 1,
                alpha,
                radius,
                next: Some(next),
                state: None,
            }
        }
    }
}

fn nearest_step(cur: &Source, prec: u32) -> Step {
    let half = BigRational::from((1, 2));
    match cur {
        Source::Exact(x) => {
            let a = BigRational::from(x + &half).floor().numer().clone();
            let diff = BigRational::from(x - &a);
            let sign: i8 = if diff < 0 { -1 } else { 1 };
            let dist = diff.abs();
            let alpha = Float::with_val(prec, &dist);
            let next = (dist != 0).then(|| Source::Exact(dist.recip()));
            Step::Next {
                digit: a,
                sign,
                alpha,
                radius: 0.0,
                next,
                state: None,
            }
        }
        Source::Surd(s) => {
            let a = s.round();
            let diff = s.sub_int(&a);
            let (sign, dist) = if diff.is_positive() {
                (1, diff)
            } else {
                (-1, diff.neg())
            };
            let alpha = dist.to_float(prec);
            let state = Some(dist.state());
            Step::Next {
                digit: a,
                sign,
                alpha,
                radius: 0.0,
                next: Some(Source::Surd(dist.recip())),
                state,
            }
        }
        Source::Interval { lo, hi, open } => {
            let a = BigRational::from(lo + &half).floor().numer().clone();
            let upper = BigRational::from(&a + &half);
            let fits = if *open { *hi <= upper } else { *hi < upper };
            if !fits {
                return Step::Exhausted;
            }
            let lower = BigRational::from(&a - &half);
            if !*open && *lo == lower {
                return Step::Exhausted;
            }
            let ai = BigRational::from(a.clone());
            let (sign, dlo, dhi) = if *hi <= ai {
                (
                    -1i8,
                    BigRational::from(&ai - hi),
                    BigRational::from(&ai - lo),
                )
            } else if *lo >= ai {
                (
                    1i8,
                    BigRational::from(lo - &ai),
                    BigRational::from(hi - &ai),
                )
            } else {
                return Step::Exhausted;
            };
            if dlo == 0 {
                if *open {
                    return Step::DigitOnly { digit: a, sign };
                }
                return Step::Exhausted;
            }
            let (alpha, radius) = interval_alpha(&dlo, &dhi, prec);
            let next = Source::Interval {
                lo: dhi.recip(),
                hi: dlo.recip(),
                open: *open,
            };
            Step::Next {
                digit: a,
                sign,
                alpha,
                radius,
                next: Some(next),
                state: None,
            }
        }
    }
}
