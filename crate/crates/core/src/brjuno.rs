//! The sums `Φ`, `Φ_n`, `Φ_trunc` and `Φ̃` with tail control.

use rug::Float;

use crate::cf::{self, AlphaSpec, CFExpansion, CfFlavor, ExpandOptions, Rational, StopReason};
use crate::error::{Error, Result};
use crate::precision::DEFAULT_PRECISION;

/// Partial sums above this many nats mark an input as numerically Cremer.
pub const DIVERGENCE_CEILING: f64 = 1e4;

/// Constant used with [`fibonacci_tail`] when no further digits are known.
pub const MAJORANT_CONSTANT: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BrjunoFlavor {
    Gauss,
    NearestInteger,
    TruncatedRational,
}

impl From<CfFlavor> for BrjunoFlavor {
    fn from(f: CfFlavor) -> Self {
        match f {
            CfFlavor::Gauss => BrjunoFlavor::Gauss,
            CfFlavor::NearestInteger => BrjunoFlavor::NearestInteger,
        }
    }
}

/// How `tail_bound` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailKind {
    /// The sum is finite; no tail.
    Exact,
    /// Bounded with the actual digits of a periodic tail.
    Certified,
    /// Digits ran out; the Fibonacci majorant stands in for the unknown tail.
    FibonacciMajorant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BrjunoValue {
    pub value: f64,
    /// Index of the last summand included.
    pub terms_used: usize,
    pub tail_bound: f64,
    pub flavor: BrjunoFlavor,
    pub tail_kind: TailKind,
    pub divergence_suspected: bool,
}

impl BrjunoValue {
    pub fn converged(&self, tol: f64) -> bool {
        !self.divergence_suspected && self.tail_bound <= tol
    }
}

/// `Φ_n = Σ_{k=0}^{n} β_{k−1} log(1/α_k)`.
pub fn phi_partial(exp: &CFExpansion, n: usize) -> Result<f64> {
    Ok(partial_sums(exp, n)?[n])
}

/// All partial sums `Φ_0, …, Φ_n`.
pub fn partial_sums(exp: &CFExpansion, n: usize) -> Result<Vec<f64>> {
    if n >= exp.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: exp.len(),
        });
    }
    let prec = exp.precision();
    let mut acc = Float::with_val(prec + 32, 0);
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let alpha = exp.alpha(k);
        if alpha.is_zero() {
            return Err(Error::RationalInput);
        }
        acc += summand(exp, k);
        out.push(acc.to_f64());
    }
    Ok(out)
}

/// `β_{k−1} log(1/α_k)`, which vanishes when `α_k = 1`.
fn summand(exp: &CFExpansion, k: usize) -> Float {
    let prec = exp.precision() + 32;
    let log = -Float::with_val(prec, exp.alpha(k).ln_ref());
    log * exp.beta_before(k)
}

/// `Σ_{k≥n} C·log(F_{k+1})/F_{k+1}` with `F_{−1} = 0`, `F_0 = 1`.
pub fn fibonacci_tail(n: usize, c: f64) -> f64 {
    let (mut prev, mut cur) = (0f64, 1f64);
    // advance to F_{n+1}
    for _ in 0..=n {
        let next = prev + cur;
        prev = cur;
        cur = next;
    }
    let mut sum = 0.0;
    while cur.is_finite() {
        let term = c * cur.ln() / cur;
        if term == 0.0 || term < sum * 1e-18 {
            break;
        }
        sum += term;
        let next = prev + cur;
        prev = cur;
        cur = next;
    }
    sum
}

/// `Φ(x)` with tail bound at most `tol`.
pub fn phi(x: &AlphaSpec, tol: f64) -> Result<BrjunoValue> {
    strict(brjuno_sum(x, CfFlavor::Gauss, tol, DEFAULT_PRECISION)?, tol)
}

/// `Φ̃(x)`, the same sum over the nearest-integer expansion.
pub fn phi_tilde(x: &AlphaSpec, tol: f64) -> Result<BrjunoValue> {
    strict(
        brjuno_sum(x, CfFlavor::NearestInteger, tol, DEFAULT_PRECISION)?,
        tol,
    )
}

fn strict(v: BrjunoValue, tol: f64) -> Result<BrjunoValue> {
    if v.divergence_suspected || v.tail_bound <= tol {
        Ok(v)
    } else {
        Err(Error::PrecisionExhausted {
            certified: v.terms_used + 1,
        })
    }
}

/// Best available sum: stops as soon as the tail bound reaches `tol`, and
/// otherwise returns whatever the input supports with its (larger) tail
/// bound. Fails only for rational input.
pub fn brjuno_sum(x: &AlphaSpec, flavor: CfFlavor, tol: f64, prec: u32) -> Result<BrjunoValue> {
    if x.is_rational() {
        return Err(Error::RationalInput);
    }
    let mut max_terms = 64;
    loop {
        let exp = cf::expand(
            x,
            flavor,
            ExpandOptions {
                max_terms,
                precision: prec,
            },
        )?;
        if exp.terminated().is_some() {
            return Err(Error::RationalInput);
        }
        let v = sum_expansion(&exp, tol)?;
        let grow =
            exp.stop() == StopReason::MaxTerms && !v.converged(tol) && !v.divergence_suspected;
        if !grow || max_terms >= 1 << 16 {
            return Ok(v);
        }
        max_terms *= 4;
    }
}

/// Sum over a given irrational expansion, truncated once the tail bound is
/// below `tol`.
pub fn sum_expansion(exp: &CFExpansion, tol: f64) -> Result<BrjunoValue> {
    if exp.is_empty() {
        return Err(Error::PrecisionExhausted { certified: 0 });
    }
    let flavor = exp.flavor();
    let prec = exp.precision() + 32;
    let mut acc = Float::with_val(prec, 0);
    let mut best: Option<BrjunoValue> = None;
    for k in 0..exp.len() {
        if exp.alpha(k).is_zero() {
            return Err(Error::RationalInput);
        }
        acc += summand(exp, k);
        let value = acc.to_f64();
        if value > DIVERGENCE_CEILING {
            return Ok(BrjunoValue {
                value,
                terms_used: k,
                tail_bound: f64::INFINITY,
                flavor: flavor.into(),
                tail_kind: TailKind::FibonacciMajorant,
                divergence_suspected: true,
            });
        }
        if let Some(bound) = certified_tail(exp, k) {
            let v = BrjunoValue {
                value,
                terms_used: k,
                tail_bound: bound,
                flavor: flavor.into(),
                tail_kind: TailKind::Certified,
                divergence_suspected: false,
            };
            if bound <= tol {
                return Ok(v);
            }
            best = Some(v);
        }
    }
    let last = exp.len() - 1;
    if exp.period().is_some() {
        if let Some(v) = best {
            return Ok(v);
        }
    }
    Ok(BrjunoValue {
        value: acc.to_f64(),
        terms_used: last,
        tail_bound: fibonacci_tail(last + 1, MAJORANT_CONSTANT),
        flavor: flavor.into(),
        tail_kind: TailKind::FibonacciMajorant,
        divergence_suspected: false,
    })
}

/// Bound for `Σ_{k>n} β_{k−1} log(1/α_k)` from a periodic tail. Gauss:
/// `β_{j+2} ≤ β_j/2` gives `Σ_{j≥n} β_j ≤ 2(β_n + β_{n+1})`; nearest
/// integer: `α̃ ≤ 1/2` gives `Σ_{j≥n} β̃_j ≤ 2β̃_n`.
fn certified_tail(exp: &CFExpansion, n: usize) -> Option<f64> {
    let log_max = exp.tail_log_bound(n)?;
    let geometric = match exp.flavor() {
        CfFlavor::Gauss => {
            if n + 1 >= exp.len() {
                return None;
            }
            2.0 * (exp.beta(n).to_f64() + exp.beta(n + 1).to_f64())
        }
        CfFlavor::NearestInteger => 2.0 * exp.beta(n).to_f64(),
    };
    // relative slack for the rounding of the f64 conversions
    Some(log_max * geometric * (1.0 + 1e-12))
}

/// `Φ_trunc(p/q)` over the Euclidean expansion.
pub fn phi_trunc(r: &Rational) -> f64 {
    phi_trunc_both(r).0
}

/// `Φ_trunc` evaluated over each of the two finite expansions.
pub fn phi_trunc_both(r: &Rational) -> (f64, f64) {
    let (a, b) = cf::rational_expansions(r);
    (truncated(&a), truncated(&b))
}

fn truncated(exp: &CFExpansion) -> f64 {
    let n0 = exp.terminated().expect("finite expansion");
    let mut acc = Float::with_val(exp.precision() + 32, 0);
    for k in 0..n0 {
        acc += summand(exp, k);
    }
    acc.to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn golden_partial_sums() {
        let g = golden();
        let e = cf::expand_gauss(&AlphaSpec::golden(), 10).unwrap();
        let want = (1.0 / g).ln() * (1.0 + g + g * g);
        assert!((phi_partial(&e, 2).unwrap() - want).abs() < 1e-15);
        assert!((phi_partial(&e, 0).unwrap() - (1.0 / g).ln()).abs() < 1e-15);

        let s = 2f64.sqrt() - 1.0;
        let e = cf::expand_gauss(&AlphaSpec::silver(), 10).unwrap();
        let want = (1.0 / s).ln() * (1.0 + s);
        assert!((phi_partial(&e, 1).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn closed_forms() {
        let g = golden();
        let v = phi(&AlphaSpec::golden(), 1e-12).unwrap();
        let want = (1.0 / g).ln() / (1.0 - g);
        assert!((v.value - want).abs() <= v.tail_bound + 1e-12);
        assert_eq!(v.tail_kind, TailKind::Certified);
        assert!((v.value - 1.2598).abs() < 1e-4);

        let v = phi(&AlphaSpec::silver(), 1e-12).unwrap();
        let want = (1.0 + 2f64.sqrt()).ln() / (2.0 - 2f64.sqrt());
        assert!((v.value - want).abs() <= v.tail_bound + 1e-12);
    }

    #[test]
    fn tolerance_contract() {
        let a = phi(&AlphaSpec::golden(), 1e-6).unwrap();
        let b = phi(&AlphaSpec::golden(), 1e-10).unwrap();
        assert!(a.tail_bound <= 1e-6 && b.tail_bound <= 1e-10);
        assert!((a.value - b.value).abs() <= 1e-6);
        assert!(b.terms_used >= a.terms_used);
    }

    #[test]
    fn rational_input_is_rejected() {
        let r = AlphaSpec::rational(1, 3).unwrap();
        assert_eq!(phi(&r, 1e-8), Err(Error::RationalInput));
        let e = cf::expand_gauss(&r, 4).unwrap();
        assert_eq!(phi_partial(&e, 1), Err(Error::RationalInput));
    }

    #[test]
    fn truncated_sums() {
        assert_eq!(phi_trunc(&Rational::zero()), 0.0);
        assert!((phi_trunc(&Rational::new(1, 2).unwrap()) - 2f64.ln()).abs() < 1e-15);
        let (a, b) = phi_trunc_both(&Rational::new(3, 7).unwrap());
        let want = (7.0f64 / 3.0).ln() + 3.0 / 7.0 * 3f64.ln();
        assert!((a - want).abs() < 1e-15);
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn nearest_integer_constant_surds() {
        // α̃_n = g² for α = g and = √2 − 1 for the silver mean
        let g2 = golden() * golden();
        let v = phi_tilde(&AlphaSpec::golden(), 1e-12).unwrap();
        let want = (1.0 / g2).ln() / (1.0 - g2);
        assert!((v.value - want).abs() <= v.tail_bound + 1e-12);

        let s = 2f64.sqrt() - 1.0;
        let v = phi_tilde(&AlphaSpec::silver(), 1e-12).unwrap();
        assert!((v.value - (1.0 / s).ln() / (1.0 - s)).abs() <= v.tail_bound + 1e-12);

        let mirrored = AlphaSpec::periodic(&[0, 2], &[1]).unwrap();
        let w = phi_tilde(&mirrored, 1e-12).unwrap();
        let gv = phi_tilde(&AlphaSpec::golden(), 1e-12).unwrap();
        assert!((w.value - gv.value).abs() <= gv.tail_bound + w.tail_bound);
    }

    #[test]
    fn fibonacci_majorant() {
        let t3 = fibonacci_tail(3, 1.0);
        // direct summation oracle over F_4 = 5, F_5 = 8, …
        let mut fib = vec![1f64, 1.0];
        while fib.len() < 1400 {
            let n = fib.len();
            fib.push(fib[n - 1] + fib[n - 2]);
        }
        let direct: f64 = fib[4..].iter().map(|f| f.ln() / f).sum();
        assert!((t3 - direct).abs() < 1e-12, "{t3} {direct}");
        assert!(fibonacci_tail(4, 1.0) < t3);
        assert!(fibonacci_tail(40, 1.0) < 1e-5);
    }

    #[test]
    fn digit_prefixes_use_the_majorant() {
        let spec = AlphaSpec::digits(&[0, 2, 4, 16, 256], false).unwrap();
        let v = brjuno_sum(&spec, CfFlavor::Gauss, 1e-8, 128).unwrap();
        assert_eq!(v.tail_kind, TailKind::FibonacciMajorant);
        assert_eq!(v.terms_used, 3);
        assert!(phi(&spec, 1e-8).is_err());
    }
}
