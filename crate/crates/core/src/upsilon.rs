//! The extension `Υ`: rational formula, Brjuno series, and the `d_n`
//! sequence for inputs whose Brjuno sum cannot be certified.

use rug::Integer;

use crate::brjuno::{self, fibonacci_tail, BrjunoValue};
use crate::cf::{self, AlphaSpec, CfFlavor, ExpandOptions, Rational};
use crate::dynamics::{self, Q_CAP};
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::linearization::{self, LinearizeOptions, RadiusEstimate};
use crate::series;

/// Constant in the essential-monotonicity bound
/// `u_{n+1} − u_n ≤ C log(q_{n+1})/q_{n+1}`.
pub const MONOTONICITY_CONSTANT: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    RationalFormula,
    BrjunoSeries,
    CremerSequence,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::RationalFormula => "rational_formula",
            Method::BrjunoSeries => "brjuno_series",
            Method::CremerSequence => "cremer_sequence",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CremerTerm {
    pub n: usize,
    pub q_n: u64,
    pub phi_n: f64,
    pub d_n: f64,
    /// `Φ_n + log d_n`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum UpsilonDiagnostics {
    Rational {
        phi_trunc: f64,
        log_la: f64,
        residual: f64,
        precision: u32,
    },
    Brjuno {
        phi: f64,
        phi_tail: f64,
        radius: RadiusEstimate,
    },
    Cremer {
        /// The computed prefix; `d_n` stands in for the conformal radius of
        /// `ℂ ∖ X_n`.
        sequence: Vec<CremerTerm>,
        truncated: bool,
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct UpsilonValue {
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
    pub diagnostics: UpsilonDiagnostics,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    /// Order of the linearizing series.
    pub series_n: usize,
    pub tol: f64,
    /// Largest continued-fraction index for the `d_n` route.
    pub n_max: usize,
    pub q_cap: u32,
    pub precision_bits: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            series_n: 4096,
            tol: 1e-8,
            n_max: 64,
            q_cap: Q_CAP,
            precision_bits: 128,
        }
    }
}

/// `Υ(p/q) = Φ_trunc(p/q) + log L_a(p/q) + log(2π)/q`.
pub fn upsilon_rational(pq: &Rational) -> Result<UpsilonValue> {
    upsilon_rational_with(pq, crate::precision::DEFAULT_PRECISION)
}

pub fn upsilon_rational_with(pq: &Rational, prec: u32) -> Result<UpsilonValue> {
    let phi_trunc = brjuno::phi_trunc(pq);
    let data = series::parabolic_coefficient_escalating(pq, prec)?;
    let q = pq.q() as f64;
    Ok(UpsilonValue {
        value: phi_trunc + data.log_la + std::f64::consts::TAU.ln() / q,
        method: Method::RationalFormula,
        error_estimate: data.residual,
        diagnostics: UpsilonDiagnostics::Rational {
            phi_trunc,
            log_la: data.log_la,
            residual: data.residual,
            precision: data.precision,
        },
    })
}

/// `Υ` by dispatch: the rational formula, the Brjuno series when `Φ`
/// converges within `tol`, and otherwise the last term of `Φ_n + log d_n`.
pub fn upsilon(x: &AlphaSpec, budget: &Budget) -> Result<UpsilonValue> {
    if let Some(r) = x.as_rational() {
        return upsilon_rational_with(&r, budget.precision_bits);
    }
    let phi = brjuno::brjuno_sum(x, CfFlavor::Gauss, budget.tol, budget.precision_bits)?;
    if phi.converged(budget.tol) {
        return brjuno_route(x, &phi, budget);
    }
    let reason = if phi.divergence_suspected {
        format!(
            "partial sum exceeded {} nats at n = {}",
            brjuno::DIVERGENCE_CEILING,
            phi.terms_used
        )
    } else {
        format!(
            "tail bound {:e} above tolerance {:e} after {} terms",
            phi.tail_bound,
            budget.tol,
            phi.terms_used + 1
        )
    };
    cremer_route(x, budget, reason)
}

/// `Φ̃(α) + log r(α)`, the nearest-integer counterpart of the Brjuno route;
/// defined only where `Φ̃` converges within `tol`.
pub fn upsilon_tilde(x: &AlphaSpec, budget: &Budget) -> Result<UpsilonValue> {
    if x.is_rational() {
        return Err(Error::RationalInput);
    }
    let phi = brjuno::brjuno_sum(
        x,
        CfFlavor::NearestInteger,
        budget.tol,
        budget.precision_bits,
    )?;
    if !phi.converged(budget.tol) {
        return Err(Error::BudgetExhausted(format!(
            "nearest-integer tail bound {:e} above tolerance {:e}",
            phi.tail_bound, budget.tol
        )));
    }
    brjuno_route(x, &phi, budget)
}

fn brjuno_route(x: &AlphaSpec, phi: &BrjunoValue, budget: &Budget) -> Result<UpsilonValue> {
    let opts = LinearizeOptions {
        precision: budget.precision_bits.max(linearization::DIVISOR_PRECISION),
        ..Default::default()
    };
    linearization::upsilon_from_phi(x, phi, budget.series_n, opts)
}

fn cremer_route(x: &AlphaSpec, budget: &Budget, reason: String) -> Result<UpsilonValue> {
    let seq = cremer_sequence(x, budget.n_max, budget.q_cap)?;
    let Some(last) = seq.terms.last().copied() else {
        return Err(Error::BudgetExhausted(format!(
            "{reason}; no d_n computable with q_n <= {}",
            budget.q_cap
        )));
    };
    Ok(UpsilonValue {
        value: last.value,
        method: Method::CremerSequence,
        error_estimate: fibonacci_tail(last.n, MONOTONICITY_CONSTANT),
        diagnostics: UpsilonDiagnostics::Cremer {
            sequence: seq.terms,
            truncated: seq.truncated,
            reason,
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CremerSequence {
    pub terms: Vec<CremerTerm>,
    pub truncated: bool,
}

/// `Φ_n(α) + log d_n(α)` for `n ≤ n_max` with `q_n ≤ cap`.
pub fn cremer_sequence(x: &AlphaSpec, n_max: usize, cap: u32) -> Result<CremerSequence> {
    if x.is_rational() {
        return Err(Error::RationalInput);
    }
    let exp = cf::expand(
        x,
        CfFlavor::Gauss,
        ExpandOptions {
            max_terms: n_max,
            ..Default::default()
        },
    )?;
    let certified = exp.len();
    if certified == 0 {
        return Err(Error::PrecisionExhausted { certified: 0 });
    }
    let limit = n_max.min(certified - 1);
    let dist = dynamics::distance_sequence(x, limit, cap)?;
    let phis = brjuno::partial_sums(&exp, limit)?;
    let terms = dist
        .entries
        .iter()
        .map(|e| CremerTerm {
            n: e.n,
            q_n: e.q_n,
            phi_n: phis[e.n],
            d_n: e.d_n,
            value: phis[e.n] + e.d_n.ln(),
        })
        .collect();
    Ok(CremerSequence {
        terms,
        truncated: dist.truncated || limit < n_max,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbePoint {
    pub alpha: AlphaSpec,
    pub upsilon: Result<UpsilonValue>,
    /// `|Υ(α′) − Υ(target)|`, absent if either failed.
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeResult {
    pub target: Result<UpsilonValue>,
    pub points: Vec<ProbePoint>,
}

/// `Υ` along an approach sequence and at the target; entries evaluate in
/// parallel and come back in input order.
pub fn continuity_probe(
    target: &AlphaSpec,
    approach: &[AlphaSpec],
    budget: &Budget,
    exec: ExecMode,
) -> ProbeResult {
    let target_value = upsilon(target, budget);
    let values = exec.map(approach, |a| upsilon(a, budget));
    let points = approach
        .iter()
        .zip(values)
        .map(|(a, v)| {
            let delta = match (&v, &target_value) {
                (Ok(x), Ok(t)) => Some((x.value - t.value).abs()),
                _ => None,
            };
            ProbePoint {
                alpha: a.clone(),
                upsilon: v,
                delta,
            }
        })
        .collect();
    ProbeResult {
        target: target_value,
        points,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Through the Euclidean expansion of `p/q`.
    Euclid,
    /// Through the expansion ending in `…, a_m − 1, 1`.
    Variant,
}

/// `[a_0; a_1, …, a_m, k, 1, 1, …]` for each `k`, using the chosen
/// expansion of `p/q`; these tend to `p/q` as `k → ∞`.
pub fn rational_approach(pq: &Rational, ks: &[u64], side: Side) -> Vec<AlphaSpec> {
    let (euclid, variant) = cf::rational_expansions(pq);
    let digits = match side {
        Side::Euclid => euclid.digits().to_vec(),
        Side::Variant => variant.digits().to_vec(),
    };
    ks.iter()
        .map(|&k| {
            let mut prefix = digits.clone();
            prefix.push(Integer::from(k));
            AlphaSpec::with_tail(&prefix, &[1]).expect("valid digits")
        })
        .collect()
}

/// Truncations of `x`'s expansion after `depth` digits, continued with the
/// silver tail `[2, 2, …]`.
pub fn irrational_approach(x: &AlphaSpec, depths: &[usize]) -> Result<Vec<AlphaSpec>> {
    let deepest = depths.iter().copied().max().unwrap_or(0);
    let exp = cf::expand(
        x,
        CfFlavor::Gauss,
        ExpandOptions {
            max_terms: deepest,
            ..Default::default()
        },
    )?;
    if exp.terminated().is_some() {
        return Err(Error::RationalInput);
    }
    depths
        .iter()
        .map(|&d| {
            if d + 1 > exp.digits().len() {
                return Err(Error::PrecisionExhausted {
                    certified: exp.digits().len(),
                });
            }
            AlphaSpec::with_tail(&exp.digits()[..=d], &[2])
        })
        .collect()
}

/// Default probe generator: rationals are approached from the Euclidean
/// side with `k = 2, 4, 8, …`, irrationals by truncations at depths
/// `1, 2, 3, …`.
pub fn default_approach(target: &AlphaSpec, count: usize) -> Result<Vec<AlphaSpec>> {
    if let Some(r) = target.as_rational() {
        let ks: Vec<u64> = (1..=count as u32).map(|j| 1u64 << j).collect();
        Ok(rational_approach(&r, &ks, Side::Euclid))
    } else {
        let depths: Vec<usize> = (1..=count).collect();
        irrational_approach(target, &depths)
    }
}
