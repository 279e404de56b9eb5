//! Periodic points of `P_α`, the distances `d_n(α)`, and the cycles that
//! explode out of the parabolic point as `α` leaves `p/q`.

use num_complex::Complex64;
use rug::Rational as BigRational;

use crate::cf::{self, AlphaSpec, CfFlavor, ExpandOptions, Rational};
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::extended::ExtComplex;
use crate::precision::{BigComplex, DEFAULT_PRECISION};
use crate::series;

/// Default cap on the period: `P^{∘12} − id` has degree 4096.
pub const Q_CAP: u32 = 12;

/// Below this modulus a root is taken to be the fixed point `0`.
const ZERO_TOL: f64 = 1e-10;

/// A map `z ↦ λz + z²` with `|λ| = 1`, together with its rotation number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Parameter {
    pub alpha: f64,
    pub lambda: Complex64,
    /// `q` when `α` is exactly `p/q`.
    parabolic: Option<u32>,
}

impl Parameter {
    pub fn from_spec(x: &AlphaSpec) -> Result<Self> {
        if let Some(r) = x.as_rational() {
            return Ok(Self::near(&r, 0.0));
        }
        let exp = cf::expand(
            x,
            CfFlavor::Gauss,
            ExpandOptions {
                max_terms: 4,
                precision: DEFAULT_PRECISION,
            },
        )?;
        let lambda = BigComplex::cis_turns(exp.value()).to_c64();
        Ok(Self {
            alpha: exp.value().to_f64(),
            lambda,
            parabolic: None,
        })
    }

    /// `α = p/q + ε`, the angle reduced exactly before rounding.
    pub fn near(pq: &Rational, eps: f64) -> Self {
        let exact = pq.offset(eps);
        let lambda = BigComplex::cis_rational(exact.as_big(), DEFAULT_PRECISION).to_c64();
        let parabolic = (eps == 0.0).then(|| u32::try_from(pq.q()).ok()).flatten();
        Self {
            alpha: exact.to_f64(),
            lambda,
            parabolic,
        }
    }

    /// Radius within which a root of `P^{∘q} − id` belongs to the origin.
    /// At `α = p/r` with `r | q` the origin has multiplicity `r + 1`, and
    /// its cluster of computed roots spreads like `ε^{1/(r+1)}`.
    fn zero_radius(&self, q: u32) -> f64 {
        match self.parabolic {
            Some(r) if q.is_multiple_of(r) => {
                ZERO_TOL.max(10.0 * f64::EPSILON.powf(1.0 / (r + 1) as f64))
            }
            _ => ZERO_TOL,
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.lambda * z + z * z
    }

    /// `(P^{∘k}(z), (P^{∘k})'(z))` in extended range.
    pub fn iterate(&self, z: ExtComplex, k: u32) -> (ExtComplex, ExtComplex) {
        let lambda = ExtComplex::from_c64(self.lambda);
        let mut w = z;
        let mut dw = ExtComplex::one();
        for _ in 0..k {
            dw = dw * (lambda + w + w);
            w = (lambda + w) * w;
        }
        (w, dw)
    }

    pub fn iterate_c64(&self, z: Complex64, k: u32) -> (Complex64, Complex64) {
        let mut w = z;
        let mut dw = Complex64::new(1.0, 0.0);
        for _ in 0..k {
            dw *= self.lambda + 2.0 * w;
            w = (self.lambda + w) * w;
        }
        (w, dw)
    }

    /// Newton step for `g(z) = (P^{∘k}(z) − z)/z`, whose roots are the
    /// nonzero periodic points of period dividing `k`:
    /// `g/g' = (f − z) z / ((f' − 1) z − (f − z))`.
    fn deflated_newton(&self, z: Complex64, k: u32) -> Complex64 {
        let ze = ExtComplex::from_c64(z);
        let (f, df) = self.iterate(ze, k);
        let fz = f - ze;
        let den = (df - ExtComplex::one()) * ze - fz;
        if den.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        (fz * ze / den).to_c64()
    }

    /// Newton step for `P^{∘k}(z) − z`.
    fn plain_newton(&self, z: Complex64, k: u32) -> Complex64 {
        let ze = ExtComplex::from_c64(z);
        let (f, df) = self.iterate(ze, k);
        let den = df - ExtComplex::one();
        if den.is_zero() {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        ((f - ze) / den).to_c64()
    }
}

// ------------------------------------------------------------ root finding

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    pub max_iterations: usize,
    /// Relative step size at which a root counts as converged.
    pub tolerance: f64,
    pub exec: ExecMode,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            tolerance: 1e-14,
            exec: ExecMode::default(),
        }
    }
}

/// All roots of `(P^{∘q}(z) − z)/z`, degree `2^q − 1`.
#[derive(Clone, Debug)]
pub struct IterateRoots {
    pub q: u32,
    pub roots: Vec<Complex64>,
    /// Indices of roots whose Aberth iteration did not settle.
    pub unconverged: Vec<usize>,
    pub iterations: usize,
}

/// Simultaneous (Aberth–Ehrlich) iteration for the nonzero periodic points
/// of period dividing `q`, evaluated through the composed map, followed by
/// Newton polishing.
pub fn roots_of_iterate(param: &Parameter, q: u32, opts: RootOptions) -> Result<IterateRoots> {
    if q == 0 || q > 30 {
        return Err(Error::InvalidArgument(format!("period {q} out of range")));
    }
    let n = (1usize << q) - 1;
    let mut z = backward_tree(param, q);
    let mut done = vec![false; n];
    let mut iterations = 0;
    while iterations < opts.max_iterations && done.iter().any(|d| !d) {
        iterations += 1;
        let snapshot = z.clone();
        let updates = opts.exec.map_range(n, |i| {
            if done[i] {
                return None;
            }
            let zi = snapshot[i];
            let ratio = param.deflated_newton(zi, q);
            let mut s = Complex64::new(0.0, 0.0);
            for (j, zj) in snapshot.iter().enumerate() {
                if j != i {
                    s += (zi - zj).inv();
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            Some(if w.is_finite() { w } else { ratio })
        });
        for (i, u) in updates.into_iter().enumerate() {
            if let Some(w) = u {
                z[i] -= w;
                if w.norm() <= opts.tolerance * z[i].norm().max(1e-3) {
                    done[i] = true;
                }
            }
        }
    }
    let unconverged: Vec<usize> = (0..n).filter(|&i| !done[i]).collect();
    let z = opts.exec.map(&z, |&zi| polish(param, zi, q));
    Ok(IterateRoots {
        q,
        roots: z,
        unconverged,
        iterations,
    })
}

/// `P^{−q}(−1)` minus its point nearest the origin. `−1` maps to the
/// fixed point `1 − λ`, so these lie on the Julia set and each sits close
/// to a repelling point of period dividing `q`.
fn backward_tree(param: &Parameter, q: u32) -> Vec<Complex64> {
    let lambda = param.lambda;
    let disc0 = lambda * lambda;
    let mut level = vec![Complex64::new(-1.0, 0.0)];
    for _ in 0..q {
        level = level
            .iter()
            .flat_map(|&w| {
                let r = (disc0 + 4.0 * w).sqrt();
                [(-lambda + r) / 2.0, (-lambda - r) / 2.0]
            })
            .collect();
    }
    let nearest = (0..level.len())
        .min_by(|&i, &j| level[i].norm().total_cmp(&level[j].norm()))
        .expect("nonempty");
    level.swap_remove(nearest);
    level
}

fn polish(param: &Parameter, mut z: Complex64, q: u32) -> Complex64 {
    for _ in 0..4 {
        if z.norm() < ZERO_TOL {
            break;
        }
        let step = param.deflated_newton(z, q);
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 1e-17 * z.norm() {
            break;
        }
    }
    z
}

fn divisors(q: u32) -> Vec<u32> {
    (1..=q).filter(|d| q.is_multiple_of(*d)).collect()
}

/// Smallest `d | q` for which `z` is a fixed point of `P^{∘d}`, judged by
/// the Newton step size.
fn exact_period(param: &Parameter, z: Complex64, q: u32) -> u32 {
    let scale = z.norm().max(1.0);
    for d in divisors(q) {
        if d == q {
            return q;
        }
        let step = param.plain_newton(z, d);
        if step.norm() <= 1e-9 * scale {
            return d;
        }
    }
    q
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicPoint {
    pub z: Complex64,
    pub exact_period: u32,
    /// `(P^{∘exact_period})'(z)`.
    pub multiplier: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CycleLabel {
    /// Every nonzero point of exact period `q`.
    ExactPeriod(u32),
    /// `X_n(α)`: nonzero periodic points of period at most `q_n`.
    X { n: usize, q_n: u64 },
    /// The cycle `C_{p/q}(α)` born from the origin.
    Explosion { pq: Rational },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleSet {
    pub points: Vec<PeriodicPoint>,
    pub label: CycleLabel,
    /// `min |z|` over the points (0 for the degenerate set `{0}`).
    pub d: f64,
}

impl CycleSet {
    fn new(points: Vec<PeriodicPoint>, label: CycleLabel) -> Self {
        let d = points
            .iter()
            .map(|p| p.z.norm())
            .fold(f64::INFINITY, f64::min);
        Self { points, label, d }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Two roots closer than `1e-8` times the distance to their next neighbour.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Collision {
    pub q: u32,
    pub i: usize,
    pub j: usize,
    pub distance: f64,
}

#[derive(Clone, Debug)]
pub struct PeriodicPoints {
    /// One set per exact period `1..=q_max`.
    pub sets: Vec<CycleSet>,
    /// For each computed `q`: number of roots of `P^{∘q} − id` counted with
    /// multiplicity per exact period `d | q`, with `0` under key `0`.
    pub bookkeeping: Vec<(u32, Vec<(u32, usize)>)>,
    pub collisions: Vec<Collision>,
    pub unconverged: usize,
}

impl PeriodicPoints {
    pub fn exact(&self, q: u32) -> &CycleSet {
        &self.sets[q as usize - 1]
    }

    /// `X` for periods up to `q`, labelled with the index `n`.
    pub fn up_to(&self, q: u32, n: usize) -> CycleSet {
        let points = self.sets[..q as usize]
            .iter()
            .flat_map(|s| s.points.iter().copied())
            .collect();
        CycleSet::new(points, CycleLabel::X { n, q_n: q as u64 })
    }

    pub fn distance_up_to(&self, q: u32) -> f64 {
        self.sets[..q as usize]
            .iter()
            .map(|s| s.d)
            .fold(f64::INFINITY, f64::min)
    }
}

fn find_collisions(roots: &[Complex64], q: u32, exec: ExecMode) -> Vec<Collision> {
    let found = exec.map_range(roots.len(), |i| {
        let mut best = (f64::INFINITY, usize::MAX);
        let mut second = f64::INFINITY;
        for (j, zj) in roots.iter().enumerate() {
            if j == i {
                continue;
            }
            let d = (roots[i] - zj).norm();
            if d < best.0 {
                second = best.0;
                best = (d, j);
            } else if d < second {
                second = d;
            }
        }
        (best.1 > i && best.0 <= 1e-8 * second).then_some(Collision {
            q,
            i,
            j: best.1,
            distance: best.0,
        })
    });
    found.into_iter().flatten().collect()
}

/// Nonzero periodic points of every period `≤ q_max`, each root of
/// `P^{∘q} − id` assigned its exact period.
pub fn periodic_points(param: &Parameter, q_max: u32, cap: u32) -> Result<PeriodicPoints> {
    periodic_points_with(param, q_max, cap, RootOptions::default())
}

pub fn periodic_points_with(
    param: &Parameter,
    q_max: u32,
    cap: u32,
    opts: RootOptions,
) -> Result<PeriodicPoints> {
    if q_max == 0 {
        return Err(Error::InvalidArgument("q_max must be positive".into()));
    }
    if q_max > cap {
        return Err(Error::QCapExceeded {
            q: q_max as u64,
            cap,
        });
    }
    // only periods that divide no larger period ≤ q_max need their own solve
    let maximal: Vec<u32> = (1..=q_max)
        .rev()
        .filter(|&q| !(q + 1..=q_max).any(|m| m % q == 0))
        .collect();
    let mut buckets: Vec<Option<Vec<PeriodicPoint>>> = vec![None; q_max as usize];
    let mut bookkeeping = Vec::new();
    let mut collisions = Vec::new();
    let mut unconverged = 0;
    for &q in &maximal {
        let roots = roots_of_iterate(param, q, opts)?;
        unconverged += roots.unconverged.len();
        collisions.extend(find_collisions(&roots.roots, q, opts.exec));
        let periods = opts.exec.map(&roots.roots, |&z| {
            if z.norm() < param.zero_radius(q) {
                0
            } else {
                exact_period(param, z, q)
            }
        });
        let mut counts: Vec<(u32, usize)> = std::iter::once(0)
            .chain(divisors(q))
            .map(|d| (d, 0))
            .collect();
        // the deflated root at 0
        counts[0].1 += 1;
        let mut fresh: Vec<Vec<PeriodicPoint>> = vec![Vec::new(); q as usize];
        for (&z, &d) in roots.roots.iter().zip(&periods) {
            let slot = counts.iter_mut().find(|c| c.0 == d).expect("divisor");
            slot.1 += 1;
            if d == 0 {
                continue;
            }
            let (_, mult) = param.iterate_c64(z, d);
            fresh[d as usize - 1].push(PeriodicPoint {
                z,
                exact_period: d,
                multiplier: mult,
            });
        }
        for (k, pts) in fresh.into_iter().enumerate() {
            if q % (k as u32 + 1) == 0 && buckets[k].is_none() {
                buckets[k] = Some(pts);
            }
        }
        bookkeeping.push((q, counts));
    }
    let sets = buckets
        .into_iter()
        .enumerate()
        .map(|(k, pts)| {
            CycleSet::new(
                pts.expect("every period divides a maximal one"),
                CycleLabel::ExactPeriod(k as u32 + 1),
            )
        })
        .collect();
    bookkeeping.sort_by_key(|b| b.0);
    Ok(PeriodicPoints {
        sets,
        bookkeeping,
        collisions,
        unconverged,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceEntry {
    pub n: usize,
    pub q_n: u64,
    pub d_n: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceSequence {
    pub entries: Vec<DistanceEntry>,
    /// Set when `n_max` was not reached because `q_{n+1}` exceeds the cap.
    pub truncated: bool,
}

/// `d_n(α) = d(0, X_n(α))` for `n ≤ n_max` while `q_n ≤ cap`.
pub fn distance_sequence(x: &AlphaSpec, n_max: usize, cap: u32) -> Result<DistanceSequence> {
    let exp = cf::expand(
        x,
        CfFlavor::Gauss,
        ExpandOptions {
            max_terms: n_max,
            precision: DEFAULT_PRECISION,
        },
    )?;
    if exp.terminated().is_some() {
        return Err(Error::RationalInput);
    }
    let mut qs = Vec::new();
    let mut truncated = false;
    for n in 0..=n_max {
        if n >= exp.denominators().len() {
            truncated = true;
            break;
        }
        let qn = &exp.denominators()[n];
        if *qn > cap {
            truncated = true;
            break;
        }
        qs.push((n, qn.to_u64().expect("small")));
    }
    let Some(&(_, q_last)) = qs.last() else {
        return Ok(DistanceSequence {
            entries: Vec::new(),
            truncated,
        });
    };
    let param = Parameter::from_spec(x)?;
    let pts = periodic_points(&param, q_last as u32, cap)?;
    let entries = qs
        .into_iter()
        .map(|(n, q_n)| DistanceEntry {
            n,
            q_n,
            d_n: pts.distance_up_to(q_n as u32),
        })
        .collect();
    Ok(DistanceSequence { entries, truncated })
}

// ------------------------------------------------------ parabolic explosion

/// One point of the cycle `C_{p/q}(p/q + ε)` by continuation in `ε`.
fn track_cycle_point(pq: &Rational, eps: f64, a: Complex64) -> Result<Complex64> {
    let q = pq.q() as u32;
    let seed = |e: f64| -> Complex64 {
        let t = Complex64::new(0.0, std::f64::consts::TAU * q as f64 * e);
        // (1 − e^{2iπqε})/A
        let num = -(t.exp() - 1.0);
        (num / a).powf(1.0 / q as f64)
    };
    let start = eps.signum() * eps.abs().min(1e-8);
    let mut e = start;
    let mut z = seed(e);
    loop {
        let param = Parameter::near(pq, e);
        z = newton_deflated(&param, z, q)?;
        if e == eps {
            return Ok(z);
        }
        let next = if (e * 2.0).abs() >= eps.abs() {
            eps
        } else {
            e * 2.0
        };
        z *= (next / e).powf(1.0 / q as f64);
        e = next;
    }
}

/// Near the parabolic point `g` loses about `q log10(1/|z|)` digits to
/// cancellation, so a step that stops shrinking while already small is
/// accepted as the rounding floor.
fn newton_deflated(param: &Parameter, mut z: Complex64, q: u32) -> Result<Complex64> {
    let scale = z.norm();
    let mut prev = f64::INFINITY;
    for _ in 0..100 {
        let step = param.deflated_newton(z, q);
        if !step.is_finite() || step.norm() > 10.0 * scale.max(1e-300) {
            return Err(Error::NewtonDivergence(format!("step {step} from {z}")));
        }
        let size = step.norm();
        if size >= 0.5 * prev && size <= 1e-6 * z.norm() {
            return Ok(z);
        }
        z -= step;
        if size <= 1e-15 * z.norm() {
            return Ok(z);
        }
        prev = size;
    }
    Err(Error::NewtonDivergence(format!(
        "no convergence after 100 steps near {z}"
    )))
}

/// The `q`-cycle of `P_{p/q+ε}` born from the parabolic point; `{0}` at
/// `ε = 0`. Requires `|ε| < 1/q³`.
pub fn explosion_cycle(pq: &Rational, eps: f64) -> Result<CycleSet> {
    let q = pq.q();
    let label = CycleLabel::Explosion { pq: pq.clone() };
    if eps == 0.0 {
        let origin = PeriodicPoint {
            z: Complex64::new(0.0, 0.0),
            exact_period: 1,
            multiplier: Parameter::near(pq, 0.0).lambda,
        };
        return Ok(CycleSet::new(vec![origin], label));
    }
    let bound = 1.0 / (q as f64).powi(3);
    if !eps.is_finite() || eps.abs() >= bound {
        return Err(Error::OutsideExplosionDisk { eps, bound });
    }
    let data = series::parabolic_coefficient_escalating(pq, DEFAULT_PRECISION)?;
    let z0 = track_cycle_point(pq, eps, data.a.to_c64())?;
    let param = Parameter::near(pq, eps);
    let qq = q as u32;
    let mut points = Vec::with_capacity(q as usize);
    let mut z = z0;
    for _ in 0..q {
        let z_ref = newton_deflated(&param, z, qq)?;
        let (_, mult) = param.iterate_c64(z_ref, qq);
        points.push(PeriodicPoint {
            z: z_ref,
            exact_period: qq,
            multiplier: mult,
        });
        z = param.eval(z_ref);
    }
    // a single orbit of exact period q
    let closes = (z - z0).norm() <= 1e-9 * z0.norm();
    let mut min_gap = f64::INFINITY;
    for i in 0..points.len() {
        for j in 0..i {
            min_gap = min_gap.min((points[i].z - points[j].z).norm());
        }
    }
    if !closes || (q > 1 && min_gap <= 1e-6 * z0.norm()) {
        return Err(Error::NewtonDivergence(
            "continuation did not land on a q-cycle".into(),
        ));
    }
    Ok(CycleSet::new(points, label))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZEpsilonCheck {
    /// `log|z_ε| + β'_{n₀−1} log(1/α'_{n₀})`.
    pub lhs: f64,
    /// `log L_a(p/q) + log(2π)/q`.
    pub rhs: f64,
    pub gap: f64,
    /// Index with `p'_{n₀}/q'_{n₀} = p/q` in the expansion of `p/q + ε`.
    pub n0: usize,
    pub z: Complex64,
}

pub fn z_epsilon_check(pq: &Rational, eps: f64) -> Result<ZEpsilonCheck> {
    if eps == 0.0 {
        return Err(Error::InvalidArgument("eps must be nonzero".into()));
    }
    let cycle = explosion_cycle(pq, eps)?;
    let z = cycle
        .points
        .iter()
        .min_by(|a, b| a.z.norm().total_cmp(&b.z.norm()))
        .expect("nonempty")
        .z;
    let shifted = pq.offset(eps);
    let spec = AlphaSpec::Rational(shifted);
    let exp = cf::expand(
        &spec,
        CfFlavor::Gauss,
        ExpandOptions {
            max_terms: 4 * (pq.q() as usize + 8),
            precision: DEFAULT_PRECISION,
        },
    )?;
    let target = pq.as_big();
    let n0 = (0..exp.len())
        .find(|&n| {
            let (p, q) = exp.convergent(n);
            BigRational::from((p.clone(), q.clone())) == *target
        })
        .ok_or_else(|| {
            Error::InvalidArgument(format!("{pq} is not a convergent of {pq} + {eps}"))
        })?;
    if n0 + 1 > exp.len() || exp.alpha(n0).is_zero() {
        return Err(Error::InvalidArgument("offset too large".into()));
    }
    let beta_prev = exp.beta_before(n0).to_f64();
    let log_alpha = exp.alpha(n0).clone().ln().to_f64();
    let lhs = z.norm().ln() - beta_prev * log_alpha;
    let data = series::parabolic_coefficient_escalating(pq, DEFAULT_PRECISION)?;
    let rhs = data.log_la + std::f64::consts::TAU.ln() / pq.q() as f64;
    Ok(ZEpsilonCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
        n0,
        z,
    })
}

/// `max |R_ε(w)|` over the samples, where
/// `Q_ε^{∘q}(w) = w + 2iπqε w(1 − w^q) + εR_ε(w)` and
/// `Q_ε(w) = P_{p/q+ε}(z_ε w)/z_ε`.
pub fn rescaled_map_residual(pq: &Rational, eps: f64, samples: &[Complex64]) -> Result<f64> {
    if eps == 0.0 {
        return Err(Error::InvalidArgument("eps must be nonzero".into()));
    }
    let check = z_epsilon_check(pq, eps)?;
    let z_eps = check.z;
    let param = Parameter::near(pq, eps);
    let q = pq.q() as u32;
    let mut worst: f64 = 0.0;
    for &w in samples {
        let mut v = w;
        for _ in 0..q {
            v = param.eval(z_eps * v) / z_eps;
        }
        let field =
            Complex64::new(0.0, std::f64::consts::TAU * q as f64 * eps) * w * (1.0 - w.powu(q));
        let r = (v - w - field).norm() / eps.abs();
        worst = worst.max(r);
    }
    Ok(worst)
}
