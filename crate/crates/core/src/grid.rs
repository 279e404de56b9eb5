//! Sample grids of rotation numbers for sweeps.

use rug::Integer;

use crate::cf::{self, AlphaSpec, Rational};
use crate::error::{Error, Result};

/// Reduced fractions `p/q` with `q ≤ max_q` in `[lo, hi]`, increasing.
pub fn farey(max_q: u64, lo: &Rational, hi: &Rational) -> Result<Vec<Rational>> {
    if max_q == 0 {
        return Err(Error::InvalidArgument("max_q must be positive".into()));
    }
    if lo.as_big() > hi.as_big() {
        return Err(Error::InvalidArgument(format!("empty range [{lo}, {hi}]")));
    }
    let mut out = Vec::new();
    for q in 1..=max_q {
        let qi = rug::Integer::from(q);
        let p_min = (lo.as_big().clone() * &qi).ceil().numer().clone();
        let p_max = (hi.as_big().clone() * &qi).floor().numer().clone();
        let mut p = p_min;
        while p <= p_max {
            if p.clone().gcd(&qi) == 1 {
                out.push(Rational::from_big(rug::Rational::from((
                    p.clone(),
                    qi.clone(),
                ))));
            }
            p += 1;
        }
    }
    out.sort_by(|a, b| a.as_big().cmp(b.as_big()));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    Golden,
    Silver,
}

impl Tail {
    fn digit(self) -> i64 {
        match self {
            Tail::Golden => 1,
            Tail::Silver => 2,
        }
    }
}

/// `count` quadratic irrationals in `[lo, hi]`: the expansion of each
/// anchor `lo + (i + ½)(hi − lo)/count` continued with a constant tail.
/// On `[0, 1]` the upper half is the exact reflection `α ↦ 1 − α` of the
/// lower half.
pub fn surd_grid(count: usize, tail: Tail, lo: &Rational, hi: &Rational) -> Result<Vec<AlphaSpec>> {
    if lo.as_big() >= hi.as_big() {
        return Err(Error::InvalidArgument(format!("empty range [{lo}, {hi}]")));
    }
    let width = rug::Rational::from(hi.as_big() - lo.as_big());
    let unit = *lo.as_big() == 0 && *hi.as_big() == 1;
    let mut out: Vec<AlphaSpec> = Vec::with_capacity(count);
    for i in 0..count {
        let mirror = count - 1 - i;
        if unit && mirror < i {
            let reflected = reflect(&out[mirror])?;
            out.push(reflected);
            continue;
        }
        let offset = rug::Rational::from((2 * i as u64 + 1, 2 * count as u64)) * &width;
        let anchor = Rational::from_big(offset + lo.as_big());
        let (euclid, _) = cf::rational_expansions(&anchor);
        out.push(AlphaSpec::with_tail(euclid.digits(), &[tail.digit()])?);
    }
    Ok(out)
}

/// `1 − α` for a periodic expansion `[0; a_1, a_2, …]`:
/// `[0; 1, a_1 − 1, a_2, …]` if `a_1 ≥ 2`, else `[0; a_2 + 1, a_3, …]`.
pub fn reflect(spec: &AlphaSpec) -> Result<AlphaSpec> {
    let AlphaSpec::PeriodicCf { preperiod, period } = spec else {
        return Err(Error::InvalidArgument(
            "reflection needs a periodic expansion".into(),
        ));
    };
    if preperiod.first().is_none_or(|a0| *a0 != 0) {
        return Err(Error::InvalidArgument("reflection needs a_0 = 0".into()));
    }
    // unroll so that a_1 and a_2 are explicit
    let mut digits: Vec<Integer> = preperiod.clone();
    let mut k = 0;
    while digits.len() < 3 {
        digits.push(period[k % period.len()].clone());
        k += 1;
    }
    let rotated: Vec<Integer> = (0..period.len())
        .map(|j| period[(k + j) % period.len()].clone())
        .collect();
    let mut out = vec![Integer::new()];
    if digits[1] >= 2 {
        out.push(Integer::from(1));
        out.push(Integer::from(&digits[1] - 1u32));
        out.extend_from_slice(&digits[2..]);
    } else {
        out.push(Integer::from(&digits[2] + 1u32));
        out.extend_from_slice(&digits[3..]);
    }
    let spec = AlphaSpec::PeriodicCf {
        preperiod: out,
        period: rotated,
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn farey_five() {
        let got = farey(5, &Rational::zero(), &Rational::new(1, 1).unwrap()).unwrap();
        let text: Vec<String> = got.iter().map(|r| r.to_string()).collect();
        assert_eq!(
            text,
            ["0/1", "1/5", "1/4", "1/3", "2/5", "1/2", "3/5", "2/3", "3/4", "4/5", "1/1"]
        );
    }

    #[test]
    fn surds_stay_near_anchors() {
        let g = surd_grid(
            8,
            Tail::Silver,
            &Rational::zero(),
            &Rational::new(1, 1).unwrap(),
        )
        .unwrap();
        assert_eq!(g.len(), 8);
        for (i, a) in g.iter().enumerate() {
            let anchor = (i as f64 + 0.5) / 8.0;
            assert!(
                (a.approx_f64() - anchor).abs() < 0.05,
                "{i} {}",
                a.approx_f64()
            );
            assert!(!a.is_rational());
        }
        for i in 0..4 {
            assert!((g[i].approx_f64() + g[7 - i].approx_f64() - 1.0).abs() < 1e-15);
        }
        let h = surd_grid(
            4,
            Tail::Golden,
            &Rational::new(-1, 2).unwrap(),
            &Rational::new(1, 2).unwrap(),
        )
        .unwrap();
        assert!(h.iter().all(|a| a.approx_f64().abs() < 0.5));
    }

    #[test]
    fn reflection_of_golden_and_silver() {
        let g = reflect(&AlphaSpec::golden()).unwrap();
        assert!((g.approx_f64() - (1.0 - AlphaSpec::golden().approx_f64())).abs() < 1e-15);
        let s = AlphaSpec::silver();
        let back = reflect(&reflect(&s).unwrap()).unwrap();
        assert!((back.approx_f64() - s.approx_f64()).abs() < 1e-15);
        assert!(reflect(&AlphaSpec::rational(1, 3).unwrap()).is_err());
    }
}
