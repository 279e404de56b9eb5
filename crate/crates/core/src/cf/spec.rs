//! Exact descriptions of real numbers and their text grammar.
//!
//! ```text
//! p/q                      a rational in lowest terms after normalisation
//! cf:[a0;a1,...,ak]        a finite continued fraction (a rational)
//! cf:[a0;a1,...,ak,...]    the first digits of an unspecified irrational
//! pcf:[a0;b1,...|c1,...]   an eventually periodic continued fraction
//! dec:0.1234@256           leading decimal digits, interval width 2^-256 floor
//! ```

use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational as BigRational};

use crate::error::{Error, Result};

/// A rational number `p/q` with `q > 0` and `gcd(|p|, q) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Self(BigRational::from((p, q))))
    }

    pub fn from_big(r: BigRational) -> Self {
        Self(r)
    }

    pub fn zero() -> Self {
        Self(BigRational::new())
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    /// Denominator as `u64`; panics only for denominators beyond 2^64.
    pub fn q(&self) -> u64 {
        self.denom()
            .to_u64()
            .expect("denominator does not fit in u64")
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn into_big(self) -> BigRational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Exact `self + x` for a binary floating-point offset.
    pub fn offset(&self, x: f64) -> Self {
        let eps = BigRational::from_f64(x).expect("finite offset");
        Self(BigRational::from(&self.0 + &eps))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s, 0);
        let r = cur.rational()?;
        cur.finish()?;
        Ok(r)
    }
}

/// An exact description of a real number. Brjuno-type quantities are
/// discontinuous in the float topology, so reals never enter as `f64`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AlphaSpec {
    Rational(Rational),
    /// `preperiod[0]` is `a_0`; the period is repeated forever.
    PeriodicCf {
        preperiod: Vec<Integer>,
        period: Vec<Integer>,
    },
    /// The literal lists the leading decimal digits of the number; the
    /// value lies in `[lit, lit + 10^-k]`, widened outward to dyadic
    /// endpoints with `precision_bits` bits.
    Decimal {
        literal: String,
        precision_bits: u32,
    },
    /// Partial quotients `a_0, a_1, …`. With `terminal` the list is a complete
    /// (rational) expansion, otherwise it is a prefix of an irrational.
    Digits {
        digits: Vec<Integer>,
        terminal: bool,
    },
}

impl AlphaSpec {
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        Ok(AlphaSpec::Rational(Rational::new(p, q)?))
    }

    pub fn periodic(preperiod: &[i64], period: &[i64]) -> Result<Self> {
        let spec = AlphaSpec::PeriodicCf {
            preperiod: preperiod.iter().map(|&a| Integer::from(a)).collect(),
            period: period.iter().map(|&a| Integer::from(a)).collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The golden mean `(√5 − 1)/2 = [0; 1, 1, …]`.
    pub fn golden() -> Self {
        Self::periodic(&[0], &[1]).expect("valid")
    }

    /// `√2 − 1 = [0; 2, 2, …]`.
    pub fn silver() -> Self {
        Self::periodic(&[0], &[2]).expect("valid")
    }

    pub fn decimal(literal: &str, precision_bits: u32) -> Result<Self> {
        let spec = AlphaSpec::Decimal {
            literal: literal.to_string(),
            precision_bits,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn digits(digits: &[i64], terminal: bool) -> Result<Self> {
        let spec = AlphaSpec::Digits {
            digits: digits.iter().map(|&a| Integer::from(a)).collect(),
            terminal,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn is_rational(&self) -> bool {
        matches!(
            self,
            AlphaSpec::Rational(_) | AlphaSpec::Digits { terminal: true, .. }
        )
    }

    /// The exact rational for rational specs.
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            AlphaSpec::Rational(r) => Some(r.clone()),
            AlphaSpec::Digits {
                digits,
                terminal: true,
            } => Some(Rational::from_big(evaluate_digits(digits))),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AlphaSpec::Rational(_) => Ok(()),
            AlphaSpec::PeriodicCf { preperiod, period } => {
                if preperiod.is_empty() {
                    return Err(Error::InvalidArgument("missing a0".into()));
                }
                if period.is_empty() {
                    return Err(Error::InvalidArgument("empty period".into()));
                }
                if preperiod[1..].iter().chain(period).any(|a| *a < 1) {
                    return Err(Error::InvalidArgument(
                        "partial quotients after a0 must be >= 1".into(),
                    ));
                }
                Ok(())
            }
            AlphaSpec::Decimal {
                literal,
                precision_bits,
            } => {
                if *precision_bits < 64 {
                    return Err(Error::InvalidArgument(
                        "decimal precision must be at least 64 bits".into(),
                    ));
                }
                parse_decimal_literal(literal, 0).map(|_| ())
            }
            AlphaSpec::Digits { digits, .. } => {
                if digits.is_empty() {
                    return Err(Error::InvalidArgument("empty digit list".into()));
                }
                if digits[1..].iter().any(|a| *a < 1) {
                    return Err(Error::InvalidArgument(
                        "partial quotients after a0 must be >= 1".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// A prefix followed by an infinitely repeated tail, e.g. a rational's
    /// digits continued by the golden tail `[1]`.
    pub fn with_tail(prefix: &[Integer], tail: &[i64]) -> Result<Self> {
        let spec = AlphaSpec::PeriodicCf {
            preperiod: prefix.to_vec(),
            period: tail.iter().map(|&a| Integer::from(a)).collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Rough value for plotting and labelling; never expanded.
    pub fn approx_f64(&self) -> f64 {
        match self {
            AlphaSpec::Rational(r) => r.to_f64(),
            AlphaSpec::PeriodicCf { preperiod, period } => {
                let mut digits = preperiod.clone();
                while digits.len() < 80 {
                    digits.extend(period.iter().cloned());
                }
                evaluate_digits(&digits).to_f64()
            }
            AlphaSpec::Decimal { literal, .. } => literal.parse().unwrap_or(f64::NAN),
            AlphaSpec::Digits { digits, .. } => evaluate_digits(digits).to_f64(),
        }
    }
}

/// `[a0; a1, …, ak]` as an exact rational.
pub fn evaluate_digits(digits: &[Integer]) -> BigRational {
    let mut iter = digits.iter().rev();
    let mut x = BigRational::from(iter.next().expect("non-empty").clone());
    for a in iter {
        x.recip_mut();
        x += a;
    }
    x
}

fn join(list: &[Integer]) -> String {
    list.iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Rational(r) => write!(f, "{r}"),
            AlphaSpec::PeriodicCf { preperiod, period } => write!(
                f,
                "pcf:[{};{}|{}]",
                preperiod[0],
                join(&preperiod[1..]),
                join(period)
            ),
            AlphaSpec::Decimal {
                literal,
                precision_bits,
            } => write!(f, "dec:{literal}@{precision_bits}"),
            AlphaSpec::Digits { digits, terminal } => {
                write!(f, "cf:[{}", digits[0])?;
                if digits.len() > 1 || !terminal {
                    write!(f, ";{}", join(&digits[1..]))?;
                }
                if !terminal {
                    if digits.len() > 1 {
                        write!(f, ",")?;
                    }
                    write!(f, "...")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl FromStr for AlphaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("pcf:") {
            let mut cur = Cursor::new(rest, 4);
            cur.expect('[')?;
            let a0 = cur.integer()?;
            cur.expect(';')?;
            let mut preperiod = vec![a0];
            preperiod.extend(cur.digit_list('|')?);
            cur.expect('|')?;
            let period = cur.digit_list(']')?;
            if period.is_empty() {
                return Err(Error::parse(cur.pos(), "empty period"));
            }
            cur.expect(']')?;
            cur.finish()?;
            return Ok(AlphaSpec::PeriodicCf { preperiod, period });
        }
        if let Some(rest) = s.strip_prefix("cf:") {
            let mut cur = Cursor::new(rest, 3);
            cur.expect('[')?;
            let a0 = cur.integer()?;
            let mut digits = vec![a0];
            let mut terminal = true;
            if cur.peek() == Some(';') {
                cur.bump();
                loop {
                    if cur.rest().starts_with("...") {
                        cur.advance(3);
                        terminal = false;
                        break;
                    }
                    if cur.peek() == Some(']') && digits.len() == 1 {
                        break;
                    }
                    digits.push(cur.positive()?);
                    if cur.peek() == Some(',') {
                        cur.bump();
                    } else {
                        break;
                    }
                }
            }
            cur.expect(']')?;
            cur.finish()?;
            return Ok(AlphaSpec::Digits { digits, terminal });
        }
        if let Some(rest) = s.strip_prefix("dec:") {
            let at = rest
                .find('@')
                .ok_or_else(|| Error::parse(4 + rest.len(), "expected '@<bits>'"))?;
            let literal = &rest[..at];
            parse_decimal_literal(literal, 4)?;
            let mut cur = Cursor::new(&rest[at + 1..], 4 + at + 1);
            let bits = cur.integer()?;
            cur.finish()?;
            let precision_bits = bits
                .to_u32()
                .filter(|b| *b >= 64)
                .ok_or_else(|| Error::parse(4 + at + 1, "precision must be an integer >= 64"))?;
            return Ok(AlphaSpec::Decimal {
                literal: literal.to_string(),
                precision_bits,
            });
        }
        let mut cur = Cursor::new(s, 0);
        let r = cur.rational()?;
        cur.finish()?;
        Ok(AlphaSpec::Rational(r))
    }
}

/// Parses `[-]int[.frac]` into `(numerator, number_of_fraction_digits)`.
pub(crate) fn parse_decimal_literal(lit: &str, offset: usize) -> Result<(Integer, u32)> {
    let bytes = lit.as_bytes();
    let mut i = 0;
    let neg = bytes.first() == Some(&b'-');
    if neg {
        i += 1;
    }
    let start = i;
    let mut digits = String::new();
    let mut frac = 0u32;
    let mut seen_dot = false;
    while i < bytes.len() {
        match bytes[i] {
            b'0'..=b'9' => {
                digits.push(bytes[i] as char);
                if seen_dot {
                    frac += 1;
                }
            }
            b'.' if !seen_dot && i > start => seen_dot = true,
            _ => {
                return Err(Error::parse(
                    offset + i,
                    "invalid character in decimal literal",
                ))
            }
        }
        i += 1;
    }
    if digits.is_empty() || (seen_dot && frac == 0) {
        return Err(Error::parse(offset + i, "expected decimal digits"));
    }
    let mut n: Integer = digits.parse().expect("digits only");
    if neg {
        n = -n;
    }
    Ok((n, frac))
}

struct Cursor<'a> {
    s: &'a str,
    i: usize,
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str, offset: usize) -> Self {
        Self { s, i: 0, offset }
    }

    fn pos(&self) -> usize {
        self.offset + self.i
    }

    fn rest(&self) -> &'a str {
        &self.s[self.i..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.i += c.len_utf8();
        }
    }

    fn advance(&mut self, n: usize) {
        self.i += n;
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(Error::parse(self.pos(), format!("expected '{c}'")))
        }
    }

    fn finish(&self) -> Result<()> {
        if self.i == self.s.len() {
            Ok(())
        } else {
            Err(Error::parse(self.pos(), "unexpected trailing input"))
        }
    }

    fn integer(&mut self) -> Result<Integer> {
        let start = self.i;
        if self.peek() == Some('-') {
            self.bump();
        }
        let digits_start = self.i;
        while matches!(self.peek(), Some('0'..='9')) {
            self.bump();
        }
        if self.i == digits_start {
            let pos = self.pos();
            self.i = start;
            return Err(Error::parse(pos, "expected an integer"));
        }
        Ok(self.s[start..self.i].parse().expect("validated digits"))
    }

    fn positive(&mut self) -> Result<Integer> {
        let pos = self.pos();
        let n = self.integer()?;
        if n < 1 {
            return Err(Error::parse(pos, "partial quotient must be >= 1"));
        }
        Ok(n)
    }

    fn digit_list(&mut self, terminator: char) -> Result<Vec<Integer>> {
        let mut out = Vec::new();
        if self.peek() == Some(terminator) {
            return Ok(out);
        }
        loop {
            out.push(self.positive()?);
            if self.peek() == Some(',') {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn rational(&mut self) -> Result<Rational> {
        let p = self.integer()?;
        if self.peek() != Some('/') {
            return Ok(Rational(BigRational::from(p)));
        }
        self.bump();
        let pos = self.pos();
        let q = self.integer()?;
        if q <= 0 {
            return Err(Error::parse(pos, "denominator must be positive"));
        }
        Ok(Rational(BigRational::from((p, q))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_variant() {
        assert_eq!(
            "3/7".parse::<AlphaSpec>().unwrap(),
            AlphaSpec::rational(3, 7).unwrap()
        );
        assert_eq!(
            "6/14".parse::<AlphaSpec>().unwrap(),
            AlphaSpec::rational(3, 7).unwrap()
        );
        assert_eq!(
            "2".parse::<Rational>().unwrap(),
            Rational::new(2, 1).unwrap()
        );
        assert_eq!(
            "pcf:[0;|1]".parse::<AlphaSpec>().unwrap(),
            AlphaSpec::golden()
        );
        assert_eq!(
            "pcf:[1;2,3|4,5]".parse::<AlphaSpec>().unwrap(),
            AlphaSpec::periodic(&[1, 2, 3], &[4, 5]).unwrap()
        );
        assert_eq!(
            "cf:[0;2,3]".parse::<AlphaSpec>().unwrap(),
            AlphaSpec::digits(&[0, 2, 3], true).unwrap()
        );
        assert_eq!(
            "cf:[0;2,4,16,...]".parse::<AlphaSpec>().unwrap(),
            AlphaSpec::digits(&[0, 2, 4, 16], false).unwrap()
        );
        assert_eq!(
            "cf:[5]".parse::<AlphaSpec>().unwrap(),
            AlphaSpec::digits(&[5], true).unwrap()
        );
        assert_eq!(
            "dec:0.1234@256".parse::<AlphaSpec>().unwrap(),
            AlphaSpec::decimal("0.1234", 256).unwrap()
        );
    }

    #[test]
    fn errors_carry_positions() {
        let err = |s: &str| match s.parse::<AlphaSpec>() {
            Err(Error::Parse { pos, .. }) => pos,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(err("1/0"), 2);
        assert_eq!(err("1/2x"), 3);
        assert_eq!(err("pcf:[0;1|]"), 9);
        assert_eq!(err("pcf:[0;0|1]"), 7);
        assert_eq!(err("cf:[0;2,x]"), 8);
        assert_eq!(err("dec:0.12@32"), 9);
        assert_eq!(err("dec:0.1a@128"), 7);
        assert_eq!(err("abc"), 0);
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "3/7",
            "-2/5",
            "pcf:[0;|1]",
            "pcf:[2;1,4|3]",
            "cf:[0;2,3]",
            "cf:[0;2,...]",
            "cf:[4]",
            "dec:0.125@64",
        ] {
            let spec: AlphaSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
    }

    #[test]
    fn approximations() {
        let g = AlphaSpec::golden().approx_f64();
        assert!((g - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        let r = AlphaSpec::digits(&[0, 2, 3], true).unwrap();
        assert_eq!(r.as_rational().unwrap(), Rational::new(3, 7).unwrap());
    }
}
