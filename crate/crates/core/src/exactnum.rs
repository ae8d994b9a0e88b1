//! Exact rationals, dense univariate polynomials and sequence-shape predicates.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats as `"num/den"`, including integers (`"3/1"`).
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Input(format!("malformed rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Input(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapters for rationals encoded as `"num/den"` strings. Plain JSON
/// integers are accepted on input.
pub mod serde_rational {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Str(String),
        Int(i64),
    }

    fn from_raw<E: serde::de::Error>(raw: Raw) -> std::result::Result<Rational, E> {
        match raw {
            Raw::Str(s) => parse_rational(&s).map_err(E::custom),
            Raw::Int(i) => Ok(q(i)),
        }
    }

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        from_raw(Raw::deserialize(d)?)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(
            v: &[Rational],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let strs: Vec<String> = v.iter().map(format_rational).collect();
            strs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Rational>, D::Error> {
            Vec::<Raw>::deserialize(d)?
                .into_iter()
                .map(from_raw)
                .collect()
        }
    }

    pub mod matrix {
        use super::*;

        pub fn serialize<S: Serializer>(
            m: &[Vec<Rational>],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let strs: Vec<Vec<String>> = m
                .iter()
                .map(|row| row.iter().map(format_rational).collect())
                .collect();
            strs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
            Vec::<Vec<Raw>>::deserialize(d)?
                .into_iter()
                .map(|row| row.into_iter().map(from_raw).collect())
                .collect()
        }
    }
}

/// Dense polynomial in one variable; `coeffs[i]` is the coefficient of `λ^i`.
///
/// Trailing zero coefficients are always trimmed, so the zero polynomial has
/// an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::monomial(Rational::one(), 0)
    }

    /// `c · λ^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    /// `λ + a`
    pub fn linear(a: Rational) -> Self {
        Poly::new(vec![a, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `λ^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplies by `λ^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Returns `p(λ^c)`.
    pub fn substitute_power(&self, c: usize) -> Poly {
        assert!(c >= 1, "substitute_power needs c >= 1");
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rational::zero(); (self.coeffs.len() - 1) * c + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            coeffs[i * c] = a.clone();
        }
        Poly::new(coeffs)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, a| acc * x + a)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, a| acc * x + to_f64(a))
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Coefficients with their absolute values taken.
    pub fn abs_coeffs(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a.abs()).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let sign = if a.is_negative() { "-" } else { "+" };
            if first {
                if a.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = a.abs();
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| -a).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_rational::vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coeffs = serde_rational::vec::deserialize(d)?;
        if coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            return Err(D::Error::custom(
                "polynomial has a zero leading coefficient",
            ));
        }
        Ok(Poly::new(coeffs))
    }
}

/// Outcome of a log-concavity check.
/// Residual `lhs − rhs` of a polynomial identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Residual {
    pub lhs: Poly,
    pub rhs: Poly,
    pub residual: Poly,
}

impl Residual {
    pub fn new(lhs: Poly, rhs: Poly) -> Self {
        let residual = &lhs - &rhs;
        Residual { lhs, rhs, residual }
    }

    pub fn is_zero(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", content = "index", rename_all = "snake_case")]
pub enum LogConcavity {
    LogConcave,
    /// Smallest interior index `i` with `s[i-1]·s[i+1] > s[i]²`.
    FailsAt(usize),
}

impl LogConcavity {
    pub fn holds(self) -> bool {
        self == LogConcavity::LogConcave
    }
}

/// Exact log-concavity of a non-negative sequence.
pub fn is_log_concave(s: &[Rational]) -> Result<LogConcavity> {
    if let Some(i) = s.iter().position(Signed::is_negative) {
        return Err(Error::Input(format!(
            "log-concavity needs non-negative entries, entry {i} is {}",
            s[i]
        )));
    }
    for i in 1..s.len().saturating_sub(1) {
        if &s[i - 1] * &s[i + 1] > &s[i] * &s[i] {
            return Ok(LogConcavity::FailsAt(i));
        }
    }
    Ok(LogConcavity::LogConcave)
}

/// Floating-point log-concavity with an additive/relative slack:
/// `s[i-1]·s[i+1] ≤ s[i]²·(1+slack) + slack`.
pub fn is_log_concave_f64(s: &[f64], slack: f64) -> Result<LogConcavity> {
    if let Some(i) = s.iter().position(|&x| x < -slack || x.is_nan()) {
        return Err(Error::Input(format!(
            "log-concavity needs non-negative entries, entry {i} is {}",
            s[i]
        )));
    }
    for i in 1..s.len().saturating_sub(1) {
        if s[i - 1] * s[i + 1] > s[i] * s[i] * (1.0 + slack) + slack {
            return Ok(LogConcavity::FailsAt(i));
        }
    }
    Ok(LogConcavity::LogConcave)
}

/// Weakly rises then weakly falls.
pub fn is_unimodal<T: PartialOrd>(s: &[T]) -> bool {
    let mut i = 1;
    while i < s.len() && s[i - 1] <= s[i] {
        i += 1;
    }
    while i < s.len() && s[i - 1] >= s[i] {
        i += 1;
    }
    i >= s.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qs(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn arithmetic_examples() {
        let p = Poly::from_ints(&[1, 1]);
        assert_eq!(&p + &p, Poly::from_ints(&[2, 2]));
        assert_eq!(&p * &p, Poly::from_ints(&[1, 2, 1]));
        assert_eq!(
            Poly::from_ints(&[2, 3, 1]).shift(2),
            Poly::from_ints(&[0, 0, 2, 3, 1])
        );
        assert_eq!(
            p.scale(&q_frac(1, 2)),
            Poly::new(vec![q_frac(1, 2), q_frac(1, 2)])
        );
        assert_eq!(&p - &p, Poly::zero());
        assert_eq!(Poly::zero().degree(), None);
    }

    #[test]
    fn substitute_power_examples() {
        assert_eq!(
            Poly::from_ints(&[2, 3, 1]).substitute_power(2),
            Poly::from_ints(&[2, 0, 3, 0, 1])
        );
        let p = Poly::from_ints(&[-1, 1]);
        assert_eq!(p.substitute_power(1), p);
        let cube = Poly::from_ints(&[1, 1]).pow(3);
        assert_eq!(
            cube.substitute_power(3),
            Poly::from_ints(&[1, 0, 0, 3, 0, 0, 3, 0, 0, 1])
        );
    }

    #[test]
    fn log_concave_examples() {
        assert_eq!(
            is_log_concave(&qs(&[1, 3, 2])).unwrap(),
            LogConcavity::LogConcave
        );
        assert_eq!(
            is_log_concave(&qs(&[1, 1, 1])).unwrap(),
            LogConcavity::LogConcave
        );
        assert_eq!(
            is_log_concave(&qs(&[2, 1, 2])).unwrap(),
            LogConcavity::FailsAt(1)
        );
        assert!(is_log_concave(&qs(&[1, -1, 1])).is_err());
        // zeros are handled exactly
        assert_eq!(
            is_log_concave(&qs(&[0, 0, 1])).unwrap(),
            LogConcavity::LogConcave
        );
        assert_eq!(
            is_log_concave(&qs(&[1, 0, 1])).unwrap(),
            LogConcavity::FailsAt(1)
        );
    }

    #[test]
    fn unimodal_examples() {
        assert!(is_unimodal(&[1, 3, 3, 1]));
        assert!(!is_unimodal(&[1, 2, 1, 2]));
        assert!(is_unimodal(&[5]));
        assert!(is_unimodal::<i32>(&[]));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(format_rational(&q(3)), "3/1");
        assert_eq!(parse_rational("6/4").unwrap(), q_frac(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), q(-7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn poly_json() {
        let p = Poly::new(vec![q_frac(1, 2), q(0), q(-3)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"["1/2","0/1","-3/1"]"#);
        let back: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Poly>(r#"["1/1","0/1"]"#).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(Poly::from_ints(&[2, -3, 1]).to_string(), "x^2 - 3*x + 2");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
