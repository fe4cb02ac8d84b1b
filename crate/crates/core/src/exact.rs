//! Exact rational plumbing shared by functions and spectra.
//!
//! Vectors of rationals are stored as integer numerators over one common
//! positive denominator, kept in lowest terms. Butterflies and sums then run
//! on plain big integers, and structural equality coincides with value
//! equality.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct ExactVec {
    numer: Vec<BigInt>,
    denom: BigInt,
}

impl ExactVec {
    pub(crate) fn zeros(len: usize) -> Self {
        ExactVec {
            numer: vec![BigInt::zero(); len],
            denom: BigInt::one(),
        }
    }

    pub(crate) fn from_parts(numer: Vec<BigInt>, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        let mut v = ExactVec { numer, denom };
        v.normalize();
        v
    }

    pub(crate) fn from_ints<I: IntoIterator<Item = i64>>(values: I) -> Self {
        let numer = values.into_iter().map(BigInt::from).collect();
        ExactVec::from_parts(numer, BigInt::one())
    }

    pub(crate) fn from_rationals(values: &[BigRational]) -> Self {
        let denom = values
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let numer = values
            .iter()
            .map(|v| v.numer() * (&denom / v.denom()))
            .collect();
        ExactVec::from_parts(numer, denom)
    }

    fn normalize(&mut self) {
        if self.denom.is_negative() {
            self.denom = -&self.denom;
            for n in &mut self.numer {
                *n = -&*n;
            }
        }
        if self.numer.iter().all(Zero::is_zero) {
            self.denom = BigInt::one();
            return;
        }
        if self.denom.is_one() {
            return;
        }
        let mut g = self.denom.clone();
        for n in &self.numer {
            if g.is_one() {
                return;
            }
            if !n.is_zero() {
                g = g.gcd(n);
            }
        }
        if !g.is_one() {
            self.denom = &self.denom / &g;
            for n in &mut self.numer {
                *n = &*n / &g;
            }
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.numer.len()
    }

    pub(crate) fn numer(&self) -> &[BigInt] {
        &self.numer
    }

    pub(crate) fn denom(&self) -> &BigInt {
        &self.denom
    }

    pub(crate) fn into_parts(self) -> (Vec<BigInt>, BigInt) {
        (self.numer, self.denom)
    }

    pub(crate) fn get(&self, i: usize) -> BigRational {
        BigRational::new(self.numer[i].clone(), self.denom.clone())
    }

    pub(crate) fn get_f64(&self, i: usize) -> f64 {
        ratio_to_f64(&self.numer[i], &self.denom)
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.numer.iter().all(Zero::is_zero)
    }

    pub(crate) fn is_zero_at(&self, i: usize) -> bool {
        self.numer[i].is_zero()
    }

    pub(crate) fn sum(&self) -> BigRational {
        let total: BigInt = self.numer.iter().sum();
        BigRational::new(total, self.denom.clone())
    }

    pub(crate) fn map_numer(&self, f: impl FnMut(&BigInt) -> BigInt) -> Self {
        ExactVec::from_parts(self.numer.iter().map(f).collect(), self.denom.clone())
    }

    pub(crate) fn scale(&self, q: &BigRational) -> Self {
        ExactVec::from_parts(
            self.numer.iter().map(|n| n * q.numer()).collect(),
            &self.denom * q.denom(),
        )
    }

    pub(crate) fn combine(&self, other: &Self, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Self {
        assert_eq!(self.len(), other.len());
        let denom = self.denom.lcm(&other.denom);
        let ka = &denom / &self.denom;
        let kb = &denom / &other.denom;
        let numer = self
            .numer
            .iter()
            .zip(&other.numer)
            .map(|(a, b)| f(&(a * &ka), &(b * &kb)))
            .collect();
        ExactVec::from_parts(numer, denom)
    }

    pub(crate) fn pointwise_mul(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        ExactVec::from_parts(
            self.numer
                .iter()
                .zip(&other.numer)
                .map(|(a, b)| a * b)
                .collect(),
            &self.denom * &other.denom,
        )
    }
}

/// Correctly rounded conversion of `n / d` to `f64`.
pub fn ratio_to_f64(n: &BigInt, d: &BigInt) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    if n.bits() <= 53 && d.bits() <= 53 {
        // both operands are exact doubles, so one IEEE division rounds once
        return n.to_f64().unwrap() / d.to_f64().unwrap();
    }
    BigRational::new(n.clone(), d.clone())
        .to_f64()
        .unwrap_or(f64::NAN)
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    ratio_to_f64(q.numer(), q.denom())
}

/// `2^e` as an exact rational for any integer `e`.
pub fn pow2(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Renders a rational as `num/den`, always with an explicit denominator.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses an exact rational from `a/b`, an integer, or a plain decimal
/// literal such as `0.25` (which is itself an exact rational).
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if s.len() > 4096 {
        return Err(Error::Parse("rational literal too long".into()));
    }
    if let Some((a, b)) = s.split_once('/') {
        let num = parse_integer(a)?;
        let den = parse_integer(b)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let (negative, digits) = match int_part.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        if (digits.is_empty() && frac_part.is_empty())
            || !digits.bytes().all(|c| c.is_ascii_digit())
            || !frac_part.bytes().all(|c| c.is_ascii_digit())
        {
            return Err(Error::Parse(format!("malformed decimal {s:?}")));
        }
        let mut all = String::with_capacity(digits.len() + frac_part.len());
        all.push_str(digits);
        all.push_str(frac_part);
        let mut num = BigInt::from_str(&all).map_err(|e| Error::Parse(e.to_string()))?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        return Ok(BigRational::new(num, den));
    }
    Ok(BigRational::from_integer(parse_integer(s)?))
}

fn parse_integer(s: &str) -> Result<BigInt> {
    let t = s.trim();
    let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("malformed integer {s:?}")));
    }
    BigInt::from_str(t).map_err(|e| Error::Parse(e.to_string()))
}

/// A positive rational exponent `p`, kept exact so conditions such as
/// `p <= 1/2` or `|a|^p * mu(I) <= 1` can be decided without rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent(Ratio<u64>);

impl Exponent {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 || numer == 0 {
            return Err(Error::invalid(format!(
                "exponent must be a positive rational, got {numer}/{denom}"
            )));
        }
        Ok(Exponent(Ratio::new(numer, denom)))
    }

    pub fn half() -> Self {
        Exponent(Ratio::new(1, 2))
    }

    pub fn quarter() -> Self {
        Exponent(Ratio::new(1, 4))
    }

    pub fn from_rational(q: &BigRational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::invalid(format!("exponent must be positive, got {q}")));
        }
        match (q.numer().to_u64(), q.denom().to_u64()) {
            (Some(n), Some(d)) => Exponent::new(n, d),
            _ => Err(Error::invalid(format!("exponent {q} is too large to represent"))),
        }
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn value(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numer()), BigInt::from(self.denom()))
    }

    /// `1/p` as an exact rational.
    pub fn reciprocal(&self) -> BigRational {
        self.to_rational().recip()
    }

    pub fn lt_ratio(&self, numer: u64, denom: u64) -> bool {
        self.0 < Ratio::new(numer, denom)
    }

    pub fn le_ratio(&self, numer: u64, denom: u64) -> bool {
        self.0 <= Ratio::new(numer, denom)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Exponent::from_rational(&parse_rational(s)?)
    }
}
