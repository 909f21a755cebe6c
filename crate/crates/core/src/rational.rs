//! Exact rational helpers. Every value in the crate is a `BigRational`;
//! the text form is always the reduced `p/q` string.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Reduced `p/q`, denominator always present.
pub fn fmt(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse(text: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a rational: {text:?}"));
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(zero(), |acc, v| acc + v)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Checks a weight vector is a probability vector: nonnegative, summing to one.
pub fn check_probabilities<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Result<()> {
    let mut total = zero();
    for v in values {
        if v.is_negative() {
            return Err(Error::InvalidDistribution(format!(
                "negative weight {}",
                fmt(v)
            )));
        }
        total += v;
    }
    if !total.is_one() {
        return Err(Error::InvalidDistribution(format!(
            "weights sum to {} instead of 1",
            fmt(&total)
        )));
    }
    Ok(())
}

/// Scales rationals to integers over their common denominator; returns the
/// integers together with the denominator.
pub fn scale_to_integers(values: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = common_denominator(values.iter());
    let ints = values
        .iter()
        .map(|v| v.numer() * (&den / v.denom()))
        .collect();
    (ints, den)
}

pub(crate) fn to_i128(v: &BigInt) -> Option<i128> {
    let (sign, digits) = v.to_u64_digits();
    if digits.len() > 2 {
        return None;
    }
    let mag = digits
        .iter()
        .rev()
        .fold(0u128, |acc, &d| (acc << 64) | u128::from(d));
    if mag > i128::MAX as u128 {
        return None;
    }
    Some(match sign {
        Sign::Minus => -(mag as i128),
        _ => mag as i128,
    })
}

pub mod serde_rational {
    //! Serializes rationals as `p/q` strings.
    use super::{fmt, parse, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_is_reduced_with_denominator() {
        assert_eq!(fmt(&ratio(6, 4)), "3/2");
        assert_eq!(fmt(&int(2)), "2/1");
        assert_eq!(fmt(&ratio(-2, 4)), "-1/2");
    }

    #[test]
    fn parse_accepts_integers_and_fractions() {
        assert_eq!(parse("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse("4").unwrap(), int(4));
        assert_eq!(parse(" 10/4 ").unwrap(), ratio(5, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn probability_check() {
        assert!(check_probabilities(&[ratio(1, 2), ratio(1, 2)]).is_ok());
        assert!(check_probabilities(&[ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(check_probabilities(&[ratio(3, 2), ratio(-1, 2)]).is_err());
    }

    #[test]
    fn scaling_to_integers() {
        let (ints, den) = scale_to_integers(&[ratio(1, 2), ratio(1, 3), ratio(1, 6)]);
        assert_eq!(den, BigInt::from(6));
        assert_eq!(
            ints,
            vec![BigInt::from(3), BigInt::from(2), BigInt::from(1)]
        );
        assert_eq!(to_i128(&BigInt::from(-7)), Some(-7));
        assert_eq!(to_i128(&(BigInt::one() << 130)), None);
    }
}
