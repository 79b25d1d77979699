//! Exact time values.
//!
//! Every date and duration in the model is an exact rational number of
//! ticks. Deadlines may additionally be `+∞` when no bounding constraint
//! exists.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::Signed;

use crate::error::ParseRationalError;

/// An exact, finite quantity of time (a date or a duration).
pub type Rat = Rational64;

/// Shorthand for an integer-valued [`Rat`].
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n)
}

/// Shorthand for `num / den`.
pub fn ratio(num: i64, den: i64) -> Rat {
    Rat::new(num, den)
}

/// A finite date or `+∞`.
///
/// `Finite` sorts before `Infinite`, so the derived ordering is the one
/// used for deadline comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimeStamp {
    Finite(Rat),
    Infinite,
}

impl TimeStamp {
    pub fn finite(self) -> Option<Rat> {
        match self {
            TimeStamp::Finite(r) => Some(r),
            TimeStamp::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, TimeStamp::Finite(_))
    }

    /// Shifts a finite stamp by `offset`; `+∞` stays `+∞`.
    pub fn shifted(self, offset: Rat) -> TimeStamp {
        match self {
            TimeStamp::Finite(r) => TimeStamp::Finite(r + offset),
            TimeStamp::Infinite => TimeStamp::Infinite,
        }
    }

    pub fn le_rat(self, r: Rat) -> bool {
        self <= TimeStamp::Finite(r)
    }
}

impl From<Rat> for TimeStamp {
    fn from(r: Rat) -> Self {
        TimeStamp::Finite(r)
    }
}

impl fmt::Display for TimeStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeStamp::Finite(r) => f.write_str(&format_rat(*r)),
            TimeStamp::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for TimeStamp {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "inf" {
            Ok(TimeStamp::Infinite)
        } else {
            parse_rat(s).map(TimeStamp::Finite)
        }
    }
}

/// Canonical text form: `p` for integers, `p/q` otherwise (reduced).
pub fn format_rat(r: Rat) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses a non-negative rational written as `p` or `p/q`.
///
/// Decimal points, signs and zero denominators are rejected.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRationalError> {
    let s = s.trim();
    let err = || ParseRationalError(s.to_string());
    let digits = |part: &str| -> Result<i64, ParseRationalError> {
        if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        part.parse::<i64>().map_err(|_| err())
    };
    let value = match s.split_once('/') {
        None => Rat::from_integer(digits(s)?),
        Some((p, q)) => {
            let q = digits(q)?;
            if q == 0 {
                return Err(err());
            }
            Rat::new(digits(p)?, q)
        }
    };
    debug_assert!(!value.is_negative());
    Ok(value)
}

/// Smallest common multiple of the denominators of `values`.
pub fn common_denominator<I: IntoIterator<Item = Rat>>(values: I) -> i64 {
    values
        .into_iter()
        .fold(1i64, |acc, r| num_integer::lcm(acc, *r.denom()))
}

/// `r * scale` when that product is an integer.
pub fn scaled_integer(r: Rat, scale: i64) -> Option<i64> {
    let v = r * Rat::from_integer(scale);
    if *v.denom() == 1 {
        Some(*v.numer())
    } else {
        None
    }
}


pub mod serde_rat {
    //! `serde(with = ...)` helpers writing rationals as canonical strings.
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(*r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

pub mod serde_stamp {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &TimeStamp, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<TimeStamp, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_formatting() {
        assert_eq!(format_rat(ratio(6, 4)), "3/2");
        assert_eq!(format_rat(rat(7)), "7");
        assert_eq!(TimeStamp::Infinite.to_string(), "inf");
    }

    #[test]
    fn parse_accepts_integers_and_fractions() {
        assert_eq!(parse_rat("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse_rat("10").unwrap(), rat(10));
        assert_eq!(parse_rat("4/2").unwrap(), rat(2));
    }

    #[test]
    fn parse_rejects_decimals_signs_and_zero_denominators() {
        for bad in ["2.5", "-1", "1/0", "", "/3", "a"] {
            assert!(parse_rat(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn infinity_sorts_last() {
        assert!(TimeStamp::Finite(rat(1_000_000)) < TimeStamp::Infinite);
        assert!(TimeStamp::Finite(rat(1)) < TimeStamp::Finite(rat(2)));
        assert_eq!("inf".parse::<TimeStamp>().unwrap(), TimeStamp::Infinite);
    }

    #[test]
    fn scaling() {
        let d = common_denominator([ratio(1, 2), ratio(2, 3), rat(4)]);
        assert_eq!(d, 6);
        assert_eq!(scaled_integer(ratio(2, 3), d), Some(4));
        assert_eq!(scaled_integer(ratio(1, 4), d), None);
    }
}
