//! Arbitrary-precision rationals and their `"p/q"` text form.
//!
//! Every rational that leaves the library (JSON reports, config files,
//! transformation files) is written as `"p/q"` with an explicit
//! denominator, so `1` is `"1/1"`. Parsing also accepts bare integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rat = BigRational;

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

pub fn parse_rat(text: &str) -> Result<Rat> {
    let bad = || Error::RationalLiteral(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(num, den))
}

pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Compact human form: integers without a denominator.
pub fn display_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format_rat(r)
    }
}

pub fn is_nonnegative(r: &Rat) -> bool {
    !r.is_negative()
}

pub(crate) fn serialize_rat<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rat(r))
}

pub(crate) fn deserialize_rat<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
    let text = String::deserialize(d)?;
    parse_rat(&text).map_err(de::Error::custom)
}

/// serde adapter for `Vec<Rat>` fields.
pub(crate) mod rat_seq {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rat(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rat>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts.iter().map(|t| parse_rat(t).map_err(de::Error::custom)).collect()
    }
}

/// serde adapter for `Option<Rat>` fields.
pub(crate) mod opt_rat {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_some(&format_rat(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rat>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|t| parse_rat(&t).map_err(de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rat("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("-4").unwrap(), int(-4));
        assert_eq!(parse_rat(" 2 / -4 ").unwrap(), rat(-1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("0.333").is_err());
        assert!(parse_rat("").is_err());
    }

    #[test]
    fn formats_with_explicit_denominator() {
        assert_eq!(format_rat(&int(1)), "1/1");
        assert_eq!(format_rat(&rat(-2, 6)), "-1/3");
        assert_eq!(display_rat(&int(-3)), "-3");
        assert_eq!(display_rat(&rat(1, 3)), "1/3");
    }
}
