//! Exact rational scalars and their textual form.
//!
//! Every certificate in this crate is built from [`Rational`] values. On the
//! wire a rational is the string `"p/q"` in lowest terms with `q > 0`; an
//! integer may be written as `"p"`.

use std::fmt;

use rug::{Integer, Rational};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Parses `"p/q"` or `"p"`. The denominator must be a positive integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("malformed rational {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((num, den)) => (num.trim(), Some(den.trim())),
        None => (text, None),
    };
    let num: Integer = parse_integer(num).ok_or_else(bad)?;
    let den: Integer = match den {
        Some(den) => {
            if den.starts_with(['-', '+']) {
                return Err(bad());
            }
            parse_integer(den).ok_or_else(bad)?
        }
        None => Integer::from(1),
    };
    if den == 0 {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::from((num, den)))
}

fn parse_integer(text: &str) -> Option<Integer> {
    let digits = text.strip_prefix(['-', '+']).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Integer::parse(text).ok().map(Integer::from)
}

/// Lowest-terms `"p/q"`, or `"p"` for integers.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from((num, den))
}

pub fn int(value: i64) -> Rational {
    Rational::from(value)
}

/// `C(n, k)` as an exact integer; zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> Integer {
    if k > n {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n, k))
}

/// Least common multiple of the denominators of `values` (1 for no values).
pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Integer {
    values
        .into_iter()
        .fold(Integer::from(1), |acc, v| acc.lcm(v.denom()))
}

/// Serde adapter writing a [`Rational`] as its lowest-terms string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatStr(pub Rational);

impl From<Rational> for RatStr {
    fn from(value: Rational) -> Self {
        RatStr(value)
    }
}

impl From<RatStr> for Rational {
    fn from(value: RatStr) -> Self {
        value.0
    }
}

impl Serialize for RatStr {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RatStr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct RatVisitor;

        impl Visitor<'_> for RatVisitor {
            type Value = RatStr;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RatStr, E> {
                parse_rational(v).map(RatStr).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RatStr, E> {
                Ok(RatStr(Rational::from(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RatStr, E> {
                Ok(RatStr(Rational::from(v)))
            }
        }

        deserializer.deserialize_any(RatVisitor)
    }
}

/// `#[serde(with = "rational::one")]` for a single `Rational` field.
pub mod one {
    use super::*;

    pub fn serialize<S: Serializer>(
        value: &Rational,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Rational, D::Error> {
        RatStr::deserialize(deserializer).map(Rational::from)
    }
}

/// `#[serde(with = "rational::vec")]` for `Vec<Rational>` fields.
pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(
        values: &[Rational],
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(values.iter().map(|v| RatStr(v.clone())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<RatStr>::deserialize(deserializer)?;
        Ok(raw.into_iter().map(Rational::from).collect())
    }
}

/// `#[serde(with = "rational::grid")]` for row-major `Vec<Vec<Rational>>` fields.
pub mod grid {
    use super::*;

    pub fn serialize<S: Serializer>(
        rows: &[Vec<Rational>],
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<RatStr>> = rows
            .iter()
            .map(|row| row.iter().cloned().map(RatStr).collect())
            .collect();
        rows.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
        let raw = Vec::<Vec<RatStr>>::deserialize(deserializer)?;
        Ok(raw
            .into_iter()
            .map(|row| row.into_iter().map(Rational::from).collect())
            .collect())
    }
}
