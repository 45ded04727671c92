//! Exact rational weights.
//!
//! Every weight, dual value and price in the workspace is a [`Rational`].
//! Text forms accepted by [`parse_rational`]: `7`, `-3`, `3/4`, `-1.25`.

use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = num_rational::Rational64;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(value)
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}

/// Parses an exact rational from an integer, fraction or finite decimal token.
pub fn parse_rational(token: &str) -> Result<Rational, String> {
    let token = token.trim();
    if token.is_empty() {
        return Err("empty number".into());
    }
    if let Some((numer, denom)) = token.split_once('/') {
        let numer: i64 = parse_integer(numer).ok_or_else(|| format!("bad numerator in {token:?}"))?;
        let denom: i64 = parse_integer(denom).ok_or_else(|| format!("bad denominator in {token:?}"))?;
        if denom == 0 {
            return Err(format!("zero denominator in {token:?}"));
        }
        return Ok(Rational::new(numer, denom));
    }
    if let Some((whole, frac)) = token.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty()
            || !frac.bytes().all(|b| b.is_ascii_digit())
            || !whole_digits.bytes().all(|b| b.is_ascii_digit())
            || (whole_digits.is_empty() && frac.is_empty())
        {
            return Err(format!("not a rational number: {token:?}"));
        }
        let scale = 10i64
            .checked_pow(frac.len() as u32)
            .ok_or_else(|| format!("too many decimals in {token:?}"))?;
        let whole_value: i64 = if whole_digits.is_empty() {
            0
        } else {
            whole_digits
                .parse()
                .map_err(|_| format!("integer part out of range in {token:?}"))?
        };
        let frac_value: i64 = frac
            .parse()
            .map_err(|_| format!("fraction out of range in {token:?}"))?;
        let numer = whole_value
            .checked_mul(scale)
            .and_then(|v| v.checked_add(frac_value))
            .ok_or_else(|| format!("value out of range: {token:?}"))?;
        let value = Rational::new(numer, scale);
        return Ok(if negative { -value } else { value });
    }
    parse_integer(token)
        .map(Rational::from_integer)
        .ok_or_else(|| format!("not a rational number: {token:?}"))
}

fn parse_integer(token: &str) -> Option<i64> {
    let token = token.trim();
    let digits = token.strip_prefix(['-', '+']).unwrap_or(token);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    token.parse().ok()
}

/// Canonical text form: integers without a denominator, otherwise `p/q`.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Least common multiple of the denominators, `None` on overflow.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<i64> {
    let mut acc: i64 = 1;
    for value in values {
        let d = *value.denom();
        if d == 1 || acc % d == 0 {
            continue;
        }
        let g = acc.gcd(&d);
        acc = (acc / g).checked_mul(d)?;
    }
    Some(acc)
}

pub fn max_abs<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values
        .into_iter()
        .map(|v| v.abs())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
}

/// Rational that serializes as a JSON integer when integral and as a `"p/q"`
/// string otherwise. Deserializes integers, strings and finite decimals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RationalValue(pub Rational);

impl From<Rational> for RationalValue {
    fn from(value: Rational) -> Self {
        Self(value)
    }
}

impl From<RationalValue> for Rational {
    fn from(value: RationalValue) -> Self {
        value.0
    }
}

impl fmt::Display for RationalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl Serialize for RationalValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            serializer.serialize_i64(*self.0.numer())
        } else {
            serializer.serialize_str(&format_rational(&self.0))
        }
    }
}

impl<'de> Deserialize<'de> for RationalValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RationalVisitor;

        impl Visitor<'_> for RationalVisitor {
            type Value = RationalValue;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer, a decimal or a \"p/q\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
                Ok(RationalValue(Rational::from_integer(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
                i64::try_from(v)
                    .map(|v| RationalValue(Rational::from_integer(v)))
                    .map_err(|_| E::custom("integer out of range"))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
                if !v.is_finite() {
                    return Err(E::custom("non-finite weight"));
                }
                parse_rational(&v.to_string()).map(RationalValue).map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                parse_rational(v).map(RationalValue).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(RationalVisitor)
    }
}
