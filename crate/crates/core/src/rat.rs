//! Arbitrary-precision rational scalars and their canonical string form.
//!
//! Rationals serialize as lowest-terms strings: `"p"` when the denominator
//! is 1, `"p/q"` otherwise, with the sign on the numerator. This is the
//! format used by every JSON interface in the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// Rational from an integer numerator/denominator pair. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(num: i64) -> Rat {
    Rat::from_integer(BigInt::from(num))
}

/// Canonical lowest-terms string: `"p"` or `"p/q"`.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"` or `"p/q"` (optionally signed). Rejects zero denominators.
pub fn rat_from_str(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num_str
        .parse()
        .map_err(|_| format!("invalid integer `{num_str}`"))?;
    let den: BigInt = den_str
        .parse()
        .map_err(|_| format!("invalid integer `{den_str}`"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rat::new(num, den))
}

pub fn is_negative(r: &Rat) -> bool {
    r.numer().is_negative()
}

/// serde adapter for `Rat` fields using the canonical string form.
pub mod rat_string {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&rat_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(de)?;
        rat_from_str(&s).map_err(de::Error::custom)
    }
}

/// serde adapter for `Vec<Rat>` fields.
pub mod rat_string_vec {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(rat_to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Rat>, D::Error> {
        let strs = Vec::<String>::deserialize(de)?;
        strs.iter()
            .map(|s| rat_from_str(s).map_err(de::Error::custom))
            .collect()
    }
}
