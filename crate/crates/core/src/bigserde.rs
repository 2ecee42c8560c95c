//! Serde adapters for big integers: a JSON number when the value fits in 64
//! bits, a decimal string otherwise. Both forms are accepted on input.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Signed(i64),
    Unsigned(u64),
    Text(String),
}

/// Newtype carrying the adapter, for use inside containers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Big(#[serde(with = "big_int")] pub BigInt);

pub mod big_int {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        match x.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&x.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Signed(v) => Ok(v.into()),
            Repr::Unsigned(v) => Ok(v.into()),
            Repr::Text(t) => t.parse().map_err(D::Error::custom),
        }
    }
}

pub mod big_uint {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        match x.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&x.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Signed(v) => BigUint::try_from(v).map_err(D::Error::custom),
            Repr::Unsigned(v) => Ok(v.into()),
            Repr::Text(t) => t.parse().map_err(D::Error::custom),
        }
    }
}

/// `Vec<(T, BigInt)>` with the adapter on the second component.
pub mod tagged_ints {
    use super::*;

    pub fn serialize<T: Serialize + Clone, S: Serializer>(v: &[(T, BigInt)], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|(t, x)| (t.clone(), Big(x.clone()))).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, T: Deserialize<'de>, D: Deserializer<'de>>(d: D) -> Result<Vec<(T, BigInt)>, D::Error> {
        Ok(Vec::<(T, Big)>::deserialize(d)?.into_iter().map(|(t, b)| (t, b.0)).collect())
    }
}

/// `Vec<(BigInt, T)>` with the adapter on the first component.
pub mod int_tagged {
    use super::*;

    pub fn serialize<T: Serialize + Clone, S: Serializer>(v: &[(BigInt, T)], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|(x, t)| (Big(x.clone()), t.clone())).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, T: Deserialize<'de>, D: Deserializer<'de>>(d: D) -> Result<Vec<(BigInt, T)>, D::Error> {
        Ok(Vec::<(Big, T)>::deserialize(d)?.into_iter().map(|(b, t)| (b.0, t)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values_are_numbers() {
        assert_eq!(serde_json::to_string(&Big(BigInt::from(-5))).unwrap(), "-5");
        let huge: BigInt = "123456789012345678901234567890".parse().unwrap();
        let s = serde_json::to_string(&Big(huge.clone())).unwrap();
        assert_eq!(s, "\"123456789012345678901234567890\"");
        assert_eq!(serde_json::from_str::<Big>(&s).unwrap().0, huge);
        assert_eq!(serde_json::from_str::<Big>("7").unwrap().0, BigInt::from(7));
    }
}
