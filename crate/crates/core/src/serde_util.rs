//! Serde adapters for exact rationals (`"num/den"` strings).

pub mod rational {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::scalar::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).ok_or_else(|| serde::de::Error::custom(format!("invalid rational {s:?}")))
    }

    pub fn parse(s: &str) -> Option<Rational> {
        let s = s.trim();
        match s.split_once('/') {
            Some((a, b)) => {
                let den: BigInt = b.trim().parse().ok()?;
                if den == BigInt::from(0) {
                    return None;
                }
                Some(Rational::new(a.trim().parse().ok()?, den))
            }
            None => Some(Rational::from_integer(s.parse().ok()?)),
        }
    }
}
