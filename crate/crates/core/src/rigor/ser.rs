//! Serde adapters rendering rationals as `"p/q"` strings. Deserialization
//! also accepts JSON integers and decimal strings.

use serde::{Deserialize, Deserializer, Serializer};

use super::{parse_rational, Rational};

#[derive(Deserialize)]
#[serde(untagged)]
enum RatIn {
    Text(String),
    Int(i64),
    Float(f64),
}

fn convert<E: serde::de::Error>(v: RatIn) -> Result<Rational, E> {
    match v {
        RatIn::Text(s) => parse_rational(&s).ok_or_else(|| E::custom(format!("bad rational {s:?}"))),
        RatIn::Int(n) => Ok(super::int(n)),
        // The shortest round-trip decimal is what the user typed.
        RatIn::Float(f) => parse_rational(&format!("{f:?}"))
            .ok_or_else(|| E::custom(format!("bad rational {f}"))),
    }
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(q)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        convert(RatIn::deserialize(d)?)
    }
}

pub mod rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&q.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<RatIn>::deserialize(d)?.into_iter().map(convert).collect()
    }
}
