//! Parsing and serialization of complex scalars.
//!
//! Human-facing formats accept either a plain real (`1.5`, `-2e-3`) or an
//! `a+bi` string (`1.5+2i`, `-0.5-1e-3i`, `2i`). JSON emits a bare number
//! when the imaginary part is zero and an `a+bi` string otherwise, so real
//! data stays readable and round-trips exactly.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::base::C64;
use crate::error::{Error, Result};

/// Parses `"a"`, `"bi"`, or `"a+bi"` (whitespace ignored) into a complex
/// scalar. Exponents like `1e-3` are handled in both parts.
pub fn parse_complex(input: &str) -> Result<C64> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || Error::ParseComplex {
        input: input.to_string(),
    };
    if s.is_empty() {
        return Err(err());
    }

    if let Some(body) = s.strip_suffix(['i', 'I']) {
        // find the sign separating real and imaginary parts: the last +/-
        // that is neither leading nor part of an exponent
        let split = body
            .char_indices()
            .rev()
            .find(|(idx, ch)| {
                (*ch == '+' || *ch == '-')
                    && *idx > 0
                    && !matches!(body.as_bytes()[idx - 1], b'e' | b'E')
            })
            .map(|(idx, _)| idx);
        let (re_str, im_str) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("", body),
        };
        let re = if re_str.is_empty() {
            0.0
        } else {
            re_str.parse::<f64>().map_err(|_| err())?
        };
        let im = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => im_str.parse::<f64>().map_err(|_| err())?,
        };
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::NonFinite("complex literal"));
        }
        Ok(C64::new(re, im))
    } else {
        let re = s.parse::<f64>().map_err(|_| err())?;
        if !re.is_finite() {
            return Err(Error::NonFinite("complex literal"));
        }
        Ok(C64::new(re, 0.0))
    }
}

/// Shortest round-trip text form: bare real, or `a+bi`.
pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// A complex scalar with the number-or-string JSON representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsonComplex(pub C64);

impl From<C64> for JsonComplex {
    fn from(z: C64) -> Self {
        JsonComplex(z)
    }
}

impl From<JsonComplex> for C64 {
    fn from(j: JsonComplex) -> Self {
        j.0
    }
}

impl Serialize for JsonComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.im == 0.0 {
            serializer.serialize_f64(self.0.re)
        } else {
            serializer.serialize_str(&format_complex(self.0))
        }
    }
}

struct JsonComplexVisitor;

impl Visitor<'_> for JsonComplexVisitor {
    type Value = JsonComplex;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "a real number or an \"a+bi\" string")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<JsonComplex, E> {
        Ok(JsonComplex(C64::new(v, 0.0)))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<JsonComplex, E> {
        Ok(JsonComplex(C64::new(v as f64, 0.0)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<JsonComplex, E> {
        Ok(JsonComplex(C64::new(v as f64, 0.0)))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<JsonComplex, E> {
        parse_complex(v).map(JsonComplex).map_err(de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for JsonComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        deserializer.deserialize_any(JsonComplexVisitor)
    }
}
