//! Serialization helpers shared by trace and analysis reports: exact
//! rationals travel as "p/q" strings.

use serde::Serializer;

use crate::weight::{format_fraction, Rat};

pub fn ser_rat<S: Serializer>(value: &Rat, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&format_fraction(value))
}

pub fn ser_opt_rat<S: Serializer>(value: &Option<Rat>, serializer: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => serializer.serialize_some(&format_fraction(v)),
        None => serializer.serialize_none(),
    }
}
