//! Serde helpers that write 0-based indices as the 1-based labels used in files.

use serde::ser::{SerializeSeq, Serializer};

pub(crate) fn one<S: Serializer>(v: &usize, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(*v as u64 + 1)
}

pub(crate) fn many<S: Serializer>(v: &[usize], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&(x + 1))?;
    }
    seq.end()
}

pub(crate) fn pairs<S: Serializer>(v: &[(usize, usize)], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (a, b) in v {
        seq.serialize_element(&[a + 1, b + 1])?;
    }
    seq.end()
}

pub(crate) fn opt<S: Serializer>(v: &Option<usize>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&(x + 1)),
        None => s.serialize_none(),
    }
}

/// Log values with `-inf`/`inf` written as strings (JSON has no infinities).
pub(crate) fn ln<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub(crate) fn prob<S: Serializer>(v: &crate::prob::Prob, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&crate::prob::prob_to_string(v))
}

pub(crate) fn prob_rows<S: Serializer>(v: &[Vec<crate::prob::Prob>], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = v.iter().map(|r| r.iter().map(crate::prob::prob_to_string).collect()).collect();
    serde::Serialize::serialize(&rows, s)
}

pub(crate) fn prob_column<S: Serializer>(v: &[crate::prob::Prob], s: S) -> Result<S::Ok, S::Error> {
    let row: Vec<String> = v.iter().map(crate::prob::prob_to_string).collect();
    serde::Serialize::serialize(&row, s)
}
