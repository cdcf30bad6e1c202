//! Exact probabilities: parsing decimal or fractional strings into rationals
//! and printing them back without loss.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Prob = BigRational;

/// Parses `"0.125"`, `"1.5e-3"`, `"1/3"` or `"1"` into an exact rational.
pub fn parse_prob(text: &str) -> Result<Prob> {
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_decimal(n.trim())?;
        let d = parse_decimal(d.trim())?;
        if d.is_zero() {
            return Err(Error::Schema(format!("zero denominator in '{text}'")));
        }
        return Ok(n / d);
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Prob> {
    let bad = || Error::Schema(format!("not a decimal number: '{s}'"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(numer * ten.pow(scale as u32))
    } else {
        BigRational::new(numer, ten.pow((-scale) as u32))
    };
    if negative {
        r = -r;
    }
    Ok(r)
}

/// Exact conversion of a finite float (every finite f64 is a dyadic rational).
pub fn prob_from_f64(x: f64) -> Result<Prob> {
    BigRational::from_float(x).ok_or_else(|| Error::Schema(format!("non-finite number {x}")))
}

pub fn prob_to_f64(p: &Prob) -> f64 {
    p.to_f64().unwrap_or_else(|| if p.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Terminating decimals print as decimals, everything else as `a/b`.
pub fn prob_to_string(p: &Prob) -> String {
    let mut d = p.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut twos = 0u32;
    let mut fives = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", p.numer(), p.denom());
    }
    let places = twos.max(fives);
    let scaled = p * BigRational::from_integer(BigInt::from(10).pow(places));
    let mut digits = scaled.to_integer().abs().to_string();
    let negative = p.is_negative();
    if places == 0 {
        return if negative { format!("-{digits}") } else { digits };
    }
    let places = places as usize;
    if digits.len() <= places {
        digits = format!("{}{}", "0".repeat(places + 1 - digits.len()), digits);
    }
    let (i, f) = digits.split_at(digits.len() - places);
    format!("{}{}.{}", if negative { "-" } else { "" }, i, f)
}

/// Reads a JSON string or number as an exact rational.
pub fn prob_from_json(v: &Value, what: &str) -> Result<Prob> {
    match v {
        Value::String(s) => parse_prob(s).map_err(|e| Error::Schema(format!("{what}: {e}"))),
        Value::Number(n) => {
            // Re-parse the literal text so "0.1" stays exactly 1/10.
            parse_prob(&n.to_string()).map_err(|e| Error::Schema(format!("{what}: {e}")))
        }
        other => Err(Error::Schema(format!("{what}: expected a number or decimal string, got {other}"))),
    }
}

pub fn f64_from_json(v: &Value, what: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Schema(format!("{what}: not representable as f64"))),
        Value::String(s) => {
            let p = parse_prob(s).map_err(|e| Error::Schema(format!("{what}: {e}")))?;
            Ok(prob_to_f64(&p))
        }
        other => Err(Error::Schema(format!("{what}: expected a number, got {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Prob {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_decimals_fractions_and_exponents() {
        assert_eq!(parse_prob("0.125").unwrap(), r(1, 8));
        assert_eq!(parse_prob("1/3").unwrap(), r(1, 3));
        assert_eq!(parse_prob("1").unwrap(), r(1, 1));
        assert_eq!(parse_prob("2.5e-1").unwrap(), r(1, 4));
        assert_eq!(parse_prob(".5").unwrap(), r(1, 2));
        assert_eq!(parse_prob("-0.5").unwrap(), r(-1, 2));
        assert!(parse_prob("abc").is_err());
        assert!(parse_prob("1/0").is_err());
        assert!(parse_prob("").is_err());
    }

    #[test]
    fn prints_without_loss() {
        for s in ["0.125", "0.015625", "1/3", "11/14", "0", "1", "0.6875"] {
            let p = parse_prob(s).unwrap();
            assert_eq!(parse_prob(&prob_to_string(&p)).unwrap(), p, "{s}");
        }
        assert_eq!(prob_to_string(&r(3, 40)), "0.075");
        assert_eq!(prob_to_string(&r(1, 3)), "1/3");
    }

    #[test]
    fn json_numbers_keep_decimal_meaning() {
        let v: Value = serde_json::from_str("0.1").unwrap();
        assert_eq!(prob_from_json(&v, "x").unwrap(), r(1, 10));
    }
}
