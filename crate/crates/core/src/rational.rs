//! Exact rationals for Mellin factor data.

use alloc::format;
use alloc::string::String;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::{Error, Result};

/// Exact rational number; slopes and offsets of gamma factors live here.
pub type Rational = num_rational::Ratio<i128>;

/// Shorthand constructor `p/q`.
pub fn rat(p: i128, q: i128) -> Rational {
    Rational::new(p, q)
}

pub fn int(p: i128) -> Rational {
    Rational::from_integer(p)
}

pub fn to_f64(r: &Rational) -> f64 {
    let n = *r.numer();
    let d = *r.denom();
    n as f64 / d as f64
}

/// Best rational approximation with denominator at most `max_den`, accepted
/// only when it reproduces `x` to within `1e-12·max(1,|x|)`.
pub fn from_f64(x: f64, max_den: i128) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let sign: i128 = if x < 0.0 { -1 } else { 1 };
    let ax = x.abs();
    // continued fraction convergents
    let (mut p0, mut q0, mut p1, mut q1): (i128, i128, i128, i128) = (0, 1, 1, 0);
    let mut v = ax;
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let ai = a as i128;
        let p2 = ai.checked_mul(p1)?.checked_add(p0)?;
        let q2 = ai.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let approx = p1 as f64 / q1 as f64;
        if (approx - ax).abs() <= 1e-12 * ax.max(1.0) {
            return Some(Rational::new(sign * p1, q1));
        }
        let frac = v - a;
        if frac < 1e-300 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 != 0 && ((p1 as f64 / q1 as f64) - ax).abs() <= 1e-12 * ax.max(1.0) {
        Some(Rational::new(sign * p1, q1))
    } else {
        None
    }
}

/// Like [`from_f64`] with a denominator bound of 10⁶, as a `Result`.
pub fn exact(x: f64, what: &str) -> Result<Rational> {
    from_f64(x, 1_000_000).ok_or_else(|| {
        Error::Parameter(format!("{what} = {x} is not a small-denominator rational"))
    })
}

/// Formats as `"p/q"` (or `"p"` for integers).
pub fn format(r: &Rational) -> String {
    if r.denom() == &1 {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"`, `"p"`, or a decimal literal such as `"0.25"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("bad rational '{s}'")))?;
        let d: i128 = d
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("bad rational '{s}'")))?;
        if d.is_zero() {
            return Err(Error::Parameter(format!("zero denominator in '{s}'")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = s.parse::<i128>() {
        return Ok(Rational::from_integer(n));
    }
    // decimal: scale by a power of ten
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = fp.len() as u32;
        if digits <= 18 && fp.chars().all(|c| c.is_ascii_digit()) {
            let ip_abs: i128 = ip.trim_start_matches(['-', '+']).parse().unwrap_or(0);
            let fp_v: i128 = if fp.is_empty() {
                0
            } else {
                fp.parse()
                    .map_err(|_| Error::Parameter(format!("bad rational '{s}'")))?
            };
            let den = 10i128.pow(digits);
            let num = ip_abs * den + fp_v;
            return Ok(Rational::new(if neg { -num } else { num }, den));
        }
    }
    Err(Error::Parameter(format!("bad rational '{s}'")))
}

/// Serde adapter: a rational as a `"p/q"` string.
#[cfg(feature = "serde")]
pub mod serde_str {
    use super::Rational;
    use alloc::string::String;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(de)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a list of rationals.
#[cfg(feature = "serde")]
pub mod serde_vec_str {
    use super::Rational;
    use alloc::string::String;
    use alloc::vec::Vec;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], ser: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(super::format).collect();
        strs.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Rational>, D::Error> {
        let strs = Vec::<String>::deserialize(de)?;
        strs.iter()
            .map(|s| super::parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn approximates_simple_fractions() {
        assert_eq!(from_f64(1.5, 1000), Some(rat(3, 2)));
        assert_eq!(from_f64(-0.25, 1000), Some(rat(-1, 4)));
        assert_eq!(from_f64(2.0 / 3.0, 1000), Some(rat(2, 3)));
        assert_eq!(from_f64(1.2, 1000), Some(rat(6, 5)));
        assert_eq!(from_f64(core::f64::consts::PI, 1000), None);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse("-2").unwrap(), int(-2));
        assert_eq!(parse("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse("-1.5").unwrap(), rat(-3, 2));
        assert!(parse("1/0").is_err());
        assert_eq!(format(&rat(6, 4)), "3/2");
        assert_eq!(format(&int(7)), "7");
    }
}
