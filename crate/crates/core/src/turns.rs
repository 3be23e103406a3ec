//! Boundary angles measured in turns (fractions of the full circle).
//!
//! Angles that arrive as exact fractions (`"1/3"`) stay exact so that comparisons
//! against dyadic endpoints `k / 2^m` are decided in integer arithmetic.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};

/// Tolerance applied when a floating-point endpoint is compared against a dyadic one.
pub const FLOAT_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Turns {
    Exact(Ratio<i64>),
    Approx(f64),
}

impl Turns {
    pub fn exact(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(invalid("angle_turns", "zero denominator"));
        }
        Ok(Turns::Exact(Ratio::new(num, den)))
    }

    pub fn approx(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(invalid("angle_turns", format!("not finite: {x}")));
        }
        Ok(Turns::Approx(x))
    }

    pub fn from_radians(theta: f64) -> Result<Self> {
        Self::approx(theta / TAU)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Turns::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match *self {
            Turns::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Turns::Approx(x) => x,
        }
    }

    pub fn radians(&self) -> f64 {
        TAU * self.to_f64()
    }

    /// Representative in `[0, 1)`.
    pub fn normalized(&self) -> Turns {
        match *self {
            Turns::Exact(r) => {
                let f = r - Ratio::from_integer(r.floor().to_integer());
                Turns::Exact(f)
            }
            Turns::Approx(x) => {
                let f = x.rem_euclid(1.0);
                Turns::Approx(if f >= 1.0 { 0.0 } else { f })
            }
        }
    }

    pub fn shifted(&self, whole_turns: i64) -> Turns {
        match *self {
            Turns::Exact(r) => Turns::Exact(r + Ratio::from_integer(whole_turns)),
            Turns::Approx(x) => Turns::Approx(x + whole_turns as f64),
        }
    }

    /// Compares against the dyadic rational `num / 2^level`. Floating values within
    /// [`FLOAT_GUARD`] of the dyadic value compare `Equal`.
    pub fn cmp_dyadic(&self, num: i64, level: u32) -> Ordering {
        match *self {
            Turns::Exact(r) => {
                // r.numer / r.denom  vs  num / 2^level, denominators positive
                let lhs = (*r.numer() as i128) << level;
                let rhs = num as i128 * *r.denom() as i128;
                lhs.cmp(&rhs)
            }
            Turns::Approx(x) => {
                let d = num as f64 * (-(level as f64)).exp2();
                if (x - d).abs() <= FLOAT_GUARD {
                    Ordering::Equal
                } else if x < d {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    /// Exact comparison when both are exact; guarded float comparison otherwise.
    pub fn cmp_guarded(&self, other: &Turns) -> Ordering {
        match (self, other) {
            (Turns::Exact(a), Turns::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                if (a - b).abs() <= FLOAT_GUARD {
                    Ordering::Equal
                } else {
                    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
                }
            }
        }
    }

    /// Difference `self - other` in turns.
    pub fn minus(&self, other: &Turns) -> f64 {
        match (self, other) {
            (Turns::Exact(a), Turns::Exact(b)) => {
                let d = *a - *b;
                *d.numer() as f64 / *d.denom() as f64
            }
            _ => self.to_f64() - other.to_f64(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let num: i64 = n
                .trim()
                .parse()
                .map_err(|_| invalid("angle_turns", format!("bad numerator in {s:?}")))?;
            let den: i64 = d
                .trim()
                .parse()
                .map_err(|_| invalid("angle_turns", format!("bad denominator in {s:?}")))?;
            return Self::exact(num, den);
        }
        if let Ok(n) = s.parse::<i64>() {
            return Self::exact(n, 1);
        }
        let x: f64 = s
            .parse()
            .map_err(|_| invalid("angle_turns", format!("not a number or fraction: {s:?}")))?;
        Self::approx(x)
    }
}

impl fmt::Display for Turns {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Turns::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Turns::Approx(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Turns {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match self {
            Turns::Exact(_) => s.serialize_str(&self.to_string()),
            Turns::Approx(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Turns {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Num(x) => Turns::approx(x),
            Raw::Str(s) => Turns::parse(&s),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(Turns::parse("1/3").unwrap(), Turns::exact(1, 3).unwrap());
        assert_eq!(Turns::parse("0").unwrap(), Turns::exact(0, 1).unwrap());
        assert_eq!(Turns::parse("0.25").unwrap(), Turns::Approx(0.25));
        assert!(Turns::parse("1/0").is_err());
        assert!(Turns::parse("abc").is_err());
    }

    #[test]
    fn dyadic_comparison_is_exact() {
        let third = Turns::exact(1, 3).unwrap();
        // 1/3 lies between 5/16 and 6/16
        assert_eq!(third.cmp_dyadic(5, 4), Ordering::Greater);
        assert_eq!(third.cmp_dyadic(6, 4), Ordering::Less);
        assert_eq!(
            Turns::exact(3, 8).unwrap().cmp_dyadic(6, 4),
            Ordering::Equal
        );
        assert_eq!(
            Turns::Approx(0.375 + 1e-14).cmp_dyadic(6, 4),
            Ordering::Equal
        );
    }

    #[test]
    fn normalization() {
        assert_eq!(
            Turns::exact(-1, 4).unwrap().normalized(),
            Turns::exact(3, 4).unwrap()
        );
        assert_eq!(Turns::Approx(1.25).normalized(), Turns::Approx(0.25));
    }

    #[test]
    fn json_forms() {
        let t: Turns = serde_json::from_str("\"3/8\"").unwrap();
        assert_eq!(t, Turns::exact(3, 8).unwrap());
        assert_eq!(serde_json::to_string(&t).unwrap(), "\"3/8\"");
        let u: Turns = serde_json::from_str("0.5").unwrap();
        assert_eq!(u, Turns::Approx(0.5));
    }
}
