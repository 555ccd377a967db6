//! Closed numeric intervals.
//!
//! An [`Interval`] is the currency for both assumptions (sensitivity,
//! selectivity, NPV) and results (prevalence, IFR). The upper endpoint may be
//! `f64::INFINITY`, which is how unbounded selectivity and unbounded IFR are
//! represented; it is never approximated by a large finite number.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval endpoint is NaN")]
    NotANumber,
    #[error("interval lower endpoint {lo} exceeds upper endpoint {hi}")]
    Reversed { lo: f64, hi: f64 },
    #[error("interval [{lo}, {hi}] is not contained in [0, 1]")]
    NotProbability { lo: f64, hi: f64 },
    #[error("selectivity interval [{lo}, {hi}] must have a nonnegative lower endpoint")]
    NegativeSelectivity { lo: f64, hi: f64 },
    #[error("cannot parse interval {0:?}: expected `lo:hi`")]
    Syntax(String),
}

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "endpoint")]
    pub lo: f64,
    #[serde(with = "endpoint")]
    pub hi: f64,
}

// JSON has no infinity; unbounded endpoints travel as the string "inf".
mod endpoint {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *x == f64::INFINITY {
            s.serialize_str("inf")
        } else if *x == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(de::Error::custom(format!("bad interval endpoint {other:?}"))),
            },
        }
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_nan() || hi.is_nan() {
            return Err(IntervalError::NotANumber);
        }
        if lo > hi {
            return Err(IntervalError::Reversed { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// An interval of probabilities, contained in `[0, 1]`.
    pub fn probability(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        let iv = Self::new(lo, hi)?;
        if lo < 0.0 || hi > 1.0 {
            return Err(IntervalError::NotProbability { lo, hi });
        }
        Ok(iv)
    }

    /// An interval of selectivity factors: `0 <= lo <= hi <= +inf`.
    pub fn selectivity(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        let iv = Self::new(lo, hi)?;
        if lo < 0.0 {
            return Err(IntervalError::NegativeSelectivity { lo, hi });
        }
        Ok(iv)
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// `[0, 1]`.
    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_probability(&self) -> bool {
        self.lo >= 0.0 && self.hi <= 1.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Intersection, or `None` when the intervals are disjoint.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Clamp both endpoints into `[0, 1]`.
    pub fn clip_unit(&self) -> Interval {
        Interval {
            lo: self.lo.clamp(0.0, 1.0),
            hi: self.hi.clamp(0.0, 1.0),
        }
    }

    /// Largest endpoint distance to `other`.
    pub fn max_endpoint_distance(&self, other: &Interval) -> f64 {
        (self.lo - other.lo).abs().max((self.hi - other.hi).abs())
    }
}

fn fmt_endpoint(x: f64, precision: Option<usize>) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        match precision {
            Some(p) => format!("{x:.p$}"),
            None => format!("{x}"),
        }
    }
}

impl Interval {
    /// Render as `[lo,hi]` with `digits` decimal places.
    pub fn display_rounded(&self, digits: usize) -> String {
        format!(
            "[{},{}]",
            fmt_endpoint(self.lo, Some(digits)),
            fmt_endpoint(self.hi, Some(digits))
        )
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            fmt_endpoint(self.lo, f.precision()),
            fmt_endpoint(self.hi, f.precision())
        )
    }
}

fn parse_endpoint(s: &str) -> Option<f64> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        other => other.parse::<f64>().ok().filter(|x| x.is_finite()),
    }
}

/// Parses the `lo:hi` syntax used on the command line; `inf` is accepted as
/// an upper endpoint. A single number parses as a point interval.
impl FromStr for Interval {
    type Err = IntervalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || IntervalError::Syntax(s.to_string());
        match s.split_once(':') {
            Some((lo, hi)) => {
                let lo = parse_endpoint(lo).ok_or_else(syntax)?;
                let hi = parse_endpoint(hi).ok_or_else(syntax)?;
                if lo == f64::INFINITY {
                    return Err(syntax());
                }
                Interval::new(lo, hi)
            }
            None => {
                let x = parse_endpoint(s).ok_or_else(syntax)?;
                if x.is_infinite() {
                    return Err(syntax());
                }
                Ok(Interval::point(x))
            }
        }
    }
}
