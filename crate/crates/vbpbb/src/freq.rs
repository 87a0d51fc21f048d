//! Rational frequencies in cycles per observation.
//!
//! Component frequencies are ratios `j/P`: the `j`-th harmonic of a cycle
//! whose fundamental period is `P` observations. The ratio is deliberately
//! kept unreduced — `2/30` and `1/15` have the same numeric value, but only
//! the former records that the component lives on a 30-day cycle, which is
//! what the phase partition needs.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A frequency `harmonic / period`, e.g. `1/365` for one cycle per year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frequency {
    harmonic: u32,
    period: u32,
}

impl Frequency {
    /// Builds `harmonic/period` without reducing the ratio.
    pub fn new(harmonic: u32, period: u32) -> Result<Self, Error> {
        if harmonic == 0 {
            return Err(Error::InvalidArgument(
                "frequency numerator must be at least 1".into(),
            ));
        }
        if period == 0 {
            return Err(Error::InvalidArgument(
                "frequency period must be at least 1".into(),
            ));
        }
        Ok(Frequency { harmonic, period })
    }

    /// Harmonic order `j` (the numerator).
    pub fn harmonic(&self) -> u32 {
        self.harmonic
    }

    /// Fundamental period `P` in observations (the denominator).
    pub fn period(&self) -> u32 {
        self.period
    }

    /// Numeric value in cycles per observation.
    pub fn value(&self) -> f64 {
        f64::from(self.harmonic) / f64::from(self.period)
    }

    /// Period of this harmonic itself (`P/j`), exact only when `j` divides `P`.
    pub fn harmonic_period(&self) -> f64 {
        f64::from(self.period) / f64::from(self.harmonic)
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.harmonic, self.period)
    }
}

impl FromStr for Frequency {
    type Err = Error;

    /// Parses `"j/P"`; a bare integer `"j"` is read as `j/1`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = |reason: &str| Error::InvalidFrequency {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let trimmed = s.trim();
        let (num_text, den_text) = match trimmed.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (trimmed, "1"),
        };
        let harmonic: u32 = num_text
            .parse()
            .map_err(|_| bad("numerator is not a positive integer"))?;
        let period: u32 = den_text
            .parse()
            .map_err(|_| bad("denominator is not a positive integer"))?;
        Frequency::new(harmonic, period).map_err(|_| bad("numerator and denominator must be >= 1"))
    }
}

impl Serialize for Frequency {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Frequency {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational() {
        let f: Frequency = "1/365".parse().unwrap();
        assert_eq!(f.harmonic(), 1);
        assert_eq!(f.period(), 365);
        assert!((f.value() - 1.0 / 365.0).abs() < 1e-15);
    }

    #[test]
    fn keeps_ratio_unreduced() {
        let f: Frequency = "2/30".parse().unwrap();
        assert_eq!(f.harmonic(), 2);
        assert_eq!(f.period(), 30);
        assert_eq!(f.to_string(), "2/30");
    }

    #[test]
    fn bare_integer_is_over_one() {
        let f: Frequency = "3".parse().unwrap();
        assert_eq!((f.harmonic(), f.period()), (3, 1));
    }

    #[test]
    fn rejects_zero_and_garbage() {
        assert!("0/7".parse::<Frequency>().is_err());
        assert!("1/0".parse::<Frequency>().is_err());
        assert!("-1/7".parse::<Frequency>().is_err());
        assert!("a/b".parse::<Frequency>().is_err());
        assert!("1/7/2".parse::<Frequency>().is_err());
    }

    #[test]
    fn tolerates_whitespace() {
        let f: Frequency = " 1 / 7 ".parse().unwrap();
        assert_eq!((f.harmonic(), f.period()), (1, 7));
    }

    #[test]
    fn serde_round_trip() {
        let f: Frequency = "2/7".parse().unwrap();
        let json = serde_json_style(&f);
        assert_eq!(json, "\"2/7\"");
    }

    fn serde_json_style(f: &Frequency) -> String {
        // toml::Value serializes strings with quotes, which is enough to
        // confirm the string-codec round trip without another dev-dependency.
        let value = toml::Value::try_from(f).unwrap();
        value.to_string()
    }
}
