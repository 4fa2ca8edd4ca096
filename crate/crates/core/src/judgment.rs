//! Pairwise judgment values on the 1-9 intensity scale.
//!
//! A [`Judgment`] is an exact positive rational. Values are kept as reduced
//! fractions so that `1/3` never drifts to `0.333…` on its way through a
//! model file.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest intensity on the fundamental scale.
pub const MAX_INTENSITY: u64 = 9;

/// Which judgment values a model admits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleMode {
    /// Only `k` or `1/k` with `1 <= k <= 9`.
    #[default]
    Saaty,
    /// Any positive rational.
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JudgmentError {
    #[error("cannot parse judgment {0:?}: expected \"k\" or \"1/k\"")]
    Parse(String),
    #[error("judgment must be positive")]
    NonPositive,
    #[error("judgment {0} is not on the 1-9 scale (use k or 1/k with k in 1..=9)")]
    OffScale(Judgment),
}

/// Exact preference ratio `num/den`, always reduced and positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Judgment {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Judgment {
    pub const EQUAL: Judgment = Judgment { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self, JudgmentError> {
        if num == 0 || den == 0 {
            return Err(JudgmentError::NonPositive);
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    /// `k` on the fundamental scale.
    pub fn intensity(k: u64) -> Result<Self, JudgmentError> {
        Self::new(k, 1)?.on_scale()
    }

    /// `1/k` on the fundamental scale.
    pub fn inverse_intensity(k: u64) -> Result<Self, JudgmentError> {
        Self::new(1, k)?.on_scale()
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn reciprocal(self) -> Self {
        Self {
            num: self.den,
            den: self.num,
        }
    }

    pub fn is_on_scale(&self) -> bool {
        (self.num == 1 && self.den <= MAX_INTENSITY) || (self.den == 1 && self.num <= MAX_INTENSITY)
    }

    pub fn on_scale(self) -> Result<Self, JudgmentError> {
        if self.is_on_scale() {
            Ok(self)
        } else {
            Err(JudgmentError::OffScale(self))
        }
    }

    pub fn check(self, mode: ScaleMode) -> Result<Self, JudgmentError> {
        match mode {
            ScaleMode::Saaty => self.on_scale(),
            ScaleMode::Relaxed => Ok(self),
        }
    }

    /// The 17 scale positions from strongest preference for the row element
    /// (`9`) down to strongest preference for the column element (`1/9`).
    pub fn scale() -> impl Iterator<Item = Judgment> {
        let up = (1..=MAX_INTENSITY)
            .rev()
            .map(|k| Judgment { num: k, den: 1 });
        let down = (2..=MAX_INTENSITY).map(|k| Judgment { num: 1, den: k });
        up.chain(down)
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn parse_decimal(s: &str) -> Option<(u64, u64)> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num: u64 = digits.parse().ok()?;
    let den = 10u64.checked_pow(u32::try_from(frac.len()).ok()?)?;
    Some((num, den))
}

impl FromStr for Judgment {
    type Err = JudgmentError;

    /// Accepts `"k"`, `"p/q"` and plain decimals such as `"0.25"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse_err = || JudgmentError::Parse(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => {
                let (nn, nd) = parse_decimal(n.trim()).ok_or_else(parse_err)?;
                let (dn, dd) = parse_decimal(d.trim()).ok_or_else(parse_err)?;
                (
                    nn.checked_mul(dd).ok_or_else(parse_err)?,
                    nd.checked_mul(dn).ok_or_else(parse_err)?,
                )
            }
            None => parse_decimal(s).ok_or_else(parse_err)?,
        };
        Judgment::new(num, den)
    }
}

impl Serialize for Judgment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Judgment {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_reciprocals() {
        assert_eq!(
            "3".parse::<Judgment>().unwrap(),
            Judgment::new(3, 1).unwrap()
        );
        assert_eq!(
            " 1/7 ".parse::<Judgment>().unwrap(),
            Judgment::new(1, 7).unwrap()
        );
        assert_eq!("2/6".parse::<Judgment>().unwrap().to_string(), "1/3");
        assert_eq!("0.25".parse::<Judgment>().unwrap().to_string(), "1/4");
        assert_eq!("2.5".parse::<Judgment>().unwrap().to_string(), "5/2");
    }

    #[test]
    fn rejects_garbage_and_zero() {
        assert!(matches!(
            "".parse::<Judgment>(),
            Err(JudgmentError::Parse(_))
        ));
        assert!(matches!(
            "abc".parse::<Judgment>(),
            Err(JudgmentError::Parse(_))
        ));
        assert!(matches!(
            "-3".parse::<Judgment>(),
            Err(JudgmentError::Parse(_))
        ));
        assert!(matches!(
            "1/".parse::<Judgment>(),
            Err(JudgmentError::Parse(_))
        ));
        assert_eq!("0".parse::<Judgment>(), Err(JudgmentError::NonPositive));
        assert_eq!("3/0".parse::<Judgment>(), Err(JudgmentError::NonPositive));
    }

    #[test]
    fn scale_membership() {
        assert_eq!(Judgment::scale().count(), 17);
        assert!(Judgment::scale().all(|j| j.is_on_scale()));
        let ten: Judgment = "10".parse().unwrap();
        assert_eq!(
            ten.check(ScaleMode::Saaty),
            Err(JudgmentError::OffScale(ten))
        );
        assert_eq!(ten.check(ScaleMode::Relaxed), Ok(ten));
        assert!(!"3/2".parse::<Judgment>().unwrap().is_on_scale());
        assert!(Judgment::intensity(10).is_err());
        assert_eq!(Judgment::inverse_intensity(9).unwrap().to_string(), "1/9");
    }

    #[test]
    fn reciprocal_product_is_one() {
        for j in Judgment::scale() {
            assert!((j.value() * j.reciprocal().value() - 1.0).abs() < 1e-12);
            assert_eq!(j.reciprocal().reciprocal(), j);
        }
    }

    #[test]
    fn serializes_as_string() {
        let j = Judgment::inverse_intensity(3).unwrap();
        assert_eq!(serde_json::to_string(&j).unwrap(), "\"1/3\"");
        let back: Judgment = serde_json::from_str("\"1/3\"").unwrap();
        assert_eq!(back, j);
        assert!(serde_json::from_str::<Judgment>("0.5").is_err());
    }
}
