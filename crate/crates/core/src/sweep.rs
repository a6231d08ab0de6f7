//! `name=start:stop:step` parameter sweeps, inclusive of `stop`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest number of points one sweep may expand to.
pub const MAX_SWEEP_POINTS: usize = 1_000_000;
/// Absorbs rounding so that `0:0.8:0.1` includes 0.8.
const COUNT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Decimal places written in the bounds and step; values are rounded to
    /// this many places so `0:0.8:0.1` yields 0.3, not 0.30000000000000004.
    /// `None` when any of them used exponent notation.
    pub decimals: Option<usize>,
}

fn decimal_places(s: &str) -> Option<usize> {
    let s = s.trim();
    if s.contains(['e', 'E']) {
        return None;
    }
    Some(s.split_once('.').map_or(0, |(_, frac)| frac.len()))
}

fn bad(text: &str, why: &str) -> Error {
    Error::InvalidParameter(format!("sweep `{text}`: {why}"))
}

impl SweepSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let (name, range) = text
            .split_once('=')
            .ok_or_else(|| bad(text, "expected name=start:stop:step"))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(bad(text, "empty parameter name"));
        }
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(bad(text, "expected three `:`-separated numbers"));
        };
        let num = |s: &str| -> Result<f64> {
            let v: f64 = s.trim().parse().map_err(|_| bad(text, &format!("`{s}` is not a number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad(text, "values must be finite"))
            }
        };
        let spec = Self {
            name: name.to_string(),
            start: num(start)?,
            stop: num(stop)?,
            step: num(step)?,
            decimals: [start, stop, step]
                .iter()
                .map(|s| decimal_places(s))
                .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
                .filter(|&d| d <= 15),
        };
        spec.count()?;
        Ok(spec)
    }

    pub fn count(&self) -> Result<usize> {
        let text = self.to_string();
        if !(self.step > 0.0) {
            return Err(bad(&text, "step must be positive"));
        }
        if self.stop < self.start {
            return Err(bad(&text, "stop must not be below start"));
        }
        let n = ((self.stop - self.start) / self.step + COUNT_SLACK).floor();
        if !(n.is_finite() && n < MAX_SWEEP_POINTS as f64) {
            return Err(bad(&text, &format!("more than {MAX_SWEEP_POINTS} points")));
        }
        Ok(n as usize + 1)
    }

    /// `start + i * step`; the last point is snapped to `stop` when within slack.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count().unwrap_or(0);
        (0..n)
            .map(|i| {
                let mut v = self.start + i as f64 * self.step;
                if let Some(d) = self.decimals {
                    v = format!("{v:.d$}").parse().expect("formatted float parses");
                }
                if i + 1 == n && (v - self.stop).abs() <= COUNT_SLACK * self.step {
                    self.stop
                } else {
                    v
                }
            })
            .collect()
    }
}

impl FromStr for SweepSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}:{}:{}", self.name, self.start, self.stop, self.step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_ranges() {
        let s = SweepSpec::parse("L=6.5:7.5:0.25").unwrap();
        assert_eq!(s.values(), vec![6.5, 6.75, 7.0, 7.25, 7.5]);
        let w = SweepSpec::parse("width_ratio=0:0.8:0.1").unwrap();
        let v = w.values();
        assert_eq!(v.len(), 9);
        assert_eq!(*v.last().unwrap(), 0.8);
        assert_eq!(v[3], 0.3);
        assert_eq!(v[7], 0.7);
    }

    #[test]
    fn exponent_bounds_are_not_rounded() {
        let s = SweepSpec::parse("x=0:1e-3:2.5e-4").unwrap();
        assert_eq!(s.decimals, None);
        assert_eq!(s.values().len(), 5);
    }

    #[test]
    fn single_point() {
        assert_eq!(SweepSpec::parse("h=4:4:1").unwrap().values(), vec![4.0]);
    }

    #[test]
    fn malformed_rejected() {
        for s in ["", "L", "=1:2:3", "L=1:2", "L=1:2:0", "L=2:1:0.5", "L=a:2:1", "L=0:1:1e-12", "L=0:inf:1"] {
            assert!(SweepSpec::parse(s).is_err(), "{s}");
        }
    }
}
