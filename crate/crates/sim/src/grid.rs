//! Parsing of sweep axes and flag lists.

use std::str::FromStr;

use yiarq::bounds::max_flag;

use crate::{Result, SimError};

fn parse_error(text: &str, reason: impl Into<String>) -> SimError {
    SimError::Parse {
        text: text.to_string(),
        reason: reason.into(),
    }
}

fn number(text: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| parse_error(text, "not a number"))?;
    if !v.is_finite() {
        return Err(parse_error(text, "not finite"));
    }
    Ok(v)
}

/// `start:step:stop` (inclusive), a comma list, or a single value.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(parse_error(text, "empty grid"));
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, step, stop] = parts[..] else {
            return Err(parse_error(text, "expected start:step:stop"));
        };
        let (start, step, stop) = (number(start)?, number(step)?, number(stop)?);
        if step <= 0.0 {
            return Err(parse_error(text, "step must be positive"));
        }
        if stop < start {
            return Err(parse_error(text, "stop is below start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    text.split(',').map(number).collect()
}

/// One entry of the flag list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlagSpec {
    /// A fixed flag value.
    Absolute(f64),
    /// `f·d_f·√(2E_c/N₀)`, recomputed for every cell; written `<f>u0`.
    FractionOfMax(f64),
}

impl FlagSpec {
    pub fn resolve(&self, ec_over_n0: f64, free_distance: usize) -> f64 {
        match *self {
            Self::Absolute(u) => u,
            Self::FractionOfMax(f) => f * max_flag(ec_over_n0, free_distance),
        }
    }
}

impl FromStr for FlagSpec {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let spec = match s.strip_suffix("u0") {
            Some("") => Self::FractionOfMax(1.0),
            Some(f) => Self::FractionOfMax(number(f)?),
            None => Self::Absolute(number(s)?),
        };
        match spec {
            Self::Absolute(v) | Self::FractionOfMax(v) if v < 0.0 => {
                Err(parse_error(s, "flag must be >= 0"))
            }
            _ => Ok(spec),
        }
    }
}

impl std::fmt::Display for FlagSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Absolute(u) => write!(f, "{u}"),
            Self::FractionOfMax(x) => write!(f, "{x}u0"),
        }
    }
}

/// Comma-separated flag list, e.g. `0,0.5u0,0.9u0`.
pub fn parse_flags(text: &str) -> Result<Vec<FlagSpec>> {
    text.split(',').map(str::parse).collect()
}
