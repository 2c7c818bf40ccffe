//! Binomial proportions with Wilson score intervals.

use crate::{Result, SimError};

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub k: u64,
    pub n: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Wilson 95% interval for `k` events out of `n`. The endpoints are pinned
/// to 0 for `k = 0` and to 1 for `k = n`.
pub fn estimate(k: u64, n: u64) -> Result<Estimate> {
    if n == 0 {
        return Err(SimError::Config(
            "an estimate needs at least one trial".into(),
        ));
    }
    if k > n {
        return Err(SimError::Config(format!("{k} events out of {n} trials")));
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = WILSON_Z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let ci_low = if k == 0 {
        0.0
    } else {
        (centre - half).max(0.0).min(p)
    };
    let ci_high = if k == n {
        1.0
    } else {
        (centre + half).min(1.0).max(p)
    };
    Ok(Estimate {
        k,
        n,
        p_hat: p,
        ci_low,
        ci_high,
    })
}
