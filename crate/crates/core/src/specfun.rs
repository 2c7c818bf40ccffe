//! Special functions and quadrature.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::{Error, Result};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Gaussian tail probability `Q(x) = P(Z > x)` for a standard normal `Z`.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `1 − x·R(x)` where `R(x) = Q(x)/ϕ(x)` is the Mills ratio, for `x > 8`,
/// from the continued fraction `R(x) = 1/(x + 1/(x + 2/(x + 3/(x + …))))`.
fn one_minus_x_mills_tail(x: f64) -> f64 {
    // Backward evaluation; at x > 8, 60 levels are far past convergence.
    let mut tail = 0.0;
    for n in (2..=60).rev() {
        tail = n as f64 / (x + tail);
    }
    let c = 1.0 / (x + tail);
    c / (x + c)
}

/// `e^{x²/2}·Q(x)`, finite for every `x` where the product is representable.
pub fn scaled_q(x: f64) -> f64 {
    if x > 8.0 {
        // x·R(x) = 1 − c/(x + c)  ⇒  R(x) = (1 − tail)/x
        (1.0 - one_minus_x_mills_tail(x)) / x / SQRT_2PI
    } else {
        libm::exp(0.5 * x * x) * gaussian_q(x)
    }
}

/// `1 − √(2π)·x·e^{x²/2}·Q(x)`, the bracket shared by the Gaussian moment
/// integral and Λ(θ). Positive for every `x`.
pub fn moment_bracket(x: f64) -> f64 {
    if x > 8.0 {
        one_minus_x_mills_tail(x)
    } else {
        1.0 - SQRT_2PI * x * scaled_q(x)
    }
}

/// Largest `|x|` accepted by [`bessel_i0`]; I₀(713.98…) overflows an `f64`.
pub const BESSEL_I0_LIMIT: f64 = 700.0;

/// Modified Bessel function of the first kind, order zero, by its power series
/// `Σ (x²/4)^k / (k!)²`.
pub fn bessel_i0(x: f64) -> Result<f64> {
    if !(x.abs() <= BESSEL_I0_LIMIT) {
        return Err(Error::OutOfRange {
            x,
            limit: BESSEL_I0_LIMIT,
        });
    }
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * k);
        sum += term;
        if term < 1e-17 * sum {
            return Ok(sum);
        }
    }
}

/// Upper integration limit of [`phi`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpperLimit {
    Finite(f64),
    Infinite,
}

/// `φ(Φ₁, Φ₂, z) = ∫₀^z α·exp(−Φ₁α² − Φ₂α) dα` in closed form.
pub fn phi(phi1: f64, phi2: f64, upper: UpperLimit) -> Result<f64> {
    if !(phi1 > 0.0) || !phi1.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!(
            "Φ1 must be positive and finite, got {phi1}"
        )));
    }
    if !phi2.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!(
            "Φ2 must be finite, got {phi2}"
        )));
    }
    let root = libm::sqrt(2.0 * phi1);
    let x = phi2 / root;
    let complete = moment_bracket(x) / (2.0 * phi1);
    match upper {
        UpperLimit::Infinite => Ok(complete),
        UpperLimit::Finite(z) => {
            if !(z > 0.0) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "upper limit must be positive, got {z}"
                )));
            }
            if z.is_infinite() {
                return Ok(complete);
            }
            // ∫_z^∞ in the same closed form, shifted to w = x + √(2Φ₁)·z.
            let w = x + root * z;
            let exponent = -phi1 * z * z - phi2 * z;
            let tail = libm::exp(exponent) * (1.0 - SQRT_2PI * x * scaled_q(w)) / (2.0 * phi1);
            Ok((complete - tail).max(0.0))
        }
    }
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 50,
        }
    }
}

impl QuadratureSettings {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) || max_depth < 1 {
            return Err(Error::InvalidParameter(alloc::format!(
                "tolerances must be positive and depth >= 1 (abs {abs_tol}, rel {rel_tol}, depth {max_depth})"
            )));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_depth,
        })
    }
}

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
}

struct Simpson<'a, F> {
    f: &'a F,
    max_depth: u32,
    exhausted: bool,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    // `width` is carried separately from `b − a`: once the endpoints are
    // quantised, the rounded difference would put a constant floor under `delta`.
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        width: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> (f64, f64) {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let h = width / 12.0;
        let left = h * (fa + 4.0 * flm + fm);
        let right = h * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return (left + right + delta / 15.0, delta.abs() / 15.0);
        }
        if depth >= self.max_depth || m <= a || m >= b {
            self.exhausted = true;
            return (left + right + delta / 15.0, delta.abs() / 15.0);
        }
        let (lv, le) = self.refine(a, m, 0.5 * width, fa, flm, fm, left, 0.5 * tol, depth + 1);
        let (rv, re) = self.refine(m, b, 0.5 * width, fm, frm, fb, right, 0.5 * tol, depth + 1);
        (lv + rv, le + re)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// The target is `max(abs_tol, rel_tol·|I|)` with `|I|` taken from a
/// 33-point composite Simpson pre-estimate.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<Quadrature> {
    if !(a <= b) {
        return Err(Error::InvalidParameter(alloc::format!(
            "integration bounds must satisfy a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    const PANELS: usize = 16;
    let width = (b - a) / PANELS as f64;
    let mut coarse = 0.0;
    let mut nodes = [0.0f64; 2 * PANELS + 1];
    for (i, node) in nodes.iter_mut().enumerate() {
        *node = f(a + 0.5 * width * i as f64);
    }
    for p in 0..PANELS {
        coarse += width / 6.0 * (nodes[2 * p] + 4.0 * nodes[2 * p + 1] + nodes[2 * p + 2]);
    }
    if !coarse.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    let tol = settings.abs_tol.max(settings.rel_tol * coarse.abs());
    let mut simpson = Simpson {
        f: &f,
        max_depth: settings.max_depth,
        exhausted: false,
    };
    let mut value = 0.0;
    let mut error_estimate = 0.0;
    for p in 0..PANELS {
        let lo = a + width * p as f64;
        let hi = if p + 1 == PANELS {
            b
        } else {
            a + width * (p + 1) as f64
        };
        let (fa, fm, fb) = (nodes[2 * p], nodes[2 * p + 1], nodes[2 * p + 2]);
        let whole = width / 6.0 * (fa + 4.0 * fm + fb);
        let (v, e) = simpson.refine(lo, hi, width, fa, fm, fb, whole, tol / PANELS as f64, 1);
        value += v;
        error_estimate += e;
    }
    if simpson.exhausted || !value.is_finite() {
        return Err(Error::NoConvergence {
            max_depth: settings.max_depth,
            error_estimate,
        });
    }
    Ok(Quadrature {
        value,
        error_estimate,
    })
}

/// I₀ through its integral representation `(1/π)∫₀^π e^{x cos θ} dθ`.
pub fn bessel_i0_by_quadrature(x: f64, settings: &QuadratureSettings) -> Result<f64> {
    let q = integrate(|t| libm::exp(x * libm::cos(t)), 0.0, PI, settings)?;
    Ok(q.value / PI)
}
