//! Union bounds and exponent predictions for Yamamoto-Itoh Viterbi decoding
//! on ideally interleaved Rician fading.
//!
//! Every bound is a power series in the per-symbol factor
//!
//! ```text
//! D̃ = E[exp(−½(√(2E_c/N₀) + u/d_f)²·α²)] = (e^{−γ}/π) ∫₀^π Λ(θ) dθ
//! ```
//!
//! weighted by the transfer-function coefficients `a_k` (first-event and
//! retransmission bounds, the latter at `−u`) or `c_k` (bit error bound).

use alloc::format;

use crate::convcode::{TransferCoefficients, INPUT_BITS_PER_BRANCH};
use crate::specfun::{self, QuadratureSettings};
use crate::{Error, Result};

/// Largest flag for which the retransmission bound is defined,
/// `d_f·√(2E_c/N₀)`.
pub fn max_flag(ec_over_n0: f64, free_distance: usize) -> f64 {
    free_distance as f64 * libm::sqrt(2.0 * ec_over_n0)
}

/// Channel and decoder parameters entering the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    ec_over_n0: f64,
    u: f64,
    free_distance: usize,
    sigma: f64,
    s: f64,
}

impl BoundParams {
    pub fn new(ec_over_n0: f64, u: f64, free_distance: usize, sigma: f64, s: f64) -> Result<Self> {
        if !(ec_over_n0 > 0.0) || !ec_over_n0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "E_c/N0 must be positive, got {ec_over_n0}"
            )));
        }
        if !(u >= 0.0) || !u.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "flag u must be >= 0, got {u}"
            )));
        }
        if free_distance == 0 {
            return Err(Error::InvalidParameter("free distance must be >= 1".into()));
        }
        if !(sigma > 0.0) || !(s >= 0.0) || !sigma.is_finite() || !s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need sigma > 0 and s >= 0, got sigma {sigma}, s {s}"
            )));
        }
        Ok(Self {
            ec_over_n0,
            u,
            free_distance,
            sigma,
            s,
        })
    }

    /// From the Rician factor and `σ²`, with `s = σ√(2γ)`.
    pub fn from_gamma(
        ec_over_n0: f64,
        u: f64,
        free_distance: usize,
        gamma: f64,
        sigma2: f64,
    ) -> Result<Self> {
        if !(gamma >= 0.0) || !(sigma2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need gamma >= 0 and sigma² > 0, got gamma {gamma}, sigma² {sigma2}"
            )));
        }
        let sigma = libm::sqrt(sigma2);
        Self::new(
            ec_over_n0,
            u,
            free_distance,
            sigma,
            sigma * libm::sqrt(2.0 * gamma),
        )
    }

    pub fn ec_over_n0(&self) -> f64 {
        self.ec_over_n0
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn free_distance(&self) -> usize {
        self.free_distance
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn gamma(&self) -> f64 {
        self.s * self.s / (2.0 * self.sigma2())
    }

    /// Same parameters with another flag value; negative values give the
    /// retransmission-side quantities.
    pub fn with_flag(&self, u: f64) -> Self {
        Self { u, ..*self }
    }

    /// `√(2E_c/N₀) + u/d_f`.
    pub fn effective_amplitude(&self) -> f64 {
        libm::sqrt(2.0 * self.ec_over_n0) + self.u / self.free_distance as f64
    }

    /// `A = ½(√(2E_c/N₀) + u/d_f)² + 1/(2σ²)`.
    pub fn a(&self) -> f64 {
        let g = self.effective_amplitude();
        0.5 * g * g + 0.5 / self.sigma2()
    }

    /// `B_θ = −s·cos θ / σ²`.
    pub fn b(&self, theta: f64) -> f64 {
        -self.s * libm::cos(theta) / self.sigma2()
    }

    /// Whether `u < d_f√(2E_c/N₀)`, so that the flag-reduced amplitude
    /// `√(2E_c/N₀) − u/d_f` stays positive.
    pub fn retransmission_bound_defined(&self) -> bool {
        self.u < max_flag(self.ec_over_n0, self.free_distance)
    }
}

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// `Λ(θ) = (1/(2Aσ²))·[1 − (B_θ√(2π)/√(2A))·e^{B_θ²/4A}·Q(B_θ/√(2A))]`.
///
/// Overflows to infinity once `B_θ²/4A` exceeds the `f64` exponent range;
/// [`d_tilde`] evaluates `e^{−γ}Λ(θ)` instead, which stays finite.
pub fn lambda_theta(theta: f64, params: &BoundParams) -> f64 {
    let a = params.a();
    let x = params.b(theta) / libm::sqrt(2.0 * a);
    specfun::moment_bracket(x) / (2.0 * a * params.sigma2())
}

/// `e^{−γ}·Λ(θ)` with the `e^{−γ}` folded into the exponent.
fn lambda_theta_damped(theta: f64, params: &BoundParams) -> f64 {
    let a = params.a();
    let x = params.b(theta) / libm::sqrt(2.0 * a);
    let gamma = params.gamma();
    let bracket = if x < 0.0 {
        // x²/2 − γ = γ(cos²θ/(2Aσ²) − 1) ≤ 0 since 2Aσ² > 1.
        libm::exp(-gamma) - SQRT_2PI * x * libm::exp(0.5 * x * x - gamma) * specfun::gaussian_q(x)
    } else {
        libm::exp(-gamma) * specfun::moment_bracket(x)
    };
    bracket / (2.0 * a * params.sigma2())
}

/// Quadrature settings used for `∫Λ`.
pub const D_TILDE_QUADRATURE: QuadratureSettings = QuadratureSettings {
    abs_tol: 1e-12,
    rel_tol: 1e-10,
    max_depth: 50,
};

/// `D̃ = (1/π)·e^{−γ}·∫₀^π Λ(θ) dθ`.
///
/// Λ is largest at θ = 0, so the integrand is normalised by its value there
/// and the tolerances apply to that O(1) profile.
pub fn d_tilde(params: &BoundParams) -> Result<f64> {
    let peak = lambda_theta_damped(0.0, params);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let profile = specfun::integrate(
        |theta| lambda_theta_damped(theta, params) / peak,
        0.0,
        core::f64::consts::PI,
        &D_TILDE_QUADRATURE,
    )?;
    Ok(peak * profile.value / core::f64::consts::PI)
}

/// Conditional pairwise error probability of a weight-`k` competitor,
/// `q_k(u) = Q[(√(2E_c/N₀) + u/d_f)·√(Σ α_r²)]`, for a signed flag.
pub fn pairwise_probability(u: f64, alpha_energy: f64, params: &BoundParams) -> f64 {
    let g = libm::sqrt(2.0 * params.ec_over_n0) + u / params.free_distance as f64;
    specfun::gaussian_q(g * libm::sqrt(alpha_energy))
}

/// Union bounds on first-event, bit error and retransmission probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    /// `D̃(u)`.
    pub d_tilde: f64,
    /// `D̃(−u)`, when the retransmission bound is defined.
    pub d_tilde_retx: Option<f64>,
    /// First-event error bound `P_e`.
    pub pe: f64,
    /// Bit error bound `P_b`.
    pub pb: f64,
    /// Retransmission bound `P_x`, when `u < d_f√(2E_c/N₀)`.
    pub px: Option<f64>,
    /// Weights summed: `k_first ..= k_last`.
    pub k_first: usize,
    pub k_last: usize,
    /// Last weight with exact coefficients; beyond it the `4^k` envelope is used.
    pub k_exact: usize,
    /// Envelope contributions already included in `pe`, `pb`, `px`.
    pub tail_pe: f64,
    pub tail_pb: f64,
    pub tail_px: Option<f64>,
    /// Whether the values come from the closed-form transfer function.
    pub closed_form: bool,
}

struct Series {
    exact: f64,
    tail: f64,
}

fn series(
    d: f64,
    first: usize,
    exact_last: usize,
    last: usize,
    coeff: impl Fn(usize) -> f64,
    envelope: impl Fn(usize) -> f64,
) -> Series {
    let mut exact = 0.0;
    let mut tail = 0.0;
    let mut power = libm::pow(d, first as f64);
    for k in first..=last {
        if k <= exact_last {
            exact += coeff(k) * power;
        } else {
            tail += envelope(k) * power;
        }
        power *= d;
    }
    Series { exact, tail }
}

/// Finite-sum bounds over `k = d_f ..= n_c(H + m)`.
///
/// Weights above `coeffs.k_max()` use `a_k ≤ 4^k` and `c_k ≤ k·k_c·4^k`;
/// that part is reported separately in the `tail_*` fields.
pub fn union_bounds(
    coeffs: &TransferCoefficients,
    params: &BoundParams,
    info_len: usize,
    memory: usize,
    n_c: usize,
) -> Result<BoundReport> {
    let d_f = coeffs.free_distance();
    if d_f != params.free_distance {
        return Err(Error::Precondition(format!(
            "coefficients have d_f = {d_f} but the bound parameters use {}",
            params.free_distance
        )));
    }
    let k_last = n_c * (info_len + memory);
    let k_exact = coeffs.k_max().min(k_last);
    let a = |k: usize| coeffs.a(k) as f64;
    let c = |k: usize| coeffs.c(k) as f64;
    let a_env = |k: usize| libm::pow(4.0, k as f64);
    let c_env = |k: usize| (k * INPUT_BITS_PER_BRANCH) as f64 * libm::pow(4.0, k as f64);

    let d = d_tilde(params)?;
    let pe = series(d, d_f, k_exact, k_last, a, a_env);
    let pb = series(d, d_f, k_exact, k_last, c, c_env);
    let (d_retx, px) = if params.retransmission_bound_defined() {
        let dr = d_tilde(&params.with_flag(-params.u))?;
        (Some(dr), Some(series(dr, d_f, k_exact, k_last, a, a_env)))
    } else {
        (None, None)
    };
    Ok(BoundReport {
        d_tilde: d,
        d_tilde_retx: d_retx,
        pe: pe.exact + pe.tail,
        pb: pb.exact + pb.tail,
        px: px.as_ref().map(|s| s.exact + s.tail),
        k_first: d_f,
        k_last,
        k_exact,
        tail_pe: pe.tail,
        tail_pb: pb.tail,
        tail_px: px.as_ref().map(|s| s.tail),
        closed_form: false,
    })
}

/// Retransmission bound alone; fails when `u ≥ d_f√(2E_c/N₀)`.
pub fn retransmission_bound(
    coeffs: &TransferCoefficients,
    params: &BoundParams,
    info_len: usize,
    memory: usize,
    n_c: usize,
) -> Result<f64> {
    if !params.retransmission_bound_defined() {
        return Err(Error::Precondition(format!(
            "retransmission bound needs u < d_f·sqrt(2 E_c/N0) = {}, got u = {}",
            max_flag(params.ec_over_n0, params.free_distance),
            params.u
        )));
    }
    let report = union_bounds(coeffs, params, info_len, memory, n_c)?;
    Ok(report.px.expect("retransmission bound is defined"))
}

/// Closed-form bounds for the `(5,7)` code, `T(D, N) = D⁵N/(1 − 2DN)`:
/// `P_e ≤ D̃⁵/(1 − 2D̃)`, `P_b ≤ D̃⁵/(1 − 2D̃)²`, `P_x ≤ D̃(−u)⁵/(1 − 2D̃(−u))`.
/// The retransmission value is omitted when its series diverges.
pub fn closed_form_bounds(params: &BoundParams) -> Result<BoundReport> {
    if params.free_distance != 5 {
        return Err(Error::Precondition(format!(
            "closed form is for the (5,7) code with d_f = 5, got d_f = {}",
            params.free_distance
        )));
    }
    let d = d_tilde(params)?;
    if 2.0 * d >= 1.0 {
        return Err(Error::Divergent { ratio: 2.0 * d });
    }
    let d5 = libm::pow(d, 5.0);
    let (d_retx, px) = if params.retransmission_bound_defined() {
        let dr = d_tilde(&params.with_flag(-params.u))?;
        let px = (2.0 * dr < 1.0).then(|| libm::pow(dr, 5.0) / (1.0 - 2.0 * dr));
        (Some(dr), px)
    } else {
        (None, None)
    };
    Ok(BoundReport {
        d_tilde: d,
        d_tilde_retx: d_retx,
        pe: d5 / (1.0 - 2.0 * d),
        pb: d5 / ((1.0 - 2.0 * d) * (1.0 - 2.0 * d)),
        px,
        k_first: 5,
        k_last: usize::MAX,
        k_exact: usize::MAX,
        tail_pe: 0.0,
        tail_pb: 0.0,
        tail_px: px.map(|_| 0.0),
        closed_form: true,
    })
}

/// `h̃(u) = 1 − (1/σ²)·[(√(2E_c/N₀) + u/d_f)² + 1/σ²]^{−1}` for a signed flag.
pub fn h_tilde(u: f64, params: &BoundParams) -> f64 {
    let g = libm::sqrt(2.0 * params.ec_over_n0) + u / params.free_distance as f64;
    let v = params.sigma2();
    1.0 - 1.0 / (v * (g * g + 1.0 / v))
}

/// Asymptotic predictions used for regression checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPredictions {
    /// Log-log slope of `P_b` against `E_b/N₀`: `−d_f`.
    pub ebno_slope: f64,
    /// Lower bound on the γ-exponent of `P_b`: `d_f·h̃(u)`.
    pub gamma_exponent_pb: f64,
    /// Lower bound on the γ-exponent of `P_x`: `d_f·h̃(−u)`, when defined.
    pub gamma_exponent_px: Option<f64>,
}

pub fn exponent_predictions(params: &BoundParams) -> ExponentPredictions {
    let d_f = params.free_distance as f64;
    ExponentPredictions {
        ebno_slope: -d_f,
        gamma_exponent_pb: d_f * h_tilde(params.u, params),
        gamma_exponent_px: params
            .retransmission_bound_defined()
            .then(|| d_f * h_tilde(-params.u, params)),
    }
}
