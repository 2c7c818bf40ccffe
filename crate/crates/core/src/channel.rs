//! Interleaved flat Rician fading with AWGN.
//!
//! Received samples are expressed in noise units: the noise variance `N₀/2`
//! is fixed to [`NOISE_VARIANCE`], so a symbol-energy ratio `E_c/N₀` maps to
//! the amplitude `√E_c = √(2·NOISE_VARIANCE·E_c/N₀)`.

use alloc::format;
use alloc::vec::Vec;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use crate::specfun;
use crate::{Error, Result};

/// Per-sample noise variance `N₀/2`.
pub const NOISE_VARIANCE: f64 = 1.0;

/// Identifier of the generator behind [`RandomStream`], recorded in outputs.
pub const RNG_ALGORITHM_ID: &str = "chacha20-rand_chacha0.9-seed_from_u64+stream";

/// Converts decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * libm::log10(ratio)
}

/// `E_c/N₀ = (E_b/N₀)·R_c·H/(H + m)`: tail bits and rate loss spread the
/// bit energy over `n_c (H + m)` coded symbols.
pub fn ebno_to_ecno(eb_over_n0: f64, info_len: usize, memory: usize, rate: f64) -> f64 {
    eb_over_n0 * rate * info_len as f64 / (info_len + memory) as f64
}

/// Inverse of [`ebno_to_ecno`].
pub fn ecno_to_ebno(ec_over_n0: f64, info_len: usize, memory: usize, rate: f64) -> f64 {
    ec_over_n0 * (info_len + memory) as f64 / (info_len as f64 * rate)
}

/// Symbol SNR and Rician envelope parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    ec_over_n0: f64,
    s: f64,
    sigma: f64,
}

impl ChannelParams {
    /// From the noncentrality `s` and scale `σ` of the envelope.
    pub fn new(ec_over_n0: f64, s: f64, sigma: f64) -> Result<Self> {
        if !(ec_over_n0 > 0.0) || !ec_over_n0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "E_c/N0 must be positive, got {ec_over_n0}"
            )));
        }
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noncentrality must be >= 0, got {s}"
            )));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            ec_over_n0,
            s,
            sigma,
        })
    }

    /// From the Rician factor `γ` and `σ²`; `s = σ√(2γ)`.
    pub fn from_gamma(ec_over_n0: f64, gamma: f64, sigma2: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !(sigma2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need gamma >= 0 and sigma² > 0, got gamma {gamma}, sigma² {sigma2}"
            )));
        }
        let sigma = libm::sqrt(sigma2);
        Self::new(ec_over_n0, sigma * libm::sqrt(2.0 * gamma), sigma)
    }

    pub fn ec_over_n0(&self) -> f64 {
        self.ec_over_n0
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// Rician factor `γ = s²/(2σ²)`.
    pub fn gamma(&self) -> f64 {
        self.s * self.s / (2.0 * self.sigma2())
    }

    /// Transmit amplitude `√E_c` in noise units.
    pub fn amplitude(&self) -> f64 {
        libm::sqrt(2.0 * NOISE_VARIANCE * self.ec_over_n0)
    }

    /// `√(N₀/2)`.
    pub fn noise_std(&self) -> f64 {
        libm::sqrt(NOISE_VARIANCE)
    }

    /// Envelope density `(α/σ²) e^{−(α²+s²)/2σ²} I₀(αs/σ²)`.
    pub fn envelope_pdf(&self, alpha: f64) -> f64 {
        if alpha < 0.0 {
            return 0.0;
        }
        let v = self.sigma2();
        let arg = alpha * self.s / v;
        // e^{-(α-s)²/2σ²}·e^{-arg}·I₀(arg) keeps the factors in range for large arg.
        let scaled_i0 = match specfun::bessel_i0(arg) {
            Ok(i0) => i0 * libm::exp(-arg),
            Err(_) => 1.0 / libm::sqrt(2.0 * core::f64::consts::PI * arg),
        };
        let d = alpha - self.s;
        alpha / v * libm::exp(-d * d / (2.0 * v)) * scaled_i0
    }
}

/// Reproducible random substream addressed by `(seed, stream_id)`.
///
/// Backed by ChaCha20 keyed from `seed` with `stream_id` selecting the
/// 64-bit stream, so every substream is an independent counter-mode sequence
/// regardless of how work is scheduled.
#[derive(Debug)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha20Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Uniform information bits.
    pub fn bits(&mut self, len: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(len);
        while out.len() < len {
            let word = self.rng.next_u64();
            let take = (len - out.len()).min(64);
            out.extend((0..take).map(|i| ((word >> i) & 1) as u8));
        }
        out
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Draws one envelope `α = √((s + σZ₁)² + (σZ₂)²)`.
pub fn sample_rician(params: &ChannelParams, rng: &mut RandomStream) -> f64 {
    let i = params.s + params.sigma * rng.standard_normal();
    let q = params.sigma * rng.standard_normal();
    libm::hypot(i, q)
}

/// How fading envelopes are assigned to coded symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FadingMode {
    /// Independent envelope per coded symbol (ideal interleaving).
    Iid,
    /// `n_c` subchannels, each constant over coherence blocks of `n_c`
    /// samples; branch `j` reads sample `j` of every subchannel.
    BlockInterleaved,
}

impl core::str::FromStr for FadingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iid" => Ok(Self::Iid),
            "block" | "block-interleaved" => Ok(Self::BlockInterleaved),
            other => Err(Error::InvalidParameter(format!(
                "unknown fading mode `{other}`"
            ))),
        }
    }
}

impl core::fmt::Display for FadingMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Self::Iid => "iid",
            Self::BlockInterleaved => "block-interleaved",
        })
    }
}

/// Received samples together with the envelopes known to the receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct FadedObservation {
    y: Vec<f64>,
    alpha: Vec<f64>,
}

impl FadedObservation {
    pub fn new(y: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        if y.len() != alpha.len() {
            return Err(Error::LengthMismatch {
                expected: alpha.len(),
                found: y.len(),
            });
        }
        if let Some(pos) = alpha.iter().position(|a| !(*a >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "fading envelope {pos} is negative or NaN"
            )));
        }
        Ok(Self { y, alpha })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// `y_t = √E_c·α_t·x_t + n_t` for given envelopes and noise samples.
pub fn apply_channel(
    x: &[f64],
    alpha: &[f64],
    noise: &[f64],
    params: &ChannelParams,
) -> Result<FadedObservation> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    for len in [alpha.len(), noise.len()] {
        if len != x.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                found: len,
            });
        }
    }
    let amp = params.amplitude();
    let y = x
        .iter()
        .zip(alpha)
        .zip(noise)
        .map(|((x, a), n)| amp * a * x + n)
        .collect();
    FadedObservation::new(y, alpha.to_vec())
}

/// Envelopes for `len` coded symbols laid out branch by branch.
pub fn draw_fading(
    len: usize,
    n_c: usize,
    params: &ChannelParams,
    mode: FadingMode,
    rng: &mut RandomStream,
) -> Vec<f64> {
    match mode {
        FadingMode::Iid => (0..len).map(|_| sample_rician(params, rng)).collect(),
        FadingMode::BlockInterleaved => {
            let branches = len.div_ceil(n_c);
            let blocks = branches.div_ceil(n_c);
            // Column-major: subchannel i, coherence block b at index b·n_c + i.
            let fades: Vec<f64> = (0..blocks * n_c)
                .map(|_| sample_rician(params, rng))
                .collect();
            (0..len)
                .map(|t| {
                    let (branch, sub) = (t / n_c, t % n_c);
                    fades[(branch / n_c) * n_c + sub]
                })
                .collect()
        }
    }
}

/// Sends antipodal symbols through the fading channel. Envelopes are drawn
/// first, then the noise, from the same stream.
pub fn transmit(
    x: &[f64],
    n_c: usize,
    params: &ChannelParams,
    mode: FadingMode,
    rng: &mut RandomStream,
) -> Result<FadedObservation> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    if n_c == 0 || !x.len().is_multiple_of(n_c) {
        return Err(Error::InvalidParameter(format!(
            "{} symbols do not split into branches of {n_c}",
            x.len()
        )));
    }
    let alpha = draw_fading(x.len(), n_c, params, mode, rng);
    let std = params.noise_std();
    let noise: Vec<f64> = (0..x.len()).map(|_| std * rng.standard_normal()).collect();
    apply_channel(x, &alpha, &noise, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_bookkeeping() {
        assert!((ebno_to_ecno(2.04, 100, 2, 0.5) - 1.0).abs() < 1e-15);
        assert_eq!(ebno_to_ecno(3.0, 17, 0, 0.5), 1.5);
        for &e in &[0.1, 1.0, 7.3, 1e4] {
            let back = ebno_to_ecno(ecno_to_ebno(e, 100, 2, 0.5), 100, 2, 0.5);
            assert!((back - e).abs() <= 1e-15 * e);
        }
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((linear_to_db(100.0) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn params_validation_and_gamma() {
        assert!(ChannelParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ChannelParams::new(1.0, -1.0, 1.0).is_err());
        assert!(ChannelParams::new(1.0, 1.0, 0.0).is_err());
        let p = ChannelParams::from_gamma(1.0, 5.0, 0.5).unwrap();
        assert!((p.gamma() - 5.0).abs() < 1e-12);
        assert!((p.s() - 5f64.sqrt()).abs() < 1e-12);
        assert!(ChannelParams::from_gamma(1.0, -1.0, 0.5).is_err());
    }

    #[test]
    fn noiseless_unit_fading_is_scaled_input() {
        let p = ChannelParams::new(2.5, 1.0, 1.0).unwrap();
        let x = [1.0, -1.0, -1.0, 1.0];
        let obs = apply_channel(&x, &[1.0; 4], &[0.0; 4], &p).unwrap();
        let amp = (2.0 * NOISE_VARIANCE * 2.5f64).sqrt();
        assert_eq!(obs.y(), &[amp, -amp, -amp, amp]);
        assert!(apply_channel(&x, &[1.0; 3], &[0.0; 4], &p).is_err());
        assert!(apply_channel(&[], &[], &[], &p).is_err());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let p = ChannelParams::from_gamma(2.0, 3.0, 0.5).unwrap();
        let x = [1.0; 40];
        let a = transmit(&x, 2, &p, FadingMode::Iid, &mut RandomStream::new(7, 3)).unwrap();
        let b = transmit(&x, 2, &p, FadingMode::Iid, &mut RandomStream::new(7, 3)).unwrap();
        let c = transmit(&x, 2, &p, FadingMode::Iid, &mut RandomStream::new(7, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn block_interleaved_layout() {
        let p = ChannelParams::from_gamma(2.0, 1.0, 0.5).unwrap();
        let alpha = draw_fading(
            12,
            2,
            &p,
            FadingMode::BlockInterleaved,
            &mut RandomStream::new(1, 0),
        );
        // Branches (0,1) share fades per subchannel, then (2,3), then (4,5).
        for block in 0..3 {
            let base = block * 4;
            assert_eq!(alpha[base], alpha[base + 2]);
            assert_eq!(alpha[base + 1], alpha[base + 3]);
            assert_ne!(alpha[base], alpha[base + 1]);
        }
        assert_ne!(alpha[0], alpha[4]);
    }

    #[test]
    fn transmit_rejects_bad_shapes() {
        let p = ChannelParams::from_gamma(2.0, 1.0, 0.5).unwrap();
        let mut rng = RandomStream::new(0, 0);
        assert_eq!(
            transmit(&[], 2, &p, FadingMode::Iid, &mut rng),
            Err(Error::EmptyInput)
        );
        assert!(transmit(&[1.0; 3], 2, &p, FadingMode::Iid, &mut rng).is_err());
        assert!("fast".parse::<FadingMode>().is_err());
        assert_eq!("iid".parse::<FadingMode>().unwrap(), FadingMode::Iid);
        assert_eq!(
            "block".parse::<FadingMode>().unwrap(),
            FadingMode::BlockInterleaved
        );
    }

    #[test]
    fn bits_are_binary_and_balanced() {
        let bits = RandomStream::new(11, 0).bits(10_000);
        assert!(bits.iter().all(|&b| b <= 1));
        let ones = bits.iter().filter(|&&b| b == 1).count();
        assert!((ones as i64 - 5000).abs() < 200);
    }

    #[test]
    fn pdf_integrates_to_one() {
        let p = ChannelParams::new(1.0, 2.0, 0.7).unwrap();
        let s = specfun::QuadratureSettings::default();
        let total = specfun::integrate(|a| p.envelope_pdf(a), 0.0, 12.0, &s)
            .unwrap()
            .value;
        assert!((total - 1.0).abs() < 1e-9);
    }
}
