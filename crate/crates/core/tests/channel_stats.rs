use yiarq::channel::{
    draw_fading, sample_rician, transmit, ChannelParams, FadingMode, RandomStream, NOISE_VARIANCE,
};
use yiarq::specfun::{integrate, QuadratureSettings};

fn pdf_mass(params: &ChannelParams, lo: f64, hi: f64) -> f64 {
    let s = QuadratureSettings::new(1e-14, 1e-10, 50).unwrap();
    integrate(|t| params.envelope_pdf(t), lo, hi, &s)
        .unwrap()
        .value
}

#[test]
fn envelope_matches_rician_law() {
    for &(gamma, sigma2) in &[(0.0, 0.5), (5.0, 0.5), (2.0, 1.7)] {
        let params = ChannelParams::from_gamma(1.0, gamma, sigma2).unwrap();
        let mut rng = RandomStream::new(11, 0);
        let n = 20_000;
        let mut xs: Vec<f64> = (0..n).map(|_| sample_rician(&params, &mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        let mut d: f64 = 0.0;
        let mut cdf = 0.0;
        let mut prev = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            cdf += pdf_mass(&params, prev, x);
            prev = x;
            d = d
                .max((cdf - i as f64 / n as f64).abs())
                .max(((i + 1) as f64 / n as f64 - cdf).abs());
        }
        assert!(
            d < 1.63 / (n as f64).sqrt(),
            "gamma {gamma}, sigma² {sigma2}: KS distance {d}"
        );
    }
}

#[test]
fn mean_power_is_two_sigma_squared_plus_s_squared() {
    let params = ChannelParams::from_gamma(1.0, 5.0, 0.5).unwrap();
    let mut rng = RandomStream::new(12, 3);
    let n = 1_000_000;
    let samples: Vec<f64> = (0..n)
        .map(|_| sample_rician(&params, &mut rng).powi(2))
        .collect();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let expected = 2.0 * params.sigma2() + params.s().powi(2);
    assert!(
        (mean - expected).abs() < 4.0 * (var / n as f64).sqrt(),
        "{mean} vs {expected}"
    );
}

#[test]
fn noise_variance_is_half_n0() {
    let params = ChannelParams::from_gamma(2.5, 5.0, 0.5).unwrap();
    let mut rng = RandomStream::new(13, 0);
    let bits = rng.bits(1_000_000);
    let x: Vec<f64> = bits
        .iter()
        .map(|&b| if b == 0 { 1.0 } else { -1.0 })
        .collect();
    let obs = transmit(&x, 2, &params, FadingMode::Iid, &mut rng).unwrap();
    let amp = params.amplitude();
    let residual: Vec<f64> = obs
        .y()
        .iter()
        .zip(obs.alpha())
        .zip(&x)
        .map(|((y, a), x)| y - amp * a * x)
        .collect();
    let n = residual.len() as f64;
    let mean = residual.iter().sum::<f64>() / n;
    let var = residual.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!((var / NOISE_VARIANCE - 1.0).abs() < 0.01, "variance {var}");
}

#[test]
fn iid_envelopes_are_uncorrelated() {
    let params = ChannelParams::from_gamma(1.0, 3.0, 0.5).unwrap();
    let mut rng = RandomStream::new(14, 9);
    let n = 200_000;
    let alpha = draw_fading(n, 2, &params, FadingMode::Iid, &mut rng);
    let mean = alpha.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = alpha.iter().map(|a| a - mean).collect();
    let num: f64 = c.windows(2).map(|w| w[0] * w[1]).sum();
    let den: f64 = c.iter().map(|v| v * v).sum();
    let rho = num / den;
    assert!(rho.abs() < 4.0 / (n as f64).sqrt(), "rho {rho}");
}

#[test]
fn gamma_scaling_leaves_received_amplitude_invariant() {
    // Doubling σ² at fixed γ and fixed E_c·σ².
    let a = ChannelParams::from_gamma(2.0, 4.0, 0.5).unwrap();
    let b = ChannelParams::from_gamma(1.0, 4.0, 1.0).unwrap();
    let n = 50_000;
    let draw = |p: &ChannelParams, seed| {
        let mut rng = RandomStream::new(seed, 0);
        let mut v: Vec<f64> = (0..n)
            .map(|_| p.amplitude() * sample_rician(p, &mut rng))
            .collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let (xa, xb) = (draw(&a, 21), draw(&b, 22));
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < n && j < n {
        if xa[i] <= xb[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 - j as f64).abs() / n as f64);
    }
    assert!(
        d < 1.63 * (2.0 / n as f64).sqrt(),
        "two-sample KS distance {d}"
    );
}

#[test]
fn streams_are_reproducible_and_distinct() {
    let p = ChannelParams::from_gamma(1.0, 1.0, 0.5).unwrap();
    let take = |seed, stream| {
        let mut rng = RandomStream::new(seed, stream);
        (0..8)
            .map(|_| sample_rician(&p, &mut rng))
            .collect::<Vec<_>>()
    };
    assert_eq!(take(5, 1), take(5, 1));
    assert_ne!(take(5, 1), take(5, 2));
    assert_ne!(take(5, 1), take(6, 1));
}
