use proptest::prelude::*;
use yiarq::bounds::{pairwise_probability, BoundParams};
use yiarq::channel::{apply_channel, transmit, ChannelParams, FadingMode, RandomStream};
use yiarq::convcode::{build_trellis, encode, CodeSpec, Trellis};
use yiarq::decoder::{decode, YIConfig};

fn five_seven() -> Trellis {
    build_trellis(&CodeSpec::from_octal("5,7").unwrap())
}

fn exhaustive_ml(t: &Trellis, y: &[f64], alpha: &[f64], h: usize) -> Vec<u8> {
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for word in 0u32..(1 << h) {
        let bits: Vec<u8> = (0..h).map(|i| ((word >> i) & 1) as u8).collect();
        let x = encode(t, &bits).unwrap();
        let metric: f64 = x
            .iter()
            .zip(y)
            .zip(alpha)
            .map(|((x, y), a)| a * x * y)
            .sum();
        if metric > best.0 {
            best = (metric, bits);
        }
    }
    best.1
}

#[test]
fn viterbi_equals_exhaustive_ml_search() {
    let t = five_seven();
    let cfg = YIConfig::viterbi(5).unwrap();
    for h in [4usize, 6, 8] {
        for trial in 0..1000u64 {
            // Low SNR so that a good share of frames carry errors.
            let params = ChannelParams::from_gamma(0.4, 1.0, 0.5).unwrap();
            let mut rng = RandomStream::new(h as u64, trial);
            let info = rng.bits(h);
            let x = encode(&t, &info).unwrap();
            let obs = transmit(&x, 2, &params, FadingMode::Iid, &mut rng).unwrap();
            let out = decode(&t, &obs, &params, &cfg).unwrap();
            assert_eq!(
                out.bits,
                exhaustive_ml(&t, obs.y(), obs.alpha(), h),
                "H = {h}, trial {trial}"
            );
            assert!(out.accepted);
        }
    }
}

/// Two-codeword channel: a memoryless code repeating each bit `k` times, so
/// the only competitor differs in all `k` positions and `d_f = k`.
#[test]
fn conditional_pairwise_and_retransmission_probabilities() {
    let alpha = [0.3, 0.9, 0.5, 1.2];
    let k = alpha.len();
    let t = build_trellis(&CodeSpec::new(vec![1; k], 0).unwrap());
    let ec = 0.3;
    let params = ChannelParams::new(ec, 1.0, 0.7).unwrap();
    let energy: f64 = alpha.iter().map(|a| a * a).sum();
    let x = encode(&t, &[0]).unwrap();
    let n = 200_000u64;
    for &u in &[0.0, 0.5, 1.5] {
        let bp = BoundParams::new(ec, u, k, 0.7, 1.0).unwrap();
        let cfg = YIConfig::new(u, k).unwrap();
        let (mut wrong, mut rejected) = (0u64, 0u64);
        for trial in 0..n {
            let mut rng = RandomStream::new(99, trial);
            let noise: Vec<f64> = (0..k).map(|_| rng.standard_normal()).collect();
            let obs = apply_channel(&x, &alpha, &noise, &params).unwrap();
            let out = decode(&t, &obs, &params, &cfg).unwrap();
            if !out.accepted {
                rejected += 1;
            } else if out.bits != [0] {
                wrong += 1;
            }
        }
        let check = |count: u64, p: f64, what: &str| {
            let p_hat = count as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!(
                (p_hat - p).abs() < 4.0 * se + 1e-12,
                "u = {u}, {what}: {p_hat} vs {p}"
            );
        };
        let q_plus = pairwise_probability(u, energy, &bp);
        let q_minus = pairwise_probability(-u, energy, &bp);
        check(wrong, q_plus, "undetected error");
        check(rejected, q_minus - q_plus, "retransmission");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn acceptance_is_down_closed_and_bits_ignore_u(seed in any::<u64>(), ec in 0.05f64..2.0, gamma in 0.0f64..8.0, h in 2usize..40) {
        let t = five_seven();
        let params = ChannelParams::from_gamma(ec, gamma, 0.5).unwrap();
        let mut rng = RandomStream::new(seed, 0);
        let info = rng.bits(h);
        let obs = transmit(&encode(&t, &info).unwrap(), 2, &params, FadingMode::Iid, &mut rng).unwrap();
        let base = decode(&t, &obs, &params, &YIConfig::viterbi(5).unwrap()).unwrap();
        let mut was_accepted = true;
        for i in 0..=24 {
            let u = i as f64 * 0.25;
            let out = decode(&t, &obs, &params, &YIConfig::new(u, 5).unwrap()).unwrap();
            prop_assert_eq!(&out.bits, &base.bits);
            prop_assert_eq!(out.accepted, base.accepted_at(u));
            prop_assert!(was_accepted || !out.accepted);
            was_accepted = out.accepted;
        }
    }
}
