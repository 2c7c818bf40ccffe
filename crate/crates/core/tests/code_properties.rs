use proptest::prelude::*;
use yiarq::convcode::{
    ak_length_bound, bit_to_symbol, build_trellis, compute_transfer_coefficients, encode,
    encode_bits, free_distance, CodeSpec, INPUT_BITS_PER_BRANCH,
};

const CODES: [&str; 3] = ["5,7", "5,7,7", "23,35"];

/// Weight spectrum by brute force: every detour that leaves state 0 at the
/// first branch and returns to it for the first time, up to `max_len`
/// branches. Counting stops being exact once detours longer than `max_len`
/// reach weight `k_max`; callers pick `max_len` generously.
fn brute_force_spectrum(text: &str, k_max: usize, max_len: usize) -> (Vec<u128>, Vec<u128>) {
    let t = build_trellis(&CodeSpec::from_octal(text).unwrap());
    let mut a = vec![0u128; k_max + 1];
    let mut c = vec![0u128; k_max + 1];
    // (state, weight, input weight)
    let mut frontier = vec![(t.next_state(0, 1), t.output_weight(0, 1) as usize, 1usize)];
    for _ in 1..max_len {
        let mut next = Vec::new();
        for (state, w, iw) in frontier {
            if w > k_max {
                continue;
            }
            if state == 0 {
                a[w] += 1;
                c[w] += iw as u128;
                continue;
            }
            for bit in 0..2u8 {
                next.push((
                    t.next_state(state, bit),
                    w + t.output_weight(state, bit) as usize,
                    iw + bit as usize,
                ));
            }
        }
        frontier = next;
    }
    (a, c)
}

#[test]
fn five_seven_spectrum_is_geometric() {
    let coeffs =
        compute_transfer_coefficients(&build_trellis(&CodeSpec::from_octal("5,7").unwrap()), 16)
            .unwrap();
    assert_eq!(coeffs.free_distance(), 5);
    for k in 5..=16u32 {
        assert_eq!(coeffs.a(k as usize), 1u128 << (k - 5));
        assert_eq!(coeffs.c(k as usize), (k as u128 - 4) << (k - 5));
    }
}

#[test]
fn dp_matches_brute_force_enumeration() {
    for (text, k_max, len) in [("5,7", 12, 30), ("5,7,7", 14, 24), ("23,35", 10, 24)] {
        let coeffs = compute_transfer_coefficients(
            &build_trellis(&CodeSpec::from_octal(text).unwrap()),
            k_max,
        )
        .unwrap();
        let (a, c) = brute_force_spectrum(text, k_max, len);
        for k in 1..=k_max {
            assert_eq!(coeffs.a(k), a[k], "{text}: a_{k}");
            assert_eq!(coeffs.c(k), c[k], "{text}: c_{k}");
        }
    }
}

#[test]
fn reference_free_distances() {
    for (text, d) in [("5,7", 5), ("5,7,7", 8), ("23,35", 7)] {
        let t = build_trellis(&CodeSpec::from_octal(text).unwrap());
        assert_eq!(free_distance(&t, 64).unwrap(), d, "{text}");
    }
}

#[test]
fn coefficient_growth_bounds() {
    for text in CODES {
        let spec = CodeSpec::from_octal(text).unwrap();
        let n_c = spec.outputs();
        let coeffs = compute_transfer_coefficients(&build_trellis(&spec), 16).unwrap();
        for k in 1..=16usize {
            let (a, c) = (coeffs.a(k), coeffs.c(k));
            assert!(a <= 4u128.pow(k as u32), "{text}: a_{k} = {a}");
            assert!(
                c <= (k * INPUT_BITS_PER_BRANCH) as u128 * a,
                "{text}: c_{k} = {c}"
            );
            let chain: u128 = (1..=k).map(|l| ak_length_bound(k, l, n_c)).sum();
            assert!(a <= chain, "{text}: a_{k} = {a} > {chain}");
        }
    }
}

#[test]
fn length_bound_examples() {
    assert_eq!(ak_length_bound(7, 3, 2), 0);
    assert_eq!(ak_length_bound(1, 1, 2), 1);
    // Σ_l C(3,l)·C(4,2−l) = 6 + 12 + 3.
    assert_eq!(ak_length_bound(5, 3, 2), 21);
}

fn arb_code() -> impl Strategy<Value = CodeSpec> {
    (0usize..=4, 2usize..=3)
        .prop_flat_map(|(m, n)| (Just(m), prop::collection::vec(1u32..(1 << (m + 1)), n)))
        .prop_filter_map("invalid generator set", |(m, g)| CodeSpec::new(g, m).ok())
}

proptest! {
    #[test]
    fn encoder_is_linear(spec in arb_code(), pair in prop::collection::vec((0u8..2, 0u8..2), 1..40)) {
        let t = build_trellis(&spec);
        let (u, v): (Vec<u8>, Vec<u8>) = pair.into_iter().unzip();
        let sum: Vec<u8> = u.iter().zip(&v).map(|(a, b)| a ^ b).collect();
        let (eu, ev, es) = (encode_bits(&t, &u).unwrap(), encode_bits(&t, &v).unwrap(), encode_bits(&t, &sum).unwrap());
        let xor: Vec<u8> = eu.iter().zip(&ev).map(|(a, b)| a ^ b).collect();
        prop_assert_eq!(es, xor);
        let symbols = encode(&t, &u).unwrap();
        let mapped = symbols.iter().zip(&eu).all(|(x, b)| *x == bit_to_symbol(*b));
        prop_assert!(mapped);
    }

    #[test]
    fn free_distance_is_first_nonzero_coefficient(spec in arb_code()) {
        let t = build_trellis(&spec);
        if let Ok(coeffs) = compute_transfer_coefficients(&t, 24) {
            let first = (1..=24).find(|&k| coeffs.a(k) > 0);
            prop_assert_eq!(Some(coeffs.free_distance()), first);
            prop_assert_eq!(free_distance(&t, 24).unwrap(), coeffs.free_distance());
        }
    }

    #[test]
    fn growth_bounds_on_random_codes(spec in arb_code()) {
        let t = build_trellis(&spec);
        if let Ok(coeffs) = compute_transfer_coefficients(&t, 16) {
            for (k, a, c) in coeffs.iter() {
                prop_assert!(a <= 4u128.pow(k as u32));
                prop_assert!(c <= k as u128 * a);
            }
        }
    }
}
