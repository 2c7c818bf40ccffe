//! Rate 1/n feed-forward convolutional codes.
//!
//! Generators are bit masks of width `m + 1` with the most significant bit
//! tapping the current input and bit 0 tapping the oldest register cell, so
//! the octal pair `5,7` is the familiar `1 + D²`, `1 + D + D²` code. The
//! encoder state holds the last `m` inputs with the most recent one in the
//! high bit.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::{Error, Result};

/// Input bits per trellis branch. Only binary-input trellises are supported.
pub const INPUT_BITS_PER_BRANCH: usize = 1;

/// Antipodal symbol emitted for a coded `0`.
pub const SYMBOL_ZERO: f64 = 1.0;
/// Antipodal symbol emitted for a coded `1`.
pub const SYMBOL_ONE: f64 = -1.0;

/// Maps a coded bit onto its antipodal symbol (`0 → +1`, `1 → −1`).
#[inline]
pub fn bit_to_symbol(bit: u8) -> f64 {
    if bit == 0 {
        SYMBOL_ZERO
    } else {
        SYMBOL_ONE
    }
}

/// Generator description of a rate `1/n_c` convolutional code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    generators: Vec<u32>,
    memory: usize,
}

impl CodeSpec {
    /// Largest supported memory order.
    pub const MAX_MEMORY: usize = 16;
    /// Largest supported number of outputs per branch.
    pub const MAX_OUTPUTS: usize = 32;

    pub fn new(generators: Vec<u32>, memory: usize) -> Result<Self> {
        if memory > Self::MAX_MEMORY {
            return Err(Error::InvalidCode(format!(
                "memory order {memory} exceeds {}",
                Self::MAX_MEMORY
            )));
        }
        if generators.is_empty() || generators.len() > Self::MAX_OUTPUTS {
            return Err(Error::InvalidCode(format!(
                "need between 1 and {} generators, got {}",
                Self::MAX_OUTPUTS,
                generators.len()
            )));
        }
        let width_limit = 1u32 << (memory + 1);
        for (index, &mask) in generators.iter().enumerate() {
            if mask == 0 {
                return Err(Error::InvalidGenerator {
                    index,
                    mask,
                    reason: "generator is zero",
                });
            }
            if mask >= width_limit {
                return Err(Error::InvalidGenerator {
                    index,
                    mask,
                    reason: "generator is wider than m + 1 taps",
                });
            }
        }
        if generators.iter().all(|g| g & 1 == 0) {
            return Err(Error::InvalidCode(format!(
                "no generator taps the delay-{memory} cell; constraint length is not tight"
            )));
        }
        Ok(Self { generators, memory })
    }

    /// Parses comma-separated octal generators such as `"5,7"`. The memory
    /// order is taken from the widest generator.
    pub fn from_octal(text: &str) -> Result<Self> {
        let mut generators = Vec::new();
        for token in text.split(',') {
            let token = token.trim();
            let mask = u32::from_str_radix(token, 8)
                .map_err(|_| Error::InvalidCode(format!("`{token}` is not an octal generator")))?;
            generators.push(mask);
        }
        let widest = generators.iter().copied().max().unwrap_or(0);
        if widest == 0 {
            return Err(Error::InvalidCode(format!(
                "`{text}` has no nonzero generator"
            )));
        }
        let memory = (32 - widest.leading_zeros()) as usize - 1;
        Self::new(generators, memory)
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    /// Memory order `m`.
    pub fn memory(&self) -> usize {
        self.memory
    }

    /// Constraint length `K = m + 1`.
    pub fn constraint_length(&self) -> usize {
        self.memory + 1
    }

    /// Coded bits per branch `n_c`.
    pub fn outputs(&self) -> usize {
        self.generators.len()
    }

    /// Code rate `k_c / n_c`.
    pub fn rate(&self) -> f64 {
        INPUT_BITS_PER_BRANCH as f64 / self.outputs() as f64
    }

    /// Octal rendering, e.g. `"5,7"`.
    pub fn to_octal(&self) -> alloc::string::String {
        let parts: Vec<_> = self.generators.iter().map(|g| format!("{g:o}")).collect();
        parts.join(",")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Edge {
    next: u32,
    out_bits: u32,
}

/// State-transition graph of a [`CodeSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trellis {
    spec: CodeSpec,
    edges: Vec<Edge>,
    symbols: Vec<f64>,
}

/// Builds the trellis: for every state and input bit the successor state and
/// the `n_c` antipodal output symbols.
pub fn build_trellis(spec: &CodeSpec) -> Trellis {
    let m = spec.memory;
    let n_c = spec.outputs();
    let num_states = 1usize << m;
    let mut edges = Vec::with_capacity(2 * num_states);
    let mut symbols = Vec::with_capacity(2 * num_states * n_c);
    for state in 0..num_states as u32 {
        for bit in 0..2u32 {
            let register = (bit << m) | state;
            let mut out_bits = 0u32;
            for (i, g) in spec.generators.iter().enumerate() {
                let parity = (register & g).count_ones() & 1;
                out_bits |= parity << i;
                symbols.push(bit_to_symbol(parity as u8));
            }
            edges.push(Edge {
                next: register >> 1,
                out_bits,
            });
        }
    }
    Trellis {
        spec: spec.clone(),
        edges,
        symbols,
    }
}

impl Trellis {
    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn num_states(&self) -> usize {
        1 << self.spec.memory
    }

    pub fn memory(&self) -> usize {
        self.spec.memory
    }

    pub fn outputs(&self) -> usize {
        self.spec.outputs()
    }

    #[inline]
    pub fn next_state(&self, state: usize, bit: u8) -> usize {
        self.edges[2 * state + bit as usize].next as usize
    }

    /// Coded bits of a branch; bit `i` is the output of generator `i`.
    #[inline]
    pub fn output_bits(&self, state: usize, bit: u8) -> u32 {
        self.edges[2 * state + bit as usize].out_bits
    }

    /// Hamming weight of a branch output.
    #[inline]
    pub fn output_weight(&self, state: usize, bit: u8) -> u32 {
        self.output_bits(state, bit).count_ones()
    }

    /// Antipodal output symbols of a branch.
    #[inline]
    pub fn symbols(&self, state: usize, bit: u8) -> &[f64] {
        let n = self.outputs();
        let start = (2 * state + bit as usize) * n;
        &self.symbols[start..start + n]
    }

    /// The two `(previous state, input bit)` pairs that lead into `state`,
    /// ordered by previous state index (then input bit).
    #[inline]
    pub fn predecessors(&self, state: usize) -> [(usize, u8); 2] {
        let m = self.memory();
        if m == 0 {
            return [(0, 0), (0, 1)];
        }
        let bit = (state >> (m - 1)) as u8;
        let low = (state << 1) & (self.num_states() - 1);
        [(low, bit), (low | 1, bit)]
    }

    /// Information bit carried by any branch entering `state`.
    #[inline]
    pub fn input_into(&self, state: usize) -> u8 {
        let m = self.memory();
        if m == 0 {
            0
        } else {
            (state >> (m - 1)) as u8
        }
    }
}

fn check_bits(bits: &[u8]) -> Result<()> {
    if bits.is_empty() {
        return Err(Error::EmptyInput);
    }
    match bits.iter().position(|&b| b > 1) {
        Some(pos) => Err(Error::InvalidBit(pos)),
        None => Ok(()),
    }
}

/// Encodes `info_bits` followed by `m` zero tail bits and returns the coded
/// bits, `n_c (H + m)` of them, branch by branch.
pub fn encode_bits(trellis: &Trellis, info_bits: &[u8]) -> Result<Vec<u8>> {
    check_bits(info_bits)?;
    let n_c = trellis.outputs();
    let mut out = Vec::with_capacity(n_c * (info_bits.len() + trellis.memory()));
    let mut state = 0usize;
    let tail = core::iter::repeat_n(0u8, trellis.memory());
    for bit in info_bits.iter().copied().chain(tail) {
        let word = trellis.output_bits(state, bit);
        out.extend((0..n_c).map(|i| ((word >> i) & 1) as u8));
        state = trellis.next_state(state, bit);
    }
    debug_assert_eq!(state, 0);
    Ok(out)
}

/// Encodes `info_bits` plus the zero tail into antipodal symbols.
pub fn encode(trellis: &Trellis, info_bits: &[u8]) -> Result<Vec<f64>> {
    Ok(encode_bits(trellis, info_bits)?
        .into_iter()
        .map(bit_to_symbol)
        .collect())
}

/// Free distance: the minimum output weight over paths that leave state 0
/// and first return to it. Searched with Dijkstra over trellis states.
pub fn free_distance(trellis: &Trellis, k_cap: usize) -> Result<usize> {
    let num_states = trellis.num_states();
    let first_next = trellis.next_state(0, 1);
    let first_weight = trellis.output_weight(0, 1) as usize;
    if first_next == 0 {
        return if first_weight <= k_cap {
            Ok(first_weight)
        } else {
            Err(Error::WeightCapTooSmall { cap: k_cap })
        };
    }
    let mut best = vec![usize::MAX; num_states];
    let mut heap = BinaryHeap::new();
    best[first_next] = first_weight;
    heap.push(Reverse((first_weight, first_next)));
    while let Some(Reverse((weight, state))) = heap.pop() {
        if weight > k_cap {
            break;
        }
        if state == 0 {
            return Ok(weight);
        }
        if weight > best[state] {
            continue;
        }
        for bit in 0..2u8 {
            let next = trellis.next_state(state, bit);
            let w = weight + trellis.output_weight(state, bit) as usize;
            if w < best[next] {
                best[next] = w;
                heap.push(Reverse((w, next)));
            }
        }
    }
    Err(Error::WeightCapTooSmall { cap: k_cap })
}

/// Weight spectrum of a code truncated at `k_max`: `a[k]` counts detours of
/// output weight `k`, `c[k]` sums their information weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferCoefficients {
    free_distance: usize,
    k_max: usize,
    a: Vec<u128>,
    c: Vec<u128>,
}

impl TransferCoefficients {
    pub fn free_distance(&self) -> usize {
        self.free_distance
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Path count `a_k`, zero beyond `k_max`.
    pub fn a(&self, k: usize) -> u128 {
        self.a.get(k).copied().unwrap_or(0)
    }

    /// Information-weight sum `c_k`, zero beyond `k_max`.
    pub fn c(&self, k: usize) -> u128 {
        self.c.get(k).copied().unwrap_or(0)
    }

    /// `(k, a_k, c_k)` for `k = d_f ..= k_max`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u128, u128)> + '_ {
        (self.free_distance..=self.k_max).map(move |k| (k, self.a[k], self.c[k]))
    }
}

#[derive(Clone, Copy, Default)]
struct Mass {
    paths: u128,
    input_weight: u128,
}

/// Exact `a_k`, `c_k` for `k ≤ k_max` by dynamic programming over
/// (state, accumulated output weight) for detours that have left state 0 and
/// not yet returned.
pub fn compute_transfer_coefficients(
    trellis: &Trellis,
    k_max: usize,
) -> Result<TransferCoefficients> {
    let num_states = trellis.num_states();
    let width = k_max + 1;
    let mut a = vec![0u128; width];
    let mut c = vec![0u128; width];
    let overflow = |weight| Error::CoefficientOverflow { weight };

    let settle = |a: &mut [u128], c: &mut [u128], w: usize, mass: Mass| -> Result<()> {
        a[w] = a[w].checked_add(mass.paths).ok_or(overflow(w))?;
        c[w] = c[w].checked_add(mass.input_weight).ok_or(overflow(w))?;
        Ok(())
    };

    let mut alive = vec![Mass::default(); num_states * width];
    let mut live_mass = false;
    let first = trellis.next_state(0, 1);
    let w0 = trellis.output_weight(0, 1) as usize;
    if w0 <= k_max {
        let seed = Mass {
            paths: 1,
            input_weight: 1,
        };
        if first == 0 {
            settle(&mut a, &mut c, w0, seed)?;
        } else {
            alive[first * width + w0] = seed;
            live_mass = true;
        }
    }

    // In a non-catastrophic code every cycle avoiding state 0 has positive
    // weight, so all live mass exceeds k_max after this many steps.
    let max_steps = num_states * (k_max + 2);
    let mut steps = 0;
    while live_mass {
        if steps == max_steps {
            return Err(Error::CatastrophicCode);
        }
        steps += 1;
        let mut next = vec![Mass::default(); num_states * width];
        live_mass = false;
        for state in 1..num_states {
            for w in 0..width {
                let mass = alive[state * width + w];
                if mass.paths == 0 {
                    continue;
                }
                for bit in 0..2u8 {
                    let nw = w + trellis.output_weight(state, bit) as usize;
                    if nw > k_max {
                        continue;
                    }
                    let moved = Mass {
                        paths: mass.paths,
                        input_weight: mass
                            .input_weight
                            .checked_add(mass.paths * bit as u128)
                            .ok_or(overflow(nw))?,
                    };
                    let ns = trellis.next_state(state, bit);
                    if ns == 0 {
                        settle(&mut a, &mut c, nw, moved)?;
                    } else {
                        let slot = &mut next[ns * width + nw];
                        slot.paths = slot.paths.checked_add(moved.paths).ok_or(overflow(nw))?;
                        slot.input_weight = slot
                            .input_weight
                            .checked_add(moved.input_weight)
                            .ok_or(overflow(nw))?;
                        live_mass = true;
                    }
                }
            }
        }
        alive = next;
    }

    let free_distance = a
        .iter()
        .position(|&count| count > 0)
        .ok_or(Error::WeightCapTooSmall { cap: k_max })?;
    Ok(TransferCoefficients {
        free_distance,
        k_max,
        a,
        c,
    })
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Combinatorial upper bound on the number of weight-`k` detours of length
/// `length` branches: `Σ_{l=0}^{L−1} C(L, l)·C(k−1, L−l−1)`, and zero when
/// `k > L·n_c`.
pub fn ak_length_bound(k: usize, length: usize, n_c: usize) -> u128 {
    assert!(k >= 1 && length >= 1, "weight and length must be positive");
    if k > length * n_c {
        return 0;
    }
    (0..length)
        .filter(|&l| length - l <= k)
        .map(|l| binomial(length, l) * binomial(k - 1, length - l - 1))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(text: &str) -> Trellis {
        build_trellis(&CodeSpec::from_octal(text).unwrap())
    }

    #[test]
    fn octal_parsing_infers_memory() {
        let spec = CodeSpec::from_octal("5,7").unwrap();
        assert_eq!(spec.memory(), 2);
        assert_eq!(spec.outputs(), 2);
        assert_eq!(spec.generators(), &[5, 7]);
        assert_eq!(CodeSpec::from_octal("23,35").unwrap().memory(), 4);
        assert_eq!(CodeSpec::from_octal("1").unwrap().memory(), 0);
        assert_eq!(spec.to_octal(), "5,7");
    }

    #[test]
    fn rejects_bad_generators() {
        assert!(matches!(
            CodeSpec::new(vec![5, 0], 2),
            Err(Error::InvalidGenerator { index: 1, .. })
        ));
        assert!(matches!(
            CodeSpec::new(vec![5, 17], 2),
            Err(Error::InvalidGenerator { index: 1, .. })
        ));
        assert!(matches!(
            CodeSpec::new(vec![6], 2),
            Err(Error::InvalidCode(_))
        ));
        assert!(CodeSpec::from_octal("5,9").is_err());
        assert!(CodeSpec::from_octal("").is_err());
        assert!(CodeSpec::new(vec![], 2).is_err());
    }

    #[test]
    fn five_seven_trellis_shape() {
        let t = code("5,7");
        assert_eq!(t.num_states(), 4);
        let mut incoming = [0; 4];
        for s in 0..4 {
            for b in 0..2u8 {
                incoming[t.next_state(s, b)] += 1;
            }
        }
        assert_eq!(incoming, [2; 4]);
        assert_eq!(t.symbols(0, 1), &[-1.0, -1.0]);
        assert_eq!(t.symbols(0, 0), &[1.0, 1.0]);
        assert_eq!(t.next_state(0, 0), 0);
    }

    #[test]
    fn predecessors_match_transitions() {
        for text in ["5,7", "23,35", "5,7,7", "1"] {
            let t = code(text);
            for s in 0..t.num_states() {
                for (p, b) in t.predecessors(s) {
                    assert_eq!(t.next_state(p, b), s, "{text}: {p} --{b}--> {s}");
                    if t.memory() > 0 {
                        assert_eq!(b, t.input_into(s));
                    }
                }
            }
        }
    }

    #[test]
    fn identity_code_is_a_single_self_looping_state() {
        let t = code("1");
        assert_eq!(t.num_states(), 1);
        assert_eq!(t.next_state(0, 0), 0);
        assert_eq!(t.next_state(0, 1), 0);
        assert_eq!(free_distance(&t, 4).unwrap(), 1);
        let coeffs = compute_transfer_coefficients(&t, 3).unwrap();
        assert_eq!((coeffs.a(1), coeffs.c(1), coeffs.a(2)), (1, 1, 0));
    }

    #[test]
    fn encoding_lengths_and_impulse_response() {
        let t = code("5,7");
        assert_eq!(encode(&t, &[0; 100]).unwrap().len(), 204);
        assert!(encode(&t, &[0; 9])
            .unwrap()
            .iter()
            .all(|&x| x == SYMBOL_ZERO));
        // (1+D², 1+D+D²) impulse response: 11 01 11.
        assert_eq!(encode_bits(&t, &[1]).unwrap(), vec![1, 1, 0, 1, 1, 1]);
        assert_eq!(
            encode(&t, &[1]).unwrap(),
            vec![-1.0, -1.0, 1.0, -1.0, -1.0, -1.0]
        );
        assert_eq!(encode(&t, &[]), Err(Error::EmptyInput));
        assert_eq!(encode(&t, &[0, 2]), Err(Error::InvalidBit(1)));
    }

    #[test]
    fn five_seven_spectrum() {
        let t = code("5,7");
        assert_eq!(free_distance(&t, 10).unwrap(), 5);
        let coeffs = compute_transfer_coefficients(&t, 16).unwrap();
        assert_eq!(coeffs.free_distance(), 5);
        for k in 0..5 {
            assert_eq!((coeffs.a(k), coeffs.c(k)), (0, 0));
        }
        for k in 5..=16 {
            assert_eq!(coeffs.a(k), 1 << (k - 5));
            assert_eq!(coeffs.c(k), (k as u128 - 4) << (k - 5));
        }
    }

    #[test]
    fn cap_errors() {
        let t = code("5,7");
        assert_eq!(
            free_distance(&t, 4),
            Err(Error::WeightCapTooSmall { cap: 4 })
        );
        assert_eq!(
            compute_transfer_coefficients(&t, 4),
            Err(Error::WeightCapTooSmall { cap: 4 })
        );
    }

    #[test]
    fn catastrophic_code_detected() {
        // 1 + D and D + D² share the factor 1 + D.
        let t = code("6,3");
        assert_eq!(
            compute_transfer_coefficients(&t, 8),
            Err(Error::CatastrophicCode)
        );
    }

    #[test]
    fn counters_report_overflow() {
        // a_k = 2^(k-5) no longer fits in 128 bits at k = 200.
        let t = code("5,7");
        let result = compute_transfer_coefficients(&t, 200);
        assert!(
            matches!(result, Err(Error::CoefficientOverflow { .. })),
            "{result:?}"
        );
    }

    #[test]
    fn length_bound_values() {
        assert_eq!(ak_length_bound(7, 3, 2), 0);
        assert_eq!(ak_length_bound(1, 1, 2), 1);
        // C(3,0)C(4,2) + C(3,1)C(4,1) + C(3,2)C(4,0) = 6 + 12 + 3.
        assert_eq!(ak_length_bound(5, 3, 2), 21);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(10, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }
}
