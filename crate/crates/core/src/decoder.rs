//! CSI-weighted Viterbi decoding with the Yamamoto-Itoh reliability label.
//!
//! Survivors are selected by the largest accumulated metric `Σ α·x·y`. When
//! two paths merge, the winner keeps label C only if it was labelled C and
//! its metric margin over the loser reaches `(u/d_f)·√(N₀/2)·Σ|x′−x|α²`
//! summed over the positions where the two paths differ. Once X, always X.
//! A frame is accepted when the survivor entering state 0 at the final level
//! carries C.
//!
//! Survivor selection never looks at `u`, so besides the label for the
//! configured flag every decode also reports the largest flag at which the
//! frame would still be accepted ([`DecodeOutcome::flag_threshold`]).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::channel::{ChannelParams, FadedObservation};
use crate::convcode::Trellis;
use crate::{Error, Result};

/// Yamamoto-Itoh flag and the free distance that scales it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YIConfig {
    u: f64,
    free_distance: usize,
}

impl YIConfig {
    pub fn new(u: f64, free_distance: usize) -> Result<Self> {
        if !(u >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "flag u must be >= 0, got {u}"
            )));
        }
        if free_distance == 0 {
            return Err(Error::InvalidParameter("free distance must be >= 1".into()));
        }
        Ok(Self { u, free_distance })
    }

    /// Plain Viterbi decoding (`u = 0`).
    pub fn viterbi(free_distance: usize) -> Result<Self> {
        Self::new(0.0, free_distance)
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn free_distance(&self) -> usize {
        self.free_distance
    }
}

/// Decoder verdict for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    /// Decoded information bits, tail removed.
    pub bits: Vec<u8>,
    /// `false` requests a retransmission.
    pub accepted: bool,
    /// Accumulated metric of the final survivor.
    pub metric: f64,
    /// Largest flag `u` for which the final survivor is still labelled C;
    /// the frame is accepted exactly for `u ≤ flag_threshold`.
    pub flag_threshold: f64,
}

impl DecodeOutcome {
    /// Label verdict for another flag value on the same realization.
    pub fn accepted_at(&self, u: f64) -> bool {
        u <= self.flag_threshold
    }
}

/// Branch metric `λ = Σ α·x·y`.
pub fn branch_metric(alpha: &[f64], x: &[f64], y: &[f64]) -> Result<f64> {
    if alpha.len() != x.len() || y.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: if alpha.len() != x.len() {
                alpha.len()
            } else {
                y.len()
            },
        });
    }
    Ok(alpha
        .iter()
        .zip(x)
        .zip(y)
        .map(|((a, x), y)| a * x * y)
        .sum())
}

/// `Σ |x′ − x|·α²` between the paths driven from state 0 by two input
/// sequences of equal length that end in the same state.
pub fn divergence_weight(
    trellis: &Trellis,
    survivor: &[u8],
    discarded: &[u8],
    alpha: &[f64],
) -> Result<f64> {
    if survivor.len() != discarded.len() || survivor.is_empty() {
        return Err(Error::Precondition(
            "paths must have the same nonzero length".into(),
        ));
    }
    let n_c = trellis.outputs();
    if alpha.len() < survivor.len() * n_c {
        return Err(Error::LengthMismatch {
            expected: survivor.len() * n_c,
            found: alpha.len(),
        });
    }
    let (mut sa, mut sb) = (0usize, 0usize);
    let mut total = 0.0;
    for (j, (&a, &b)) in survivor.iter().zip(discarded).enumerate() {
        if a > 1 || b > 1 {
            return Err(Error::InvalidBit(j));
        }
        let diff = trellis.output_bits(sa, a) ^ trellis.output_bits(sb, b);
        total += differing_energy(diff, &alpha[j * n_c..(j + 1) * n_c]);
        sa = trellis.next_state(sa, a);
        sb = trellis.next_state(sb, b);
    }
    if sa != sb {
        return Err(Error::Precondition(format!(
            "paths end in different states ({sa} and {sb})"
        )));
    }
    Ok(total)
}

#[inline]
fn differing_energy(mut diff: u32, alpha: &[f64]) -> f64 {
    let mut total = 0.0;
    while diff != 0 {
        let i = diff.trailing_zeros() as usize;
        total += 2.0 * alpha[i] * alpha[i];
        diff &= diff - 1;
    }
    total
}

/// Survivor bookkeeping for one level.
#[derive(Clone, Copy)]
struct Survivor {
    metric: f64,
    reachable: bool,
    clean: bool,
    threshold: f64,
}

const UNREACHED: Survivor = Survivor {
    metric: f64::NEG_INFINITY,
    reachable: false,
    clean: true,
    threshold: f64::INFINITY,
};

/// Decodes one terminated frame.
pub fn decode(
    trellis: &Trellis,
    obs: &FadedObservation,
    params: &ChannelParams,
    cfg: &YIConfig,
) -> Result<DecodeOutcome> {
    let n_c = trellis.outputs();
    let m = trellis.memory();
    if obs.is_empty() || !obs.len().is_multiple_of(n_c) {
        return Err(Error::InvalidParameter(format!(
            "observation length {} is not a positive multiple of n_c = {n_c}",
            obs.len()
        )));
    }
    let levels = obs.len() / n_c;
    if levels <= m {
        return Err(Error::InvalidParameter(format!(
            "{levels} branches cannot hold information plus {m} tail bits"
        )));
    }
    let info_len = levels - m;
    let num_states = trellis.num_states();
    let (y, alpha) = (obs.y(), obs.alpha());
    let scale = cfg.u / cfg.free_distance as f64 * params.noise_std();
    let dist_over_noise = cfg.free_distance as f64 / params.noise_std();

    // Weighted received values α·y per symbol; λ = Σ x·(α·y).
    let weighted: Vec<f64> = alpha.iter().zip(y).map(|(a, y)| a * y).collect();

    // back[t·S + s]: which of `predecessors(s)` the survivor in s at level
    // t + 1 came from.
    let mut back = vec![0u8; levels * num_states];
    let mut current = vec![UNREACHED; num_states];
    current[0] = Survivor {
        metric: 0.0,
        reachable: true,
        clean: true,
        threshold: f64::INFINITY,
    };
    let mut next = vec![UNREACHED; num_states];

    for t in 0..levels {
        let wy = &weighted[t * n_c..(t + 1) * n_c];
        let branch_alpha = &alpha[t * n_c..(t + 1) * n_c];
        for s in 0..num_states {
            let [(p0, b0), (p1, b1)] = trellis.predecessors(s);
            let cand = |p: usize, b: u8| -> f64 {
                let metric = current[p].metric;
                let lambda: f64 = trellis
                    .symbols(p, b)
                    .iter()
                    .zip(wy)
                    .map(|(x, v)| x * v)
                    .sum();
                metric + lambda
            };
            let (r0, r1) = (current[p0].reachable, current[p1].reachable);
            let survivor = match (r0, r1) {
                (false, false) => {
                    next[s] = UNREACHED;
                    continue;
                }
                (true, false) | (false, true) => {
                    let (p, b) = if r0 { (p0, b0) } else { (p1, b1) };
                    back[t * num_states + s] = u8::from(!r0);
                    Survivor {
                        metric: cand(p, b),
                        ..current[p]
                    }
                }
                (true, true) => {
                    let (m0, m1) = (cand(p0, b0), cand(p1, b1));
                    // Ties go to the lower-indexed predecessor.
                    let second_wins = m1 > m0;
                    let ((pw, bw, mw), (pl, bl, ml)) = if second_wins {
                        ((p1, b1, m1), (p0, b0, m0))
                    } else {
                        ((p0, b0, m0), (p1, b1, m1))
                    };
                    back[t * num_states + s] = u8::from(second_wins);
                    let margin = mw - ml;
                    let weight = merge_divergence(
                        trellis,
                        &back,
                        t,
                        (pw, bw),
                        (pl, bl),
                        branch_alpha,
                        alpha,
                    );
                    let winner = current[pw];
                    let merge_threshold = if weight > 0.0 {
                        dist_over_noise * margin / weight
                    } else {
                        f64::INFINITY
                    };
                    Survivor {
                        metric: mw,
                        reachable: true,
                        clean: winner.clean && margin >= scale * weight,
                        threshold: winner.threshold.min(merge_threshold),
                    }
                }
            };
            next[s] = survivor;
        }
        core::mem::swap(&mut current, &mut next);
    }

    let mut bits = vec![0u8; levels];
    let mut state = 0usize;
    for t in (0..levels).rev() {
        let (prev, bit) = trellis.predecessors(state)[back[t * num_states + state] as usize];
        bits[t] = bit;
        state = prev;
    }
    bits.truncate(info_len);
    let last = current[0];
    Ok(DecodeOutcome {
        bits,
        accepted: last.clean,
        metric: last.metric,
        flag_threshold: last.threshold,
    })
}

/// Divergence weight of the two paths merging into a state at level `t + 1`,
/// found by tracing both survivors back until their states coincide.
fn merge_divergence(
    trellis: &Trellis,
    back: &[u8],
    t: usize,
    winner: (usize, u8),
    loser: (usize, u8),
    branch_alpha: &[f64],
    alpha: &[f64],
) -> f64 {
    let num_states = trellis.num_states();
    let n_c = trellis.outputs();
    let diff = trellis.output_bits(winner.0, winner.1) ^ trellis.output_bits(loser.0, loser.1);
    let mut total = differing_energy(diff, branch_alpha);
    let (mut a, mut b) = (winner.0, loser.0);
    let mut level = t;
    while a != b {
        // Both sit at `level` ≥ 1, since every path starts in state 0.
        let (pa, ba) = trellis.predecessors(a)[back[(level - 1) * num_states + a] as usize];
        let (pb, bb) = trellis.predecessors(b)[back[(level - 1) * num_states + b] as usize];
        let diff = trellis.output_bits(pa, ba) ^ trellis.output_bits(pb, bb);
        total += differing_energy(diff, &alpha[(level - 1) * n_c..level * n_c]);
        a = pa;
        b = pb;
        level -= 1;
    }
    total
}
