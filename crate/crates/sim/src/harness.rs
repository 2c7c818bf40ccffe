//! Monte-Carlo trials and bound evaluation over a sweep grid.
//!
//! Every trial draws from its own stream `(seed, trial index)`, so a cell is
//! a pure function of the configuration regardless of how trials are spread
//! over workers. The same stream index is reused in every cell. One decode
//! per trial serves the whole flag list: the decoded path does not depend on
//! `u`, and the frame is accepted exactly for `u ≤ flag_threshold`.

use std::path::PathBuf;

use rayon::prelude::*;
use yiarq::bounds::{exponent_predictions, h_tilde, union_bounds, BoundParams};
use yiarq::channel::{
    db_to_linear, ebno_to_ecno, transmit, ChannelParams, FadingMode, RandomStream, RNG_ALGORITHM_ID,
};
use yiarq::convcode::{
    build_trellis, compute_transfer_coefficients, encode, CodeSpec, TransferCoefficients, Trellis,
};
use yiarq::decoder::{decode, YIConfig};

use crate::estimate::{estimate, Estimate};
use crate::grid::FlagSpec;
use crate::{Result, SimError};

/// Trials handed to the worker pool at a time; the early-stop rule is only
/// checked between batches.
pub const BATCH: u64 = 4096;

/// Default weight up to which transfer coefficients are enumerated.
pub const DEFAULT_K_MAX: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub code: CodeSpec,
    /// Information bits per frame, `H`.
    pub info_len: usize,
    pub fading: FadingMode,
    pub ebno_db: Vec<f64>,
    pub gamma: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub flags: Vec<FlagSpec>,
    /// Trials per cell; an upper limit when `stop_after_errors` is set.
    pub trials: u64,
    /// Stop a cell once the smallest flag has seen this many bit errors.
    pub stop_after_errors: Option<u64>,
    pub seed: u64,
    pub k_max: usize,
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Single-cell defaults: 10 dB, γ = 5, σ² = ½, u = 0, i.i.d. fading.
    pub fn new(code: CodeSpec, info_len: usize) -> Self {
        Self {
            code,
            info_len,
            fading: FadingMode::Iid,
            ebno_db: vec![10.0],
            gamma: vec![5.0],
            sigma2: vec![0.5],
            flags: vec![FlagSpec::Absolute(0.0)],
            trials: 10_000,
            stop_after_errors: None,
            seed: 0,
            k_max: DEFAULT_K_MAX,
            threads: 0,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(SimError::Config(m.to_string()));
        if self.info_len == 0 {
            return fail("H must be at least 1");
        }
        if self.trials == 0 {
            return fail("trials must be at least 1");
        }
        if self.ebno_db.is_empty()
            || self.gamma.is_empty()
            || self.sigma2.is_empty()
            || self.flags.is_empty()
        {
            return fail("every grid axis needs at least one value");
        }
        if self.gamma.iter().any(|g| !(*g >= 0.0)) || self.sigma2.iter().any(|s| !(*s > 0.0)) {
            return fail("need gamma >= 0 and sigma2 > 0");
        }
        if self.flags.iter().any(
            |f| matches!(f, FlagSpec::Absolute(u) | FlagSpec::FractionOfMax(u) if !(*u >= 0.0)),
        ) {
            return fail("flags must be >= 0");
        }
        if self.stop_after_errors == Some(0) {
            return fail("stop-after-errors must be at least 1");
        }
        Ok(())
    }

    /// Grid cells in output order: σ² outermost, then γ, then E_b/N₀.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &sigma2 in &self.sigma2 {
            for &gamma in &self.gamma {
                for &ebno_db in &self.ebno_db {
                    cells.push(Cell {
                        ebno_db,
                        gamma,
                        sigma2,
                    });
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub ebno_db: f64,
    pub gamma: f64,
    pub sigma2: f64,
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Eb/N0 = {} dB, gamma = {}, sigma2 = {}",
            self.ebno_db, self.gamma, self.sigma2
        )
    }
}

/// One output line: a cell and one flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub ebno_db: f64,
    pub gamma: f64,
    pub sigma2: f64,
    pub u: f64,
    /// Bit errors over accepted frames; `None` when no frame was accepted
    /// or no simulation was run.
    pub pb_mc: Option<Estimate>,
    /// Rejected frames over all frames.
    pub px_mc: Option<Estimate>,
    /// Bit errors over all frames, accepted or not.
    pub pb_all_mc: Option<Estimate>,
    pub pb_bound: f64,
    pub px_bound: Option<f64>,
    pub pe_bound: f64,
    pub trials: u64,
    pub seed: u64,
    pub rng_algorithm_id: &'static str,
}

/// Everything derived once per sweep.
#[derive(Debug)]
pub struct Setup {
    trellis: Trellis,
    coeffs: TransferCoefficients,
    pool: rayon::ThreadPool,
}

impl Setup {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let trellis = build_trellis(&config.code);
        let coeffs = compute_transfer_coefficients(&trellis, config.k_max)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()?;
        Ok(Self {
            trellis,
            coeffs,
            pool,
        })
    }

    pub fn free_distance(&self) -> usize {
        self.coeffs.free_distance()
    }

    pub fn coefficients(&self) -> &TransferCoefficients {
        &self.coeffs
    }
}

fn cell_ecno(config: &ExperimentConfig, cell: &Cell) -> f64 {
    let code = &config.code;
    ebno_to_ecno(
        db_to_linear(cell.ebno_db),
        config.info_len,
        code.memory(),
        code.rate(),
    )
}

struct Bounds {
    pe: f64,
    pb: f64,
    px: Option<f64>,
}

fn bounds_at(
    setup: &Setup,
    config: &ExperimentConfig,
    cell: &Cell,
    ec: f64,
    u: f64,
) -> Result<Bounds> {
    let params = BoundParams::from_gamma(ec, u, setup.free_distance(), cell.gamma, cell.sigma2)?;
    let code = &config.code;
    let r = union_bounds(
        &setup.coeffs,
        &params,
        config.info_len,
        code.memory(),
        code.outputs(),
    )?;
    Ok(Bounds {
        pe: r.pe,
        pb: r.pb,
        px: r.px,
    })
}

struct TrialOutcome {
    bit_errors: u64,
    flag_threshold: f64,
}

fn run_trial(
    setup: &Setup,
    config: &ExperimentConfig,
    channel: &ChannelParams,
    cfg: &YIConfig,
    trial: u64,
) -> Result<TrialOutcome> {
    let mut rng = RandomStream::new(config.seed, trial);
    let info = rng.bits(config.info_len);
    let x = encode(&setup.trellis, &info)?;
    let obs = transmit(&x, config.code.outputs(), channel, config.fading, &mut rng)?;
    let out = decode(&setup.trellis, &obs, channel, cfg)?;
    let bit_errors = out.bits.iter().zip(&info).filter(|(a, b)| a != b).count() as u64;
    Ok(TrialOutcome {
        bit_errors,
        flag_threshold: out.flag_threshold,
    })
}

/// Counters for one flag value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    accepted: u64,
    accepted_errors: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Counts {
    trials: u64,
    all_errors: u64,
    per_flag: Vec<Tally>,
}

impl Counts {
    fn zero(flags: usize) -> Self {
        Self {
            trials: 0,
            all_errors: 0,
            per_flag: vec![Tally::default(); flags],
        }
    }

    fn add(&mut self, t: &TrialOutcome, us: &[f64]) {
        self.trials += 1;
        self.all_errors += t.bit_errors;
        for (tally, &u) in self.per_flag.iter_mut().zip(us) {
            if u <= t.flag_threshold {
                tally.accepted += 1;
                tally.accepted_errors += t.bit_errors;
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        self.all_errors += other.all_errors;
        for (a, b) in self.per_flag.iter_mut().zip(other.per_flag) {
            a.accepted += b.accepted;
            a.accepted_errors += b.accepted_errors;
        }
        self
    }
}

fn simulate_cell(
    setup: &Setup,
    config: &ExperimentConfig,
    channel: &ChannelParams,
    us: &[f64],
) -> Result<Counts> {
    let cfg = YIConfig::viterbi(setup.free_distance())?;
    let watch = us
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut counts = Counts::zero(us.len());
    let mut next = 0u64;
    while next < config.trials {
        let end = (next + BATCH).min(config.trials);
        let batch = setup.pool.install(|| {
            (next..end)
                .into_par_iter()
                .try_fold(
                    || Counts::zero(us.len()),
                    |mut acc, trial| {
                        acc.add(&run_trial(setup, config, channel, &cfg, trial)?, us);
                        Ok::<_, SimError>(acc)
                    },
                )
                .try_reduce(|| Counts::zero(us.len()), |a, b| Ok(a.merge(b)))
        })?;
        counts = counts.merge(batch);
        next = end;
        if let Some(target) = config.stop_after_errors {
            if counts.per_flag[watch].accepted_errors >= target {
                break;
            }
        }
    }
    Ok(counts)
}

fn with_cell<T>(cell: &Cell, r: Result<T>) -> Result<T> {
    r.map_err(|e| SimError::Cell {
        cell: cell.to_string(),
        source: Box::new(e),
    })
}

/// Simulates one cell and returns a row per flag.
pub fn run_point(setup: &Setup, config: &ExperimentConfig, cell: &Cell) -> Result<Vec<SweepRow>> {
    with_cell(cell, run_point_inner(setup, config, cell))
}

fn run_point_inner(setup: &Setup, config: &ExperimentConfig, cell: &Cell) -> Result<Vec<SweepRow>> {
    let ec = cell_ecno(config, cell);
    let channel = ChannelParams::from_gamma(ec, cell.gamma, cell.sigma2)?;
    let d_f = setup.free_distance();
    let us: Vec<f64> = config.flags.iter().map(|f| f.resolve(ec, d_f)).collect();
    let counts = simulate_cell(setup, config, &channel, &us)?;
    let h = config.info_len as u64;
    let pb_all = estimate(counts.all_errors, h * counts.trials)?;
    us.iter()
        .zip(&counts.per_flag)
        .map(|(&u, tally)| {
            let b = bounds_at(setup, config, cell, ec, u)?;
            let pb_mc = match tally.accepted {
                0 => None,
                n => Some(estimate(tally.accepted_errors, h * n)?),
            };
            Ok(SweepRow {
                ebno_db: cell.ebno_db,
                gamma: cell.gamma,
                sigma2: cell.sigma2,
                u,
                pb_mc,
                px_mc: Some(estimate(counts.trials - tally.accepted, counts.trials)?),
                pb_all_mc: Some(pb_all),
                pb_bound: b.pb,
                px_bound: b.px,
                pe_bound: b.pe,
                trials: counts.trials,
                seed: config.seed,
                rng_algorithm_id: RNG_ALGORITHM_ID,
            })
        })
        .collect()
}

/// Bounds only, one row per cell and flag.
pub fn bound_point(setup: &Setup, config: &ExperimentConfig, cell: &Cell) -> Result<Vec<SweepRow>> {
    with_cell(cell, {
        let ec = cell_ecno(config, cell);
        config
            .flags
            .iter()
            .map(|f| {
                let u = f.resolve(ec, setup.free_distance());
                let b = bounds_at(setup, config, cell, ec, u)?;
                Ok(SweepRow {
                    ebno_db: cell.ebno_db,
                    gamma: cell.gamma,
                    sigma2: cell.sigma2,
                    u,
                    pb_mc: None,
                    px_mc: None,
                    pb_all_mc: None,
                    pb_bound: b.pb,
                    px_bound: b.px,
                    pe_bound: b.pe,
                    trials: 0,
                    seed: config.seed,
                    rng_algorithm_id: RNG_ALGORITHM_ID,
                })
            })
            .collect()
    })
}

/// Monte-Carlo sweep over every cell.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let setup = Setup::new(config)?;
    let mut rows = Vec::new();
    for cell in config.cells() {
        rows.extend(run_point(&setup, config, &cell)?);
    }
    Ok(rows)
}

/// Analytical sweep over every cell.
pub fn bound_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let setup = Setup::new(config)?;
    let mut rows = Vec::new();
    for cell in config.cells() {
        rows.extend(bound_point(&setup, config, &cell)?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentRow {
    pub ebno_db: f64,
    pub gamma: f64,
    pub sigma2: f64,
    pub u: f64,
    pub d_tilde: f64,
    pub h_tilde: f64,
    /// `h̃(−u)`, when the retransmission bound is defined.
    pub h_tilde_retx: Option<f64>,
    pub ebno_slope: f64,
    pub gamma_exponent_pb: f64,
    pub gamma_exponent_px: Option<f64>,
}

/// `h̃(u)` and the asymptotic exponent predictions for every cell and flag.
pub fn exponent_sweep(config: &ExperimentConfig) -> Result<Vec<ExponentRow>> {
    config.validate()?;
    let d_f = yiarq::convcode::free_distance(&build_trellis(&config.code), config.k_max)?;
    let mut rows = Vec::new();
    for cell in config.cells() {
        let ec = cell_ecno(config, &cell);
        for f in &config.flags {
            let u = f.resolve(ec, d_f);
            let p = with_cell(
                &cell,
                BoundParams::from_gamma(ec, u, d_f, cell.gamma, cell.sigma2).map_err(Into::into),
            )?;
            let e = exponent_predictions(&p);
            rows.push(ExponentRow {
                ebno_db: cell.ebno_db,
                gamma: cell.gamma,
                sigma2: cell.sigma2,
                u,
                d_tilde: with_cell(&cell, yiarq::bounds::d_tilde(&p).map_err(Into::into))?,
                h_tilde: h_tilde(u, &p),
                h_tilde_retx: p.retransmission_bound_defined().then(|| h_tilde(-u, &p)),
                ebno_slope: e.ebno_slope,
                gamma_exponent_pb: e.gamma_exponent_pb,
                gamma_exponent_px: e.gamma_exponent_px,
            });
        }
    }
    Ok(rows)
}
