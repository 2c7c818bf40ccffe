//! CSV writers. Metadata goes first as `#` lines; floats are printed in
//! shortest round-trip form.

use std::io::Write;

use yiarq::channel::RNG_ALGORITHM_ID;
use yiarq::convcode::TransferCoefficients;

use crate::estimate::Estimate;
use crate::harness::{ExperimentConfig, ExponentRow, SweepRow};
use crate::Result;

pub const SWEEP_COLUMNS: [&str; 21] = [
    "ebno_db",
    "gamma",
    "sigma2",
    "u",
    "pb_mc",
    "pb_mc_ci_low",
    "pb_mc_ci_high",
    "pb_mc_k",
    "pb_mc_n",
    "px_mc",
    "px_mc_ci_low",
    "px_mc_ci_high",
    "px_mc_k",
    "px_mc_n",
    "pb_all_mc",
    "pb_bound",
    "px_bound",
    "pe_bound",
    "trials",
    "seed",
    "rng_algorithm_id",
];

pub const EXPONENT_COLUMNS: [&str; 10] = [
    "ebno_db",
    "gamma",
    "sigma2",
    "u",
    "d_tilde",
    "h_tilde",
    "h_tilde_retx",
    "ebno_slope",
    "gamma_exponent_pb",
    "gamma_exponent_px",
];

/// Shortest decimal that reads back to the same `f64`; exponent notation
/// outside `[1e-4, 1e15)`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn metadata(out: &mut impl Write, config: &ExperimentConfig, kind: &str) -> Result<()> {
    writeln!(out, "# yiarq-sim {} {kind}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# seed={}", config.seed)?;
    writeln!(out, "# rng={RNG_ALGORITHM_ID}")?;
    writeln!(out, "# code={}", config.code.to_octal())?;
    writeln!(out, "# H={}", config.info_len)?;
    writeln!(out, "# m={}", config.code.memory())?;
    writeln!(out, "# fading={}", config.fading)?;
    writeln!(out, "# kmax={}", config.k_max)?;
    let flags: Vec<String> = config.flags.iter().map(ToString::to_string).collect();
    writeln!(out, "# flags={}", flags.join(" "))?;
    Ok(())
}

fn estimate_fields(e: Option<&Estimate>, simulated: bool) -> [String; 5] {
    match e {
        Some(e) => [
            format_float(e.p_hat),
            format_float(e.ci_low),
            format_float(e.ci_high),
            e.k.to_string(),
            e.n.to_string(),
        ],
        // No accepted frame: undefined rate, zero counts.
        None if simulated => [
            String::new(),
            String::new(),
            String::new(),
            "0".into(),
            "0".into(),
        ],
        None => Default::default(),
    }
}

pub fn write_sweep(
    out: &mut impl Write,
    config: &ExperimentConfig,
    rows: &[SweepRow],
    kind: &str,
) -> Result<()> {
    metadata(out, config, kind)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        let simulated = r.trials > 0;
        let mut rec = vec![
            format_float(r.ebno_db),
            format_float(r.gamma),
            format_float(r.sigma2),
            format_float(r.u),
        ];
        rec.extend(estimate_fields(r.pb_mc.as_ref(), simulated));
        rec.extend(estimate_fields(r.px_mc.as_ref(), simulated));
        rec.push(opt(r.pb_all_mc.map(|e| e.p_hat)));
        rec.push(format_float(r.pb_bound));
        rec.push(opt(r.px_bound));
        rec.push(format_float(r.pe_bound));
        rec.push(r.trials.to_string());
        rec.push(r.seed.to_string());
        rec.push(r.rng_algorithm_id.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_exponents(
    out: &mut impl Write,
    config: &ExperimentConfig,
    rows: &[ExponentRow],
) -> Result<()> {
    metadata(out, config, "exponents")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EXPONENT_COLUMNS)?;
    for r in rows {
        w.write_record([
            format_float(r.ebno_db),
            format_float(r.gamma),
            format_float(r.sigma2),
            format_float(r.u),
            format_float(r.d_tilde),
            format_float(r.h_tilde),
            opt(r.h_tilde_retx),
            format_float(r.ebno_slope),
            format_float(r.gamma_exponent_pb),
            opt(r.gamma_exponent_px),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `d_f` line followed by a `k,a_k,c_k` table.
pub fn write_coefficients(
    out: &mut impl Write,
    code: &str,
    coeffs: &TransferCoefficients,
) -> Result<()> {
    writeln!(out, "# code={code}")?;
    writeln!(out, "# d_f={}", coeffs.free_distance())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "a_k", "c_k"])?;
    for (k, a, c) in coeffs
        .iter()
        .filter(|(k, _, _)| *k >= coeffs.free_distance())
    {
        w.write_record([k.to_string(), a.to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
