//! Inter-temperature bandwidth of the baseline and counter-based systems.
//!
//! Rates are bits per second; durations come in as nanoseconds.
//!
//! The baseline ships all `N` measured bits every circuit (`N / t_QC`). The
//! counter-based system ships one MSB per in-use counter every `2^(b-1)`
//! trials (`M / (2^(b-1) t_QC)`) and finally collects the `b·M` residual
//! bits over a window `t_C`.

use rayon::prelude::*;

use crate::timing::{ExecutionProfile, GateTimings};
use crate::{Error, Result};

const NS_PER_S: f64 = 1e9;

fn per_ns_to_bps(bits: f64, ns: f64) -> f64 {
    bits * NS_PER_S / ns
}

/// `2^(b-1)`: trials between two MSB flushes of the same counter.
pub fn flush_period(b: u32) -> u64 {
    1u64 << (b - 1)
}

/// Peak rate of QAOA parameter transfer.
///
/// The `2·l·b_p` parameter bits for layer `l` must arrive before that layer
/// starts in the first trial, i.e. within `(N(t_reset+t_init) + (l-1)t_L)/P`.
/// The maximum over `l` is attained at `l = 1` or `l = L`; for `L = 1` only
/// the first deadline exists.
pub fn bw_inst(timings: &GateTimings, profile: &ExecutionProfile, param_bits: u32) -> Result<f64> {
    let ExecutionProfile { n_qubits, layers, parallelism, .. } = *profile;
    if layers == 0 {
        return Err(Error::domain("instruction bandwidth needs L >= 1"));
    }
    let p = parallelism as f64;
    let bp = f64::from(param_bits);
    let setup_ns = n_qubits as f64 * (timings.reset_ns + timings.init_ns);
    if setup_ns <= 0.0 {
        return Err(Error::domain("reset + init time must be positive"));
    }
    let first = per_ns_to_bps(2.0 * p * bp, setup_ns);
    if layers == 1 {
        return Ok(first);
    }
    let t_l = profile.layer_time_ns(timings);
    if t_l <= 0.0 {
        return Err(Error::domain("layer time must be positive for L >= 2"));
    }
    let l = layers as f64;
    let last = per_ns_to_bps(2.0 * p * l * bp, (l - 1.0) * t_l);
    Ok(first.max(last))
}

/// `N / t_QC`: every measured bit leaves the cryostat after every trial.
pub fn bw_meas_for(n_qubits: usize, t_qc_ns: f64) -> Result<f64> {
    if t_qc_ns.is_nan() || t_qc_ns <= 0.0 {
        return Err(Error::domain(format!("circuit time must be positive, got {t_qc_ns} ns")));
    }
    Ok(per_ns_to_bps(n_qubits as f64, t_qc_ns))
}

pub fn bw_meas(timings: &GateTimings, profile: &ExecutionProfile) -> Result<f64> {
    bw_meas_for(profile.n_qubits, profile.circuit_time_ns(timings))
}

/// `M / (2^(b-1) t_QC)`.
pub fn bw_msb(active: usize, b: u32, t_qc_ns: f64) -> Result<f64> {
    if b < 2 {
        return Err(Error::domain(format!("MSB streaming needs b >= 2, got {b}")));
    }
    if b > 63 {
        return Err(Error::domain(format!("counter width {b} too large")));
    }
    if active == 0 {
        return Err(Error::domain("at least one counter must be in use"));
    }
    if t_qc_ns.is_nan() || t_qc_ns <= 0.0 {
        return Err(Error::domain(format!("circuit time must be positive, got {t_qc_ns} ns")));
    }
    Ok(per_ns_to_bps(active as f64, flush_period(b) as f64 * t_qc_ns))
}

/// `b·M / t_C`.
pub fn bw_non_msb(active: usize, b: u32, collection_ns: f64) -> Result<f64> {
    if collection_ns.is_nan() || collection_ns <= 0.0 {
        return Err(Error::domain(format!("collection window must be positive, got {collection_ns} ns")));
    }
    Ok(per_ns_to_bps(f64::from(b) * active as f64, collection_ns))
}

/// Shortest collection window that keeps residual readout at or below the
/// MSB streaming rate: `b·2^(b-1)·t_QC`.
pub fn min_collection_time_ns(b: u32, t_qc_ns: f64) -> f64 {
    f64::from(b) * flush_period(b) as f64 * t_qc_ns
}

/// Counter width chosen under an execution-time budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterWidth {
    pub bits: u32,
    /// Set when even `b = 1` breaks the budget and the width was clamped.
    pub clamped: bool,
}

/// Largest `b >= 1` with `b·2^b < 2rT`, i.e. collection adds less than a
/// fraction `r` to the `T`-trial run. Falls back to `b = 1` (flagged) when no
/// width satisfies the bound.
pub fn choose_b(trials: u64, r: f64) -> CounterWidth {
    let budget = 2.0 * r * trials as f64;
    let fits = |b: u32| f64::from(b) * (2f64).powi(b as i32) < budget;
    if !fits(1) {
        return CounterWidth { bits: 1, clamped: true };
    }
    let mut bits = 1;
    while bits < 62 && fits(bits + 1) {
        bits += 1;
    }
    CounterWidth { bits, clamped: false }
}

/// `BW_MSB / BW_meas = (M/N) / 2^(b-1)`; the circuit time cancels.
pub fn reduction_ratio(active: usize, b: u32, n_qubits: usize) -> f64 {
    (active as f64 / n_qubits as f64) / (2f64).powi(b as i32 - 1)
}

/// The `M ≈ N` limit of [`reduction_ratio`]: `2^(1-b)`.
pub fn asymptotic_reduction_ratio(b: u32) -> f64 {
    (2f64).powi(1 - b as i32)
}

/// Run-time multiplier from residual collection: `1 + b·2^(b-1)/T`.
pub fn overhead_factor(trials: u64, b: u32) -> f64 {
    1.0 + f64::from(b) * (2f64).powi(b as i32 - 1) / trials as f64
}

/// Inputs for a full bandwidth evaluation of one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthScenario {
    pub timings: GateTimings,
    pub profile: ExecutionProfile,
    pub param_bits: u32,
    pub trials: u64,
    /// `M`, counters wired to nonzero coefficients.
    pub active_counters: usize,
    pub counter_bits: u32,
    /// Residual collection window; the minimal smoothing window if `None`.
    pub collection_ns: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthReport {
    pub bw_inst: f64,
    pub bw_meas: f64,
    pub bw_msb: f64,
    pub bw_non_msb: f64,
    pub bw_proposed: f64,
    pub reduction_ratio: f64,
    pub chosen_b: u32,
    pub t_qc_ns: f64,
    pub t_c_ns: f64,
    pub overhead_factor: f64,
}

impl BandwidthReport {
    pub fn evaluate(s: &BandwidthScenario) -> Result<Self> {
        let t_qc_ns = s.profile.circuit_time_ns(&s.timings);
        let bw_meas = bw_meas_for(s.profile.n_qubits, t_qc_ns)?;
        let bw_msb = bw_msb(s.active_counters, s.counter_bits, t_qc_ns)?;
        let t_c_ns = s.collection_ns.unwrap_or_else(|| min_collection_time_ns(s.counter_bits, t_qc_ns));
        let bw_non_msb = bw_non_msb(s.active_counters, s.counter_bits, t_c_ns)?;
        let bw_proposed = bw_msb.max(bw_non_msb);
        if s.trials == 0 {
            return Err(Error::domain("trial count must be at least 1"));
        }
        Ok(BandwidthReport {
            bw_inst: bw_inst(&s.timings, &s.profile, s.param_bits)?,
            bw_meas,
            bw_msb,
            bw_non_msb,
            bw_proposed,
            reduction_ratio: bw_proposed / bw_meas,
            chosen_b: s.counter_bits,
            t_qc_ns,
            t_c_ns,
            overhead_factor: overhead_factor(s.trials, s.counter_bits),
        })
    }
}

/// Worst-case machine the staircase's absolute bandwidth columns refer to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepReference {
    pub n_qubits: usize,
    pub t_qc_ns: f64,
}

impl Default for SweepReference {
    fn default() -> Self {
        SweepReference { n_qubits: 1000, t_qc_ns: crate::timing::REFERENCE_CIRCUIT_TIME_NS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaircaseRow {
    pub trials: u64,
    pub r: f64,
    pub b: u32,
    pub clamped: bool,
    /// `2^(1-b)`, the large-`N` bandwidth ratio.
    pub reduction_ratio: f64,
    pub overhead_factor: f64,
    pub bw_meas_bps: f64,
    /// `BW_MSB` at the reference size with `M = N-1`.
    pub bw_proposed_bps: f64,
}

/// Best counter width and bandwidth ratio for every `(T, r)`, rows ordered
/// by `T` then `r` as given.
pub fn staircase_sweep(trial_counts: &[u64], overheads: &[f64], reference: SweepReference) -> Result<Vec<StaircaseRow>> {
    if trial_counts.is_empty() || overheads.is_empty() {
        return Err(Error::domain("staircase sweep needs nonempty T and r grids"));
    }
    if reference.n_qubits < 2 {
        return Err(Error::domain("reference machine needs N >= 2"));
    }
    let bw_meas = bw_meas_for(reference.n_qubits, reference.t_qc_ns)?;
    let m = reference.n_qubits - 1;
    let grid: Vec<(u64, f64)> = trial_counts.iter().flat_map(|&t| overheads.iter().map(move |&r| (t, r))).collect();
    grid.par_iter()
        .map(|&(trials, r)| {
            let CounterWidth { bits, clamped } = choose_b(trials, r);
            // b = 1 streams every trial; the MSB formula needs b >= 2
            let bw_proposed = if bits >= 2 { bw_msb(m, bits, reference.t_qc_ns)? } else { per_ns_to_bps(m as f64, reference.t_qc_ns) };
            Ok(StaircaseRow {
                trials,
                r,
                b: bits,
                clamped,
                reduction_ratio: asymptotic_reduction_ratio(bits),
                overhead_factor: overhead_factor(trials, bits),
                bw_meas_bps: bw_meas,
                bw_proposed_bps: bw_proposed,
            })
        })
        .collect()
}

/// Whether instruction transfer stays below readout for the worst-case
/// profile of `n` qubits with `b_p`-bit parameters.
pub fn readout_dominates(timings: &GateTimings, n_qubits: usize, param_bits: u32) -> Result<bool> {
    let profile = ExecutionProfile::worst_case(n_qubits)?;
    Ok(bw_inst(timings, &profile, param_bits)? < bw_meas(timings, &profile)?)
}

/// Smallest `N >= 2` from which readout dominates instruction transfer for
/// every larger worst-case machine, searched up to `limit`.
///
/// The worst-case ratio `BW_inst/BW_meas = 2·b_p·t_QC(N) / (N(t_reset+t_init))`
/// falls monotonically in `N`, so the first dominated size is the threshold.
pub fn dominance_threshold(timings: &GateTimings, param_bits: u32, limit: usize) -> Result<Option<usize>> {
    for n in 2..=limit {
        if readout_dominates(timings, n, param_bits)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}
