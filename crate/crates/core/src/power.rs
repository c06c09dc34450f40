//! Dissipation of the link between 300 K and 4 K and of the ERSFQ counter bank.
//!
//! Cable figures are per coaxial line: conducted heat plus amplifier power.
//! ERSFQ dynamic power is `I_bias · f · Φ0 · 2`; the default per-entry bias
//! current is affine in the counter width and calibrated so that an entry
//! dissipates `(9.71·b + 16.8)` pW at 1.33 MHz.

use rayon::prelude::*;

use crate::bandwidth::{bw_meas_for, bw_msb};
use crate::counter::provisioned_count;
use crate::timing::GateTimings;
use crate::{Error, Result};

/// Per-bit slope of the default entry power, pW.
pub const ENTRY_POWER_PER_BIT_PW: f64 = 9.71;
/// Width-independent part of the default entry power, pW.
pub const ENTRY_POWER_FIXED_PW: f64 = 16.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CableSpec {
    pub heat_inflow_mw: f64,
    pub amp_power_mw: f64,
    pub capacity_bps: f64,
}

impl Default for CableSpec {
    /// Stainless coax: 1.0 mW conducted heat, 10.5 mW amplifier, 1 Gbps.
    fn default() -> Self {
        CableSpec { heat_inflow_mw: 1.0, amp_power_mw: 10.5, capacity_bps: 1e9 }
    }
}

impl CableSpec {
    pub fn per_cable_mw(&self) -> f64 {
        self.heat_inflow_mw + self.amp_power_mw
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CableLoad {
    pub cables: u64,
    pub power_mw: f64,
}

/// Enough cables to carry `bw_bps`, never fewer than one.
pub fn cable_power(bw_bps: f64, spec: &CableSpec) -> Result<CableLoad> {
    if !bw_bps.is_finite() || bw_bps < 0.0 {
        return Err(Error::domain(format!("bandwidth must be finite and >= 0, got {bw_bps}")));
    }
    if spec.capacity_bps.is_nan() || spec.capacity_bps <= 0.0 {
        return Err(Error::domain("cable capacity must be positive"));
    }
    let cables = ((bw_bps / spec.capacity_bps).ceil() as u64).max(1);
    Ok(CableLoad { cables, power_mw: cables as f64 * spec.per_cable_mw() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfqPowerSpec {
    pub flux_quantum_wb: f64,
    pub freq_hz: f64,
    /// Width-independent bias current per entry, amperes.
    pub bias_fixed_a: f64,
    /// Additional bias current per counter bit, amperes.
    pub bias_per_bit_a: f64,
}

impl Default for SfqPowerSpec {
    fn default() -> Self {
        let flux_quantum_wb = 2.068e-15;
        let freq_hz = 1.33e6;
        let volts = 2.0 * freq_hz * flux_quantum_wb;
        SfqPowerSpec {
            flux_quantum_wb,
            freq_hz,
            bias_fixed_a: ENTRY_POWER_FIXED_PW * 1e-12 / volts,
            bias_per_bit_a: ENTRY_POWER_PER_BIT_PW * 1e-12 / volts,
        }
    }
}

impl SfqPowerSpec {
    pub fn bias_current_a(&self, b: u32) -> f64 {
        self.bias_fixed_a + f64::from(b) * self.bias_per_bit_a
    }

    /// Dynamic ERSFQ power of one `b`-bit entry, watts.
    pub fn entry_power_w(&self, b: u32) -> f64 {
        self.bias_current_a(b) * self.freq_hz * self.flux_quantum_wb * 2.0
    }

    /// All `N(N+1)/2` provisioned entries, watts.
    pub fn bank_power_w(&self, n_qubits: usize, b: u32) -> f64 {
        provisioned_count(n_qubits) as f64 * self.entry_power_w(b)
    }
}

pub fn counter_power_per_entry(b: u32, spec: &SfqPowerSpec) -> Result<f64> {
    if b == 0 {
        return Err(Error::domain("counter width must be at least 1"));
    }
    Ok(spec.entry_power_w(b))
}

pub fn total_counter_power(n_qubits: usize, b: u32, spec: &SfqPowerSpec) -> Result<f64> {
    if n_qubits == 0 {
        return Err(Error::domain("need at least one qubit"));
    }
    Ok(provisioned_count(n_qubits) as f64 * counter_power_per_entry(b, spec)?)
}

/// How the proposed system sizes its counters as `N` grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitPolicy {
    Fixed(u32),
    /// `b = ceil(log2 N)`, at least 2.
    LogN,
}

impl BitPolicy {
    pub fn bits_for(self, n_qubits: usize) -> u32 {
        match self {
            BitPolicy::Fixed(b) => b,
            BitPolicy::LogN => ceil_log2(n_qubits).max(2),
        }
    }
}

pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerReport {
    pub n_qubits: usize,
    pub bw_required_bps: f64,
    pub n_cables: u64,
    pub cable_power_mw: f64,
    pub counter_power_w: f64,
    pub total_mw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub n_qubits: usize,
    pub counter_bits: u32,
    pub baseline: PowerReport,
    pub proposed: PowerReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    /// Smallest `N` whose proposed total is below the baseline's.
    pub crossover: Option<usize>,
}

/// Baseline vs counter-based dissipation for worst-case machines.
///
/// Both systems run at the per-qubit circuit time of `timings`. The baseline
/// cables carry `N / t_QC`; the proposed cables carry MSB streaming for
/// `M = N-1` in-use counters, while all `N(N+1)/2` counters draw bias power.
pub fn system_comparison(
    n_values: &[usize],
    timings: &GateTimings,
    cable: &CableSpec,
    sfq: &SfqPowerSpec,
    policy: BitPolicy,
) -> Result<Comparison> {
    let t_qc_ns = timings.per_qubit_circuit_time_ns();
    let rows = n_values
        .par_iter()
        .map(|&n| {
            if n < 2 {
                return Err(Error::domain(format!("comparison needs N >= 2, got {n}")));
            }
            let b = policy.bits_for(n);
            let bw_base = bw_meas_for(n, t_qc_ns)?;
            let base = cable_power(bw_base, cable)?;
            let bw_prop = bw_msb(n - 1, b, t_qc_ns)?;
            let prop = cable_power(bw_prop, cable)?;
            let counter_w = total_counter_power(n, b, sfq)?;
            Ok(ComparisonRow {
                n_qubits: n,
                counter_bits: b,
                baseline: PowerReport {
                    n_qubits: n,
                    bw_required_bps: bw_base,
                    n_cables: base.cables,
                    cable_power_mw: base.power_mw,
                    counter_power_w: 0.0,
                    total_mw: base.power_mw,
                },
                proposed: PowerReport {
                    n_qubits: n,
                    bw_required_bps: bw_prop,
                    n_cables: prop.cables,
                    cable_power_mw: prop.power_mw,
                    counter_power_w: counter_w,
                    total_mw: prop.power_mw + counter_w * 1e3,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let crossover = rows.iter().filter(|r| r.proposed.total_mw < r.baseline.total_mw).map(|r| r.n_qubits).min();
    Ok(Comparison { rows, crossover })
}
