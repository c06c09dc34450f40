//! Analytical execution-time model of one QAOA circuit.
//!
//! Each layer applies `S` R_z gates, `C` entangling blocks (CNOT-R_z-CNOT)
//! and `N` R_x gates. One-qubit operations run `P` wide, two-qubit
//! operations `P/2` wide, which is why the per-layer time charges `2C`
//! entangling blocks. All durations are nanoseconds.

use crate::ising::IsingInstance;
use crate::{Error, Result};

/// Per-qubit circuit time of the reference gate set.
pub const REFERENCE_CIRCUIT_TIME_NS: f64 = 750.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateTimings {
    pub reset_ns: f64,
    pub init_ns: f64,
    pub rx_ns: f64,
    pub rz_ns: f64,
    pub cnot_ns: f64,
    pub meas_ns: f64,
}

impl GateTimings {
    /// `paper-v1`: reset 100, init/R_x/R_z 10, CNOT 60, measurement 380 ns.
    pub const REFERENCE: GateTimings =
        GateTimings { reset_ns: 100.0, init_ns: 10.0, rx_ns: 10.0, rz_ns: 10.0, cnot_ns: 60.0, meas_ns: 380.0 };

    pub fn preset(name: &str) -> Option<GateTimings> {
        match name {
            "paper-v1" => Some(Self::REFERENCE),
            _ => None,
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["paper-v1"]
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.reset_ns, self.init_ns, self.rx_ns, self.rz_ns, self.cnot_ns, self.meas_ns];
        if all.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::validation(format!("gate durations must be finite and >= 0: {self:?}")));
        }
        Ok(())
    }

    /// CNOT-R_z-CNOT.
    pub fn entangling_ns(&self) -> f64 {
        2.0 * self.cnot_ns + self.rz_ns
    }

    /// Per-qubit accounting of a fully parallel worst-case circuit: one
    /// reset, three 10-ns-class gates (init, R_x, R_z), four CNOTs and one
    /// measurement. Yields [`REFERENCE_CIRCUIT_TIME_NS`] for `paper-v1`.
    ///
    /// This is not the same as [`circuit_time`] at finite `N`, which charges
    /// `2(N-1)/N` entangling blocks per qubit and no R_z outside them.
    pub fn per_qubit_circuit_time_ns(&self) -> f64 {
        self.reset_ns + self.init_ns + self.rx_ns + self.rz_ns + 4.0 * self.cnot_ns + self.meas_ns
    }
}

impl Default for GateTimings {
    fn default() -> Self {
        Self::REFERENCE
    }
}

/// `t_L = S·t_Rz + 2C·t_Ent + N·t_Rx`.
pub fn layer_time(timings: &GateTimings, s: usize, c: usize, n: usize) -> f64 {
    s as f64 * timings.rz_ns + 2.0 * c as f64 * timings.entangling_ns() + n as f64 * timings.rx_ns
}

/// `t_QC = (N·t_reset + N·t_init + L·t_L + N·t_meas) / P`.
pub fn circuit_time(timings: &GateTimings, s: usize, c: usize, n: usize, layers: usize, p: usize) -> Result<f64> {
    if p == 0 {
        return Err(Error::domain("parallelism P must be at least 1"));
    }
    let n_f = n as f64;
    let body = n_f * timings.reset_ns
        + n_f * timings.init_ns
        + layers as f64 * layer_time(timings, s, c, n)
        + n_f * timings.meas_ns;
    Ok(body / p as f64)
}

/// Problem shape plus scheduling width for one circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecutionProfile {
    pub n_qubits: usize,
    pub linear_terms: usize,
    pub pair_terms: usize,
    pub layers: usize,
    pub parallelism: usize,
}

impl ExecutionProfile {
    pub fn new(n_qubits: usize, linear_terms: usize, pair_terms: usize, layers: usize, parallelism: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::validation("profile needs at least one qubit"));
        }
        if parallelism == 0 || parallelism > n_qubits {
            return Err(Error::domain(format!("parallelism must lie in [1, {n_qubits}], got {parallelism}")));
        }
        Ok(ExecutionProfile { n_qubits, linear_terms, pair_terms, layers, parallelism })
    }

    /// `S = 0`, `C = N-1`, `L = 1`, `P = N`: the shortest circuit a connected
    /// problem can have, hence the highest readout rate.
    pub fn worst_case(n_qubits: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::domain(format!("worst case needs N >= 2, got {n_qubits}")));
        }
        Self::new(n_qubits, 0, n_qubits - 1, 1, n_qubits)
    }

    pub fn for_instance(inst: &IsingInstance, layers: usize, parallelism: usize) -> Result<Self> {
        Self::new(inst.n_qubits(), inst.linear_count(), inst.pair_count(), layers, parallelism)
    }

    pub fn layer_time_ns(&self, timings: &GateTimings) -> f64 {
        layer_time(timings, self.linear_terms, self.pair_terms, self.n_qubits)
    }

    pub fn circuit_time_ns(&self, timings: &GateTimings) -> f64 {
        // parallelism >= 1 is a constructor invariant
        circuit_time(timings, self.linear_terms, self.pair_terms, self.n_qubits, self.layers, self.parallelism)
            .expect("profile parallelism validated")
    }
}
