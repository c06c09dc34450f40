use std::collections::BTreeMap;
use std::fmt;

use super::bank::{CounterBank, FlushReport, RoomTempAccumulator};
use super::readout::{readout_entry, ReadoutEvent};
use super::EntryId;
use crate::bandwidth::min_collection_time_ns;
use crate::ising::{BitString, IsingInstance};
use crate::{Error, Exact, Result};

/// Residual collection phase timing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectionWindow {
    /// `t_C`, time allotted to read all residuals.
    pub collection_ns: f64,
    /// Circuit time, used to check `t_C` against the smoothing bound.
    pub t_qc_ns: f64,
}

impl CollectionWindow {
    /// `t_C = b·2^(b-1)·t_QC`, the shortest window that keeps residual
    /// readout at the MSB streaming rate.
    pub fn smoothed(b: u32, t_qc_ns: f64) -> Self {
        CollectionWindow { collection_ns: min_collection_time_ns(b, t_qc_ns), t_qc_ns }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Collection {
    /// Full tallies: warm-side upper bits plus recovered residuals.
    pub totals: BTreeMap<EntryId, u64>,
    pub events: Vec<ReadoutEvent>,
    /// `b·M / t_C`.
    pub bw_used_bps: f64,
    /// `t_C` is shorter than the smoothing bound, so collection outpaces
    /// MSB streaming.
    pub smoothing_violated: bool,
}

/// Reads every active entry in turn through the shared readout counter and
/// joins the residuals with the warm-side upper bits.
pub fn collect_non_msbs(bank: &mut CounterBank, acc: &RoomTempAccumulator, window: CollectionWindow) -> Result<Collection> {
    if window.collection_ns.is_nan() || window.collection_ns <= 0.0 {
        return Err(Error::domain(format!("collection window must be positive, got {} ns", window.collection_ns)));
    }
    let ids: Vec<EntryId> = bank.active_ids().collect();
    let b = bank.width();
    let mut totals = BTreeMap::new();
    let mut events = Vec::with_capacity(ids.len());
    for id in ids {
        let event = readout_entry(id, bank.entry_mut(id));
        totals.insert(id, acc.upper_count(id) * acc.unit() + event.recovered_value);
        events.push(event);
    }
    let m = events.len();
    let smoothing_violated = m > 0 && window.collection_ns < min_collection_time_ns(b, window.t_qc_ns);
    if smoothing_violated {
        log::warn!(
            "collection window {} ns is below the smoothing bound; residual readout exceeds the MSB rate",
            window.collection_ns
        );
    }
    Ok(Collection {
        totals,
        events,
        bw_used_bps: f64::from(b) * m as f64 * 1e9 / window.collection_ns,
        smoothing_violated,
    })
}

fn tally_for(totals: &BTreeMap<EntryId, u64>, id: EntryId) -> Result<u64> {
    totals.get(&id).copied().ok_or_else(|| Error::Integrity(format!("no counter total for nonzero term {id}")))
}

/// `(Σ s_i C_i + Σ c_ij C_ij) / T` from counter totals.
pub fn counter_energy_estimate(inst: &IsingInstance, totals: &BTreeMap<EntryId, u64>, trials: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::domain("energy estimate needs at least one trial"));
    }
    let mut sum = 0.0;
    for (i, c) in inst.linear_terms().filter(|(_, c)| !c.is_zero()) {
        sum += c.as_f64() * tally_for(totals, EntryId::Single(i))? as f64;
    }
    for (p, c) in inst.pair_terms().filter(|(_, c)| !c.is_zero()) {
        sum += c.as_f64() * tally_for(totals, EntryId::Pair(p.lo(), p.hi()))? as f64;
    }
    Ok(sum / trials as f64)
}

/// Exact form of [`counter_energy_estimate`]; `None` for real coefficients.
pub fn counter_energy_estimate_exact(
    inst: &IsingInstance,
    totals: &BTreeMap<EntryId, u64>,
    trials: u64,
) -> Result<Option<Exact>> {
    if trials == 0 {
        return Err(Error::domain("energy estimate needs at least one trial"));
    }
    let terms = inst
        .linear_terms()
        .map(|(i, c)| (EntryId::Single(i), c))
        .chain(inst.pair_terms().map(|(p, c)| (EntryId::Pair(p.lo(), p.hi()), c)));
    let mut sum = 0i128;
    for (id, c) in terms {
        let Some(v) = c.as_integer() else { return Ok(None) };
        if v != 0 {
            sum += i128::from(v) * i128::from(tally_for(totals, id)?);
        }
    }
    Ok(Some(Exact::new(sum, i128::from(trials))))
}

/// Baseline readout: every trial ships all `N` bits and the warm side
/// evaluates the cost directly.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRun {
    pub energy: f64,
    pub exact: Option<Exact>,
    pub bits_per_trial: Vec<u32>,
}

impl BaselineRun {
    pub fn total_bits(&self) -> u64 {
        self.bits_per_trial.iter().map(|&b| u64::from(b)).sum()
    }
}

pub fn run_baseline(inst: &IsingInstance, trials: &[BitString]) -> Result<BaselineRun> {
    Ok(BaselineRun {
        energy: inst.sampled_energy(trials)?,
        exact: inst.sampled_energy_exact(trials)?,
        bits_per_trial: vec![inst.n_qubits() as u32; trials.len()],
    })
}

/// Reference tally kept by summing every trial directly.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DirectTally {
    counts: BTreeMap<EntryId, u64>,
}

impl DirectTally {
    pub fn new(ids: impl IntoIterator<Item = EntryId>) -> Self {
        DirectTally { counts: ids.into_iter().map(|id| (id, 0)).collect() }
    }

    pub fn record(&mut self, z: &BitString) {
        for (id, count) in self.counts.iter_mut() {
            *count += u64::from(id.bit(z));
        }
    }

    pub fn get(&self, id: EntryId) -> u64 {
        self.counts.get(&id).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<EntryId, u64> {
        &self.counts
    }
}

/// Injected hardware faults for exercising the audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// The first set MSB is cleared on the cold side but never arrives warm.
    DropMsb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    Msb(bool),
    Readout { pulses: u64, value: u64 },
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceKind::Msb(bit) => write!(f, "msb={}", u8::from(*bit)),
            TraceKind::Readout { pulses, value } => write!(f, "readout pulses={pulses} value={value}"),
        }
    }
}

/// One row of the link audit trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    /// Trial index; the collection phase uses `T`.
    pub trial: u64,
    /// Bits on the link for this trial (or for this readout).
    pub bits_sent: u32,
    pub entry: EntryId,
    pub kind: TraceKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProposedRun {
    pub trials: u64,
    pub counter_bits: u32,
    pub active_counters: usize,
    pub totals: BTreeMap<EntryId, u64>,
    /// `None` when no trial ran.
    pub energy: Option<f64>,
    pub exact: Option<Exact>,
    /// MSB bits shipped after each trial.
    pub bits_per_trial: Vec<u32>,
    pub collection: Collection,
    pub trace: Vec<TraceEvent>,
    pub lost_counts: u64,
}

impl ProposedRun {
    pub fn peak_bits_per_trial(&self) -> u32 {
        self.bits_per_trial.iter().copied().max().unwrap_or(0)
    }

    pub fn msb_bits_total(&self) -> u64 {
        self.bits_per_trial.iter().map(|&b| u64::from(b)).sum()
    }

    /// MSB bits plus the `b·M` residual bits.
    pub fn total_bits(&self) -> u64 {
        self.msb_bits_total() + u64::from(self.counter_bits) * self.active_counters as u64
    }
}

/// Drives a bank and its warm-side accumulator through a sequence of trials.
#[derive(Debug, Clone)]
pub struct CounterSimulation {
    bank: CounterBank,
    acc: RoomTempAccumulator,
    fault: Option<Fault>,
    fault_fired: bool,
    trace: Option<Vec<TraceEvent>>,
}

impl CounterSimulation {
    pub fn new(bank: CounterBank) -> Self {
        let acc = RoomTempAccumulator::new(&bank);
        CounterSimulation { bank, acc, fault: None, fault_fired: false, trace: None }
    }

    pub fn for_instance(inst: &IsingInstance, b: u32) -> Result<Self> {
        Ok(Self::new(CounterBank::for_instance(inst, b)?))
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = Some(fault);
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn bank(&self) -> &CounterBank {
        &self.bank
    }

    pub fn accumulator(&self) -> &RoomTempAccumulator {
        &self.acc
    }

    /// Current split-counter value of `id`.
    pub fn reconstruct(&self, id: EntryId) -> u64 {
        self.acc.reconstruct(id, &self.bank)
    }

    /// Records one trial and performs its scheduled MSB flush.
    pub fn step(&mut self, z: &BitString) -> Result<FlushReport> {
        self.bank.record_trial(z)?;
        let report = self.bank.drain_msbs();
        let delivered = match self.fault {
            Some(Fault::DropMsb) if !self.fault_fired => {
                let mut lost = report.clone();
                if let Some(slot) = lost.sent.iter_mut().find(|(_, set)| *set) {
                    slot.1 = false;
                    self.fault_fired = true;
                }
                lost
            }
            _ => report.clone(),
        };
        self.acc.receive(&delivered);
        if let Some(trace) = self.trace.as_mut() {
            let bits = report.sent.len() as u32;
            trace.extend(report.sent.iter().map(|&(entry, set)| TraceEvent {
                trial: report.trial,
                bits_sent: bits,
                entry,
                kind: TraceKind::Msb(set),
            }));
        }
        Ok(report)
    }

    pub fn finish(mut self, inst: &IsingInstance, window: CollectionWindow) -> Result<ProposedRun> {
        let trials = self.bank.trial_index();
        let collection = collect_non_msbs(&mut self.bank, &self.acc, window)?;
        let b = self.bank.width();
        let tracing = self.trace.is_some();
        let mut trace = self.trace.take().unwrap_or_default();
        if tracing {
            trace.extend(collection.events.iter().map(|ev| TraceEvent {
                trial: trials,
                bits_sent: b,
                entry: ev.entry,
                kind: TraceKind::Readout { pulses: ev.pulse_count, value: ev.recovered_value },
            }));
        }
        let (energy, exact) = if trials == 0 {
            (None, None)
        } else {
            (
                Some(counter_energy_estimate(inst, &collection.totals, trials)?),
                counter_energy_estimate_exact(inst, &collection.totals, trials)?,
            )
        };
        Ok(ProposedRun {
            trials,
            counter_bits: b,
            active_counters: self.bank.active_count(),
            totals: collection.totals.clone(),
            energy,
            exact,
            bits_per_trial: self.acc.received_bits_log().to_vec(),
            collection,
            trace,
            lost_counts: self.bank.lost_counts(),
        })
    }

    /// Whole proposed pipeline over a trial sequence.
    pub fn run(inst: &IsingInstance, b: u32, trials: &[BitString], window: CollectionWindow) -> Result<ProposedRun> {
        let mut sim = Self::for_instance(inst, b)?;
        for z in trials {
            sim.step(z)?;
        }
        sim.finish(inst, window)
    }
}
