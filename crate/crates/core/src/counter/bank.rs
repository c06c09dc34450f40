use std::collections::BTreeMap;
use std::ops::Range;

use super::{provisioned_count, CounterEntry, EntryId};
use crate::ising::{BitString, IsingInstance};
use crate::{Error, Result};

/// Cold-side counters of one QAOA run.
///
/// All `N(N+1)/2` entries are provisioned; only the `M` wired to nonzero
/// coefficients count, flush and get read out.
///
/// Flushes follow a fixed round-robin: active entry at position `p` (in
/// entry-id order) belongs to slot `p / k`, `k = ceil(M / 2^(b-1))`, and slot
/// `s` is flushed after the `τ`-th trial (1-based) whenever
/// `τ mod 2^(b-1) = s`. Slot 0 therefore closes every full window. Each entry
/// therefore sees exactly `2^(b-1)` increments between flushes, which keeps
/// it below `2^b`, and any `2^(b-1)` consecutive trials ship exactly `M` bits.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterBank {
    n: usize,
    width: u32,
    ids: Vec<EntryId>,
    entries: Vec<CounterEntry>,
    active: Vec<usize>,
    trial_index: u64,
    flushed_through: Option<u64>,
    lost_counts: u64,
}

impl CounterBank {
    pub fn new(n: usize, width: u32, active: impl IntoIterator<Item = EntryId>) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("a counter bank needs at least one qubit"));
        }
        let blank = CounterEntry::new(width)?;
        let ids: Vec<EntryId> = EntryId::provisioned(n).collect();
        let mut positions = Vec::new();
        for id in active {
            if !id.is_valid(n) {
                return Err(Error::validation(format!("entry {id} does not exist for N={n}")));
            }
            positions.push(id.provisioned_index(n));
        }
        positions.sort_unstable();
        positions.dedup();
        Ok(CounterBank {
            n,
            width,
            entries: vec![blank; ids.len()],
            ids,
            active: positions,
            trial_index: 0,
            flushed_through: None,
            lost_counts: 0,
        })
    }

    /// Wires one counter per nonzero coefficient of the instance.
    pub fn for_instance(inst: &IsingInstance, width: u32) -> Result<Self> {
        let singles = inst.linear_terms().filter(|(_, c)| !c.is_zero()).map(|(i, _)| EntryId::Single(i));
        let pairs = inst.pair_terms().filter(|(_, c)| !c.is_zero()).map(|(p, _)| EntryId::Pair(p.lo(), p.hi()));
        Self::new(inst.n_qubits(), width, singles.chain(pairs))
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn provisioned_count(&self) -> usize {
        debug_assert_eq!(self.entries.len(), provisioned_count(self.n));
        self.entries.len()
    }

    /// `M`.
    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    pub fn active_ids(&self) -> impl Iterator<Item = EntryId> + '_ {
        self.active.iter().map(|&k| self.ids[k])
    }

    pub fn entry(&self, id: EntryId) -> Option<&CounterEntry> {
        id.is_valid(self.n).then(|| &self.entries[id.provisioned_index(self.n)])
    }

    pub(crate) fn entry_mut(&mut self, id: EntryId) -> &mut CounterEntry {
        &mut self.entries[id.provisioned_index(self.n)]
    }

    /// Trials recorded so far.
    pub fn trial_index(&self) -> u64 {
        self.trial_index
    }

    /// Counts lost to wrap-around. Stays zero while the flush schedule is
    /// followed.
    pub fn lost_counts(&self) -> u64 {
        self.lost_counts
    }

    /// `2^(b-1)`.
    pub fn flush_period(&self) -> u64 {
        1u64 << (self.width - 1)
    }

    /// `ceil(M / 2^(b-1))`, the most entries flushed after one trial.
    pub fn slice_len(&self) -> usize {
        let period = self.flush_period();
        (self.active.len() as u64).div_ceil(period) as usize
    }

    /// Active positions flushed after trial `trial` (0-based).
    pub fn scheduled_positions(&self, trial: u64) -> Range<usize> {
        let k = self.slice_len();
        let slot = ((trial + 1) % self.flush_period()) as usize;
        let start = slot.saturating_mul(k).min(self.active.len());
        let end = start.saturating_add(k).min(self.active.len());
        start..end
    }

    pub fn scheduled(&self, trial: u64) -> impl Iterator<Item = EntryId> + '_ {
        self.scheduled_positions(trial).map(|p| self.ids[self.active[p]])
    }

    /// Adds one trial's contribution to every active counter.
    pub fn record_trial(&mut self, z: &BitString) -> Result<()> {
        if z.len() != self.n {
            return Err(Error::Dimension { expected: self.n, actual: z.len() });
        }
        for &k in &self.active {
            if self.ids[k].bit(z) && self.entries[k].increment() {
                self.lost_counts += 1;
            }
        }
        self.trial_index += 1;
        Ok(())
    }

    /// Destructively reads the MSBs scheduled for the most recent trial.
    ///
    /// One bit per scheduled entry leaves the bank whether or not it is set.
    /// A second call for the same trial sends nothing.
    pub fn drain_msbs(&mut self) -> FlushReport {
        let Some(trial) = self.trial_index.checked_sub(1) else {
            return FlushReport { trial: 0, sent: Vec::new() };
        };
        if self.flushed_through == Some(trial) {
            return FlushReport { trial, sent: Vec::new() };
        }
        self.flushed_through = Some(trial);
        let positions = self.scheduled_positions(trial);
        let mut sent = Vec::with_capacity(positions.len());
        for p in positions {
            let k = self.active[p];
            sent.push((self.ids[k], self.entries[k].take_msb()));
        }
        FlushReport { trial, sent }
    }

    /// [`drain_msbs`](Self::drain_msbs) delivered to the warm side.
    pub fn flush_msbs(&mut self, acc: &mut RoomTempAccumulator) -> FlushReport {
        let report = self.drain_msbs();
        acc.receive(&report);
        report
    }
}

/// MSB bits shipped after one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlushReport {
    pub trial: u64,
    pub sent: Vec<(EntryId, bool)>,
}

impl FlushReport {
    pub fn bits_sent(&self) -> usize {
        self.sent.len()
    }
}

/// Warm-side upper bits of the split counters, in units of `2^(b-1)` counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoomTempAccumulator {
    unit: u64,
    upper: BTreeMap<EntryId, u64>,
    received_bits: Vec<u32>,
}

impl RoomTempAccumulator {
    pub fn new(bank: &CounterBank) -> Self {
        RoomTempAccumulator {
            unit: bank.flush_period(),
            upper: bank.active_ids().map(|id| (id, 0)).collect(),
            received_bits: Vec::new(),
        }
    }

    pub fn receive(&mut self, report: &FlushReport) {
        for &(id, set) in &report.sent {
            if set {
                *self.upper.entry(id).or_insert(0) += 1;
            }
        }
        self.log_bits(report.sent.len());
    }

    pub(crate) fn log_bits(&mut self, bits: usize) {
        self.received_bits.push(bits as u32);
    }

    pub fn upper_count(&self, id: EntryId) -> u64 {
        self.upper.get(&id).copied().unwrap_or(0)
    }

    /// Counts represented by one received MSB.
    pub fn unit(&self) -> u64 {
        self.unit
    }

    /// Bits received after each trial so far.
    pub fn received_bits_log(&self) -> &[u32] {
        &self.received_bits
    }

    /// Upper bits joined with the cold-side residual.
    pub fn reconstruct(&self, id: EntryId, bank: &CounterBank) -> u64 {
        self.upper_count(id) * self.unit + bank.entry(id).map_or(0, |e| e.value())
    }
}
