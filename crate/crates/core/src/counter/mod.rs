//! Behavioral model of the 4-K counter bank.
//!
//! Each in-use counter tallies one cost term across trials: `C_i` counts the
//! trials with `z_i = 1`, `C_ij` the trials with `z_i != z_j`. Counters are
//! only `b` bits wide. Every `2^(b-1)` trials each counter's MSB is
//! destructively read and shipped to the room-temperature side, which books
//! it as `2^(b-1)` counts. After the last trial the residual `b` bits of
//! every counter are read out one entry at a time through a shared
//! bit-parallel counter. Warm-side upper bits and cold-side residuals
//! together reconstruct the full tally, so the sampled energy comes out
//! exactly as if every bitstring had been shipped.
//!
//! Cells (T/D flip-flops, inhibit gates, clock trees) are modeled by their
//! arithmetic contract only.

mod bank;
mod readout;
mod sim;

use std::fmt;

use crate::{Error, Result};

pub use bank::{CounterBank, FlushReport, RoomTempAccumulator};
pub use readout::{readout_entry, readout_entry_cycle, ReadoutEvent, ReadoutPulses, T1Counter};
pub use sim::{
    collect_non_msbs, counter_energy_estimate, counter_energy_estimate_exact, run_baseline, BaselineRun, Collection,
    CollectionWindow, CounterSimulation, DirectTally, Fault, ProposedRun, TraceEvent, TraceKind,
};

/// Widest counter entry the model supports.
pub const MAX_WIDTH: u32 = 32;

/// Which cost term a counter tallies. Ordering matches the provisioned
/// layout: all single-qubit counters, then pairs in lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntryId {
    Single(usize),
    Pair(usize, usize),
}

impl EntryId {
    pub fn pair(i: usize, j: usize) -> Self {
        EntryId::Pair(i.min(j), i.max(j))
    }

    /// Increment contributed by one measured bitstring.
    pub fn bit(self, z: &crate::ising::BitString) -> bool {
        match self {
            EntryId::Single(i) => z.get(i),
            EntryId::Pair(i, j) => z.get(i) != z.get(j),
        }
    }

    /// Position among the `N(N+1)/2` provisioned counters.
    pub fn provisioned_index(self, n: usize) -> usize {
        match self {
            EntryId::Single(i) => i,
            // pairs (i, *) for i' < i precede row i
            EntryId::Pair(i, j) => n + i * (2 * n - i - 1) / 2 + (j - i - 1),
        }
    }

    pub fn is_valid(self, n: usize) -> bool {
        match self {
            EntryId::Single(i) => i < n,
            EntryId::Pair(i, j) => i < j && j < n,
        }
    }

    /// Every provisioned counter of an `n`-qubit bank in layout order.
    pub fn provisioned(n: usize) -> impl Iterator<Item = EntryId> {
        (0..n).map(EntryId::Single).chain((0..n).flat_map(move |i| (i + 1..n).map(move |j| EntryId::Pair(i, j))))
    }
}

impl fmt::Display for EntryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryId::Single(i) => write!(f, "C{i}"),
            EntryId::Pair(i, j) => write!(f, "C{i}_{j}"),
        }
    }
}

/// Number of counters a bank for `n` qubits provisions.
pub fn provisioned_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// A `b`-bit counter; arithmetic wraps modulo `2^b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterEntry {
    width: u32,
    value: u64,
}

impl CounterEntry {
    pub fn new(width: u32) -> Result<Self> {
        Self::with_value(width, 0)
    }

    pub fn with_value(width: u32, value: u64) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::domain(format!("counter width must lie in [1, {MAX_WIDTH}], got {width}")));
        }
        if value >= 1u64 << width {
            return Err(Error::domain(format!("value {value} does not fit in {width} bits")));
        }
        Ok(CounterEntry { width, value })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// `2^b`.
    pub fn modulus(&self) -> u64 {
        1u64 << self.width
    }

    fn msb_weight(&self) -> u64 {
        1u64 << (self.width - 1)
    }

    /// Adds one; returns the carry out (the count is lost on the cold side).
    pub fn increment(&mut self) -> bool {
        self.value += 1;
        if self.value == self.modulus() {
            self.value = 0;
            true
        } else {
            false
        }
    }

    pub fn msb(&self) -> bool {
        self.value & self.msb_weight() != 0
    }

    /// Destructive MSB read.
    pub fn take_msb(&mut self) -> bool {
        let set = self.msb();
        self.value &= !self.msb_weight();
        set
    }

    pub(crate) fn clear(&mut self) {
        self.value = 0;
    }
}
