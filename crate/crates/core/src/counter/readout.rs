use super::{CounterEntry, EntryId};

/// Result of reading one counter's residual value after the last trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReadoutEvent {
    pub entry: EntryId,
    /// Number of `1`s on the read-out line.
    pub pulse_count: u64,
    pub recovered_value: u64,
}

/// Pulse stream of one entry during collection.
///
/// Each reset pulse routed to the entry increments it and passes through to
/// the read-out line; the pulse that overflows the entry is the last one,
/// after which the inhibit cell blocks the line. An entry holding `v` emits
/// `2^b - v` pulses, and a zero entry emits a full `2^b`.
#[derive(Debug)]
pub struct ReadoutPulses<'a> {
    entry: &'a mut CounterEntry,
    inhibited: bool,
}

impl<'a> ReadoutPulses<'a> {
    pub fn new(entry: &'a mut CounterEntry) -> Self {
        ReadoutPulses { entry, inhibited: false }
    }
}

impl Iterator for ReadoutPulses<'_> {
    type Item = ();

    fn next(&mut self) -> Option<()> {
        if self.inhibited {
            return None;
        }
        if self.entry.increment() {
            self.inhibited = true;
        }
        Some(())
    }
}

/// Shared bit-parallel counter that turns the pulse stream back into a
/// number. One extra bit over the entry width holds the `2^b` of a zero entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct T1Counter {
    width: u32,
    value: u64,
}

impl T1Counter {
    pub fn for_entry_width(b: u32) -> Self {
        T1Counter { width: b + 1, value: 0 }
    }

    pub fn pulse(&mut self) {
        self.value = (self.value + 1) & ((1u64 << self.width) - 1);
    }

    pub fn read(&self) -> u64 {
        self.value
    }

    pub fn reset(&mut self) {
        self.value = 0;
    }
}

/// Reads an entry's residual. The entry ends cleared (it has overflowed
/// back to zero).
pub fn readout_entry(id: EntryId, entry: &mut CounterEntry) -> ReadoutEvent {
    let modulus = entry.modulus();
    let pulse_count = modulus - entry.value();
    entry.clear();
    ReadoutEvent { entry: id, pulse_count, recovered_value: modulus - pulse_count }
}

/// Pulse-by-pulse variant of [`readout_entry`], clocking the entry until the
/// inhibit cell closes and counting pulses in a [`T1Counter`]. Costs `O(2^b)`.
pub fn readout_entry_cycle(id: EntryId, entry: &mut CounterEntry, t1: &mut T1Counter) -> ReadoutEvent {
    let modulus = entry.modulus();
    t1.reset();
    for () in ReadoutPulses::new(entry) {
        t1.pulse();
    }
    let pulse_count = t1.read();
    ReadoutEvent { entry: id, pulse_count, recovered_value: modulus - pulse_count }
}
