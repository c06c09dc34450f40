mod common;

use cryoqaoa::counter::{readout_entry, readout_entry_cycle, CollectionWindow, CounterEntry, CounterSimulation, EntryId, T1Counter};
use cryoqaoa::ising::{BitString, IsingInstance};
use cryoqaoa::Exact;
use proptest::prelude::*;

const T_QC: f64 = 750.0;

/// Runs the split counters while checking every intermediate reconstruction
/// against a running direct tally.
fn run_checked(inst: &IsingInstance, b: u32, trials: &[BitString]) -> Result<(), TestCaseError> {
    let mut sim = CounterSimulation::for_instance(inst, b).unwrap();
    for (t, z) in trials.iter().enumerate() {
        sim.step(z).unwrap();
        let want = common::direct_tallies(inst, &trials[..=t]);
        for (&id, &count) in &want {
            prop_assert_eq!(sim.reconstruct(id), count, "entry {} after trial {}", id, t);
        }
    }
    let run = sim.finish(inst, CollectionWindow::smoothed(b, T_QC)).unwrap();
    prop_assert_eq!(&run.totals, &common::direct_tallies(inst, trials));
    if !trials.is_empty() {
        let want = Exact::new(common::direct_cost_sum(inst, trials), trials.len() as i128);
        prop_assert_eq!(run.exact, Some(want));
        prop_assert_eq!(run.energy, Some(inst.sampled_energy(trials).unwrap()));
    }
    prop_assert_eq!(run.lost_counts, 0);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn split_counters_match_direct_tallies(n in 1usize..8, seed: u64, t in 0usize..120, b in 2u32..7) {
        let mut rng = common::rng(seed);
        let inst = common::random_instance(&mut rng, n, 0.6, 5);
        let trials = common::random_trials(&mut rng, n, t);
        run_checked(&inst, b, &trials)?;
    }

    #[test]
    fn flush_load_is_smooth(n in 2usize..10, seed: u64, t in 1usize..200, b in 2u32..7) {
        let mut rng = common::rng(seed);
        let inst = common::random_instance(&mut rng, n, 0.7, 5);
        let trials = common::random_trials(&mut rng, n, t);
        let run = CounterSimulation::run(&inst, b, &trials, CollectionWindow::smoothed(b, T_QC)).unwrap();
        let m = run.active_counters;
        let w = 1usize << (b - 1);
        prop_assert!(run.peak_bits_per_trial() as usize <= m.div_ceil(w));
        for window in run.bits_per_trial.windows(w) {
            prop_assert_eq!(window.iter().sum::<u32>() as usize, m);
        }
    }

    #[test]
    fn readout_round_trip(b in 2u32..=20, seed: u64) {
        let mut rng = common::rng(seed);
        let v = rand::Rng::random_range(&mut rng, 0..1u64 << b);
        let mut entry = CounterEntry::with_value(b, v).unwrap();
        let ev = readout_entry(EntryId::Single(0), &mut entry);
        prop_assert_eq!(ev.recovered_value, v);
        prop_assert_eq!(ev.pulse_count, (1u64 << b) - v);
        prop_assert_eq!(entry.value(), 0);
    }
}

#[test]
fn six_qubit_random_instance_every_trial() {
    let mut rng = common::rng(6);
    for b in 2..=6 {
        let inst = common::random_instance(&mut rng, 6, 0.8, 5);
        let trials = common::random_trials(&mut rng, 6, 300);
        run_checked(&inst, b, &trials).unwrap();
    }
}

#[test]
fn five_qubit_path_synthetic_trials() {
    let inst = IsingInstance::worst_case(5).unwrap();
    let trials: Vec<BitString> = (0..200u64).map(|t| BitString::from_index(((t * 7 + t / 3) % 32) as usize, 5)).collect();
    for b in 2..=8 {
        run_checked(&inst, b, &trials).unwrap();
    }
}

#[test]
fn cycle_model_agrees_with_fast_readout() {
    for b in 2..=12 {
        let mut t1 = T1Counter::for_entry_width(b);
        for v in 0..1u64 << b {
            let mut slow = CounterEntry::with_value(b, v).unwrap();
            let mut fast = slow;
            let a = readout_entry_cycle(EntryId::Single(0), &mut slow, &mut t1);
            let f = readout_entry(EntryId::Single(0), &mut fast);
            assert_eq!(a, f);
            assert_eq!(slow.value(), 0);
        }
    }
}
