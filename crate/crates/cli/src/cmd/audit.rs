//! Randomized and enumerated checks of the counter invariants.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cryoqaoa::counter::{
    counter_energy_estimate_exact, readout_entry, CollectionWindow, CounterEntry, CounterSimulation, DirectTally, EntryId,
    Fault,
};
use cryoqaoa::ising::{write_instance, BitString, IsingInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{random_instance, ScenarioConfig};
use crate::error::{CliError, CliResult};

const T_QC_NS: f64 = 750.0;
const DEFAULT_T_MAX: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    /// Trial after which the divergence was seen; `None` for end-of-run checks.
    pub trial: Option<u64>,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Case {
    /// Position in the random suite, or the transition count when enumerating.
    pub index: usize,
    pub inst: IsingInstance,
    pub bits: u32,
    pub trials: Vec<BitString>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub cases: usize,
    pub transitions: usize,
    pub readout_values: u64,
}

/// Runs one case through the split counters and compares against a direct
/// tally after every trial, then checks collection, energy and smoothing.
pub fn check_case(inst: &IsingInstance, b: u32, trials: &[BitString], fault: Option<Fault>) -> CliResult<Option<Violation>> {
    let mut sim = CounterSimulation::for_instance(inst, b)?;
    if let Some(f) = fault {
        sim = sim.with_fault(f);
    }
    let ids: Vec<EntryId> = sim.bank().active_ids().collect();
    let mut tally = DirectTally::new(ids.iter().copied());
    for (k, z) in trials.iter().enumerate() {
        sim.step(z)?;
        tally.record(z);
        if let Some(&id) = ids.iter().find(|&&id| sim.reconstruct(id) != tally.get(id)) {
            return Ok(Some(Violation {
                check: "reconstruction",
                trial: Some(k as u64),
                detail: format!("entry {id} reads {} but {} events occurred", sim.reconstruct(id), tally.get(id)),
            }));
        }
    }
    let run = sim.finish(inst, CollectionWindow::smoothed(b, T_QC_NS))?;
    let end = |check, detail| Ok(Some(Violation { check, trial: None, detail }));
    if &run.totals != tally.counts() {
        return end("collection", "collected totals differ from the direct tally".into());
    }
    if !trials.is_empty() && run.exact != inst.sampled_energy_exact(trials)? {
        return end("energy", format!("counter energy {:?} vs sampled {:?}", run.exact, inst.sampled_energy_exact(trials)?));
    }
    let w = 1usize << (b - 1);
    let m = run.active_counters;
    if run.peak_bits_per_trial() as usize > m.div_ceil(w) {
        return end("smoothing", format!("{} bits in one trial, bound {}", run.peak_bits_per_trial(), m.div_ceil(w)));
    }
    if let Some(pos) = run.bits_per_trial.windows(w).position(|win| win.iter().sum::<u32>() as usize != m) {
        return end("smoothing", format!("window starting at trial {pos} does not carry M = {m} bits"));
    }
    Ok(None)
}

/// Every value of a `b`-bit entry survives the pulse readout.
fn readout_round_trip(b: u32) -> Result<u64, Violation> {
    for v in 0..1u64 << b {
        let mut entry = CounterEntry::with_value(b, v).expect("width checked by caller");
        let got = readout_entry(EntryId::Single(0), &mut entry).recovered_value;
        if got != v {
            return Err(Violation { check: "readout", trial: None, detail: format!("b={b}: wrote {v}, read {got}") });
        }
    }
    Ok(1 << b)
}

/// Shortest prefix of the trial sequence that still fails.
fn minimize(case: &Case, fault: Option<Fault>) -> CliResult<(Vec<BitString>, Violation)> {
    for len in 0..=case.trials.len() {
        if let Some(v) = check_case(&case.inst, case.bits, &case.trials[..len], fault)? {
            return Ok((case.trials[..len].to_vec(), v));
        }
    }
    unreachable!("the full sequence fails")
}

fn write_counterexample(path: &Path, case: &Case, trials: &[BitString], v: &Violation, fault: Option<Fault>) -> CliResult<()> {
    let mut text = String::new();
    let _ = writeln!(text, "# audit counterexample (#{})", case.index);
    let _ = writeln!(text, "# check: {}", v.check);
    if let Some(t) = v.trial {
        let _ = writeln!(text, "# divergence after trial: {t}");
    }
    let _ = writeln!(text, "# detail: {}", v.detail);
    let _ = writeln!(text, "# counter bits: {}", case.bits);
    let _ = writeln!(text, "# fault: {}", fault.map_or("none", |_| "drop-msb"));
    text.push_str(&write_instance(&case.inst));
    let _ = writeln!(text, "[trials]");
    for (k, z) in trials.iter().enumerate() {
        let _ = writeln!(text, "{k} = {z}");
    }
    std::fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

fn random_cases(cfg: &ScenarioConfig) -> Vec<Case> {
    let a = &cfg.audit;
    let t_max = a.t_max.unwrap_or(DEFAULT_T_MAX).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..a.cases)
        .map(|index| {
            let n = rng.random_range(1..=a.n_max);
            let t = rng.random_range(1..=t_max);
            let bits = rng.random_range(a.b_min..=a.b_max);
            let inst = random_instance(&mut rng, n, 0.6);
            let trials = (0..t).map(|_| BitString::new((0..n).map(|_| rng.random::<bool>()).collect())).collect();
            Case { index, inst, bits, trials }
        })
        .collect()
}

fn supports(n: usize) -> impl Iterator<Item = Vec<EntryId>> {
    let ids: Vec<EntryId> = EntryId::provisioned(n).collect();
    (0..1u64 << ids.len()).map(move |mask| ids.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &id)| id).collect())
}

fn instance_on(n: usize, support: &[EntryId], coeff: impl Fn(usize) -> i64) -> IsingInstance {
    let mut inst = IsingInstance::new(n).expect("n >= 1");
    for (k, &id) in support.iter().enumerate() {
        let outcome = match id {
            EntryId::Single(i) => inst.set_linear(i, coeff(k)),
            EntryId::Pair(i, j) => inst.set_pair(i, j, coeff(k)),
        };
        outcome.expect("provisioned id");
    }
    inst
}

/// Walks every support on up to `n_max` qubits and every trial sequence up
/// to `t_max`. Prefixes that leave the cold side in the same state at the
/// same depth share their future, so one representative per state is kept;
/// every transition into a state is still checked. Returns the transition
/// count or the first failing case.
fn exhaustive(n_max: usize, t_max: usize, b: u32, fault: Option<Fault>) -> CliResult<Result<usize, (Case, Violation)>> {
    let mut transitions = 0;
    let coeff_sets: [fn(usize) -> i64; 3] = [|_| 5, |_| -5, |k| if k % 2 == 0 { 3 } else { -4 }];
    for n in 1..=n_max {
        let inputs: Vec<BitString> = (0..1usize << n).map(|x| BitString::from_index(x, n)).collect();
        for support in supports(n) {
            let instances: Vec<IsingInstance> = coeff_sets.iter().map(|c| instance_on(n, &support, c)).collect();
            let inst = &instances[0];
            let key = |sim: &CounterSimulation| -> Vec<u64> {
                support.iter().map(|&id| sim.bank().entry(id).map_or(0, CounterEntry::value)).collect()
            };
            let fail = |index, trials, v| (Case { index, inst: inst.clone(), bits: b, trials }, v);
            let mut start = CounterSimulation::for_instance(inst, b)?;
            if let Some(f) = fault {
                start = start.with_fault(f);
            }
            let mut layer = vec![(start, DirectTally::new(support.iter().copied()), Vec::new())];
            for depth in 0..t_max {
                let mut next: HashMap<Vec<u64>, (CounterSimulation, DirectTally, Vec<BitString>)> = HashMap::new();
                for (sim, tally, path) in &layer {
                    for z in &inputs {
                        let (mut sim, mut tally, mut path) = (sim.clone(), tally.clone(), path.clone());
                        sim.step(z)?;
                        tally.record(z);
                        path.push(z.clone());
                        transitions += 1;
                        if let Some(&id) = support.iter().find(|&&id| sim.reconstruct(id) != tally.get(id)) {
                            let detail = format!("entry {id} reads {} but {} events occurred", sim.reconstruct(id), tally.get(id));
                            return Ok(Err(fail(transitions, path, Violation { check: "reconstruction", trial: Some(depth as u64), detail })));
                        }
                        next.entry(key(&sim)).or_insert((sim, tally, path));
                    }
                }
                let mut states: Vec<_> = next.into_iter().collect();
                states.sort_by(|a, b| a.0.cmp(&b.0));
                for (_, (sim, _, path)) in &states {
                    let run = sim.clone().finish(inst, CollectionWindow::smoothed(b, T_QC_NS))?;
                    for candidate in &instances {
                        let est = counter_energy_estimate_exact(candidate, &run.totals, path.len() as u64)?;
                        if est != candidate.sampled_energy_exact(path)? {
                            let detail = format!("energy {est:?} vs sampled {:?}", candidate.sampled_energy_exact(path)?);
                            return Ok(Err(fail(transitions, path.clone(), Violation { check: "energy", trial: None, detail })));
                        }
                    }
                }
                layer = states.into_iter().map(|(_, s)| s).collect();
            }
        }
    }
    Ok(Ok(transitions))
}

/// Audit entry point. On a violation the minimized case is written to
/// `--out` (or `cryoqaoa-counterexample.txt`) and exit status 1 follows.
pub fn cmd_audit(cfg: &ScenarioConfig, quiet: bool) -> CliResult<AuditReport> {
    let a = cfg.audit;
    if a.n_max == 0 || a.b_min < 2 || a.b_max < a.b_min || a.b_max > 16 {
        return Err(CliError::Usage(format!(
            "audit needs n_max >= 1 and 2 <= b_min <= b_max <= 16, got n_max={} b={}..={}",
            a.n_max, a.b_min, a.b_max
        )));
    }
    let mut readout_values = 0;
    for b in a.b_min..=a.b_max {
        readout_values += readout_round_trip(b).map_err(|v| CliError::Invariant(v.detail))?;
    }

    let (cases, transitions, failure) = if a.exhaustive {
        let t_max = a.t_max.unwrap_or(if a.n_max <= 3 { 8 } else { 3 });
        if !quiet {
            eprintln!("enumerating supports on N <= {}, all trial sequences up to T = {t_max}, b = {}", a.n_max, a.b_min);
        }
        match exhaustive(a.n_max, t_max, a.b_min, a.inject)? {
            Ok(transitions) => (0, transitions, None),
            Err(found) => (0, 0, Some(found)),
        }
    } else {
        let cases = random_cases(cfg);
        let outcomes: Vec<Option<Violation>> = cases
            .par_iter()
            .map(|c| check_case(&c.inst, c.bits, &c.trials, a.inject))
            .collect::<CliResult<_>>()?;
        let first = outcomes.into_iter().zip(&cases).find_map(|(v, c)| v.map(|_| c.clone()));
        let failure = match first {
            Some(case) => {
                let (trials, v) = minimize(&case, a.inject)?;
                Some((Case { trials, ..case }, v))
            }
            None => None,
        };
        (cases.len(), 0, failure)
    };

    if let Some((case, v)) = failure {
        let path = cfg.out.clone().unwrap_or_else(|| PathBuf::from("cryoqaoa-counterexample.txt"));
        write_counterexample(&path, &case, &case.trials, &v, a.inject)?;
        let at = v.trial.map_or_else(String::new, |t| format!(" at trial {t}"));
        return Err(CliError::Invariant(format!(
            "{} check failed{at} (#{}, N={}, b={}, {} trials): {}; counterexample written to {}",
            v.check,
            case.index,
            case.inst.n_qubits(),
            case.bits,
            case.trials.len(),
            v.detail,
            path.display()
        )));
    }
    let report = AuditReport { cases, transitions, readout_values };
    if !quiet {
        if a.exhaustive {
            eprintln!("audit passed: {} transitions, {} readout values", report.transitions, report.readout_values);
        } else {
            eprintln!("audit passed: {} random cases, {} readout values", report.cases, report.readout_values);
        }
    }
    Ok(report)
}
