//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cryoqaoa::bandwidth::{asymptotic_reduction_ratio, bw_meas_for, bw_msb, choose_b, reduction_ratio};
use cryoqaoa::counter::{readout_entry, readout_entry_cycle, CollectionWindow, CounterEntry, CounterSimulation, EntryId, T1Counter};
use cryoqaoa::ising::{BitString, IsingInstance};
use cryoqaoa::power::{ceil_log2, system_comparison, BitPolicy, CableSpec, SfqPowerSpec};
use cryoqaoa::qaoa::{cost_diagonal, QaoaEngine, QaoaParams};
use cryoqaoa::timing::{circuit_time, GateTimings, REFERENCE_CIRCUIT_TIME_NS};
use cryoqaoa::Exact;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Check = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

const REF: GateTimings = GateTimings::REFERENCE;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn circuit_time_preset() -> Check {
    let per_qubit = REF.per_qubit_circuit_time_ns();
    ensure(per_qubit == 750.0 && REFERENCE_CIRCUIT_TIME_NS == 750.0, || format!("per-qubit accounting gives {per_qubit} ns"))?;
    let n = 1024;
    let t = circuit_time(&REF, 0, n - 1, n, 1, n).map_err(|e| e.to_string())?;
    let dev = (t - 750.0).abs() / 750.0;
    ensure(dev <= 0.02, || format!("layered form at N=1024 gives {t} ns ({:.3}% off)", dev * 100.0))?;
    Ok(format!("per-qubit 750 ns; layered N=1024 {t:.2} ns ({:+.3}%)", (t - 750.0) / 7.5))
}

fn staircase_points() -> Check {
    let low = choose_b(1_000, 0.05);
    ensure(low.bits == 4 && !low.clamped, || format!("T=1e3 chose b={}", low.bits))?;
    let pct_low = 100.0 * (1.0 - asymptotic_reduction_ratio(low.bits));
    ensure(pct_low == 87.5, || format!("T=1e3 reduction {pct_low}%"))?;
    let high = choose_b(10_000_000, 0.05);
    ensure(high.bits == 15 && !high.clamped, || format!("T=1e7 chose b={}", high.bits))?;
    let pct_high = 100.0 * (1.0 - asymptotic_reduction_ratio(high.bits));
    ensure((pct_high - 99.993).abs() <= 0.002, || format!("T=1e7 reduction {pct_high}%"))?;
    // the M = N form agrees with the limit form
    ensure(reduction_ratio(1000, 15, 1000) == asymptotic_reduction_ratio(15), || "M = N ratio differs".into())?;
    Ok(format!("b=4 -> {pct_low}%, b=15 -> {pct_high:.5}%"))
}

fn power_crossover() -> Check {
    let ns: Vec<usize> = (2..=4096).collect();
    let cmp = system_comparison(&ns, &REF, &CableSpec::default(), &SfqPowerSpec::default(), BitPolicy::LogN)
        .map_err(|e| e.to_string())?;
    let crossover = cmp.crossover.ok_or("no crossover below 4096")?;
    ensure(crossover.abs_diff(751) <= 1, || format!("crossover at N={crossover}"))?;
    Ok(format!("proposed total first below baseline at N={crossover}"))
}

fn constant_bandwidth() -> Check {
    let t_qc = REF.per_qubit_circuit_time_ns();
    let per_circuit = |bps: f64| bps * t_qc / 1e9;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for n in 4..=1_000_000usize {
        let bits = per_circuit(bw_msb(n - 1, ceil_log2(n), t_qc).map_err(|e| e.to_string())?);
        ensure((1.0..=3.0).contains(&bits), || format!("N={n}: {bits} bits per circuit"))?;
        lo = lo.min(bits);
        hi = hi.max(bits);
    }
    for n in [1_000usize, 10_000, 1_000_000] {
        let bits = per_circuit(bw_meas_for(n, t_qc).map_err(|e| e.to_string())?);
        ensure((bits - n as f64).abs() <= 1e-9 * n as f64, || format!("baseline at N={n}: {bits} bits per circuit"))?;
    }
    Ok(format!("proposed in [{lo:.4}, {hi:.4}] bits/t_QC; baseline N bits/t_QC at 1e3, 1e4, 1e6"))
}

fn random_integer_instance(rng: &mut ChaCha8Rng, n: usize) -> IsingInstance {
    let mut inst = IsingInstance::new(n).unwrap();
    for i in 0..n {
        let s: i64 = rng.random_range(-5..=5);
        if s != 0 {
            inst.set_linear(i, s).unwrap();
        }
        for j in i + 1..n {
            let c: i64 = rng.random_range(-5..=5);
            if c != 0 {
                inst.set_pair(i, j, c).unwrap();
            }
        }
    }
    inst
}

fn direct_tallies(inst: &IsingInstance, trials: &[BitString]) -> BTreeMap<EntryId, u64> {
    let mut out = BTreeMap::new();
    for (i, _) in inst.linear_terms().filter(|(_, c)| !c.is_zero()) {
        out.insert(EntryId::Single(i), trials.iter().filter(|z| z.get(i)).count() as u64);
    }
    for (p, _) in inst.pair_terms().filter(|(_, c)| !c.is_zero()) {
        let count = trials.iter().filter(|z| z.get(p.lo()) != z.get(p.hi())).count();
        out.insert(EntryId::Pair(p.lo(), p.hi()), count as u64);
    }
    out
}

/// Mean cost as an exact rational, summed without the library's cost code.
fn direct_mean(inst: &IsingInstance, trials: &[BitString]) -> Exact {
    let mut sum = 0i128;
    for z in trials {
        for (i, c) in inst.linear_terms() {
            if z.get(i) {
                sum += i128::from(c.as_integer().unwrap());
            }
        }
        for (p, c) in inst.pair_terms() {
            if z.get(p.lo()) != z.get(p.hi()) {
                sum += i128::from(c.as_integer().unwrap());
            }
        }
    }
    Exact::new(sum, trials.len() as i128)
}

struct RandomSuite {
    instances: usize,
    exact_matches: usize,
    smooth_runs: usize,
    exactness_failures: Vec<String>,
    smoothing_failures: Vec<String>,
}

fn random_suite() -> &'static RandomSuite {
    static SUITE: std::sync::OnceLock<RandomSuite> = std::sync::OnceLock::new();
    SUITE.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut suite = RandomSuite { instances: 1000, exact_matches: 0, smooth_runs: 0, exactness_failures: Vec::new(), smoothing_failures: Vec::new() };
        for case in 0..suite.instances {
            let n = rng.random_range(1..=12);
            let t = rng.random_range(1..=500);
            let b = rng.random_range(2..=8);
            let inst = random_integer_instance(&mut rng, n);
            let trials: Vec<BitString> =
                (0..t).map(|_| BitString::new((0..n).map(|_| rng.random::<bool>()).collect())).collect();
            let mut sim = CounterSimulation::for_instance(&inst, b).unwrap();
            let ids: Vec<EntryId> = sim.bank().active_ids().collect();
            let mut running = vec![0u64; ids.len()];
            let mut drift = None;
            for (k, z) in trials.iter().enumerate() {
                sim.step(z).unwrap();
                for (slot, &id) in running.iter_mut().zip(&ids) {
                    *slot += u64::from(id.bit(z));
                    if drift.is_none() && sim.reconstruct(id) != *slot {
                        drift = Some((k, id));
                    }
                }
            }
            let run = sim.finish(&inst, CollectionWindow::smoothed(b, 750.0)).unwrap();
            let want = direct_mean(&inst, &trials);
            let sampled = inst.sampled_energy(&trials).unwrap();
            if let Some((k, id)) = drift {
                suite.exactness_failures.push(format!("case {case}: entry {id} drifted at trial {k}"));
            } else if run.totals != direct_tallies(&inst, &trials) || run.exact != Some(want) || run.energy != Some(sampled) {
                suite.exactness_failures.push(format!("case {case}: N={n} T={t} b={b} energy {:?} vs {want}", run.exact));
            } else {
                suite.exact_matches += 1;
            }
            let m = run.active_counters;
            let w = 1usize << (b - 1);
            let peak_ok = run.peak_bits_per_trial() as usize <= m.div_ceil(w);
            let windows_ok = run.bits_per_trial.windows(w).all(|win| win.iter().sum::<u32>() as usize == m);
            if peak_ok && windows_ok {
                suite.smooth_runs += 1;
            } else {
                suite.smoothing_failures.push(format!("case {case}: smoothing broken (peak {}, M={m}, W={w})", run.peak_bits_per_trial()));
            }
        }
        suite
    })
}

/// Every support pattern on `n` qubits.
fn supports(n: usize) -> Vec<Vec<EntryId>> {
    let ids: Vec<EntryId> = EntryId::provisioned(n).collect();
    (0..1u32 << ids.len())
        .map(|mask| ids.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &id)| id).collect())
        .collect()
}

fn instance_with(n: usize, support: &[EntryId], coeff: impl Fn(usize) -> i64) -> IsingInstance {
    let mut inst = IsingInstance::new(n).unwrap();
    for (k, &id) in support.iter().enumerate() {
        match id {
            EntryId::Single(i) => inst.set_linear(i, coeff(k)).unwrap(),
            EntryId::Pair(i, j) => inst.set_pair(i, j, coeff(k)).unwrap(),
        }
    }
    inst
}

/// All trial sequences up to `max_t` for every support on up to 3 qubits.
///
/// Coefficient values only scale tallies, so each support is explored once
/// and the energy identity is checked for a set of coefficient vectors. Two
/// prefixes that leave the cold-side entries in the same state at the same
/// trial index have identical futures, so the search keeps one
/// representative per state; every edge into a state is still stepped and
/// checked.
fn exhaustive_small() -> Result<usize, String> {
    const B: u32 = 2;
    const MAX_T: usize = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked_edges = 0usize;
    for n in 1..=3 {
        let inputs: Vec<BitString> = (0..1usize << n).map(|x| BitString::from_index(x, n)).collect();
        for support in supports(n) {
            let nonzero = [-5i64, -4, -3, -2, -1, 1, 2, 3, 4, 5];
            let coeff_sets: Vec<Vec<i64>> = [vec![5; support.len()], vec![-5; support.len()]]
                .into_iter()
                .chain((0..3).map(|_| (0..support.len()).map(|_| nonzero[rng.random_range(0..nonzero.len())]).collect()))
                .collect();
            let instances: Vec<IsingInstance> = coeff_sets.iter().map(|cs| instance_with(n, &support, |k| cs[k])).collect();
            let key = |sim: &CounterSimulation| -> Vec<u64> { support.iter().map(|&id| sim.bank().entry(id).unwrap().value()).collect() };
            let mut layer: Vec<(CounterSimulation, Vec<BitString>)> =
                vec![(CounterSimulation::for_instance(&instances[0], B).map_err(|e| e.to_string())?, Vec::new())];
            for _depth in 0..MAX_T {
                let mut next: HashMap<Vec<u64>, (CounterSimulation, Vec<BitString>)> = HashMap::new();
                for (sim, path) in &layer {
                    for z in &inputs {
                        let mut child = sim.clone();
                        child.step(z).map_err(|e| e.to_string())?;
                        let mut trials = path.clone();
                        trials.push(z.clone());
                        let tallies = direct_tallies(&instances[0], &trials);
                        for &id in &support {
                            if child.reconstruct(id) != tallies[&id] {
                                return Err(format!("N={n} support {support:?}: {id} wrong after {trials:?}"));
                            }
                        }
                        checked_edges += 1;
                        next.entry(key(&child)).or_insert((child, trials));
                    }
                }
                for (sim, trials) in next.values() {
                    let run = sim.clone().finish(&instances[0], CollectionWindow::smoothed(B, 750.0)).map_err(|e| e.to_string())?;
                    for inst in &instances {
                        let est = cryoqaoa::counter::counter_energy_estimate_exact(inst, &run.totals, trials.len() as u64)
                            .map_err(|e| e.to_string())?;
                        if est != Some(direct_mean(inst, trials)) || est != inst.sampled_energy_exact(trials).unwrap() {
                            return Err(format!("N={n} support {support:?}: energy mismatch after {trials:?}"));
                        }
                    }
                }
                layer = next.into_values().collect();
            }
        }
    }
    Ok(checked_edges)
}

fn exactness() -> Check {
    let suite = random_suite();
    if let Some(f) = suite.exactness_failures.first() {
        return Err(f.clone());
    }
    let edges = exhaustive_small()?;
    Ok(format!("{}/{} random instances exact; {edges} exhaustive transitions checked", suite.exact_matches, suite.instances))
}

fn smoothing() -> Check {
    let suite = random_suite();
    if let Some(f) = suite.smoothing_failures.first() {
        return Err(f.clone());
    }
    Ok(format!("{}/{} runs within ceil(M/W) per trial, M per window", suite.smooth_runs, suite.instances))
}

fn readout_round_trip() -> Check {
    let mut count = 0u64;
    for b in 2..=16 {
        for v in 0..1u64 << b {
            let mut entry = CounterEntry::with_value(b, v).map_err(|e| e.to_string())?;
            let ev = readout_entry(EntryId::Single(0), &mut entry);
            ensure(ev.recovered_value == v && entry.value() == 0, || format!("b={b} v={v}: got {}", ev.recovered_value))?;
            count += 1;
        }
    }
    for b in 2..=10 {
        let mut t1 = T1Counter::for_entry_width(b);
        for v in 0..1u64 << b {
            let mut entry = CounterEntry::with_value(b, v).map_err(|e| e.to_string())?;
            let ev = readout_entry_cycle(EntryId::Single(0), &mut entry, &mut t1);
            ensure(ev.recovered_value == v, || format!("pulse model b={b} v={v}: got {}", ev.recovered_value))?;
        }
    }
    Ok(format!("{count} values recovered for b in [2, 16]"))
}

fn qaoa_sanity() -> Check {
    let engine = QaoaEngine::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=8);
        let l = rng.random_range(1..=3);
        let inst = random_integer_instance(&mut rng, n);
        let gammas = (0..l).map(|_| rng.random_range(-PI..PI)).collect();
        let betas = (0..l).map(|_| rng.random_range(-PI..PI)).collect();
        let state = engine.prepare_state(&inst, &QaoaParams::new(gammas, betas, 16).unwrap()).map_err(|e| e.to_string())?;
        worst = worst.max((state.norm_sqr() - 1.0).abs());
    }
    ensure(worst <= 1e-10, || format!("norm drift {worst:e}"))?;

    let t = 100_000usize;
    let mut worst_margin = f64::INFINITY;
    for n in 1..=4 {
        let inst = random_integer_instance(&mut rng, n);
        let params = QaoaParams::new(vec![rng.random_range(-PI..PI)], vec![rng.random_range(-PI..PI)], 16).unwrap();
        let state = engine.prepare_state(&inst, &params).map_err(|e| e.to_string())?;
        let probs = state.probabilities();
        let mut counts = vec![0u64; 1 << n];
        for z in state.sample(t, rng.random()) {
            counts[z.to_index()] += 1;
        }
        let (mut stat, mut cells, mut pooled_obs, mut pooled_exp) = (0.0, 0usize, 0.0, 0.0);
        for (&c, &p) in counts.iter().zip(&probs) {
            let e = p * t as f64;
            if e < 5.0 {
                pooled_obs += c as f64;
                pooled_exp += e;
            } else {
                stat += (c as f64 - e).powi(2) / e;
                cells += 1;
            }
        }
        if pooled_exp > 0.0 {
            stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
            cells += 1;
        }
        let critical = ChiSquared::new((cells.max(2) - 1) as f64).unwrap().inverse_cdf(1.0 - 1e-3);
        ensure(stat < critical, || format!("N={n}: chi-square {stat:.2} >= {critical:.2}"))?;
        worst_margin = worst_margin.min(critical - stat);
    }

    let edge = IsingInstance::maxcut(2, &[(0, 1)]).unwrap();
    let optimum = (0..4).map(|x| edge.cost(&BitString::from_index(x, 2)).unwrap()).fold(f64::INFINITY, f64::min);
    let out = engine.optimize(&edge, &QaoaParams::single(0.2, 0.2), 64, 120, 42).map_err(|e| e.to_string())?;
    let best = out.best_energy().ok_or("optimizer produced no trace")?;
    ensure(best == optimum, || format!("optimizer best {best}, optimum {optimum}"))?;
    let expected = engine.prepare_state(&edge, &out.params).unwrap().expectation(&cost_diagonal(&edge));
    Ok(format!("norm drift {worst:.1e}; chi-square margin {worst_margin:.2}; 2-node best {best} (<C> = {expected:.4})"))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "circuit time preset", budget: Duration::from_secs(1), run: circuit_time_preset },
        Criterion { id: 2, name: "width staircase points", budget: Duration::from_secs(1), run: staircase_points },
        Criterion { id: 3, name: "power crossover", budget: Duration::from_secs(1), run: power_crossover },
        Criterion { id: 4, name: "constant proposed bandwidth", budget: Duration::from_secs(1), run: constant_bandwidth },
        Criterion { id: 5, name: "counter exactness", budget: Duration::from_secs(30), run: exactness },
        Criterion { id: 6, name: "flush smoothing", budget: Duration::from_secs(30), run: smoothing },
        Criterion { id: 7, name: "readout round trip", budget: Duration::from_secs(5), run: readout_round_trip },
        Criterion { id: 8, name: "qaoa engine sanity", budget: Duration::from_secs(60), run: qaoa_sanity },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}; took {elapsed:.2?}, budget {:?}", c.budget)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS [{}] {}: {detail} ({elapsed:.2?})", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {}: {why} ({elapsed:.2?})", c.id, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
