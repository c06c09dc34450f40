use cryoqaoa::bandwidth::{bw_inst, overhead_factor, reduction_ratio};
use cryoqaoa::counter::{run_baseline, CollectionWindow, CounterSimulation};
use cryoqaoa::ising::{BitString, IsingInstance};
use cryoqaoa::qaoa::{BernoulliModel, QaoaEngine, QaoaParams};
use cryoqaoa::timing::ExecutionProfile;
use cryoqaoa::Exact;

use crate::config::{SampleSource, ScenarioConfig};
use crate::error::{CliError, CliResult};
use crate::output::CsvSink;

/// Headline numbers of one end-to-end run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub label: String,
    pub n_qubits: usize,
    pub active_counters: usize,
    pub trials: u64,
    pub counter_bits: u32,
    pub baseline_energy: f64,
    pub counter_energy: f64,
    pub baseline_exact: Option<Exact>,
    pub counter_exact: Option<Exact>,
    pub baseline_bits: u64,
    pub counter_bits_total: u64,
    pub t_qc_ns: f64,
    pub bw_inst_bps: f64,
    pub bw_baseline_bps: f64,
    pub bw_peak_bps: f64,
    pub bw_average_bps: f64,
    pub model_reduction: f64,
    pub overhead_factor: f64,
}

impl RunSummary {
    pub fn energies_match(&self) -> bool {
        match (self.baseline_exact, self.counter_exact) {
            (Some(a), Some(b)) => a == b,
            _ => self.baseline_energy == self.counter_energy,
        }
    }

    pub fn render(&self) -> String {
        let exact = |e: Option<Exact>| e.map_or_else(String::new, |e| format!(" ({e})"));
        format!(
            "instance {} (N={}, M={}), T={}, b={}\n\
             baseline energy  {}{}\n\
             counter energy   {}{}\n\
             energies match   {}\n\
             link bits        baseline {} / counters {} (MSB stream {:.4} of baseline, model {:.4})\n\
             t_QC             {} ns\n\
             bandwidth        instructions {:.4e} bps, baseline {:.4e} bps, counters peak {:.4e} bps, average {:.4e} bps\n\
             overhead factor  {}",
            self.label,
            self.n_qubits,
            self.active_counters,
            self.trials,
            self.counter_bits,
            self.baseline_energy,
            exact(self.baseline_exact),
            self.counter_energy,
            exact(self.counter_exact),
            if self.energies_match() { "yes" } else { "NO" },
            self.baseline_bits,
            self.counter_bits_total,
            (self.counter_bits_total as f64 - f64::from(self.counter_bits) * self.active_counters as f64)
                / self.baseline_bits as f64,
            self.model_reduction,
            self.t_qc_ns,
            self.bw_inst_bps,
            self.bw_baseline_bps,
            self.bw_peak_bps,
            self.bw_average_bps,
            self.overhead_factor,
        )
    }
}

fn sample_trials(cfg: &ScenarioConfig, inst: &IsingInstance) -> CliResult<Vec<BitString>> {
    let t = usize::try_from(cfg.trials).map_err(|_| CliError::Usage(format!("too many trials: {}", cfg.trials)))?;
    Ok(match cfg.source {
        SampleSource::Qaoa => {
            let engine = QaoaEngine::with_limit(cfg.max_qubits);
            let mut params = QaoaParams::new(cfg.gammas.clone(), cfg.betas.clone(), cfg.param_bits)?;
            if cfg.optimize_steps > 0 {
                let found = engine.optimize(inst, &params, 256, cfg.optimize_steps, cfg.seed)?;
                log::info!("optimized angles: gammas {:?}, betas {:?}", found.params.gammas(), found.params.betas());
                params = found.params;
            }
            engine.prepare_state(inst, &params)?.sample(t, cfg.seed)
        }
        SampleSource::Bernoulli { p } => BernoulliModel::uniform(inst.n_qubits(), p, cfg.seed)?.draw(t),
    })
}

/// Samples, runs both readout paths, and writes the link trace.
pub fn cmd_run(cfg: &ScenarioConfig, quiet: bool) -> CliResult<RunSummary> {
    cfg.validate()?;
    let inst = cfg.load_instance()?;
    let n = inst.n_qubits();
    let parallelism = cfg.parallelism.unwrap_or(n);
    let profile = ExecutionProfile::for_instance(&inst, cfg.layers, parallelism)?;
    let t_qc = profile.circuit_time_ns(&cfg.timings);
    let b = cfg.counter_bits();
    let trials = sample_trials(cfg, &inst)?;

    let baseline = run_baseline(&inst, &trials)?;
    let mut sim = CounterSimulation::for_instance(&inst, b)?.with_trace();
    for z in &trials {
        sim.step(z)?;
    }
    let window = CollectionWindow::smoothed(b, t_qc);
    let proposed = sim.finish(&inst, window)?;

    let mut sink = CsvSink::create(cfg.out.as_deref(), &cfg.describe(), &["trial", "bits_sent", "entry_id", "event"])?;
    for ev in &proposed.trace {
        sink.row([ev.trial.to_string(), ev.bits_sent.to_string(), ev.entry.to_string(), ev.kind.to_string()])?;
    }
    sink.finish()?;

    let m = proposed.active_counters;
    let t = trials.len() as f64;
    let summary = RunSummary {
        label: if inst.label().is_empty() { "unnamed".into() } else { inst.label().to_string() },
        n_qubits: n,
        active_counters: m,
        trials: proposed.trials,
        counter_bits: b,
        baseline_energy: baseline.energy,
        counter_energy: proposed.energy.unwrap_or(f64::NAN),
        baseline_exact: baseline.exact,
        counter_exact: proposed.exact,
        baseline_bits: baseline.total_bits(),
        counter_bits_total: proposed.total_bits(),
        t_qc_ns: t_qc,
        bw_inst_bps: bw_inst(&cfg.timings, &profile, cfg.param_bits)?,
        bw_baseline_bps: n as f64 * 1e9 / t_qc,
        bw_peak_bps: f64::from(proposed.peak_bits_per_trial()) * 1e9 / t_qc,
        bw_average_bps: proposed.total_bits() as f64 * 1e9 / (t * t_qc + window.collection_ns),
        model_reduction: reduction_ratio(m, b, n),
        overhead_factor: overhead_factor(proposed.trials, b),
    };
    if !quiet {
        eprintln!("{}", summary.render());
    }
    if trials.is_empty() {
        return Ok(summary);
    }
    if !summary.energies_match() {
        return Err(CliError::Invariant(format!(
            "counter energy {} differs from baseline {}",
            summary.counter_energy, summary.baseline_energy
        )));
    }
    Ok(summary)
}
