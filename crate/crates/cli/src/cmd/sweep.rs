use cryoqaoa::bandwidth::{staircase_sweep, SweepReference, StaircaseRow};
use cryoqaoa::power::{system_comparison, CableSpec, Comparison, SfqPowerSpec};

use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};
use crate::output::CsvSink;

pub fn cmd_fig5a(cfg: &ScenarioConfig) -> CliResult<Vec<StaircaseRow>> {
    let grid = &cfg.fig5a;
    if grid.t_list.is_empty() || grid.r_grid.is_empty() {
        return Err(CliError::Usage("fig5a needs at least one trial count and one overhead budget".into()));
    }
    if let Some(t) = grid.t_list.iter().find(|&&t| t == 0) {
        return Err(CliError::Usage(format!("trial counts must be positive, got {t}")));
    }
    if let Some(r) = grid.r_grid.iter().find(|&&r| r.is_nan() || r <= 0.0) {
        return Err(CliError::Usage(format!("overhead budgets must be positive, got {r}")));
    }
    let reference = SweepReference { n_qubits: 1000, t_qc_ns: cfg.timings.per_qubit_circuit_time_ns() };
    let rows = staircase_sweep(&grid.t_list, &grid.r_grid, reference)?;
    let mut sink = CsvSink::create(
        cfg.out.as_deref(),
        &cfg.describe(),
        &["T", "r", "b", "reduction_ratio", "overhead_factor", "bw_meas_bps", "bw_proposed_bps"],
    )?;
    for row in &rows {
        sink.row([
            row.trials.to_string(),
            row.r.to_string(),
            row.b.to_string(),
            (1.0 - row.reduction_ratio).to_string(),
            row.overhead_factor.to_string(),
            row.bw_meas_bps.to_string(),
            row.bw_proposed_bps.to_string(),
        ])?;
        if row.clamped {
            log::warn!("T={} r={}: no width fits the budget, b clamped to 1", row.trials, row.r);
        }
    }
    sink.finish()?;
    Ok(rows)
}

pub fn cmd_fig5b(cfg: &ScenarioConfig, quiet: bool) -> CliResult<Comparison> {
    let s = cfg.fig5b;
    if s.n_min < 2 || s.n_max < s.n_min || s.n_step == 0 {
        return Err(CliError::Usage(format!(
            "fig5b needs 2 <= n_min <= n_max and n_step >= 1, got {}..={} step {}",
            s.n_min, s.n_max, s.n_step
        )));
    }
    let ns: Vec<usize> = (s.n_min..=s.n_max).step_by(s.n_step).collect();
    let cmp = system_comparison(&ns, &cfg.timings, &CableSpec::default(), &SfqPowerSpec::default(), s.policy)?;
    let mut sink = CsvSink::create(
        cfg.out.as_deref(),
        &cfg.describe(),
        &[
            "N",
            "bw_baseline_bps",
            "bw_proposed_bps",
            "cables_baseline",
            "cables_proposed",
            "power_baseline_mw",
            "power_proposed_mw",
        ],
    )?;
    for row in &cmp.rows {
        sink.row([
            row.n_qubits.to_string(),
            row.baseline.bw_required_bps.to_string(),
            row.proposed.bw_required_bps.to_string(),
            row.baseline.n_cables.to_string(),
            row.proposed.n_cables.to_string(),
            row.baseline.total_mw.to_string(),
            row.proposed.total_mw.to_string(),
        ])?;
    }
    sink.finish()?;
    if !quiet {
        match cmp.crossover {
            Some(n) => eprintln!("crossover: proposed total power first below baseline at N = {n}"),
            None => eprintln!("crossover: none in N = {}..={}", s.n_min, s.n_max),
        }
    }
    Ok(cmp)
}
