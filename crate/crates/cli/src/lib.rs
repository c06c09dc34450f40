//! Front end for the `cryoqaoa` binary: scenario loading, end-to-end runs,
//! figure sweeps and the invariant audit.

pub mod args;
pub mod cmd;
pub mod config;
pub mod error;
pub mod output;

use args::{AuditArgs, Cli, Command, Fig5aArgs, Fig5bArgs, RunArgs};
use config::{InstanceSource, SampleSource, ScenarioConfig};
use cryoqaoa::timing::GateTimings;
pub use error::{CliError, CliResult};

fn apply_preset(cfg: &mut ScenarioConfig, name: &str) -> CliResult<()> {
    cfg.timings = GateTimings::preset(name).ok_or_else(|| {
        CliError::Usage(format!("unknown preset `{name}` (available: {})", GateTimings::preset_names().join(", ")))
    })?;
    cfg.preset = name.to_string();
    Ok(())
}

fn apply_run(cfg: &mut ScenarioConfig, a: &RunArgs) -> CliResult<()> {
    if let Some(p) = &a.instance {
        cfg.instance = InstanceSource::File(p.clone());
    }
    if a.generator.is_some() || a.n.is_some() || a.density.is_some() {
        let (kind, n, density) = match &cfg.instance {
            InstanceSource::Generator { kind, n, density } => (*kind, *n, *density),
            InstanceSource::File(_) if a.generator.is_none() => {
                return Err(CliError::Usage("--n and --density need a generator".into()));
            }
            InstanceSource::File(_) => (config::GeneratorKind::Ring, 8, 0.5),
        };
        cfg.instance = InstanceSource::Generator {
            kind: a.generator.unwrap_or(kind),
            n: a.n.unwrap_or(n),
            density: a.density.unwrap_or(density),
        };
    }
    if let Some(name) = &a.preset {
        apply_preset(cfg, name)?;
    }
    macro_rules! set {
        ($($field:ident),*) => { $( if let Some(v) = a.$field.clone() { cfg.$field = v; } )* };
    }
    set!(trials, layers, param_bits, bits, r, gammas, betas, optimize_steps, max_qubits);
    if a.parallelism.is_some() {
        cfg.parallelism = a.parallelism;
    }
    match (a.source.as_deref(), a.p) {
        (Some("qaoa"), None) => cfg.source = SampleSource::Qaoa,
        (Some("qaoa"), Some(_)) => return Err(CliError::Usage("--p applies to the bernoulli source".into())),
        (Some("bernoulli"), p) => cfg.source = SampleSource::Bernoulli { p: p.unwrap_or(0.5) },
        (Some(other), _) => return Err(CliError::Usage(format!("unknown source `{other}` (qaoa, bernoulli)"))),
        (None, Some(p)) => cfg.source = SampleSource::Bernoulli { p },
        (None, None) => {}
    }
    Ok(())
}

fn apply_fig5a(cfg: &mut ScenarioConfig, a: &Fig5aArgs) {
    if let Some(t) = &a.t_list {
        cfg.fig5a.t_list = t.clone();
    }
    if let Some(r) = &a.r_grid {
        cfg.fig5a.r_grid = r.clone();
    }
}

fn apply_fig5b(cfg: &mut ScenarioConfig, a: &Fig5bArgs) -> CliResult<()> {
    let s = &mut cfg.fig5b;
    s.n_min = a.n_min.unwrap_or(s.n_min);
    s.n_max = a.n_max.unwrap_or(s.n_max);
    s.n_step = a.n_step.unwrap_or(s.n_step);
    s.policy = a.bits.unwrap_or(s.policy);
    if let Some(name) = &a.preset {
        apply_preset(cfg, name)?;
    }
    Ok(())
}

fn apply_audit(cfg: &mut ScenarioConfig, a: &AuditArgs) {
    let s = &mut cfg.audit;
    s.cases = a.cases.unwrap_or(s.cases);
    s.n_max = a.n_max.unwrap_or(s.n_max);
    s.t_max = a.t_max.or(s.t_max);
    s.b_min = a.b_min.unwrap_or(s.b_min);
    s.b_max = a.b_max.unwrap_or(s.b_max);
    s.exhaustive |= a.exhaustive;
    s.inject = a.inject.or(s.inject);
}

/// Defaults, then the config file, then flags.
pub fn resolve(cli: &Cli) -> CliResult<ScenarioConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    match &cli.command {
        Command::Run(a) => apply_run(&mut cfg, a)?,
        Command::Fig5a(a) => apply_fig5a(&mut cfg, a),
        Command::Fig5b(a) => apply_fig5b(&mut cfg, a)?,
        Command::Audit(a) => apply_audit(&mut cfg, a),
    }
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    let cfg = resolve(cli)?;
    match &cli.command {
        Command::Run(_) => cmd::run::cmd_run(&cfg, cli.quiet).map(drop),
        Command::Fig5a(_) => cmd::sweep::cmd_fig5a(&cfg).map(drop),
        Command::Fig5b(_) => cmd::sweep::cmd_fig5b(&cfg, cli.quiet).map(drop),
        Command::Audit(_) => cmd::audit::cmd_audit(&cfg, cli.quiet).map(drop),
    }
}
