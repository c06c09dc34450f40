//! Scenario files in the shared `key = value` dialect.
//!
//! Top-level keys describe the run; `[fig5a]`, `[fig5b]` and `[audit]`
//! hold sweep and audit settings. Unknown keys are rejected with their line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cryoqaoa::bandwidth::choose_b;
use cryoqaoa::counter::Fault;
use cryoqaoa::ising::{parse_instance, IsingInstance};
use cryoqaoa::kv;
use cryoqaoa::power::BitPolicy;
use cryoqaoa::timing::GateTimings;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    Ring,
    Path,
    Complete,
    WorstCase,
    Random,
}

impl FromStr for GeneratorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ring" => Ok(GeneratorKind::Ring),
            "path" => Ok(GeneratorKind::Path),
            "complete" => Ok(GeneratorKind::Complete),
            "worstcase" => Ok(GeneratorKind::WorstCase),
            "random" => Ok(GeneratorKind::Random),
            other => Err(format!("unknown generator `{other}` (ring, path, complete, worstcase, random)")),
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::Ring => "ring",
            GeneratorKind::Path => "path",
            GeneratorKind::Complete => "complete",
            GeneratorKind::WorstCase => "worstcase",
            GeneratorKind::Random => "random",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    File(PathBuf),
    Generator { kind: GeneratorKind, n: usize, density: f64 },
}

/// Counter width: fixed, or the widest one the overhead budget `r` allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitChoice {
    Auto,
    Fixed(u32),
}

impl FromStr for BitChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(BitChoice::Auto);
        }
        match s.parse::<u32>() {
            Ok(b) if (1..=cryoqaoa::counter::MAX_WIDTH).contains(&b) => Ok(BitChoice::Fixed(b)),
            _ => Err(format!("counter bits must be `auto` or 1..={}, got `{s}`", cryoqaoa::counter::MAX_WIDTH)),
        }
    }
}

impl fmt::Display for BitChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BitChoice::Auto => f.write_str("auto"),
            BitChoice::Fixed(b) => write!(f, "{b}"),
        }
    }
}

/// `log2` or a fixed width.
pub fn parse_policy(s: &str) -> Result<BitPolicy, String> {
    if s == "log2" {
        return Ok(BitPolicy::LogN);
    }
    match s.parse::<u32>() {
        Ok(b) if b >= 2 => Ok(BitPolicy::Fixed(b)),
        _ => Err(format!("bit policy must be `log2` or an integer >= 2, got `{s}`")),
    }
}

pub fn policy_name(p: BitPolicy) -> String {
    match p {
        BitPolicy::LogN => "log2".into(),
        BitPolicy::Fixed(b) => b.to_string(),
    }
}

pub fn parse_fault(s: &str) -> Result<Fault, String> {
    match s {
        "drop-msb" => Ok(Fault::DropMsb),
        other => Err(format!("unknown fault `{other}` (drop-msb)")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleSource {
    Qaoa,
    Bernoulli { p: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaircaseGrid {
    pub t_list: Vec<u64>,
    pub r_grid: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSweep {
    pub n_min: usize,
    pub n_max: usize,
    pub n_step: usize,
    pub policy: BitPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditBounds {
    pub cases: usize,
    pub n_max: usize,
    /// Longest trial sequence; the exhaustive mode picks a smaller default.
    pub t_max: Option<usize>,
    pub b_min: u32,
    pub b_max: u32,
    pub exhaustive: bool,
    pub inject: Option<Fault>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub instance: InstanceSource,
    pub preset: String,
    pub timings: GateTimings,
    pub trials: u64,
    pub layers: usize,
    /// `None` runs every qubit in parallel.
    pub parallelism: Option<usize>,
    pub param_bits: u32,
    pub bits: BitChoice,
    pub r: f64,
    pub seed: u64,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub source: SampleSource,
    /// Optimizer sweeps before the final sampling run; 0 keeps the given angles.
    pub optimize_steps: usize,
    /// Largest instance the statevector source accepts.
    pub max_qubits: usize,
    pub out: Option<PathBuf>,
    pub fig5a: StaircaseGrid,
    pub fig5b: PowerSweep,
    pub audit: AuditBounds,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            instance: InstanceSource::Generator { kind: GeneratorKind::Ring, n: 8, density: 0.5 },
            preset: "paper-v1".into(),
            timings: GateTimings::REFERENCE,
            trials: 1000,
            layers: 1,
            parallelism: None,
            param_bits: 32,
            bits: BitChoice::Auto,
            r: 0.05,
            seed: 0,
            gammas: vec![0.6],
            betas: vec![0.3],
            source: SampleSource::Qaoa,
            optimize_steps: 0,
            max_qubits: cryoqaoa::qaoa::DEFAULT_MAX_QUBITS,
            out: None,
            fig5a: StaircaseGrid {
                t_list: vec![1_000, 10_000, 100_000, 1_000_000, 10_000_000],
                r_grid: vec![0.01, 0.05, 0.1],
            },
            fig5b: PowerSweep { n_min: 2, n_max: 4096, n_step: 1, policy: BitPolicy::LogN },
            audit: AuditBounds { cases: 200, n_max: 8, t_max: None, b_min: 2, b_max: 8, exhaustive: false, inject: None },
        }
    }
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|tok| tok.trim().parse::<T>().map_err(|_| format!("bad list element `{}`", tok.trim()))).collect()
}

/// Integers that may be written in scientific notation (`1e6`).
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => Ok(v as u64),
        _ => Err(format!("expected a non-negative integer, got `{s}`")),
    }
}

pub fn parse_counts(s: &str) -> Result<Vec<u64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|tok| parse_count(tok.trim())).collect()
}

pub fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    parse_list(s)
}

fn value<T: FromStr>(e: &kv::Entry) -> CliResult<T> {
    e.value.parse::<T>().map_err(|_| CliError::Config { line: e.line, message: format!("`{}`: cannot parse `{}`", e.key, e.value) })
}

fn with<T>(e: &kv::Entry, parsed: Result<T, String>) -> CliResult<T> {
    parsed.map_err(|message| CliError::Config { line: e.line, message: format!("`{}`: {message}", e.key) })
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_text(&text, base)
    }

    /// Parses scenario text; relative instance paths resolve against `base`.
    pub fn from_text(text: &str, base: &Path) -> CliResult<Self> {
        let entries = kv::parse(text).map_err(|e| match e {
            cryoqaoa::Error::Parse { line, message } => CliError::Config { line, message },
            other => CliError::Model(other),
        })?;
        let mut cfg = ScenarioConfig::default();
        let mut generator: Option<(GeneratorKind, usize)> = None;
        let (mut gen_n, mut density) = (None, 0.5);
        let mut overrides = Vec::new();
        for e in &entries {
            match (e.section.as_deref(), e.key.as_str()) {
                (None, "instance") => cfg.instance = InstanceSource::File(base.join(&e.value)),
                (None, "generator") => generator = Some((value(e)?, e.line)),
                (None, "n") => gen_n = Some(value(e)?),
                (None, "density") => density = value(e)?,
                (None, "preset") => {
                    cfg.timings = with(e, GateTimings::preset(&e.value).ok_or_else(|| {
                        format!("unknown preset `{}` (available: {})", e.value, GateTimings::preset_names().join(", "))
                    }))?;
                    cfg.preset = e.value.clone();
                }
                (None, key @ ("t_reset" | "t_init" | "t_rx" | "t_rz" | "t_cnot" | "t_meas")) => {
                    overrides.push((key.to_string(), value::<f64>(e)?));
                }
                (None, "trials") => cfg.trials = with(e, parse_count(&e.value))?,
                (None, "layers") => cfg.layers = value(e)?,
                (None, "parallelism") => cfg.parallelism = Some(value(e)?),
                (None, "param_bits") => cfg.param_bits = value(e)?,
                (None, "bits") => cfg.bits = with(e, e.value.parse())?,
                (None, "r") => cfg.r = value(e)?,
                (None, "seed") => cfg.seed = value(e)?,
                (None, "gammas") => cfg.gammas = with(e, parse_floats(&e.value))?,
                (None, "betas") => cfg.betas = with(e, parse_floats(&e.value))?,
                (None, "source") => {
                    cfg.source = match e.value.as_str() {
                        "qaoa" => SampleSource::Qaoa,
                        "bernoulli" => SampleSource::Bernoulli { p: 0.5 },
                        other => return with(e, Err(format!("unknown source `{other}` (qaoa, bernoulli)"))),
                    }
                }
                (None, "p") => {
                    let p: f64 = value(e)?;
                    if let SampleSource::Bernoulli { p: slot } = &mut cfg.source {
                        *slot = p;
                    } else {
                        cfg.source = SampleSource::Bernoulli { p };
                    }
                }
                (None, "optimize_steps") => cfg.optimize_steps = value(e)?,
                (None, "max_qubits") => cfg.max_qubits = value(e)?,
                (None, "out") => cfg.out = Some(PathBuf::from(&e.value)),
                (Some("fig5a"), "t_list") => cfg.fig5a.t_list = with(e, parse_counts(&e.value))?,
                (Some("fig5a"), "r_grid") => cfg.fig5a.r_grid = with(e, parse_floats(&e.value))?,
                (Some("fig5b"), "n_min") => cfg.fig5b.n_min = value(e)?,
                (Some("fig5b"), "n_max") => cfg.fig5b.n_max = value(e)?,
                (Some("fig5b"), "n_step") => cfg.fig5b.n_step = value(e)?,
                (Some("fig5b"), "bits") => cfg.fig5b.policy = with(e, parse_policy(&e.value))?,
                (Some("audit"), "cases") => cfg.audit.cases = value(e)?,
                (Some("audit"), "n_max") => cfg.audit.n_max = value(e)?,
                (Some("audit"), "t_max") => cfg.audit.t_max = Some(value(e)?),
                (Some("audit"), "b_min") => cfg.audit.b_min = value(e)?,
                (Some("audit"), "b_max") => cfg.audit.b_max = value(e)?,
                (Some("audit"), "exhaustive") => cfg.audit.exhaustive = value(e)?,
                (Some("audit"), "inject") => cfg.audit.inject = Some(with(e, parse_fault(&e.value))?),
                (section, key) => {
                    let place = section.map_or_else(String::new, |s| format!(" in [{s}]"));
                    return Err(CliError::Config { line: e.line, message: format!("unknown key `{key}`{place}") });
                }
            }
        }
        if let Some((kind, line)) = generator {
            let n = gen_n.ok_or_else(|| CliError::Config { line, message: "generator needs `n = <qubits>`".into() })?;
            cfg.instance = InstanceSource::Generator { kind, n, density };
        }
        for (key, v) in overrides {
            cfg.set_timing(&key, v);
        }
        Ok(cfg)
    }

    pub fn set_timing(&mut self, key: &str, v: f64) {
        let t = &mut self.timings;
        let slot = match key {
            "t_reset" => &mut t.reset_ns,
            "t_init" => &mut t.init_ns,
            "t_rx" => &mut t.rx_ns,
            "t_rz" => &mut t.rz_ns,
            "t_cnot" => &mut t.cnot_ns,
            "t_meas" => &mut t.meas_ns,
            _ => return,
        };
        if *slot != v {
            *slot = v;
            self.preset = "custom".into();
        }
    }

    /// Range and consistency checks that individual keys cannot express.
    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Usage(m));
        self.timings.validate()?;
        if self.layers == 0 {
            return bad("layers must be at least 1".into());
        }
        if self.gammas.len() != self.betas.len() || self.gammas.len() != self.layers {
            return bad(format!(
                "need one gamma and one beta per layer: layers = {}, {} gammas, {} betas",
                self.layers,
                self.gammas.len(),
                self.betas.len()
            ));
        }
        if self.r.is_nan() || self.r <= 0.0 {
            return bad(format!("overhead budget r must be positive, got {}", self.r));
        }
        if let SampleSource::Bernoulli { p } = self.source {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("bernoulli p must lie in [0, 1], got {p}"));
            }
        }
        if let InstanceSource::Generator { n, density, .. } = self.instance {
            if n == 0 {
                return bad("generator needs n >= 1".into());
            }
            if !(0.0..=1.0).contains(&density) {
                return bad(format!("density must lie in [0, 1], got {density}"));
            }
        }
        Ok(())
    }

    pub fn load_instance(&self) -> CliResult<IsingInstance> {
        match &self.instance {
            InstanceSource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.clone(), source })?;
                parse_instance(&text).map_err(|e| match e {
                    cryoqaoa::Error::Parse { line, message } => {
                        CliError::Usage(format!("{}: line {line}: {message}", path.display()))
                    }
                    other => CliError::Model(other),
                })
            }
            InstanceSource::Generator { kind, n, density } => generate(*kind, *n, *density, self.seed),
        }
    }

    /// Fixed width, or the widest within the overhead budget for `T`.
    pub fn counter_bits(&self) -> u32 {
        match self.bits {
            BitChoice::Fixed(b) => b,
            BitChoice::Auto => {
                let w = choose_b(self.trials, self.r);
                if w.clamped {
                    log::warn!("no counter width meets r = {} at T = {}; using b = 1", self.r, self.trials);
                }
                w.bits
            }
        }
    }

    /// Every resolved setting on one line, for CSV provenance.
    pub fn describe(&self) -> String {
        let instance = match &self.instance {
            InstanceSource::File(p) => format!("instance={}", p.display()),
            InstanceSource::Generator { kind, n, density } => format!("generator={kind} n={n} density={density}"),
        };
        let t = &self.timings;
        let source = match self.source {
            SampleSource::Qaoa => "qaoa".to_string(),
            SampleSource::Bernoulli { p } => format!("bernoulli p={p}"),
        };
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let a = &self.audit;
        format!(
            "{instance} preset={} t_reset={} t_init={} t_rx={} t_rz={} t_cnot={} t_meas={} trials={} layers={} \
             parallelism={} param_bits={} bits={} r={} seed={} gammas={} betas={} source={source} optimize_steps={} max_qubits={} \
             fig5a.t_list={} fig5a.r_grid={} fig5b.n={}..={} step {} fig5b.bits={} audit.cases={} audit.n_max={} \
             audit.t_max={} audit.b={}..={} audit.exhaustive={} audit.inject={}",
            self.preset,
            t.reset_ns,
            t.init_ns,
            t.rx_ns,
            t.rz_ns,
            t.cnot_ns,
            t.meas_ns,
            self.trials,
            self.layers,
            self.parallelism.map_or_else(|| "N".into(), |p| p.to_string()),
            self.param_bits,
            self.bits,
            self.r,
            self.seed,
            join(&self.gammas),
            join(&self.betas),
            self.optimize_steps,
            self.max_qubits,
            self.fig5a.t_list.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
            join(&self.fig5a.r_grid),
            self.fig5b.n_min,
            self.fig5b.n_max,
            self.fig5b.n_step,
            policy_name(self.fig5b.policy),
            a.cases,
            a.n_max,
            a.t_max.map_or_else(|| "default".into(), |t| t.to_string()),
            a.b_min,
            a.b_max,
            a.exhaustive,
            a.inject.map_or("none", |_| "drop-msb"),
        )
    }
}

/// Builds a named instance family; `random` draws integer coefficients in
/// `[-5, 5]` with the given term density.
pub fn generate(kind: GeneratorKind, n: usize, density: f64, seed: u64) -> CliResult<IsingInstance> {
    let inst = match kind {
        GeneratorKind::Ring => {
            let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            if n < 3 {
                return Err(CliError::Usage(format!("ring needs n >= 3, got {n}")));
            }
            IsingInstance::maxcut(n, &edges)?.with_label(format!("ring{n}"))
        }
        GeneratorKind::Path => {
            let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
            IsingInstance::maxcut(n, &edges)?.with_label(format!("path{n}"))
        }
        GeneratorKind::Complete => IsingInstance::complete(n)?,
        GeneratorKind::WorstCase => IsingInstance::worst_case(n)?,
        GeneratorKind::Random => random_instance(&mut ChaCha8Rng::seed_from_u64(seed), n, density),
    };
    Ok(inst)
}

pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, density: f64) -> IsingInstance {
    let mut inst = IsingInstance::new(n).expect("n >= 1").with_label(format!("random{n}"));
    let draw = |rng: &mut ChaCha8Rng| -> i64 {
        if rng.random::<f64>() < density {
            [-5, -4, -3, -2, -1, 1, 2, 3, 4, 5][rng.random_range(0..10)]
        } else {
            0
        }
    };
    for i in 0..n {
        let s = draw(rng);
        if s != 0 {
            inst.set_linear(i, s).expect("index in range");
        }
        for j in i + 1..n {
            let c = draw(rng);
            if c != 0 {
                inst.set_pair(i, j, c).expect("index in range");
            }
        }
    }
    inst
}
