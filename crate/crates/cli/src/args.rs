use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cryoqaoa::counter::Fault;
use cryoqaoa::power::BitPolicy;

use crate::config::{parse_count, parse_fault, parse_policy, BitChoice, GeneratorKind};

#[derive(Debug, Parser)]
#[command(name = "cryoqaoa", version, about = "Counter-based readout models for QAOA control: runs, sweeps and audits")]
pub struct Cli {
    /// Scenario file; flags override its keys.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,
    /// Output file (CSV, or the counterexample for `audit`); stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Suppress summaries and log output.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Sample an instance, feed baseline and counter readout, compare energies.
    Run(RunArgs),
    /// Counter width and bandwidth reduction against trial count and overhead budget.
    Fig5a(Fig5aArgs),
    /// Bandwidth, cables and power of baseline vs counter readout across machine sizes.
    Fig5b(Fig5bArgs),
    /// Check counter invariants on randomized or enumerated instances.
    Audit(AuditArgs),
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Instance file (`n = ...`, `[linear]`, `[pairs]`).
    #[arg(long, value_name = "PATH", conflicts_with = "generator")]
    pub instance: Option<PathBuf>,
    #[arg(long, value_parser = parse_generator)]
    pub generator: Option<GeneratorKind>,
    /// Qubits for the generator.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, value_parser = parse_count)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub parallelism: Option<usize>,
    #[arg(long)]
    pub param_bits: Option<u32>,
    /// Counter width, or `auto` to take the widest within `--r`.
    #[arg(long, value_parser = parse_bits)]
    pub bits: Option<BitChoice>,
    /// Acceptable run-time overhead fraction.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub gammas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub betas: Option<Vec<f64>>,
    /// `qaoa` or `bernoulli`.
    #[arg(long)]
    pub source: Option<String>,
    /// Bit probability for the bernoulli source.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub optimize_steps: Option<usize>,
    /// Statevector size limit in qubits.
    #[arg(long)]
    pub max_qubits: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct Fig5aArgs {
    /// Comma-separated trial counts.
    #[arg(long, value_delimiter = ',', value_parser = parse_count, value_name = "LIST")]
    pub t_list: Option<Vec<u64>>,
    /// Comma-separated overhead budgets.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub r_grid: Option<Vec<f64>>,
}

#[derive(Debug, Args, Default)]
pub struct Fig5bArgs {
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub n_step: Option<usize>,
    /// `log2` or a fixed counter width.
    #[arg(long, value_parser = parse_policy)]
    pub bits: Option<BitPolicy>,
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct AuditArgs {
    #[arg(long)]
    pub cases: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub t_max: Option<usize>,
    #[arg(long)]
    pub b_min: Option<u32>,
    #[arg(long)]
    pub b_max: Option<u32>,
    /// Enumerate every support pattern and trial sequence within the bounds.
    #[arg(long)]
    pub exhaustive: bool,
    /// Fault to inject into the MSB link (`drop-msb`).
    #[arg(long, value_parser = parse_fault)]
    pub inject: Option<Fault>,
}

fn parse_generator(s: &str) -> Result<GeneratorKind, String> {
    s.parse()
}

fn parse_bits(s: &str) -> Result<BitChoice, String> {
    s.parse()
}
