use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use illusion_core::formats::Format;
use illusion_core::illusion::{ChipConfig, InterconnectConfig, ScheduleMode};
use illusion_core::sampler::InitialState;
use illusion_core::{BetaSchedule, Kernel, SamplerConfig};

/// Simulate p-bit sampling on an ideal chip or partitioned across many.
///
/// Set ILLUSION_SIM_THREADS to cap worker threads (0 = one per core). Output
/// files do not depend on the thread count.
#[derive(Debug, Parser)]
#[command(name = "illusion-sim", version)]
pub struct Cli {
    /// Master seed for sampling, partitioning and restarts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gibbs sampling or annealing on a single chip.
    Sample(SampleArgs),
    /// Weighted min-cut partition of the coupling graph.
    Partition(PartitionArgs),
    /// Ideal reference plus partitioned multi-chip runs over a (k, tau, delay) grid.
    Illusion(IllusionArgs),
    /// Rewrite a Gset or QUBO instance in the native Ising format.
    Convert(ConvertArgs),
    /// Derive plot-ready tables from a results directory.
    Plotdata(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormatArg {
    Native,
    Gset,
    Qubo,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Native => Format::Native,
            FormatArg::Gset => Format::Gset,
            FormatArg::Qubo => Format::Qubo,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Problem instance.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Native)]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScheduleArg {
    Constant,
    Linear,
    Geometric,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InitArg {
    Random,
    Down,
    Up,
}

#[derive(Debug, Clone, Args)]
pub struct SamplerArgs {
    /// Inverse temperature, or the starting value of an annealing schedule.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Constant)]
    pub schedule: ScheduleArg,
    /// Final inverse temperature of a linear or geometric schedule.
    #[arg(long, allow_negative_numbers = true)]
    pub beta_end: Option<f64>,
    /// Total sweeps, burn-in included.
    #[arg(long, default_value_t = 10_000)]
    pub sweeps: u64,
    #[arg(long, default_value_t = 0)]
    pub burn_in: u64,
    #[arg(long, default_value_t = 1)]
    pub thinning: u64,
    #[arg(long, value_enum, default_value_t = InitArg::Random)]
    pub init: InitArg,
    /// Sweep counts at which TV to the exact distribution is also recorded.
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Vec<u64>,
}

impl SamplerArgs {
    pub fn config(&self, kernel: Kernel, seed: u64) -> Result<SamplerConfig, String> {
        let schedule = match (self.schedule, self.beta_end) {
            (ScheduleArg::Constant, None) => BetaSchedule::constant(self.beta),
            (ScheduleArg::Constant, Some(_)) => {
                return Err("--beta-end needs --schedule linear or geometric".into())
            }
            (_, None) => return Err("annealing schedules need --beta-end".into()),
            (ScheduleArg::Linear, Some(end)) => BetaSchedule::Linear {
                start: self.beta,
                end,
            },
            (ScheduleArg::Geometric, Some(end)) => BetaSchedule::Geometric {
                start: self.beta,
                end,
            },
        };
        let mut cfg = SamplerConfig::new(kernel, schedule, self.sweeps, seed)
            .with_burn_in(self.burn_in)
            .with_thinning(self.thinning)
            .with_initial(match self.init {
                InitArg::Random => InitialState::Random,
                InitArg::Down => InitialState::AllDown,
                InitArg::Up => InitialState::AllUp,
            });
        cfg.snapshot_at = self.snapshots.clone();
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ChipArgs {
    /// Resident p-bits per chip.
    #[arg(long)]
    pub capacity: Option<usize>,
    /// Spin updates per second per chip.
    #[arg(long, default_value_t = 1e10)]
    pub update_rate: f64,
    #[arg(long, default_value_t = 10.0)]
    pub active_power: f64,
    #[arg(long, default_value_t = 0.1)]
    pub idle_power: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub wakeup_latency: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub shutdown_latency: f64,
}

impl ChipArgs {
    pub fn config(&self) -> ChipConfig {
        ChipConfig {
            capacity: self.capacity.unwrap_or(usize::MAX),
            update_rate: self.update_rate,
            active_power_w: self.active_power,
            idle_power_w: self.idle_power,
            wakeup_latency_s: self.wakeup_latency,
            shutdown_latency_s: self.shutdown_latency,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelArg {
    Sequential,
    Chromatic,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[command(flatten)]
    pub chip: ChipArgs,
    #[arg(long, value_enum, default_value_t = KernelArg::Sequential)]
    pub kernel: KernelArg,
    /// Independent chains with seeds derived from --seed.
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = illusion_core::partition::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Hard cap on part size; replaces the epsilon bound.
    #[arg(long)]
    pub capacity: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Sync,
    Async,
}

impl From<ModeArg> for ScheduleMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sync => ScheduleMode::Synchronous,
            ModeArg::Async => ScheduleMode::Asynchronous,
        }
    }
}

#[derive(Debug, Args)]
pub struct IllusionArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[command(flatten)]
    pub chip: ChipArgs,
    /// Chip counts to evaluate.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub k: Vec<usize>,
    #[arg(long, default_value_t = illusion_core::partition::DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "sync")]
    pub mode: Vec<ModeArg>,
    /// Exchange intervals in sweeps.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub tau: Vec<u64>,
    /// Delivery delays in sweeps; asynchronous runs only.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub delay: Vec<u64>,
    /// Seconds charged per exchange round.
    #[arg(long, default_value_t = 0.0)]
    pub message_overhead: f64,
    #[arg(long, default_value_t = 1)]
    pub payload_bytes: u64,
    #[arg(long)]
    pub out: PathBuf,
}

impl IllusionArgs {
    pub fn interconnect(&self, tau: u64, delay: u64) -> InterconnectConfig {
        InterconnectConfig {
            exchange_interval: tau,
            delivery_delay: delay,
            message_overhead_s: self.message_overhead,
            payload_bytes_per_spin: self.payload_bytes,
        }
    }
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub from: FormatArg,
    /// Native-format output file.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Directory holding report.json and metrics.csv.
    #[arg(long)]
    pub results: PathBuf,
    /// Where to write the tables; defaults to the results directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
