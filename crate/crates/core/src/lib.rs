//! Simulation core for scaling probabilistic (p-bit) computers across
//! networked, capacity-limited chips.
//!
//! - [`model`]: Ising problems, energies and exhaustive oracles.
//! - [`sampler`]: sequential and chromatic Gibbs kernels with counted,
//!   counter-based randomness.
//! - [`partition`]: weighted min-cut k-way partitioning.
//! - [`illusion`]: multi-chip synchronous/asynchronous execution with ghost
//!   spins and throughput/energy accounting.
//! - [`metrics`]: accuracy and mixing diagnostics.
//! - [`formats`]: native, Gset and QUBO text formats.

pub mod error;
pub mod formats;
pub mod generators;
pub mod illusion;
pub mod metrics;
pub mod model;
pub mod partition;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
pub use illusion::{ChipConfig, IllusionSystem, InterconnectConfig, RunReport, ScheduleMode};
pub use metrics::ComparisonReport;
pub use model::{ExactDistribution, GroundStates, IsingModel, SpinState};
pub use partition::{PartitionResult, PartitionSpec};
pub use sampler::{BetaSchedule, Kernel, SampleTrace, SamplerConfig};
