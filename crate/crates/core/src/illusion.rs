//! Multi-chip execution of a partitioned Ising model.
//!
//! Every chip owns the spins of one part plus read-only ghost replicas of the
//! remote spins its couplings touch. Chips run chromatic Gibbs phases on their
//! own spins using the global colouring and per-spin random streams keyed by
//! global spin id, so partitioning changes only what each chip can *see*,
//! never the randomness it consumes.
//!
//! Time is a logical clock of colour phases (`sweep * colors + color`).
//! Boundary values are published after every phase when the exchange
//! interval is 1, otherwise after every `interval` sweeps, and become visible
//! to the receiver `delay` sweeps later. Synchronous mode is the special case
//! `delay = 0`; with interval 1 its trajectory equals the single-chip
//! chromatic reference bit-for-bit.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::ComparisonReport;
use crate::model::{IsingModel, SpinState};
use crate::partition::PartitionResult;
use crate::rng::{spin_streams, SpinStream};
use crate::sampler::{
    greedy_coloring, heat_bath, Coloring, Kernel, Recorder, SampleTrace, SamplerConfig, SweepStats,
};

/// Below this many spins chips are stepped on the calling thread.
const PARALLEL_MIN_SPINS: usize = 4096;

/// Per-chip hardware parameters. Defaults describe a chip sustaining 10^10
/// p-bit updates per second at 10 W; they are model parameters, not
/// measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChipConfig {
    /// Maximum resident p-bits.
    pub capacity: usize,
    /// Spin updates per second.
    pub update_rate: f64,
    pub active_power_w: f64,
    pub idle_power_w: f64,
    pub wakeup_latency_s: f64,
    pub shutdown_latency_s: f64,
}

impl Default for ChipConfig {
    fn default() -> Self {
        Self {
            capacity: usize::MAX,
            update_rate: 1e10,
            active_power_w: 10.0,
            idle_power_w: 0.1,
            wakeup_latency_s: 1e-6,
            shutdown_latency_s: 1e-6,
        }
    }
}

impl ChipConfig {
    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            capacity,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.capacity == 0 {
            return Err(Error::contract("chip capacity must be at least 1"));
        }
        let values = [
            ("update_rate", self.update_rate),
            ("active_power_w", self.active_power_w),
            ("idle_power_w", self.idle_power_w),
            ("wakeup_latency_s", self.wakeup_latency_s),
            ("shutdown_latency_s", self.shutdown_latency_s),
        ];
        for (name, v) in values {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::contract(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if self.update_rate == 0.0 {
            return Err(Error::contract("update_rate must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterconnectConfig {
    /// Local sweeps between boundary exchanges (τ). With τ = 1 boundaries are
    /// exchanged after every colour phase.
    pub exchange_interval: u64,
    /// Extra sweeps before a sent exchange becomes visible (asynchronous mode).
    pub delivery_delay: u64,
    pub message_overhead_s: f64,
    pub payload_bytes_per_spin: u64,
}

impl Default for InterconnectConfig {
    fn default() -> Self {
        Self {
            exchange_interval: 1,
            delivery_delay: 0,
            message_overhead_s: 0.0,
            payload_bytes_per_spin: 1,
        }
    }
}

impl InterconnectConfig {
    pub fn new(exchange_interval: u64, delivery_delay: u64) -> Self {
        Self {
            exchange_interval,
            delivery_delay,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.exchange_interval == 0 {
            return Err(Error::contract("exchange interval must be at least 1"));
        }
        if !(self.message_overhead_s >= 0.0 && self.message_overhead_s.is_finite()) {
            return Err(Error::contract("message overhead must be finite and >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    Synchronous,
    Asynchronous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Ideal,
    Synchronous,
    Asynchronous,
}

impl RunMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunMode::Ideal => "ideal",
            RunMode::Synchronous => "sync",
            RunMode::Asynchronous => "async",
        }
    }
}

impl From<ScheduleMode> for RunMode {
    fn from(mode: ScheduleMode) -> Self {
        match mode {
            ScheduleMode::Synchronous => RunMode::Synchronous,
            ScheduleMode::Asynchronous => RunMode::Asynchronous,
        }
    }
}

/// Boundary values one chip sends to one neighbouring chip.
#[derive(Debug, Clone, PartialEq)]
struct Link {
    to: usize,
    /// Local indices on the sender.
    send: Vec<usize>,
    /// Ghost indices on the receiver, parallel to `send`.
    recv: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chip {
    /// Global ids of resident spins, ascending.
    spins: Vec<usize>,
    /// Global ids of ghost spins, ascending.
    ghosts: Vec<usize>,
    /// Resident values followed by ghost replica values.
    values: Vec<i8>,
    /// Sweep at which each ghost was last refreshed.
    ghost_refreshed: Vec<u64>,
    /// Per resident spin: `(slot in values, J)` in ascending global neighbour order.
    couplings: Vec<Vec<(usize, f64)>>,
    biases: Vec<f64>,
    /// Local indices per global colour.
    classes: Vec<Vec<usize>>,
    links: Vec<Link>,
}

impl Chip {
    pub fn spins(&self) -> &[usize] {
        &self.spins
    }

    pub fn ghosts(&self) -> &[usize] {
        &self.ghosts
    }

    pub fn ghost_values(&self) -> &[i8] {
        &self.values[self.spins.len()..]
    }

    pub fn ghost_refreshed(&self) -> &[u64] {
        &self.ghost_refreshed
    }

    /// Chips this chip sends boundary values to.
    pub fn neighbors(&self) -> impl Iterator<Item = usize> + '_ {
        self.links.iter().map(|l| l.to)
    }

    /// Same summation order as [`IsingModel::field_of`].
    #[inline]
    fn field(&self, local: usize) -> f64 {
        let mut acc = 0.0;
        for &(slot, value) in &self.couplings[local] {
            acc += value * f64::from(self.values[slot]);
        }
        acc + self.biases[local]
    }

    /// Updates this chip's spins of one colour; returns accepted flips.
    fn run_phase(&mut self, color: usize, beta: f64, streams: &mut [SpinStream]) -> u64 {
        let mut accepted = 0;
        for idx in 0..self.classes[color].len() {
            let local = self.classes[color][idx];
            let u = streams[local].next_uniform();
            let new = heat_bath(self.field(local), beta, u);
            if new != self.values[local] {
                self.values[local] = new;
                accepted += 1;
            }
        }
        accepted
    }

    fn load(&mut self, global: &[i8]) {
        let resident = self.spins.len();
        for (slot, &g) in self.spins.iter().chain(&self.ghosts).enumerate() {
            self.values[slot] = global[g];
        }
        self.ghost_refreshed.iter_mut().for_each(|t| *t = 0);
        debug_assert_eq!(self.values.len(), resident + self.ghosts.len());
    }
}

/// A partitioned model mapped onto chips.
#[derive(Debug, Clone)]
pub struct IllusionSystem {
    model: IsingModel,
    partition: PartitionResult,
    coloring: Coloring,
    chips: Vec<Chip>,
    mode: ScheduleMode,
    chip_config: ChipConfig,
    interconnect: InterconnectConfig,
}

impl IllusionSystem {
    pub fn build(
        model: &IsingModel,
        partition: &PartitionResult,
        chip_config: &ChipConfig,
        interconnect: &InterconnectConfig,
        mode: ScheduleMode,
    ) -> Result<Self> {
        chip_config.validate()?;
        interconnect.validate()?;
        let n = model.n();
        if partition.assignment.len() != n {
            return Err(Error::contract(format!(
                "partition covers {} spins, model has {n}",
                partition.assignment.len()
            )));
        }
        if let Some(&p) = partition.assignment.iter().find(|&&p| p >= partition.k) {
            return Err(Error::contract(format!(
                "part id {p} out of range for k={}",
                partition.k
            )));
        }
        let parts = partition.parts();
        if let Some((c, part)) = parts
            .iter()
            .enumerate()
            .find(|(_, p)| p.len() > chip_config.capacity)
        {
            return Err(Error::capacity(format!(
                "chip {c} would hold {} spins but capacity is {}",
                part.len(),
                chip_config.capacity
            )));
        }

        let coloring = greedy_coloring(model);
        let owner = &partition.assignment;
        let mut local_index = vec![0usize; n];
        for part in &parts {
            for (l, &g) in part.iter().enumerate() {
                local_index[g] = l;
            }
        }

        let mut chips: Vec<Chip> = parts
            .iter()
            .enumerate()
            .map(|(c, spins)| {
                let mut ghosts: Vec<usize> = spins
                    .iter()
                    .flat_map(|&i| model.neighbors(i).iter().map(|&(j, _)| j))
                    .filter(|&j| owner[j] != c)
                    .collect();
                ghosts.sort_unstable();
                ghosts.dedup();

                let resident = spins.len();
                let slot_of = |g: usize| -> usize {
                    if owner[g] == c {
                        local_index[g]
                    } else {
                        resident + ghosts.binary_search(&g).expect("ghost listed")
                    }
                };
                let couplings = spins
                    .iter()
                    .map(|&i| {
                        model
                            .neighbors(i)
                            .iter()
                            .map(|&(j, w)| (slot_of(j), w))
                            .collect()
                    })
                    .collect();
                let mut classes = vec![Vec::new(); coloring.num_colors()];
                for (l, &g) in spins.iter().enumerate() {
                    classes[coloring.color(g)].push(l);
                }
                Chip {
                    spins: spins.clone(),
                    values: vec![-1; resident + ghosts.len()],
                    ghost_refreshed: vec![0; ghosts.len()],
                    ghosts,
                    couplings,
                    biases: spins.iter().map(|&i| model.biases()[i]).collect(),
                    classes,
                    links: Vec::new(),
                }
            })
            .collect();

        // Chip `to` needs from chip `from` exactly the ghosts `from` owns.
        for to in 0..chips.len() {
            let mut by_sender: Vec<Link> = Vec::new();
            for (ghost_idx, &g) in chips[to].ghosts.iter().enumerate() {
                let from = owner[g];
                match by_sender.iter_mut().find(|l| l.to == from) {
                    Some(l) => {
                        l.send.push(local_index[g]);
                        l.recv.push(ghost_idx);
                    }
                    None => by_sender.push(Link {
                        to: from,
                        send: vec![local_index[g]],
                        recv: vec![ghost_idx],
                    }),
                }
            }
            for link in by_sender {
                let from = link.to;
                chips[from].links.push(Link { to, ..link });
            }
        }
        for chip in &mut chips {
            chip.links.sort_by_key(|l| l.to);
        }

        let mut system = Self {
            model: model.clone(),
            partition: partition.clone(),
            coloring,
            chips,
            mode,
            chip_config: chip_config.clone(),
            interconnect: interconnect.clone(),
        };
        system.load_state(&SpinState::all_down(n))?;
        Ok(system)
    }

    /// Sets resident and ghost values from a global state.
    pub fn load_state(&mut self, state: &SpinState) -> Result<()> {
        if state.len() != self.model.n() {
            return Err(Error::contract("state size does not match the model"));
        }
        for chip in &mut self.chips {
            chip.load(state.as_slice());
        }
        Ok(())
    }

    pub fn model(&self) -> &IsingModel {
        &self.model
    }

    pub fn partition(&self) -> &PartitionResult {
        &self.partition
    }

    pub fn chips(&self) -> &[Chip] {
        &self.chips
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    pub fn mode(&self) -> ScheduleMode {
        self.mode
    }

    pub fn chip_config(&self) -> &ChipConfig {
        &self.chip_config
    }

    pub fn interconnect(&self) -> &InterconnectConfig {
        &self.interconnect
    }

    /// Ordered chip pairs `(a, b)` where `a` holds a ghost of a spin on `b`.
    pub fn directed_pairs(&self) -> usize {
        self.chips.iter().map(|c| c.links.len()).sum()
    }

    /// Current global state assembled from resident values.
    pub fn global_state(&self) -> SpinState {
        let mut spins = vec![-1i8; self.model.n()];
        for chip in &self.chips {
            for (l, &g) in chip.spins.iter().enumerate() {
                spins[g] = chip.values[l];
            }
        }
        SpinState::new(spins).expect("±1 values")
    }

    fn simulate(&self, config: &SamplerConfig, delay_sweeps: u64) -> Result<RunReport> {
        config.validate()?;
        let n = self.model.n();
        let colors = self.coloring.num_colors() as u64;
        let interval = self.interconnect.exchange_interval;
        let delay_phases = delay_sweeps * colors;
        let exchanging = self.directed_pairs() > 0;
        let parallel = config.parallel && n >= PARALLEL_MIN_SPINS;

        let initial = config.initial_state(n);
        let mut global = initial.as_slice().to_vec();
        let mut chips = self.chips.clone();
        for chip in &mut chips {
            chip.load(&global);
        }
        let mut streams: Vec<Vec<SpinStream>> = chips
            .iter()
            .map(|c| spin_streams(config.seed, c.spins.iter().copied()))
            .collect();

        let k = chips.len();
        let mut chip_updates = vec![0u64; k];
        let mut segment = vec![0u64; k];
        let mut sleep_events = vec![0u64; k];
        let mut barrier_updates = 0u64;
        let mut rounds = 0u64;
        let mut messages = 0u64;
        let mut boundary_spins = 0u64;
        // (due phase, receiver, ghost indices, values), in send order.
        let mut in_flight: VecDeque<(u64, usize, Vec<usize>, Vec<i8>)> = VecDeque::new();

        let close_segment = |segment: &mut [u64], sleep_events: &mut [u64], barrier: &mut u64| {
            let longest = segment.iter().copied().max().unwrap_or(0);
            *barrier += longest;
            for (s, events) in segment.iter_mut().zip(sleep_events.iter_mut()) {
                if *s < longest {
                    // Chip idles at the barrier: shut down, wake up.
                    *events += 2;
                }
                *s = 0;
            }
        };

        let mut recorder = Recorder::new(n, config);
        for t in 0..config.sweeps {
            let beta = config.beta_at(t);
            let mut stats = SweepStats::default();
            for c in 0..colors {
                let phase = t * colors + c;
                while in_flight.front().is_some_and(|m| m.0 <= phase) {
                    let (_, to, ghosts, values) = in_flight.pop_front().expect("front exists");
                    let chip = &mut chips[to];
                    let resident = chip.spins.len();
                    for (g, v) in ghosts.into_iter().zip(values) {
                        chip.values[resident + g] = v;
                        chip.ghost_refreshed[g] = t;
                    }
                }

                let color = c as usize;
                let accepted: u64 = if parallel {
                    chips
                        .par_iter_mut()
                        .zip(streams.par_iter_mut())
                        .map(|(chip, s)| chip.run_phase(color, beta, s))
                        .sum()
                } else {
                    chips
                        .iter_mut()
                        .zip(streams.iter_mut())
                        .map(|(chip, s)| chip.run_phase(color, beta, s))
                        .sum()
                };
                stats.accepted += accepted;
                for (ci, chip) in chips.iter().enumerate() {
                    let class = &chip.classes[color];
                    for &l in class {
                        global[chip.spins[l]] = chip.values[l];
                    }
                    let updates = class.len() as u64;
                    chip_updates[ci] += updates;
                    segment[ci] += updates;
                    stats.attempts += updates;
                }

                let exchange_now =
                    exchanging && (interval == 1 || (c + 1 == colors && (t + 1) % interval == 0));
                if exchange_now {
                    rounds += 1;
                    close_segment(&mut segment, &mut sleep_events, &mut barrier_updates);
                    let due = phase + 1 + delay_phases;
                    for chip in &chips {
                        for link in &chip.links {
                            let values = link.send.iter().map(|&l| chip.values[l]).collect();
                            in_flight.push_back((due, link.to, link.recv.clone(), values));
                            messages += 1;
                            boundary_spins += link.send.len() as u64;
                        }
                    }
                }
            }
            let energy = self.model.energy_of(&global);
            recorder.observe(t, &global, energy, stats);
        }
        if segment.iter().any(|&s| s > 0) {
            close_segment(&mut segment, &mut sleep_events, &mut barrier_updates);
        }

        let mode = RunMode::from(self.mode);
        if mode == RunMode::Asynchronous {
            // No barriers: a chip only sleeps once it has finished early.
            let longest = chip_updates.iter().copied().max().unwrap_or(0);
            for (events, &u) in sleep_events.iter_mut().zip(&chip_updates) {
                *events = u64::from(u < longest);
            }
        }

        let trace = recorder.finish(&global);
        let chip_stats = chips
            .iter()
            .zip(&chip_updates)
            .zip(&sleep_events)
            .zip(&streams)
            .map(|(((chip, &updates), &sleep), s)| ChipStats {
                local_spins: chip.spins.len(),
                ghosts: chip.ghosts.len(),
                updates,
                rng_draws: s.iter().map(SpinStream::counter).sum(),
                sleep_events: sleep,
            })
            .collect();
        let mut report = RunReport {
            mode,
            k,
            exchange_interval: interval,
            delivery_delay: delay_sweeps,
            trace,
            chips: chip_stats,
            exchange_rounds: rounds,
            directed_pairs: self.directed_pairs(),
            messages,
            boundary_bytes: boundary_spins * self.interconnect.payload_bytes_per_spin,
            barrier_updates,
            accounting: Accounting::default(),
            comparison: None,
        };
        report.accounting = account(&report, &self.chip_config, &self.interconnect);
        Ok(report)
    }

    /// Lock-step execution with barriers; the delivery delay is ignored.
    pub fn sync_run(&self, config: &SamplerConfig) -> Result<RunReport> {
        if self.mode != ScheduleMode::Synchronous {
            return Err(Error::contract("sync_run requires a synchronous system"));
        }
        self.simulate(config, 0)
    }

    /// Barrier-free execution where exchanges arrive `delivery_delay` sweeps late.
    pub fn async_run(&self, config: &SamplerConfig) -> Result<RunReport> {
        if self.mode != ScheduleMode::Asynchronous {
            return Err(Error::contract("async_run requires an asynchronous system"));
        }
        self.simulate(config, self.interconnect.delivery_delay)
    }

    /// Dispatches on the system's mode.
    pub fn run(&self, config: &SamplerConfig) -> Result<RunReport> {
        match self.mode {
            ScheduleMode::Synchronous => self.sync_run(config),
            ScheduleMode::Asynchronous => self.async_run(config),
        }
    }
}

/// The hypothetical single chip that holds the whole graph: a chromatic
/// Gibbs run with the same stream keying, no messages, no capacity limit.
pub fn ideal_reference_run(
    model: &IsingModel,
    config: &SamplerConfig,
    chip_config: &ChipConfig,
) -> Result<RunReport> {
    chip_config.validate()?;
    let mut chromatic = config.clone();
    chromatic.kernel = Kernel::ChromaticGibbs;
    let trace = crate::sampler::run(model, &chromatic)?;
    Ok(single_chip_report(trace, chip_config))
}

/// Wraps a single-chip trace (any kernel) in a [`RunReport`] with one chip,
/// no messages and the accounting of `chip_config`.
pub fn single_chip_report(trace: SampleTrace, chip_config: &ChipConfig) -> RunReport {
    let updates = trace.attempts;
    let mut report = RunReport {
        mode: RunMode::Ideal,
        k: 1,
        exchange_interval: 1,
        delivery_delay: 0,
        chips: vec![ChipStats {
            local_spins: trace.n,
            ghosts: 0,
            updates,
            rng_draws: trace.rng_draws,
            sleep_events: 0,
        }],
        trace,
        exchange_rounds: 0,
        directed_pairs: 0,
        messages: 0,
        boundary_bytes: 0,
        barrier_updates: updates,
        accounting: Accounting::default(),
        comparison: None,
    };
    report.accounting = account(&report, chip_config, &InterconnectConfig::default());
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChipStats {
    pub local_spins: usize,
    pub ghosts: usize,
    pub updates: u64,
    pub rng_draws: u64,
    /// Shutdown/wakeup transitions charged to this chip.
    pub sleep_events: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Accounting {
    pub wall_time_s: f64,
    pub energy_j: f64,
    /// Attempted spin updates per simulated second.
    pub flips_per_s: f64,
    pub rng_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: RunMode,
    pub k: usize,
    pub exchange_interval: u64,
    pub delivery_delay: u64,
    pub trace: SampleTrace,
    pub chips: Vec<ChipStats>,
    pub exchange_rounds: u64,
    pub directed_pairs: usize,
    pub messages: u64,
    pub boundary_bytes: u64,
    /// Sum over barrier segments of the busiest chip's updates.
    pub barrier_updates: u64,
    pub accounting: Accounting,
    pub comparison: Option<ComparisonReport>,
}

impl RunReport {
    pub fn total_updates(&self) -> u64 {
        self.chips.iter().map(|c| c.updates).sum()
    }
}

/// Simulated wall time, energy proxy and effective rates.
///
/// Compute time is the busiest chip's updates over the update rate; in
/// synchronous mode it is summed per barrier segment instead, since every
/// chip waits for the slowest one. Each exchange round adds the per-message
/// overhead. Energy charges active power while updating, idle power for the
/// rest of the wall time, and `latency * active power` per sleep transition.
pub fn account(
    report: &RunReport,
    chip: &ChipConfig,
    interconnect: &InterconnectConfig,
) -> Accounting {
    let rate = chip.update_rate;
    let compute_updates = match report.mode {
        RunMode::Asynchronous => report.chips.iter().map(|c| c.updates).max().unwrap_or(0),
        RunMode::Synchronous | RunMode::Ideal => report.barrier_updates,
    };
    let wall = compute_updates as f64 / rate
        + report.exchange_rounds as f64 * interconnect.message_overhead_s;

    let transition_j =
        0.5 * (chip.wakeup_latency_s + chip.shutdown_latency_s) * chip.active_power_w;
    let energy: f64 = report
        .chips
        .iter()
        .map(|c| {
            let active = c.updates as f64 / rate;
            let idle = (wall - active).max(0.0);
            active * chip.active_power_w
                + idle * chip.idle_power_w
                + c.sleep_events as f64 * transition_j
        })
        .sum();

    let (flips_per_s, rng_per_s) = if wall > 0.0 {
        (
            report.total_updates() as f64 / wall,
            report.trace.rng_draws as f64 / wall,
        )
    } else {
        (0.0, 0.0)
    };
    Accounting {
        wall_time_s: wall,
        energy_j: energy,
        flips_per_s,
        rng_per_s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{grid, random_model};
    use crate::partition::{partition, PartitionSpec};
    use crate::sampler::BetaSchedule;

    fn bisected_grid() -> (IsingModel, PartitionResult) {
        let g = grid(4, 4, 1.0);
        let p = partition(&g, &PartitionSpec::new(2).with_epsilon(0.0)).unwrap();
        (g, p)
    }

    fn cfg(sweeps: u64, seed: u64) -> SamplerConfig {
        SamplerConfig::new(
            Kernel::ChromaticGibbs,
            BetaSchedule::constant(0.4),
            sweeps,
            seed,
        )
    }

    #[test]
    fn single_chip_has_no_ghosts() {
        let m = random_model(8, 0.4, 1.0, 1);
        let p = partition(&m, &PartitionSpec::new(1)).unwrap();
        let s = IllusionSystem::build(
            &m,
            &p,
            &ChipConfig::default(),
            &InterconnectConfig::default(),
            ScheduleMode::Synchronous,
        )
        .unwrap();
        assert_eq!(s.chips().len(), 1);
        assert!(s.chips()[0].ghosts().is_empty());
        assert_eq!(s.directed_pairs(), 0);
    }

    #[test]
    fn bisected_grid_ghost_tables() {
        let (g, p) = bisected_grid();
        assert_eq!(p.cut_weight, 4.0);
        let s = IllusionSystem::build(
            &g,
            &p,
            &ChipConfig::with_capacity(8),
            &InterconnectConfig::default(),
            ScheduleMode::Synchronous,
        )
        .unwrap();
        for chip in s.chips() {
            assert_eq!(chip.spins().len(), 8);
            assert_eq!(chip.ghosts().len(), 4);
            assert_eq!(chip.ghost_values().len(), 4);
            // Ghosts are exactly the remote endpoints of cut couplings.
            let mut expected: Vec<usize> = g
                .couplings()
                .iter()
                .filter(|&&(i, j, _)| p.assignment[i] != p.assignment[j])
                .flat_map(|&(i, j, _)| [i, j])
                .filter(|v| !chip.spins().contains(v))
                .collect();
            expected.sort_unstable();
            expected.dedup();
            assert_eq!(chip.ghosts(), expected.as_slice());
        }
        assert_eq!(s.directed_pairs(), 2);
    }

    #[test]
    fn over_capacity_names_the_chip() {
        let m = random_model(17, 0.3, 1.0, 2);
        let mut assignment = vec![1; 8];
        assignment.extend([0; 9]);
        let p = PartitionResult {
            k: 2,
            assignment,
            cut_weight: 0.0,
            part_sizes: vec![9, 8],
            max_part_size: 9,
        };
        let err = IllusionSystem::build(
            &m,
            &p,
            &ChipConfig::with_capacity(8),
            &InterconnectConfig::default(),
            ScheduleMode::Synchronous,
        )
        .unwrap_err();
        match err {
            Error::Capacity(msg) => assert!(msg.contains("chip 0"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let (g, p) = bisected_grid();
        let s = IllusionSystem::build(
            &g,
            &p,
            &ChipConfig::default(),
            &InterconnectConfig::default(),
            ScheduleMode::Synchronous,
        )
        .unwrap();
        assert!(matches!(s.async_run(&cfg(10, 1)), Err(Error::Contract(_))));
        let a = IllusionSystem::build(
            &g,
            &p,
            &ChipConfig::default(),
            &InterconnectConfig::default(),
            ScheduleMode::Asynchronous,
        )
        .unwrap();
        assert!(matches!(a.sync_run(&cfg(10, 1)), Err(Error::Contract(_))));
    }

    #[test]
    fn sync_tau_one_matches_ideal() {
        let (g, p) = bisected_grid();
        let s = IllusionSystem::build(
            &g,
            &p,
            &ChipConfig::default(),
            &InterconnectConfig::default(),
            ScheduleMode::Synchronous,
        )
        .unwrap();
        let c = cfg(300, 5).recording_states();
        let ideal = ideal_reference_run(&g, &c, &ChipConfig::default()).unwrap();
        let dist = s.sync_run(&c).unwrap();
        assert_eq!(dist.trace, ideal.trace);
    }

    #[test]
    fn message_count_example() {
        let (g, p) = bisected_grid();
        let ic = InterconnectConfig::new(10, 0);
        let s = IllusionSystem::build(
            &g,
            &p,
            &ChipConfig::default(),
            &ic,
            ScheduleMode::Synchronous,
        )
        .unwrap();
        let r = s.sync_run(&cfg(100, 1)).unwrap();
        assert_eq!(r.exchange_rounds, 10);
        assert_eq!(r.messages, 20);
        assert_eq!(r.boundary_bytes, 10 * 8);
    }

    #[test]
    fn ghosts_record_refresh_sweep() {
        let (g, p) = bisected_grid();
        let mut s = IllusionSystem::build(
            &g,
            &p,
            &ChipConfig::default(),
            &InterconnectConfig::default(),
            ScheduleMode::Synchronous,
        )
        .unwrap();
        assert!(s
            .chips()
            .iter()
            .all(|c| c.ghost_refreshed().iter().all(|&t| t == 0)));
        let up = SpinState::all_up(16);
        s.load_state(&up).unwrap();
        assert_eq!(s.global_state(), up);
        assert!(s
            .chips()
            .iter()
            .all(|c| c.ghost_values().iter().all(|&v| v == 1)));
    }

    #[test]
    fn one_chip_accounting_example() {
        // 10^4 sweeps of 100 spins = 10^6 updates at 10^10/s and 10 W.
        let m = grid(10, 10, 1.0);
        let r = ideal_reference_run(&m, &cfg(10_000, 3), &ChipConfig::default()).unwrap();
        assert_eq!(r.total_updates(), 1_000_000);
        assert!((r.accounting.wall_time_s - 1e-4).abs() < 1e-15);
        assert!((r.accounting.energy_j - 1e-3).abs() < 1e-15);
        assert!((r.accounting.flips_per_s - 1e10).abs() < 1.0);
        assert_eq!(r.messages, 0);
    }

    #[test]
    fn two_balanced_chips_halve_wall_time() {
        let (g, p) = bisected_grid();
        let ideal = ideal_reference_run(&g, &cfg(1000, 1), &ChipConfig::default()).unwrap();
        let s = IllusionSystem::build(
            &g,
            &p,
            &ChipConfig::default(),
            &InterconnectConfig::default(),
            ScheduleMode::Synchronous,
        )
        .unwrap();
        let r = s.sync_run(&cfg(1000, 1)).unwrap();
        assert_eq!(r.barrier_updates * 2, ideal.barrier_updates);
        assert!((r.accounting.wall_time_s * 2.0 - ideal.accounting.wall_time_s).abs() < 1e-18);
    }

    #[test]
    fn message_overhead_favours_longer_intervals() {
        let (g, p) = bisected_grid();
        let wall = |tau| {
            let ic = InterconnectConfig {
                message_overhead_s: 1e-7,
                ..InterconnectConfig::new(tau, 0)
            };
            let s = IllusionSystem::build(
                &g,
                &p,
                &ChipConfig::default(),
                &ic,
                ScheduleMode::Synchronous,
            )
            .unwrap();
            s.sync_run(&cfg(200, 1)).unwrap().accounting.wall_time_s
        };
        assert!(wall(10) < wall(1));
    }
}
