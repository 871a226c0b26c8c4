//! Gibbs (heat-bath / p-bit) samplers over an [`IsingModel`].
//!
//! Two kernels share one update rule: sequential sweeps in ascending spin
//! order, and chromatic sweeps where each colour class of a proper colouring
//! is updated as one independent set. All randomness comes from per-spin
//! counter-based streams (see [`crate::rng`]), exactly one uniform per update.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{encode_index, IsingModel, SpinState, MAX_EXACT_SPINS};
use crate::rng::{derive_seed, spin_streams, uniform_at, SpinStream, INIT_STREAM};

/// Colour classes smaller than this are updated on the calling thread even
/// when parallel execution is enabled; the output is identical either way.
pub const PARALLEL_MIN_CLASS: usize = 2048;

/// Probability that the heat-bath update sets the spin to `+1`.
pub fn gibbs_probability(field: f64, beta: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * beta * field).exp())
}

/// Heat-bath update from a precomputed local field: `+1` iff `u < p`.
#[inline]
pub fn heat_bath(field: f64, beta: f64, u: f64) -> i8 {
    if u < gibbs_probability(field, beta) {
        1
    } else {
        -1
    }
}

/// The p-bit form of the same update: `sign(tanh(beta * I) - (2u - 1))`.
pub fn pbit_update(field: f64, beta: f64, u: f64) -> i8 {
    if (beta * field).tanh() - (2.0 * u - 1.0) > 0.0 {
        1
    } else {
        -1
    }
}

/// New value of spin `i` given the uniform draw `u`.
pub fn gibbs_update(
    model: &IsingModel,
    state: &SpinState,
    i: usize,
    beta: f64,
    u: f64,
) -> Result<i8> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::contract(format!("uniform draw {u} outside [0,1)")));
    }
    check_beta(beta)?;
    let field = model.local_field(state, i)?;
    Ok(heat_bath(field, beta, u))
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::contract(format!(
            "beta must be positive and finite, got {beta}"
        )))
    }
}

/// Update counts of one or more sweeps. RNG draws always equal `attempts`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub attempts: u64,
    pub accepted: u64,
}

impl std::ops::AddAssign for SweepStats {
    fn add_assign(&mut self, rhs: Self) {
        self.attempts += rhs.attempts;
        self.accepted += rhs.accepted;
    }
}

fn check_streams(model: &IsingModel, state: &SpinState, streams: &[SpinStream]) -> Result<()> {
    if state.len() != model.n() || streams.len() != model.n() {
        return Err(Error::contract(format!(
            "state ({}) and streams ({}) must match model size {}",
            state.len(),
            streams.len(),
            model.n()
        )));
    }
    Ok(())
}

/// Updates spins `0..n` in order, each seeing all earlier updates.
pub fn sequential_sweep(
    model: &IsingModel,
    state: &mut SpinState,
    beta: f64,
    streams: &mut [SpinStream],
) -> Result<SweepStats> {
    check_streams(model, state, streams)?;
    check_beta(beta)?;
    Ok(sequential_sweep_unchecked(
        model,
        state.as_mut_slice(),
        beta,
        streams,
    ))
}

fn sequential_sweep_unchecked(
    model: &IsingModel,
    spins: &mut [i8],
    beta: f64,
    streams: &mut [SpinStream],
) -> SweepStats {
    let mut accepted = 0;
    for i in 0..spins.len() {
        let u = streams[i].next_uniform();
        let new = heat_bath(model.field_of(spins, i), beta, u);
        if new != spins[i] {
            spins[i] = new;
            accepted += 1;
        }
    }
    SweepStats {
        attempts: spins.len() as u64,
        accepted,
    }
}

/// A proper vertex colouring of the coupling graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    colors: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl Coloring {
    /// Wraps an explicit colour assignment. Properness is checked against a
    /// model with [`Coloring::validate`].
    pub fn new(colors: Vec<usize>) -> Self {
        let count = colors.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut classes = vec![Vec::new(); count];
        for (i, &c) in colors.iter().enumerate() {
            classes[c].push(i);
        }
        Self { colors, classes }
    }

    pub fn color(&self, i: usize) -> usize {
        self.colors[i]
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn num_colors(&self) -> usize {
        self.classes.len()
    }

    /// Spins of each colour, ascending.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn validate(&self, model: &IsingModel) -> Result<()> {
        if self.colors.len() != model.n() {
            return Err(Error::contract(format!(
                "colouring covers {} spins, model has {}",
                self.colors.len(),
                model.n()
            )));
        }
        if let Some(&(i, j, _)) = model
            .couplings()
            .iter()
            .find(|&&(i, j, _)| self.colors[i] == self.colors[j])
        {
            return Err(Error::contract(format!(
                "improper colouring: coupled spins {i} and {j} share colour {}",
                self.colors[i]
            )));
        }
        Ok(())
    }
}

/// Largest-degree-first greedy colouring; ties go to the lower index.
pub fn greedy_coloring(model: &IsingModel) -> Coloring {
    let n = model.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(model.degree(i)), i));

    let mut colors = vec![usize::MAX; n];
    let mut taken = Vec::new();
    for &i in &order {
        taken.clear();
        taken.resize(model.degree(i) + 1, false);
        for &(j, _) in model.neighbors(i) {
            let c = colors[j];
            if c < taken.len() {
                taken[c] = true;
            }
        }
        colors[i] = taken.iter().position(|&t| !t).expect("degree+1 slots");
    }
    Coloring::new(colors)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

/// Updates one colour class. Each spin reads only spins of other colours and
/// draws from its own stream, so serial and parallel execution agree bitwise.
pub fn color_phase(
    model: &IsingModel,
    spins: &mut [i8],
    beta: f64,
    class: &[usize],
    streams: &mut [SpinStream],
    execution: Execution,
) -> u64 {
    let draws: Vec<f64> = class.iter().map(|&i| streams[i].next_uniform()).collect();
    let read: &[i8] = spins;
    let new: Vec<i8> = match execution {
        Execution::Serial => class
            .iter()
            .zip(&draws)
            .map(|(&i, &u)| heat_bath(model.field_of(read, i), beta, u))
            .collect(),
        Execution::Parallel => class
            .par_iter()
            .zip(draws.par_iter())
            .map(|(&i, &u)| heat_bath(model.field_of(read, i), beta, u))
            .collect(),
    };
    let mut accepted = 0;
    for (&i, s) in class.iter().zip(new) {
        if spins[i] != s {
            spins[i] = s;
            accepted += 1;
        }
    }
    accepted
}

/// One sweep over all colour classes in ascending colour order.
pub fn chromatic_sweep(
    model: &IsingModel,
    state: &mut SpinState,
    beta: f64,
    coloring: &Coloring,
    streams: &mut [SpinStream],
    execution: Execution,
) -> Result<SweepStats> {
    check_streams(model, state, streams)?;
    check_beta(beta)?;
    coloring.validate(model)?;
    Ok(chromatic_sweep_unchecked(
        model,
        state.as_mut_slice(),
        beta,
        coloring,
        streams,
        execution,
    ))
}

fn chromatic_sweep_unchecked(
    model: &IsingModel,
    spins: &mut [i8],
    beta: f64,
    coloring: &Coloring,
    streams: &mut [SpinStream],
    execution: Execution,
) -> SweepStats {
    let mut stats = SweepStats::default();
    for class in coloring.classes() {
        let exec = if class.len() >= PARALLEL_MIN_CLASS {
            execution
        } else {
            Execution::Serial
        };
        stats.accepted += color_phase(model, spins, beta, class, streams, exec);
        stats.attempts += class.len() as u64;
    }
    stats
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    SequentialGibbs,
    ChromaticGibbs,
}

/// Inverse temperature per sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BetaSchedule {
    Constant { beta: f64 },
    Linear { start: f64, end: f64 },
    Geometric { start: f64, end: f64 },
}

impl BetaSchedule {
    pub fn constant(beta: f64) -> Self {
        BetaSchedule::Constant { beta }
    }

    /// Beta used for sweep `t` of `total` (0-based); anneals hit `end` on the
    /// last sweep.
    pub fn beta_at(&self, t: u64, total: u64) -> f64 {
        let frac = if total <= 1 {
            0.0
        } else {
            t as f64 / (total - 1) as f64
        };
        match *self {
            BetaSchedule::Constant { beta } => beta,
            BetaSchedule::Linear { start, end } => start + (end - start) * frac,
            BetaSchedule::Geometric { start, end } => start * (end / start).powf(frac),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            BetaSchedule::Constant { beta } => check_beta(beta),
            BetaSchedule::Linear { start, end } | BetaSchedule::Geometric { start, end } => {
                check_beta(start)?;
                check_beta(end)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    AllDown,
    AllUp,
    /// Fair coin per spin from the reserved initial-state stream.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub kernel: Kernel,
    pub schedule: BetaSchedule,
    /// Total sweeps, burn-in included.
    pub sweeps: u64,
    pub burn_in: u64,
    pub thinning: u64,
    pub seed: u64,
    pub initial: InitialState,
    /// Keep every recorded state, not only the histogram.
    pub record_states: bool,
    /// Sweep counts after which the histogram is snapshotted.
    #[serde(default)]
    pub snapshot_at: Vec<u64>,
    /// Allow large colour classes (and chips) to run on worker threads.
    #[serde(default)]
    pub parallel: bool,
}

impl SamplerConfig {
    pub fn new(kernel: Kernel, schedule: BetaSchedule, sweeps: u64, seed: u64) -> Self {
        Self {
            kernel,
            schedule,
            sweeps,
            burn_in: 0,
            thinning: 1,
            seed,
            initial: InitialState::Random,
            record_states: false,
            snapshot_at: Vec::new(),
            parallel: false,
        }
    }

    pub fn with_burn_in(mut self, burn_in: u64) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_thinning(mut self, thinning: u64) -> Self {
        self.thinning = thinning;
        self
    }

    pub fn with_initial(mut self, initial: InitialState) -> Self {
        self.initial = initial;
        self
    }

    pub fn recording_states(mut self) -> Self {
        self.record_states = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::contract("sweeps must be at least 1"));
        }
        if self.burn_in >= self.sweeps {
            return Err(Error::contract(format!(
                "burn-in {} must be smaller than total sweeps {}",
                self.burn_in, self.sweeps
            )));
        }
        if self.thinning == 0 {
            return Err(Error::contract("thinning must be at least 1"));
        }
        self.schedule.validate()
    }

    pub fn beta_at(&self, t: u64) -> f64 {
        self.schedule.beta_at(t, self.sweeps)
    }

    pub fn initial_state(&self, n: usize) -> SpinState {
        match self.initial {
            InitialState::AllDown => SpinState::all_down(n),
            InitialState::AllUp => SpinState::all_up(n),
            InitialState::Random => {
                let spins = (0..n)
                    .map(|i| {
                        if uniform_at(self.seed, INIT_STREAM, i as u64) < 0.5 {
                            1
                        } else {
                            -1
                        }
                    })
                    .collect();
                SpinState::new(spins).expect("±1 by construction")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramSnapshot {
    pub sweeps: u64,
    pub histogram: BTreeMap<u64, u64>,
}

/// Everything a run observed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTrace {
    pub n: usize,
    pub sweeps: u64,
    /// Recorded-state counts by bit-encoded index; present when n ≤ 24.
    pub histogram: Option<BTreeMap<u64, u64>>,
    /// Full state log, present only when requested.
    pub states: Option<Vec<SpinState>>,
    pub recorded: u64,
    /// Energy after every sweep, burn-in included.
    pub energies: Vec<f64>,
    pub rng_draws: u64,
    pub attempts: u64,
    pub accepted_flips: u64,
    pub best_energy: f64,
    pub best_state: SpinState,
    pub final_state: SpinState,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<HistogramSnapshot>,
}

impl SampleTrace {
    pub fn final_energy(&self) -> f64 {
        *self.energies.last().expect("at least one sweep")
    }
}

/// Shared bookkeeping for every engine that produces a [`SampleTrace`]: the
/// single-chip kernels here and the multi-chip simulator.
pub(crate) struct Recorder {
    n: usize,
    burn_in: u64,
    thinning: u64,
    histogram: Option<BTreeMap<u64, u64>>,
    states: Option<Vec<SpinState>>,
    recorded: u64,
    energies: Vec<f64>,
    best_energy: f64,
    best_state: Vec<i8>,
    snapshot_at: Vec<u64>,
    snapshots: Vec<HistogramSnapshot>,
    stats: SweepStats,
}

impl Recorder {
    pub(crate) fn new(n: usize, config: &SamplerConfig) -> Self {
        let mut snapshot_at = config.snapshot_at.clone();
        snapshot_at.sort_unstable();
        snapshot_at.dedup();
        Self {
            n,
            burn_in: config.burn_in,
            thinning: config.thinning,
            histogram: (n <= MAX_EXACT_SPINS).then(BTreeMap::new),
            states: config.record_states.then(Vec::new),
            recorded: 0,
            energies: Vec::with_capacity(config.sweeps.min(1 << 24) as usize),
            best_energy: f64::INFINITY,
            best_state: Vec::new(),
            snapshot_at,
            snapshots: Vec::new(),
            stats: SweepStats::default(),
        }
    }

    /// Called after sweep `t` (0-based) with the full global state.
    pub(crate) fn observe(&mut self, t: u64, spins: &[i8], energy: f64, stats: SweepStats) {
        self.stats += stats;
        self.energies.push(energy);
        if energy < self.best_energy {
            self.best_energy = energy;
            self.best_state = spins.to_vec();
        }
        if t >= self.burn_in && (t - self.burn_in).is_multiple_of(self.thinning) {
            self.recorded += 1;
            if let Some(h) = &mut self.histogram {
                *h.entry(encode_index(spins)).or_insert(0) += 1;
            }
            if let Some(states) = &mut self.states {
                states.push(SpinState::new(spins.to_vec()).expect("valid spins"));
            }
        }
        if self.snapshot_at.binary_search(&(t + 1)).is_ok() {
            if let Some(h) = &self.histogram {
                self.snapshots.push(HistogramSnapshot {
                    sweeps: t + 1,
                    histogram: h.clone(),
                });
            }
        }
    }

    pub(crate) fn finish(self, final_spins: &[i8]) -> SampleTrace {
        SampleTrace {
            n: self.n,
            sweeps: self.energies.len() as u64,
            histogram: self.histogram,
            states: self.states,
            recorded: self.recorded,
            energies: self.energies,
            rng_draws: self.stats.attempts,
            attempts: self.stats.attempts,
            accepted_flips: self.stats.accepted,
            best_energy: self.best_energy,
            best_state: SpinState::new(self.best_state).expect("valid spins"),
            final_state: SpinState::new(final_spins.to_vec()).expect("valid spins"),
            snapshots: self.snapshots,
        }
    }
}

/// Runs one chain. The result depends only on `(model, config)`.
pub fn run(model: &IsingModel, config: &SamplerConfig) -> Result<SampleTrace> {
    config.validate()?;
    let n = model.n();
    let mut state = config.initial_state(n);
    let mut streams = spin_streams(config.seed, 0..n);
    let coloring = match config.kernel {
        Kernel::ChromaticGibbs => Some(greedy_coloring(model)),
        Kernel::SequentialGibbs => None,
    };
    let execution = if config.parallel {
        Execution::Parallel
    } else {
        Execution::Serial
    };

    let mut recorder = Recorder::new(n, config);
    for t in 0..config.sweeps {
        let beta = config.beta_at(t);
        let spins = state.as_mut_slice();
        let stats = match &coloring {
            Some(c) => chromatic_sweep_unchecked(model, spins, beta, c, &mut streams, execution),
            None => sequential_sweep_unchecked(model, spins, beta, &mut streams),
        };
        let energy = model.energy_of(spins);
        recorder.observe(t, spins, energy, stats);
    }
    Ok(recorder.finish(state.as_slice()))
}

/// Independent chains with seeds derived from `config.seed`, run in parallel.
pub fn run_restarts(
    model: &IsingModel,
    config: &SamplerConfig,
    restarts: usize,
) -> Result<Vec<SampleTrace>> {
    config.validate()?;
    (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut c = config.clone();
            c.seed = derive_seed(config.seed, r as u64);
            run(model, &c)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{chain, grid, random_model};

    #[test]
    fn unbiased_coin_at_zero_field() {
        assert_eq!(heat_bath(0.0, 1.0, 0.49), 1);
        assert_eq!(heat_bath(0.0, 1.0, 0.51), -1);
        assert_eq!(heat_bath(0.0, 3.0, 0.5), -1);
    }

    #[test]
    fn saturated_field() {
        assert_eq!(heat_bath(10.0, 1.0, 0.999), 1);
        let p = gibbs_probability(10.0, 1.0);
        assert!((p - (1.0 - 2e-9)).abs() < 1e-10);
        assert_eq!(heat_bath(-1e6, 1e6, 0.0), -1);
    }

    #[test]
    fn logistic_example() {
        let p = gibbs_probability(1.0, 0.5);
        assert!((p - 0.73106).abs() < 1e-5);
        assert_eq!(heat_bath(1.0, 0.5, 0.73), 1);
        assert_eq!(heat_bath(1.0, 0.5, 0.74), -1);
    }

    #[test]
    fn checked_update_validates_inputs() {
        let m = chain(2, 1.0);
        let s = SpinState::all_up(2);
        assert_eq!(gibbs_update(&m, &s, 0, 1.0, 0.2).unwrap(), 1);
        assert!(gibbs_update(&m, &s, 0, 1.0, 1.0).is_err());
        assert!(gibbs_update(&m, &s, 0, 0.0, 0.5).is_err());
        assert!(gibbs_update(&m, &s, 2, 1.0, 0.5).is_err());
    }

    #[test]
    fn frozen_chain_propagates_left_to_right() {
        // With uniform couplings a middle spin sees +J from the left and -J
        // from the right, a zero field; decreasing couplings keep every
        // field positive once the left neighbour has flipped.
        let mut h = vec![0.0; 6];
        h[0] = 10.0;
        let m = IsingModel::new(6, h, (0..5).map(|i| (i, i + 1, (6 - i) as f64))).unwrap();
        let mut s = SpinState::all_down(6);
        let mut streams = spin_streams(7, 0..6);
        let stats = sequential_sweep(&m, &mut s, 1e6, &mut streams).unwrap();
        assert_eq!(s, SpinState::all_up(6));
        assert_eq!(stats.attempts, 6);
        assert!(streams.iter().all(|st| st.counter() == 1));
    }

    #[test]
    fn single_spin_is_fair() {
        let m = IsingModel::builder(1).build().unwrap();
        let trace = run(
            &m,
            &SamplerConfig::new(
                Kernel::SequentialGibbs,
                BetaSchedule::constant(1.0),
                100_000,
                3,
            ),
        )
        .unwrap();
        let h = trace.histogram.unwrap();
        let up = h.get(&1).copied().unwrap_or(0) as f64 / trace.recorded as f64;
        assert!((up - 0.5).abs() < 0.01, "{up}");
    }

    #[test]
    fn draw_accounting() {
        let m = random_model(7, 0.4, 1.0, 1);
        for kernel in [Kernel::SequentialGibbs, Kernel::ChromaticGibbs] {
            let trace = run(
                &m,
                &SamplerConfig::new(kernel, BetaSchedule::constant(0.7), 123, 5),
            )
            .unwrap();
            assert_eq!(trace.rng_draws, 123 * 7);
            assert_eq!(trace.attempts, trace.rng_draws);
            assert_eq!(trace.energies.len(), 123);
        }
    }

    #[test]
    fn grid_gets_checkerboard() {
        let g = grid(4, 4, 1.0);
        let c = greedy_coloring(&g);
        assert_eq!(c.num_colors(), 2);
        c.validate(&g).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let i = r * 4 + col;
                assert_eq!(c.color(i) == c.color(0), (r + col) % 2 == 0);
            }
        }
    }

    #[test]
    fn coloring_small_cases() {
        let edgeless = IsingModel::builder(5).build().unwrap();
        assert_eq!(greedy_coloring(&edgeless).num_colors(), 1);
        let tri = crate::generators::clique(3, 1.0);
        assert_eq!(greedy_coloring(&tri).num_colors(), 3);
        let m = random_model(30, 0.2, 1.0, 4);
        let c = greedy_coloring(&m);
        c.validate(&m).unwrap();
        assert!(c.num_colors() <= m.max_degree() + 1);
    }

    #[test]
    fn chromatic_rejects_improper_coloring() {
        let m = chain(2, 1.0);
        let mut s = SpinState::all_up(2);
        let mut streams = spin_streams(1, 0..2);
        let bad = Coloring::new(vec![0, 0]);
        assert!(matches!(
            chromatic_sweep(&m, &mut s, 1.0, &bad, &mut streams, Execution::Serial),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn two_spin_chromatic_equals_sequential() {
        let m = chain(2, 1.0);
        let seq = run(
            &m,
            &SamplerConfig::new(Kernel::SequentialGibbs, BetaSchedule::constant(0.8), 500, 9)
                .recording_states(),
        )
        .unwrap();
        let chr = run(
            &m,
            &SamplerConfig::new(Kernel::ChromaticGibbs, BetaSchedule::constant(0.8), 500, 9)
                .recording_states(),
        )
        .unwrap();
        assert_eq!(seq, chr);
    }

    #[test]
    fn config_validation() {
        let base = SamplerConfig::new(Kernel::SequentialGibbs, BetaSchedule::constant(1.0), 10, 0);
        assert!(base.validate().is_ok());
        assert!(SamplerConfig {
            sweeps: 0,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(base.clone().with_burn_in(10).validate().is_err());
        assert!(base.clone().with_thinning(0).validate().is_err());
        assert!(SamplerConfig {
            schedule: BetaSchedule::Geometric {
                start: 0.0,
                end: 1.0
            },
            ..base
        }
        .validate()
        .is_err());
    }

    #[test]
    fn schedules_hit_endpoints() {
        let lin = BetaSchedule::Linear {
            start: 0.1,
            end: 5.0,
        };
        let geo = BetaSchedule::Geometric {
            start: 0.1,
            end: 5.0,
        };
        assert_eq!(lin.beta_at(0, 11), 0.1);
        assert!((lin.beta_at(10, 11) - 5.0).abs() < 1e-12);
        assert!((lin.beta_at(5, 11) - 2.55).abs() < 1e-12);
        assert!((geo.beta_at(10, 11) - 5.0).abs() < 1e-12);
        assert!((geo.beta_at(5, 11) - (0.5f64).sqrt()).abs() < 1e-12);
        assert_eq!(geo.beta_at(0, 1), 0.1);
    }

    #[test]
    fn thinning_and_burn_in() {
        let m = random_model(5, 0.5, 1.0, 2);
        let cfg = SamplerConfig::new(Kernel::SequentialGibbs, BetaSchedule::constant(1.0), 100, 1)
            .with_burn_in(10)
            .with_thinning(3)
            .recording_states();
        let t = run(&m, &cfg).unwrap();
        // Sweeps 10, 13, ..., 97 are kept.
        assert_eq!(t.recorded, 30);
        assert_eq!(t.states.as_ref().unwrap().len(), 30);
        assert_eq!(t.histogram.unwrap().values().sum::<u64>(), 30);
    }
}
