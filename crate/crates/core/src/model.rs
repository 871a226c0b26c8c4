//! Pairwise Ising models, spin configurations and the exhaustive oracles.
//!
//! Energy convention, fixed across the whole workspace:
//!
//! ```text
//! E(s) = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i
//! ```
//!
//! so a positive coupling favours aligned spins. The local field of spin `i`
//! is `I_i = sum_j J_ij s_j + h_i`, which gives `E(s_i=-1) - E(s_i=+1) = 2 I_i`.
//!
//! States are indexed by their bit encoding: bit `i` is set iff spin `i` is `+1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest model the exhaustive oracles accept (2^24 doubles is 128 MiB).
pub const MAX_EXACT_SPINS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    n: usize,
    biases: Vec<f64>,
    /// Canonical `(i, j, J_ij)` with `i < j`, sorted.
    couplings: Vec<(usize, usize, f64)>,
    /// Per-spin neighbour lists sorted by neighbour index.
    adjacency: Vec<Vec<(usize, f64)>>,
}

/// Incremental constructor; validation happens in [`ModelBuilder::build`].
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    n: usize,
    biases: Vec<f64>,
    couplings: Vec<(usize, usize, f64)>,
}

impl ModelBuilder {
    pub fn bias(mut self, i: usize, value: f64) -> Self {
        if i < self.n {
            self.biases[i] = value;
        } else {
            // Let build() report it.
            self.couplings.push((i, i, value));
        }
        self
    }

    pub fn coupling(mut self, i: usize, j: usize, value: f64) -> Self {
        self.couplings.push((i, j, value));
        self
    }

    pub fn build(self) -> Result<IsingModel> {
        IsingModel::new(self.n, self.biases, self.couplings)
    }
}

impl IsingModel {
    /// Builds a model from biases and a list of couplings given in either
    /// orientation. Rejects self-couplings, out-of-range indices, duplicate
    /// pairs and non-finite weights.
    pub fn new(
        n: usize,
        biases: Vec<f64>,
        couplings: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::contract("model must have at least one spin"));
        }
        if biases.len() != n {
            return Err(Error::contract(format!(
                "expected {n} biases, got {}",
                biases.len()
            )));
        }
        if let Some(i) = biases.iter().position(|h| !h.is_finite()) {
            return Err(Error::contract(format!("bias h_{i} is not finite")));
        }

        let mut canonical = Vec::new();
        for (i, j, value) in couplings {
            if i >= n || j >= n {
                return Err(Error::contract(format!(
                    "coupling ({i},{j}) out of range for n={n}"
                )));
            }
            if i == j {
                return Err(Error::contract(format!("self-coupling on spin {i}")));
            }
            if !value.is_finite() {
                return Err(Error::contract(format!("coupling ({i},{j}) is not finite")));
            }
            canonical.push((i.min(j), i.max(j), value));
        }
        canonical.sort_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = canonical
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(Error::contract(format!(
                "duplicate coupling ({},{})",
                w[0].0, w[0].1
            )));
        }

        let mut adjacency = vec![Vec::new(); n];
        for &(i, j, value) in &canonical {
            adjacency[i].push((j, value));
            adjacency[j].push((i, value));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(j, _)| j);
        }

        Ok(Self {
            n,
            biases,
            couplings: canonical,
            adjacency,
        })
    }

    pub fn builder(n: usize) -> ModelBuilder {
        ModelBuilder {
            n,
            biases: vec![0.0; n],
            couplings: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    /// Couplings as `(i, j, J_ij)` with `i < j`, sorted.
    pub fn couplings(&self) -> &[(usize, usize, f64)] {
        &self.couplings
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `J_ij`, symmetric in its arguments; zero when the pair is uncoupled.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        if i >= self.n || j >= self.n {
            return 0.0;
        }
        self.adjacency[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .map(|pos| self.adjacency[i][pos].1)
            .unwrap_or(0.0)
    }

    fn check_state(&self, state: &SpinState) -> Result<()> {
        if state.len() != self.n {
            return Err(Error::contract(format!(
                "state has {} spins, model has {}",
                state.len(),
                self.n
            )));
        }
        Ok(())
    }

    pub fn energy(&self, state: &SpinState) -> Result<f64> {
        self.check_state(state)?;
        Ok(self.energy_of(state.as_slice()))
    }

    /// Energy of a raw spin slice; the caller guarantees the length.
    pub fn energy_of(&self, spins: &[i8]) -> f64 {
        let mut pair = 0.0;
        for &(i, j, value) in &self.couplings {
            pair += value * f64::from(spins[i]) * f64::from(spins[j]);
        }
        let mut field = 0.0;
        for (h, &s) in self.biases.iter().zip(spins) {
            field += h * f64::from(s);
        }
        -pair - field
    }

    pub fn local_field(&self, state: &SpinState, i: usize) -> Result<f64> {
        self.check_state(state)?;
        if i >= self.n {
            return Err(Error::contract(format!(
                "spin index {i} out of range for n={}",
                self.n
            )));
        }
        Ok(self.field_of(state.as_slice(), i))
    }

    /// Local field on a raw spin slice. Summation runs over neighbours in
    /// ascending index order; chip-local evaluation relies on that order to
    /// reproduce this value bit-for-bit.
    pub fn field_of(&self, spins: &[i8], i: usize) -> f64 {
        let mut acc = 0.0;
        for &(j, value) in &self.adjacency[i] {
            acc += value * f64::from(spins[j]);
        }
        acc + self.biases[i]
    }

    fn check_exact_size(&self) -> Result<()> {
        if self.n > MAX_EXACT_SPINS {
            return Err(Error::capacity(format!(
                "exact enumeration limited to {MAX_EXACT_SPINS} spins, model has {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Energy of every state in bit-encoding order.
    pub fn all_energies(&self) -> Result<Vec<f64>> {
        self.check_exact_size()?;
        let count = 1usize << self.n;
        let mut spins = vec![-1i8; self.n];
        let mut energies = Vec::with_capacity(count);
        for index in 0..count {
            for (bit, s) in spins.iter_mut().enumerate() {
                *s = if index >> bit & 1 == 1 { 1 } else { -1 };
            }
            energies.push(self.energy_of(&spins));
        }
        Ok(energies)
    }

    pub fn exact_boltzmann(&self, beta: f64) -> Result<ExactDistribution> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::contract(format!(
                "beta must be positive, got {beta}"
            )));
        }
        let energies = self.all_energies()?;
        Ok(ExactDistribution {
            n: self.n,
            beta,
            probabilities: boltzmann_weights(&energies, beta),
        })
    }

    pub fn ground_states(&self) -> Result<GroundStates> {
        let energies = self.all_energies()?;
        let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = 1e-9 * min.abs().max(1.0);
        let states = energies
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e <= min + tol)
            .map(|(index, _)| SpinState::from_index(index as u64, self.n))
            .collect();
        Ok(GroundStates {
            energy: min,
            states,
        })
    }
}

/// Normalised `exp(-beta * E)` over the given energies, shifted by the
/// minimum energy before exponentiation so nothing overflows.
pub fn boltzmann_weights(energies: &[f64], beta: f64) -> Vec<f64> {
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let mut weights: Vec<f64> = energies
        .iter()
        .map(|&e| (-beta * (e - min)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    weights
}

/// A configuration of `±1` spins.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpinState(Vec<i8>);

impl SpinState {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(i) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::contract(format!(
                "spin {i} has value {}, expected ±1",
                spins[i]
            )));
        }
        Ok(Self(spins))
    }

    pub fn all_down(n: usize) -> Self {
        Self(vec![-1; n])
    }

    pub fn all_up(n: usize) -> Self {
        Self(vec![1; n])
    }

    /// Decodes a bit-encoded state index (bit `i` set means spin `i` is `+1`).
    pub fn from_index(index: u64, n: usize) -> Self {
        Self(
            (0..n)
                .map(|bit| if index >> bit & 1 == 1 { 1 } else { -1 })
                .collect(),
        )
    }

    pub fn index(&self) -> u64 {
        encode_index(&self.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, value: i8) {
        debug_assert!(value == 1 || value == -1);
        self.0[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|&s| -s).collect())
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [i8] {
        &mut self.0
    }
}

/// Bit encoding of a spin slice with at most 64 spins.
pub fn encode_index(spins: &[i8]) -> u64 {
    debug_assert!(spins.len() <= 64);
    spins
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s == 1)
        .fold(0u64, |acc, (bit, _)| acc | 1 << bit)
}

/// The Boltzmann distribution of a small model, by exhaustive enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    n: usize,
    beta: f64,
    probabilities: Vec<f64>,
}

impl ExactDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Probabilities indexed by state bit encoding.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, state: &SpinState) -> f64 {
        self.probabilities[state.index() as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStates {
    pub energy: f64,
    pub states: Vec<SpinState>,
}

impl GroundStates {
    pub fn indices(&self) -> Vec<u64> {
        self.states.iter().map(SpinState::index).collect()
    }
}
