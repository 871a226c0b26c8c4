//! Seeded instance generators used by tests, benches and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::model::IsingModel;

/// Seed of the fixed instance the staleness experiments are calibrated on.
pub const CALIBRATION_SEED: u64 = 2024;

/// Erdős–Rényi coupling graph: each pair is coupled with probability
/// `density`, `J_ij ~ N(0,1)`, and `h_i ~ N(0, field_scale^2)`.
pub fn random_model(n: usize, density: f64, field_scale: f64, seed: u64) -> IsingModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut couplings = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                let w: f64 = rng.sample(StandardNormal);
                couplings.push((i, j, w));
            }
        }
    }
    let biases = (0..n)
        .map(|_| field_scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    IsingModel::new(n, biases, couplings).expect("generated model is valid")
}

/// Random graph with `|N(0,1)|` edge weights and no fields; the partitioner's
/// benchmark family.
pub fn random_weighted_graph(n: usize, density: f64, seed: u64) -> IsingModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut couplings = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                let w: f64 = rng.sample(StandardNormal);
                couplings.push((i, j, w.abs()));
            }
        }
    }
    IsingModel::new(n, vec![0.0; n], couplings).expect("generated model is valid")
}

/// The n=10, density 0.3 instance used for the staleness/accuracy curves.
pub fn calibration_instance() -> IsingModel {
    random_model(10, 0.3, 1.0, CALIBRATION_SEED)
}

/// Open-boundary `rows x cols` lattice, spin `r * cols + c`.
pub fn grid(rows: usize, cols: usize, coupling: f64) -> IsingModel {
    let mut couplings = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let i = r * cols + c;
            if c + 1 < cols {
                couplings.push((i, i + 1, coupling));
            }
            if r + 1 < rows {
                couplings.push((i, i + cols, coupling));
            }
        }
    }
    let n = rows * cols;
    IsingModel::new(n, vec![0.0; n], couplings).expect("grid is valid")
}

pub fn chain(n: usize, coupling: f64) -> IsingModel {
    let couplings = (0..n.saturating_sub(1)).map(|i| (i, i + 1, coupling));
    IsingModel::new(n, vec![0.0; n], couplings).expect("chain is valid")
}

pub fn ring(n: usize, coupling: f64) -> IsingModel {
    let couplings = (0..n).map(|i| (i, (i + 1) % n, coupling));
    IsingModel::new(n, vec![0.0; n], couplings).expect("ring is valid")
}

pub fn clique(n: usize, coupling: f64) -> IsingModel {
    let couplings = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, coupling)));
    IsingModel::new(n, vec![0.0; n], couplings).expect("clique is valid")
}

/// Disjoint cliques of the given size joined one after another.
pub fn disjoint_cliques(count: usize, size: usize, coupling: f64) -> IsingModel {
    let n = count * size;
    let couplings = (0..count).flat_map(|c| {
        let base = c * size;
        (0..size).flat_map(move |a| (a + 1..size).map(move |b| (base + a, base + b, coupling)))
    });
    IsingModel::new(n, vec![0.0; n], couplings).expect("cliques are valid")
}
