//! Accuracy and mixing diagnostics.
//!
//! Accuracy is the total variation distance between a run's empirical state
//! histogram and the exact Boltzmann distribution; KL divergence is reported
//! alongside it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::illusion::RunReport;
use crate::model::{ExactDistribution, GroundStates, MAX_EXACT_SPINS};
use crate::sampler::SampleTrace;

/// Window constant for the integrated autocorrelation time.
pub const DEFAULT_WINDOW_CONSTANT: f64 = 5.0;
/// Shortest series the autocorrelation estimator accepts.
pub const MIN_SERIES_LEN: usize = 100;

const NORMALIZATION_TOL: f64 = 1e-6;

fn check_pair(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::contract(format!(
            "histograms have different supports ({} vs {})",
            p.len(),
            q.len()
        )));
    }
    for (name, h) in [("p", p), ("q", q)] {
        let total: f64 = h.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL || h.iter().any(|&x| x < 0.0) {
            return Err(Error::contract(format!(
                "{name} is not a probability vector (sum {total})"
            )));
        }
    }
    Ok(())
}

/// `(1/2) * sum |p_i - q_i|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    let l1: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    Ok((0.5 * l1).clamp(0.0, 1.0))
}

/// `sum p_i ln(p_i / q_i)` in nats, with `0 ln 0 = 0`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    let mut kl = 0.0;
    for (i, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Err(Error::contract(format!(
                "q vanishes at state {i} where p = {pi}"
            )));
        }
        kl += pi * (pi / qi).ln();
    }
    Ok(kl.max(0.0))
}

/// Dense normalised distribution over `2^n` states from a sparse histogram.
pub fn histogram_distribution(histogram: &BTreeMap<u64, u64>, n: usize) -> Result<Vec<f64>> {
    if n > MAX_EXACT_SPINS {
        return Err(Error::capacity(format!(
            "dense histograms limited to {MAX_EXACT_SPINS} spins"
        )));
    }
    let total: u64 = histogram.values().sum();
    if total == 0 {
        return Err(Error::contract("histogram is empty"));
    }
    let mut dense = vec![0.0; 1 << n];
    for (&index, &count) in histogram {
        let slot = dense
            .get_mut(index as usize)
            .ok_or_else(|| Error::contract(format!("state index {index} outside 2^{n}")))?;
        *slot = count as f64 / total as f64;
    }
    Ok(dense)
}

pub fn empirical_distribution(trace: &SampleTrace) -> Result<Vec<f64>> {
    let histogram = trace
        .histogram
        .as_ref()
        .ok_or_else(|| Error::contract("trace carries no histogram"))?;
    histogram_distribution(histogram, trace.n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Autocorrelation {
    /// Integrated autocorrelation time in sweeps, floored at 0.5.
    pub tau: f64,
    /// Lag at which the self-consistent window closed.
    pub window: usize,
    /// The series was constant; `tau` is reported as 0.5.
    pub zero_variance: bool,
}

/// Integrated autocorrelation time `1/2 + sum_{t=1}^{W} rho(t)`, where the
/// window `W` is the first lag with `W >= c * tau(W)`.
pub fn autocorrelation_time(series: &[f64], window_constant: f64) -> Result<Autocorrelation> {
    let len = series.len();
    if len < MIN_SERIES_LEN {
        return Err(Error::contract(format!(
            "series of length {len} is shorter than {MIN_SERIES_LEN}"
        )));
    }
    let mean = series.iter().sum::<f64>() / len as f64;
    let centered: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let c0 = centered.iter().map(|x| x * x).sum::<f64>() / len as f64;
    let noise_floor = f64::EPSILON * mean.abs().max(1.0);
    if c0 <= noise_floor * noise_floor {
        return Ok(Autocorrelation {
            tau: 0.5,
            window: 0,
            zero_variance: true,
        });
    }

    let mut tau = 0.5;
    let mut window = len - 1;
    for lag in 1..len {
        let ct = centered[..len - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / len as f64;
        tau += ct / c0;
        if lag as f64 >= window_constant * tau {
            window = lag;
            break;
        }
    }
    Ok(Autocorrelation {
        tau: tau.max(0.5),
        window,
        zero_variance: false,
    })
}

/// Fraction of recorded states that are ground states.
pub fn ground_state_probability(trace: &SampleTrace, ground: &GroundStates) -> Result<f64> {
    if trace.recorded == 0 {
        return Err(Error::contract("trace recorded no states"));
    }
    let hits = if let Some(h) = &trace.histogram {
        ground
            .indices()
            .iter()
            .map(|i| h.get(i).copied().unwrap_or(0))
            .sum::<u64>()
    } else if let Some(states) = &trace.states {
        states.iter().filter(|s| ground.states.contains(s)).count() as u64
    } else {
        return Err(Error::contract(
            "trace carries neither histogram nor states",
        ));
    };
    Ok(hits as f64 / trace.recorded as f64)
}

/// How a run compares to the exact target and to the ideal single chip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// TV distance to the exact Boltzmann distribution (n ≤ 24 only).
    pub tv: Option<f64>,
    pub kl: Option<f64>,
    /// TV distance between this run's histogram and the ideal reference's.
    pub tv_vs_ideal: Option<f64>,
    /// Integrated autocorrelation time of the post-burn-in energy series.
    pub autocorrelation_time: Option<f64>,
    pub zero_variance: bool,
    pub best_energy: f64,
    pub ground_hit_probability: Option<f64>,
    /// Effective update throughput relative to the ideal reference.
    pub throughput_ratio: f64,
    /// `(sweeps, TV)` at each histogram snapshot.
    pub tv_curve: Vec<(u64, f64)>,
}

/// Fills a [`ComparisonReport`] from whatever oracles are available.
pub fn compare(
    report: &RunReport,
    ideal: Option<&RunReport>,
    exact: Option<&ExactDistribution>,
    ground: Option<&GroundStates>,
    burn_in: u64,
) -> Result<ComparisonReport> {
    let trace = &report.trace;
    let empirical = match &trace.histogram {
        Some(h) if trace.recorded > 0 => Some(histogram_distribution(h, trace.n)?),
        _ => None,
    };

    let (tv, kl) = match (&empirical, exact) {
        (Some(p), Some(q)) => (
            Some(tv_distance(p, q.probabilities())?),
            Some(kl_divergence(p, q.probabilities())?),
        ),
        _ => (None, None),
    };

    let tv_vs_ideal = match (&empirical, ideal.and_then(|r| r.trace.histogram.as_ref())) {
        (Some(p), Some(h)) if ideal.is_some_and(|r| r.trace.recorded > 0) => {
            Some(tv_distance(p, &histogram_distribution(h, trace.n)?)?)
        }
        _ => None,
    };

    let tail = &trace.energies[(burn_in as usize).min(trace.energies.len())..];
    let (autocorrelation_time, zero_variance) = if tail.len() >= MIN_SERIES_LEN {
        let a = self::autocorrelation_time(tail, DEFAULT_WINDOW_CONSTANT)?;
        (Some(a.tau), a.zero_variance)
    } else {
        (None, false)
    };

    let ground_hit_probability = match ground {
        Some(g) if trace.recorded > 0 => Some(ground_state_probability(trace, g)?),
        _ => None,
    };

    let throughput_ratio = match ideal {
        Some(r) if r.accounting.flips_per_s > 0.0 => {
            report.accounting.flips_per_s / r.accounting.flips_per_s
        }
        _ => 1.0,
    };

    let mut tv_curve = Vec::new();
    if let Some(q) = exact {
        for snap in &trace.snapshots {
            if snap.histogram.is_empty() {
                continue;
            }
            let p = histogram_distribution(&snap.histogram, trace.n)?;
            tv_curve.push((snap.sweeps, tv_distance(&p, q.probabilities())?));
        }
    }

    Ok(ComparisonReport {
        tv,
        kl,
        tv_vs_ideal,
        autocorrelation_time,
        zero_variance,
        best_energy: trace.best_energy,
        ground_hit_probability,
        throughput_ratio,
        tv_curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IsingModel, SpinState};
    use crate::rng::SpinStream;
    use crate::sampler::{run, BetaSchedule, Kernel, SamplerConfig};

    #[test]
    fn tv_examples() {
        let p = [0.25, 0.25, 0.5];
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.75, 0.25]).unwrap(), 0.25);
        assert!(tv_distance(&[0.5, 0.5], &[1.0, 0.0, 0.0]).is_err());
        assert!(tv_distance(&[0.5, 0.6], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn kl_examples() {
        let p = [0.1, 0.2, 0.7];
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let kl = kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((kl - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((kl - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(matches!(
            kl_divergence(&[0.5, 0.5], &[1.0, 0.0]),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn white_noise_has_half_sweep_tau() {
        let mut s = SpinStream::new(17, 0);
        let series: Vec<f64> = (0..20_000).map(|_| s.next_uniform()).collect();
        let a = autocorrelation_time(&series, DEFAULT_WINDOW_CONSTANT).unwrap();
        assert!((a.tau - 0.5).abs() < 0.2, "{a:?}");
        assert!(!a.zero_variance);
    }

    #[test]
    fn alternating_series_floors_at_half() {
        let series: Vec<f64> = (0..200)
            .map(|t| if t % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let a = autocorrelation_time(&series, DEFAULT_WINDOW_CONSTANT).unwrap();
        assert_eq!(a.tau, 0.5);
        assert_eq!(a.window, 1);
    }

    #[test]
    fn constant_series_is_flagged() {
        let a = autocorrelation_time(&[3.0; 150], DEFAULT_WINDOW_CONSTANT).unwrap();
        assert_eq!(a.tau, 0.5);
        assert!(a.zero_variance);
        assert!(autocorrelation_time(&[1.0; 99], DEFAULT_WINDOW_CONSTANT).is_err());
    }

    #[test]
    fn ar1_series_matches_closed_form() {
        // AR(1) with coefficient r has tau = (1 + r) / (2 (1 - r)).
        let r = 0.8;
        let mut s = SpinStream::new(5, 1);
        let mut x = 0.0;
        let series: Vec<f64> = (0..200_000)
            .map(|_| {
                x = r * x + (s.next_uniform() - 0.5);
                x
            })
            .collect();
        let a = autocorrelation_time(&series, DEFAULT_WINDOW_CONSTANT).unwrap();
        let expected = (1.0 + r) / (2.0 * (1.0 - r));
        assert!((a.tau - expected).abs() / expected < 0.1, "{a:?}");
    }

    fn ferro_pair() -> IsingModel {
        IsingModel::builder(2).coupling(0, 1, 1.0).build().unwrap()
    }

    #[test]
    fn ground_probability_examples() {
        let m = ferro_pair();
        let ground = m.ground_states().unwrap();

        let cold = SamplerConfig::new(
            Kernel::SequentialGibbs,
            BetaSchedule::constant(3.0),
            200_000,
            1,
        )
        .with_burn_in(100);
        let t = run(&m, &cold).unwrap();
        let p = ground_state_probability(&t, &ground).unwrap();
        let e3 = 3.0f64.exp();
        let expected = 2.0 * e3 / (2.0 * e3 + 2.0 / e3);
        assert!((expected - 0.9975).abs() < 1e-4);
        assert!((p - expected).abs() < 0.002, "{p}");

        let hot = SamplerConfig::new(
            Kernel::SequentialGibbs,
            BetaSchedule::constant(1e-9),
            100_000,
            2,
        );
        let t = run(&m, &hot).unwrap();
        let p = ground_state_probability(&t, &ground).unwrap();
        assert!((p - 0.5).abs() < 0.01, "{p}");

        let mut all_ground = t.clone();
        all_ground.histogram = Some(BTreeMap::from([(0b11, 10)]));
        all_ground.recorded = 10;
        assert_eq!(ground_state_probability(&all_ground, &ground).unwrap(), 1.0);

        let mut empty = t;
        empty.recorded = 0;
        assert!(ground_state_probability(&empty, &ground).is_err());
    }

    #[test]
    fn state_log_fallback() {
        let m = ferro_pair();
        let ground = m.ground_states().unwrap();
        let cfg = SamplerConfig::new(Kernel::SequentialGibbs, BetaSchedule::constant(1.0), 50, 4)
            .recording_states();
        let mut t = run(&m, &cfg).unwrap();
        let from_hist = ground_state_probability(&t, &ground).unwrap();
        t.histogram = None;
        assert_eq!(ground_state_probability(&t, &ground).unwrap(), from_hist);
        assert!(t.states.unwrap().iter().all(|s: &SpinState| s.len() == 2));
    }
}
