use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use illusion_core::formats::{parse_model, write_native, Format, LoadedModel, Source};
use illusion_core::illusion::{ideal_reference_run, single_chip_report, ChipConfig, RunReport};
use illusion_core::metrics::compare;
use illusion_core::partition::partition;
use illusion_core::sampler::run_restarts;
use illusion_core::{
    BetaSchedule, ExactDistribution, GroundStates, IllusionSystem, IsingModel, Kernel,
    PartitionResult, PartitionSpec, SamplerConfig, ScheduleMode,
};

use crate::args::{
    ConvertArgs, FormatArg, IllusionArgs, KernelArg, ModeArg, ModelArgs, PartitionArgs, SampleArgs,
};
use crate::error::{config, stage, CliError};
use crate::output::{
    json, metrics_csv, sweep_energy_csv, write_all, write_atomic, RunEntry, SCHEMA_VERSION,
};

/// Largest model for which exact distributions and ground states are
/// enumerated.
pub const EXACT_LIMIT: usize = 20;

pub fn load(args: &ModelArgs) -> Result<LoadedModel, CliError> {
    let text = fs::read_to_string(&args.model).map_err(|e| CliError::io(&args.model, e))?;
    parse_model(&text, args.format.into())
        .map_err(|e| CliError::Data(format!("load {}: {e}", args.model.display())))
}

struct Oracles {
    exact: Option<ExactDistribution>,
    ground: Option<GroundStates>,
}

impl Oracles {
    /// The exact distribution only exists for a fixed temperature.
    fn new(model: &IsingModel, schedule: &BetaSchedule) -> Result<Self, CliError> {
        if model.n() > EXACT_LIMIT {
            return Ok(Self {
                exact: None,
                ground: None,
            });
        }
        let exact = match *schedule {
            BetaSchedule::Constant { beta } => {
                Some(model.exact_boltzmann(beta).map_err(stage("exact oracle"))?)
            }
            _ => None,
        };
        let ground = Some(model.ground_states().map_err(stage("ground states"))?);
        Ok(Self { exact, ground })
    }
}

/// Maps a best energy back to the source objective.
fn objective(source: &Source, energy: f64) -> Option<f64> {
    match *source {
        Source::Native => None,
        Source::Gset { total_weight } => Some((total_weight - energy) / 2.0),
        Source::Qubo { offset } => Some(energy + offset),
    }
}

fn report_rates(label: &str, updates: u64, started: Instant) {
    let secs = started.elapsed().as_secs_f64();
    if secs > 0.0 {
        eprintln!(
            "{label}: {updates} updates in {secs:.3} s ({:.3e} updates/s measured)",
            updates as f64 / secs
        );
    }
}

/// Flags as interpreted, echoed into `report.json`. Output paths are left
/// out so reruns into different directories produce identical files.
#[derive(Debug, Serialize)]
pub struct ExperimentConfig {
    pub model: String,
    pub format: FormatArg,
    pub seed: u64,
    pub sampler: SamplerConfig,
    pub chip: ChipConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
}

#[derive(Debug, Serialize)]
pub struct GridConfig {
    pub k: Vec<usize>,
    pub epsilon: f64,
    pub modes: Vec<ScheduleMode>,
    pub tau: Vec<u64>,
    pub delay: Vec<u64>,
    pub message_overhead_s: f64,
    pub payload_bytes_per_spin: u64,
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    command: &'static str,
    config: &'a ExperimentConfig,
    source: Source,
    n: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    partitions: Vec<PartitionSummary>,
    /// Best energy of each run mapped to the source objective (Gset cut or
    /// QUBO value).
    #[serde(skip_serializing_if = "Option::is_none")]
    best_objective: Option<Vec<f64>>,
    runs: &'a [RunEntry],
}

#[derive(Serialize)]
struct PartitionSummary {
    k: usize,
    cut_weight: f64,
    part_sizes: Vec<usize>,
}

fn write_results(out: &Path, report: &Report<'_>) -> Result<(), CliError> {
    write_all(&[
        (out.join("report.json"), json(report)?),
        (out.join("metrics.csv"), metrics_csv(report.runs)?),
        (out.join("sweep_energy.csv"), sweep_energy_csv(report.runs)?),
    ])
}

fn best_objectives(source: &Source, runs: &[RunEntry]) -> Option<Vec<f64>> {
    runs.iter()
        .map(|e| objective(source, e.report.trace.best_energy))
        .collect()
}

pub fn sample(seed: u64, args: &SampleArgs) -> Result<(), CliError> {
    let loaded = load(&args.model)?;
    let model = &loaded.model;
    let kernel = match args.kernel {
        KernelArg::Sequential => Kernel::SequentialGibbs,
        KernelArg::Chromatic => Kernel::ChromaticGibbs,
    };
    let mut cfg = args.sampler.config(kernel, seed).map_err(CliError::Usage)?;
    cfg.parallel = true;
    cfg.validate().map_err(config("sampler config"))?;
    let chip = args.chip.config();
    chip.validate().map_err(config("chip config"))?;
    if args.restarts == 0 {
        return Err(CliError::Usage("--restarts must be at least 1".into()));
    }
    if model.n() > chip.capacity {
        return Err(CliError::Usage(format!(
            "model has {} spins, chip capacity is {}",
            model.n(),
            chip.capacity
        )));
    }
    let oracles = Oracles::new(model, &cfg.schedule)?;

    let started = Instant::now();
    let traces = run_restarts(model, &cfg, args.restarts).map_err(stage("sample"))?;
    report_rates("sample", traces.iter().map(|t| t.attempts).sum(), started);

    let runs = traces
        .into_iter()
        .enumerate()
        .map(|(run, trace)| {
            let mut report = single_chip_report(trace, &chip);
            report.comparison = Some(
                compare(
                    &report,
                    None,
                    oracles.exact.as_ref(),
                    oracles.ground.as_ref(),
                    cfg.burn_in,
                )
                .map_err(stage("metrics"))?,
            );
            Ok(RunEntry {
                run,
                label: "sample".into(),
                report,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let echo = ExperimentConfig {
        model: args.model.model.display().to_string(),
        format: args.model.format,
        seed,
        sampler: cfg,
        chip,
        restarts: Some(args.restarts),
        grid: None,
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "sample",
        config: &echo,
        source: loaded.source,
        n: model.n(),
        partitions: Vec::new(),
        best_objective: best_objectives(&loaded.source, &runs),
        runs: &runs,
    };
    write_results(&args.out, &report)
}

#[derive(Serialize)]
struct PartitionReport<'a> {
    schema_version: u32,
    command: &'static str,
    model: String,
    format: FormatArg,
    seed: u64,
    spec: &'a PartitionSpec,
    result: &'a PartitionResult,
}

pub fn partition_cmd(seed: u64, args: &PartitionArgs) -> Result<(), CliError> {
    let loaded = load(&args.model)?;
    let mut spec = PartitionSpec::new(args.k)
        .with_epsilon(args.epsilon)
        .with_seed(seed);
    if let Some(c) = args.capacity {
        spec = spec.with_capacity(c);
    }
    spec.validate(loaded.model.n())
        .map_err(config("partition spec"))?;
    let result = partition(&loaded.model, &spec).map_err(stage("partition"))?;

    let rows: Vec<Vec<String>> = result
        .assignment
        .iter()
        .enumerate()
        .map(|(i, p)| vec![i.to_string(), p.to_string()])
        .collect();
    let report = PartitionReport {
        schema_version: SCHEMA_VERSION,
        command: "partition",
        model: args.model.model.display().to_string(),
        format: args.model.format,
        seed,
        spec: &spec,
        result: &result,
    };
    write_all(&[
        (args.out.join("partition.json"), json(&report)?),
        (
            args.out.join("assignment.csv"),
            crate::output::csv_bytes(&["spin", "part"], &rows)?,
        ),
    ])
}

/// One partitioned run of the grid.
#[derive(Debug, Clone, Copy)]
struct GridPoint {
    mode: ModeArg,
    k: usize,
    tau: u64,
    delay: u64,
}

fn grid(args: &IllusionArgs) -> Vec<GridPoint> {
    let mut points = Vec::new();
    let mut modes = args.mode.clone();
    modes.dedup();
    for &mode in &modes {
        // Synchronous runs have no delivery delay.
        let delays: &[u64] = if mode == ModeArg::Sync {
            &[0]
        } else {
            &args.delay
        };
        for &k in &args.k {
            for &tau in &args.tau {
                for &delay in delays {
                    points.push(GridPoint {
                        mode,
                        k,
                        tau,
                        delay,
                    });
                }
            }
        }
    }
    points
}

pub fn illusion(seed: u64, args: &IllusionArgs) -> Result<(), CliError> {
    let loaded = load(&args.model)?;
    let model = &loaded.model;
    let n = model.n();
    let mut cfg = args
        .sampler
        .config(Kernel::ChromaticGibbs, seed)
        .map_err(CliError::Usage)?;
    cfg.parallel = true;
    cfg.validate().map_err(config("sampler config"))?;
    let chip = args.chip.config();
    chip.validate().map_err(config("chip config"))?;
    if args.k.is_empty() || args.tau.is_empty() || args.delay.is_empty() || args.mode.is_empty() {
        return Err(CliError::Usage(
            "--k, --tau, --delay and --mode need at least one value".into(),
        ));
    }
    for &tau in &args.tau {
        args.interconnect(tau, 0)
            .validate()
            .map_err(config("interconnect config"))?;
    }

    let mut ks = args.k.clone();
    ks.sort_unstable();
    ks.dedup();
    let mut specs = Vec::new();
    for &k in &ks {
        let mut spec = PartitionSpec::new(k)
            .with_epsilon(args.epsilon)
            .with_seed(seed);
        if let Some(c) = args.chip.capacity {
            spec = spec.with_capacity(c);
        }
        spec.validate(n).map_err(config("partition spec"))?;
        specs.push(spec);
    }
    let oracles = Oracles::new(model, &cfg.schedule)?;

    let started = Instant::now();
    let partitions: Vec<PartitionResult> = specs
        .par_iter()
        .map(|spec| partition(model, spec).map_err(stage("partition")))
        .collect::<Result<_, _>>()?;

    let mut ideal = ideal_reference_run(model, &cfg, &chip).map_err(stage("ideal reference"))?;
    ideal.comparison = Some(
        compare(
            &ideal,
            None,
            oracles.exact.as_ref(),
            oracles.ground.as_ref(),
            cfg.burn_in,
        )
        .map_err(stage("metrics"))?,
    );

    let points = grid(args);
    let reports: Vec<RunReport> = points
        .par_iter()
        .map(|p| {
            let part = &partitions[ks.binary_search(&p.k).expect("k was partitioned")];
            let system = IllusionSystem::build(
                model,
                part,
                &chip,
                &args.interconnect(p.tau, p.delay),
                p.mode.into(),
            )
            .map_err(stage("build system"))?;
            let mut r = system.run(&cfg).map_err(stage("run"))?;
            r.comparison = Some(
                compare(
                    &r,
                    Some(&ideal),
                    oracles.exact.as_ref(),
                    oracles.ground.as_ref(),
                    cfg.burn_in,
                )
                .map_err(stage("metrics"))?,
            );
            Ok(r)
        })
        .collect::<Result<_, CliError>>()?;

    let mut runs = vec![RunEntry {
        run: 0,
        label: "ideal".into(),
        report: ideal,
    }];
    for (i, (p, report)) in points.iter().zip(reports).enumerate() {
        let label = match p.mode {
            ModeArg::Sync => "sync",
            ModeArg::Async => "async",
        };
        runs.push(RunEntry {
            run: i + 1,
            label: label.into(),
            report,
        });
    }
    report_rates(
        "illusion",
        runs.iter().map(|e| e.report.total_updates()).sum(),
        started,
    );

    let echo = ExperimentConfig {
        model: args.model.model.display().to_string(),
        format: args.model.format,
        seed,
        sampler: cfg,
        chip,
        restarts: None,
        grid: Some(GridConfig {
            k: args.k.clone(),
            epsilon: args.epsilon,
            modes: args.mode.iter().map(|&m| m.into()).collect(),
            tau: args.tau.clone(),
            delay: args.delay.clone(),
            message_overhead_s: args.message_overhead,
            payload_bytes_per_spin: args.payload_bytes,
        }),
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "illusion",
        config: &echo,
        source: loaded.source,
        n,
        partitions: partitions
            .iter()
            .map(|p| PartitionSummary {
                k: p.k,
                cut_weight: p.cut_weight,
                part_sizes: p.part_sizes.clone(),
            })
            .collect(),
        best_objective: best_objectives(&loaded.source, &runs),
        runs: &runs,
    };
    write_results(&args.out, &report)
}

pub fn convert(args: &ConvertArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let format: Format = args.from.into();
    let loaded = parse_model(&text, format)
        .map_err(|e| CliError::Data(format!("load {}: {e}", args.input.display())))?;
    let header = match loaded.source {
        Source::Native => String::new(),
        Source::Gset { total_weight } => {
            format!("# from gset: cut = ({total_weight} - energy) / 2\n")
        }
        Source::Qubo { offset } => format!("# from qubo: objective = energy + {offset}\n"),
    };
    let body = header + &write_native(&loaded.model);
    write_atomic(&args.output, body.as_bytes())
}
