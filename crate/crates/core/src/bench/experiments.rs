use rayon::prelude::*;
use serde::Serialize;

use crate::machine::validate_timeline;
use crate::orchestrator::{price_job, JobShape, Machine, PricedJob, Strategy, Topology};

use super::baseline::{host_threads, run_host_baseline, sample_workload};
use super::{Algorithm, BenchError, ExperimentKind, ExperimentSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep: u32,
    pub kernel_s: f64,
    pub to_dpu_s: f64,
    pub from_dpu_s: f64,
    pub prepare_s: f64,
    pub total_s: f64,
    pub baseline_s: Option<f64>,
    /// Kernel-time speedup over the first sweep point (tasklet and strong scaling).
    pub speedup: Option<f64>,
    pub bytes_to_dpu: u64,
    pub bytes_from_dpu: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub name: String,
    pub experiment: ExperimentKind,
    pub algorithm: Algorithm,
    pub strategy: Strategy,
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<ResultRow>,
}

impl ExperimentResult {
    pub fn row(&self, sweep: u32) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.sweep == sweep)
    }

    /// The same data with the host-CPU column blanked.
    pub fn without_baseline(&self) -> Self {
        let mut r = self.clone();
        r.metadata.retain(|(k, _)| !k.starts_with("baseline"));
        for row in &mut r.rows {
            row.baseline_s = None;
        }
        r
    }

    fn meta(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string().replace(char::is_whitespace, "_");
        self.metadata.push((key.to_string(), value));
    }
}

impl ExperimentSpec {
    /// Job sizes and topology of one sweep point.
    pub fn point(&self, sweep: u32, machine: &Machine) -> (JobShape, Topology) {
        let bytes = self.workload_bytes();
        let t = self.tasklets();
        let (total, topology) = match self.experiment {
            ExperimentKind::TaskletScaling => (bytes, Topology::new(1, 1, sweep)),
            ExperimentKind::StrongScaling => (bytes, Topology::new(1, sweep, t)),
            ExperimentKind::WeakScaling => (bytes * sweep as u64, Topology::new(1, sweep, t)),
            ExperimentKind::RankScaling => (
                bytes * sweep as u64,
                Topology::new(sweep, machine.profile.dpus_per_rank, t),
            ),
        };
        let shape = match self.algorithm {
            Algorithm::Aes128 => JobShape::Aes { buffer_len: total },
            Algorithm::Sha256 => JobShape::Sha {
                message_lengths: vec![self.message_bytes; (total / self.message_bytes) as usize],
            },
        };
        (shape, topology)
    }
}

fn price_point(
    spec: &ExperimentSpec,
    sweep: u32,
    strategy: Strategy,
    machine: &Machine,
) -> Result<ResultRow, BenchError> {
    let (shape, topology) = spec.point(sweep, machine);
    let job: PricedJob = price_job(&shape, strategy, &topology, machine)?;
    let experiment = spec.name();
    let count = validate_timeline(&job.timeline).len();
    if count > 0 {
        return Err(BenchError::Timeline { experiment, sweep, count });
    }
    for (what, got, expected) in [
        ("CPU->DPU", job.bytes_to_dpu, shape.payload_bytes()),
        ("DPU->CPU", job.bytes_from_dpu, shape.result_bytes()),
    ] {
        if got != expected {
            return Err(BenchError::Conservation { experiment, sweep, what, got, expected });
        }
    }
    let p = job.phase_times;
    Ok(ResultRow {
        sweep,
        kernel_s: p.kernel,
        to_dpu_s: p.cpu_to_dpu,
        from_dpu_s: p.dpu_to_cpu,
        prepare_s: p.prepare,
        total_s: job.makespan,
        baseline_s: None,
        speedup: None,
        bytes_to_dpu: job.bytes_to_dpu,
        bytes_from_dpu: job.bytes_from_dpu,
    })
}

fn sweep_one(spec: &ExperimentSpec, strategy: Strategy, machine: &Machine) -> Result<ExperimentResult, BenchError> {
    let mut rows = Vec::new();
    for s in spec.sweep() {
        rows.push(price_point(spec, s, strategy, machine)?);
    }
    if matches!(spec.experiment, ExperimentKind::TaskletScaling | ExperimentKind::StrongScaling) {
        let reference = rows[0].kernel_s;
        for r in &mut rows {
            r.speedup = Some(reference / r.kernel_s);
        }
    }
    let multi = spec.strategies().len() > 1 || spec.experiment == ExperimentKind::RankScaling;
    let name = if multi { format!("{}_{}", spec.name(), strategy.short_name()) } else { spec.name() };
    let mut result = ExperimentResult {
        name,
        experiment: spec.experiment,
        algorithm: spec.algorithm,
        strategy,
        metadata: Vec::new(),
        rows,
    };
    result.meta("experiment", spec.experiment);
    result.meta("algorithm", spec.algorithm);
    result.meta("strategy", strategy.short_name());
    result.meta("seed", spec.seed);
    result.meta("workload_bytes", spec.workload_bytes());
    if spec.algorithm == Algorithm::Sha256 {
        result.meta("message_bytes", spec.message_bytes);
    }
    if spec.experiment != ExperimentKind::TaskletScaling {
        result.meta("tasklets", spec.tasklets());
    }
    Ok(result)
}

fn simulate(spec: &ExperimentSpec, machine: &Machine) -> Result<Vec<ExperimentResult>, BenchError> {
    spec.validate()?;
    spec.strategies().into_iter().map(|s| sweep_one(spec, s, machine)).collect()
}

/// Times the host kernels on a seeded sample and fills the baseline column
/// by scaling the per-byte time to each row's payload.
fn attach_baseline(spec: &ExperimentSpec, machine: &Machine, results: &mut [ExperimentResult]) -> Result<(), BenchError> {
    let sample = sample_workload(spec.algorithm, spec.baseline_sample_bytes, spec.message_bytes, spec.seed);
    let single = run_host_baseline(&sample.as_workload(), 1, spec.repetitions)?;
    let all_cores = host_threads();
    let parallel = if all_cores > 1 {
        Some(run_host_baseline(&sample.as_workload(), all_cores, spec.repetitions)?)
    } else {
        None
    };
    for result in results.iter_mut() {
        for row in &mut result.rows {
            let (shape, _) = spec.point(row.sweep, machine);
            row.baseline_s = Some(single.seconds_per_byte() * shape.payload_bytes() as f64);
        }
        result.meta("baseline_threads", 1);
        result.meta("baseline_repetitions", spec.repetitions);
        result.meta("baseline_sample_bytes", single.bytes);
        result.meta("baseline_seconds_per_byte", single.seconds_per_byte());
        result.meta("baseline_all_cores_threads", all_cores);
        let per_byte = parallel.as_ref().unwrap_or(&single).seconds_per_byte();
        result.meta("baseline_all_cores_seconds_per_byte", per_byte);
    }
    Ok(())
}

fn expect_kind(spec: &ExperimentSpec, kind: ExperimentKind) -> Result<(), BenchError> {
    if spec.experiment != kind {
        return Err(BenchError::Spec(format!("expected a {kind} spec, got {}", spec.experiment)));
    }
    Ok(())
}

fn run_single(spec: &ExperimentSpec, kind: ExperimentKind, machine: &Machine) -> Result<ExperimentResult, BenchError> {
    expect_kind(spec, kind)?;
    let mut results = run_experiment(spec, machine)?;
    if results.len() != 1 {
        return Err(BenchError::Spec(format!("{kind} takes exactly one strategy")));
    }
    Ok(results.remove(0))
}

pub fn run_tasklet_scaling(spec: &ExperimentSpec, machine: &Machine) -> Result<ExperimentResult, BenchError> {
    run_single(spec, ExperimentKind::TaskletScaling, machine)
}

pub fn run_strong_scaling(spec: &ExperimentSpec, machine: &Machine) -> Result<ExperimentResult, BenchError> {
    run_single(spec, ExperimentKind::StrongScaling, machine)
}

pub fn run_weak_scaling(spec: &ExperimentSpec, machine: &Machine) -> Result<ExperimentResult, BenchError> {
    run_single(spec, ExperimentKind::WeakScaling, machine)
}

/// One result per strategy.
pub fn run_rank_scaling(spec: &ExperimentSpec, machine: &Machine) -> Result<Vec<ExperimentResult>, BenchError> {
    expect_kind(spec, ExperimentKind::RankScaling)?;
    run_experiment(spec, machine)
}

pub fn run_experiment(spec: &ExperimentSpec, machine: &Machine) -> Result<Vec<ExperimentResult>, BenchError> {
    let mut results = simulate(spec, machine)?;
    if spec.baseline() {
        attach_baseline(spec, machine, &mut results)?;
    }
    Ok(results)
}

/// Runs several experiments. With `parallel`, the simulations run
/// concurrently; baselines are always timed afterwards, one at a time.
pub fn run_experiments(
    specs: &[ExperimentSpec],
    machine: &Machine,
    parallel: bool,
) -> Result<Vec<ExperimentResult>, BenchError> {
    let simulated: Vec<Result<Vec<ExperimentResult>, BenchError>> = if parallel {
        specs.par_iter().map(|s| simulate(s, machine)).collect()
    } else {
        specs.iter().map(|s| simulate(s, machine)).collect()
    };
    let mut out = Vec::new();
    for (spec, results) in specs.iter().zip(simulated) {
        let mut results = results?;
        if spec.baseline() {
            attach_baseline(spec, machine, &mut results)?;
        }
        out.extend(results);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind, alg: Algorithm) -> ExperimentSpec {
        let mut s = ExperimentSpec::new(kind, alg);
        s.workload_bytes = Some(match kind {
            ExperimentKind::RankScaling => 4 << 20,
            _ => 1 << 20,
        });
        s.baseline_sample_bytes = 256 * 1024;
        s.repetitions = 1;
        s
    }

    #[test]
    fn tasklet_scaling_shape() {
        let r = run_tasklet_scaling(&small(ExperimentKind::TaskletScaling, Algorithm::Aes128), &Machine::default()).unwrap();
        assert_eq!(r.rows.len(), 24);
        assert_eq!(r.rows[0].speedup, Some(1.0));
        let to: Vec<f64> = r.rows.iter().map(|r| r.to_dpu_s).collect();
        assert!(to.iter().all(|&t| t == to[0]));
        assert!(r.rows[10].speedup.unwrap() > 10.0);
    }

    #[test]
    fn rank_scaling_one_result_per_strategy() {
        let mut s = small(ExperimentKind::RankScaling, Algorithm::Sha256);
        s.sweep = Some(vec![1, 2, 3]);
        let rs = run_rank_scaling(&s, &Machine::default()).unwrap();
        assert_eq!(rs.len(), 3);
        for r in &rs {
            assert!(r.rows.iter().all(|row| row.baseline_s.unwrap() > 0.0));
            assert!(r.without_baseline().rows.iter().all(|row| row.baseline_s.is_none()));
        }
        assert_eq!(rs[0].rows[0].total_s, rs[1].rows[0].total_s);
        assert_eq!(rs[1].rows[0].total_s, rs[2].rows[0].total_s);
    }

    #[test]
    fn simulations_are_deterministic() {
        let s = small(ExperimentKind::WeakScaling, Algorithm::Aes128);
        let m = Machine::default();
        assert_eq!(run_weak_scaling(&s, &m).unwrap(), run_weak_scaling(&s, &m).unwrap());
        let par = run_experiments(&[s.clone(), s.clone()], &m, true).unwrap();
        assert_eq!(par[0], par[1]);
    }

    #[test]
    fn wrong_kind_and_bad_sweep_are_rejected() {
        let m = Machine::default();
        let s = small(ExperimentKind::WeakScaling, Algorithm::Aes128);
        assert!(run_strong_scaling(&s, &m).is_err());
        let mut unsorted = s.clone();
        unsorted.sweep = Some(vec![4, 2]);
        assert!(matches!(run_weak_scaling(&unsorted, &m), Err(BenchError::Spec(_))));
    }
}
