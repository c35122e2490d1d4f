//! Experiment harness: scaling sweeps over the simulator, a wall-clock
//! baseline on the host CPU, roofline characterization and CSV output.

mod baseline;
mod csv_io;
mod experiments;
mod roofline;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::MIB;
use crate::orchestrator::{JobError, Strategy};

pub use baseline::{host_threads, run_host_baseline, sample_workload, BaselineMeasurement, OwnedWorkload};
pub use csv_io::{emit_csv, parse_csv, write_csv, CsvRow, ParsedCsv, CSV_HEADER};
pub use experiments::{
    run_experiment, run_experiments, run_rank_scaling, run_strong_scaling, run_tasklet_scaling,
    run_weak_scaling, ExperimentResult, ResultRow,
};
pub use roofline::{characterize, characterize_kernel, Boundedness, HostProfile, KernelCharacterization, RooflineInput};

/// Default SHA message size; the hashing workloads use 1024 such messages per 32 MiB.
pub const DEFAULT_MESSAGE_BYTES: u64 = 32 * 1024;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Job(#[from] JobError),
    #[error("{experiment} at {sweep}: {what} moved {got} bytes, expected {expected}")]
    Conservation { experiment: String, sweep: u32, what: &'static str, got: u64, expected: u64 },
    #[error("{experiment} at {sweep}: timeline has {count} violations")]
    Timeline { experiment: String, sweep: u32, count: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Aes128,
    Sha256,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::Aes128, Algorithm::Sha256];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Aes128 => "aes128",
            Algorithm::Sha256 => "sha256",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "aes128" | "aes" => Ok(Algorithm::Aes128),
            "sha256" | "sha" => Ok(Algorithm::Sha256),
            _ => Err(format!("unknown algorithm `{s}` (expected aes128 or sha256)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    TaskletScaling,
    StrongScaling,
    WeakScaling,
    RankScaling,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 4] = [
        ExperimentKind::TaskletScaling,
        ExperimentKind::StrongScaling,
        ExperimentKind::WeakScaling,
        ExperimentKind::RankScaling,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::TaskletScaling => "tasklet_scaling",
            ExperimentKind::StrongScaling => "strong_scaling",
            ExperimentKind::WeakScaling => "weak_scaling",
            ExperimentKind::RankScaling => "rank_scaling",
        }
    }

    pub fn valid_names() -> String {
        Self::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`; valid: {}", Self::valid_names()))
    }
}

/// One experiment. Omitted fields take the defaults of the experiment kind.
///
/// `workload_bytes` is the total for tasklet and strong scaling, the per-DPU
/// amount for weak scaling, and the per-rank amount for rank scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub experiment: ExperimentKind,
    pub algorithm: Algorithm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workload_bytes: Option<u64>,
    #[serde(default = "default_message_bytes")]
    pub message_bytes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategies: Option<Vec<Strategy>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tasklets: Option<u32>,
    /// Wall-clock repetitions of the host baseline; the median is reported.
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<bool>,
    /// Bytes the host baseline is timed on before scaling per byte.
    #[serde(default = "default_baseline_sample")]
    pub baseline_sample_bytes: u64,
}

fn default_message_bytes() -> u64 {
    DEFAULT_MESSAGE_BYTES
}

fn default_repetitions() -> u32 {
    5
}

fn default_baseline_sample() -> u64 {
    4 * MIB
}

impl ExperimentSpec {
    pub fn new(experiment: ExperimentKind, algorithm: Algorithm) -> Self {
        ExperimentSpec {
            experiment,
            algorithm,
            workload_bytes: None,
            message_bytes: DEFAULT_MESSAGE_BYTES,
            sweep: None,
            strategies: None,
            tasklets: None,
            repetitions: default_repetitions(),
            seed: 0,
            baseline: None,
            baseline_sample_bytes: default_baseline_sample(),
        }
    }

    /// Every kind for both algorithms, with defaults.
    pub fn defaults() -> Vec<Self> {
        ExperimentKind::ALL
            .into_iter()
            .flat_map(|k| Algorithm::ALL.into_iter().map(move |a| ExperimentSpec::new(k, a)))
            .collect()
    }

    pub fn name(&self) -> String {
        format!("{}_{}", self.experiment, self.algorithm)
    }

    pub fn workload_bytes(&self) -> u64 {
        self.workload_bytes.unwrap_or(match self.experiment {
            ExperimentKind::TaskletScaling | ExperimentKind::StrongScaling => match self.algorithm {
                Algorithm::Aes128 => 8 * MIB,
                Algorithm::Sha256 => 32 * MIB,
            },
            ExperimentKind::WeakScaling => 512 * 1024,
            ExperimentKind::RankScaling => 32 * MIB,
        })
    }

    pub fn sweep(&self) -> Vec<u32> {
        self.sweep.clone().unwrap_or_else(|| match self.experiment {
            ExperimentKind::TaskletScaling => (1..=24).collect(),
            ExperimentKind::StrongScaling => (1..=64).collect(),
            ExperimentKind::WeakScaling => vec![1, 2, 4, 8, 16, 32, 64],
            ExperimentKind::RankScaling => (1..=40).collect(),
        })
    }

    pub fn strategies(&self) -> Vec<Strategy> {
        self.strategies.clone().unwrap_or_else(|| match self.experiment {
            ExperimentKind::RankScaling => Strategy::ALL.to_vec(),
            _ => vec![Strategy::Sync],
        })
    }

    /// Tasklets per DPU when the sweep is not over tasklets.
    pub fn tasklets(&self) -> u32 {
        self.tasklets.unwrap_or(16)
    }

    pub fn baseline(&self) -> bool {
        self.baseline.unwrap_or(self.experiment == ExperimentKind::RankScaling)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::Spec(format!("{}: {m}", self.name())));
        let sweep = self.sweep();
        if sweep.is_empty() {
            return bad("sweep is empty".into());
        }
        if sweep.contains(&0) {
            return bad("sweep values must be positive".into());
        }
        if sweep.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sweep values must be strictly increasing".into());
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.strategies().is_empty() {
            return bad("no strategies".into());
        }
        let unit = match self.algorithm {
            Algorithm::Aes128 => 16,
            Algorithm::Sha256 => self.message_bytes,
        };
        if unit == 0 {
            return bad("message_bytes must be positive".into());
        }
        for (what, bytes) in [("workload_bytes", self.workload_bytes()), ("baseline_sample_bytes", self.baseline_sample_bytes)] {
            if bytes == 0 || bytes % unit != 0 {
                return bad(format!("{what} {bytes} is not a positive multiple of {unit}"));
            }
        }
        Ok(())
    }
}
