//! Host-side control flow: partitioning, key broadcast, rank scheduling.

pub mod dpu_program;
mod job;
mod partition;
mod schedule;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::MachineError;

pub use crate::machine::validate_timeline;
pub use job::{
    price_job, run_job, JobOutput, JobResult, JobShape, Machine, PhaseTimes, PricedJob, Workload,
};
pub use partition::{partition_aes, partition_sha, PartitionPlan, Slice};
pub use schedule::{schedule, RankCost};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JobError {
    #[error("buffer length {len} is not a multiple of {unit} bytes")]
    Alignment { len: u64, unit: u64 },
    #[error("{0}")]
    Domain(String),
    #[error("DPU {dpu} needs {needed} bytes of MRAM but only {available} are available")]
    Capacity { dpu: u32, needed: u64, available: u64 },
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// How the host overlaps work across ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Serial transfers, one simultaneous launch, serial retrieval.
    Sync,
    /// "PIM #1": per-rank asynchronous transfers, then one simultaneous launch.
    #[serde(alias = "pim1")]
    AsyncRankTransfer,
    /// "PIM #2": per-rank synchronous transfer followed by an asynchronous launch.
    #[serde(alias = "pim2")]
    AsyncRankExecution,
}

impl Strategy {
    pub const ALL: [Strategy; 3] =
        [Strategy::Sync, Strategy::AsyncRankTransfer, Strategy::AsyncRankExecution];

    pub fn short_name(&self) -> &'static str {
        match self {
            Strategy::Sync => "sync",
            Strategy::AsyncRankTransfer => "pim1",
            Strategy::AsyncRankExecution => "pim2",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sync" => Ok(Strategy::Sync),
            "pim1" | "async_rank_transfer" => Ok(Strategy::AsyncRankTransfer),
            "pim2" | "async_rank_execution" => Ok(Strategy::AsyncRankExecution),
            other => Err(format!("unknown strategy `{other}` (expected sync, pim1 or pim2)")),
        }
    }
}

/// DPUs allocated for one job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub ranks: u32,
    pub dpus_per_rank: u32,
    pub tasklets: u32,
}

impl Topology {
    pub fn new(ranks: u32, dpus_per_rank: u32, tasklets: u32) -> Self {
        Topology { ranks, dpus_per_rank, tasklets }
    }

    pub fn total_dpus(&self) -> u32 {
        self.ranks * self.dpus_per_rank
    }
}
