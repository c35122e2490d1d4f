//! Analytic model of a UPMEM-style machine.
//!
//! The model prices work; it never runs crypto. A DPU's kernel time is its
//! pipeline-limited compute plus serialized MRAM traffic, a rank finishes
//! with its slowest DPU, and host transfers are batched per rank over an
//! independent channel. DPUs never talk to each other.

mod cost;
mod profile;
mod timeline;
mod transfer;

use thiserror::Error;

pub use cost::{
    dpu_kernel_cycles, effective_ipc, mram_access_cycles, simulate_dpu_kernel,
    simulate_rank_kernel, DpuWorkload, KernelCost, KernelCycles, TaskletShare, Work,
};
pub use profile::{default_profile, MachineProfile, KIB, MIB, MRAM_ALIGNMENT};
pub use timeline::{
    validate_timeline, Event, EventKind, ExecutionTimeline, Interval, Violation,
};
pub use transfer::{simulate_transfer, Direction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MachineError {
    #[error("tasklet count {tasklets} outside 1..={max}")]
    TaskletRange { tasklets: u32, max: u32 },
    #[error("MRAM access of {bytes} bytes at offset {offset} is not {align}-byte aligned")]
    MramMisaligned { offset: u64, bytes: u64, align: u64 },
    #[error("MRAM access of {bytes} bytes is outside 1..={max}")]
    MramAccessSize { bytes: u64, max: u64 },
    #[error(
        "WRAM overflow: {tasklets} tasklets x {cache_bytes} cache bytes exceeds {wram_bytes} bytes"
    )]
    WramOverflow { tasklets: u32, cache_bytes: u64, wram_bytes: u64 },
    #[error("invalid kernel cost: {0}")]
    InvalidCost(String),
    #[error("invalid profile: {}", .0.join("; "))]
    InvalidProfile(Vec<String>),
    #[error("cannot parse profile: {0}")]
    Parse(String),
}
